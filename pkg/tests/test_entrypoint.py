"""Smoke tests for the G-Recon entrypoint module."""

from __future__ import annotations

import builtins
import importlib.util
import io
import sys
import types
from contextlib import redirect_stdout
from pathlib import Path

import pytest


def load_entrypoint_module():
    """Load the project entrypoint module without running it as ``__main__``."""
    module_path = Path(__file__).resolve().parents[1] / "__main__.py"
    spec = importlib.util.spec_from_file_location("grecon_entry", module_path)
    module = importlib.util.module_from_spec(spec)
    assert spec.loader is not None
    spec.loader.exec_module(module)
    return module


@pytest.fixture()
def entry_module():
    return load_entrypoint_module()


def test_check_dependencies_reports_missing_required(entry_module, monkeypatch):
    """check_dependencies should fail gracefully when networkx is unavailable."""
    numpy_stub = types.ModuleType("numpy")
    numpy_stub.__version__ = "0.0"
    monkeypatch.setitem(sys.modules, "numpy", numpy_stub)
    real_import = builtins.__import__

    def fake_import(name, globals=None, locals=None, fromlist=(), level=0):  # noqa: D401
        if name.startswith("networkx"):
            raise ImportError("No module named networkx")
        return real_import(name, globals, locals, fromlist, level)

    monkeypatch.setattr(builtins, "__import__", fake_import)
    buffer = io.StringIO()
    result = entry_module.check_dependencies(stream=buffer)
    output = buffer.getvalue()
    assert result is False
    assert "ERROR networkx" in output
    assert "Try installing with" in output


def test_check_dependencies_succeeds_with_stubbed_stack(entry_module, monkeypatch):
    """check_dependencies should pass when the numerical stack imports."""
    for name in ("numpy", "networkx", "tqdm", "hypothesis"):
        stub = types.ModuleType(name)
        stub.__version__ = "1.0"
        monkeypatch.setitem(sys.modules, name, stub)
    buffer = io.StringIO()
    result = entry_module.check_dependencies(stream=buffer)
    assert result is True
    assert "OK numpy" in buffer.getvalue()
    assert "WARNING" not in buffer.getvalue()


def test_main_reports_missing_dependencies(entry_module, monkeypatch):
    """The main function should exit early when dependencies are missing."""
    monkeypatch.setattr(entry_module, "check_dependencies", lambda: False)
    assert entry_module.main(["--check-deps"]) == 1


def test_main_runs_a_verb(entry_module, monkeypatch):
    """Without --check-deps the command line is handed to the CLI."""
    monkeypatch.setattr(sys, "argv", ["grecon", "--quiet", "enumerate", "--n", "3"])
    buffer = io.StringIO()
    with redirect_stdout(buffer):
        exit_code = entry_module.main()
    assert exit_code == 0
    assert '"burnside_count": 4' in buffer.getvalue()
