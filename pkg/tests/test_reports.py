"""Tests for report envelopes and their atomic persistence."""

from __future__ import annotations

import json

import pytest

from reports import (
    REPORT_SCHEMA_VERSION,
    ReportError,
    build_report,
    error_document,
    read_report,
    render_json,
    write_report_atomic,
)


def test_report_envelope_fields():
    document = build_report("deck", {"group": "S"}, [1, 2])
    assert document == {
        "schema_version": REPORT_SCHEMA_VERSION,
        "experiment": "deck",
        "parameters": {"group": "S"},
        "results": [1, 2],
        "timing": None,
    }


def test_render_is_deterministic():
    first = render_json({"b": 1, "a": {"d": 2, "c": 3}})
    second = render_json({"a": {"c": 3, "d": 2}, "b": 1})
    assert first == second
    assert first.endswith("\n")
    with pytest.raises(ReportError):
        render_json({"bad": object()})


def test_error_document_names_the_exception():
    document = error_document(KeyError("x"), detail="missing key")
    assert document == {"error": "KeyError", "detail": "missing key"}
    assert error_document(ValueError("oops"))["detail"] == "oops"


def test_atomic_write_and_read_back(tmp_path):
    target = tmp_path / "nested" / "report.json"
    document = build_report("pairs", {"n": 4}, [], timing={"seconds": 0.5, "threads": 1})
    write_report_atomic(target, document)
    assert not target.with_suffix(".json.tmp").exists()
    assert read_report(target) == document
    assert json.loads(target.read_text(encoding="utf-8"))["experiment"] == "pairs"


def test_read_report_checks_version(tmp_path):
    target = tmp_path / "old.json"
    target.write_text(json.dumps({"schema_version": 0}), encoding="utf-8")
    with pytest.raises(ReportError):
        read_report(target)
    target.write_text("[]", encoding="utf-8")
    with pytest.raises(ReportError):
        read_report(target)
