"""Shared fixtures: keep log files out of the home directory during tests."""

from __future__ import annotations

import os

import pytest

from logger import LOG_DIR_ENV


@pytest.fixture(autouse=True, scope="session")
def isolated_log_dir(tmp_path_factory):
    previous = os.environ.get(LOG_DIR_ENV)
    os.environ[LOG_DIR_ENV] = str(tmp_path_factory.mktemp("logs"))
    yield
    if previous is None:
        os.environ.pop(LOG_DIR_ENV, None)
    else:
        os.environ[LOG_DIR_ENV] = previous
