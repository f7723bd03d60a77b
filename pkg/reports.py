"""Versioned JSON report documents and their atomic persistence."""

from __future__ import annotations

import json
from pathlib import Path
from typing import Any, Dict, Optional

from logger import LogCategory, get_logger

REPORT_SCHEMA_VERSION = 1


class ReportError(RuntimeError):
    """Raised when a report cannot be serialized or written safely."""


def build_report(
    experiment: str,
    parameters: Dict[str, Any],
    results: Any,
    timing: Optional[Dict[str, Any]] = None,
) -> Dict[str, Any]:
    """The report envelope shared by every command."""

    return {
        "schema_version": REPORT_SCHEMA_VERSION,
        "experiment": experiment,
        "parameters": parameters,
        "results": results,
        "timing": timing,
    }


def error_document(error: BaseException, detail: Optional[str] = None) -> Dict[str, Any]:
    return {"error": type(error).__name__, "detail": detail if detail is not None else str(error)}


def render_json(document: Dict[str, Any]) -> str:
    """Serialize with sorted keys so identical documents give identical bytes."""

    try:
        return json.dumps(document, indent=2, sort_keys=True, ensure_ascii=False) + "\n"
    except (TypeError, ValueError) as exc:
        raise ReportError(f"Report is not JSON serializable: {exc}") from exc


def write_report_atomic(target: Path, document: Dict[str, Any]) -> Path:
    """Write ``document`` to ``target`` using a temporary file for safety."""

    target = Path(target)
    text = render_json(document)
    tmp_path = target.with_suffix(target.suffix + ".tmp")
    try:
        target.parent.mkdir(parents=True, exist_ok=True)
        with tmp_path.open("w", encoding="utf-8") as handle:
            handle.write(text)
        tmp_path.replace(target)
    except OSError as exc:
        raise ReportError(f"Unable to write report '{target}': {exc}") from exc
    get_logger().debug(
        "Wrote report",
        category=LogCategory.DATA,
        path=str(target),
        experiment=document.get("experiment"),
    )
    return target


def read_report(source: Path) -> Dict[str, Any]:
    """Load a report written by :func:`write_report_atomic` and check its version."""

    source = Path(source)
    try:
        with source.open("r", encoding="utf-8") as handle:
            document: Any = json.load(handle)
    except json.JSONDecodeError as exc:
        raise ReportError(f"Report file '{source}' contains invalid JSON") from exc
    except OSError as exc:
        raise ReportError(f"Unable to read report file '{source}': {exc}") from exc
    if not isinstance(document, dict):
        raise ReportError(f"Report file '{source}' does not hold a JSON object")
    version = document.get("schema_version")
    if version != REPORT_SCHEMA_VERSION:
        raise ReportError(
            f"Report file '{source}' has schema version {version!r}, "
            f"expected {REPORT_SCHEMA_VERSION}"
        )
    return document


__all__ = [
    "REPORT_SCHEMA_VERSION",
    "ReportError",
    "build_report",
    "error_document",
    "read_report",
    "render_json",
    "write_report_atomic",
]
