"""Validation helpers for laboratory settings (caps, threads, logging)."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, fields, replace
from pathlib import Path
from typing import Any, Dict, List, Mapping, Optional

MAX_THREADS = 64
MAX_SUBSET_CAP = 1 << 24
MAX_GROUP_ORDER_CAP = math.factorial(12)


@dataclass(frozen=True)
class ValidationIssue:
    """Represents a settings validation problem."""

    field: str
    title: str
    message: str


class ConfigurationError(ValueError):
    """Raised when a settings document fails validation."""

    def __init__(self, message: str, issues: Optional[List[ValidationIssue]] = None):
        super().__init__(message)
        self.issues = list(issues or [])


@dataclass(frozen=True)
class LabSettings:
    """Caps and runtime options shared by every command."""

    max_group_order: int = math.factorial(10)
    max_candidates: int = 10_000_000
    max_subsets: int = 1 << 20
    threads: int = 1
    quiet: bool = False
    log_dir: Optional[str] = None

    def merged(self, overrides: Mapping[str, Any]) -> "LabSettings":
        """Copy with every non-``None`` override applied (command-line flags win)."""

        known = {f.name for f in fields(self)}
        applied = {k: v for k, v in overrides.items() if k in known and v is not None}
        return replace(self, **applied)

    def to_json(self) -> Dict[str, Any]:
        return {f.name: getattr(self, f.name) for f in fields(self)}


def _coerce_int(value: Any) -> int | None:
    """Best-effort conversion to ``int`` returning ``None`` on failure."""

    if isinstance(value, bool):
        # ``bool`` is a subclass of ``int`` in Python, but we treat it as invalid
        return None
    if isinstance(value, int):
        return value
    try:
        return int(str(value).strip())
    except (TypeError, ValueError):
        return None


def _check_cap(
    settings: Mapping[str, Any], key: str, label: str, ceiling: Optional[int] = None
) -> List[ValidationIssue]:
    if key not in settings:
        return []
    value = _coerce_int(settings[key])
    if value is None or value < 1:
        return [
            ValidationIssue(
                field=key,
                title=f"{label} Invalid",
                message=f"{label} must be a positive integer.",
            )
        ]
    if ceiling is not None and value > ceiling:
        return [
            ValidationIssue(
                field=key,
                title=f"{label} Too Large",
                message=f"{label} may not exceed {ceiling}.",
            )
        ]
    return []


def validate_settings(settings: Mapping[str, Any]) -> List[ValidationIssue]:
    """Validate a settings payload.

    Parameters
    ----------
    settings:
        Mapping of setting names to values, from a JSON file or the command line.

    Returns
    -------
    list[ValidationIssue]
        A collection of validation issues. An empty list denotes success.
    """

    issues: List[ValidationIssue] = []
    known = {f.name for f in fields(LabSettings)}
    for key in sorted(set(settings) - known):
        issues.append(
            ValidationIssue(
                field=key,
                title="Unknown Setting",
                message=f"'{key}' is not a recognised setting; expected one of {sorted(known)}.",
            )
        )

    issues.extend(_check_cap(settings, "max_group_order", "Group Order Cap", MAX_GROUP_ORDER_CAP))
    issues.extend(_check_cap(settings, "max_candidates", "Candidate Cap"))
    subset_issues = _check_cap(settings, "max_subsets", "Subset Cap", MAX_SUBSET_CAP)
    issues.extend(subset_issues)
    if "max_subsets" in settings and not subset_issues:
        subsets = _coerce_int(settings["max_subsets"])
        if subsets & (subsets - 1):
            issues.append(
                ValidationIssue(
                    field="max_subsets",
                    title="Subset Cap Not a Power of Two",
                    message="The subset cap bounds 2^m sweeps, so it must be a power of two.",
                )
            )

    if "threads" in settings:
        threads = _coerce_int(settings["threads"])
        if threads is None or not 1 <= threads <= MAX_THREADS:
            issues.append(
                ValidationIssue(
                    field="threads",
                    title="Thread Count Out of Range",
                    message=f"Use between 1 and {MAX_THREADS} worker threads.",
                )
            )

    if "quiet" in settings and not isinstance(settings["quiet"], bool):
        issues.append(
            ValidationIssue(
                field="quiet",
                title="Quiet Flag Invalid",
                message="'quiet' must be true or false.",
            )
        )

    log_dir = settings.get("log_dir")
    if log_dir is not None and (not isinstance(log_dir, str) or not log_dir.strip()):
        issues.append(
            ValidationIssue(
                field="log_dir",
                title="Log Directory Invalid",
                message="'log_dir' must be a non-empty path string or null.",
            )
        )

    return issues


def settings_from_mapping(settings: Mapping[str, Any]) -> LabSettings:
    issues = validate_settings(settings)
    if issues:
        summary = "; ".join(f"{issue.field}: {issue.title}" for issue in issues)
        raise ConfigurationError(f"Invalid settings ({summary})", issues)
    values: Dict[str, Any] = {}
    for key, value in settings.items():
        values[key] = value if key in ("quiet", "log_dir") else _coerce_int(value)
    return LabSettings().merged(values)


def load_settings(path: Path) -> LabSettings:
    """Read and validate a JSON settings document."""

    path = Path(path)
    try:
        with path.open("r", encoding="utf-8") as handle:
            raw: Any = json.load(handle)
    except json.JSONDecodeError as exc:
        raise ConfigurationError(f"Settings file '{path}' contains invalid JSON") from exc
    except OSError as exc:
        raise ConfigurationError(f"Unable to read settings file '{path}': {exc}") from exc
    if not isinstance(raw, dict):
        raise ConfigurationError(f"Settings file '{path}' must hold a JSON object")
    return settings_from_mapping(raw)


__all__ = [
    "ConfigurationError",
    "LabSettings",
    "ValidationIssue",
    "load_settings",
    "settings_from_mapping",
    "validate_settings",
]
