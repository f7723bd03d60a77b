#!/usr/bin/env python3
"""
G-Recon laboratory entry point.
Checks that the numerical stack is importable, then hands the command line
over to :mod:`cli`.
"""
import sys
from pathlib import Path
from typing import List, Optional

REQUIRED_PACKAGES = {
    "numpy": ("numpy", "Vectorized group actions"),
    "networkx": ("networkx", "graph6 codec and biconnected components"),
}
OPTIONAL_PACKAGES = {
    "tqdm": ("tqdm", "Progress bars on standard error"),
    "hypothesis": ("hypothesis", "Property-based tests"),
}


def check_dependencies(stream=None) -> bool:
    """Report required and optional packages on ``stream`` (standard error by default)."""
    stream = stream or sys.stderr
    missing_required: List[str] = []
    missing_optional: List[str] = []
    for display_name, (import_name, description) in REQUIRED_PACKAGES.items():
        try:
            module = __import__(import_name)
        except ImportError as e:
            missing_required.append(display_name)
            print(f"ERROR {display_name}: {description} - MISSING ({e})", file=stream)
        else:
            version = getattr(module, "__version__", "unknown")
            print(f"OK {display_name}: {description} (version: {version})", file=stream)
    for display_name, (import_name, description) in OPTIONAL_PACKAGES.items():
        try:
            __import__(import_name)
            print(f"OK {display_name}: {description}", file=stream)
        except ImportError:
            missing_optional.append(display_name)
            print(f"WARNING {display_name}: {description} - OPTIONAL", file=stream)
    if missing_required:
        print("\nTry installing with:", file=stream)
        print(f"   {sys.executable} -m pip install " + " ".join(missing_required), file=stream)
        return False
    if missing_optional:
        unavailable = ", ".join(missing_optional)
        print(f"\nSome optional features are unavailable: {unavailable}", file=stream)
    return True


def setup_environment() -> None:
    """Put this directory on the import path so the flat modules resolve."""
    current_dir = Path(__file__).parent
    if str(current_dir) not in sys.path:
        sys.path.insert(0, str(current_dir))


def main(argv: Optional[List[str]] = None) -> int:
    """Entry point: dependency check, then the command-line front end."""
    argv = list(sys.argv[1:] if argv is None else argv)
    if argv[:1] == ["--check-deps"]:
        return 0 if check_dependencies() else 1
    setup_environment()
    try:
        import networkx  # noqa: F401
        import numpy  # noqa: F401
    except ImportError:
        check_dependencies()
        return 1
    from cli import run

    try:
        return run(argv)
    except KeyboardInterrupt:
        print("\nInterrupted by user", file=sys.stderr)
        return 130


if __name__ == "__main__":
    sys.exit(main())
