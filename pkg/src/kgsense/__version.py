"""Package version lookup.

Named __version.py because hatch-vcs writes the generated _version.py.
"""

from __future__ import annotations

from pathlib import Path

PACKAGE = "kgsense"


def _lookup_version() -> str:
    # Editable checkout: ask setuptools_scm directly, it is only importable in dev installs
    if (Path(__file__).parent / ".." / ".." / ".git").exists():
        try:
            from setuptools_scm import get_version

            return get_version(root="../..", relative_to=__file__)
        except (ImportError, LookupError):
            pass

    try:
        from ._version import version

        return version
    except ImportError:
        pass

    from importlib.metadata import PackageNotFoundError, version

    try:
        return version(PACKAGE)
    except PackageNotFoundError:
        return "0.0.0+unknown"


__version__ = _lookup_version()

__all__ = ("__version__",)
