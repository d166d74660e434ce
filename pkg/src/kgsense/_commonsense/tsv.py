"""Line-oriented readers shared by the knowledge-base files."""

from __future__ import annotations

from pathlib import Path


class KnowledgeBaseError(ValueError):
    """A HasA, fact or corpus file is missing or has a malformed line."""


def read_text(path: str | Path) -> str:
    path = Path(path)
    if not path.is_file():
        msg = f"Knowledge file not found: {path}"
        raise KnowledgeBaseError(msg)
    return path.read_text(encoding="utf-8")


def iter_rows(text: str, columns: int, source: str):
    """Yield ``(line number, fields)`` for every non-comment line with ``columns`` TAB fields."""
    for lineno, raw_line in enumerate(text.splitlines(), start=1):
        line = raw_line.strip()
        if not line or line.startswith("#"):
            continue
        fields = [field.strip() for field in line.split("\t")]
        if len(fields) != columns or not all(fields):
            msg = f"{source}:{lineno}: expected {columns} TAB-separated fields, got {raw_line!r}"
            raise KnowledgeBaseError(msg)
        yield lineno, fields
