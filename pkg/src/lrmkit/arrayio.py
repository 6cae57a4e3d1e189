"""Text arrays: UTF-8, whitespace-separated signed 64-bit decimal integers."""
from __future__ import annotations

import re
from typing import Iterable

from .errors import LRMKitError

_TOKEN = re.compile(r"\S+")
_INT = re.compile(r"[+-]?[0-9]+\Z")
_LO, _HI = -(1 << 63), (1 << 63) - 1


class InputError(LRMKitError, ValueError):
    """Malformed input text; carries 1-based line and column."""

    def __init__(self, message: str, line: int, column: int, source: str = "<input>"):
        super().__init__(f"{source}:{line}:{column}: {message}")
        self.line = line
        self.column = column


def parse_array(text: str, source: str = "<input>") -> list[int]:
    values = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        for m in _TOKEN.finditer(line):
            tok = m.group()
            if not _INT.match(tok):
                raise InputError(f"not an integer: {tok!r}", lineno, m.start() + 1, source)
            v = int(tok)
            if not _LO <= v <= _HI:
                raise InputError(f"integer out of 64-bit range: {tok}", lineno, m.start() + 1, source)
            values.append(v)
    return values


def read_array(path: str) -> list[int]:
    """Read an array file. OSError and UnicodeDecodeError propagate to the caller."""
    with open(path, encoding="utf-8") as fh:
        return parse_array(fh.read(), path)


def format_array(values: Iterable[int]) -> str:
    """One value per line, trailing newline (empty string for an empty array)."""
    return "".join(f"{int(v)}\n" for v in values)


def write_array(path: str, values: Iterable[int]) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(format_array(values))
