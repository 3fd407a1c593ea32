"""Minimal reader for the core toolkit's tab-separated dataset format.

The wire format is the contract between the two packages: a header row of
``id<TAB>corpus<TAB>sentence<TAB>token`` with an optional trailing
``complexity`` column, UTF-8, LF newlines.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from pathlib import Path


class DataError(Exception):
    pass


_ASCII_WS = re.compile(r"[ \t\r\n\f\v]+")


def tokenize(text: str) -> list[str]:
    return [tok for tok in _ASCII_WS.split(text) if tok]


@dataclass(frozen=True)
class Row:
    id: str
    corpus: str
    sentence: str
    target: str
    gold: float | None = None


def read_rows(path) -> list[Row]:
    lines = Path(path).read_text(encoding="utf-8").split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    if not lines:
        raise DataError(f"{path}: empty file")
    header = lines[0].rstrip("\r").split("\t")
    if header[:4] != ["id", "corpus", "sentence", "token"]:
        raise DataError(f"{path}: unexpected header {lines[0]!r}")
    labeled = len(header) == 5 and header[4] == "complexity"
    if not labeled and len(header) != 4:
        raise DataError(f"{path}: unexpected header {lines[0]!r}")
    rows: list[Row] = []
    for lineno, line in enumerate(lines[1:], start=2):
        fields = line.rstrip("\r").split("\t")
        if len(fields) != len(header):
            raise DataError(
                f"{path}: line {lineno}: expected {len(header)} fields, "
                f"got {len(fields)}"
            )
        gold = None
        if labeled:
            try:
                gold = float(fields[4])
            except ValueError:
                raise DataError(
                    f"{path}: line {lineno}: bad complexity {fields[4]!r}"
                ) from None
        rows.append(
            Row(
                id=fields[0],
                corpus=fields[1],
                sentence=fields[2],
                target=fields[3],
                gold=gold,
            )
        )
    return rows


def locate_span(sentence: str, target: str) -> tuple[int, int] | None:
    """First case-insensitive token-sequence match, mirroring the core."""
    sent = [tok.lower() for tok in tokenize(sentence)]
    tgt = [tok.lower() for tok in tokenize(target)]
    if not tgt:
        return None
    for start in range(len(sent) - len(tgt) + 1):
        if sent[start : start + len(tgt)] == tgt:
            return start, start + len(tgt)
    return None
