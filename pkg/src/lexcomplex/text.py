"""Shared text and formatting helpers."""

from __future__ import annotations

import re

# ASCII whitespace only; unicode spaces (e.g. \xa0) are kept inside tokens
# so that corpus invariants and feature extraction agree on token counts.
_ASCII_WS = re.compile(r"[ \t\r\n\f\v]+")


def tokenize(text: str) -> list[str]:
    """Split on runs of ASCII whitespace; punctuation stays attached."""
    return [tok for tok in _ASCII_WS.split(text) if tok]


def fmt_float(value: float) -> str:
    """Shortest decimal string that parses back to the exact same float."""
    return repr(float(value))
