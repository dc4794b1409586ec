"""Word utilities used by window programs."""

from __future__ import annotations

from typing import Iterable

from mlidl.wordmem import word


def util_or(words: Iterable[int]) -> int:
    """Bitwise-or fold; empty folds to 0."""
    out = 0
    for w in words:
        out |= word(w)
    return out


def lo_word(w: int) -> int:
    return word(w) & 0xFFFF


def hi_word(w: int) -> int:
    return (word(w) >> 16) & 0xFFFF
