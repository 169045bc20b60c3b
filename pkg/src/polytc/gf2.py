"""Row echelon bookkeeping over GF(2) with Python ints as bit rows."""

from __future__ import annotations

from typing import Dict, Iterable


class Echelon:
    """Incrementally echelonized span of bit rows.

    Each stored row is keyed by its highest set bit, so reduction runs over
    pivots in descending order and leaves a canonical remainder.
    """

    __slots__ = ("pivots",)

    def __init__(self, rows: Iterable[int] = ()):
        self.pivots: Dict[int, int] = {}
        for row in rows:
            self.add(row)

    @property
    def rank(self) -> int:
        return len(self.pivots)

    def add(self, row: int) -> bool:
        """Insert ``row``; return False if it was already in the span."""
        pivots = self.pivots
        while row:
            top = row.bit_length() - 1
            p = pivots.get(top)
            if p is None:
                pivots[top] = row
                return True
            row ^= p
        return False

    def reduce(self, row: int) -> int:
        pivots = self.pivots
        out = 0
        while row:
            top = row.bit_length() - 1
            p = pivots.get(top)
            if p is None:
                out |= 1 << top
                row ^= 1 << top
            else:
                row ^= p
        return out

    def contains(self, row: int) -> bool:
        return self.reduce(row) == 0


def bits(row: int):
    """Indices of set bits, ascending."""
    while row:
        low = row & -row
        yield low.bit_length() - 1
        row ^= low
