"""GF(2) linear algebra on int bitsets."""

from __future__ import annotations

from typing import Iterable

import numpy as np


def rank(rows: Iterable[int]) -> int:
    return len(SpanBasis(rows))


class SpanBasis:
    """Incrementally maintained fully-reduced row basis.

    Each stored row has a distinct pivot (its lowest set bit) and no other
    stored row has that bit set, so membership is a single pass.
    """

    def __init__(self, rows: Iterable[int] = ()):
        self._rows: dict[int, int] = {}
        for r in rows:
            self.add(r)

    def __len__(self) -> int:
        return len(self._rows)

    def reduce(self, v: int) -> int:
        for piv, row in self._rows.items():
            if (v >> piv) & 1:
                v ^= row
        return v

    def add(self, v: int) -> bool:
        """Insert ``v``; returns False if it was already in the span."""
        v = self.reduce(v)
        if not v:
            return False
        piv = (v & -v).bit_length() - 1
        for p, row in list(self._rows.items()):
            if (row >> piv) & 1:
                self._rows[p] = row ^ v
        self._rows[piv] = v
        return True

    def __contains__(self, v: int) -> bool:
        return self.reduce(v) == 0

    def rows(self) -> list[int]:
        return [self._rows[p] for p in sorted(self._rows)]


def kernel_basis(rows: list[int], n_cols: int) -> list[int]:
    """Basis of {x : <r, x> = 0 for all rows r}, as bitsets over n_cols."""
    basis = SpanBasis(rows)
    red = basis.rows()
    pivots = [(r & -r).bit_length() - 1 for r in red]
    pivot_set = set(pivots)
    out = []
    for free in range(n_cols):
        if free in pivot_set:
            continue
        x = 1 << free
        for p, r in zip(pivots, red):
            if (r >> free) & 1:
                x |= 1 << p
        out.append(x)
    return out


def to_matrix(rows: list[int], n_cols: int) -> np.ndarray:
    m = np.zeros((len(rows), n_cols), dtype=np.uint8)
    for i, r in enumerate(rows):
        j = 0
        while r:
            if r & 1:
                m[i, j] = 1
            r >>= 1
            j += 1
    return m


def from_vector(vec) -> int:
    out = 0
    for j in np.flatnonzero(np.asarray(vec)):
        out |= 1 << int(j)
    return out
