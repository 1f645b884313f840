"""Phase-free Majorana operator algebra on a tetron layout.

Operators are stored as support bitsets (Python ints); bit ``j`` set means
``gamma_j`` appears in the product. Global phases are dropped throughout.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

LOCATIONS = ("a", "b", "c", "d")
_OFFSET = {loc: i for i, loc in enumerate(LOCATIONS)}

PAULIS = ("X", "Y", "Z")
REPS = ("R", "R'")

# Majorana pairs per representation, as location letters.
_PAIRS = {
    "R": {"X": ("b", "c"), "Y": ("a", "c"), "Z": ("a", "b")},
    "R'": {"X": ("a", "d"), "Y": ("d", "b"), "Z": ("c", "d")},
}


@dataclass(frozen=True)
class MajoranaOp:
    support: int
    n_maj: int

    def __post_init__(self):
        if self.n_maj <= 0 or self.n_maj % 2:
            raise ValueError(f"n_maj must be a positive even integer, got {self.n_maj}")
        if self.support < 0 or self.support >> self.n_maj:
            raise ValueError("support has bits outside range(n_maj)")

    @classmethod
    def identity(cls, n_maj: int) -> "MajoranaOp":
        return cls(0, n_maj)

    @classmethod
    def from_bits(cls, bits: Iterable[int], n_maj: int) -> "MajoranaOp":
        support = 0
        for j in bits:
            if not 0 <= j < n_maj:
                raise ValueError(f"MZM index {j} out of range for n_maj={n_maj}")
            support ^= 1 << j
        return cls(support, n_maj)

    @property
    def weight(self) -> int:
        return self.support.bit_count()

    @property
    def bits(self) -> tuple[int, ...]:
        s, out, j = self.support, [], 0
        while s:
            if s & 1:
                out.append(j)
            s >>= 1
            j += 1
        return tuple(out)

    def is_identity(self) -> bool:
        return self.support == 0

    def __mul__(self, other: "MajoranaOp") -> "MajoranaOp":
        return multiply(self, other)

    def __repr__(self) -> str:
        return f"MajoranaOp(bits={list(self.bits)}, n_maj={self.n_maj})"


def _check_same(a: MajoranaOp, b: MajoranaOp) -> None:
    if a.n_maj != b.n_maj:
        raise ValueError(f"mismatched n_maj: {a.n_maj} vs {b.n_maj}")


def multiply(a: MajoranaOp, b: MajoranaOp) -> MajoranaOp:
    """Group product at support level (symmetric difference)."""
    _check_same(a, b)
    return MajoranaOp(a.support ^ b.support, a.n_maj)


def commutes(a: MajoranaOp, b: MajoranaOp) -> bool:
    """True iff ``|A||B| + |A & B|`` is even."""
    _check_same(a, b)
    return (a.weight * b.weight + (a.support & b.support).bit_count()) % 2 == 0


@dataclass(frozen=True)
class TetronLayout:
    """Tetron ``q`` (1-based) location ``loc`` lives at MZM ``4(q-1) + offset``."""

    n_tetrons: int

    def __post_init__(self):
        if self.n_tetrons <= 0:
            raise ValueError("n_tetrons must be positive")

    @property
    def n_maj(self) -> int:
        return 4 * self.n_tetrons

    def mzm_index(self, tetron: int, loc: str) -> int:
        if not 1 <= tetron <= self.n_tetrons:
            raise ValueError(f"tetron {tetron} out of range 1..{self.n_tetrons}")
        if loc not in _OFFSET:
            raise ValueError(f"unknown MZM location {loc!r}")
        return 4 * (tetron - 1) + _OFFSET[loc]

    def locate(self, index: int) -> tuple[int, str]:
        """Inverse of :meth:`mzm_index`."""
        if not 0 <= index < self.n_maj:
            raise ValueError(f"MZM index {index} out of range")
        return index // 4 + 1, LOCATIONS[index % 4]

    def gamma(self, tetron: int, loc: str) -> MajoranaOp:
        return MajoranaOp(1 << self.mzm_index(tetron, loc), self.n_maj)

    def tetron_mask(self, tetron: int) -> int:
        return 0b1111 << self.mzm_index(tetron, "a")


def mzm_index(tetron: int, loc: str, layout: TetronLayout | None = None) -> int:
    """MZM index of ``loc`` on 1-based ``tetron``.

    Without a layout only the lower bound on ``tetron`` is checked.
    """
    if layout is not None:
        return layout.mzm_index(tetron, loc)
    if tetron < 1:
        raise ValueError(f"tetron index must be >= 1, got {tetron}")
    if loc not in _OFFSET:
        raise ValueError(f"unknown MZM location {loc!r}")
    return 4 * (tetron - 1) + _OFFSET[loc]


def tetron_op(q: int, layout: TetronLayout) -> MajoranaOp:
    return MajoranaOp(layout.tetron_mask(q), layout.n_maj)


@dataclass(frozen=True, order=True)
class PauliTerm:
    qubit: int
    pauli: str
    rep: str = "R"

    def __post_init__(self):
        if self.pauli not in PAULIS:
            raise ValueError(f"pauli must be one of {PAULIS}, got {self.pauli!r}")
        if self.rep not in REPS:
            raise ValueError(f"rep must be one of {REPS}, got {self.rep!r}")

    def with_rep(self, rep: str) -> "PauliTerm":
        return PauliTerm(self.qubit, self.pauli, rep)


def pauli_pair(pauli: str, rep: str = "R") -> tuple[str, str]:
    """MZM locations used by ``pauli`` in representation ``rep``."""
    return _PAIRS[rep][pauli]


def pauli_to_majorana(term: PauliTerm, layout: TetronLayout) -> MajoranaOp:
    x, y = _PAIRS[term.rep][term.pauli]
    return MajoranaOp(
        (1 << layout.mzm_index(term.qubit, x)) | (1 << layout.mzm_index(term.qubit, y)),
        layout.n_maj,
    )


def pauli_string_to_majorana(terms: Sequence[PauliTerm], layout: TetronLayout) -> MajoranaOp:
    seen = set()
    support = 0
    for t in terms:
        if t.qubit in seen:
            raise ValueError(f"tetron {t.qubit} appears more than once")
        seen.add(t.qubit)
        support ^= pauli_to_majorana(t, layout).support
    return MajoranaOp(support, layout.n_maj)


def reduce_mod_tetrons(op: MajoranaOp) -> MajoranaOp:
    """Canonical representative modulo tetron operators.

    Per tetron, weight-4 parts vanish and weight-3 parts become their
    single-MZM complement.
    """
    s = op.support
    out = 0
    for q in range(op.n_maj // 4):
        part = (s >> (4 * q)) & 0b1111
        w = part.bit_count()
        if w == 4:
            part = 0
        elif w == 3:
            part ^= 0b1111
        out |= part << (4 * q)
    return MajoranaOp(out, op.n_maj)


def tetron_parities(op: MajoranaOp) -> list[int]:
    """Per-tetron weight parity (1 = fermionic on that tetron)."""
    return [((op.support >> (4 * q)) & 0b1111).bit_count() & 1 for q in range(op.n_maj // 4)]
