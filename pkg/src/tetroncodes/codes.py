"""Qubit-level (bosonic) stabilizer codes used as inputs to the B->F recipe.

Pauli strings are tuples of :class:`PauliTerm` in representation R, qubits
numbered from 1.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Sequence

from .gf2 import SpanBasis, kernel_basis
from .majorana import PauliTerm

PauliString = tuple[PauliTerm, ...]


def pauli_string(terms: dict[int, str] | Sequence[tuple[int, str]]) -> PauliString:
    items = terms.items() if isinstance(terms, dict) else terms
    return tuple(sorted(PauliTerm(int(q), p) for q, p in items))


def symplectic(ps: PauliString) -> tuple[int, int]:
    """(x-bits, z-bits) over qubits, bit ``q-1`` for qubit ``q``."""
    x = z = 0
    for t in ps:
        b = 1 << (t.qubit - 1)
        if t.pauli in ("X", "Y"):
            x |= b
        if t.pauli in ("Z", "Y"):
            z |= b
    return x, z


def from_symplectic(x: int, z: int, n: int) -> PauliString:
    out = []
    for q in range(n):
        xb, zb = (x >> q) & 1, (z >> q) & 1
        if xb or zb:
            out.append(PauliTerm(q + 1, "Y" if xb and zb else ("X" if xb else "Z")))
    return tuple(out)


def paulis_commute(a: PauliString, b: PauliString) -> bool:
    ax, az = symplectic(a)
    bx, bz = symplectic(b)
    return ((ax & bz) ^ (az & bx)).bit_count() % 2 == 0


def pauli_product(a: PauliString, b: PauliString, n: int) -> PauliString:
    ax, az = symplectic(a)
    bx, bz = symplectic(b)
    return from_symplectic(ax ^ bx, az ^ bz, n)


@dataclass(frozen=True)
class BosonicCode:
    family: str
    distance: int
    n: int
    generators: tuple[PauliString, ...]
    logicals: dict[str, PauliString]
    d_b: int
    generator_labels: tuple[str, ...] = field(default=())

    @property
    def k(self) -> int:
        return self.n - self.n_independent

    @property
    def n_independent(self) -> int:
        return len(SpanBasis(_packed(g, self.n) for g in self.generators))

    @property
    def t_b(self) -> int:
        return (self.d_b - 1) // 2

    def generator_type(self, index: int) -> str:
        kinds = {t.pauli for t in self.generators[index]}
        return kinds.pop() if len(kinds) == 1 else "mixed"

    def support(self, index: int) -> frozenset[int]:
        return frozenset(t.qubit for t in self.generators[index])

    def validate(self) -> None:
        for a, b in itertools.combinations(self.generators, 2):
            if not paulis_commute(a, b):
                raise ValueError(f"{self.family}: generators do not commute")
        for name, op in self.logicals.items():
            for g in self.generators:
                if not paulis_commute(op, g):
                    raise ValueError(f"logical {name} anticommutes with a generator")


def _packed(ps: PauliString, n: int) -> int:
    x, z = symplectic(ps)
    return x | (z << n)


def in_stabilizer_span(code: BosonicCode, ps: PauliString) -> bool:
    return _packed(ps, code.n) in SpanBasis(_packed(g, code.n) for g in code.generators)


def brute_force_distance(code: BosonicCode, w_max: int) -> int | None:
    """Smallest weight of a Pauli commuting with all generators but outside
    the stabilizer group; None if nothing up to ``w_max``."""
    n = code.n
    stab = SpanBasis(_packed(g, n) for g in code.generators)
    gens = [symplectic(g) for g in code.generators]
    for w in range(1, w_max + 1):
        for qubits in itertools.combinations(range(n), w):
            for kinds in itertools.product((1, 2, 3), repeat=w):
                x = z = 0
                for q, kd in zip(qubits, kinds):
                    if kd & 1:
                        x |= 1 << q
                    if kd & 2:
                        z |= 1 << q
                if any(((x & gz) ^ (z & gx)).bit_count() & 1 for gx, gz in gens):
                    continue
                if (x | (z << n)) not in stab:
                    return w
    return None


def css_distance(code: BosonicCode, w_max: int) -> int | None:
    """Brute-force distance for CSS codes by searching X- and Z-type
    logicals separately over binary vectors of weight <= w_max."""
    n = code.n
    best = None
    for kind, other in (("X", "Z"), ("Z", "X")):
        checks = [_mask(g, n) for i, g in enumerate(code.generators) if code.generator_type(i) == other]
        same = SpanBasis(_mask(g, n) for i, g in enumerate(code.generators) if code.generator_type(i) == kind)
        found = None
        for w in range(1, w_max + 1):
            for qubits in itertools.combinations(range(n), w):
                v = 0
                for q in qubits:
                    v |= 1 << q
                if any((v & c).bit_count() & 1 for c in checks):
                    continue
                if v not in same:
                    found = w
                    break
            if found:
                break
        if found and (best is None or found < best):
            best = found
    return best


def _mask(ps: PauliString, n: int) -> int:
    m = 0
    for t in ps:
        m |= 1 << (t.qubit - 1)
    return m


def _css_from_supports(family, distance, n, x_supports, z_supports, logicals, d_b):
    gens, labels = [], []
    for i, s in enumerate(x_supports):
        gens.append(pauli_string([(q, "X") for q in sorted(s)]))
        labels.append(f"X{i}")
    for i, s in enumerate(z_supports):
        gens.append(pauli_string([(q, "Z") for q in sorted(s)]))
        labels.append(f"Z{i}")
    code = BosonicCode(family, distance, n, tuple(gens), logicals, d_b, tuple(labels))
    code.validate()
    return code


def steane_code() -> BosonicCode:
    """[[7,1,3]] with plaquettes {1,2,5,6}, {2,3,5,7}, {1,4,5,7}.

    This incidence keeps X1X3X5, Y1Y2Y7 and Z5Z6Z7 as valid logicals.
    """
    plaquettes = [(1, 2, 5, 6), (2, 3, 5, 7), (1, 4, 5, 7)]
    logicals = {
        "X": pauli_string({1: "X", 3: "X", 5: "X"}),
        "Y": pauli_string({1: "Y", 2: "Y", 7: "Y"}),
        "Z": pauli_string({5: "Z", 6: "Z", 7: "Z"}),
    }
    return _css_from_supports("color", 3, 7, plaquettes, plaquettes, logicals, 3)


def triangular_color_lattice(d: int) -> tuple[int, list[tuple[int, ...]], list[int]]:
    """6.6.6 triangular patch: (n_qubits, plaquette supports, plaquette colors).

    Sites (x, y) of a triangular lattice with 0 <= y <= L, y <= x <= 2L - y
    (step 2), L = 3(d-1)/2; a third of them are plaquette centres.
    """
    if d < 3 or d % 2 == 0:
        raise ValueError(f"color code distance must be odd and >= 3, got {d}")
    L = 3 * (d - 1) // 2
    centre_pos = {0: 2, 1: 0, 2: 1}
    qubits: dict[tuple[int, int], int] = {}
    centres = []
    for y in range(L + 1):
        for x in range(y, 2 * L - y + 1, 2):
            if ((x - y) // 2) % 3 == centre_pos[y % 3]:
                centres.append((x, y))
            else:
                qubits[(x, y)] = len(qubits) + 1
    plaquettes, colors = [], []
    for x, y in centres:
        nbrs = [(x - 2, y), (x + 2, y), (x - 1, y - 1), (x + 1, y - 1), (x - 1, y + 1), (x + 1, y + 1)]
        plaquettes.append(tuple(sorted(qubits[p] for p in nbrs if p in qubits)))
        colors.append(y % 3)
    return len(qubits), plaquettes, colors


def color_code(d: int) -> BosonicCode:
    """Triangular 6.6.6 color code on (3d^2+1)/4 qubits; d=3 is the Steane code."""
    if d == 3:
        return steane_code()
    return _triangular_color_code(d)


def _triangular_color_code(d: int) -> BosonicCode:
    n, plaquettes, _ = triangular_color_lattice(d)
    # bottom edge of the triangle (y = 0) carries a weight-d logical
    L = 3 * (d - 1) // 2
    bottom, idx = [], 0
    for y in range(L + 1):
        for x in range(y, 2 * L - y + 1, 2):
            if ((x - y) // 2) % 3 == {0: 2, 1: 0, 2: 1}[y % 3]:
                continue
            idx += 1
            if y == 0:
                bottom.append(idx)
    logicals = {
        "X": pauli_string([(q, "X") for q in bottom]),
        "Y": pauli_string([(q, "Y") for q in bottom]),
        "Z": pauli_string([(q, "Z") for q in bottom]),
    }
    return _css_from_supports("color", d, n, plaquettes, plaquettes, logicals, d)


def rotated_surface_faces(d: int) -> tuple[list[tuple[int, ...]], list[tuple[int, ...]]]:
    """(X plaquettes, Z plaquettes) of the rotated surface code; qubit (r, c)
    is numbered r*d + c + 1."""
    if d < 3 or d % 2 == 0:
        raise ValueError(f"surface code distance must be odd and >= 3, got {d}")

    def q(r, c):
        return r * d + c + 1

    xs, zs = [], []
    for i in range(-1, d):
        for j in range(-1, d):
            cells = [(r, c) for r in (i, i + 1) for c in (j, j + 1) if 0 <= r < d and 0 <= c < d]
            is_x = (i + j) % 2 == 0
            if len(cells) == 4:
                (xs if is_x else zs).append(tuple(q(r, c) for r, c in cells))
            elif len(cells) == 2:
                horizontal = i in (-1, d - 1)
                if horizontal and is_x:
                    xs.append(tuple(q(r, c) for r, c in cells))
                elif not horizontal and not is_x:
                    zs.append(tuple(q(r, c) for r, c in cells))
    return xs, zs


def rotated_surface_code(d: int) -> BosonicCode:
    xs, zs = rotated_surface_faces(d)
    n = d * d
    # X boundaries are top/bottom, so a logical X runs down a column and a
    # logical Z along a row.
    col = [r * d + 1 for r in range(d)]
    row = list(range(1, d + 1))
    xl = pauli_string([(q, "X") for q in col])
    zl = pauli_string([(q, "Z") for q in row])
    logicals = {"X": xl, "Y": pauli_product(xl, zl, n), "Z": zl}
    return _css_from_supports("surface", d, n, xs, zs, logicals, d)


def find_css_logicals(code: BosonicCode) -> dict[str, PauliString]:
    """One X/Z logical pair for a k=1 CSS code by linear algebra."""
    n = code.n
    xm = [_mask(g, n) for i, g in enumerate(code.generators) if code.generator_type(i) == "X"]
    zm = [_mask(g, n) for i, g in enumerate(code.generators) if code.generator_type(i) == "Z"]
    xspan, zspan = SpanBasis(xm), SpanBasis(zm)
    xl = next(v for v in kernel_basis(zm, n) if v not in xspan)
    zl = next(v for v in kernel_basis(xm, n) if v not in zspan and (v & xl).bit_count() % 2)
    return {"X": from_symplectic(xl, 0, n), "Z": from_symplectic(0, zl, n)}


def build_bosonic(family: str, d: int) -> BosonicCode:
    if family == "color":
        return color_code(d)
    if family == "surface":
        return rotated_surface_code(d)
    if family == "steane":
        return steane_code()
    raise ValueError(f"unsupported code family {family!r}")
