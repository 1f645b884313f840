"""Majorana fermion codes built from bosonic codes (B->F recipe).

Set 0 is the base code mapped through R. For every tetron ``i`` one extra
generator is added: a base generator covering ``i`` with qubit ``i``'s term
switched to R'. Its product with the Set-0 copy is the tetron operator of
``i``, which puts every tetron in the stabilizer group.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from functools import cached_property
from math import comb
from pathlib import Path
from typing import Mapping

import numpy as np

from .codes import BosonicCode, PauliString
from .gf2 import SpanBasis
from .majorana import (
    LOCATIONS,
    MajoranaOp,
    PauliTerm,
    TetronLayout,
    commutes,
    pauli_string_to_majorana,
    tetron_op,
)


class EnumerationBudgetExceeded(RuntimeError):
    pass


@dataclass(frozen=True)
class Generator:
    label: str
    terms: tuple[PauliTerm, ...]
    op: MajoranaOp
    set_index: int
    base_index: int

    @property
    def kind(self) -> str:
        kinds = {t.pauli for t in self.terms}
        return kinds.pop() if len(kinds) == 1 else "mixed"

    @property
    def tetrons(self) -> frozenset[int]:
        return frozenset(t.qubit for t in self.terms)


@dataclass(frozen=True)
class Logical:
    name: str
    terms: tuple[PauliTerm, ...]
    op: MajoranaOp


@dataclass(frozen=True)
class FermionCode:
    layout: TetronLayout
    generators: tuple[Generator, ...]
    logicals: tuple[Logical, ...]
    k: int
    d_f: int
    family: str
    d_b: int
    pick_map: Mapping[int, int] = field(default_factory=dict)
    base: BosonicCode | None = field(default=None, compare=False, repr=False)

    @property
    def n_tetrons(self) -> int:
        return self.layout.n_tetrons

    @property
    def n_maj(self) -> int:
        return self.layout.n_maj

    @property
    def params(self) -> tuple[int, int, int]:
        return 2 * self.n_tetrons, self.k, self.d_f

    def param_string(self) -> str:
        n2, k, d = self.params
        return f"⟦{n2},{k},{d}_f⟧"

    def generator_index(self, label: str) -> int:
        return self.labels.index(label)

    @cached_property
    def labels(self) -> list[str]:
        return [g.label for g in self.generators]

    @cached_property
    def stabilizer_basis(self) -> SpanBasis:
        return SpanBasis(g.op.support for g in self.generators)

    @cached_property
    def check_bits(self) -> np.ndarray:
        """Generators x MZMs incidence matrix (uint8)."""
        m = np.zeros((len(self.generators), self.n_maj), dtype=np.uint8)
        for i, g in enumerate(self.generators):
            m[i, list(g.op.bits)] = 1
        return m

    @cached_property
    def logical_bits(self) -> np.ndarray:
        m = np.zeros((len(self.logicals), self.n_maj), dtype=np.uint8)
        for i, lg in enumerate(self.logicals):
            m[i, list(lg.op.bits)] = 1
        return m

    def set0_indices(self) -> list[int]:
        return [i for i, g in enumerate(self.generators) if g.set_index == 0]

    def seti_indices(self) -> list[int]:
        return [i for i, g in enumerate(self.generators) if g.set_index > 0]

    def syndrome(self, error: MajoranaOp, rows: list[int] | None = None) -> np.ndarray:
        gens = self.generators if rows is None else [self.generators[i] for i in rows]
        return np.array([0 if commutes(error, g.op) else 1 for g in gens], dtype=np.uint8)

    def in_stabilizer_group(self, op: MajoranaOp) -> bool:
        return op.support in self.stabilizer_basis

    def mzm_syndrome_columns(self) -> list[int]:
        """Syndrome (as an int over generators) of each single MZM.

        Valid for XOR-composition only on even-weight errors, or on any
        error since every generator has even weight.
        """
        cols = []
        for j in range(self.n_maj):
            s = 0
            for i, g in enumerate(self.generators):
                if (g.op.support >> j) & 1:
                    s |= 1 << i
            cols.append(s)
        return cols

    def validate(self) -> list[str]:
        """Structural checks; returns a list of problems (empty when valid)."""
        problems = []
        gens = self.generators
        for g in gens:
            if g.op.weight % 2:
                problems.append(f"{g.label}: odd weight")
            if pauli_string_to_majorana(g.terms, self.layout) != g.op:
                problems.append(f"{g.label}: support disagrees with pauli terms")
        for i in range(len(gens)):
            for j in range(i + 1, len(gens)):
                if not commutes(gens[i].op, gens[j].op):
                    problems.append(f"{gens[i].label} anticommutes with {gens[j].label}")
        r = len(self.stabilizer_basis)
        if r != 2 * self.n_tetrons - self.k:
            problems.append(f"rank {r} != 2n-k = {2 * self.n_tetrons - self.k}")
        for q in range(1, self.n_tetrons + 1):
            if not self.in_stabilizer_group(tetron_op(q, self.layout)):
                problems.append(f"tetron {q} not in stabilizer group")
        for lg in self.logicals:
            for g in gens:
                if not commutes(lg.op, g.op):
                    problems.append(f"logical {lg.name} anticommutes with {g.label}")
                    break
        return problems


def f2_rank(ops) -> int:
    return len(SpanBasis(op.support for op in ops))


def _switched(terms: PauliString, qubit: int) -> tuple[PauliTerm, ...]:
    return tuple(t.with_rep("R'") if t.qubit == qubit else t for t in terms)


def default_pick(base: BosonicCode) -> dict[int, int]:
    """Lowest-index covering generator per qubit, alternating X/Z preference."""
    pick = {}
    for q in range(1, base.n + 1):
        covering = [i for i in range(len(base.generators)) if q in base.support(i)]
        if not covering:
            raise ValueError(f"qubit {q} is not covered by any generator")
        want = "X" if q % 2 else "Z"
        typed = [i for i in covering if base.generator_type(i) == want]
        pick[q] = (typed or covering)[0]
    return pick


def b_to_f(base: BosonicCode, pick: Mapping[int, int] | None = None) -> FermionCode:
    if pick is None:
        pick = default_pick(base)
    layout = TetronLayout(base.n)
    labels = base.generator_labels or tuple(f"G{i}" for i in range(len(base.generators)))
    gens = []
    for i, g in enumerate(base.generators):
        gens.append(Generator(f"S0:{labels[i]}", g, pauli_string_to_majorana(g, layout), 0, i))
    for q in range(1, base.n + 1):
        if q not in pick:
            raise ValueError(f"pick map has no entry for qubit {q}")
        gi = pick[q]
        if q not in base.support(gi):
            raise ValueError(f"pick({q}) = generator {gi} does not act on qubit {q}")
        terms = _switched(base.generators[gi], q)
        gens.append(Generator(f"S{q}:{labels[gi]}", terms, pauli_string_to_majorana(terms, layout), q, gi))
    logicals = tuple(
        Logical(name, ps, pauli_string_to_majorana(ps, layout)) for name, ps in base.logicals.items()
    )
    code = FermionCode(
        layout=layout,
        generators=tuple(gens),
        logicals=logicals,
        k=base.k,
        d_f=2 * base.d_b,
        family=base.family,
        d_b=base.d_b,
        pick_map=dict(pick),
        base=base,
    )
    r = len(code.stabilizer_basis)
    if r != 2 * base.n - base.k:
        raise ValueError(f"B->F construction gave rank {r}, expected {2 * base.n - base.k}")
    return code


def enumeration_count(n_maj: int, w_max: int) -> int:
    return sum(comb(n_maj, w) for w in range(2, w_max + 1, 2))


def min_logical_weight(code: FermionCode, w_max: int, budget: int = 20_000_000) -> int | None:
    """Minimum even weight of a nontrivial logical, by exhausting all MZM
    subsets up to ``w_max``. Returns None if none exists up to that weight."""
    n = code.n_maj
    if enumeration_count(n, w_max) > budget:
        raise EnumerationBudgetExceeded(
            f"{enumeration_count(n, w_max)} supports over budget {budget}"
        )
    cols = code.mzm_syndrome_columns()
    stab = code.stabilizer_basis
    for w in range(2, w_max + 1, 2):
        hit = _search_weight(cols, n, w, stab)
        if hit is not None:
            return w
    return None


def _search_weight(cols: list[int], n: int, w: int, stab: SpanBasis) -> int | None:
    # depth-first over increasing MZM indices, carrying running syndrome/support
    stack = [(0, 0, 0, 0)]  # (next index, depth, syndrome, support)
    while stack:
        start, depth, syn, sup = stack.pop()
        if depth == w:
            if syn == 0 and sup not in stab:
                return sup
            continue
        remaining = w - depth
        for j in range(n - remaining, start - 1, -1):
            stack.append((j + 1, depth + 1, syn ^ cols[j], sup | (1 << j)))
    return None


def bosonic_fermionic_alias(layout: TetronLayout, q: int, loc: str) -> MajoranaOp:
    """Bosonic operator whose Set-0 syndrome matches a single gamma_loc on tetron q."""
    if loc not in LOCATIONS:
        raise ValueError(f"unknown MZM location {loc!r}")
    if loc == "d":
        return MajoranaOp.identity(layout.n_maj)
    return MajoranaOp(
        (1 << layout.mzm_index(q, loc)) | (1 << layout.mzm_index(q, "d")), layout.n_maj
    )


# --- serialization ---------------------------------------------------------

def _terms_to_json(terms):
    return [[t.qubit, t.pauli, t.rep] for t in terms]


def _terms_from_json(items):
    return tuple(PauliTerm(int(q), p, r) for q, p, r in items)


def code_to_dict(code: FermionCode) -> dict:
    return {
        "family": code.family,
        "d_b": code.d_b,
        "n_tetrons": code.n_tetrons,
        "k": code.k,
        "d_f": code.d_f,
        "pick_map": {str(q): g for q, g in sorted(code.pick_map.items())},
        "generators": [
            {
                "label": g.label,
                "set": g.set_index,
                "base_index": g.base_index,
                "pauli_terms": _terms_to_json(g.terms),
                "support_bits": list(g.op.bits),
            }
            for g in code.generators
        ],
        "logicals": [
            {"label": lg.name, "pauli_terms": _terms_to_json(lg.terms), "support_bits": list(lg.op.bits)}
            for lg in code.logicals
        ],
    }


def code_from_dict(doc: dict, strict: bool = True) -> FermionCode:
    """Rebuild a code; raises ValueError if pauli terms and raw supports disagree.

    With ``strict=False`` the Pauli terms win and supports are recomputed,
    so a corrupted file can still be loaded and verified.
    """
    layout = TetronLayout(int(doc["n_tetrons"]))
    gens = []
    for g in doc["generators"]:
        terms = _terms_from_json(g["pauli_terms"])
        op = pauli_string_to_majorana(terms, layout)
        if strict and MajoranaOp.from_bits(g["support_bits"], layout.n_maj) != op:
            raise ValueError(f"generator {g['label']}: support_bits disagree with pauli_terms")
        gens.append(Generator(g["label"], terms, op, int(g["set"]), int(g.get("base_index", -1))))
    logicals = []
    for lg in doc["logicals"]:
        terms = _terms_from_json(lg["pauli_terms"])
        op = pauli_string_to_majorana(terms, layout)
        if strict and MajoranaOp.from_bits(lg["support_bits"], layout.n_maj) != op:
            raise ValueError(f"logical {lg['label']}: support_bits disagree with pauli_terms")
        logicals.append(Logical(lg["label"], terms, op))
    return FermionCode(
        layout=layout,
        generators=tuple(gens),
        logicals=tuple(logicals),
        k=int(doc["k"]),
        d_f=int(doc["d_f"]),
        family=doc["family"],
        d_b=int(doc["d_b"]),
        pick_map={int(q): int(g) for q, g in doc.get("pick_map", {}).items()},
    )


def save_code(code: FermionCode, path: str | Path) -> None:
    Path(path).write_text(json.dumps(code_to_dict(code), indent=1) + "\n")


def load_code(path: str | Path, strict: bool = True) -> FermionCode:
    return code_from_dict(json.loads(Path(path).read_text()), strict)


@dataclass
class VerifyReport:
    checks: dict[str, bool]
    problems: list[str]
    distance: int | None = None
    distance_note: str = ""

    @property
    def passed(self) -> bool:
        return all(self.checks.values())

    def lines(self) -> list[str]:
        out = [f"{name:<20} {'ok' if good else 'FAIL'}" for name, good in self.checks.items()]
        out += [f"  {p}" for p in self.problems]
        if self.distance is not None:
            out.append(f"distance={self.distance}")
        if self.distance_note:
            out.append(self.distance_note)
        out.append("PASS" if self.passed else "FAIL")
        return out


def verify_code(code: FermionCode, w_max: int = 0, budget: int = 20_000_000) -> VerifyReport:
    """Rank, commutation, tetron membership, single-MZM syndromes and Set-i
    pairing; distance by exhaustion up to ``w_max`` when it fits the budget."""
    problems = code.validate()
    checks = {
        "weights": not any("odd weight" in p or "disagrees" in p for p in problems),
        "commutation": not any("anticommutes" in p for p in problems),
        "rank": not any(p.startswith("rank") for p in problems),
        "tetron-membership": not any(p.startswith("tetron") for p in problems),
    }
    silent = [j for j, col in enumerate(code.mzm_syndrome_columns()) if col == 0]
    checks["single-mzm-syndrome"] = not silent
    problems += [f"MZM {code.layout.locate(j)} has zero syndrome" for j in silent]
    set0 = {g.base_index: g for g in code.generators if g.set_index == 0}
    pair_ok = True
    for g in code.generators:
        if g.set_index == 0:
            continue
        partner = set0.get(g.base_index)
        if partner is None or g.op * partner.op != tetron_op(g.set_index, code.layout):
            pair_ok = False
            problems.append(f"{g.label} times its Set-0 copy is not tetron {g.set_index}")
    checks["set-pairing"] = pair_ok
    report = VerifyReport(checks, problems)
    if w_max <= 0:
        report.distance_note = "distance unchecked (w_max=0)"
        return report
    try:
        w = min_logical_weight(code, w_max, budget)
    except EnumerationBudgetExceeded as exc:
        report.distance_note = f"distance unchecked: {exc}"
        return report
    if w is None:
        report.distance_note = f"no logical of weight <= {w_max}"
        checks["distance"] = w_max < code.d_f
    else:
        report.distance = w
        checks["distance"] = w == code.d_f
        if w != code.d_f:
            problems.append(f"found logical of weight {w}, claimed d_f={code.d_f}")
    return report
