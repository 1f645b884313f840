"""Building fermionic codes by family and distance, with a pick search.

The pick map decides which base generator gets the R' switch for each
tetron. It does not change the code's parameters but it bounds how many
rounds Sets 1..n need: two Set-i generators built on overlapping
plaquettes can never share a round.
"""

from __future__ import annotations

from dataclasses import dataclass

import networkx as nx

from .codes import BosonicCode, build_bosonic
from .fermion import FermionCode, b_to_f, default_pick
from .scheduler import schedule

# Set-i round counts the phased schedules are expected to reach
SET_I_TARGET = {"color": 7, "steane": 7, "surface": 4}


class PickSearchFailed(RuntimeError):
    pass


@dataclass(frozen=True)
class BuildConfig:
    family: str = "color"
    d: int = 3
    pick: str = "auto"  # "auto" or "default"
    budget: int = 64  # search restarts for the auto policy


def _supports(base: BosonicCode) -> list[frozenset[int]]:
    out = []
    for i in range(len(base.generators)):
        s = base.support(i)
        if s not in out:
            out.append(s)
    return out


def _maximal_disjoint_sets(supports: list[frozenset[int]]) -> list[tuple[int, ...]]:
    g = nx.Graph()
    g.add_nodes_from(range(len(supports)))
    for a in range(len(supports)):
        for b in range(a + 1, len(supports)):
            if not supports[a] & supports[b]:
                g.add_edge(a, b)  # compatible: may share a round
    return sorted(tuple(sorted(c)) for c in nx.find_cliques(g))


def _match(rounds: list[tuple[int, ...]], supports, n: int) -> dict[int, tuple[int, int]]:
    """Maximum matching tetron -> (round, support index)."""
    # integer node ids keep networkx's set iteration independent of hash seeds
    b = nx.Graph()
    b.add_nodes_from(range(1, n + 1))
    slots = []
    for r, sel in enumerate(rounds):
        for s in sel:
            node = n + 1 + len(slots)
            slots.append((r, s))
            for q in supports[s]:
                b.add_edge(q, node)
    m = nx.bipartite.hopcroft_karp_matching(b, top_nodes=range(1, n + 1))
    return {q: slots[m[q] - n - 1] for q in range(1, n + 1) if q in m}


def search_pick(base: BosonicCode, rounds: int, budget: int = 64) -> dict[int, int] | None:
    """Pick map whose Set-i generators fit in ``rounds`` rounds, or None.

    Rounds are chosen greedily among maximal sets of pairwise-disjoint
    plaquettes, each step keeping the set that most enlarges a maximum
    matching of tetrons to (round, plaquette) slots. Restarts rotate the
    first choice through the candidates.
    """
    supports = _supports(base)
    cands = _maximal_disjoint_sets(supports)
    n = base.n
    for start in range(min(budget, len(cands))):
        chosen = [cands[start]]
        while len(chosen) < rounds:
            best, best_size = None, -1
            for c in cands:
                size = len(_match(chosen + [c], supports, n))
                if size > best_size:
                    best, best_size = c, size
            chosen.append(best)
        match = _match(chosen, supports, n)
        if len(match) == n:
            return _pick_from_match(base, supports, match)
    return None


def _pick_from_match(base, supports, match) -> dict[int, int]:
    pick = {}
    for q, (r, s) in sorted(match.items()):
        gens = [i for i in range(len(base.generators)) if base.support(i) == supports[s]]
        # color-type bases have an X and a Z generator per plaquette; alternate
        want = "X" if r % 2 == 0 else "Z"
        typed = [i for i in gens if base.generator_type(i) == want]
        pick[q] = (typed or gens)[0]
    return pick


def build_fermion_code(family: str, d: int, pick: str | dict = "auto", budget: int = 64) -> FermionCode:
    """B->F code for (family, d).

    ``pick='default'`` keeps the lowest covering generator per tetron;
    ``'auto'`` starts from it and, if Sets 1..n need more rounds than the
    family target, searches alternative picks.
    """
    base = build_bosonic(family, d)
    if isinstance(pick, dict):
        return b_to_f(base, pick)
    if pick not in ("auto", "default"):
        raise ValueError(f"unknown pick policy {pick!r}")
    code = b_to_f(base, default_pick(base))
    target = SET_I_TARGET.get(family)
    if pick == "default" or target is None:
        return code
    if schedule(code).phase_latency("sets-1..n") <= target:
        return code
    found = search_pick(base, target, budget)
    if found is None:
        raise PickSearchFailed(f"no pick fits Sets 1..n in {target} rounds for {family} d={d}")
    code = b_to_f(base, found)
    if schedule(code).phase_latency("sets-1..n") > target:
        raise PickSearchFailed(f"coloring missed the {target}-round pick for {family} d={d}")
    return code
