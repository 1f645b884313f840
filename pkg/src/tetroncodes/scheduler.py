"""Measurement scheduling under the disjoint-tetron constraint.

Two generators may share a round only if they touch disjoint sets of
tetrons. Rounds are found by coloring generator conflict graphs.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Iterable, Sequence

import networkx as nx

from .fermion import FermionCode

_ORDERINGS = (
    "DSATUR",
    "largest_first",
    "smallest_last",
    "independent_set",
    "connected_sequential_bfs",
    "connected_sequential_dfs",
)

STRATEGIES = ("phased-greedy", "dsatur", "free", "sequential")


@dataclass(frozen=True)
class Schedule:
    rounds: tuple[tuple[int, ...], ...]
    phases: tuple[str, ...]

    @property
    def latency(self) -> int:
        return len(self.rounds)

    def phase_latency(self, phase: str) -> int:
        return sum(1 for p in self.phases if p == phase)


def conflict_graph(code: FermionCode, subset: Iterable[int] | Callable[[int], bool] | None = None) -> nx.Graph:
    """Vertices are generator indices; edges join generators sharing a tetron."""
    if subset is None:
        idx = list(range(len(code.generators)))
    elif callable(subset):
        idx = [i for i in range(len(code.generators)) if subset(i)]
    else:
        idx = sorted(set(subset))
    g = nx.Graph()
    g.add_nodes_from(idx)
    tets = {i: code.generators[i].tetrons for i in idx}
    for a in range(len(idx)):
        for b in range(a + 1, len(idx)):
            if tets[idx[a]] & tets[idx[b]]:
                g.add_edge(idx[a], idx[b])
    return g


def color_rounds(graph: nx.Graph, orderings: Sequence[str] = _ORDERINGS) -> list[tuple[int, ...]]:
    """Fewest-color result over several deterministic greedy orderings."""
    if graph.number_of_nodes() == 0:
        return []
    best = None
    for strat in orderings:
        coloring = nx.greedy_color(graph, strategy=strat)
        k = max(coloring.values()) + 1
        if best is None or k < best[0]:
            best = (k, coloring)
    k, coloring = best
    rounds = [[] for _ in range(k)]
    for v, c in coloring.items():
        rounds[c].append(v)
    return [tuple(sorted(r)) for r in rounds]


def _phases(code: FermionCode) -> list[tuple[str, list[int]]]:
    s0 = code.set0_indices()
    xs = [i for i in s0 if code.generators[i].kind == "X"]
    zs = [i for i in s0 if code.generators[i].kind == "Z"]
    rest = [i for i in s0 if i not in xs and i not in zs]
    out = []
    if xs:
        out.append(("set0-X", xs))
    if zs:
        out.append(("set0-Z", zs))
    if rest:
        out.append(("set0", rest))
    out.append(("sets-1..n", code.seti_indices()))
    return out


def schedule(code: FermionCode, strategy: str = "phased-greedy") -> Schedule:
    """Partition all generators into rounds.

    phased-greedy / dsatur color Set-0 X, Set-0 Z and Sets 1..n separately
    (greedy over several degree orderings, or DSATUR alone); free colors the
    whole conflict graph at once; sequential is one generator per round.
    """
    if strategy not in STRATEGIES:
        raise ValueError(f"unknown strategy {strategy!r}; choose from {STRATEGIES}")
    if strategy == "sequential":
        n = len(code.generators)
        return Schedule(tuple((i,) for i in range(n)), ("sequential",) * n)
    if strategy == "free":
        rounds = color_rounds(conflict_graph(code))
        return Schedule(tuple(rounds), ("free",) * len(rounds))
    orderings = _ORDERINGS if strategy == "phased-greedy" else ("DSATUR",)
    rounds, phases = [], []
    for name, idx in _phases(code):
        r = color_rounds(conflict_graph(code, idx), orderings)
        rounds += r
        phases += [name] * len(r)
    return Schedule(tuple(rounds), tuple(phases))


def verify_schedule(code: FermionCode, sched: Schedule) -> tuple[bool, str | None]:
    """(valid, first violation). Checks disjointness within rounds and that
    every generator appears exactly once."""
    seen: dict[int, int] = {}
    n = len(code.generators)
    for r, rnd in enumerate(sched.rounds):
        used: dict[int, int] = {}
        for gi in rnd:
            if not 0 <= gi < n:
                return False, f"round {r}: unknown generator index {gi}"
            if gi in seen:
                return False, f"generator {code.labels[gi]} appears in rounds {seen[gi]} and {r}"
            seen[gi] = r
            for q in sorted(code.generators[gi].tetrons):
                if q in used:
                    other = code.labels[used[q]]
                    return False, f"round {r}: {other} and {code.labels[gi]} share tetron {q}"
                used[q] = gi
    missing = [code.labels[i] for i in range(n) if i not in seen]
    if missing:
        return False, f"generators never measured: {', '.join(missing)}"
    return True, None


def latency_lower_bound(code: FermionCode) -> int:
    """Max over tetrons of the number of generators touching that tetron."""
    counts = [0] * (code.n_tetrons + 1)
    for g in code.generators:
        for q in g.tetrons:
            counts[q] += 1
    return max(counts)


def usage_table(code: FermionCode, sched: Schedule) -> str:
    """One row per round: phase, generator labels, then one column per
    tetron showing which generator (by position in the round) uses it."""
    n = code.n_tetrons
    head = "round phase      " + " ".join(f"{q:>3}" for q in range(1, n + 1))
    lines = [head]
    for r, (rnd, ph) in enumerate(zip(sched.rounds, sched.phases)):
        cell = ["  ."] * n
        for k, gi in enumerate(rnd):
            for q in code.generators[gi].tetrons:
                cell[q - 1] = f"{chr(ord('A') + k % 26):>3}"
        labels = ", ".join(f"{chr(ord('A') + k % 26)}={code.labels[gi]}" for k, gi in enumerate(rnd))
        lines.append(f"{r:>5} {ph:<10} " + " ".join(cell) + f"   {labels}")
    return "\n".join(lines)


def schedule_to_dict(code: FermionCode, sched: Schedule) -> dict:
    return {
        "latency": sched.latency,
        "lower_bound": latency_lower_bound(code),
        "rounds": [
            {"phase": ph, "generators": [code.labels[i] for i in rnd]}
            for rnd, ph in zip(sched.rounds, sched.phases)
        ],
    }


def schedule_from_dict(code: FermionCode, doc: dict) -> Schedule:
    rounds, phases = [], []
    for r in doc["rounds"]:
        rounds.append(tuple(code.generator_index(lbl) for lbl in r["generators"]))
        phases.append(r.get("phase", ""))
    return Schedule(tuple(rounds), tuple(phases))


def save_schedule(code: FermionCode, sched: Schedule, path: str | Path) -> None:
    Path(path).write_text(json.dumps(schedule_to_dict(code, sched), indent=1) + "\n")


def load_schedule(code: FermionCode, path: str | Path) -> Schedule:
    return schedule_from_dict(code, json.loads(Path(path).read_text()))
