"""Phenomenological fault-tolerance runs over a measurement sequence.

Data mechanisms strike tetrons in the slot before each step; every outcome
flips with probability ``p_meas``. The decoder sees detector events (each
outcome XOR the previous outcome of the same operator, the first compared
with the code state's +1). Its correction is applied, a final perfect round
of the sequence's distinct operators is decoded at code capacity, and the
trial fails if what remains is outside the stabilizer group.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from .decoder import BpOsdDecoder, DecoderConfig, DecoderGraph, mechanism_graph
from .fermion import FermionCode
from .gf2 import SpanBasis
from .majorana import MajoranaOp, PauliTerm, pauli_string_to_majorana
from .noise import (
    MECHANISM_MASKS, MECHANISMS, NoiseModel, block_generator, channel_probs, labels_to_bits,
    physical_error_rate,
)
from .scheduler import schedule
from .sim import CapacityPoint, _blocks, make_point, run_blocks


class SequenceError(ValueError):
    pass


@dataclass(frozen=True)
class Measurement:
    label: str
    terms: tuple[PauliTerm, ...]
    op: MajoranaOp

    @property
    def tetrons(self) -> frozenset[int]:
        return frozenset(t.qubit for t in self.terms)


@dataclass(frozen=True)
class FtSequence:
    steps: tuple[tuple[Measurement, ...], ...]
    round_length: int  # steps sharing one round's (p, eta) data budget
    name: str = "custom"

    def __post_init__(self):
        if self.round_length <= 0:
            raise SequenceError("round_length must be positive")

    @property
    def n_steps(self) -> int:
        return len(self.steps)

    def instances(self) -> list[tuple[int, Measurement]]:
        return [(s, m) for s, step in enumerate(self.steps) for m in step]

    def distinct_ops(self) -> list[MajoranaOp]:
        seen, out = set(), []
        for _, m in self.instances():
            if m.op.support not in seen:
                seen.add(m.op.support)
                out.append(m.op)
        return out

    def repeated(self, times: int) -> "FtSequence":
        return FtSequence(self.steps * times, self.round_length, f"{self.name}x{times}")

    def digest(self) -> str:
        doc = json.dumps(sequence_to_dict(self), sort_keys=True).encode()
        return hashlib.sha256(doc).hexdigest()[:16]

    def problems(self, code: FermionCode) -> list[str]:
        """Validity issues other than rank."""
        out = []
        for s, step in enumerate(self.steps):
            used: dict[int, str] = {}
            for m in step:
                if m.op.n_maj != code.n_maj:
                    out.append(f"step {s}: {m.label} has the wrong MZM count")
                    continue
                if m.op.weight % 2:
                    out.append(f"step {s}: {m.label} has odd weight")
                for q in range(1, code.n_tetrons + 1):
                    if (m.op.support & code.layout.tetron_mask(q)).bit_count() > 2:
                        out.append(f"step {s}: {m.label} touches more than 2 MZMs of tetron {q}")
                if not code.in_stabilizer_group(m.op):
                    out.append(f"step {s}: {m.label} is not a stabilizer")
                for q in m.tetrons:
                    if q in used:
                        out.append(f"step {s}: {used[q]} and {m.label} share tetron {q}")
                    used[q] = m.label
        return out

    def rank(self) -> int:
        return len(SpanBasis(op.support for op in self.distinct_ops()))


def _measurement(code: FermionCode, gi: int) -> Measurement:
    g = code.generators[gi]
    return Measurement(g.label, g.terms, g.op)


def default_sequence(code: FermionCode, repeats: int = 3, strategy: str = "phased-greedy") -> FtSequence:
    """Schedule-ordered full extraction, repeated."""
    sched = schedule(code, strategy)
    steps = tuple(tuple(_measurement(code, gi) for gi in rnd) for rnd in sched.rounds)
    return FtSequence(steps * repeats, len(steps), f"default-x{repeats}")


def truncated_sequence(code: FermionCode) -> FtSequence:
    """Set-0 rounds only, one pass: not single-fault tolerant."""
    sched = schedule(code)
    steps = tuple(
        tuple(_measurement(code, gi) for gi in rnd)
        for rnd, ph in zip(sched.rounds, sched.phases) if ph.startswith("set0")
    )
    return FtSequence(steps, len(sched.rounds), "truncated-set0")


def sequence_to_dict(seq: FtSequence) -> dict:
    return {
        "name": seq.name,
        "round_length": seq.round_length,
        "steps": [
            [{"label": m.label, "pauli_terms": [[t.qubit, t.pauli, t.rep] for t in m.terms]} for m in step]
            for step in seq.steps
        ],
    }


def sequence_from_dict(code: FermionCode, doc: dict) -> FtSequence:
    """Steps list measurements by generator label, or by explicit Pauli terms.

    An optional top-level ``repeat`` repeats the listed steps.
    """
    steps = []
    for step in doc["steps"]:
        ms = []
        for item in step:
            if isinstance(item, str):
                item = {"label": item}
            if "pauli_terms" in item:
                terms = tuple(PauliTerm(int(q), p, r) for q, p, r in item["pauli_terms"])
                op = pauli_string_to_majorana(terms, code.layout)
                ms.append(Measurement(item.get("label", "custom"), terms, op))
            else:
                try:
                    gi = code.generator_index(item["label"])
                except ValueError:
                    raise SequenceError(f"unknown generator label {item['label']!r}") from None
                ms.append(_measurement(code, gi))
        steps.append(tuple(ms))
    steps = tuple(steps) * int(doc.get("repeat", 1))
    round_length = int(doc.get("round_length", len(doc["steps"])))
    return FtSequence(steps, round_length, doc.get("name", "custom"))


def save_sequence(seq: FtSequence, path: str | Path) -> None:
    Path(path).write_text(json.dumps(sequence_to_dict(seq), indent=1) + "\n")


def load_sequence(code: FermionCode, path: str | Path) -> FtSequence:
    return sequence_from_dict(code, json.loads(Path(path).read_text()))


# --- space-time decoding problem ------------------------------------------------------

# class of each mechanism modulo the tetron operator as a 3-bit value (abc),
# which turns the composition of per-step draws into XOR convolution
_CLASS_OF = tuple((m ^ 15 if m & 8 else m) for m in MECHANISM_MASKS)


def _compose(dist: np.ndarray, step: np.ndarray, times: int) -> np.ndarray:
    """Distribution over the 8 classes after ``times`` independent draws."""
    out = dist.copy()
    for _ in range(times):
        new = np.zeros(8)
        for a in range(8):
            for b in range(8):
                new[a ^ b] += out[a] * step[b]
        out = new
    return out


FINAL_ROUND_MODES = ("decode", "cleanup")


@dataclass
class FtProblem:
    """Everything needed to simulate and decode one (sequence, p, eta).

    ``final_round='decode'`` appends the perfect round's detectors (perfect
    outcome XOR last noisy outcome) to the space-time problem. ``'cleanup'``
    decodes the noisy detectors alone, then fixes the residual with a
    code-capacity decode of the perfect round.
    """

    code: FermionCode
    sequence: FtSequence
    p: float
    eta: float
    p_meas: float
    config: DecoderConfig
    final_round: str = "decode"
    inst_step: np.ndarray = field(init=False)
    inst_op: np.ndarray = field(init=False)
    meas_bits: np.ndarray = field(init=False)
    prev: np.ndarray = field(init=False)
    graph: DecoderGraph = field(init=False)
    decoder: BpOsdDecoder = field(init=False)

    def __post_init__(self):
        if self.final_round not in FINAL_ROUND_MODES:
            raise ValueError(f"unknown final_round mode {self.final_round!r}")
        code, seq = self.code, self.sequence
        inst = seq.instances()
        if not inst:
            raise SequenceError("empty sequence")
        ops = seq.distinct_ops()
        index = {op.support: j for j, op in enumerate(ops)}
        self.inst_step = np.array([s for s, _ in inst], dtype=np.int64)
        self.inst_op = np.array([index[m.op.support] for _, m in inst], dtype=np.int64)
        self.meas_bits = np.zeros((len(inst), code.n_maj), dtype=np.uint8)
        for i, (_, m) in enumerate(inst):
            self.meas_bits[i, list(m.op.bits)] = 1
        last: dict[int, int] = {}
        self.prev = np.full(len(inst), -1, dtype=np.int64)
        for i, j in enumerate(self.inst_op):
            self.prev[i] = last.get(int(j), -1)
            last[int(j)] = i
        self.last_of = np.array([last[j] for j in range(len(ops))], dtype=np.int64)
        self.op_bits = np.zeros((len(ops), code.n_maj), dtype=np.uint8)
        for j, op in enumerate(ops):
            self.op_bits[j, list(op.bits)] = 1
        self.step_model = NoiseModel(self.p / seq.round_length, self.eta)
        self.graph = self._build_graph()
        self.decoder = BpOsdDecoder(self.graph, self.config)
        self.cleanup = None
        if self.final_round == "cleanup":
            self.cleanup = BpOsdDecoder(
                mechanism_graph(self.op_bits, code.n_tetrons, NoiseModel(self.p, self.eta)), self.config
            )

    @property
    def n_rows(self) -> int:
        extra = self.op_bits.shape[0] if self.final_round == "decode" else 0
        return len(self.inst_step) + extra

    # detectors -------------------------------------------------------------
    def detectors(self, outcomes: np.ndarray, final_syndrome: np.ndarray | None = None) -> np.ndarray:
        """(trials, instances) outcomes -> detector events; with the perfect
        round's syndrome (trials, ops), its detectors are appended."""
        ref = np.zeros_like(outcomes)
        has = self.prev >= 0
        ref[:, has] = outcomes[:, self.prev[has]]
        det = outcomes ^ ref
        if final_syndrome is None:
            return det
        return np.concatenate([det, final_syndrome ^ outcomes[:, self.last_of]], axis=1)

    def _build_graph(self) -> DecoderGraph:
        code, seq = self.code, self.sequence
        n_inst = len(self.inst_step)
        n_ops = self.op_bits.shape[0]
        with_final = self.final_round == "decode"
        rows = self.n_rows
        S = seq.n_steps
        touches = np.zeros((S, code.n_tetrons + 1), dtype=bool)
        for s, step in enumerate(seq.steps):
            for m in step:
                for q in m.tetrons:
                    touches[s, q] = True
        step_probs = channel_probs(self.step_model.p, self.eta)
        step_cls = np.zeros(8)
        step_cls[0] = step_probs[0]
        for mi in range(7):
            step_cls[_CLASS_OF[mi]] += step_probs[mi + 1]
        # first detector each operator shows at or after each slot
        fallback = n_inst + np.arange(n_ops) if with_final else np.full(n_ops, -1)
        first_at = np.empty((S, n_ops), dtype=np.int64)
        nxt = fallback.astype(np.int64)
        k = n_inst - 1
        for s in range(S - 1, -1, -1):
            while k >= 0 and self.inst_step[k] >= s:
                nxt[self.inst_op[k]] = k
                k -= 1
            first_at[s] = nxt
        cols, priors, bits, labels, groups = [], [], [], [], []
        gid = 0
        for q in range(1, code.n_tetrons + 1):
            local = self.op_bits[:, 4 * (q - 1):4 * q].astype(np.int64)
            start = 0
            while start < S:
                end = start
                while end < S - 1 and not touches[end, q]:
                    end += 1
                # slots start..end look the same to every detector for tetron q
                dist = _compose(np.eye(8)[0], step_cls, end - start + 1)
                for mi in range(7):
                    mbits = (MECHANISM_MASKS[mi] >> np.arange(4)) & 1
                    # measured ops are even, so anticommutation is overlap parity
                    anti = np.flatnonzero((local @ mbits) % 2)
                    det = np.zeros(rows, dtype=np.uint8)
                    for i in first_at[start, anti]:
                        if i >= 0:
                            det[i] = 1
                    if not det.any():
                        continue
                    cols.append(det)
                    priors.append(dist[_CLASS_OF[mi]])
                    b = np.zeros(code.n_maj, dtype=np.uint8)
                    b[4 * (q - 1):4 * q] = mbits
                    bits.append(b)
                    labels.append(("data", q, MECHANISMS[mi], start, end))
                    groups.append(gid)
                gid += 1
                start = end + 1
        nxt_of = np.full(n_inst, -1, dtype=np.int64)
        for i in range(n_inst):
            if self.prev[i] >= 0:
                nxt_of[self.prev[i]] = i
        for i in range(n_inst):
            det = np.zeros(rows, dtype=np.uint8)
            det[i] = 1
            if nxt_of[i] >= 0:
                det[nxt_of[i]] = 1
            elif with_final:
                det[n_inst + self.inst_op[i]] = 1
            cols.append(det)
            priors.append(self.p_meas)
            bits.append(np.zeros(code.n_maj, dtype=np.uint8))
            labels.append(("flip", i))
            groups.append(gid)
            gid += 1
        H = np.stack(cols, axis=1)
        return DecoderGraph(H, np.array(priors), np.stack(bits), labels, np.array(groups))

    # simulation --------------------------------------------------------------
    def outcomes(self, slot_bits: np.ndarray, flips: np.ndarray) -> np.ndarray:
        """slot_bits: (trials, steps, n_maj) data faults per slot; flips:
        (trials, instances). Returns noisy outcomes (trials, instances)."""
        cum = np.bitwise_xor.accumulate(slot_bits, axis=1)
        before = cum[:, self.inst_step, :]  # error present at each instance
        out = np.einsum("tim,im->ti", before.astype(np.int64), self.meas_bits.astype(np.int64)) % 2
        return out.astype(np.uint8) ^ flips

    def failures(self, slot_bits: np.ndarray, flips: np.ndarray) -> np.ndarray:
        """Boolean per trial: logical failure after decoding and correcting."""
        code = self.code
        final = np.bitwise_xor.reduce(slot_bits, axis=1)
        perfect = ((final.astype(np.int64) @ self.op_bits.T.astype(np.int64)) % 2).astype(np.uint8)
        outs = self.outcomes(slot_bits, flips)
        if self.final_round == "decode":
            res = final ^ self.decoder.decode_batch(self.detectors(outs, perfect))
        else:
            res = final ^ self.decoder.decode_batch(self.detectors(outs))
            syn = (res.astype(np.int64) @ self.op_bits.T.astype(np.int64)) % 2
            res = res ^ self.cleanup.decode_batch(syn.astype(np.uint8))
        full = (res.astype(np.int64) @ code.check_bits.T.astype(np.int64)) % 2
        lg = (res.astype(np.int64) @ code.logical_bits.T.astype(np.int64)) % 2
        return full.any(axis=1) | lg.any(axis=1)


_PROBLEMS: dict = {}


def _problem(code, seq, p, eta, p_meas, config, final_round="decode") -> FtProblem:
    key = (code.check_bits.tobytes(), seq.digest(), p, eta, p_meas, config, final_round)
    prob = _PROBLEMS.get(key)
    if prob is None:
        if len(_PROBLEMS) > 32:
            _PROBLEMS.clear()
        prob = FtProblem(code, seq, p, eta, p_meas, config, final_round)
        _PROBLEMS[key] = prob
    return prob


def ft_block(code, seq, p, eta, p_meas, config, final_round, seed, stream, block, size) -> int:
    prob = _problem(code, seq, p, eta, p_meas, config, final_round)
    rng = block_generator(seed, block, stream)
    cdf = np.cumsum(prob.step_model.probs())
    u = rng.random((size, seq.n_steps, code.n_tetrons))
    labels = np.minimum(np.searchsorted(cdf, u, side="right"), 7).astype(np.int8)
    flips = (rng.random((size, len(prob.inst_step))) < p_meas).astype(np.uint8)
    slot_bits = labels_to_bits(labels)
    return int(prob.failures(slot_bits, flips).sum())


def run_ft(
    code: FermionCode,
    sequence: FtSequence,
    rounds: int,
    grid: Sequence[tuple[float, float]],
    trials: int,
    seed: int,
    config: DecoderConfig | None = None,
    p_meas_factor: float = 1.0,
    workers: int = 1,
    final_round: str = "decode",
) -> list[CapacityPoint]:
    """Monte Carlo logical failure rate of ``sequence`` repeated ``rounds`` times.

    The measurement flip probability is ``p_meas_factor * p``.
    """
    if trials <= 0:
        raise ValueError("trials must be positive")
    seq = sequence.repeated(rounds) if rounds > 1 else sequence
    probs = seq.problems(code)
    if probs:
        raise SequenceError("; ".join(probs[:3]))
    target = 2 * code.n_tetrons - code.k
    if seq.rank() < target:
        raise SequenceError(f"sequence spans rank {seq.rank()} < {target}")
    cfg = config or DecoderConfig()
    jobs = []
    for i, (p, eta) in enumerate(grid):
        for b, size in _blocks(trials):
            jobs.append((code, seq, p, eta, p_meas_factor * p, cfg, final_round, seed, i, b, size))
    counts = run_blocks(ft_block, jobs, workers)
    nb = len(_blocks(trials))
    return [make_point(p, eta, trials, sum(counts[i * nb:(i + 1) * nb])) for i, (p, eta) in enumerate(grid)]


# --- exhaustive single faults ------------------------------------------------------

@dataclass(frozen=True)
class Fault:
    kind: str  # "data" or "flip"
    step: int
    tetron: int = 0
    mechanism: str = ""
    measurement: str = ""

    def describe(self) -> str:
        if self.kind == "data":
            return f"{self.mechanism} on tetron {self.tetron} before step {self.step}"
        return f"flipped outcome of {self.measurement} at step {self.step}"


@dataclass(frozen=True)
class InjectionReport:
    sequence: str
    n_faults: int
    failing: tuple[Fault, ...]

    @property
    def passed(self) -> bool:
        return not self.failing

    def summary(self) -> str:
        if self.passed:
            return f"PASS: 0 logical failures over all {self.n_faults} single faults"
        return (f"FAIL: {len(self.failing)} of {self.n_faults} single faults cause a logical failure; "
                f"first: {self.failing[0].describe()}")


def inject_single_faults(
    code: FermionCode,
    sequence: FtSequence,
    p: float = 0.01,
    eta: float = 1.0,
    config: DecoderConfig | None = None,
    p_meas_factor: float = 1.0,
    final_round: str = "decode",
) -> InjectionReport:
    """Run the sequence once per single fault: every mechanism on every
    tetron in the slot before every step, and every outcome flip."""
    probs = sequence.problems(code)
    if probs:
        raise SequenceError("; ".join(probs[:3]))
    prob = FtProblem(code, sequence, p, eta, p_meas_factor * p, config or DecoderConfig(), final_round)
    S, n, n_inst = sequence.n_steps, code.n_tetrons, len(prob.inst_step)
    faults = []
    n_data = S * n * 7
    slot_bits = np.zeros((n_data + n_inst + 1, S, code.n_maj), dtype=np.uint8)
    flips = np.zeros((n_data + n_inst + 1, n_inst), dtype=np.uint8)
    k = 0
    for s in range(S):
        for q in range(1, n + 1):
            for mi in range(7):
                for t in range(4):
                    if (MECHANISM_MASKS[mi] >> t) & 1:
                        slot_bits[k, s, 4 * (q - 1) + t] = 1
                faults.append(Fault("data", s, q, MECHANISMS[mi]))
                k += 1
    inst = sequence.instances()
    for i in range(n_inst):
        flips[k, i] = 1
        faults.append(Fault("flip", int(inst[i][0]), measurement=inst[i][1].label))
        k += 1
    faults.append(Fault("none", 0))  # fault-free run
    fail = prob.failures(slot_bits, flips)
    failing = tuple(f for f, bad in zip(faults, fail) if bad)
    return InjectionReport(sequence.name, len(faults) - 1, failing)


def unencoded_reference(p: float, eta: float) -> float:
    """Error rate of a bare tetron over the same window (physical error rate)."""
    return physical_error_rate(NoiseModel(p, eta))


__all__ = [
    "Fault", "FtProblem", "FtSequence", "InjectionReport", "Measurement", "SequenceError",
    "default_sequence", "inject_single_faults", "load_sequence", "run_ft", "save_sequence",
    "sequence_from_dict", "sequence_to_dict", "truncated_sequence", "unencoded_reference",
]
