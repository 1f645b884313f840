"""BP+OSD syndrome decoding over a mechanism/check matrix."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import _kernels as K
from .fermion import FermionCode
from .gf2 import SpanBasis, from_vector
from .majorana import MajoranaOp
from .noise import MECHANISM_MASKS, MECHANISMS, NoiseModel, channel_probs

_P_FLOOR = 1e-15


@dataclass(frozen=True)
class DecoderConfig:
    max_iter: int = 30
    ms_scaling: float = 0.625
    osd_order: int = 256  # covers every non-pivot of the codes built here
    osd_method: str = "cs"  # "0", "e" (exhaustive over osd_order) or "cs" (combination sweep)
    bp_method: str = "min_sum"  # or "product_sum"
    # "grouped": one variable node per group of exclusive columns (a tetron);
    # "binary": one variable node per column
    variables: str = "grouped"

    def __post_init__(self):
        if self.bp_method not in ("min_sum", "product_sum"):
            raise ValueError(f"unknown bp_method {self.bp_method!r}")
        if self.variables not in ("grouped", "binary"):
            raise ValueError(f"unknown variables mode {self.variables!r}")
        if self.osd_method not in ("0", "e", "cs"):
            raise ValueError(f"unknown osd_method {self.osd_method!r}")
        if self.osd_order < 0 or (self.osd_method == "e" and self.osd_order > 16):
            raise ValueError("osd_order must be >= 0 (and <= 16 for exhaustive OSD)")


class InconsistentSyndrome(ValueError):
    """Syndrome is not in the column space of H."""


@dataclass
class DecoderGraph:
    H: np.ndarray  # (rows, cols) uint8
    priors: np.ndarray  # (cols,) float
    column_bits: np.ndarray  # (cols, n_maj) uint8 support of each column's data effect
    column_labels: list = field(default_factory=list)
    # group id per column; columns in a group are mutually exclusive events
    column_groups: np.ndarray | None = None

    def __post_init__(self):
        self.H = np.ascontiguousarray(self.H, dtype=np.uint8)
        self.priors = np.asarray(self.priors, dtype=np.float64)
        m, n = self.H.shape
        rows, cols = np.nonzero(self.H)
        self._chk_ptr = np.zeros(m + 1, dtype=np.int64)
        np.add.at(self._chk_ptr, rows + 1, 1)
        self._chk_ptr = np.cumsum(self._chk_ptr)
        self._edge_var = cols.astype(np.int64)
        by_var = np.argsort(cols, kind="stable")
        self._var_edges = by_var.astype(np.int64)
        self._var_ptr = np.zeros(n + 1, dtype=np.int64)
        np.add.at(self._var_ptr, cols + 1, 1)
        self._var_ptr = np.cumsum(self._var_ptr)
        self._colbits = K.pack_rows(self.H.T)
        self.rank = len(SpanBasis(from_vector(row) for row in self.H))
        p = np.clip(self.priors, _P_FLOOR, 1 - _P_FLOOR)
        self.prior_llr = np.minimum(np.log((1 - p) / p), K.LLR_CAP)
        self._build_groups()

    def _build_groups(self):
        m, n = self.H.shape
        groups = np.arange(n) if self.column_groups is None else np.asarray(self.column_groups)
        if groups.shape != (n,):
            raise ValueError("column_groups must have one entry per column")
        uniq, gid = np.unique(groups, return_inverse=True)
        G = len(uniq)
        state = np.zeros(n, dtype=np.int64)
        n_states = np.ones(G, dtype=np.int64)
        for c in range(n):
            state[c] = n_states[gid[c]]
            n_states[gid[c]] += 1
        if n_states.max() > 8:
            raise ValueError("at most 7 columns per group")
        S = int(n_states.max())
        probs = np.zeros((G, S))
        probs[gid, state] = np.clip(self.priors, _P_FLOOR, 1.0)
        probs[:, 0] = np.clip(1.0 - probs[:, 1:].sum(axis=1), _P_FLOOR, 1.0)
        with np.errstate(divide="ignore"):
            logp = np.where(np.arange(S)[None, :] < n_states[:, None], np.log(probs), -np.inf)
        pat = np.zeros((m, G), dtype=np.int64)
        for c in range(n):
            pat[:, gid[c]] |= self.H[:, c].astype(np.int64) << state[c]
        rows, gs = np.nonzero(pat)
        ptr = np.zeros(m + 1, dtype=np.int64)
        np.add.at(ptr, rows + 1, 1)
        self._g_chk_ptr = np.cumsum(ptr)
        self._g_edge_grp = gs.astype(np.int64)
        self._g_edge_pat = pat[rows, gs].astype(np.uint8)
        self._g_edges = np.argsort(gs, kind="stable").astype(np.int64)
        gptr = np.zeros(G + 1, dtype=np.int64)
        np.add.at(gptr, gs + 1, 1)
        self._g_ptr = np.cumsum(gptr)
        self._g_nstates = n_states
        self._g_logprior = logp
        self._col_gid = gid.astype(np.int64)
        self._col_state = state
        # exact cost of one column against its group's identity state, so a
        # solution's cost is its negative log-probability up to a constant
        self.prior_llr = np.minimum(logp[gid, 0] - logp[gid, state], K.LLR_CAP)

    @property
    def shape(self) -> tuple[int, int]:
        return self.H.shape

    def syndrome_of_columns(self, cols: Sequence[int]) -> np.ndarray:
        return (self.H[:, list(cols)].sum(axis=1) % 2).astype(np.uint8)

    def cost(self, solution: np.ndarray) -> float:
        """Negative log-probability (up to a constant) of a column selection."""
        return float(self.prior_llr[solution.astype(bool)].sum())

    def correction_bits(self, cols: Sequence[int]) -> np.ndarray:
        return (self.column_bits[list(cols)].sum(axis=0) % 2).astype(np.uint8)


def build_decoder_graph(
    code: FermionCode,
    model: NoiseModel,
    rows: Sequence[int] | None = None,
    mechanisms: str = "all",
) -> DecoderGraph:
    """Mechanism columns, 7 per tetron (X, Y, Z, ga, gb, gc, gd).

    ``mechanisms='bosonic'`` keeps only X, Y, Z, with each Pauli's prior
    absorbing the fermionic error it aliases to under Set-0 decoding.
    """
    checks = code.check_bits if rows is None else code.check_bits[list(rows)]
    return mechanism_graph(checks, code.n_tetrons, model, mechanisms)


def mechanism_graph(checks: np.ndarray, n_tetrons: int, model: NoiseModel, mechanisms: str = "all") -> DecoderGraph:
    """Decoder graph for an explicit (rows, 4n) check-support matrix."""
    probs = channel_probs(model.p, model.eta)[1:]
    if mechanisms == "all":
        mechs = list(range(7))
        pr = probs
    elif mechanisms == "bosonic":
        mechs = [0, 1, 2]
        pr = probs[:3] + probs[3:6]
    else:
        raise ValueError(f"unknown mechanism set {mechanisms!r}")
    n = n_tetrons
    cols_bits = np.zeros((n * len(mechs), 4 * n), dtype=np.uint8)
    priors = np.zeros(n * len(mechs))
    labels = []
    c = 0
    for q in range(n):
        for mi, m in enumerate(mechs):
            mask = MECHANISM_MASKS[m]
            for b in range(4):
                if (mask >> b) & 1:
                    cols_bits[c, 4 * q + b] = 1
            priors[c] = pr[mi]
            labels.append((q + 1, MECHANISMS[m]))
            c += 1
    H = (np.asarray(checks, dtype=np.int64) @ cols_bits.T.astype(np.int64)) % 2
    groups = np.repeat(np.arange(n), len(mechs))
    return DecoderGraph(H.astype(np.uint8), priors, cols_bits, labels, groups)


@dataclass(frozen=True)
class BpResult:
    posterior_llr: np.ndarray
    hard: np.ndarray
    converged: bool
    iterations: int


@dataclass(frozen=True)
class Decision:
    columns: tuple[int, ...]
    correction: MajoranaOp
    converged: bool
    iterations: int
    used_osd: bool


def bp_decode(graph: DecoderGraph, syndrome, max_iters: int = 30, config: DecoderConfig | None = None) -> BpResult:
    cfg = config or DecoderConfig(max_iter=max_iters)
    s = np.ascontiguousarray(syndrome, dtype=np.uint8)
    if s.shape[0] != graph.H.shape[0]:
        raise ValueError(f"syndrome length {s.shape[0]} != {graph.H.shape[0]} rows")
    if cfg.variables == "grouped":
        total, gh, conv, it = K.group_bp(
            graph._g_chk_ptr, graph._g_edge_grp, graph._g_edge_pat, graph._g_ptr, graph._g_edges,
            graph._g_nstates, graph._g_logprior, s, max_iters, cfg.ms_scaling,
            cfg.bp_method == "product_sum",
        )
        # per-column posterior LLR log(P(not c)/P(c)) from the group marginal
        t = total - total.max(axis=1, keepdims=True)
        w = np.exp(t)
        z = w.sum(axis=1)
        pc = w[graph._col_gid, graph._col_state] / z[graph._col_gid]
        pc = np.clip(pc, 1e-300, 1.0)
        post = np.log1p(-np.minimum(pc, 1 - 1e-16)) - np.log(pc)
        hard = (gh[graph._col_gid] == graph._col_state).astype(np.uint8)
        return BpResult(post, hard, bool(conv), int(it))
    post, hard, conv, it = K.bp_decode(
        graph._chk_ptr, graph._edge_var, graph._var_ptr, graph._var_edges,
        graph.prior_llr, s, max_iters, cfg.ms_scaling, cfg.bp_method == "product_sum",
    )
    return BpResult(post, hard, bool(conv), int(it))


def osd_postprocess(
    graph: DecoderGraph, marginals: np.ndarray, syndrome, order: int = 0, method: str = "e"
) -> np.ndarray:
    """OSD solution vector over columns for an arbitrary reliability vector.

    Columns are ordered by ascending posterior LLR (most likely flipped
    first), ties by ascending column index.
    """
    s = np.ascontiguousarray(syndrome, dtype=np.uint8)
    ordering = np.argsort(marginals, kind="stable").astype(np.int64)
    if method == "0":
        order = 0
    sol = K.osd(graph._colbits, ordering, K.pack_rows(s), graph.rank, order, graph.prior_llr, method == "cs")
    if sol.shape[0] != graph.H.shape[1]:
        raise InconsistentSyndrome("syndrome outside the column space of H")
    return sol


class BpOsdDecoder:
    """Deterministic BP+OSD decoder with a syndrome-keyed memo."""

    def __init__(self, graph: DecoderGraph, config: DecoderConfig | None = None, cache_size: int = 200_000):
        self.graph = graph
        self.config = config or DecoderConfig()
        self._cache: dict[bytes, np.ndarray] = {}
        self._cache_size = cache_size
        self._n_maj = graph.column_bits.shape[1]

    def decode_columns(self, syndrome) -> tuple[np.ndarray, bool, int, bool]:
        s = np.ascontiguousarray(syndrome, dtype=np.uint8)
        bp = bp_decode(self.graph, s, self.config.max_iter, self.config)
        if bp.converged and bp.iterations == 0:
            return bp.hard, True, 0, False
        # OSD runs even after convergence: on small loopy graphs BP can settle
        # on the error times a zero-syndrome logical, which OSD-0 strips.
        sol = osd_postprocess(self.graph, bp.posterior_llr, s, self.config.osd_order, self.config.osd_method)
        if bp.converged and self.graph.cost(bp.hard) <= self.graph.cost(sol):
            return bp.hard, True, bp.iterations, False
        return sol, bp.converged, bp.iterations, True

    def decode(self, syndrome) -> Decision:
        sol, conv, it, used = self.decode_columns(syndrome)
        cols = tuple(int(c) for c in np.flatnonzero(sol))
        corr = from_vector(self.graph.correction_bits(cols)) if cols else 0
        return Decision(cols, MajoranaOp(corr, self._n_maj), conv, it, used)

    def correction_bits(self, syndrome) -> np.ndarray:
        """Correction support bits, memoised on the syndrome."""
        s = np.ascontiguousarray(syndrome, dtype=np.uint8)
        key = s.tobytes()
        hit = self._cache.get(key)
        if hit is not None:
            return hit
        if not s.any():
            out = np.zeros(self._n_maj, dtype=np.uint8)
        else:
            sol, *_ = self.decode_columns(s)
            out = (sol.astype(np.int64) @ self.graph.column_bits.astype(np.int64) % 2).astype(np.uint8)
        if len(self._cache) < self._cache_size:
            self._cache[key] = out
        return out

    def decode_batch(self, syndromes: np.ndarray) -> np.ndarray:
        """(trials, rows) syndromes -> (trials, n_maj) correction bits."""
        syndromes = np.ascontiguousarray(syndromes, dtype=np.uint8)
        out = np.zeros((syndromes.shape[0], self._n_maj), dtype=np.uint8)
        nz = np.flatnonzero(syndromes.any(axis=1))
        if nz.size == 0:
            return out
        uniq, inv = np.unique(syndromes[nz], axis=0, return_inverse=True)
        inv = np.asarray(inv).reshape(-1)
        sols = np.stack([self.correction_bits(u) for u in uniq])
        out[nz] = sols[inv]
        return out


def is_logical_failure(code: FermionCode, error: MajoranaOp, correction: MajoranaOp) -> bool:
    if not np.array_equal(code.syndrome(error), code.syndrome(correction)):
        raise ValueError("correction does not reproduce the error syndrome")
    return not code.in_stabilizer_group(error * correction)


def residual_failures(code: FermionCode, residual_bits: np.ndarray) -> np.ndarray:
    """Vectorised failure test for zero-syndrome residuals (trials, n_maj):
    failure iff the residual anticommutes with some logical."""
    lg = code.logical_bits.astype(np.int64)
    return ((residual_bits.astype(np.int64) @ lg.T) % 2).any(axis=1)
