"""Biased bosonic/fermionic single-tetron error channel.

Each tetron independently suffers at most one of seven mechanisms
(X, Y, Z, gamma_a, gamma_b, gamma_c, gamma_d); the rest is identity.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .majorana import LOCATIONS, PAULIS, MajoranaOp, TetronLayout, pauli_pair

MECHANISMS = ("X", "Y", "Z", "ga", "gb", "gc", "gd")
LABELS = ("I",) + MECHANISMS

# 4-bit per-tetron MZM masks (bit 0 = a ... bit 3 = d) for each mechanism
MECHANISM_MASKS = tuple(
    [sum(1 << LOCATIONS.index(x) for x in pauli_pair(p, "R")) for p in PAULIS]
    + [1 << i for i in range(4)]
)


@dataclass(frozen=True)
class NoiseModel:
    p: float
    eta: float

    def __post_init__(self):
        if not 0.0 <= self.p <= 1.0:
            raise ValueError(f"p must lie in [0, 1], got {self.p}")
        if not self.eta >= 0.0:
            raise ValueError(f"eta must be >= 0, got {self.eta}")

    @property
    def p_bosonic(self) -> float:
        return self.p / (self.eta + 1.0)

    @property
    def p_fermionic(self) -> float:
        return self.p * self.eta / (self.eta + 1.0)

    def probs(self) -> np.ndarray:
        return channel_probs(self.p, self.eta)

    def scaled(self, factor: float) -> "NoiseModel":
        return NoiseModel(self.p * factor, self.eta)


def channel_probs(p: float, eta: float) -> np.ndarray:
    """Probabilities of (I, X, Y, Z, ga, gb, gc, gd) on one tetron."""
    NoiseModel(p, eta)  # range checks
    pb = p / (3.0 * (eta + 1.0))
    pf = p * eta / (4.0 * (eta + 1.0))
    out = np.array([0.0, pb, pb, pb, pf, pf, pf, pf])
    out[0] = max(0.0, 1.0 - out[1:].sum())
    return out


def physical_error_rate(model: NoiseModel) -> float:
    return model.p_bosonic + 0.75 * model.p_fermionic


def mechanism_op(layout: TetronLayout, q: int, mech: int) -> MajoranaOp:
    """MajoranaOp of mechanism index ``mech`` (0..6, order of MECHANISMS) on tetron q."""
    return MajoranaOp(MECHANISM_MASKS[mech] << (4 * (q - 1)), layout.n_maj)


def block_generator(seed: int, block: int, stream: int = 0) -> np.random.Generator:
    """Counter-based stream for one block of trials: Philox keyed by
    (seed, stream) with the block index in the high counter word."""
    bit = np.random.Philox(key=[seed, stream], counter=[0, 0, 0, block])
    return np.random.Generator(bit)


def sample_labels(model: NoiseModel, n_tetrons: int, n_trials: int, rng: np.random.Generator) -> np.ndarray:
    """(n_trials, n_tetrons) label indices into LABELS (0 = identity)."""
    cdf = np.cumsum(model.probs())
    u = rng.random((n_trials, n_tetrons))
    return np.minimum(np.searchsorted(cdf, u, side="right"), 7).astype(np.int8)


def labels_to_bits(labels: np.ndarray) -> np.ndarray:
    """Map label array (..., n_tetrons) to MZM support bits (..., 4*n_tetrons)."""
    masks = np.array((0,) + MECHANISM_MASKS, dtype=np.uint8)
    m = masks[labels]
    bits = (m[..., None] >> np.arange(4, dtype=np.uint8)) & 1
    return bits.reshape(*labels.shape[:-1], 4 * labels.shape[-1]).astype(np.uint8)


@dataclass(frozen=True)
class ErrorSample:
    labels: tuple[str, ...]
    op: MajoranaOp

    @property
    def n_bosonic(self) -> int:
        return sum(lbl in PAULIS for lbl in self.labels)

    @property
    def n_fermionic(self) -> int:
        return sum(lbl.startswith("g") for lbl in self.labels)

    def tetrons_with(self, label: str) -> list[int]:
        return [q + 1 for q, lbl in enumerate(self.labels) if lbl == label]


def sample(model: NoiseModel, layout: TetronLayout, rng: np.random.Generator) -> ErrorSample:
    idx = sample_labels(model, layout.n_tetrons, 1, rng)[0]
    support = 0
    for q, li in enumerate(idx):
        if li:
            support |= MECHANISM_MASKS[li - 1] << (4 * q)
    return ErrorSample(tuple(LABELS[i] for i in idx), MajoranaOp(support, layout.n_maj))
