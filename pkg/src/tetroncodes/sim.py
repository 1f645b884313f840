"""Code-capacity Monte Carlo, pseudothresholds and the bosonic-decoder baseline."""

from __future__ import annotations

import csv
import io
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass
from statistics import NormalDist
from typing import Callable, Iterable, Sequence

import numpy as np

from .decoder import BpOsdDecoder, DecoderConfig, build_decoder_graph, residual_failures
from .fermion import FermionCode
from .noise import NoiseModel, block_generator, labels_to_bits, physical_error_rate, sample_labels

BLOCK = 4096  # trials per RNG block; fixed so worker count cannot change results

CSV_COLUMNS = (
    "family", "n_tetrons", "eta", "p", "p_physical", "trials", "failures",
    "p_logical", "ci_low", "ci_high", "seed",
)


@dataclass(frozen=True)
class CapacityPoint:
    p: float
    eta: float
    trials: int
    failures: int
    p_logical: float
    ci_low: float
    ci_high: float
    p_physical: float


def wilson_interval(k: int, n: int, level: float = 0.95) -> tuple[float, float]:
    if n <= 0:
        raise ValueError("Wilson interval needs n > 0")
    z = NormalDist().inv_cdf(0.5 + level / 2)
    ph = k / n
    den = 1 + z * z / n
    centre = (ph + z * z / (2 * n)) / den
    half = z * math.sqrt(ph * (1 - ph) / n + z * z / (4 * n * n)) / den
    lo = 0.0 if k == 0 else max(0.0, min(ph, centre - half))
    hi = 1.0 if k == n else min(1.0, max(ph, centre + half))
    return lo, hi


def make_point(p: float, eta: float, trials: int, failures: int) -> CapacityPoint:
    lo, hi = wilson_interval(failures, trials)
    return CapacityPoint(
        p, eta, trials, failures, failures / trials, lo, hi,
        physical_error_rate(NoiseModel(p, eta)),
    )


def _blocks(trials: int) -> list[tuple[int, int]]:
    return [(b, min(BLOCK, trials - b * BLOCK)) for b in range(math.ceil(trials / BLOCK))]


def run_blocks(task: Callable, jobs: Sequence[tuple], workers: int = 1) -> list[int]:
    """Evaluate ``task(*job)`` for every job, in order, optionally across
    processes. Results are integers so merging is exact."""
    if workers <= 1 or len(jobs) <= 1:
        return [task(*j) for j in jobs]
    with ProcessPoolExecutor(max_workers=workers) as ex:
        return list(ex.map(task, *zip(*jobs), chunksize=max(1, len(jobs) // (4 * workers))))


# decoders are rebuilt per process and memoised there
_DECODERS: dict = {}


def _decoder_for(code: FermionCode, p: float, eta: float, config: DecoderConfig) -> BpOsdDecoder:
    key = (code.check_bits.tobytes(), code.logical_bits.tobytes(), p, eta, config)
    dec = _DECODERS.get(key)
    if dec is None:
        if len(_DECODERS) > 64:
            _DECODERS.clear()
        dec = BpOsdDecoder(build_decoder_graph(code, NoiseModel(p, eta)), config)
        _DECODERS[key] = dec
    return dec


def capacity_block(code: FermionCode, p: float, eta: float, config: DecoderConfig,
                   seed: int, stream: int, block: int, size: int) -> int:
    """Logical failures in one block of code-capacity trials."""
    model = NoiseModel(p, eta)
    rng = block_generator(seed, block, stream)
    labels = sample_labels(model, code.n_tetrons, size, rng)
    bits = labels_to_bits(labels)
    syn = (bits.astype(np.int64) @ code.check_bits.T.astype(np.int64)) % 2
    if not syn.any():
        return 0
    corr = _decoder_for(code, p, eta, config).decode_batch(syn.astype(np.uint8))
    return int(residual_failures(code, bits ^ corr).sum())


def run_capacity(
    code: FermionCode,
    grid: Iterable[tuple[float, float]],
    trials: int,
    seed: int,
    config: DecoderConfig | None = None,
    workers: int = 1,
) -> list[CapacityPoint]:
    """Sample -> syndrome -> decode -> classify at each (p, eta).

    Grid point i draws from stream i of the seed, so adding points to the end
    of a grid leaves earlier points unchanged.
    """
    if trials <= 0:
        raise ValueError("trials must be positive")
    cfg = config or DecoderConfig()
    grid = list(grid)
    jobs = []
    for i, (p, eta) in enumerate(grid):
        for b, size in _blocks(trials):
            jobs.append((code, p, eta, cfg, seed, i, b, size))
    counts = run_blocks(capacity_block, jobs, workers)
    out, k = [], 0
    for p, eta in grid:
        nb = len(_blocks(trials))
        out.append(make_point(p, eta, trials, sum(counts[k:k + nb])))
        k += nb
    return out


def points_to_csv(points: Sequence[CapacityPoint], family: str, n_tetrons: int, seed: int) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for pt in points:
        w.writerow([
            family, n_tetrons, repr(pt.eta), repr(pt.p), repr(pt.p_physical), pt.trials,
            pt.failures, repr(pt.p_logical), repr(pt.ci_low), repr(pt.ci_high), seed,
        ])
    return buf.getvalue()


def point_dicts(points: Sequence[CapacityPoint]) -> list[dict]:
    return [asdict(p) for p in points]


def log_grid(lo: float, hi: float, n: int) -> list[float]:
    if n == 1:
        return [lo]
    return [float(x) for x in np.geomspace(lo, hi, n)]


def parse_grid(text: str) -> list[float]:
    """``lo:hi:n`` (log-spaced) or a comma-separated list."""
    if ":" in text:
        lo, hi, n = text.split(":")
        return log_grid(float(lo), float(hi), int(n))
    return [float(x) for x in text.split(",") if x]


# --- curve analysis -------------------------------------------------------------

@dataclass(frozen=True)
class SlopeFit:
    slope: float
    stderr: float
    intercept: float
    n_points: int


def fit_loglog_slope(xs: Sequence[float], ys: Sequence[float], weights: Sequence[float] | None = None) -> SlopeFit:
    """Least-squares line through (log x, log y), skipping y = 0 points."""
    xs, ys = np.asarray(xs, float), np.asarray(ys, float)
    keep = ys > 0
    if weights is not None:
        w = np.asarray(weights, float)[keep]
    else:
        w = None
    lx, ly = np.log(xs[keep]), np.log(ys[keep])
    if lx.size < 2:
        raise ValueError("need at least two nonzero points for a slope")
    if lx.size == 2:
        slope = (ly[1] - ly[0]) / (lx[1] - lx[0])
        return SlopeFit(float(slope), float("nan"), float(ly[0] - slope * lx[0]), 2)
    coef, cov = np.polyfit(lx, ly, 1, w=w, cov="unscaled" if w is not None else True)
    return SlopeFit(float(coef[0]), float(math.sqrt(cov[0, 0])), float(coef[1]), int(lx.size))


def fit_points_slope(points: Sequence[CapacityPoint]) -> SlopeFit:
    """Slope of log p_logical vs log p, weighted by binomial counts."""
    pts = [pt for pt in points if pt.failures > 0]
    # relative error of p_L is ~1/sqrt(failures); weight log residuals accordingly
    return fit_loglog_slope([pt.p for pt in pts], [pt.p_logical for pt in pts],
                            [math.sqrt(pt.failures) for pt in pts])


class NoCrossing(ValueError):
    """No sign change of p_logical - p_physical on the grid."""


@dataclass(frozen=True)
class PseudothresholdEstimate:
    eta: float
    p_star: float  # crossing, in physical-error-rate units
    p_star_raw: float  # the same crossing expressed as the total rate p
    bracket: tuple[float, float] | None
    method: str  # "bracket" or "extrapolated"
    out_of_range: bool


def pseudothreshold(points: Sequence[CapacityPoint], strict: bool = False) -> PseudothresholdEstimate:
    """Crossing of p_logical with the physical error rate.

    With a bracketing pair (below the diagonal, then above) the crossing is
    interpolated linearly in log-log. Otherwise a log-log line is fit to all
    nonzero points and solved, and the estimate is flagged out of range; with
    ``strict`` that case raises NoCrossing.
    """
    pts = sorted(points, key=lambda pt: pt.p_physical)
    if not pts:
        raise NoCrossing("no points")
    eta = pts[0].eta
    scale = pts[0].p_physical / pts[0].p if pts[0].p > 0 else 1.0
    for a, b in zip(pts, pts[1:]):
        if a.p_logical < a.p_physical and b.p_logical >= b.p_physical and b.p_logical > 0:
            xa, xb = math.log(a.p_physical), math.log(b.p_physical)
            if a.p_logical > 0:
                ya = math.log(a.p_logical)
            else:
                # no failures observed: place the point at the Wilson upper bound
                ya = math.log(max(a.ci_high, 1e-300))
            yb = math.log(b.p_logical)
            da, db = ya - xa, yb - xb
            t = da / (da - db) if da != db else 0.0
            x = xa + t * (xb - xa)
            ps = math.exp(x)
            return PseudothresholdEstimate(eta, ps, ps / scale, (a.p_physical, b.p_physical), "bracket", False)
    if strict:
        raise NoCrossing(f"p_logical never crosses p_physical on the grid (eta={eta})")
    fit = fit_loglog_slope([pt.p_physical for pt in pts], [pt.p_logical for pt in pts])
    if abs(fit.slope - 1.0) < 1e-12:
        raise NoCrossing("fitted slope 1: parallel to the diagonal")
    x = -fit.intercept / (fit.slope - 1.0)
    ps = math.exp(x)
    return PseudothresholdEstimate(eta, ps, ps / scale, None, "extrapolated", True)


# --- bosonic-decoder baseline ------------------------------------------------------

@dataclass(frozen=True)
class BaselineReport:
    trials: int
    gamma_d_only: int  # residual supported on d-sites only
    within_trials: int  # visible (non-gamma_d) error count <= t_b
    within_failures: int
    beyond_trials: int
    beyond_failures: int
    mean_reservoir: float  # average number of tetrons left with a gamma_d excitation

    @property
    def gamma_d_only_fraction(self) -> float:
        return self.gamma_d_only / self.trials

    @property
    def within_rate(self) -> float:
        return self.within_failures / self.within_trials if self.within_trials else 0.0

    @property
    def beyond_rate(self) -> float:
        return self.beyond_failures / self.beyond_trials if self.beyond_trials else 0.0


def baseline_decoder(code: FermionCode, model: NoiseModel, config: DecoderConfig | None = None) -> BpOsdDecoder:
    """Set-0 rows, X/Y/Z columns (gamma_x priors folded into their aliases)."""
    graph = build_decoder_graph(code, model, rows=code.set0_indices(), mechanisms="bosonic")
    return BpOsdDecoder(graph, config or DecoderConfig())


def d_sites_mask(code: FermionCode) -> np.ndarray:
    m = np.zeros(code.n_maj, dtype=bool)
    m[3::4] = True
    return m


def baseline_residuals(code: FermionCode, bits: np.ndarray, decoder: BpOsdDecoder) -> np.ndarray:
    """Residual after bosonic correction, reduced modulo tetron operators
    (so gamma_a gamma_b gamma_c reads as gamma_d)."""
    rows = code.set0_indices()
    syn = (bits.astype(np.int64) @ code.check_bits[rows].T.astype(np.int64)) % 2
    res = (bits ^ decoder.decode_batch(syn.astype(np.uint8))).reshape(len(bits), -1, 4)
    w = res.sum(axis=2, keepdims=True)
    res = np.where(w >= 3, res ^ 1, res)  # weight 4 -> 0, weight 3 -> complement
    return res.reshape(len(bits), -1).astype(np.uint8)


def run_baseline_reservoir(
    code: FermionCode, model: NoiseModel, trials: int, seed: int, config: DecoderConfig | None = None
) -> BaselineReport:
    """Decode with the bosonic decoder only and track what fermionic errors leave behind."""
    t_b = (code.d_b - 1) // 2
    dec = baseline_decoder(code, model, config)
    dmask = d_sites_mask(code)
    tot = dsum = 0
    wt = wf = bt = bf = 0
    for b, size in _blocks(trials):
        labels = sample_labels(model, code.n_tetrons, size, block_generator(seed, b))
        bits = labels_to_bits(labels)
        res = baseline_residuals(code, bits, dec)
        dsum += int(res[:, dmask].sum())
        tot += int((~res[:, ~dmask].any(axis=1)).sum())
        fail = residual_failures(code, res)
        # visible errors: everything except gamma_d (label 7)
        visible = ((labels > 0) & (labels < 7)).sum(axis=1)
        within = visible <= t_b
        wt += int(within.sum())
        wf += int(fail[within].sum())
        bt += int((~within).sum())
        bf += int(fail[~within].sum())
    return BaselineReport(trials, tot, wt, wf, bt, bf, dsum / trials)
