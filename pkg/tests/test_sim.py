import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from tetroncodes.noise import NoiseModel, physical_error_rate
from tetroncodes.sim import (
    BLOCK,
    CSV_COLUMNS,
    NoCrossing,
    fit_loglog_slope,
    fit_points_slope,
    log_grid,
    make_point,
    parse_grid,
    points_to_csv,
    pseudothreshold,
    run_baseline_reservoir,
    run_capacity,
    wilson_interval,
)


@given(st.integers(1, 10_000), st.data())
def test_wilson_contains_estimate(n, data):
    k = data.draw(st.integers(0, n))
    lo, hi = wilson_interval(k, n)
    assert 0 <= lo <= k / n <= hi <= 1


def test_wilson_coverage():
    rng = np.random.default_rng(11)
    for q, n in ((0.1, 1000), (0.3, 500)):
        ks = rng.binomial(n, q, size=1000)
        hits = sum(lo <= q <= hi for lo, hi in (wilson_interval(int(k), n) for k in ks))
        assert abs(hits / 1000 - 0.95) <= 0.02


def test_wilson_needs_trials():
    with pytest.raises(ValueError):
        wilson_interval(0, 0)


def _synthetic(f, ps, eta=0.0, n=10**9):
    pts = []
    for p in ps:
        pl = f(physical_error_rate(NoiseModel(p, eta)))
        pts.append(make_point(p, eta, n, int(round(pl * n))))
    return pts


def test_pseudothreshold_cubic():
    pts = _synthetic(lambda x: 4 * x**3, log_grid(0.1, 0.6, 9))
    est = pseudothreshold(pts)
    assert est.method == "bracket" and not est.out_of_range
    assert est.p_star == pytest.approx(0.5, rel=1e-3)
    lo, hi = est.bracket
    assert lo < 0.5 < hi


def test_pseudothreshold_square_is_flagged():
    pts = _synthetic(lambda x: x**2, log_grid(0.01, 0.5, 6))
    est = pseudothreshold(pts)
    assert est.out_of_range and est.method == "extrapolated"
    assert est.p_star == pytest.approx(1.0, rel=1e-3)
    with pytest.raises(NoCrossing):
        pseudothreshold(pts, strict=True)


def test_pseudothreshold_uses_physical_units():
    # with eta > 0 the crossing is reported in physical units, raw p alongside
    pts = _synthetic(lambda x: 4 * x**3, log_grid(0.1, 0.7, 12), eta=1.0)
    est = pseudothreshold(pts)
    assert est.p_star == pytest.approx(0.5, rel=1e-3)
    assert est.p_star_raw == pytest.approx(0.5 / 0.875, rel=1e-3)


def test_slope_fit():
    xs = log_grid(1e-3, 1e-2, 5)
    fit = fit_loglog_slope(xs, [7 * x**3 for x in xs])
    assert fit.slope == pytest.approx(3.0)
    with pytest.raises(ValueError):
        fit_loglog_slope([1.0, 2.0], [0.0, 0.0])
    pts = [make_point(x, 1.0, 10**9, int(1e9 * 5 * x**2)) for x in xs]
    assert fit_points_slope(pts).slope == pytest.approx(2.0, abs=1e-3)


def test_grids():
    assert parse_grid("1e-3:1e-1:3") == pytest.approx([1e-3, 1e-2, 1e-1])
    assert parse_grid("0.1,0.2") == [0.1, 0.2]
    assert log_grid(0.5, 1, 1) == [0.5]


def test_zero_noise_gives_zero_failures(steane):
    pts = run_capacity(steane, [(0.0, 1.0), (0.0, 10.0)], 5000, 1)
    assert all(pt.failures == 0 and pt.p_logical == 0.0 for pt in pts)


def test_trials_must_be_positive(steane):
    with pytest.raises(ValueError):
        run_capacity(steane, [(0.1, 1.0)], 0, 1)


def test_capacity_point_invariants(steane):
    pts = run_capacity(steane, [(0.05, 1.0), (0.2, 0.1)], 3000, 4)
    for pt in pts:
        assert pt.ci_low <= pt.p_logical <= pt.ci_high
        assert pt.p_logical == pt.failures / pt.trials
        assert pt.p_physical == pytest.approx(NoiseModel(pt.p, pt.eta).p_bosonic + 0.75 * NoiseModel(pt.p, pt.eta).p_fermionic)


def test_determinism_across_workers(steane):
    grid = [(0.05, 1.0), (0.1, 10.0)]
    trials = 2 * BLOCK + 17
    a = run_capacity(steane, grid, trials, 9, workers=1)
    b = run_capacity(steane, grid, trials, 9, workers=2)
    assert a == b
    csv_a = points_to_csv(a, "color", 7, 9)
    assert csv_a == points_to_csv(b, "color", 7, 9)
    assert csv_a.splitlines()[0] == ",".join(CSV_COLUMNS)
    # earlier grid points do not depend on later ones
    assert run_capacity(steane, grid[:1], trials, 9)[0] == a[0]
    assert run_capacity(steane, grid[:1], trials, 10)[0] != a[0]


@pytest.mark.parametrize("eta", [1.0, 10.0])
def test_capacity_below_physical_at_small_p(steane, eta):
    pt = run_capacity(steane, [(0.01, eta)], 20000, 5)[0]
    assert pt.ci_high < pt.p_physical


def test_baseline_reservoir(steane):
    rep = run_baseline_reservoir(steane, NoiseModel(0.02, 10.0), 20000, 3)
    assert rep.trials == 20000
    assert rep.within_trials + rep.beyond_trials == rep.trials
    # at most t_b = 1 visible error is always corrected bosonically
    assert rep.within_failures == 0
    assert rep.beyond_rate > 0
    assert rep.mean_reservoir > 0
    assert 0 < rep.gamma_d_only_fraction <= 1
    assert math.isfinite(rep.within_rate)
