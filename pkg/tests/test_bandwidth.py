import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from oracles import epa_half, loo_cv_loop, uniform_half
from unifbw.bandwidth import (
    BandwidthGrid,
    InfeasibleBandwidth,
    cv_score,
    cv_search_range,
    cv_table,
    geometric_grid,
    indicator_weight,
    paper_bandwidth_interval,
    select_cv_bandwidth,
)
from unifbw.model import Dataset, sample


@pytest.mark.parametrize(
    "n,lo,hi", [(1000, 0.177828, 0.354813), (50, 0.376060, 0.556102)]
)
def test_paper_interval(n, lo, hi):
    got = paper_bandwidth_interval(n, 1 / 20)
    assert got[0] == pytest.approx(lo, abs=5e-7)
    assert got[1] == pytest.approx(hi, abs=5e-7)


def test_paper_interval_degenerate_and_errors():
    lo, hi = paper_bandwidth_interval(300, 0.0)
    assert lo == hi == 300 ** -0.2
    with pytest.raises(ValueError):
        paper_bandwidth_interval(300, 0.2)
    with pytest.raises(ValueError):
        paper_bandwidth_interval(300, -0.01)


@given(st.floats(1e-3, 0.5), st.floats(1.01, 10), st.integers(2, 60))
def test_geometric_grid(lo, factor, size):
    hi = min(lo * factor, 0.99)
    g = BandwidthGrid.geometric(lo, hi, size)
    assert g.points[0] == lo and g.points[-1] == hi
    assert np.all(np.diff(g.points) > 0)
    ratios = g.points[1:] / g.points[:-1]
    np.testing.assert_allclose(ratios, ratios[0], rtol=1e-12)


def test_cv_constant_y_and_zero_weight(epa, model):
    data = Dataset(np.full(30, 2.5), np.linspace(0.2, 0.8, 30))
    assert cv_score(data, 0.2, kernel=epa) == pytest.approx(0.0, abs=1e-28)
    data = sample(model, 40, 1)
    assert cv_score(data, 0.2, w=lambda z: np.zeros_like(z), kernel=epa) == 0.0


def test_cv_hand_dataset(uni):
    data = Dataset([1.0, 2.0, 3.0, 4.0, 5.0], [0.40, 0.45, 0.5, 0.55, 0.6])
    # h = 1 makes every pair fall in the window: leave-one-out means
    assert cv_score(data, 1.0, w=lambda z: np.ones_like(z), kernel=uni) == pytest.approx(3.125, abs=1e-14)


def test_cv_matches_loop_oracle(epa, model):
    data = sample(model, 80, 3)
    w = indicator_weight()
    for h in (0.05, 0.1, 0.3):
        expected = loo_cv_loop(data.y, data.z, h, epa_half, lambda z: float(w(z)))
        assert cv_score(data, h, w, epa) == pytest.approx(expected, rel=1e-12)


def test_cv_infeasible(uni):
    data = Dataset([1.0, 2.0, 3.0], [0.3, 0.5, 0.7])
    with pytest.raises(InfeasibleBandwidth):
        cv_score(data, 0.1, kernel=uni)


def test_select_in_range_and_brute_force(epa, model):
    data = sample(model, 120, 8)
    h = select_cv_bandwidth(data, 0.05, 25, kernel=epa)
    lo, hi = cv_search_range(120, 0.05)
    assert lo <= h <= hi
    hs = geometric_grid(lo, hi, 25)
    scores = [loo_cv_loop(data.y, data.z, g, epa_half, lambda z: 1.0 if 0.25 <= z <= 0.75 else 0.0) for g in hs]
    best = min((s, g) for s, g in zip(scores, hs) if not math.isnan(s))[1]
    assert h == best


def test_select_two_point_grid(epa, model):
    data = sample(model, 100, 2)
    hs, scores = cv_table(data, 0.05, 2, kernel=epa)
    h = select_cv_bandwidth(data, 0.05, 2, kernel=epa)
    finite = [(s, g) for s, g in zip(scores, hs) if not np.isnan(s)]
    assert h == min(finite)[1]


@given(st.randoms(use_true_random=False))
def test_select_permutation_invariant(epa, model, rnd):
    data = sample(model, 60, 12)
    perm = list(range(60))
    rnd.shuffle(perm)
    assert select_cv_bandwidth(data.take(perm), 0.05, 15, kernel=epa) == select_cv_bandwidth(data, 0.05, 15, kernel=epa)


@given(st.integers(0, 10_000), st.floats(0.02, 0.9))
def test_cv_nonnegative(uni, model, seed, h):
    data = sample(model, 30, seed)
    try:
        assert cv_score(data, h, kernel=uni) >= 0
    except InfeasibleBandwidth:
        pass


def test_all_infeasible_raises(uni):
    # largest grid h is 3^-0.45 = 0.61, half-window 0.305 < spacing 0.45
    data = Dataset([1.0, 2.0, 3.0], [0.05, 0.5, 0.95])
    with pytest.raises(InfeasibleBandwidth):
        select_cv_bandwidth(data, 0.45, 3, w=lambda z: np.ones_like(z), kernel=uni)
