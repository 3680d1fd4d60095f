import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy import integrate

from oracles import epa_half
from unifbw.estimators import (
    FunctionClassEntry,
    el_weights,
    identity_entry,
    indicator_entry,
    kernel_weighted_proportion,
    nw_regression,
    sup_deviation,
    w_process,
    xn_sn_un,
)
from unifbw.model import Cell, Dataset, sample

CELL = Cell(t=1.0, z=0.5, h=0.2)


def test_w_zero_functional(model, epa, hand5):
    zero = FunctionClassEntry(g=lambda y: y, c_g=lambda z: 0.0, d_g=lambda z: 0.0)
    assert w_process(hand5, zero, 0.2, 0.5, 1.0, epa, model=model) == 0.0


def test_w_empty_window(epa):
    data = Dataset([1.0, 2.0], [0.1, 0.9])
    entry = FunctionClassEntry(g=lambda y: y)
    assert w_process(data, entry, 0.2, 0.5, 1.0, epa, expectation=0.0) == 0.0


def test_w_matches_hand_sum(model, epa, hand5):
    entry = indicator_entry(model, 1.0)
    got = w_process(hand5, entry, 0.2, 0.5, 1.0, epa, model=model)
    raw = sum(epa_half((zi - 0.5) / 0.2) * (1.0 if yi <= 1.0 else 0.0) for yi, zi in zip(hand5.y, hand5.z))
    expect = integrate.quad(lambda u: epa_half((u - 0.5) / 0.2) * (1 - math.exp(-u)), 0.4, 0.6, epsabs=1e-13)[0]
    assert got == pytest.approx(raw - 5 * expect, abs=1e-10)


def test_w_requires_centring_source(epa, hand5):
    with pytest.raises(ValueError):
        w_process(hand5, FunctionClassEntry(g=lambda y: y), 0.2, 0.5, 1.0, epa)
    with pytest.raises(ValueError):
        w_process(hand5, FunctionClassEntry(g=lambda y: y), 0.2, 0.5, 0.0, epa, expectation=0.0)


def test_nw_constant_and_single(uni):
    data = Dataset([3.0, 3.0, 3.0], [0.1, 0.5, 0.9])
    assert nw_regression(data, 0.3, 0.5, uni) == 3.0
    data = Dataset([1.0, 7.0, 9.0], [0.1, 0.5, 0.9])
    assert nw_regression(data, 0.2, 0.5, uni) == 7.0


def test_nw_hand_dataset(uni):
    data = Dataset([1.0, 3.0, 5.0, 7.0], [0.1, 0.2, 0.6, 0.9])
    assert nw_regression(data, 0.2, 0.15, uni) == pytest.approx(2.0)


def test_nw_empty_window(uni):
    with pytest.raises(ValueError):
        nw_regression(Dataset([1.0, 2.0], [0.1, 0.2]), 0.1, 0.8, uni)


def test_el_weights_basic(uni):
    data = Dataset([0.5, 0.7, 0.2], [0.49, 0.5, 0.52])
    np.testing.assert_array_equal(el_weights(data, CELL, 0.0, uni), np.ones(3))
    far = Dataset([0.5, 0.7], [0.1, 0.9])
    np.testing.assert_array_equal(el_weights(far, CELL, 0.3, uni), np.zeros(2))


def test_el_weights_hand(epa, hand5):
    w = el_weights(hand5, CELL, 0.3, epa)
    np.testing.assert_allclose(w, [0.0, -0.3375, -0.45, 0.378, 0.0], atol=1e-14)


def test_xn_sn_un_hand(epa, hand5):
    x, s, u = xn_sn_un(hand5, CELL, 0.3, 2.0, epa)
    assert x == pytest.approx(-0.4095, abs=1e-14)
    assert s == pytest.approx(0.45929025 / 2.0, abs=1e-14)
    assert u == pytest.approx(0.4095**2 / 0.45929025, abs=1e-13)


def test_xn_sn_un_single_summand(uni):
    data = Dataset([0.5, 5.0], [0.5, 0.95])
    x, s, u = xn_sn_un(data, CELL, 0.4, 0.7, uni)
    assert x == pytest.approx(0.6)
    assert s == pytest.approx(0.36 / 0.7)
    assert u == pytest.approx(1.0)


def test_xn_zero_at_weighted_proportion(epa, hand5):
    theta = kernel_weighted_proportion(hand5, CELL, epa)
    x, _, u = xn_sn_un(hand5, CELL, theta, 1.0, epa)
    assert abs(x) < 1e-14 and u < 1e-26


def test_xn_all_zero_weights(uni):
    with pytest.raises(ValueError):
        xn_sn_un(Dataset([0.5, 0.7], [0.1, 0.9]), CELL, 0.3, 1.0, uni)


datasets = st.integers(5, 40).flatmap(
    lambda n: st.tuples(
        st.lists(st.floats(0, 5), min_size=n, max_size=n),
        st.lists(st.floats(0.3, 0.7), min_size=n, max_size=n),
    )
)


@given(datasets, st.floats(0, 1), st.floats(0, 1), st.randoms(use_true_random=False))
def test_estimator_invariants(epa, data, th1, th2, rnd):
    d = Dataset(np.array(data[0]), np.array(data[1]))
    k = epa((d.z - CELL.z) / CELL.h)
    if k.sum() == 0:
        return
    # X_n affine and decreasing in theta
    x1 = el_weights(d, CELL, th1, epa).sum()
    x2 = el_weights(d, CELL, th2, epa).sum()
    if th1 < th2:
        assert x1 > x2 - 1e-12
    assert x1 - x2 == pytest.approx((th2 - th1) * k.sum(), abs=1e-10)
    w = el_weights(d, CELL, th1, epa)
    if np.dot(w, w) > 0:
        x, s, u = xn_sn_un(d, CELL, th1, 0.8, epa)
        assert u >= 0
        assert s * 0.8 == pytest.approx(np.dot(w, w), rel=1e-12)
    r = nw_regression(d, CELL.h, CELL.z, epa)
    assert d.y.min() - 1e-12 <= r <= d.y.max() + 1e-12
    perm = list(range(d.n))
    rnd.shuffle(perm)
    dp = d.take(perm)
    assert nw_regression(dp, CELL.h, CELL.z, epa) == pytest.approx(r, rel=1e-12)
    assert el_weights(dp, CELL, th1, epa).sum() == pytest.approx(x1, abs=1e-12)


def test_sup_deviation_single_point(model, epa):
    data = sample(model, 300, 3)
    entry = identity_entry(model)
    stat = sup_deviation(data, entry, [0.5], [0.3], model, epa)
    w = w_process(data, entry, 0.3, 0.5, 1.0, epa, model=model)
    assert stat.value == pytest.approx(abs(w) / math.sqrt(2 * 300 * 0.3 * math.log(1 / 0.3)), rel=1e-12)
    zero = FunctionClassEntry(g=lambda y: y, c_g=lambda z: 0.0)
    assert sup_deviation(data, zero, [0.5], [0.3], model, epa).value == 0.0


def test_sup_deviation_is_grid_max(model, epa):
    data = sample(model, 400, 5)
    entry = indicator_entry(model, 1.5)
    zs, hs = [0.3, 0.5, 0.7], [0.2, 0.3]
    stat = sup_deviation(data, entry, zs, hs, model, epa)
    brute = max(
        abs(w_process(data, entry, h, z, 1.0, epa, model=model)) / math.sqrt(2 * 400 * h * math.log(1 / h))
        for z in zs
        for h in hs
    )
    assert stat.value == pytest.approx(brute, rel=1e-12)
    assert stat.per_point.shape == (6, 4)


def test_sup_deviation_rejects_bad_h(model, epa):
    data = sample(model, 50, 1)
    with pytest.raises(ValueError):
        sup_deviation(data, identity_entry(model), [0.5], [1.0], model, epa)
