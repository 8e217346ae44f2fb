import json

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from clarkdom.dominant import (
    TWO_PI,
    ArcSet,
    dominance_check,
    dominance_constant_report,
    integrate_on_preimage,
    observed_order,
    preimage,
    preimage_measure,
)
from clarkdom.geometry import ProductDomain
from clarkdom.inner import FiniteBlaschke, TorusMonomial
from clarkdom.model_space import KernelCombination, random_kernel_combination

Z = FiniteBlaschke([0])
Z2 = FiniteBlaschke([0, 0])
SHIFTED = FiniteBlaschke([0.5])
UPPER = ArcSet([(0, np.pi)])


def test_arcset_normalizes_wraps_and_merges():
    a = ArcSet([(3 * np.pi / 2, np.pi / 2)])
    assert np.allclose(a.arcs, [[0, np.pi / 2], [3 * np.pi / 2, TWO_PI]])
    assert a.total_measure == pytest.approx(0.5)
    b = ArcSet([(0, 1), (0.5, 2), (3, 4)])
    assert np.allclose(b.arcs, [[0, 2], [3, 4]])
    assert len(ArcSet([(1, 1)])) == 0


def test_arcset_half_open_membership():
    assert UPPER.contains_angle(0.0)
    assert not UPPER.contains_angle(np.pi)
    assert UPPER.contains_angle(-1e-13)  # snapped onto the closed start
    assert not UPPER.contains_angle(np.pi - 1e-13)  # snapped onto the open end
    assert UPPER.contains(np.array([1j]))[0]


def test_arcset_json():
    a = ArcSet([(0.3, 1.2), (4, 5)])
    assert np.allclose(ArcSet.from_dict(json.loads(json.dumps(a.to_dict()))).arcs, a.arcs)


def test_preimage_identity():
    e = preimage(Z, UPPER)
    assert np.allclose(e.exact.arcs, [[0, np.pi]])


def test_preimage_z_squared():
    e = preimage(Z2, ArcSet([(0, np.pi / 2)]))
    assert np.allclose(e.exact.arcs, [[0, np.pi / 4], [np.pi, 5 * np.pi / 4]], atol=1e-12)
    assert preimage_measure(e) == pytest.approx(0.25, abs=1e-12)


@pytest.mark.parametrize("b", [Z2, FiniteBlaschke([0, 0, 0]), FiniteBlaschke([0, 0.5, -0.3j])])
@pytest.mark.parametrize("m", [0.25, 0.5, 0.75])
def test_preimage_measure_when_origin_zero(b, m):
    e = preimage(b, ArcSet([(1.0, 1.0 + m * TWO_PI)]))
    assert preimage_measure(e) == pytest.approx(m, abs=1e-12)


def test_preimage_measure_shifted_differs():
    e = preimage(SHIFTED, ArcSet([(0, np.pi / 2)]))
    s = preimage_measure(e)
    assert 0 < s < 1 and abs(s - 0.25) > 1e-3


def test_preimage_monotone():
    small = ArcSet([(0.5, 1.5)])
    big = ArcSet([(0.2, 2.5)])
    b = FiniteBlaschke([0.2, -0.6, 0.4j])
    assert preimage(b, small).exact.issubset(preimage(b, big).exact)


@settings(max_examples=30, deadline=None)
@given(st.floats(0, TWO_PI), st.floats(0.05, 0.95), st.integers(0, 1000))
def test_preimage_boundary_consistency(start, m, seed):
    rng = np.random.default_rng(seed)
    zeros = 0.8 * np.sqrt(rng.random(3)) * np.exp(2j * np.pi * rng.random(3))
    b = FiniteBlaschke(zeros)
    q = ArcSet([(start, start + m * TWO_PI)])
    e = preimage(b, q).exact
    theta = rng.random(200) * TWO_PI
    # away from endpoints, theta in E exactly when b(e^{i theta}) in Q
    ends = e.arcs.reshape(-1)
    gap = np.min(np.abs(np.angle(np.exp(1j * (theta[:, None] - ends[None, :])))), axis=1)
    keep = gap > 1e-8
    assert np.array_equal(e.contains_angle(theta)[keep], q.contains(b.at(np.exp(1j * theta)))[keep])


def test_degenerate_target_rejected():
    with pytest.raises(ValueError):
        preimage(Z2, ArcSet([]))
    with pytest.raises(ValueError):
        preimage(Z2, ArcSet([(0, TWO_PI)]))


def test_dominance_identity_example():
    f = KernelCombination.single(Z, [0.0])
    lhs, rhs, res = dominance_check(f, preimage(Z, UPPER))
    assert lhs == pytest.approx(0.5) and rhs == pytest.approx(0.5) and res < 1e-14


def test_dominance_random_disk(rng):
    b = FiniteBlaschke([0, 0.4, -0.7j])
    e = preimage(b, ArcSet([(2.0, 2.0 + TWO_PI * 0.3)]))
    for _ in range(5):
        f = random_kernel_combination(b, 5, rng)
        assert dominance_check(f, e)[2] < 1e-8


def test_dominance_bidisk_semicircle(rng):
    inner = TorusMonomial([1, 1])
    e = preimage(inner, UPPER)
    assert not e.is_exact
    f = random_kernel_combination(inner, 3, rng)
    assert dominance_check(f, e, grid=256)[2] < 1e-4
    assert preimage_measure(e, 256) == pytest.approx(0.5, abs=1e-12)


def test_constant_report_z_squared():
    rep = dominance_constant_report(Z2, UPPER, trials=10, node_budget=4, seed=3)
    assert rep.ok
    assert rep.max_ratio <= 2 * (1 + 1e-8)
    assert rep.to_csv().splitlines()[0] == "inner,m_Q,sigma_E,max_ratio,residual"


def test_constant_report_shifted():
    rep = dominance_constant_report(SHIFTED, ArcSet([(0, np.pi / 2)]), trials=10, node_budget=3, seed=1)
    assert rep.ok
    assert rep.max_ratio == pytest.approx(4.0, rel=1e-8)


def test_integrate_on_preimage_matches_grid(rng):
    b = FiniteBlaschke([0.3, 0.2 - 0.5j])
    f = random_kernel_combination(b, 3, rng, radius=0.5)
    e = preimage(b, ArcSet([(1.0, 3.0)]))
    theta = (np.arange(1 << 16) + 0.5) * TWO_PI / (1 << 16)
    grid = np.mean(e.exact.contains_angle(theta) * np.abs(f(np.exp(1j * theta)[:, None])) ** 2)
    assert integrate_on_preimage(f, e) == pytest.approx(grid, rel=1e-3)


def test_observed_order():
    ns = [256, 512, 1024]
    assert observed_order(ns, [1.0 / n for n in ns]) == pytest.approx(1.0)
    assert observed_order(ns, [1.0 / n ** 2 for n in ns]) == pytest.approx(2.0)
