import json

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from clarkdom.clark import clark_measure
from clarkdom.errors import DomainMismatchError
from clarkdom.geometry import ProductDomain, cauchy_kernel, random_interior
from clarkdom.inner import Composed, FiniteBlaschke, SeparableProduct, TorusMonomial
from clarkdom.model_space import (
    KernelCombination,
    clark_inner_product,
    composition_identity,
    gram_matrix,
    h2_inner_product,
    kernel_eval,
    random_kernel_combination,
    small_space_residual,
)
from clarkdom.quadrature import circle_nodes, integrate_boundary, lebesgue_quadrature

Z2 = FiniteBlaschke([0, 0])
Z3 = FiniteBlaschke([0, 0, 0])
FBP5 = FiniteBlaschke([0.1, -0.5j, 0.7, 0.3 + 0.3j, -0.6], np.exp(0.9j))
BIDISK = TorusMonomial([1, 1])


def test_kernel_examples():
    assert kernel_eval(Z2, [0.5], [0.5]) == pytest.approx((1 - 0.0625) / 0.75)
    assert kernel_eval(Z2, [0.5], [0.5]) == pytest.approx(1.25)
    assert kernel_eval(BIDISK, [0, 0], [0.3, 0.4j]) == pytest.approx(1.0)


def test_kernel_hermitian(rng):
    z, w = random_interior(BIDISK.domain, 2, rng)
    assert kernel_eval(BIDISK, z, w) == pytest.approx(np.conj(kernel_eval(BIDISK, w, z)))


def test_h2_single_kernels():
    f = KernelCombination.single(Z3, [0.0])
    assert h2_inner_product(f, f) == pytest.approx(1.0)
    g = KernelCombination.single(Z2, [0.5])
    assert g.norm_squared() == pytest.approx(1.25)


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 10_000), st.integers(1, 6))
def test_gram_positive_semidefinite(seed, n):
    rng = np.random.default_rng(seed)
    for inner in (FBP5, BIDISK):
        g = gram_matrix(inner, random_interior(inner.domain, n, rng))
        assert np.allclose(g, g.conj().T, atol=1e-12)
        assert np.linalg.eigvalsh(g).min() >= -1e-10


def test_reproducing_property(rng):
    for inner in (FBP5, BIDISK, Composed(Z2, TorusMonomial([1, 2]))):
        f = random_kernel_combination(inner, 5, rng)
        w = random_interior(inner.domain, 1, rng)[0]
        kw = KernelCombination.single(inner, w)
        assert abs(h2_inner_product(f, kw) - f(w)) < 1e-12 * max(1, abs(f(w)))


def test_h2_agrees_with_boundary_quadrature(rng):
    f = random_kernel_combination(BIDISK, 3, rng, radius=0.6)
    g = random_kernel_combination(BIDISK, 2, rng, radius=0.6)
    q = lebesgue_quadrature(BIDISK.domain, 128)
    num = integrate_boundary(q, lambda p: f(p) * np.conj(g(p)))
    assert num == pytest.approx(h2_inner_product(f, g), rel=1e-10)


def test_mismatched_inner_rejected(rng):
    f = random_kernel_combination(Z2, 2, rng)
    g = random_kernel_combination(Z3, 2, rng)
    with pytest.raises(DomainMismatchError):
        h2_inner_product(f, g)


def test_duplicate_nodes_rejected():
    with pytest.raises(ValueError):
        KernelCombination(Z2, [[0.1], [0.1]], [1, 2])
    with pytest.raises(ValueError):
        KernelCombination(Z2, [[1.0]], [1])


def test_clark_norm_example():
    f = KernelCombination.single(Z3, [0.0])
    mu = clark_measure(Z3, 1.0)
    assert clark_inner_product(f, f, mu) == pytest.approx(1.0, abs=1e-14)


def test_clark_inner_product_one_variable(rng):
    for _ in range(3):
        f = random_kernel_combination(FBP5, 5, rng)
        g = random_kernel_combination(FBP5, 4, rng)
        exact = h2_inner_product(f, g)
        for alpha in circle_nodes(16):
            val = clark_inner_product(f, g, clark_measure(FBP5, alpha))
            assert abs(val - exact) < 1e-10 * max(1, abs(exact))


def test_clark_inner_product_bidisk(rng):
    f = random_kernel_combination(BIDISK, 3, rng)
    exact = h2_inner_product(f, f)
    for alpha in circle_nodes(4):
        val = clark_inner_product(f, f, clark_measure(BIDISK, alpha))
        assert abs(val - exact) < 1e-6 * abs(exact)


def test_composition_constant_phi(rng):
    f = random_kernel_combination(Z2, 3, rng)
    q = lebesgue_quadrature(Z2.domain, 2048)
    lhs, rhs, res = composition_identity(f, f, lambda u: np.ones_like(u), q, 64)
    assert res < 1e-10


def test_composition_real_part():
    f = KernelCombination.single(Z2, [0.4])
    q = lebesgue_quadrature(Z2.domain, 2048)
    lhs, rhs, res = composition_identity(f, f, lambda u: u.real, q, 256)
    assert abs(rhs) < 1e-15
    assert res < 1e-8


def test_composition_trig_bidisk(rng):
    f = random_kernel_combination(BIDISK, 2, rng, radius=0.6)
    g = random_kernel_combination(BIDISK, 2, rng, radius=0.6)
    q = lebesgue_quadrature(BIDISK.domain, 256)
    phi = lambda u: 2 + u ** 3 - 0.5 * np.conj(u) ** 2
    assert composition_identity(f, g, phi, q, 64)[2] < 1e-8


def test_small_space_one_variable(rng):
    for inner in (Z3, FBP5):
        f = random_kernel_combination(inner, 4, rng)
        assert small_space_residual(f, inner, 256) < 1e-10


def test_small_space_bidisk_fails():
    f = KernelCombination.single(BIDISK, [0.5, 0.0])
    assert small_space_residual(f, BIDISK, 64) > 1e-2


def test_small_space_inner_times_conj_holomorphic():
    # f = I conj(h) with h in H^2_0 lies in the small space
    inner = SeparableProduct([FiniteBlaschke([0.3]), FiniteBlaschke([0.0, -0.4j])])
    h = lambda p: p[:, 0] * p[:, 1] + 0.5 * p[:, 1] ** 2
    f = lambda p: inner(p) * np.conj(h(p))
    assert small_space_residual(f, inner, 64) < 1e-10


def test_small_space_rejects_aliasing():
    with pytest.raises(ValueError):
        small_space_residual(KernelCombination.single(Z3, [0.0]), Z3, 8)


def test_orthogonal_to_inner_times_cauchy(rng):
    f = random_kernel_combination(BIDISK, 3, rng, radius=0.7)
    v = random_interior(BIDISK.domain, 1, rng, radius=0.7)[0]
    q = lebesgue_quadrature(BIDISK.domain, 128)
    dom = BIDISK.domain
    val = integrate_boundary(q, lambda p: f(p) * np.conj(BIDISK(p) * cauchy_kernel(dom, p, v)))
    assert abs(val) < 1e-8


def test_json_roundtrip(rng):
    f = random_kernel_combination(Composed(Z2, BIDISK), 3, rng)
    back = KernelCombination.from_dict(json.loads(json.dumps(f.to_dict())))
    z = random_interior(f.inner.domain, 4, rng)
    assert np.allclose(back(z), f(z), rtol=1e-14)
