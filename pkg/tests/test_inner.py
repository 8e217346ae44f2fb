import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from clarkdom.errors import DomainMismatchError
from clarkdom.geometry import ProductDomain, random_boundary, random_interior
from clarkdom.inner import (
    Composed,
    FiniteBlaschke,
    SeparableProduct,
    TorusMonomial,
    blaschke_derivative_modulus,
    inner_from_dict,
    mobius_shift,
    slice_inner,
)

FBP3 = FiniteBlaschke([0, 0.5, -0.3j])
VARIANTS = {
    "blaschke": FiniteBlaschke([0.2 + 0.1j, -0.6, 0.4j, 0.8 - 0.1j], np.exp(0.7j)),
    "monomial": TorusMonomial([2, 0, 1], 1j),
    "separable": SeparableProduct([FiniteBlaschke([0.5, -0.2j]), None, FiniteBlaschke([0.0, 0.3])]),
    "composed": Composed(FiniteBlaschke([0.3, -0.4j]), TorusMonomial([1, 1])),
    "composed-disk": Composed(FiniteBlaschke([0, 0.6j]), FBP3),
    "shifted": mobius_shift(SeparableProduct([FiniteBlaschke([0.5]), FiniteBlaschke([0.1j, 0.2])])),
}


def test_eval_examples():
    assert TorusMonomial([1, 1]).eval([0.5, 0.5j]) == pytest.approx(0.25j, abs=1e-16)
    assert FiniteBlaschke([0]).eval(0.3) == pytest.approx(0.3, abs=1e-16)
    composed = Composed(FiniteBlaschke([0, 0]), TorusMonomial([1, 1]))
    assert composed.eval([0.5, 0.5]) == pytest.approx(0.0625, abs=1e-16)


def test_boundary_eval_examples():
    assert TorusMonomial([2, 1]).boundary_eval([1, -1]) == pytest.approx(-1, abs=1e-15)
    assert FiniteBlaschke([0, 0]).boundary_eval(1j) == pytest.approx(-1, abs=1e-15)


def test_eval_rejects_wrong_points():
    with pytest.raises(DomainMismatchError):
        TorusMonomial([1, 1]).eval([0.5])
    with pytest.raises(DomainMismatchError):
        FBP3.eval(1.0)
    with pytest.raises(DomainMismatchError):
        FBP3.boundary_eval(0.5)


def test_blaschke_normalization_positive_at_origin_factor():
    assert FiniteBlaschke([0.5]).eval(0.0) == pytest.approx(0.5)
    b = FiniteBlaschke([0.3 + 0.4j])
    assert b.eval(0.0) == pytest.approx(0.5)


@pytest.mark.parametrize(
    "factory",
    [
        lambda: FiniteBlaschke([]),
        lambda: FiniteBlaschke([1.0]),
        lambda: FiniteBlaschke([0.1], 0.5),
        lambda: TorusMonomial([0, 0]),
        lambda: SeparableProduct([None, None]),
        lambda: Composed(TorusMonomial([1]), FBP3),
    ],
)
def test_constructor_rejects_non_inner(factory):
    with pytest.raises((ValueError, TypeError)):
        factory()


@pytest.mark.parametrize("name", sorted(VARIANTS))
def test_inner_definition(name, rng):
    f = VARIANTS[name]
    z = random_interior(f.domain, 1000, rng, radius=0.999)
    assert np.all(np.abs(f(z)) < 1)
    zeta = random_boundary(f.domain, 1000, rng)
    assert np.allclose(np.abs(f.boundary_eval(zeta)), 1.0, atol=1e-12, rtol=0)


@pytest.mark.parametrize("name", sorted(VARIANTS))
def test_radial_limit_matches_boundary_value(name, rng):
    f = VARIANTS[name]
    zeta = random_boundary(f.domain, 20, rng)
    target = f.boundary_eval(zeta)
    gaps = [np.abs(f(r * zeta) - target) for r in (0.9, 0.99, 0.999, 0.9999)]
    for a, b in zip(gaps, gaps[1:]):
        assert np.all(b < a)
    assert gaps[-1].max() < 1e-2


@pytest.mark.parametrize("b", [FBP3, VARIANTS["blaschke"], FiniteBlaschke([0.95j, -0.9])])
def test_winding_number(b):
    theta = np.linspace(0, 2 * np.pi, 20001)
    arg = np.unwrap(np.angle(b.at(np.exp(1j * theta))))
    assert np.all(np.diff(arg) > 0)
    assert arg[-1] - arg[0] == pytest.approx(2 * np.pi * b.degree, abs=1e-9)


def test_derivative_modulus_examples():
    assert blaschke_derivative_modulus(FiniteBlaschke([0, 0, 0]), np.exp(0.4j)) == pytest.approx(3.0)
    assert blaschke_derivative_modulus(FiniteBlaschke([0.5]), 1.0) == pytest.approx(3.0)


def test_derivative_modulus_finite_difference(rng):
    b = VARIANTS["blaschke"]
    h = 1e-5
    for theta in rng.uniform(0, 2 * np.pi, 50):
        fd = np.angle(b.at(np.exp(1j * (theta + h))) / b.at(np.exp(1j * (theta - h)))) / (2 * h)
        assert blaschke_derivative_modulus(b, np.exp(1j * theta)) == pytest.approx(fd, rel=1e-6)


def test_slice_examples():
    xi = np.exp(1j * np.array([0.4, -1.3]))
    s = slice_inner(TorusMonomial([1, 1]), xi)
    assert s.one_variable.degree == 2
    assert np.allclose(s.one_variable.zeros, 0)
    assert s.one_variable.constant == pytest.approx(xi[0] * xi[1])

    b = FiniteBlaschke([0.5, 0.2j])
    s = slice_inner(SeparableProduct([b, None]), xi)
    assert np.allclose(np.sort_complex(s.one_variable.zeros), np.sort_complex(b.zeros / xi[0]))


@pytest.mark.parametrize("name", ["monomial", "separable", "composed", "shifted"])
def test_slice_consistency(name, rng):
    f = VARIANTS[name]
    for _ in range(200):
        xi = random_boundary(f.domain, 1, rng)[0]
        lam = np.sqrt(rng.random()) * np.exp(2j * np.pi * rng.random())
        s = slice_inner(f, xi)
        assert abs(s(lam) - f(lam * xi)) < 1e-12


def test_slice_needs_polydisk_boundary_point():
    with pytest.raises(DomainMismatchError):
        slice_inner(TorusMonomial([1, 1]), [0.5, 1.0])


def test_composition_boundary(rng):
    outer = FiniteBlaschke([0.3, -0.4j])
    inner = SeparableProduct([FiniteBlaschke([0.5]), FiniteBlaschke([0.2j])])
    f = Composed(outer, inner)
    zeta = random_boundary(f.domain, 500, rng)
    assert np.allclose(f.boundary_eval(zeta), outer.at(inner.boundary_eval(zeta)), atol=1e-12, rtol=0)


def test_as_blaschke_of_composed_disk(rng):
    f = VARIANTS["composed-disk"]
    b = f.as_blaschke()
    assert b.degree == 6
    w = random_interior(f.domain, 100, rng)[:, 0]
    assert np.allclose(b.at(w), f(w[:, None]), atol=1e-12, rtol=0)


def test_mobius_shift_vanishes_at_origin(rng):
    for f in VARIANTS.values():
        g = mobius_shift(f)
        assert abs(g.at_origin()) <= 1e-15
        zeta = random_boundary(f.domain, 200, rng)
        assert np.allclose(np.abs(g.boundary_eval(zeta)), 1, atol=1e-12, rtol=0)


def test_mobius_shift_of_centered_is_negation(rng):
    f = TorusMonomial([1, 2])
    z = random_interior(f.domain, 50, rng)
    assert np.allclose(mobius_shift(f)(z), -f(z), atol=1e-15)


def test_mobius_shift_of_shifted_blaschke():
    f = FiniteBlaschke([0.5])
    assert f.at_origin() == pytest.approx(0.5)
    assert mobius_shift(f).eval(0.0) == 0


@pytest.mark.parametrize("name", sorted(VARIANTS))
def test_json_roundtrip(name, rng):
    f = VARIANTS[name]
    g = inner_from_dict(json.loads(json.dumps(f.to_dict())))
    assert g == f
    z = random_interior(f.domain, 10, rng)
    assert np.array_equal(g(z), f(z))


@settings(max_examples=40, deadline=None)
@given(st.lists(st.tuples(st.floats(0, 0.95), st.floats(0, 2 * np.pi)), min_size=1, max_size=6),
       st.floats(0, 2 * np.pi))
def test_level_set_roots_property(zeros, phase):
    from clarkdom.inner import solve_level

    b = FiniteBlaschke([r * np.exp(1j * t) for r, t in zeros])
    alpha = np.exp(1j * phase)
    roots = solve_level(b.zeros[None], [b.constant], [alpha])[0]
    assert roots.size == b.degree
    assert np.allclose(np.abs(roots), 1, atol=1e-15)
    assert np.all(np.abs(b.at(roots) - alpha) < 1e-10)
    assert np.all(np.diff(np.angle(roots) % (2 * np.pi)) > 0)


def test_domain_of_variants():
    assert VARIANTS["monomial"].domain == ProductDomain.polydisk(3)
    assert VARIANTS["composed"].multidegree == (2, 2)
