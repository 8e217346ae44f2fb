"""Clark measures of closed-form inner functions as weighted point sets.

On the disk, ``sigma_alpha[B]`` of a finite Blaschke product ``B`` is atomic:
one atom at each solution of ``B(zeta) = alpha`` with mass ``1/|B'(zeta)|``.
On the polydisk the measure is assembled slice by slice,

    int g dsigma_alpha = int_{T^k} int_T g(lambda xi) dsigma_alpha[I_xi](lambda) dSigma(xi),

with the inner integral exact (atoms of the sliced Blaschke product). The
slice integrand is invariant under ``xi -> e^{it} xi``, so the outer integral
runs over ``xi = (1, eta)`` with ``eta`` on a tensor grid of ``T^(k-1)``.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import DomainMismatchError
from .geometry import cauchy_kernel, poisson_kernel
from .inner import (
    FiniteBlaschke,
    InnerFunction,
    _pair,
    angular_derivative,
    blaschke_values,
    inner_from_dict,
    solve_level,
)
from .quadrature import BoundaryQuadrature, _evaluate_chunk, circle_nodes, integrate_boundary, tensor_torus_nodes

DEFAULT_SLICE_RESOLUTION = 512
ATOM_TOL = 1e-10


class NearSingularWarning(RuntimeWarning):
    """A closed-form denominator is close to zero for the requested parameters."""


def expected_mass(inner_at_zero: complex, alpha: complex) -> float:
    """Total mass ``(1 - |I(0)|^2) / |alpha - I(0)|^2``."""
    return (1.0 - abs(inner_at_zero) ** 2) / abs(alpha - inner_at_zero) ** 2


def poisson_target(values, alpha) -> np.ndarray:
    """``(1 - |I|^2)/|alpha - I|^2``, the Poisson integral every Clark measure must reproduce."""
    values = np.asarray(values)
    return (1.0 - np.abs(values) ** 2) / np.abs(alpha - values) ** 2


@dataclass(frozen=True, eq=False)
class ClarkMeasure:
    """Common behaviour: a finite weighted point set on the distinguished boundary."""

    alpha: complex
    inner: InnerFunction
    points: np.ndarray
    weights: np.ndarray

    @property
    def total_mass(self) -> float:
        return float(np.sum(self.weights))

    def integrate(self, g: Callable) -> complex:
        """``sum_j w_j g(zeta_j)``; ``g`` receives an ``(M, total_dim)`` array of points."""
        return complex(np.sum(self.weights * _evaluate_chunk(g, self.points)))

    def poisson_integral(self, z) -> np.ndarray:
        """``P[sigma](z)`` for interior points ``z`` of shape ``(..., k)``."""
        z = self.inner.domain.check_interior(z)
        kern = poisson_kernel(self.inner.domain, z[..., None, :], self.points)
        return np.sum(kern * self.weights, axis=-1)

    def certify(self, z) -> float:
        """Maximum relative error of the Poisson identity at the interior points ``z``."""
        z = np.atleast_2d(self.inner.domain.check_interior(z))
        got = self.poisson_integral(z)
        want = poisson_target(self.inner(z), self.alpha)
        return float(np.max(np.abs(got - want) / np.abs(want)))

    def support_residual(self) -> float:
        """``max |I(zeta) - alpha|`` over the support points."""
        return float(np.max(np.abs(self.inner(self.points) - self.alpha)))


@dataclass(frozen=True, eq=False)
class AtomicClark(ClarkMeasure):
    """Clark measure of a one-variable inner function."""

    @property
    def atoms(self) -> list[tuple[complex, float]]:
        return [(complex(p[0]), float(w)) for p, w in zip(self.points, self.weights)]

    @property
    def zetas(self) -> np.ndarray:
        return self.points[:, 0]

    def to_dict(self) -> dict:
        return {
            "alpha": _pair(self.alpha),
            "atoms": [{"zeta": _pair(z), "weight": float(w)} for z, w in self.atoms],
        }


@dataclass(frozen=True, eq=False)
class SliceClark(ClarkMeasure):
    """Slice-decomposed Clark measure on a polydisk."""

    slice_resolution: int = DEFAULT_SLICE_RESOLUTION
    base_points: np.ndarray = field(default=None)
    slice_zeros: np.ndarray = field(default=None)
    slice_constants: np.ndarray = field(default=None)

    def slice_measure(self, index: int) -> AtomicClark:
        """The one-variable Clark measure ``sigma_alpha[I_xi]`` of one cached slice."""
        b = FiniteBlaschke(self.slice_zeros[index], self.slice_constants[index])
        return clark_atoms(b, self.alpha)

    def to_dict(self) -> dict:
        return {
            "alpha": _pair(self.alpha),
            "slice_resolution": int(self.slice_resolution),
            "inner": self.inner.to_dict(),
        }


def _check_alpha(alpha) -> complex:
    alpha = complex(alpha)
    if abs(abs(alpha) - 1.0) > 1e-12:
        raise ValueError(f"alpha must be unimodular, got |alpha| = {abs(alpha)}")
    return alpha


def _atoms_rows(zeros, constants, alpha):
    lam = solve_level(zeros, constants, np.full(zeros.shape[0], alpha))
    w = 1.0 / angular_derivative(zeros, lam)
    vals = blaschke_values(zeros, constants, lam)
    bad = np.abs(vals - alpha)
    if np.any(bad > ATOM_TOL):
        raise ArithmeticError(f"Clark atom misses the level set by {bad.max():.3e}")
    at0 = blaschke_values(zeros, constants, np.zeros((zeros.shape[0], 1)))[:, 0]
    want = poisson_target(at0, alpha)
    if np.any(np.abs(w.sum(axis=-1) - want) > ATOM_TOL * np.maximum(1.0, want)):
        raise ArithmeticError("Clark atom weights do not reproduce the total mass")
    return lam, w


def clark_atoms(b: FiniteBlaschke, alpha, inner: InnerFunction | None = None) -> AtomicClark:
    """Atomic Clark measure of a finite Blaschke product, atoms sorted by argument.

    ``inner`` optionally records the original one-variable function that ``b`` represents.
    """
    alpha = _check_alpha(alpha)
    lam, w = _atoms_rows(b.zeros[None, :], np.array([b.constant]), alpha)
    return AtomicClark(alpha, b if inner is None else inner, lam[0][:, None], w[0])


def slice_clark(inner: InnerFunction, alpha, slice_resolution: int = DEFAULT_SLICE_RESOLUTION) -> SliceClark:
    alpha = _check_alpha(alpha)
    if not inner.domain.is_polydisk:
        raise DomainMismatchError("Clark measures are implemented for polydisk inner functions only")
    k = inner.domain.k
    eta = tensor_torus_nodes(slice_resolution, k - 1)
    xi = np.concatenate([np.ones((eta.shape[0], 1), dtype=complex), eta], axis=-1)
    zeros, consts = inner.slice_rows(xi)
    lam, w = _atoms_rows(zeros, consts, alpha)
    points = (lam[:, :, None] * xi[:, None, :]).reshape(-1, k)
    weights = (w / xi.shape[0]).reshape(-1)
    return SliceClark(alpha, inner, points, weights, slice_resolution, xi, zeros, consts)


def clark_measure(inner: InnerFunction, alpha, slice_resolution: int = DEFAULT_SLICE_RESOLUTION) -> ClarkMeasure:
    """Atomic measure for one-variable ``inner``, slice-decomposed otherwise."""
    if inner.domain.k == 1:
        b = inner if isinstance(inner, FiniteBlaschke) else inner.as_blaschke()
        return clark_atoms(b, alpha, inner)
    return slice_clark(inner, alpha, slice_resolution)


def clark_integrate_1d(mu: AtomicClark, g: Callable) -> complex:
    """``sum_j w_j g(zeta_j)`` with ``g`` applied to the complex atoms."""
    return complex(np.sum(mu.weights * _evaluate_chunk(lambda p: g(p[:, 0]), mu.points)))


def clark_integrate_slices(mu: SliceClark, g: Callable) -> complex:
    """Slice-decomposed integral; ``g`` receives ``(M, k)`` boundary points."""
    return mu.integrate(g)


def clark_from_dict(data: dict, inner: InnerFunction | None = None) -> ClarkMeasure:
    alpha = complex(*data["alpha"])
    if "atoms" in data:
        pts = np.array([[complex(*a["zeta"])] for a in data["atoms"]], dtype=complex)
        w = np.array([a["weight"] for a in data["atoms"]], dtype=float)
        return AtomicClark(alpha, inner, pts, w)
    return slice_clark(inner_from_dict(data["inner"]), alpha, data["slice_resolution"])


def disintegration_check(inner: InnerFunction, g: Callable, alpha_rule: int, boundary_rule: BoundaryQuadrature,
                         slice_resolution: int = DEFAULT_SLICE_RESOLUTION):
    """``int_T int g dsigma_alpha dm(alpha)`` against ``int g dSigma``; returns ``(lhs, rhs, residual)``."""
    alphas = circle_nodes(alpha_rule)
    lhs = 0.0 + 0.0j
    for alpha in alphas:
        lhs += clark_measure(inner, alpha, slice_resolution).integrate(g)
    lhs /= alpha_rule
    rhs = integrate_boundary(boundary_rule, g)
    return lhs, rhs, abs(lhs - rhs)


def double_cauchy_identity(inner: InnerFunction, alpha, z, w, measure: ClarkMeasure | None = None,
                           slice_resolution: int = DEFAULT_SLICE_RESOLUTION):
    """Integral of ``C(z, .) C(., w)`` against ``sigma_alpha`` versus its closed form.

    Returns ``(lhs, rhs, residual)`` with the residual relative to ``|rhs|``.
    """
    alpha = _check_alpha(alpha)
    dom = inner.domain
    z = dom.check_interior(z)
    w = dom.check_interior(w)
    mu = measure if measure is not None else clark_measure(inner, alpha, slice_resolution)
    iz = complex(inner(z))
    iw = complex(inner(w))
    d1 = 1.0 - np.conj(alpha) * iz
    d2 = 1.0 - alpha * np.conj(iw)
    if min(abs(d1), abs(d2)) < 1e-12:
        warnings.warn("alpha nearly matches I(z) or conj(I(w)); closed form is near-singular",
                      NearSingularWarning, stacklevel=2)
    lhs = mu.integrate(lambda p: cauchy_kernel(dom, z, p) * cauchy_kernel(dom, p, w))
    rhs = (1.0 - iz * np.conj(iw)) / (d1 * d2) * complex(cauchy_kernel(dom, z, w))
    return lhs, rhs, abs(lhs - rhs) / abs(rhs)
