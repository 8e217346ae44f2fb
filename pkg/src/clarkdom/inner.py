"""Closed-form inner functions on polydisks.

Four variants are provided: finite Blaschke products on the disk, torus
monomials ``c z^m``, separable products ``prod_j B_j(z_j)`` and compositions
``Theta o I`` with a finite Blaschke product ``Theta``. All of them are
rational, so boundary values are evaluated from the closed form.

The one-variable kernels below work on batches: ``zeros`` has shape
``(S, d)`` and ``constants`` shape ``(S,)``, one Blaschke product per row.
Slicing a multivariable inner function over many base points produces such a
batch, and Clark atoms for all slices come out of one batched eigensolve.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import DomainMismatchError, RootFindingError
from .geometry import ProductDomain

UNIT_TOL = 1e-8


# --------------------------------------------------------------------------
# batched one-variable kernels


def blaschke_values(zeros, constants, w) -> np.ndarray:
    """Evaluate rows of Blaschke products; ``w`` has shape ``(S, M)`` (or broadcastable)."""
    zeros = np.asarray(zeros, dtype=complex)
    w = np.asarray(w, dtype=complex)
    a = zeros[..., None, :]
    x = w[..., :, None]
    nz = a != 0
    phase = np.exp(-1j * np.angle(a))
    factors = np.where(nz, phase * (a - x) / (1.0 - np.conj(a) * x), x)
    return np.asarray(constants)[..., None] * np.prod(factors, axis=-1)


def angular_derivative(zeros, zeta) -> np.ndarray:
    """``|B'(zeta)| = sum_a (1 - |a|^2) / |zeta - a|^2`` for unimodular ``zeta``; shape as ``blaschke_values``."""
    zeros = np.asarray(zeros, dtype=complex)
    a = zeros[..., None, :]
    x = np.asarray(zeta, dtype=complex)[..., :, None]
    return np.sum((1.0 - np.abs(a) ** 2) / np.abs(x - a) ** 2, axis=-1)


def _factor_polys(zeros: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Lowest-first coefficients of the numerator and denominator products, each ``(S, d+1)``."""
    s, d = zeros.shape
    num = np.zeros((s, d + 1), dtype=complex)
    den = np.zeros((s, d + 1), dtype=complex)
    num[:, 0] = 1.0
    den[:, 0] = 1.0
    nz = zeros != 0
    # numerator factor: (|a|/a)(a - z) = |a| - (|a|/a) z, or z when a = 0
    n0 = np.where(nz, np.abs(zeros), 0.0)
    n1 = np.where(nz, -np.exp(-1j * np.angle(zeros)), 1.0)
    d1 = -np.conj(zeros)
    for j in range(d):
        num[:, 1:j + 2] = n0[:, j:j + 1] * num[:, 1:j + 2] + n1[:, j:j + 1] * num[:, 0:j + 1]
        num[:, 0] *= n0[:, j]
        den[:, 1:j + 2] = den[:, 1:j + 2] + d1[:, j:j + 1] * den[:, 0:j + 1]
    return num, den


def _companion_roots(coeffs: np.ndarray) -> np.ndarray:
    """Roots of each row of lowest-first coefficients via batched companion eigenvalues."""
    s, n1 = coeffs.shape
    d = n1 - 1
    lead = coeffs[:, d]
    if np.any(np.abs(lead) < 1e-300):
        raise RootFindingError("degenerate leading coefficient")
    comp = np.zeros((s, d, d), dtype=complex)
    if d > 1:
        idx = np.arange(d - 1)
        comp[:, idx + 1, idx] = 1.0
    comp[:, :, d - 1] = -coeffs[:, :d] / lead[:, None]
    try:
        return np.linalg.eigvals(comp)
    except np.linalg.LinAlgError as exc:
        raise RootFindingError(f"companion eigensolver did not converge: {exc}") from exc


def solve_level(zeros, constants, targets) -> np.ndarray:
    """All ``d`` solutions of ``B(z) = t`` per row (roots of ``c p(z) - t q(z)``), shape ``(S, d)``.

    For unimodular ``t`` the roots lie on T; they are polished by two Newton
    steps on the angle and returned sorted by argument in ``[0, 2*pi)``. For
    ``|t| < 1`` the roots lie in the disk and get two polynomial Newton steps.
    """
    zeros = np.atleast_2d(np.asarray(zeros, dtype=complex))
    s, d = zeros.shape
    constants = np.broadcast_to(np.asarray(constants, dtype=complex), (s,))
    targets = np.broadcast_to(np.asarray(targets, dtype=complex), (s,))
    num, den = _factor_polys(zeros)
    coeffs = constants[:, None] * num - targets[:, None] * den
    roots = _companion_roots(coeffs)
    unimodular = np.abs(np.abs(targets) - 1.0) < 1e-12
    out = np.empty_like(roots)
    if np.any(unimodular):
        r = roots[unimodular]
        off = np.abs(np.abs(r) - 1.0)
        if np.any(off > UNIT_TOL):
            raise RootFindingError(f"level-set root off the unit circle by {off.max():.3e}")
        z = zeros[unimodular]
        c = constants[unimodular]
        t = targets[unimodular]
        theta = np.angle(r)
        for _ in range(2):
            vals = blaschke_values(z, c, np.exp(1j * theta))
            theta = theta - np.angle(vals / t[:, None]) / angular_derivative(z, np.exp(1j * theta))
        theta = np.mod(theta, 2.0 * np.pi)
        theta = np.sort(theta, axis=-1)
        out[unimodular] = np.exp(1j * theta)
    if np.any(~unimodular):
        r = roots[~unimodular]
        cf = coeffs[~unimodular]
        dcf = cf[:, 1:] * np.arange(1, d + 1)
        for _ in range(2):
            p = _polyval_rows(cf, r)
            dp = _polyval_rows(dcf, r)
            step = np.where(np.abs(dp) > 0, p / np.where(dp == 0, 1.0, dp), 0.0)
            r = r - step
        out[~unimodular] = r
    return out


def _polyval_rows(coeffs, x):
    acc = np.zeros_like(x)
    for j in range(coeffs.shape[1] - 1, -1, -1):
        acc = acc * x + coeffs[:, j:j + 1]
    return acc


def compose_rows(outer: "FiniteBlaschke", zeros, constants) -> tuple[np.ndarray, np.ndarray]:
    """Zeros and constants of ``outer o B`` for every row ``B``."""
    zeros = np.atleast_2d(np.asarray(zeros, dtype=complex))
    s = zeros.shape[0]
    constants = np.broadcast_to(np.asarray(constants, dtype=complex), (s,))
    parts = [solve_level(zeros, constants, np.full(s, theta, dtype=complex)) for theta in outer.zeros]
    new_zeros = np.concatenate(parts, axis=-1)
    one = np.ones((s, 1), dtype=complex)
    target = outer.at(blaschke_values(zeros, constants, one)[:, 0])
    unit = blaschke_values(new_zeros, np.ones(s), one)[:, 0]
    return new_zeros, target / unit


# --------------------------------------------------------------------------
# inner functions


def _complex(value) -> complex:
    if isinstance(value, (list, tuple)):
        return complex(value[0], value[1])
    return complex(value)


def _pair(value: complex) -> list[float]:
    return [float(np.real(value)), float(np.imag(value))]


def _unimodular(value, what="constant") -> complex:
    c = _complex(value)
    if abs(abs(c) - 1.0) > 1e-12:
        raise ValueError(f"{what} must be unimodular, got |c| = {abs(c)}")
    return c


class InnerFunction:
    """Base class. Subclasses implement ``__call__`` and ``slice_rows``."""

    domain: ProductDomain

    def __call__(self, z) -> np.ndarray:
        raise NotImplementedError

    @property
    def multidegree(self) -> tuple[int, ...]:
        raise NotImplementedError

    @property
    def slice_degree(self) -> int:
        return int(sum(self.multidegree))

    def slice_rows(self, xi: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """Zeros ``(S, d)`` and constants ``(S,)`` of ``lambda -> I(lambda xi)`` per base point."""
        raise NotImplementedError

    def to_dict(self) -> dict:
        raise NotImplementedError

    def eval(self, z):
        """Value at interior point(s) ``z``."""
        z = self.domain.check_interior(z)
        out = np.asarray(self(z))
        return out[()] if out.ndim == 0 else out

    def boundary_eval(self, zeta):
        """Boundary value at distinguished-boundary point(s), from the closed form."""
        zeta = self.domain.check_boundary(zeta)
        out = np.asarray(self(zeta))
        return out[()] if out.ndim == 0 else out

    def at_origin(self) -> complex:
        return complex(self(np.zeros(self.domain.total_dim, dtype=complex)))

    def as_blaschke(self) -> "FiniteBlaschke":
        """The same function as a single finite Blaschke product (disk only)."""
        if self.domain.k != 1:
            raise DomainMismatchError("only one-variable inner functions reduce to a Blaschke product")
        zeros, consts = self.slice_rows(np.ones((1, 1), dtype=complex))
        return FiniteBlaschke(zeros[0], consts[0])

    def _points(self, z) -> np.ndarray:
        return self.domain.as_points(z)

    def __eq__(self, other):
        return type(self) is type(other) and self.to_dict() == other.to_dict()

    def __hash__(self):
        return hash(repr(self.to_dict()))


class FiniteBlaschke(InnerFunction):
    """``c prod_a (|a|/a)(a - z)/(1 - conj(a) z)`` on the disk; a zero at 0 contributes ``z``."""

    def __init__(self, zeros: Sequence, constant=1.0):
        zeros = np.array([_complex(a) for a in zeros], dtype=complex).reshape(-1)
        if zeros.size == 0:
            raise ValueError("a degree-0 Blaschke product is a unimodular constant, not inner")
        if np.any(np.abs(zeros) >= 1.0):
            raise ValueError("Blaschke zeros must lie in the open unit disk")
        zeros.setflags(write=False)
        self.zeros = zeros
        self.constant = _unimodular(constant)
        self.domain = ProductDomain.polydisk(1)

    def __repr__(self):
        return f"FiniteBlaschke(zeros={self.zeros.tolist()}, constant={self.constant})"

    @property
    def degree(self) -> int:
        return self.zeros.size

    @property
    def multidegree(self):
        return (self.degree,)

    def at(self, w) -> np.ndarray:
        """Evaluate at plain complex number(s) ``w`` of any shape."""
        w = np.asarray(w, dtype=complex)
        flat = w.reshape(1, -1)
        out = blaschke_values(self.zeros[None, :], np.array([self.constant]), flat)[0]
        out = out.reshape(w.shape)
        return out[()] if out.ndim == 0 else out

    def __call__(self, z):
        z = self._points(z)
        return self.at(z[..., 0])

    def derivative_modulus(self, zeta):
        return blaschke_derivative_modulus(self, zeta)

    def slice_rows(self, xi):
        xi = np.asarray(xi, dtype=complex).reshape(-1, 1)[:, 0]
        # B(lambda xi) has zeros a conj(xi); normalized factors are rotation-invariant,
        # each origin zero picks up one factor xi
        zeros = self.zeros[None, :] * np.conj(xi)[:, None]
        consts = self.constant * xi ** int(np.sum(self.zeros == 0))
        return zeros, consts

    def to_dict(self):
        return {"type": "blaschke", "zeros": [_pair(a) for a in self.zeros], "constant": _pair(self.constant)}


def blaschke_derivative_modulus(b: FiniteBlaschke, zeta):
    """``|B'(zeta)|`` on T as the angular-derivative sum over the zeros."""
    zeta = np.asarray(zeta, dtype=complex)
    if np.any(np.abs(np.abs(zeta) - 1.0) > 1e-12):
        raise ValueError("derivative modulus formula needs |zeta| = 1")
    out = angular_derivative(b.zeros[None, :], zeta.reshape(1, -1))[0].reshape(zeta.shape)
    return out[()] if out.ndim == 0 else out


class TorusMonomial(InnerFunction):
    """``c z^m`` on the polydisk of dimension ``len(m)``."""

    def __init__(self, exponents: Sequence[int], constant=1.0):
        m = tuple(int(e) for e in exponents)
        if not m or any(e < 0 for e in m):
            raise ValueError("exponents must be a nonempty multi-index of nonnegative integers")
        if sum(m) == 0:
            raise ValueError("the zero multi-index gives a constant, not an inner function")
        self.exponents = m
        self.constant = _unimodular(constant)
        self.domain = ProductDomain.polydisk(len(m))

    def __repr__(self):
        return f"TorusMonomial(exponents={self.exponents}, constant={self.constant})"

    @property
    def multidegree(self):
        return self.exponents

    def __call__(self, z):
        z = self._points(z)
        out = np.full(z.shape[:-1], self.constant, dtype=complex)
        for j, e in enumerate(self.exponents):
            for _ in range(e):
                out = out * z[..., j]
        return out

    def slice_rows(self, xi):
        xi = np.asarray(xi, dtype=complex).reshape(-1, self.domain.k)
        consts = self(xi)
        zeros = np.zeros((xi.shape[0], sum(self.exponents)), dtype=complex)
        return zeros, consts

    def to_dict(self):
        return {"type": "monomial", "exponents": list(self.exponents), "constant": _pair(self.constant)}


class SeparableProduct(InnerFunction):
    """``prod_j B_j(z_j)`` where each factor is a ``FiniteBlaschke`` or ``None`` (the constant 1)."""

    def __init__(self, factors: Sequence[FiniteBlaschke | None]):
        factors = tuple(factors)
        if not factors:
            raise ValueError("need at least one factor")
        if all(f is None for f in factors):
            raise ValueError("all-constant separable product is not inner")
        for f in factors:
            if f is not None and not isinstance(f, FiniteBlaschke):
                raise TypeError("factors must be FiniteBlaschke or None")
        self.factors = factors
        self.domain = ProductDomain.polydisk(len(factors))

    def __repr__(self):
        return f"SeparableProduct({list(self.factors)})"

    @property
    def multidegree(self):
        return tuple(0 if f is None else f.degree for f in self.factors)

    def __call__(self, z):
        z = self._points(z)
        out = np.ones(z.shape[:-1], dtype=complex)
        for j, f in enumerate(self.factors):
            if f is not None:
                out = out * f.at(z[..., j])
        return out

    def slice_rows(self, xi):
        xi = np.asarray(xi, dtype=complex).reshape(-1, self.domain.k)
        zs = []
        consts = np.ones(xi.shape[0], dtype=complex)
        for j, f in enumerate(self.factors):
            if f is None:
                continue
            z, c = f.slice_rows(xi[:, j])
            zs.append(z)
            consts = consts * c
        return np.concatenate(zs, axis=-1), consts

    def to_dict(self):
        return {"type": "separable", "factors": [None if f is None else f.to_dict() for f in self.factors]}


class Composed(InnerFunction):
    """``outer o inner`` with a nonconstant finite Blaschke product ``outer``."""

    def __init__(self, outer: FiniteBlaschke, inner: InnerFunction):
        if not isinstance(outer, FiniteBlaschke):
            raise TypeError("outer factor must be a FiniteBlaschke")
        self.outer = outer
        self.inner = inner
        self.domain = inner.domain

    def __repr__(self):
        return f"Composed(outer={self.outer!r}, inner={self.inner!r})"

    @property
    def multidegree(self):
        return tuple(self.outer.degree * d for d in self.inner.multidegree)

    def __call__(self, z):
        return self.outer.at(self.inner(z))

    def slice_rows(self, xi):
        zeros, consts = self.inner.slice_rows(xi)
        return compose_rows(self.outer, zeros, consts)

    def to_dict(self):
        return {"type": "composed", "outer": self.outer.to_dict(), "inner": self.inner.to_dict()}


@dataclass(frozen=True, eq=False)
class SlicedInner:
    """The one-variable function ``lambda -> I(lambda xi)`` as a finite Blaschke product."""

    base_point: np.ndarray
    one_variable: FiniteBlaschke

    def __call__(self, lam):
        return self.one_variable.at(lam)


def slice_inner(inner: InnerFunction, xi) -> SlicedInner:
    """Restrict ``inner`` to the diagonal slice through the boundary point ``xi``."""
    if not inner.domain.is_polydisk:
        raise DomainMismatchError("slices are implemented on polydisks only")
    xi = inner.domain.check_boundary(xi)
    if xi.ndim != 1:
        raise ValueError("slice_inner takes a single base point")
    zeros, consts = inner.slice_rows(xi[None, :])
    return SlicedInner(xi, FiniteBlaschke(zeros[0], consts[0] / abs(consts[0])))


def mobius_shift(inner: InnerFunction) -> Composed:
    """``psi o I`` with ``psi(z) = (I(0) - z)/(1 - conj(I(0)) z)``, which vanishes at the origin."""
    a = inner.at_origin()
    if a == 0:
        psi = FiniteBlaschke([0.0], -1.0)
    else:
        psi = FiniteBlaschke([a], a / abs(a))
    return Composed(psi, inner)


def inner_from_dict(data: dict | None) -> InnerFunction | None:
    if data is None:
        return None
    kind = data.get("type")
    if kind == "blaschke":
        return FiniteBlaschke([_complex(a) for a in data["zeros"]], _complex(data.get("constant", 1.0)))
    if kind == "monomial":
        return TorusMonomial(data["exponents"], _complex(data.get("constant", 1.0)))
    if kind == "separable":
        return SeparableProduct([inner_from_dict(f) for f in data["factors"]])
    if kind == "composed":
        return Composed(inner_from_dict(data["outer"]), inner_from_dict(data["inner"]))
    raise ValueError(f"unknown inner-function type {kind!r}")
