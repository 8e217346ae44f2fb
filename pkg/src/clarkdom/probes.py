"""Radial limits at Clark atoms and the slice-integration formula."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .clark import ClarkMeasure, clark_measure
from .errors import SingularKernelError
from .inner import InnerFunction
from .quadrature import BoundaryQuadrature, circle_nodes, integrate_boundary

RADIAL_TOL = 1e-6


def default_radii(steps: int = 20) -> np.ndarray:
    """``r_j = 1 - 2^-j`` for ``j = 1..steps``."""
    return 1.0 - 2.0 ** -np.arange(1, steps + 1, dtype=float)


@dataclass(frozen=True, eq=False)
class RadialProbeResult:
    atom: np.ndarray
    radii: np.ndarray
    values: np.ndarray
    deltas: np.ndarray
    converged: bool
    boundary_value: complex | None = None
    error: str | None = None

    @property
    def limit_error(self) -> float:
        """``|f(r_M zeta) - f(zeta)|`` against the closed-form boundary value."""
        if self.boundary_value is None:
            return float("nan")
        return float(abs(self.values[-1] - self.boundary_value))


def _validate_radii(radii) -> np.ndarray:
    r = np.asarray(radii, dtype=float)
    if r.ndim != 1 or r.size < 2:
        raise ValueError("a radial schedule needs at least two radii")
    if np.any(np.diff(r) <= 0) or r[0] <= 0 or r[-1] >= 1:
        raise ValueError("radii must be strictly increasing inside (0, 1)")
    return r


def probe_point(f: Callable, zeta, radii, tol: float = RADIAL_TOL) -> RadialProbeResult:
    """Values ``f(r zeta)`` along the schedule and the convergence diagnostic.

    Converged means the last increment is below ``tol`` and the increments
    do not grow over the final three steps.
    """
    r = _validate_radii(radii)
    zeta = np.asarray(zeta, dtype=complex)
    try:
        values = np.asarray(f(r[:, None] * zeta[None, :]), dtype=complex)
    except (SingularKernelError, FloatingPointError) as exc:
        return RadialProbeResult(zeta, r, np.array([]), np.array([]), False, None, str(exc))
    deltas = np.abs(np.diff(values))
    tail = deltas[-3:]
    converged = bool(deltas[-1] < tol and np.all(np.diff(tail) <= 0))
    try:
        boundary = complex(f(zeta[None, :])[0])
    except SingularKernelError as exc:
        return RadialProbeResult(zeta, r, values, deltas, converged, None, str(exc))
    return RadialProbeResult(zeta, r, values, deltas, converged, boundary)


def radial_probe(f: Callable, inner: InnerFunction, alpha, radii: Sequence[float] | None = None,
                 measure: ClarkMeasure | None = None, max_atoms: int | None = None) -> list[RadialProbeResult]:
    """Probe ``f`` along the rays through the atoms of ``sigma_alpha[I]``.

    With ``max_atoms`` a deterministic, evenly strided subset of the support
    is probed (sliced measures have many atoms).
    """
    radii = _validate_radii(default_radii() if radii is None else radii)
    mu = measure if measure is not None else clark_measure(inner, alpha)
    points = mu.points
    if max_atoms is not None and points.shape[0] > max_atoms:
        idx = np.linspace(0, points.shape[0] - 1, max_atoms).round().astype(int)
        points = points[idx]
    return [probe_point(f, p, radii) for p in points]


def slice_formula_check(g: Callable, boundary_rule: BoundaryQuadrature, circle_resolution: int | None = None):
    """``int g dSigma`` against ``int int g(lambda zeta) dm(lambda) dSigma(zeta)``.

    The inner circle average uses the half-step rule with ``circle_resolution``
    nodes (default: the boundary rule's first node count).
    """
    n = circle_resolution or boundary_rule.node_count[0]
    lam = circle_nodes(n)
    lhs = integrate_boundary(boundary_rule, g)

    def averaged(p):
        pts = lam[None, :, None] * p[:, None, :]
        vals = np.asarray(g(pts.reshape(-1, p.shape[-1])), dtype=complex)
        return vals.reshape(p.shape[0], n).mean(axis=1)

    rhs = integrate_boundary(boundary_rule, averaged)
    return lhs, rhs, abs(lhs - rhs)
