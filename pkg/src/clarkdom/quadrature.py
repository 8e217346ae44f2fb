"""Quadrature for normalized Lebesgue measure on the distinguished boundary and on arcs of T."""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Callable

import numpy as np
from scipy.special import roots_legendre

from .errors import DomainMismatchError, QuadratureError
from .geometry import ProductDomain, _as_domain, random_boundary

TENSOR = "tensor-trapezoid"
MONTE_CARLO = "monte-carlo"
_KIND_ALIASES = {"tensor": TENSOR, TENSOR: TENSOR, "mc": MONTE_CARLO, MONTE_CARLO: MONTE_CARLO}

CHUNK = 1 << 18


@dataclass(frozen=True, eq=False)
class BoundaryQuadrature:
    """Nodes on the distinguished boundary with nonnegative weights summing to one."""

    domain: ProductDomain
    nodes: np.ndarray
    weights: np.ndarray
    kind: str
    node_count: tuple[int, ...]

    def __post_init__(self):
        if self.nodes.shape != (self.weights.size, self.domain.total_dim):
            raise ValueError("nodes/weights shape mismatch")
        if np.any(self.weights < 0) or abs(self.weights.sum() - 1.0) > 1e-12:
            raise ValueError("quadrature weights must be nonnegative and sum to 1")

    def __len__(self):
        return self.weights.size


def circle_angles(n: int) -> np.ndarray:
    """The ``n`` roots of unity rotated by half a step, as angles in ``(0, 2*pi)``."""
    return 2.0 * np.pi * (np.arange(n) + 0.5) / n


def circle_nodes(n: int) -> np.ndarray:
    return np.exp(1j * circle_angles(n))


def tensor_torus_nodes(n: int, k: int) -> np.ndarray:
    """All ``n**k`` k-tuples of half-step rotated roots of unity, shape ``(n**k, k)``."""
    base = circle_nodes(n)
    if k == 0:
        return np.ones((1, 0), dtype=complex)
    grids = np.meshgrid(*([base] * k), indexing="ij")
    return np.stack([g.ravel() for g in grids], axis=-1)


def lebesgue_quadrature(domain, resolution: int, kind: str = TENSOR, seed=None) -> BoundaryQuadrature:
    """Quadrature rule for normalized Lebesgue measure on the distinguished boundary.

    ``tensor-trapezoid`` is the uniform ``N**k`` grid (polydisks only);
    ``monte-carlo`` draws ``resolution`` uniform points, reproducible from ``seed``.
    """
    domain = _as_domain(domain)
    if resolution < 2:
        raise ValueError("resolution must be at least 2")
    try:
        kind = _KIND_ALIASES[kind]
    except KeyError:
        raise ValueError(f"unknown quadrature kind {kind!r}") from None
    if kind == TENSOR:
        if not domain.is_polydisk:
            raise DomainMismatchError("tensor-trapezoid rule needs every n_j = 1; use monte-carlo on balls")
        nodes = tensor_torus_nodes(resolution, domain.k)
        weights = np.full(nodes.shape[0], float(resolution) ** (-domain.k))
        return BoundaryQuadrature(domain, nodes, weights, kind, (resolution,) * domain.k)
    nodes = random_boundary(domain, resolution, np.random.default_rng(seed))
    weights = np.full(resolution, 1.0 / resolution)
    return BoundaryQuadrature(domain, nodes, weights, kind, (resolution,))


def _evaluate_chunk(g: Callable, nodes: np.ndarray) -> np.ndarray:
    try:
        values = np.asarray(g(nodes), dtype=complex)
    except Exception as exc:
        # locate the offending node so the caller sees where evaluation broke
        for node in nodes:
            try:
                g(node[None, :])
            except Exception as inner:
                raise QuadratureError(f"integrand failed at node {node}: {inner}", node=node) from inner
        raise QuadratureError(f"integrand failed: {exc}") from exc
    values = np.broadcast_to(values, nodes.shape[:1])
    bad = ~np.isfinite(values)
    if np.any(bad):
        node = nodes[np.argmax(bad)]
        raise QuadratureError(f"integrand is not finite at node {node}", node=node)
    return values


def integrate_boundary(q: BoundaryQuadrature, g: Callable, with_stderr: bool = False):
    """``sum_i w_i g(x_i)``; ``g`` maps an ``(m, total_dim)`` array to ``m`` values.

    Summation runs over fixed-size chunks in node order, so the result is
    deterministic for a given rule. With ``with_stderr`` the Monte Carlo
    standard error of the mean is returned as well (equal weights assumed).
    """
    total = 0.0 + 0.0j
    sq = 0.0
    for start in range(0, len(q), CHUNK):
        nodes = q.nodes[start:start + CHUNK]
        vals = _evaluate_chunk(g, nodes)
        total += np.sum(q.weights[start:start + CHUNK] * vals)
        if with_stderr:
            sq += np.sum(np.abs(vals) ** 2)
    if not with_stderr:
        return total
    n = len(q)
    var = max(sq / n - abs(total) ** 2, 0.0) * n / (n - 1)
    return total, float(np.sqrt(var / n))


@lru_cache(maxsize=32)
def _legendre(n: int):
    x, w = roots_legendre(n)
    x.setflags(write=False)
    w.setflags(write=False)
    return x, w


def arc_rule(start: float, end: float, n: int) -> tuple[np.ndarray, np.ndarray]:
    """Gauss-Legendre rule on the angular interval ``[start, end]`` for normalized measure ``m``.

    Returns angles and weights; the weights sum to ``(end - start) / (2*pi)``.
    """
    x, w = _legendre(n)
    half = 0.5 * (end - start)
    theta = start + half * (x + 1.0)
    return theta, w * half / (2.0 * np.pi)
