"""Arc targets ``Q``, preimages ``E = I^{-1}(Q)`` and the dominance equality.

For ``f`` in the large model space and ``0 < m(Q) < 1``,

    m(Q) ||f||^2_{H^2} = int_E |f|^2 dSigma,

so ``E`` is dominant with constant ``1/m(Q)``. One-variable preimages are
computed exactly as unions of arcs; on the polydisk ``E`` is represented by
its indicator and integrated on a tensor grid.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import RootFindingError
from .inner import InnerFunction, solve_level
from .model_space import KernelCombination, h2_inner_product, random_kernel_combination
from .quadrature import arc_rule, integrate_boundary, lebesgue_quadrature

TWO_PI = 2.0 * np.pi
ANGLE_TIE = 1e-12


def normalize_angle(theta) -> np.ndarray:
    """Map angles to ``[0, 2*pi)``; values within ``ANGLE_TIE`` of ``2*pi`` become 0."""
    t = np.mod(np.asarray(theta, dtype=float), TWO_PI)
    return np.where(t > TWO_PI - ANGLE_TIE, 0.0, t)


class ArcSet:
    """Finite union of half-open arcs ``[start, end)`` inside ``[0, 2*pi)``.

    Input arcs may wrap past ``2*pi`` (``end < start`` or ``end > 2*pi``); they are
    split at 0 and overlapping pieces are merged.
    """

    def __init__(self, arcs: Sequence[Sequence[float]]):
        pieces = []
        for start, end in arcs:
            start, end = float(start), float(end)
            length = end - start if end >= start else end - start + TWO_PI
            if length >= TWO_PI:
                pieces.append((0.0, TWO_PI))
                continue
            if length <= 0:
                continue
            s = float(normalize_angle(start))
            e = s + length
            if e > TWO_PI:
                pieces.append((s, TWO_PI))
                pieces.append((0.0, e - TWO_PI))
            else:
                pieces.append((s, e))
        pieces.sort()
        merged: list[list[float]] = []
        for s, e in pieces:
            if merged and s <= merged[-1][1]:
                merged[-1][1] = max(merged[-1][1], e)
            else:
                merged.append([s, e])
        self.arcs = np.array(merged, dtype=float).reshape(-1, 2)

    def __repr__(self):
        return f"ArcSet({self.arcs.tolist()})"

    def __len__(self):
        return self.arcs.shape[0]

    @property
    def total_measure(self) -> float:
        return float(np.sum(self.arcs[:, 1] - self.arcs[:, 0]) / TWO_PI)

    def contains_angle(self, theta) -> np.ndarray:
        """Half-open membership; angles within ``ANGLE_TIE`` of an endpoint are snapped onto it."""
        t = normalize_angle(theta)
        ends = self.arcs.reshape(-1)
        if ends.size:
            near = np.abs(t[..., None] - ends)
            idx = np.argmin(near, axis=-1)
            t = np.where(np.take_along_axis(near, idx[..., None], -1)[..., 0] < ANGLE_TIE, ends[idx], t)
        inside = (t[..., None] >= self.arcs[:, 0]) & (t[..., None] < self.arcs[:, 1])
        return np.any(inside, axis=-1)

    def contains(self, w) -> np.ndarray:
        return self.contains_angle(np.angle(w))

    def issubset(self, other: "ArcSet", tol: float = 1e-12) -> bool:
        for s, e in self.arcs:
            if not np.any((other.arcs[:, 0] <= s + tol) & (other.arcs[:, 1] >= e - tol)):
                return False
        return True

    def midpoints(self) -> np.ndarray:
        return self.arcs.mean(axis=1)

    def to_dict(self) -> dict:
        return {"arcs": self.arcs.tolist()}

    @classmethod
    def from_dict(cls, data: dict) -> "ArcSet":
        return cls(data["arcs"])


def _check_target(q: ArcSet):
    m = q.total_measure
    if not 0.0 < m < 1.0:
        raise ValueError(f"target arc set needs 0 < m(Q) < 1, got {m}")


@dataclass(frozen=True, eq=False)
class PreimageSet:
    """``E = I^{-1}(Q)``; ``exact`` holds the preimage arcs for one-variable ``I``."""

    inner: InnerFunction
    target: ArcSet
    exact: ArcSet | None = None

    @property
    def is_exact(self) -> bool:
        return self.exact is not None

    def contains(self, points) -> np.ndarray:
        """Indicator of ``E`` at distinguished-boundary points ``(..., k)``."""
        return self.target.contains(self.inner(points))


def _preimage_arcs(inner: InnerFunction, q: ArcSet) -> ArcSet:
    b = inner.as_blaschke()
    zeros, const = b.zeros[None, :], np.array([b.constant])
    pieces = []
    for start, end in q.arcs:
        s = np.angle(solve_level(zeros, const, [np.exp(1j * start)])[0])
        t = np.angle(solve_level(zeros, const, [np.exp(1j * end)])[0])
        # arg B increases strictly, so each start root runs counterclockwise into the next end root
        gap = np.mod(t[None, :] - s[:, None], TWO_PI)
        gap[gap == 0] = TWO_PI
        pair = np.argmin(gap, axis=1)
        if len(set(pair.tolist())) != b.degree:
            raise RootFindingError("preimage endpoints do not pair up; argument is not monotone")
        for i, j in enumerate(pair):
            pieces.append((s[i], s[i] + gap[i, j]))
    return ArcSet(pieces)


def preimage(inner: InnerFunction, q: ArcSet) -> PreimageSet:
    """Exact arcs on the disk, an indicator representation on polydisks."""
    _check_target(q)
    if inner.domain.k == 1:
        return PreimageSet(inner, q, _preimage_arcs(inner, q))
    return PreimageSet(inner, q)


def preimage_measure(e: PreimageSet, resolution: int = 1024) -> float:
    """``Sigma(E)``: exact arc length, or tensor-grid quadrature of the indicator."""
    if e.is_exact:
        return e.exact.total_measure
    rule = lebesgue_quadrature(e.inner.domain, resolution)
    return float(integrate_boundary(rule, lambda p: e.contains(p).astype(float)).real)


def integrate_on_preimage(f: KernelCombination, e: PreimageSet, arc_nodes: int = 1024,
                          grid: int = 1024) -> float:
    """``int_E |f|^2 dSigma``: Gauss-Legendre on each preimage arc, or the indicator on a grid."""
    if e.is_exact:
        total = 0.0
        for start, end in e.exact.arcs:
            theta, w = arc_rule(start, end, arc_nodes)
            total += float(np.sum(w * np.abs(f(np.exp(1j * theta)[:, None])) ** 2))
        return total
    rule = lebesgue_quadrature(e.inner.domain, grid)
    return float(integrate_boundary(rule, lambda p: e.contains(p) * np.abs(f(p)) ** 2).real)


def dominance_check(f: KernelCombination, e: PreimageSet, arc_nodes: int = 1024, grid: int = 1024):
    """``(m(Q) ||f||^2, int_E |f|^2, relative residual)``."""
    lhs = e.target.total_measure * h2_inner_product(f, f).real
    rhs = integrate_on_preimage(f, e, arc_nodes, grid)
    return lhs, rhs, abs(lhs - rhs) / abs(lhs)


def observed_order(resolutions: Sequence[int], errors: Sequence[float]) -> float:
    """Least-squares slope of ``-log(error)`` against ``log(N)``."""
    x = np.log(np.asarray(resolutions, dtype=float))
    y = np.log(np.maximum(np.asarray(errors, dtype=float), 1e-300))
    return float(-np.polyfit(x, y, 1)[0])


REPORT_COLUMNS = ("inner", "m_Q", "sigma_E", "max_ratio", "residual")


@dataclass
class DominanceReport:
    inner: str
    m_q: float
    sigma_e: float
    max_ratio: float
    residual: float
    bound: float
    ratios: list[float] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return 0.0 < self.sigma_e < 1.0 and self.max_ratio <= self.bound * (1.0 + 1e-8)

    def row(self) -> list:
        return [self.inner, repr(self.m_q), repr(self.sigma_e), repr(self.max_ratio), repr(self.residual)]

    def to_csv(self, header: bool = True) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        if header:
            writer.writerow(REPORT_COLUMNS)
        writer.writerow(self.row())
        return buf.getvalue()


def dominance_constant_report(inner: InnerFunction, q: ArcSet, trials: int, node_budget: int, seed,
                              arc_nodes: int = 1024, grid: int = 1024, radius: float = 0.9) -> DominanceReport:
    """Largest observed ``||f||^2 / int_E |f|^2`` over random kernel combinations."""
    e = preimage(inner, q)
    rng = np.random.default_rng(seed)
    ratios, residuals = [], []
    for _ in range(trials):
        f = random_kernel_combination(inner, node_budget, rng, radius)
        lhs, rhs, res = dominance_check(f, e, arc_nodes, grid)
        ratios.append(lhs / q.total_measure / rhs)
        residuals.append(res)
    return DominanceReport(
        inner=type(inner).__name__,
        m_q=q.total_measure,
        sigma_e=preimage_measure(e, grid),
        max_ratio=max(ratios),
        residual=max(residuals),
        bound=1.0 / q.total_measure,
        ratios=ratios,
    )
