"""Large model space ``K_I = H^2 - I H^2`` through its reproducing kernel.

Members are finite kernel combinations ``f = sum_i c_i k(., w_i)`` with
``k(z, w) = (1 - I(z) conj(I(w))) C(z, w)``. Their ``H^2`` inner products are
exact (reproducing property), which is what every boundary or Clark-measure
integral in this package is checked against.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .clark import ClarkMeasure
from .errors import DomainMismatchError
from .geometry import cauchy_kernel, random_interior
from .inner import InnerFunction, _complex, _pair, inner_from_dict
from .quadrature import BoundaryQuadrature, circle_nodes, integrate_boundary, tensor_torus_nodes

NODE_SEPARATION = 1e-10


def kernel_eval(inner: InnerFunction, z, w):
    """``k(z, w) = (1 - I(z) conj(I(w))) C(z, w)``, broadcasting over batch axes."""
    dom = inner.domain
    z = dom.as_points(z)
    w = dom.as_points(w)
    out = (1.0 - inner(z) * np.conj(inner(w))) * cauchy_kernel(dom, z, w)
    out = np.asarray(out)
    return out[()] if out.ndim == 0 else out


def gram_matrix(inner: InnerFunction, nodes) -> np.ndarray:
    """``G[i, j] = (k_{w_j}, k_{w_i}) = k(w_i, w_j)``."""
    nodes = inner.domain.as_points(nodes)
    return kernel_eval(inner, nodes[:, None, :], nodes[None, :, :])


@dataclass(frozen=True, eq=False)
class KernelCombination:
    """``f(z) = sum_i c_i k(z, w_i)`` for distinct interior nodes ``w_i``."""

    inner: InnerFunction
    nodes: np.ndarray
    coefficients: np.ndarray

    def __post_init__(self):
        dom = self.inner.domain
        nodes = np.atleast_2d(dom.check_interior(np.asarray(self.nodes, dtype=complex)))
        coef = np.atleast_1d(np.asarray(self.coefficients, dtype=complex))
        if coef.shape != (nodes.shape[0],):
            raise ValueError("need one coefficient per node")
        if nodes.shape[0] > 1:
            gaps = np.linalg.norm(nodes[:, None, :] - nodes[None, :, :], axis=-1)
            gaps[np.diag_indices_from(gaps)] = np.inf
            if gaps.min() < NODE_SEPARATION:
                raise ValueError("kernel nodes must be pairwise distinct")
        object.__setattr__(self, "nodes", nodes)
        object.__setattr__(self, "coefficients", coef)

    @classmethod
    def single(cls, inner: InnerFunction, w, coefficient=1.0) -> "KernelCombination":
        return cls(inner, np.atleast_2d(inner.domain.as_points(w)), [coefficient])

    def __call__(self, z):
        """Value at interior or distinguished-boundary point(s) ``z``."""
        z = self.inner.domain.as_points(z)
        vals = kernel_eval(self.inner, z[..., None, :], self.nodes)
        out = np.asarray(vals @ self.coefficients)
        return out[()] if out.ndim == 0 else out

    def norm_squared(self) -> float:
        return float(h2_inner_product(self, self).real)

    def to_dict(self) -> dict:
        return {
            "inner": self.inner.to_dict(),
            "nodes": [[_pair(x) for x in w] for w in self.nodes],
            "coefficients": [_pair(c) for c in self.coefficients],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "KernelCombination":
        inner = inner_from_dict(data["inner"])
        nodes = np.array([[_complex(x) for x in w] for w in data["nodes"]], dtype=complex)
        coef = np.array([_complex(c) for c in data["coefficients"]], dtype=complex)
        return cls(inner, nodes, coef)


def random_kernel_combination(inner: InnerFunction, n_nodes: int, rng, radius: float = 0.9) -> KernelCombination:
    rng = np.random.default_rng(rng)
    nodes = random_interior(inner.domain, n_nodes, rng, radius)
    coef = rng.standard_normal(n_nodes) + 1j * rng.standard_normal(n_nodes)
    return KernelCombination(inner, nodes, coef)


def _same_inner(f: KernelCombination, g: KernelCombination):
    if f.inner is not g.inner and f.inner != g.inner:
        raise DomainMismatchError("kernel combinations are built over different inner functions")


def h2_inner_product(f: KernelCombination, g: KernelCombination) -> complex:
    """Exact ``(f, g)_{H^2} = sum_i sum_j c_i conj(d_j) k(v_j, w_i)``."""
    _same_inner(f, g)
    cross = kernel_eval(f.inner, g.nodes[:, None, :], f.nodes[None, :, :])
    return complex(np.conj(g.coefficients) @ cross @ f.coefficients)


def clark_inner_product(f: KernelCombination, g: KernelCombination, mu: ClarkMeasure) -> complex:
    """``int f conj(g) dsigma_alpha`` evaluated on the Clark measure's support."""
    _same_inner(f, g)
    if mu.inner is not f.inner and mu.inner != f.inner:
        raise DomainMismatchError("Clark measure belongs to a different inner function")
    return mu.integrate(lambda p: f(p) * np.conj(g(p)))


def composition_identity(f: KernelCombination, g: KernelCombination, phi: Callable,
                         boundary_rule: BoundaryQuadrature, alpha_rule: int):
    """``int (phi o I) f conj(g) dSigma`` versus ``(int phi dm) (f, g)_{H^2}``.

    ``phi`` maps unimodular complex numbers to values. Returns
    ``(lhs, rhs, residual)``, residual relative to ``max(|rhs|, |(f, g)|)``.
    """
    _same_inner(f, g)
    inner = f.inner
    lhs = integrate_boundary(boundary_rule, lambda p: phi(inner(p)) * f(p) * np.conj(g(p)))
    ip = h2_inner_product(f, g)
    mean_phi = complex(np.mean(phi(circle_nodes(alpha_rule))))
    rhs = mean_phi * ip
    return lhs, rhs, abs(lhs - rhs) / max(abs(rhs), abs(ip))


def small_space_residual(f, inner: InnerFunction, resolution: int) -> float:
    """Largest Fourier coefficient of ``I conj(f)`` outside the frequencies of ``H^2_0``.

    ``f`` is a kernel combination or any callable on boundary points. The
    coefficients come from the FFT of samples on the ``N^k`` half-step grid;
    the half-step shift only changes phases, not moduli.
    """
    dom = inner.domain
    if not dom.is_polydisk:
        raise DomainMismatchError("small-space residual needs a polydisk")
    bound = inner.slice_degree + 1
    if resolution <= 2 * bound:
        raise ValueError(f"resolution {resolution} aliases; need N > {2 * bound}")
    k = dom.k
    nodes = tensor_torus_nodes(resolution, k)
    h = inner(nodes) * np.conj(np.asarray(f(nodes)))
    coef = np.fft.fftn(h.reshape((resolution,) * k)) / resolution ** k
    freqs = np.fft.fftfreq(resolution, 1.0 / resolution).astype(int)
    grids = np.meshgrid(*([freqs] * k), indexing="ij")
    allowed = np.all([gr >= 0 for gr in grids], axis=0) & ~np.all([gr == 0 for gr in grids], axis=0)
    return float(np.max(np.abs(coef[~allowed])))
