"""Product domains ``B_{n1} x ... x B_{nk}`` and their Cauchy and Poisson kernels.

Points are stored flat: a point of a domain with block dimensions
``[n1, ..., nk]`` is a complex array whose last axis has length
``n1 + ... + nk``; leading axes are batch axes. :meth:`ProductDomain.blocks`
splits the last axis back into the ``k`` blocks.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import DomainMismatchError, SingularKernelError

SINGULAR_TOL = 1e-15
BOUNDARY_TOL = 1e-12


@dataclass(frozen=True)
class ProductDomain:
    """The shape ``[n1, ..., nk]`` of ``D = B_{n1} x ... x B_{nk}``."""

    block_dims: tuple[int, ...]

    def __post_init__(self):
        dims = tuple(int(n) for n in self.block_dims)
        if len(dims) < 1:
            raise ValueError("a product domain needs at least one factor")
        if any(n < 1 for n in dims):
            raise ValueError(f"block dimensions must be positive, got {dims}")
        object.__setattr__(self, "block_dims", dims)

    @classmethod
    def polydisk(cls, k: int) -> "ProductDomain":
        return cls((1,) * k)

    @classmethod
    def ball(cls, n: int) -> "ProductDomain":
        return cls((n,))

    @property
    def k(self) -> int:
        return len(self.block_dims)

    @property
    def total_dim(self) -> int:
        return sum(self.block_dims)

    @property
    def is_polydisk(self) -> bool:
        return all(n == 1 for n in self.block_dims)

    @property
    def offsets(self) -> tuple[int, ...]:
        return tuple(np.cumsum((0,) + self.block_dims[:-1]).tolist())

    def point(self, *blocks) -> np.ndarray:
        """Build a flat point from ``k`` blocks (scalars allowed for ``n_j = 1``)."""
        if len(blocks) != self.k:
            raise DomainMismatchError(f"expected {self.k} blocks, got {len(blocks)}")
        parts = []
        for n, b in zip(self.block_dims, blocks):
            b = np.atleast_1d(np.asarray(b, dtype=complex))
            if b.shape != (n,):
                raise DomainMismatchError(f"block of shape {b.shape} does not match n={n}")
            parts.append(b)
        return np.concatenate(parts)

    def as_points(self, z) -> np.ndarray:
        z = np.asarray(z, dtype=complex)
        if z.ndim == 0 and self.total_dim == 1:
            z = z.reshape(1)
        if z.shape[-1] != self.total_dim:
            raise DomainMismatchError(
                f"points have last axis {z.shape[-1]}, domain {list(self.block_dims)} "
                f"needs {self.total_dim}"
            )
        return z

    def blocks(self, z) -> list[np.ndarray]:
        z = self.as_points(z)
        return [z[..., o:o + n] for o, n in zip(self.offsets, self.block_dims)]

    def block_norms(self, z) -> np.ndarray:
        """Euclidean norm of every block, shape ``(..., k)``."""
        return np.stack([np.linalg.norm(b, axis=-1) for b in self.blocks(z)], axis=-1)

    def is_interior(self, z) -> np.ndarray:
        return np.all(self.block_norms(z) < 1.0, axis=-1)

    def is_boundary(self, z, tol: float = BOUNDARY_TOL) -> np.ndarray:
        return np.all(np.abs(self.block_norms(z) - 1.0) <= tol, axis=-1)

    def check_interior(self, z) -> np.ndarray:
        z = self.as_points(z)
        if not np.all(self.is_interior(z)):
            raise DomainMismatchError("expected interior points of the domain")
        return z

    def check_boundary(self, z) -> np.ndarray:
        z = self.as_points(z)
        if not np.all(self.is_boundary(z)):
            raise DomainMismatchError("expected points on the distinguished boundary")
        return z

    def to_dict(self) -> dict:
        return {"block_dims": list(self.block_dims)}

    @classmethod
    def from_dict(cls, data: dict) -> "ProductDomain":
        return cls(tuple(data["block_dims"]))


def _as_domain(domain) -> ProductDomain:
    if isinstance(domain, ProductDomain):
        return domain
    return ProductDomain(tuple(domain))


def hermitian_block_products(domain, z, zeta) -> np.ndarray:
    """``<z_j, zeta_j>`` for every block, conjugating the second argument."""
    domain = _as_domain(domain)
    zb = domain.blocks(z)
    wb = domain.blocks(zeta)
    return np.stack([np.sum(a * np.conj(b), axis=-1) for a, b in zip(zb, wb)], axis=-1)


def cauchy_kernel(domain, z, zeta) -> np.ndarray | complex:
    """Cauchy kernel ``prod_j (1 - <z_j, zeta_j>)^(-n_j)``, broadcasting over batch axes.

    Raises
    ------
    SingularKernelError
        If some ``|1 - <z_j, zeta_j>|`` is below ``SINGULAR_TOL``.
    """
    domain = _as_domain(domain)
    gaps = 1.0 - hermitian_block_products(domain, z, zeta)
    if np.any(np.abs(gaps) < SINGULAR_TOL):
        raise SingularKernelError("Cauchy kernel evaluated at a singular pair")
    out = np.ones(gaps.shape[:-1], dtype=complex)
    for j, n in enumerate(domain.block_dims):
        inv = 1.0 / gaps[..., j]
        # integer powers by repeated multiplication: no branch cut is ever touched
        for _ in range(n):
            out = out * inv
    return out[()] if out.ndim == 0 else out


def poisson_kernel(domain, z, zeta) -> np.ndarray | float:
    """Poisson-type kernel ``C(z, zeta) C(zeta, z) / C(z, z)`` (real, nonnegative)."""
    domain = _as_domain(domain)
    value = cauchy_kernel(domain, z, zeta) * cauchy_kernel(domain, zeta, z) / cauchy_kernel(domain, z, z)
    value = np.asarray(value)
    if np.any(np.abs(value.imag) > 1e-12 * np.maximum(1.0, np.abs(value.real))):
        raise ArithmeticError("Poisson kernel quotient has a non-negligible imaginary part")
    out = value.real
    return out[()] if out.ndim == 0 else out


def disk_poisson(z, zeta) -> np.ndarray:
    """Classical Poisson kernel of the unit disk, ``(1 - |z|^2) / |zeta - z|^2``."""
    z = np.asarray(z, dtype=complex)
    zeta = np.asarray(zeta, dtype=complex)
    return (1.0 - np.abs(z) ** 2) / np.abs(zeta - z) ** 2


def random_interior(domain, size: int, rng, radius: float = 0.9) -> np.ndarray:
    """Points with every block uniform in the ball of the given radius."""
    domain = _as_domain(domain)
    rng = np.random.default_rng(rng)
    parts = []
    for n in domain.block_dims:
        g = rng.standard_normal((size, n)) + 1j * rng.standard_normal((size, n))
        g /= np.linalg.norm(g, axis=-1, keepdims=True)
        # uniform radius in the real 2n-dimensional ball
        r = radius * rng.random(size) ** (1.0 / (2 * n))
        parts.append(g * r[:, None])
    return np.concatenate(parts, axis=-1)


def random_boundary(domain, size: int, rng) -> np.ndarray:
    """Points uniform on the distinguished boundary (normalized complex Gaussians per block)."""
    domain = _as_domain(domain)
    rng = np.random.default_rng(rng)
    parts = []
    for n in domain.block_dims:
        g = rng.standard_normal((size, n)) + 1j * rng.standard_normal((size, n))
        parts.append(g / np.linalg.norm(g, axis=-1, keepdims=True))
    return np.concatenate(parts, axis=-1)


def torus_point(angles: Sequence[float]) -> np.ndarray:
    return np.exp(1j * np.asarray(angles, dtype=float))
