"""Periodic spatial grid and continuum-normalized discrete Fourier transforms.

The box [-L/2, L/2) with N equispaced nodes carries dual frequencies
xi_k = 2 pi k / L for k in [-N/2, N/2).  Transforms use the symmetric
(2 pi)^{-1/2} normalization, so the discrete Plancherel identity

    dx * sum |u_j|^2 = dxi * sum |uhat_k|^2

holds exactly and continuum formulas carry over with their constants.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .errors import ValidationError

__all__ = ["GridSpec", "ComplexField", "forward_transform", "inverse_transform", "tail_mass"]

_SQRT_2PI = np.sqrt(2.0 * np.pi)


@dataclass(frozen=True)
class GridSpec:
    """Even-N periodic grid on [-L/2, L/2)."""

    num_points: int
    domain_length: float

    def __post_init__(self):
        if self.num_points <= 0 or self.num_points % 2 != 0:
            raise ValidationError(f"num_points must be a positive even integer, got {self.num_points}")
        if not (self.domain_length > 0 and np.isfinite(self.domain_length)):
            raise ValidationError(f"domain_length must be positive and finite, got {self.domain_length}")

    @property
    def dx(self) -> float:
        return self.domain_length / self.num_points

    @property
    def dxi(self) -> float:
        return 2.0 * np.pi / self.domain_length

    @cached_property
    def x(self) -> np.ndarray:
        """Node positions x_j = -L/2 + j dx."""
        n, L = self.num_points, self.domain_length
        out = -L / 2 + np.arange(n) * self.dx
        out.setflags(write=False)
        return out

    @cached_property
    def k(self) -> np.ndarray:
        """Integer mode numbers, ascending: -N/2 .. N/2 - 1."""
        n = self.num_points
        out = np.arange(-n // 2, n // 2)
        out.setflags(write=False)
        return out

    @cached_property
    def xi(self) -> np.ndarray:
        """Dual frequencies xi_k = 2 pi k / L, ascending."""
        out = self.k * self.dxi
        out.setflags(write=False)
        return out

    @cached_property
    def _sign(self) -> np.ndarray:
        """(-1)^k for the shifted-origin phase in the transforms."""
        out = np.where(self.k % 2 == 0, 1.0, -1.0)
        out.setflags(write=False)
        return out


@dataclass(frozen=True)
class ComplexField:
    """Complex samples on a grid, tagged physical (x) or spectral (xi) side."""

    grid: GridSpec
    samples: np.ndarray = field(repr=False)
    side: str = "physical"

    def __post_init__(self):
        if self.side not in ("physical", "spectral"):
            raise ValidationError(f"side must be 'physical' or 'spectral', got {self.side!r}")
        arr = np.ascontiguousarray(self.samples, dtype=np.complex128)
        if arr.shape != (self.grid.num_points,):
            raise ValidationError(
                f"expected {self.grid.num_points} samples, got shape {arr.shape}"
            )
        if not np.all(np.isfinite(arr.view(np.float64))):
            raise ValidationError("field samples must be finite")
        arr.setflags(write=False)
        object.__setattr__(self, "samples", arr)

    @property
    def is_physical(self) -> bool:
        return self.side == "physical"

    def with_samples(self, samples: np.ndarray, side: str | None = None) -> "ComplexField":
        return ComplexField(self.grid, samples, self.side if side is None else side)

    def measure(self) -> float:
        """Quadrature weight of this side: dx or dxi."""
        return self.grid.dx if self.is_physical else self.grid.dxi

    def l2(self) -> float:
        """Continuum-normalized L^2 norm on this side."""
        return float(np.sqrt(self.measure() * np.sum(np.abs(self.samples) ** 2)))

    def linf(self) -> float:
        return float(np.max(np.abs(self.samples)))

    def lq(self, q: float) -> float:
        """L^q norm with the side's measure; q = inf handled by linf()."""
        if np.isinf(q):
            return self.linf()
        return float((self.measure() * np.sum(np.abs(self.samples) ** q)) ** (1.0 / q))


def forward_transform(fld: ComplexField) -> ComplexField:
    """Continuum-normalized forward transform of a physical-side field.

    uhat(xi_k) = (2 pi)^{-1/2} dx sum_j exp(-i x_j xi_k) u(x_j)
    """
    if not fld.is_physical:
        raise ValidationError("forward_transform expects a physical-side field")
    g = fld.grid
    spec = (g.dx / _SQRT_2PI) * g._sign * np.fft.fftshift(np.fft.fft(fld.samples))
    return ComplexField(g, spec, "spectral")


def inverse_transform(fld: ComplexField) -> ComplexField:
    """Exact inverse of forward_transform."""
    if fld.is_physical:
        raise ValidationError("inverse_transform expects a spectral-side field")
    g = fld.grid
    phys = (_SQRT_2PI / g.dx) * np.fft.ifft(np.fft.ifftshift(g._sign * fld.samples))
    return ComplexField(g, phys, "physical")


def spectral_samples(fld: ComplexField) -> np.ndarray:
    """Spectral-side samples of a field given on either side."""
    return fld.samples if not fld.is_physical else forward_transform(fld).samples


def physical_samples(fld: ComplexField) -> np.ndarray:
    return fld.samples if fld.is_physical else inverse_transform(fld).samples


def tail_mass(fld: ComplexField) -> float:
    """Relative L^2 mass in the outer 10% of the box, |x| >= 0.45 L.

    The monitor converts silent aliasing under dispersive spreading into an
    explicit domain-escape signal.
    """
    if not fld.is_physical:
        raise ValidationError("tail_mass expects a physical-side field")
    g = fld.grid
    w = np.abs(fld.samples) ** 2
    total = float(np.sum(w))
    if total == 0.0:
        return 0.0
    outer = np.abs(g.x) >= 0.45 * g.domain_length
    return float(np.sum(w[outer]) / total)
