"""Periodic grids, Fourier transforms, norms, and dyadic slope fits.

Everything downstream runs on a uniform periodic grid standing in for
R^n (n = 1 or 2).  The transform pair used throughout is

    fhat(xi) = int e^{-i xi.x} f(x) dx,
    f(x)     = (2 pi)^{-n} int e^{i xi.x} fhat(xi) dxi,

realized as scaled FFTs, so measured norms are directly comparable to
analytic scaling exponents without normalization fudge factors.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field

import numpy as np
import scipy.fft as sfft

__all__ = [
    "GridSpec",
    "SampledField",
    "ScalingReport",
    "AliasingError",
    "forward_ft",
    "inverse_ft",
    "lp_norm",
    "bmo_estimate",
    "fit_dyadic_slope",
]

_WORKERS = int(os.environ.get("OSCILLAB_WORKERS", "0")) or (os.cpu_count() or 1)


class AliasingError(ValueError):
    """A requested frequency band exceeds the grid's resolved range."""


def _is_pow2(n: int) -> bool:
    return n >= 1 and (n & (n - 1)) == 0


@dataclass(frozen=True)
class GridSpec:
    """Uniform periodic grid on [-L/2, L/2)^n with N samples per axis.

    N must be a power of two.  The largest reliably represented
    frequency is ``max_resolved_freq = pi N / L``; callers that place
    energy at frequency B should keep ``margin * B <= max_resolved_freq``
    with margin >= 2 (enforced by :meth:`check_band`).
    """

    dim: int
    period: float
    points: int

    def __post_init__(self):
        if self.dim not in (1, 2):
            raise ValueError(f"dim must be 1 or 2, got {self.dim}")
        if self.period <= 0:
            raise ValueError("period must be positive")
        if not _is_pow2(self.points):
            raise ValueError(f"points must be a power of two, got {self.points}")

    @property
    def dx(self) -> float:
        return self.period / self.points

    @property
    def dxi(self) -> float:
        return 2.0 * np.pi / self.period

    @property
    def max_resolved_freq(self) -> float:
        return np.pi * self.points / self.period

    def axis_x(self) -> np.ndarray:
        n = self.points
        return (np.arange(n) - n // 2) * self.dx

    def axis_xi(self) -> np.ndarray:
        n = self.points
        return (np.arange(n) - n // 2) * self.dxi

    def x_mesh(self):
        """Coordinate arrays; a tuple of ``dim`` broadcastable arrays."""
        a = self.axis_x()
        if self.dim == 1:
            return (a,)
        return (a[:, None], a[None, :])

    def xi_mesh(self):
        a = self.axis_xi()
        if self.dim == 1:
            return (a,)
        return (a[:, None], a[None, :])

    def radius_x(self) -> np.ndarray:
        if self.dim == 1:
            return np.abs(self.axis_x())
        xm = self.x_mesh()
        return np.hypot(xm[0], xm[1])

    def radius_xi(self) -> np.ndarray:
        if self.dim == 1:
            return np.abs(self.axis_xi())
        xim = self.xi_mesh()
        return np.hypot(xim[0], xim[1])

    def check_band(self, band: float, margin: float = 2.0) -> None:
        """Raise :class:`AliasingError` unless margin*band fits the grid."""
        if margin * band > self.max_resolved_freq * (1 + 1e-12):
            raise AliasingError(
                f"band {band:g} with margin {margin:g} exceeds resolved "
                f"frequency {self.max_resolved_freq:g} (N={self.points}, L={self.period:g})"
            )

    def cell_volume(self) -> float:
        return self.dx**self.dim


@dataclass
class SampledField:
    """Complex samples on a grid, tagged as space- or frequency-domain."""

    grid: GridSpec
    samples: np.ndarray
    domain: str  # "space" | "frequency"

    def __post_init__(self):
        if self.domain not in ("space", "frequency"):
            raise ValueError(f"bad domain tag {self.domain!r}")
        want = (self.grid.points,) * self.grid.dim
        if self.samples.shape != want:
            raise ValueError(f"samples shape {self.samples.shape} != grid shape {want}")
        self.samples = np.ascontiguousarray(self.samples, dtype=np.complex128)
        self.samples.setflags(write=False)

    def copy_with(self, samples: np.ndarray, domain: str | None = None) -> "SampledField":
        return SampledField(self.grid, samples, domain or self.domain)


def _require(fieldv: SampledField, domain: str):
    if fieldv.domain != domain:
        raise ValueError(f"expected a {domain}-domain field, got {fieldv.domain}")


def forward_ft(f: SampledField) -> SampledField:
    """Transform space -> frequency (Riemann-sum scaling dx^n)."""
    _require(f, "space")
    g = f.grid
    axes = tuple(range(g.dim))
    out = sfft.fftshift(
        sfft.fftn(sfft.ifftshift(f.samples, axes=axes), axes=axes, workers=_WORKERS),
        axes=axes,
    )
    return SampledField(g, out * g.cell_volume(), "frequency")


def inverse_ft(F: SampledField) -> SampledField:
    """Transform frequency -> space ((2 pi)^{-n} dxi^n scaling)."""
    _require(F, "frequency")
    g = F.grid
    axes = tuple(range(g.dim))
    out = sfft.fftshift(
        sfft.ifftn(sfft.ifftshift(F.samples, axes=axes), axes=axes, workers=_WORKERS),
        axes=axes,
    )
    return SampledField(g, out / g.cell_volume(), "space")


def lp_norm(f: SampledField, p: float) -> float:
    """Grid L^p norm, 1 <= p <= inf (sup norm is the grid max)."""
    _require(f, "space")
    if p < 1:
        raise ValueError(f"lp_norm requires p >= 1, got {p}")
    a = np.abs(f.samples)
    if np.isinf(p):
        return float(a.max())
    return float((np.sum(a**p) * f.grid.cell_volume()) ** (1.0 / p))


def bmo_estimate(f: SampledField) -> float:
    """Dyadic mean-oscillation sup: a coarse lower bound for the BMO norm.

    Scans all dyadic cells of side >= 4 dx that tile the grid and
    returns the largest mean |f - mean_Q f| over a cell.  Only slopes
    in j of this estimator are meaningful, never absolute values.
    """
    _require(f, "space")
    a = f.samples.real if np.allclose(f.samples.imag, 0) else np.abs(f.samples)
    n = f.grid.points
    best = 0.0
    c = 4
    while c <= n:
        if f.grid.dim == 1:
            m = a.reshape(n // c, c)
            mu = m.mean(axis=1, keepdims=True)
            osc = np.abs(m - mu).mean(axis=1).max()
        else:
            m = a.reshape(n // c, c, n // c, c)
            mu = m.mean(axis=(1, 3), keepdims=True)
            osc = np.abs(m - mu).mean(axis=(1, 3)).max()
        best = max(best, float(osc))
        c *= 2
    return best


@dataclass
class ScalingReport:
    """Least-squares fit of log2(measured) against the dyadic index j."""

    j_values: list = field(default_factory=list)
    measured: list = field(default_factory=list)
    fitted_slope: float = np.nan
    intercept: float = np.nan
    max_residual: float = np.nan
    predicted_slope: float | None = None

    def to_dict(self) -> dict:
        d = {
            "j_values": [float(j) for j in self.j_values],
            "measured": [float(v) for v in self.measured],
            "fitted_slope": float(self.fitted_slope),
            "intercept": float(self.intercept),
            "max_residual": float(self.max_residual),
        }
        if self.predicted_slope is not None:
            d["predicted_slope"] = float(self.predicted_slope)
        return d


def fit_dyadic_slope(pairs, predicted_slope: float | None = None) -> ScalingReport:
    """Fit log2(value) = intercept + slope * j over (j, value) pairs.

    Requires at least 4 pairs with positive values.
    """
    pairs = list(pairs)
    if len(pairs) < 4:
        raise ValueError(f"need at least 4 (j, value) pairs, got {len(pairs)}")
    js = np.array([float(j) for j, _ in pairs])
    vals = np.array([float(v) for _, v in pairs])
    if np.any(vals <= 0) or not np.all(np.isfinite(vals)):
        raise ValueError("values must be positive and finite")
    logv = np.log2(vals)
    slope, intercept = np.polyfit(js, logv, 1)
    resid = np.abs(logv - (intercept + slope * js)).max()
    return ScalingReport(
        j_values=list(js),
        measured=list(vals),
        fitted_slope=float(slope),
        intercept=float(intercept),
        max_residual=float(resid),
        predicted_slope=predicted_slope,
    )
