"""Oscillatory kernels: dyadically windowed inverses of e^{i|xi|^s}.

Three kernels recur: the annular-window kernel H_j (inverse transform
of e^{i|xi|^s} psi(2^{-j} xi)), the high-pass kernel K_j (zeta times a
dilated cutoff), and the low-frequency kernel L.  The production path
samples the symbol on the frequency grid and inverse-transforms; the
independent oracle evaluates the defining integral by oscillation-
resolved composite Gauss-Legendre panels and shares no code with the
FFT path.

For x != 0 the phase 2^{j(1-s)} x.eta + |eta|^s has a unique stationary
point eta0 with |eta0|^{s-1} = 2^{j(1-s)}|x|/s, opposite in direction
to x; the kernel is large exactly when eta0 falls near the cutoff's
annulus, which happens on the window  a <= 2^{j(1-s)}|x| <= b  with
a = s 4^{-|1-s|}, b = s 4^{|1-s|}.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import j0 as bessel_j0

from .frame import LPFrame, eval_cutoff
from .grid import GridSpec, SampledField, inverse_ft

__all__ = [
    "WindowConstants",
    "KernelRecord",
    "StationaryData",
    "compute_Hj",
    "compute_Kj",
    "compute_L",
    "shell_split",
    "oracle_kernel",
    "oracle_Hj",
    "compute_Hj_radial",
    "stationary_point",
    "stationary_phase_leading",
    "classify_decay_region",
]


@dataclass(frozen=True)
class WindowConstants:
    """Decay-window constants for a given phase exponent s."""

    s: float
    a: float
    b: float
    a_prime: float
    b_prime: float

    @classmethod
    def for_s(cls, s: float) -> "WindowConstants":
        if s <= 0 or s == 1.0:
            raise ValueError("s must lie in (0,1) or (1,inf)")
        e = abs(1.0 - s)
        w = cls(s=s, a=s * 4.0**-e, b=s * 4.0**e, a_prime=s * 1.5**-e, b_prime=s * 1.5**e)
        assert w.a < w.a_prime < w.b_prime < w.b
        return w

    def window_mask(self, grid: GridSpec, j: float, primed: bool = True) -> np.ndarray:
        """Boolean mask of grid points with 2^{j(1-s)}|x| inside the window."""
        w = 2.0 ** (j * (1.0 - self.s)) * grid.radius_x()
        lo, hi = (self.a_prime, self.b_prime) if primed else (self.a, self.b)
        return (w >= lo) & (w <= hi)


@dataclass
class KernelRecord:
    kind: str  # "H_j" | "K_j" | "L"
    s: float
    j: int
    field: SampledField
    window: WindowConstants

    @property
    def samples(self) -> np.ndarray:
        return self.field.samples


def _osc(r: np.ndarray, s: float) -> np.ndarray:
    return np.exp(1j * r**s)


def compute_Hj(s: float, j: int, frame: LPFrame, grid: GridSpec) -> KernelRecord:
    """H_j = inverse transform of e^{i|xi|^s} psi(2^{-j} xi)."""
    cut = eval_cutoff(frame, "psi", grid, scale=float(j))
    r = grid.radius_xi()
    sym = SampledField(grid, _osc(r, s) * cut.samples, "frequency")
    return KernelRecord("H_j", s, j, inverse_ft(sym), WindowConstants.for_s(s))


def compute_Kj(
    s: float,
    j: int,
    frame: LPFrame,
    grid: GridSpec,
    theta=None,
) -> KernelRecord:
    """K_j = inverse transform of e^{i|xi|^s} zeta(xi) theta(2^{-j} xi).

    theta defaults to the frame's phi (supported in radius 2, equal to
    one out to half its support), matching the high-pass pieces used by
    the linear operators.
    """
    theta = theta or frame.phi
    grid.check_band(2.0 * 2.0**j)
    r = grid.radius_xi()
    sym = SampledField(grid, _osc(r, s) * frame.zeta(r) * theta(r / 2.0**j), "frequency")
    return KernelRecord("K_j", s, j, inverse_ft(sym), WindowConstants.for_s(s))


def compute_L(s: float, frame: LPFrame, grid: GridSpec, theta=None) -> KernelRecord:
    """L = inverse transform of e^{i|xi|^s} theta(xi), supp theta in radius 2."""
    theta = theta or frame.phi
    r = grid.radius_xi()
    sym = SampledField(grid, _osc(r, s) * theta(r), "frequency")
    return KernelRecord("L", s, 0, inverse_ft(sym), WindowConstants.for_s(s))


def shell_split(s: float, j: int, frame: LPFrame, grid: GridSpec, theta=None) -> list:
    """Dyadic shells K_{k,j}, k = 1..j+1, whose sum reproduces K_j."""
    theta = theta or frame.phi
    r = grid.radius_xi()
    out = []
    for k in range(1, j + 2):
        sym = SampledField(
            grid, _osc(r, s) * frame.psi(r / 2.0**k) * theta(r / 2.0**j), "frequency"
        )
        out.append((k, inverse_ft(sym)))
    return out


# ---------------------------------------------------------------------------
# quadrature oracle

_GL_X, _GL_W = np.polynomial.legendre.leggauss(10)


def _panel_quad(fun, lo: float, hi: float, max_dphase: float, phase_budget: float = np.pi / 2):
    """Composite 10-point Gauss-Legendre with phase-resolved panels.

    Panel width is chosen so the integrand's phase advances at most
    ``phase_budget`` radians per panel (10-point panels integrate such
    slowly-turning oscillations to near machine precision).
    """
    span = hi - lo
    panels = int(max(24, np.ceil(span * max_dphase / phase_budget)))
    edges = np.linspace(lo, hi, panels + 1)
    half = 0.5 * (edges[1] - edges[0])
    mid = 0.5 * (edges[1:] + edges[:-1])
    nodes = (mid[:, None] + half * _GL_X[None, :]).ravel()
    weights = np.broadcast_to(half * _GL_W[None, :], (panels, _GL_X.size)).ravel()
    return np.sum(fun(nodes) * weights)


def oracle_kernel(s: float, x, profile, support: tuple, dim: int = 1) -> complex:
    """Direct quadrature of (e^{i|xi|^s} profile(|xi|))^{inverse} at one point.

    ``profile`` is the radial frequency cutoff, supported in
    ``support = (lo, hi)``.  For dim 1 the angular reduction gives
    (1/2 pi) int 2 cos(xi x) e^{i xi^s} profile(xi) dxi; for dim 2 it is
    the order-zero Hankel transform (1/2 pi) int J0(xi |x|) e^{i xi^s}
    profile(xi) xi dxi.  Shares no code with the FFT path.
    """
    lo, hi = support
    xr = float(np.linalg.norm(np.atleast_1d(x)))
    dphase = s * max(lo ** (s - 1.0), hi ** (s - 1.0)) + xr
    if dim == 1:

        def fun(xi):
            return np.exp(1j * xi**s) * 2.0 * np.cos(xi * xr) * profile(xi)

        return _panel_quad(fun, lo, hi, dphase) / (2.0 * np.pi)
    if dim == 2:

        def fun(xi):
            return np.exp(1j * xi**s) * bessel_j0(xi * xr) * profile(xi) * xi

        return _panel_quad(fun, lo, hi, dphase) / (2.0 * np.pi)
    raise ValueError("dim must be 1 or 2")


def oracle_Hj(s: float, j: float, x, frame: LPFrame, dim: int = 1) -> complex:
    return oracle_kernel(s, x, frame.psi_scaled(float(j)), (2.0 ** (j - 1), 2.0 ** (j + 1)), dim=dim)


def compute_Hj_radial(s: float, j: int, frame: LPFrame, grid: GridSpec, n_radii: int = 1024) -> KernelRecord:
    """H_j on a 2-D grid via radial Hankel quadrature plus interpolation.

    Large planar grids make the direct 2-D FFT memory-prohibitive; the
    kernel is radial, so it is evaluated on a 1-D radius table by the
    Hankel-form oracle and interpolated onto the grid.  The 2-D FFT
    path is retained as a coarse-resolution cross-check in the tests.
    """
    if grid.dim != 2:
        raise ValueError("compute_Hj_radial needs a 2-D grid")
    rx = grid.radius_x()
    radii = np.linspace(0.0, rx.max() * (1 + 1e-9), n_radii)
    prof = frame.psi_scaled(float(j))
    table = np.array([oracle_kernel(s, r, prof, (2.0 ** (j - 1), 2.0 ** (j + 1)), dim=2) for r in radii])
    vals = np.interp(rx, radii, table.real) + 1j * np.interp(rx, radii, table.imag)
    return KernelRecord("H_j", s, j, SampledField(grid, vals, "space"), WindowConstants.for_s(s))


# ---------------------------------------------------------------------------
# stationary phase


@dataclass
class StationaryData:
    x: np.ndarray
    eta0: np.ndarray
    phase_at_crit: float
    hessian_det: float


def stationary_point(s: float, j: float, x) -> StationaryData:
    """Critical point of the rescaled phase 2^{j(1-s)} x.eta + |eta|^s.

    eta0 points opposite to x with |eta0|^{s-1} = 2^{j(1-s)} |x| / s.
    The reported phase is 2^{js} times the phase value there, which
    collapses to the scale-free  |x|^{s/(s-1)} s^{-s/(s-1)} (1-s).
    """
    xv = np.atleast_1d(np.asarray(x, dtype=float))
    xr = float(np.linalg.norm(xv))
    if xr == 0.0:
        raise ValueError("no stationary point at x = 0")
    n = xv.size
    mag = (2.0 ** (j * (1.0 - s)) * xr / s) ** (1.0 / (s - 1.0))
    eta0 = -xv / xr * mag
    phase = xr ** (s / (s - 1.0)) * s ** (-s / (s - 1.0)) * (1.0 - s)
    det = s**n * (s - 1.0) * mag ** ((s - 2.0) * n)
    return StationaryData(x=xv, eta0=eta0, phase_at_crit=phase, hessian_det=det)


def hessian_signature(s: float, n: int) -> int:
    """Signature of the Hessian of |xi|^s: n-2 below s=1, n above."""
    return n - 2 if s < 1.0 else n


def stationary_phase_leading(
    s: float, j: float, x, frame: LPFrame, dim: int = 1, support_pad: float = 1.1
) -> complex:
    """Leading stationary-phase value of H_j(x).

    Zero (by convention) when eta0 falls outside the padded cutoff
    support [1/(2 pad), 2 pad]; the pad keeps the formula from being
    trusted where the critical point has left the annulus.
    """
    sd = stationary_point(s, j, x)
    mag = float(np.linalg.norm(sd.eta0))
    if not (0.5 / support_pad <= mag <= 2.0 * support_pad):
        return 0.0 + 0.0j
    n = dim
    sig = hessian_signature(s, n)
    amp = (2.0 * np.pi) ** (-n / 2.0) * (s**n * abs(s - 1.0) * mag ** ((s - 2.0) * n)) ** -0.5
    return (
        amp
        * np.exp(1j * sd.phase_at_crit)
        * np.exp(1j * np.pi * sig / 4.0)
        * frame.psi(mag)
        * 2.0 ** (j * (n - n * s / 2.0))
    )


def classify_decay_region(s: float, j: float, x) -> str:
    """'inner', 'window', or 'outer' by comparing 2^{j(1-s)}|x| with [a, b]."""
    w = WindowConstants.for_s(s)
    t = 2.0 ** (j * (1.0 - s)) * float(np.linalg.norm(np.atleast_1d(x)))
    if t < w.a:
        return "inner"
    if t > w.b:
        return "outer"
    return "window"
