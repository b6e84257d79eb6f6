"""Dyadic frequency cutoffs: the radial frame phi/psi/zeta and helpers.

The frame is built from a smooth step so that

    phi = 1 on |xi| <= 1,  supp phi in |xi| <= 2,
    psi = phi - phi(2 .),  supp psi in 1/2 <= |xi| <= 2,
    zeta = 1 - phi,

which makes the telescoping identity sum_{j<=k} psi_j = phi_k exact by
construction (psi_0 := phi, psi_j = psi(2^{-j} .)).

Two step families are provided: the classic exp(-1/t) mollifier step
(infinitely smooth; used for the frame and the kernel-side cutoffs) and
polynomial smoothsteps of a chosen order (used where a *finite*
smoothness order is wanted, e.g. to realize a prescribed Fourier
coefficient decay rate in separable expansions).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.special import betainc

from .grid import GridSpec, SampledField

__all__ = [
    "smooth_step",
    "poly_step",
    "LPFrame",
    "AuxCutoffs",
    "build_frame",
    "build_aux_cutoffs",
    "eval_cutoff",
]


def smooth_step(t):
    """C-infinity step: 0 for t <= 0, 1 for t >= 1, strictly monotone between."""
    t = np.clip(np.asarray(t, dtype=float), 0.0, 1.0)
    with np.errstate(divide="ignore", over="ignore", invalid="ignore"):
        a = np.where(t > 0, np.exp(-1.0 / np.maximum(t, 1e-300)), 0.0)
        b = np.where(t < 1, np.exp(-1.0 / np.maximum(1.0 - t, 1e-300)), 0.0)
    return a / (a + b)


def poly_step(order: int) -> Callable:
    """C^order polynomial step on [0, 1] (regularized incomplete beta)."""
    if order < 1:
        raise ValueError("order must be >= 1")

    def step(t):
        return betainc(order + 1, order + 1, np.clip(np.asarray(t, dtype=float), 0.0, 1.0))

    return step


def _window(step: Callable, lo0: float, lo1: float, hi0: float, hi1: float) -> Callable:
    """Radial window: 0 below lo0 and above hi1, 1 on [lo1, hi0]."""

    def prof(r):
        r = np.asarray(r, dtype=float)
        up = step((r - lo0) / (lo1 - lo0)) if lo1 > lo0 else np.ones_like(r)
        dn = 1.0 - step((r - hi0) / (hi1 - hi0))
        return up * dn

    return prof


@dataclass(frozen=True)
class LPFrame:
    """Radial profiles of the dyadic frame, as callables of r = |xi|."""

    phi: Callable
    psi: Callable
    zeta: Callable
    smoothness_order: int  # continuous derivatives available for FD checks

    def psi_scaled(self, t: float) -> Callable:
        """psi(2^{-t} .); t may be any nonnegative real."""
        return lambda r: self.psi(np.asarray(r) / 2.0**t)

    def phi_scaled(self, t: float) -> Callable:
        return lambda r: self.phi(np.asarray(r) / 2.0**t)


@dataclass(frozen=True)
class AuxCutoffs:
    """Auxiliary radial cutoffs used by the expansion and the test symbols.

    theta    : 1 on [1/2, 2],  supported in [1/3, 3]
    phi_nec  : 1 on [0, 2],    supported in [0, 3]
    psi_nec  : the frame psi (nonzero on [2/3, 3/2] by construction)
    tilde_psi: 1 on [1/2, 2],  supported in [1/3, 3] (finite-order step)
    tilde_phi: 1 on [0, 2],    supported in [0, 3]   (finite-order step)
    """

    theta: Callable
    phi_nec: Callable
    psi_nec: Callable
    tilde_psi: Callable
    tilde_phi: Callable
    tilde_order: int


class FrameConstructionError(ValueError):
    pass


def _check_profile(name, prof, ones, zeros, samples=2048):
    """Verify identity/support regions pointwise on dense radial probes."""
    for lo, hi in ones:
        r = np.linspace(lo, hi, samples)
        if not np.allclose(prof(r), 1.0, atol=1e-12):
            raise FrameConstructionError(f"{name} != 1 on [{lo}, {hi}]")
    for lo, hi in zeros:
        r = np.linspace(lo, hi, samples)
        if np.abs(prof(r)).max() > 1e-300:
            raise FrameConstructionError(f"{name} != 0 on [{lo}, {hi}]")


def build_frame(step: Callable = smooth_step, smoothness_order: int = 8) -> LPFrame:
    """Build the radial frame from a monotone smooth step on [0, 1].

    The transition of phi occupies the full annulus 1 <= r <= 2.  The
    step is validated for monotonicity; identity and support regions,
    the psi support, and psi > 0 on [2/3, 3/2] are verified at build.
    """
    t = np.linspace(0.0, 1.0, 4097)
    st = np.asarray(step(t))
    if st[0] != 0.0 or st[-1] != 1.0 or np.any(np.diff(st) < -1e-15):
        raise FrameConstructionError("step must rise monotonically from 0 to 1")

    def phi(r):
        return 1.0 - step(np.asarray(r, dtype=float) - 1.0)

    def psi(r):
        r = np.asarray(r, dtype=float)
        return phi(r) - phi(2.0 * r)

    def zeta(r):
        return 1.0 - phi(r)

    _check_profile("phi", phi, ones=[(0.0, 1.0)], zeros=[(2.0, 64.0)])
    _check_profile("psi", psi, ones=[], zeros=[(0.0, 0.5), (2.0, 64.0)])
    r = np.linspace(2.0 / 3.0, 1.5, 1024)
    if np.min(psi(r)) <= 0:
        raise FrameConstructionError("psi must be strictly positive on [2/3, 3/2]")
    return LPFrame(phi=phi, psi=psi, zeta=zeta, smoothness_order=smoothness_order)


def build_aux_cutoffs(frame: LPFrame, tilde_order: int = 4) -> AuxCutoffs:
    """Build the auxiliary cutoffs.

    theta and phi_nec reuse the frame's step family (maximal smoothness:
    they feed oscillatory kernels whose decay checks push to high
    derivative order).  The tilde pair uses a polynomial step of
    ``tilde_order`` so its Fourier coefficients decay at a known finite
    polynomial rate.
    """
    exp_step = smooth_step
    fin_step = poly_step(tilde_order)
    theta = _window(exp_step, 1.0 / 3.0, 0.5, 2.0, 3.0)
    phi_nec = _window(exp_step, 0.0, 0.0, 2.0, 3.0)
    tilde_psi = _window(fin_step, 1.0 / 3.0, 0.5, 2.0, 3.0)
    tilde_phi = _window(fin_step, 0.0, 0.0, 2.0, 3.0)

    _check_profile("theta", theta, ones=[(0.5, 2.0)], zeros=[(0.0, 1.0 / 3.0), (3.0, 64.0)])
    _check_profile("phi_nec", phi_nec, ones=[(0.0, 2.0)], zeros=[(3.0, 64.0)])
    _check_profile("tilde_psi", tilde_psi, ones=[(0.5, 2.0)], zeros=[(0.0, 1.0 / 3.0), (3.0, 64.0)])
    _check_profile("tilde_phi", tilde_phi, ones=[(0.0, 2.0)], zeros=[(3.0, 64.0)])
    r = np.linspace(2.0 / 3.0, 1.5, 512)
    assert np.min(frame.psi(r)) > 0
    return AuxCutoffs(
        theta=theta,
        phi_nec=phi_nec,
        psi_nec=frame.psi,
        tilde_psi=tilde_psi,
        tilde_phi=tilde_phi,
        tilde_order=tilde_order,
    )


# outer support radius (in units of the dilation scale) per cutoff name
_SUPPORT_RADIUS = {
    "phi": 2.0,
    "psi": 2.0,
    "theta": 3.0,
    "phi_nec": 3.0,
    "psi_nec": 2.0,
    "tilde_psi": 3.0,
    "tilde_phi": 3.0,
}


def eval_cutoff(
    frame: LPFrame,
    which: str,
    grid: GridSpec,
    scale: float = 0.0,
    aux: AuxCutoffs | None = None,
    margin: float = 2.0,
) -> SampledField:
    """Sample a dilated cutoff ``prof(2^{-scale} |xi|)`` on the frequency grid.

    Raises AliasingError when the dilated support would exceed the
    grid's resolved band (with the stated safety margin), which is what
    prevents silently aliased dyadic pieces.  ``scale`` may be any
    nonnegative real; ``zeta`` ignores the scale and is exempt from the
    aliasing guard (it multiplies already band-limited data).
    """
    if which == "zeta":
        prof = frame.zeta
    elif which in ("phi", "psi"):
        prof = getattr(frame, which)
    else:
        if aux is None:
            raise ValueError(f"cutoff {which!r} needs aux cutoffs")
        prof = getattr(aux, which)
    if which != "zeta":
        if scale < 0:
            raise ValueError("scale must be >= 0")
        grid.check_band(_SUPPORT_RADIUS[which] * 2.0**scale, margin=margin)
        vals = prof(grid.radius_xi() / 2.0**scale)
    else:
        vals = prof(grid.radius_xi())
    return SampledField(grid, vals.astype(np.complex128), "frequency")
