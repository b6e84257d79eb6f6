"""Exponent-region geometry, symbol classes, and dyadic symbol expansions.

The (p, q) square [1, inf]^2 is split into six regions on which the
critical symbol order takes different closed forms; symbols themselves
are bivariate functions sigma(xi, eta) with a declared decay order m,
checked numerically via finite differences.  The dyadic decomposition
splits a symbol into a low block plus two families of annular blocks,
and each block can be expanded into separable modulated-cutoff terms
with rapidly decaying coefficients.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np
import scipy.fft as sfft

from .frame import AuxCutoffs, LPFrame
from .grid import GridSpec

__all__ = [
    "REGIONS",
    "classify_region",
    "critical_order",
    "SymbolSpec",
    "SeparableTerm",
    "SeparableSymbol",
    "elliptic_symbol",
    "constant_symbol",
    "build_necessity_symbol",
    "verify_symbol_class",
    "split_frequency_quadrants",
    "coifman_meyer_decompose",
    "CMBlock",
    "CMDecomposition",
    "separable_expand",
    "SeparableExpansion",
]

_TOL = 1e-12


def _inv(p: float) -> float:
    """1/p with the conventions 1/inf = 0."""
    if np.isinf(p):
        return 0.0
    return 1.0 / p


# region label -> membership predicate on (u, v) = (1/p, 1/q)
REGIONS = {
    "I": lambda u, v: u <= 0.5 + _TOL and v <= 0.5 + _TOL,
    "II": lambda u, v: u >= 0.5 - _TOL and v >= 0.5 - _TOL,
    "III": lambda u, v: u >= 0.5 - _TOL and v <= 0.5 + _TOL and u + v <= 1.0 + _TOL,
    "IV": lambda u, v: u >= 0.5 - _TOL and v <= 0.5 + _TOL and u + v >= 1.0 - _TOL,
    "V": lambda u, v: u <= 0.5 + _TOL and v >= 0.5 - _TOL and u + v <= 1.0 + _TOL,
    "VI": lambda u, v: u <= 0.5 + _TOL and v >= 0.5 - _TOL and u + v >= 1.0 - _TOL,
}


def classify_region(p: float, q: float) -> set:
    """All regions containing (1/p, 1/q); boundaries belong to every neighbor."""
    for name, val in (("p", p), ("q", q)):
        if not (1.0 <= val or np.isinf(val)):
            raise ValueError(f"{name} must satisfy 1 <= {name} <= inf, got {val}")
        if np.isfinite(val) and val < 1.0:
            raise ValueError(f"{name} out of range: {val}")
    u, v = _inv(p), _inv(q)
    out = {label for label, pred in REGIONS.items() if pred(u, v)}
    assert out, "the six regions cover the square"
    return out


def _order_branch(region: str, s: float, n: int, u: float, v: float) -> float:
    du, dv = abs(u - 0.5), abs(v - 0.5)
    if region in ("I", "II"):
        return -n * s * (du + dv)
    if s < 1.0:
        if region in ("III", "VI"):
            return -n * s * (1.0 - s) * du - n * s * dv
        return -n * s * du - n * s * (1.0 - s) * dv  # IV, V
    if region in ("III", "VI"):
        return -n * s * dv
    return -n * s * du  # IV, V


def critical_order(s: float, n: int, p: float, q: float) -> float:
    """The critical symbol order m_s(p, q).

    Evaluates every region containing (1/p, 1/q) and asserts that the
    branches agree on shared boundaries before returning the value.
    """
    if s <= 0 or s == 1.0:
        raise ValueError(f"s must lie in (0,1) or (1,inf), got {s}")
    regions = classify_region(p, q)
    u, v = _inv(p), _inv(q)
    vals = [_order_branch(r, s, n, u, v) for r in sorted(regions)]
    if max(vals) - min(vals) > 1e-10:
        raise AssertionError(f"branch mismatch at (p,q)=({p},{q}): {dict(zip(sorted(regions), vals))}")
    return vals[0]


# ---------------------------------------------------------------------------
# symbol specifications


@dataclass
class SymbolSpec:
    """A bivariate symbol sigma(xi, eta) with a declared order.

    ``evaluator`` takes (xi, eta) as broadcastable arrays of radial
    coordinates for n = 1 (signed reals) and returns complex values.
    For n = 2 the evaluator takes ((xi1, xi2), (eta1, eta2)) tuples.
    """

    evaluator: Callable
    order: float
    n: int = 1
    name: str = "symbol"

    def __call__(self, xi, eta):
        return self.evaluator(xi, eta)


@dataclass(frozen=True)
class SeparableTerm:
    """coefficient * u(xi) * v(eta), with radial-profile factors dilated by 2^scale.

    The optional modulations (a, b) multiply the factors by
    e^{i a 2^{-scale} xi} and e^{i b 2^{-scale} eta} (per axis for n=2).
    """

    coeff: complex
    u_profile: Callable  # radial profile of |xi|
    v_profile: Callable
    scale: float = 0.0
    a: float = 0.0
    b: float = 0.0

    def u_values(self, xi):
        d = 2.0**self.scale
        vals = self.u_profile(np.abs(xi) / d)
        if self.a != 0.0:
            vals = vals * np.exp(1j * self.a * xi / d)
        return vals

    def v_values(self, eta):
        d = 2.0**self.scale
        vals = self.v_profile(np.abs(eta) / d)
        if self.b != 0.0:
            vals = vals * np.exp(1j * self.b * eta / d)
        return vals


@dataclass
class SeparableSymbol:
    """A finite sum of separable terms; evaluable like a SymbolSpec."""

    terms: list
    order: float = 0.0
    n: int = 1
    name: str = "separable"

    def __call__(self, xi, eta):
        out = 0.0 + 0.0j
        for t in self.terms:
            out = out + t.coeff * t.u_values(xi) * t.v_values(eta)
        return out

    @property
    def evaluator(self):
        return self.__call__


def elliptic_symbol(m: float, n: int = 1) -> SymbolSpec:
    """(1 + |xi|^2 + |eta|^2)^{m/2}: the standard order-m elliptic symbol."""

    def ev(xi, eta):
        if n == 1:
            r2 = np.asarray(xi) ** 2 + np.asarray(eta) ** 2
        else:
            r2 = sum(np.asarray(c) ** 2 for c in xi) + sum(np.asarray(c) ** 2 for c in eta)
        return (1.0 + r2) ** (m / 2.0) + 0.0j

    return SymbolSpec(ev, order=m, n=n, name=f"elliptic[{m:g}]")


def constant_symbol(value: complex = 1.0, n: int = 1) -> SymbolSpec:
    def ev(xi, eta):
        shape = np.broadcast(np.asarray(xi if n == 1 else xi[0]), np.asarray(eta if n == 1 else eta[0])).shape
        return np.full(shape, value, dtype=np.complex128)

    return SymbolSpec(ev, order=0.0, n=n, name="constant")


def build_necessity_symbol(s: float, m: float, j: int, aux: AuxCutoffs, n: int = 1) -> SeparableSymbol:
    """Rank-one test symbol 2^{jm} theta(2^{-j} xi) phi_nec(2^{-j} eta)."""
    term = SeparableTerm(coeff=2.0 ** (j * m), u_profile=aux.theta, v_profile=aux.phi_nec, scale=float(j))
    return SeparableSymbol(terms=[term], order=m, n=n, name=f"necessity[j={j},m={m:g}]")


# ---------------------------------------------------------------------------
# symbol-class verification


def _mixed_fd(ev, x, y, ax, bx, h):
    """Central binomial-stencil estimate of d^ax_x d^by_y ev at (x, y)."""
    from math import comb

    ii = np.arange(ax + 1)
    jj = np.arange(bx + 1)
    wi = np.array([(-1) ** i * comb(ax, i) for i in ii], dtype=float)
    wj = np.array([(-1) ** j * comb(bx, j) for j in jj], dtype=float)
    ox = (ax / 2.0 - ii) * h
    oy = (bx / 2.0 - jj) * h
    vals = ev(x + ox[:, None], y + oy[None, :])
    acc = (wi[:, None] * wj[None, :] * vals).sum()
    return acc / h ** (ax + bx)


def verify_symbol_class(
    spec: SymbolSpec,
    order: float | None = None,
    max_order: int = 4,
    freq_max: float = 1024.0,
    freq_min: float = 1.0,
    samples: int = 24,
    rel_step: float = 1e-3,
) -> dict:
    """Estimate the worst constants C_{alpha,beta} of the decay class.

    Samples (xi, eta) on a signed log-spaced set over
    [freq_min, freq_max], forms central differences with relative step
    rel_step*(1+|xi|+|eta|) per derivative, and reports

        sup |d^alpha_xi d^beta_eta sigma| / (1+|xi|+|eta|)^(m-|alpha|-|beta|)

    per multi-index pair up to total order ``max_order`` (n = 1 only).
    Passes iff every constant is finite.  When comparing dilated symbols
    across scales, scale freq_min and freq_max together so the relative
    sample positions stay fixed.
    """
    if spec.n != 1:
        raise NotImplementedError("symbol-class verification is implemented for n = 1")
    m = spec.order if order is None else order
    mags = np.geomspace(freq_min, freq_max, samples // 2)
    coords = np.concatenate([-mags[::-1], [0.0], mags])
    pts = [(x, y) for x in coords for y in coords]
    constants = {}
    for ax in range(max_order + 1):
        for bx in range(max_order + 1 - ax):
            worst = 0.0
            for x, y in pts:
                h = rel_step * (1.0 + abs(x) + abs(y))
                val = _mixed_fd(spec.evaluator, x, y, ax, bx, h)
                weight = (1.0 + abs(x) + abs(y)) ** (m - ax - bx)
                worst = max(worst, abs(val) / weight)
            if not np.isfinite(worst):
                raise FloatingPointError(f"derivative ({ax},{bx}) estimate not finite")
            constants[(ax, bx)] = worst
    return constants


# ---------------------------------------------------------------------------
# quadrant splitting


def split_frequency_quadrants(spec: SymbolSpec, s: float, frame: LPFrame):
    """Split e^{i(|xi|^s+|eta|^s)} sigma into four low/high quadrant pieces.

    Returns (tau1, tau2, tau3, tau4) with phi/zeta attached to each
    variable in turn; their pointwise sum is the full oscillatory symbol.
    """

    def osc(r):
        return np.exp(1j * np.abs(r) ** s)

    def make(fx, fy, tag):
        def ev(xi, eta):
            xi = np.asarray(xi, dtype=float)
            eta = np.asarray(eta, dtype=float)
            return (
                osc(xi) * fx(np.abs(xi)) * osc(eta) * fy(np.abs(eta)) * spec.evaluator(xi, eta)
            )

        return SymbolSpec(ev, order=spec.order, n=spec.n, name=f"{spec.name}/{tag}")

    return (
        make(frame.phi, frame.phi, "tau1"),
        make(frame.zeta, frame.phi, "tau2"),
        make(frame.phi, frame.zeta, "tau3"),
        make(frame.zeta, frame.zeta, "tau4"),
    )


# ---------------------------------------------------------------------------
# dyadic decomposition and separable expansion


@dataclass
class CMBlock:
    """One dyadic block sigma * ucut(xi) * vcut(eta) at scale j."""

    kind: str  # "low" | "I" | "II"
    j: int
    base: SymbolSpec
    u_profile: Callable
    u_scale: float
    v_profile: Callable
    v_scale: float

    def __call__(self, xi, eta):
        return (
            self.base.evaluator(xi, eta)
            * self.u_profile(np.abs(xi) / 2.0**self.u_scale)
            * self.v_profile(np.abs(eta) / 2.0**self.v_scale)
        )


@dataclass
class CMDecomposition:
    low: CMBlock
    blocks_I: list
    blocks_II: list

    def reconstruction(self, xi, eta):
        out = self.low(xi, eta)
        for b in self.blocks_I:
            out = out + b(xi, eta)
        for b in self.blocks_II:
            out = out + b(xi, eta)
        return out

    def all_blocks(self):
        return [self.low, *self.blocks_I, *self.blocks_II]


def coifman_meyer_decompose(spec: SymbolSpec, frame: LPFrame, j_max: int, grid: GridSpec | None = None) -> CMDecomposition:
    """sigma = sigma*phi*phi + sum_j sigma*psi_j(xi)*phi_j(eta) + sum_k sigma*phi_{k-1}(xi)*psi_k(eta).

    The sum of all blocks telescopes back to sigma for frequencies up to
    2^{j_max}; pass a grid to enforce the aliasing bound on j_max.
    """
    if spec.n != 1:
        raise NotImplementedError("decomposition blocks are implemented for n = 1")
    if grid is not None:
        grid.check_band(2.0 ** (j_max + 1))
    low = CMBlock("low", 0, spec, frame.phi, 0.0, frame.phi, 0.0)
    blocks_I = [CMBlock("I", j, spec, frame.psi, float(j), frame.phi, float(j)) for j in range(1, j_max + 1)]
    blocks_II = [
        CMBlock("II", k, spec, frame.phi, float(k - 1), frame.psi, float(k)) for k in range(1, j_max + 1)
    ]
    return CMDecomposition(low=low, blocks_I=blocks_I, blocks_II=blocks_II)


@dataclass
class SeparableExpansion:
    """Truncated separable expansion of one dyadic block.

    terms reconstruct  sum c_{ab} e^{i a xi'} e^{i b eta'} ucut(xi') vcut(eta')
    at xi' = 2^{-j} xi, i.e. each term is a modulated dilated cutoff.
    """

    block: CMBlock
    terms: list  # SeparableTerm, modulations on the unit lattice
    lattice_radius: int
    coeffs: np.ndarray  # full coefficient table, index [a + M/2, b + M/2]
    coeff_offset: int
    truncation_residual: float
    residual_scale: float  # sup |block| over the probe set used for the residual

    def coefficient(self, a: int, b: int) -> complex:
        return self.coeffs[a + self.coeff_offset, b + self.coeff_offset]

    def shell_max(self, r: int, axis: int = 0) -> float:
        """max |c_{ab}| over the shell |a| = r (axis 0) or |b| = r (axis 1)."""
        c = self.coeffs if axis == 0 else self.coeffs.T
        o = self.coeff_offset
        rows = []
        for sgn in (-r, r):
            if 0 <= sgn + o < c.shape[0]:
                rows.append(np.abs(c[sgn + o]).max())
        return max(rows)

    def as_symbol(self) -> SeparableSymbol:
        return SeparableSymbol(terms=list(self.terms), order=self.block.base.order, n=1, name="expansion")

    def reconstruct_at(self, xi, eta) -> np.ndarray:
        """Evaluate the truncated expansion at points (vectorized over terms)."""
        j = self.block.u_scale if self.block.kind != "II" else self.block.v_scale
        d = 2.0**j
        R = self.lattice_radius
        o = self.coeff_offset
        lat = np.arange(-R, R + 1)
        C = self.coeffs[np.ix_(lat + o, lat + o)]
        U = np.exp(1j * np.outer(lat, np.asarray(xi) / d))
        V = np.exp(1j * np.outer(lat, np.asarray(eta) / d))
        series = np.einsum("ab,ap,bp->p", C, U, V)
        if self.block.kind == "II":
            ucut = self.block.u_profile(np.abs(xi) / 2.0**self.block.u_scale)
        else:
            ucut = self.block.u_profile(np.abs(xi) / d)
        vcut = self.block.v_profile(np.abs(eta) / 2.0**self.block.v_scale)
        return series * ucut * vcut


def separable_expand(
    block: CMBlock,
    lattice_radius: int = 16,
    cell_points: int = 512,
    aux: AuxCutoffs | None = None,
    probe_points: int = 4096,
    seed: int = 0,
) -> SeparableExpansion:
    """Expand a rescaled, window-multiplied block into lattice modes.

    The block at scale j is rescaled by 2^{-j} so its cutoffs occupy
    radius <= 2 < pi; multiplied by the finite-order windows that equal
    one there (supported in radius 3 < pi); and expanded in a Fourier
    series on the periodic cell (-pi, pi)^2.  Coefficients come from a
    cell_points^2 DFT (unaliased well past the truncation radius); terms
    keep |a|, |b| <= lattice_radius.  The truncation residual is the sup
    of |block - partial sum * cutoffs| over a random probe set inside
    the block's support, reported in absolute terms together with the
    block's own sup on the same probes.
    """
    if block.base.n != 1:
        raise NotImplementedError("separable expansion is implemented for n = 1")
    if aux is None:
        from .frame import build_aux_cutoffs, build_frame

        aux = build_aux_cutoffs(build_frame())
    M = cell_points
    if 2 * lattice_radius >= M // 2:
        raise ValueError("cell_points too small for the requested lattice radius")
    j = block.u_scale if block.kind != "II" else block.v_scale
    d = 2.0**j

    # windows that equal 1 on the rescaled cutoff supports
    if block.kind == "low":
        uwin, vwin = aux.tilde_phi, aux.tilde_phi
    elif block.kind == "I":
        uwin, vwin = aux.tilde_psi, aux.tilde_phi
    else:  # II: u-cutoff is phi at scale j-1 -> support radius 1 after rescale by 2^j
        uwin, vwin = aux.tilde_phi, aux.tilde_psi

    cell = -np.pi + 2.0 * np.pi * np.arange(M) / M
    XI, ETA = cell[:, None], cell[None, :]
    F = block.base.evaluator(d * XI, d * ETA) * uwin(np.abs(XI)) * vwin(np.abs(ETA))
    coeffs = sfft.fftshift(sfft.fft2(sfft.ifftshift(F))) / M**2
    o = M // 2

    terms = []
    R = lattice_radius
    for a in range(-R, R + 1):
        for b in range(-R, R + 1):
            c = coeffs[a + o, b + o]
            terms.append(
                SeparableTerm(
                    coeff=c,
                    u_profile=block.u_profile if block.kind != "II" else _dilated(block.u_profile, block.u_scale - j),
                    v_profile=block.v_profile,
                    scale=j,
                    a=float(a),
                    b=float(b),
                )
            )

    # probe the reconstruction against direct evaluation inside the support
    rng = np.random.default_rng(seed)
    if block.kind == "I":
        uabs = rng.uniform(0.5, 2.0, probe_points) * d
    elif block.kind == "II":
        uabs = rng.uniform(0.0, 2.0 ** (block.u_scale + 1), probe_points)
    else:
        uabs = rng.uniform(0.0, 2.0, probe_points)
    if block.kind == "II":
        vabs = rng.uniform(0.5, 2.0, probe_points) * d
    else:
        vabs = rng.uniform(0.0, 2.0, probe_points) * (d if block.kind == "I" else 1.0)
    su = rng.choice([-1.0, 1.0], probe_points)
    sv = rng.choice([-1.0, 1.0], probe_points)
    xi_p, eta_p = su * uabs, sv * vabs
    direct = block(xi_p, eta_p)

    out = SeparableExpansion(
        block=block,
        terms=terms,
        lattice_radius=R,
        coeffs=coeffs,
        coeff_offset=o,
        truncation_residual=0.0,
        residual_scale=0.0,
    )
    approx = out.reconstruct_at(xi_p, eta_p)
    out.truncation_residual = float(np.abs(direct - approx).max())
    out.residual_scale = float(np.abs(direct).max())
    return out


def _dilated(prof: Callable, extra_scale: float) -> Callable:
    d = 2.0**extra_scale
    return lambda r: prof(np.asarray(r) / d)
