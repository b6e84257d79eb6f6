"""Linear multiplier pieces and the bilinear oscillatory operator.

The linear pieces are Fourier multipliers built from the oscillation
e^{i|xi|^s}, a low/high split (phi or zeta), and a dilated cutoff:

    S_j: e^{i|xi|^s} zeta(xi) theta(2^{-j} xi)
    T  : e^{i|xi|^s} theta(xi)
    T_j: e^{i|xi|^s} phi(xi)  theta(2^{-j} xi)

The bilinear operator applies sigma(xi, eta) e^{i(|xi|^s+|eta|^s)} to a
pair (f, g).  The production path requires sigma in separable form (a
sum of products), which reduces to products of linear multipliers; a
dense direct-summation path exists purely as a cross-validation oracle
on small grids.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .frame import LPFrame
from .grid import GridSpec, SampledField, forward_ft, inverse_ft, lp_norm
from .symbols import SeparableSymbol, SymbolSpec

__all__ = [
    "LinearPiece",
    "make_Sj",
    "make_T",
    "make_Tj",
    "apply_linear",
    "apply_bilinear",
    "four_product_split",
    "goal_sum",
    "GoalSumResult",
]


@dataclass
class LinearPiece:
    kind: str  # "S_j" | "T" | "T_j"
    s: float
    j: float
    frame: LPFrame
    theta: Callable  # radial cutoff profile, dilated by 2^j for S_j/T_j

    def symbol_values(self, grid: GridSpec) -> np.ndarray:
        r = grid.radius_xi()
        osc = np.exp(1j * r**self.s)
        if self.kind == "S_j":
            return osc * self.frame.zeta(r) * self.theta(r / 2.0**self.j)
        if self.kind == "T_j":
            return osc * self.frame.phi(r) * self.theta(r / 2.0**self.j)
        if self.kind == "T":
            return osc * self.theta(r)
        raise ValueError(f"unknown piece kind {self.kind!r}")


def make_Sj(s: float, j: float, frame: LPFrame, theta: Callable | None = None) -> LinearPiece:
    return LinearPiece("S_j", s, j, frame, theta or frame.phi)


def make_Tj(s: float, j: float, frame: LPFrame, theta: Callable | None = None) -> LinearPiece:
    return LinearPiece("T_j", s, j, frame, theta or frame.phi)


def make_T(s: float, frame: LPFrame, theta: Callable | None = None) -> LinearPiece:
    return LinearPiece("T", s, 0.0, frame, theta or frame.phi)


def apply_linear(piece: LinearPiece, f: SampledField) -> SampledField:
    """inverse_ft(symbol * forward_ft(f)); enforces the aliasing bound."""
    grid = f.grid
    if piece.kind in ("S_j", "T_j"):
        grid.check_band(2.0 * 2.0**piece.j)
    F = forward_ft(f)
    return inverse_ft(F.copy_with(piece.symbol_values(grid) * F.samples))


def _multiplier_apply(values: np.ndarray, fhat: SampledField) -> SampledField:
    return inverse_ft(fhat.copy_with(values * fhat.samples))


def apply_bilinear(
    sigma,
    s: float,
    f: SampledField,
    g: SampledField,
    oscillation: bool = True,
    dense_max_points: int = 4096,
) -> SampledField:
    """Apply the bilinear multiplier sigma (optionally with oscillation).

    Separable sigma (SeparableSymbol) runs through products of linear
    multipliers.  A plain SymbolSpec triggers the dense direct-sum path,
    refused above ``dense_max_points`` grid points per axis; expand the
    symbol separably instead of raising the cap.
    """
    grid = f.grid
    if grid is not g.grid and grid != g.grid:
        raise ValueError("f and g must share a grid")
    r = grid.radius_xi()
    osc = np.exp(1j * r**s) if oscillation else np.ones_like(r, dtype=np.complex128)
    fhat = forward_ft(f)
    ghat = forward_ft(g)

    if isinstance(sigma, SeparableSymbol):
        out = np.zeros_like(f.samples)
        xi = grid.axis_xi() if grid.dim == 1 else None
        for t in sigma.terms:
            if grid.dim == 1:
                uv = t.u_values(xi)
                vv = t.v_values(xi)
            else:
                uv = t.u_profile(grid.radius_xi() / 2.0**t.scale)
                vv = t.v_profile(grid.radius_xi() / 2.0**t.scale)
                if t.a != 0.0 or t.b != 0.0:
                    raise NotImplementedError("modulated terms are 1-D only")
            uf = _multiplier_apply(osc * uv, fhat)
            vg = _multiplier_apply(osc * vv, ghat)
            out = out + t.coeff * uf.samples * vg.samples
        return SampledField(grid, out, "space")

    if not isinstance(sigma, SymbolSpec):
        raise TypeError(f"unsupported symbol type {type(sigma)!r}")
    if grid.dim != 1:
        raise NotImplementedError("dense path is 1-D only")
    if grid.points > dense_max_points:
        raise ValueError(
            f"dense bilinear path refused on N={grid.points} > {dense_max_points}; "
            "expand the symbol separably"
        )
    # direct double Riemann sum over the supports of fhat and ghat
    xi = grid.axis_xi()
    x = grid.axis_x()
    fh = osc * fhat.samples
    gh = osc * ghat.samples
    irows = np.nonzero(np.abs(fh) > 1e-300)[0]
    jcols = np.nonzero(np.abs(gh) > 1e-300)[0]
    out = np.zeros(grid.points, dtype=np.complex128)
    if irows.size and jcols.size:
        sig = sigma.evaluator(xi[irows][:, None], xi[jcols][None, :])
        inner = (sig * gh[jcols][None, :]) @ np.exp(1j * np.outer(xi[jcols], x))
        out = np.einsum("k,kx,kx->x", fh[irows], np.exp(1j * np.outer(xi[irows], x)), inner)
    out *= (grid.dxi / (2.0 * np.pi)) ** 2
    return SampledField(grid, out, "space")


def four_product_split(
    coeff: complex,
    theta1: Callable,
    theta2: Callable,
    s: float,
    j: float,
    frame: LPFrame,
    f: SampledField,
    g: SampledField,
) -> dict:
    """The four low/high products of a rank-one term at scale j.

    Keys "TT", "TS", "ST", "SS" hold T_j^1 f T_j^2 g etc.; their sum
    times coeff equals the bilinear operator applied to the term
    coeff * theta1(2^{-j} xi) theta2(2^{-j} eta) with oscillation on.
    """
    pieces = {
        "T1": make_Tj(s, j, frame, theta1),
        "S1": make_Sj(s, j, frame, theta1),
        "T2": make_Tj(s, j, frame, theta2),
        "S2": make_Sj(s, j, frame, theta2),
    }
    a = {k: apply_linear(p, f if k.endswith("1") else g) for k, p in pieces.items()}
    grid = f.grid
    return {
        "TT": SampledField(grid, a["T1"].samples * a["T2"].samples, "space"),
        "TS": SampledField(grid, a["T1"].samples * a["S2"].samples, "space"),
        "ST": SampledField(grid, a["S1"].samples * a["T2"].samples, "space"),
        "SS": SampledField(grid, a["S1"].samples * a["S2"].samples, "space"),
    }


@dataclass
class GoalSumResult:
    j_values: list
    summands: list  # 2^{jm} ||U_j f * V_j g||_1, maximized over the g sweep
    running: list

    def summand_pairs(self):
        return list(zip(self.j_values, self.summands))

    def running_pairs(self):
        return list(zip(self.j_values, self.running))


def modulated_plateau(grid: GridSpec, omega: float, width: float = 2.0) -> SampledField:
    """Height-one smooth plateau modulated at frequency omega (sup norm one)."""
    from .frame import smooth_step

    rx = grid.radius_x()
    prof = smooth_step(2.0 * (1.0 - rx / width))
    xm = grid.x_mesh()[0]
    vals = prof * np.exp(1j * omega * xm)
    return SampledField(grid, vals.astype(np.complex128), "space")


def goal_sum(
    s: float,
    m: float,
    theta1: Callable,
    theta2: Callable,
    f_atom,
    j_values,
    frame: LPFrame,
    UV: tuple = ("S", "S"),
    omegas=None,
    g_width: float = 2.0,
) -> GoalSumResult:
    """Weighted product-norm sums 2^{jm} ||U_j^1 f V_j^2 g||_1 and partials.

    f must validate as an atom (checked by the caller); g sweeps over
    unit-sup-norm modulated plateaus, the modulation probing each dyadic
    shell, and each summand takes the worst sweep member.
    """
    U, V = UV
    if U not in ("S", "T") or V not in ("S", "T"):
        raise ValueError("UV entries must be 'S' or 'T'")
    grid = f_atom.field.grid
    if omegas is None:
        omegas = [0.0] + [1.5 * 2.0**j for j in j_values]
    g_fields = [modulated_plateau(grid, om, width=g_width) for om in omegas]
    mk = {"S": make_Sj, "T": make_Tj}
    summands = []
    for j in j_values:
        uf = apply_linear(mk[U](s, float(j), frame, theta1), f_atom.field)
        best = 0.0
        for g in g_fields:
            vg = apply_linear(mk[V](s, float(j), frame, theta2), g)
            val = lp_norm(SampledField(grid, uf.samples * vg.samples, "space"), 1.0)
            best = max(best, val)
        summands.append(2.0 ** (j * m) * best)
    running = list(np.cumsum(summands))
    return GoalSumResult(j_values=list(j_values), summands=summands, running=running)
