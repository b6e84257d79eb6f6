"""Compactly supported normalized test functions ("atoms").

An atom of radius r is supported in |x| <= r with sup norm at most
r^{-n}; first-kind atoms (r < 1) additionally have exactly zero mean.
First-kind atoms are realized as a discrete derivative of a smooth
bump, which makes the grid mean vanish identically (a sampled analytic
derivative would leave an aliasing-level moment residue instead).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .frame import smooth_step
from .grid import GridSpec, SampledField, lp_norm

__all__ = ["Atom", "make_atom", "validate_atom", "split_wide_bump"]


@dataclass
class Atom:
    kind: str  # "first" | "second"
    radius: float
    field: SampledField
    center: tuple = (0.0,)

    @property
    def samples(self) -> np.ndarray:
        return self.field.samples


def _bump(grid: GridSpec, radius: float, seed: int) -> np.ndarray:
    """Smooth nonnegative bump supported strictly inside |x| <= radius."""
    rng = np.random.default_rng(seed)
    rx = grid.radius_x()
    base = smooth_step(2.0 * (1.0 - rx / (0.92 * radius)))
    # mild seeded asymmetry so distinct seeds give distinct atoms
    wobble = 1.0 + 0.3 * rng.uniform(-1, 1) * np.sin(np.pi * grid.x_mesh()[0] / radius) * (rx < 0.9 * radius)
    return base * wobble


def make_atom(kind: str, r: float, grid: GridSpec, seed: int = 0) -> Atom:
    """Build an atom of the given kind and radius at the origin.

    First kind requires 0 < r < 1 and is a centered difference of a
    bump along the first axis (telescoping makes the grid mean exactly
    zero).  Second kind fixes r = 1 and is a plain bump.
    """
    n = grid.dim
    if kind == "second":
        if r != 1.0:
            raise ValueError("second-kind atoms have radius 1")
        vals = _bump(grid, 1.0, seed).astype(np.complex128)
    elif kind == "first":
        if not (0.0 < r < 1.0):
            raise ValueError(f"first-kind atoms need 0 < r < 1, got {r}")
        b = _bump(grid, r, seed)
        vals = (np.roll(b, -1, axis=0) - np.roll(b, 1, axis=0)).astype(np.complex128)
    else:
        raise ValueError(f"unknown atom kind {kind!r}")
    peak = np.abs(vals).max()
    if peak == 0:
        raise ValueError("degenerate atom profile")
    vals *= r**-n / peak
    return Atom(kind=kind, radius=r, field=SampledField(grid, vals, "space"), center=(0.0,) * n)


def validate_atom(f: SampledField, kind: str, r: float, center=None, tol: float = 1e-12) -> dict:
    """Check support, sup bound, and (first kind) zero mean.

    Returns a diagnostics dict with ``ok``, per-check values, and the
    worst violation.
    """
    g = f.grid
    n = g.dim
    if center is None:
        center = (0.0,) * n
    xm = g.x_mesh()
    dist = np.sqrt(sum((xm[i] - center[i]) ** 2 for i in range(n))) if n == 2 else np.abs(xm[0] - center[0])
    outside = np.abs(f.samples)[dist > r * (1 + 1e-9) + g.dx]
    support_leak = float(outside.max()) if outside.size else 0.0
    sup_excess = float(max(0.0, lp_norm(f, np.inf) - r**-n * (1 + 1e-12)))
    mean = abs(np.sum(f.samples) * g.cell_volume())
    checks = {"support_leak": support_leak, "sup_excess": sup_excess, "mean": float(mean)}
    ok = support_leak <= tol and sup_excess <= tol
    if kind == "first":
        ok = ok and mean <= tol
    checks["ok"] = bool(ok)
    checks["worst"] = float(max(support_leak, sup_excess, mean if kind == "first" else 0.0))
    return checks


def split_wide_bump(f: SampledField, r: float) -> list:
    """Split a radius-r >= 1 bump into unit-radius atoms on a uniform cell grid.

    Cells of side <= 1 tile the support; each piece, recentered at its
    cell midpoint, satisfies the unit-radius atom bounds whenever the
    original satisfies them at radius r.  The pieces sum back to f
    exactly.
    """
    if r < 1.0:
        raise ValueError("splitting applies to radius >= 1")
    g = f.grid
    if g.dim != 1:
        raise NotImplementedError("splitting is implemented for 1-D grids")
    x = g.axis_x()
    edges = np.arange(-np.ceil(r), np.ceil(r) + 1)  # unit cells covering [-r, r]
    pieces = []
    for lo in edges[:-1]:
        mask = (x >= lo) & (x < lo + 1.0)
        vals = np.where(mask, f.samples, 0.0)
        if np.abs(vals).max() == 0:
            continue
        pieces.append((float(lo + 0.5), SampledField(g, vals, "space")))
    return pieces
