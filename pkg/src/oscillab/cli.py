"""Command-line entry point: configuration, grid sizing, and experiment runs.

Config files are flat ``key = value`` text with optional ``[section]``
headers and ``#`` comments; command-line flags override file values.
The grid-sizing rule lives here (see :func:`plan_grid`): the resolved
band must exceed the largest touched frequency by a safety margin, and
the period must contain the kernels' spatial spread, which sits at
|x| ~ 2^{-j(1-s)} for s < 1 but grows like 2^{j(s-1)} for s > 1.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import experiments as xp
from .atoms import make_atom
from .frame import build_aux_cutoffs, build_frame
from .grid import AliasingError, GridSpec, fit_dyadic_slope
from .kernels import compute_Hj, compute_Kj
from .operators import goal_sum
from .reporting import ExperimentReport, render_slope_figure, write_csv, write_kernel_dump, write_report
from .symbols import coifman_meyer_decompose, critical_order, elliptic_symbol, separable_expand

EXPERIMENTS = ("kernel", "scaling", "necessity", "decompose", "lemmas", "goal-sum")

_MAX_POINTS = 2**24


class ConfigError(ValueError):
    pass


def _next_pow2(x: float) -> int:
    return 1 << int(np.ceil(np.log2(max(2.0, x))))


def plan_grid(s: float, j_max: float, n: int = 1, margin: float = 2.2, kind: str = "window", period: float | None = None, points: int | None = None) -> GridSpec:
    """Choose (L, N) for experiments touching dyadic scales up to j_max.

    Band: cutoffs dilated by 2^{j_max} reach frequency 3 * 2^{j_max};
    N is the smallest power of two with pi N / L >= margin * band.

    Period: for s < 1 all kernels concentrate at |x| <= O(1), so a
    fixed L = 32 holds every window and tail to well under 1e-6 of
    wrap-around mass.  For s > 1 the spread grows: windows reach
    b * 2^{j_max (s-1)} ("window" kind) and the high-pass kernels carry
    mass out to s 8^{s-1} 2^{j_max(s-1)} ("kernel" kind); L is sized to
    3x that spread.  Explicit period/points override the rule.
    """
    band = 3.0 * 2.0**j_max
    if period is None:
        if s < 1.0:
            period = 32.0
        else:
            e = s - 1.0
            spread = (s * 4.0**e if kind == "window" else s * 8.0**e) * 2.0 ** (j_max * e)
            period = 3.0 * max(spread, 8.0)
    if points is None:
        points = _next_pow2(margin * band * period / np.pi)
    if points**n > _MAX_POINTS:
        raise ConfigError(
            f"grid of {points}^{n} points exceeds the {_MAX_POINTS} budget; lower j_max or supply L, N"
        )
    return GridSpec(dim=n, period=float(period), points=int(points))


def _parse_scalar(text: str):
    t = text.strip()
    if t.lower() in ("inf", "infinity"):
        return np.inf
    try:
        return int(t)
    except ValueError:
        pass
    try:
        return float(t)
    except ValueError:
        return t


def parse_config_file(path: Path) -> dict:
    """Flat key = value lines; [section] headers only group visually."""
    out = {}
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line or (line.startswith("[") and line.endswith("]")):
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected 'key = value', got {raw!r}")
        key, val = (part.strip() for part in line.split("=", 1))
        out[key.replace("-", "_")] = val
    return out


def parse_j_range(text: str) -> list:
    """'6..11' -> [6..11]; '4,6,8' -> [4, 6, 8]."""
    t = str(text).strip()
    if ".." in t:
        lo, hi = t.split("..", 1)
        return list(range(int(lo), int(hi) + 1))
    return [int(x) for x in t.split(",") if x.strip()]


def _build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="oscillab", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)
    run = sub.add_parser("run", help="run an experiment from a config file and/or flags")
    run.add_argument("target", help="config file path or experiment name")
    run.add_argument("--experiment", choices=EXPERIMENTS)
    run.add_argument("--s", type=float)
    run.add_argument("--n", type=int)
    run.add_argument("--p")
    run.add_argument("--q")
    run.add_argument("--region")
    run.add_argument("--m", type=float)
    run.add_argument("--j", help="range like 6..11 or list like 4,6,8")
    run.add_argument("--L", type=float, help="override grid period")
    run.add_argument("--N", type=int, help="override grid points")
    run.add_argument("--family")
    run.add_argument("--symbol", help="decompose built-in: elliptic or constant")
    run.add_argument("--symbol-order", type=float)
    run.add_argument("--radius", type=float, help="atom radius for goal-sum")
    run.add_argument("--uv", help="goal-sum piece pair, e.g. SS or ST")
    run.add_argument("--lattice-radius", type=int)
    run.add_argument("--out", default="out")
    run.add_argument("--seed", type=int)
    run.add_argument("--figures", action=argparse.BooleanOptionalAction, default=True)
    return ap


_DEFAULTS = {"s": 0.5, "n": 1, "seed": 0, "figures": True, "out": "out"}


def _resolve(args) -> dict:
    cfg = dict(_DEFAULTS)
    target = args.target
    if Path(target).is_file():
        cfg.update(parse_config_file(Path(target)))
    elif target in EXPERIMENTS:
        cfg["experiment"] = target
    else:
        raise ConfigError(f"target {target!r} is neither a config file nor one of {EXPERIMENTS}")
    for key in ("experiment", "s", "n", "p", "q", "region", "m", "j", "L", "N", "family",
                "symbol", "symbol_order", "radius", "uv", "lattice_radius", "out", "seed", "figures"):
        val = getattr(args, key, None)
        if val is not None:
            cfg[key] = val
    if "experiment" not in cfg:
        raise ConfigError("no experiment selected")
    if cfg["experiment"] not in EXPERIMENTS:
        raise ConfigError(f"unknown experiment {cfg['experiment']!r}")
    for key in ("s", "m", "L", "radius", "symbol_order"):
        if key in cfg and isinstance(cfg[key], str):
            cfg[key] = float(cfg[key])
    for key in ("n", "N", "seed", "lattice_radius"):
        if key in cfg and isinstance(cfg[key], str):
            cfg[key] = int(cfg[key])
    for key in ("p", "q"):
        if key in cfg and isinstance(cfg[key], str):
            cfg[key] = _parse_scalar(cfg[key])
    if isinstance(cfg.get("figures"), str):
        cfg["figures"] = cfg["figures"].lower() in ("1", "true", "yes", "on")
    return cfg


def _emit(report: ExperimentReport, outdir: Path, figures: bool) -> Path:
    outdir.mkdir(parents=True, exist_ok=True)
    stem = outdir / report.experiment
    write_report(report, stem.with_suffix(".json"))
    for label, rep, _tol in report.reports:
        safe = label.replace("/", "_").replace(" ", "_")
        write_csv(rep, outdir / f"{report.experiment}_{safe}.csv")
        if figures:
            render_slope_figure(label, rep, outdir / f"{report.experiment}_{safe}.png")
    return stem.with_suffix(".json")


def _default_j(cfg, s: float) -> list:
    if "j" in cfg:
        return parse_j_range(cfg["j"])
    return list(range(12, 18)) if s < 1.0 else list(range(3, 9))


def _run_necessity(cfg) -> ExperimentReport:
    s, n = cfg["s"], cfg["n"]
    region = cfg.get("region", "I")
    p, q = cfg.get("p", np.inf), cfg.get("q", np.inf)
    js = _default_j(cfg, s)
    ncfg = xp.NecessityConfig(region=region, s=s, n=n, p=p, q=q, j_values=js, m=cfg.get("m"))
    grid = plan_grid(s, max(js), n=n, kind="window", period=cfg.get("L"), points=cfg.get("N"))
    frame = build_frame()
    aux = build_aux_cutoffs(frame)
    rep = xp.run_necessity(ncfg, frame, aux, grid)
    params = {"region": region, "p": str(p), "q": str(q), "m": ncfg.m,
              "critical_order": critical_order(s, n, p, q), "grid": {"L": grid.period, "N": grid.points}}
    return ExperimentReport("necessity", s, n, params, [(f"ratio_{region}", rep, 0.2)])


def _run_kernel(cfg, outdir: Path) -> ExperimentReport:
    s, n = cfg["s"], cfg["n"]
    js = _default_j(cfg, s)
    grid = plan_grid(s, max(js), n=n, kind="kernel", period=cfg.get("L"), points=cfg.get("N"))
    frame = build_frame()
    pairs_h, pairs_k = [], []
    last = None
    for j in js:
        H = compute_Hj(s, j, frame, grid)
        K = compute_Kj(s, j, frame, grid)
        mask = H.window.window_mask(grid, j, primed=True)
        pairs_h.append((j, float(np.abs(H.samples[mask]).max())))
        pairs_k.append((j, float(np.sum(np.abs(K.samples)) * grid.cell_volume())))
        last = (H, K)
    write_kernel_dump(last[0], outdir / f"Hj_s{s:g}_j{js[-1]}")
    write_kernel_dump(last[1], outdir / f"Kj_s{s:g}_j{js[-1]}")
    rep_h = fit_dyadic_slope(pairs_h, predicted_slope=n - n * s / 2.0)
    rep_k = fit_dyadic_slope(pairs_k, predicted_slope=s * n / 2.0)
    w = last[0].window
    params = {"grid": {"L": grid.period, "N": grid.points},
              "window": {"a": w.a, "b": w.b, "a_prime": w.a_prime, "b_prime": w.b_prime}}
    return ExperimentReport("kernel", s, n, params,
                            [("window_max", rep_h, 0.1), ("Kj_L1", rep_k, 0.15)])


def _run_scaling(cfg) -> ExperimentReport:
    s, n = cfg["s"], cfg["n"]
    family = cfg.get("family", "f_minus")
    js = _default_j(cfg, s)
    scale_rate = 1.0 - s if family == "g_nec" else 1.0
    grid = plan_grid(s, scale_rate * max(js), n=n, kind="window", period=cfg.get("L"), points=cfg.get("N"))
    frame = build_frame()
    fam = xp.build_test_family(family, s, frame, grid)
    reports = []
    for p in (1.0, 2.0, np.inf):
        rep = xp.family_norm_report(fam, p, js)
        reports.append((f"{family}_p{p:g}", rep, 0.1))
    params = {"family": family, "grid": {"L": grid.period, "N": grid.points}}
    return ExperimentReport("scaling", s, n, params, reports)


def _run_decompose(cfg) -> ExperimentReport:
    s, n = cfg["s"], cfg["n"]
    m = cfg.get("symbol_order", -0.5)
    js = _default_j(cfg, s)
    radius = cfg.get("lattice_radius", 16)
    frame = build_frame()
    aux = build_aux_cutoffs(frame)
    name = cfg.get("symbol", "elliptic")
    if name == "elliptic":
        sigma = elliptic_symbol(m, n=1)
    elif name == "constant":
        from .symbols import constant_symbol

        sigma = constant_symbol(1.0, n=1)
        m = 0.0
    else:
        raise ConfigError(f"unknown symbol {name!r} (built-ins: elliptic, constant)")
    dec = coifman_meyer_decompose(sigma, frame, max(js))
    pairs_c, resids = [], []
    for b in dec.blocks_I:
        if b.j not in js:
            continue
        ex = separable_expand(b, lattice_radius=radius, aux=aux)
        pairs_c.append((b.j, float(np.abs(ex.coeffs).max())))
        resids.append((b.j, ex.truncation_residual, ex.residual_scale))
    rep_c = fit_dyadic_slope(pairs_c, predicted_slope=m)
    params = {"symbol_order": m, "lattice_radius": radius,
              "residuals": [{"j": j, "abs": r, "scale": sc} for j, r, sc in resids]}
    return ExperimentReport("decompose", s, n, params, [("max_coeff", rep_c, 0.35)])


def _run_goal_sum(cfg) -> ExperimentReport:
    s, n = cfg["s"], cfg["n"]
    js = parse_j_range(cfg["j"]) if "j" in cfg else list(range(4, 11))
    mcrit = -s * n / 2.0 - s * (1.0 - s) * n / 2.0 if s < 1.0 else -s * n / 2.0
    m = cfg.get("m", mcrit)
    uv = tuple(cfg.get("uv", "SS"))
    radius = cfg.get("radius", 0.25)
    grid = plan_grid(s, max(js), n=n, kind="window", period=cfg.get("L"), points=cfg.get("N"))
    frame = build_frame()
    atom = make_atom("first" if radius < 1 else "second", radius, grid, seed=cfg.get("seed", 0))
    res = goal_sum(s, m, frame.phi, frame.phi, atom, js, frame, UV=uv)
    rep_sum = fit_dyadic_slope(res.summand_pairs())
    rep_run = fit_dyadic_slope(res.running_pairs())
    params = {"m": m, "critical_order": mcrit, "uv": "".join(uv), "radius": radius,
              "running_total": res.running[-1], "grid": {"L": grid.period, "N": grid.points}}
    return ExperimentReport("goal-sum", s, n, params,
                            [("summand", rep_sum, None), ("running_sum", rep_run, None)])


def _run_lemmas(cfg) -> ExperimentReport:
    s, n = cfg["s"], cfg["n"]
    js = parse_j_range(cfg["j"]) if "j" in cfg else list(range(4, 11))
    grid = plan_grid(s, max(js), n=n, kind="kernel", period=cfg.get("L"), points=cfg.get("N"))
    frame = build_frame()
    suite = xp.LemmaSuite(s, frame, grid)
    reports = []
    for p in (1.0, 2.0, np.inf):
        rep = suite.sj_lp_ratios(p, js)
        reports.append((f"Sj_Lp_ratio_p{p:g}", rep, None))
    atom = make_atom("first", 0.25, grid)
    consts = {
        "t_farfield": suite.t_farfield(atom),
        "sj_l2_t0": suite.sj_l2_atom_constants(atom, js, t=0.0),
        "sj_l2_t1": suite.sj_l2_atom_constants(atom, js, t=1.0),
    }
    if s < 1.0:
        consts["sj_outside_l1"] = suite.sj_outside_l1(atom, js)
    params = {"grid": {"L": grid.period, "N": grid.points}, "constants": consts}
    return ExperimentReport("lemmas", s, n, params, reports)


def run(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        cfg = _resolve(args)
        outdir = Path(cfg["out"])
        exp = cfg["experiment"]
        if exp == "necessity":
            report = _run_necessity(cfg)
        elif exp == "kernel":
            outdir.mkdir(parents=True, exist_ok=True)
            report = _run_kernel(cfg, outdir)
        elif exp == "scaling":
            report = _run_scaling(cfg)
        elif exp == "decompose":
            report = _run_decompose(cfg)
        elif exp == "goal-sum":
            report = _run_goal_sum(cfg)
        elif exp == "lemmas":
            report = _run_lemmas(cfg)
        else:  # pragma: no cover
            raise ConfigError(f"unhandled experiment {exp}")
        report.config = {k: (str(v) if isinstance(v, float) and np.isinf(v) else v)
                         for k, v in sorted(cfg.items())}
        path = _emit(report, outdir, cfg["figures"])
        status = "pass" if report.passed() else "check"
        print(f"[{status}] {exp}: wrote {path}")
        return 0
    except (ConfigError, AliasingError, ValueError) as err:
        print(f"error: {err}", file=sys.stderr)
        return 1


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
