"""Command-line front end: solves, sweeps, studies, and file outputs.

Subcommands: shoot, curve, solution, energy, asymptotics, lambda0, report.
Configuration precedence is command-line flags over a key=value config file
over built-in defaults; the EFSHOOT_OUTDIR environment variable sets the
default output directory.  Numbers are serialized in scientific notation
with 12 significant digits and a NaN or Inf anywhere aborts the write.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from dataclasses import dataclass

import numpy as np

from .analysis import (energy, fit_power_law, lambda0_six,
                       lambda2_limit_study, slope_law_check,
                       slope_law_constant, surface_measure, t0_y0_asymptotics)
from .shooting import (ConfigurationError, NumericError, ShootingInput,
                       solve_shooting)
from .specfun import (BubbleSpec, DimensionParams, DomainError, bubble_eval,
                      radial_eigenvalue, sobolev_constant)
from .transform import (build_radial_profile, lambda_n_of_gamma,
                        rescale_positive_part, rescaled_eval)


@dataclass
class RunConfig:
    """Validated run settings; no solver code runs on an invalid config."""

    command: str
    dim: int = 6
    gamma: float | None = None
    gamma_min: float | None = None
    gamma_max: float | None = None
    points_per_decade: int = 12
    rel_tol: float = 1e-10
    abs_tol: float = 1e-12
    outdir: str = "."
    csv: bool = False
    json_out: bool = False
    plots: bool = False
    fast: bool = False

    def validate(self):
        if self.dim < 3 or self.dim > 7:
            raise ConfigurationError(f"dimension {self.dim} outside supported range 3..7")
        if self.gamma is not None and self.gamma <= 0.0:
            raise ConfigurationError(f"gamma={self.gamma} must be positive")
        for name in ("gamma_min", "gamma_max"):
            v = getattr(self, name)
            if v is not None and v <= 0.0:
                raise ConfigurationError(f"{name}={v} must be positive")
        if (self.gamma_min is not None and self.gamma_max is not None
                and self.gamma_min >= self.gamma_max):
            raise ConfigurationError("gamma-min must be below gamma-max")
        if self.points_per_decade < 1:
            raise ConfigurationError("points-per-decade must be >= 1")
        for name in ("rel_tol", "abs_tol"):
            v = getattr(self, name)
            if not (0.0 < v <= 1e-4):
                raise ConfigurationError(f"{name}={v} must lie in (0, 1e-4]")


def _fmt(x: float) -> str:
    """12 significant digits, scientific; refuses non-finite values."""
    if not math.isfinite(x):
        raise NumericError(f"non-finite value {x} reached serialization")
    return f"{x:.11e}"


def _round12(obj):
    """Recursively round floats to 12 significant digits for JSON output."""
    if isinstance(obj, float):
        return float(_fmt(obj))
    if isinstance(obj, dict):
        return {k: _round12(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_round12(v) for v in obj]
    return obj


def _write_json(path: str, kind: str, data: dict):
    doc = {"kind": kind, "data": _round12(data)}
    with open(path, "w") as fh:
        json.dump(doc, fh, indent=1, sort_keys=True)
        fh.write("\n")


def _write_csv(path: str, header: list, rows: list):
    with open(path, "w") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(_fmt(row[h]) for h in header) + "\n")


def _write_dat(path: str, col1, col2):
    with open(path, "w") as fh:
        for a, b in zip(col1, col2):
            fh.write(f"{_fmt(a)} {_fmt(b)}\n")


def _svg_plot(path: str, curves, xlabel: str, ylabel: str, logx=False, logy=False):
    """Minimal static SVG line chart; rendering kept deterministic."""
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    plt.rcParams["svg.hashsalt"] = "efshoot"
    fig, ax = plt.subplots(figsize=(5, 3.5))
    for x, y, label in curves:
        ax.plot(x, y, label=label)
    if logx:
        ax.set_xscale("log")
    if logy:
        ax.set_yscale("log")
    ax.set_xlabel(xlabel)
    ax.set_ylabel(ylabel)
    if len(curves) > 1:
        ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(path, format="svg", metadata={"Date": None})
    plt.close(fig)


def _gamma_grid(cfg: RunConfig):
    lo = cfg.gamma_min if cfg.gamma_min is not None else 1.0
    hi = cfg.gamma_max if cfg.gamma_max is not None else (1e3 if cfg.fast else 1e4)
    n = max(4, int(round(cfg.points_per_decade * math.log10(hi / lo))) + 1)
    return np.geomspace(lo, hi, n)


def _solve(cfg: RunConfig, gamma: float, n_zeros: int = 3):
    dim = DimensionParams.from_dimension(cfg.dim)
    return solve_shooting(ShootingInput(dim=dim, gamma=float(gamma),
                                        rel_tol=cfg.rel_tol, abs_tol=cfg.abs_tol,
                                        n_zeros=n_zeros))


def _curve_row(cfg: RunConfig, gamma: float) -> dict:
    dim = DimensionParams.from_dimension(cfg.dim)
    res = _solve(cfg, gamma)
    prof = build_radial_profile(dim, res, n_nodal=2)
    rep = energy(prof)
    return {
        "gamma": gamma,
        "lambda2": prof.lam,
        "T1": res.zeros[0],
        "T2": res.zeros[1],
        "t0": res.t0,
        "y0": res.y0,
        "r_node": prof.r_node,
        "s_min": prof.s_min,
        "M_plus": prof.M_plus,
        "M_minus": prof.M_minus,
        "J_plus": rep.J_plus,
        "J_minus": rep.J_minus,
    }


_CURVE_HEADER = ["gamma", "lambda2", "T1", "T2", "t0", "y0", "r_node",
                 "s_min", "M_plus", "M_minus", "J_plus", "J_minus"]


def emit_plot_data(table, kind: str, outdir: str, dim: int) -> list:
    """Two-column data files plus a small SVG per plot kind.

    Kinds: lambda2 (eigen-parameter curve with the first-eigenvalue
    reference line), overlay (rescaled positive part against the bubble),
    t1fit (largest zero against gamma on log-log axes).  An empty table
    writes nothing and reports a warning.
    """
    if not table:
        print("warning: empty table, no plot data written", file=sys.stderr)
        return []
    files = []
    if kind == "lambda2":
        g = [row["gamma"] for row in table]
        l2 = [row["lambda2"] for row in table]
        dat = os.path.join(outdir, f"lambda2_N{dim}.dat")
        _write_dat(dat, g, l2)
        svg = os.path.join(outdir, f"lambda2_N{dim}.svg")
        ref = radial_eigenvalue(DimensionParams.from_dimension(dim), 1)
        _svg_plot(svg, [(g, l2, "lambda2(gamma)"),
                        (g, [ref] * len(g), "lambda1(ball)")],
                  "gamma", "lambda2", logx=True)
        files += [dat, svg]
    elif kind == "overlay":
        rho = [row["rho"] for row in table]
        ut = [row["u_tilde"] for row in table]
        ub = [row["bubble"] for row in table]
        dat = os.path.join(outdir, f"profile_overlay_N{dim}.dat")
        _write_dat(dat, rho, ut)
        svg = os.path.join(outdir, f"profile_overlay_N{dim}.svg")
        _svg_plot(svg, [(rho, ut, "rescaled positive part"),
                        (rho, ub, "bubble")], "rho", "value")
        files += [dat, svg]
    elif kind == "t1fit":
        g = [row["gamma"] for row in table]
        t1 = [row["T1"] for row in table]
        dat = os.path.join(outdir, f"t1_fit_N{dim}.dat")
        _write_dat(dat, g, t1)
        svg = os.path.join(outdir, f"t1_fit_N{dim}.svg")
        _svg_plot(svg, [(g, t1, "T1(gamma)")], "gamma", "T1",
                  logx=True, logy=True)
        files += [dat, svg]
    else:
        raise ConfigurationError(f"unknown plot kind {kind!r}")
    return files


def _cmd_shoot(cfg: RunConfig) -> int:
    if cfg.gamma is None:
        raise ConfigurationError("shoot requires --gamma")
    res = _solve(cfg, cfg.gamma)
    data = {
        "dim": cfg.dim,
        "gamma": cfg.gamma,
        "T1": res.zeros[0],
        "T2": res.zeros[1],
        "T3": res.zeros[2] if len(res.zeros) > 2 else None,
        "t0": res.t0,
        "y0": res.y0,
        "slopes": list(res.slopes),
    }
    if data["T3"] is None:
        del data["T3"]
    if cfg.json_out:
        print(json.dumps({"kind": "shoot", "data": _round12(data)},
                         indent=1, sort_keys=True))
    else:
        for key in ("T1", "T2", "t0", "y0"):
            print(f"{key} = {_fmt(data[key])}")
        print("slopes = " + " ".join(_fmt(s) for s in data["slopes"]))
    return 0


def _cmd_curve(cfg: RunConfig) -> int:
    rows = [_curve_row(cfg, g) for g in _gamma_grid(cfg)]
    wrote = []
    if cfg.csv or not cfg.json_out:
        path = os.path.join(cfg.outdir, f"curve_N{cfg.dim}.csv")
        _write_csv(path, _CURVE_HEADER, rows)
        wrote.append(path)
    if cfg.json_out:
        path = os.path.join(cfg.outdir, f"curve_N{cfg.dim}.json")
        _write_json(path, "curve", {"dim": cfg.dim, "rows": rows})
        wrote.append(path)
    if cfg.plots:
        wrote += emit_plot_data(rows, "lambda2", cfg.outdir, cfg.dim)
        wrote += emit_plot_data(rows, "t1fit", cfg.outdir, cfg.dim)
    for path in wrote:
        print(path)
    return 0


def _cmd_solution(cfg: RunConfig) -> int:
    if cfg.gamma is None:
        raise ConfigurationError("solution requires --gamma")
    dim = DimensionParams.from_dimension(cfg.dim)
    res = _solve(cfg, cfg.gamma)
    prof = build_radial_profile(dim, res, n_nodal=2)
    rows = [{"r": r, "u": u, "u_prime": up}
            for r, u, up in zip(prof.r, prof.u, prof.u_prime)]
    path = os.path.join(cfg.outdir, f"solution_N{cfg.dim}.csv")
    _write_csv(path, ["r", "u", "u_prime"], rows)
    wrote = [path]
    if cfg.plots:
        rprof = rescale_positive_part(prof)
        rho = np.linspace(0.0, min(rprof.sigma, 8.0), 400)
        ut = rescaled_eval(prof, rho)
        bub = bubble_eval(BubbleSpec.normalized(cfg.dim), rho)
        table = [{"rho": a, "u_tilde": b, "bubble": c}
                 for a, b, c in zip(rho, ut, bub)]
        wrote += emit_plot_data(table, "overlay", cfg.outdir, cfg.dim)
    for p in wrote:
        print(p)
    return 0


def _cmd_energy(cfg: RunConfig) -> int:
    if cfg.gamma is None:
        raise ConfigurationError("energy requires --gamma")
    dim = DimensionParams.from_dimension(cfg.dim)
    res = _solve(cfg, cfg.gamma)
    prof = build_radial_profile(dim, res, n_nodal=2)
    rep = energy(prof)
    data = {"dim": cfg.dim, "gamma": cfg.gamma}
    data.update({k: getattr(rep, k) for k in rep.__dataclass_fields__})
    print(json.dumps({"kind": "energy", "data": _round12(data)},
                     indent=1, sort_keys=True))
    return 0


def _cmd_asymptotics(cfg: RunConfig) -> int:
    dim = DimensionParams.from_dimension(cfg.dim)
    gammas = [g for g in _gamma_grid(cfg) if g >= 10.0]
    if len(gammas) < 4:
        raise ConfigurationError("asymptotics needs >= 4 gamma values above 10")
    t1_pts = []
    for g in gammas:
        res = _solve(cfg, g)
        t1_pts.append((g, res.zeros[0]))
    data = {"dim": cfg.dim, "gammas": list(map(float, gammas))}
    if cfg.dim == 4:
        fit = fit_power_law(t1_pts, "log")
    else:
        fit = fit_power_law(t1_pts, "power")
    data["t1_fit"] = {"model": fit.model, "exponent": fit.exponent,
                      "prefactor": fit.prefactor, "residual": fit.residual}
    sfit = slope_law_check(dim, gammas)
    data["slope_fit"] = {"model": sfit.model, "prefactor": sfit.prefactor,
                         "residual": sfit.residual,
                         "limit_constant": slope_law_constant(dim)}
    if cfg.dim == 6:
        y0_fit, t0_fit = t0_y0_asymptotics(dim, gammas)
        data["y0_mean"] = y0_fit.prefactor
        data["t0_ratio_mean"] = t0_fit.prefactor
    data = {k: v for k, v in data.items() if v is not None}
    if data["t1_fit"].get("exponent") is None:
        del data["t1_fit"]["exponent"]
    print(json.dumps({"kind": "asymptotics", "data": _round12(data)},
                     indent=1, sort_keys=True))
    if cfg.plots:
        table = [{"gamma": g, "T1": t} for g, t in t1_pts]
        for p in emit_plot_data(table, "t1fit", cfg.outdir, cfg.dim):
            print(p, file=sys.stderr)
    return 0


def _cmd_lambda0(cfg: RunConfig) -> int:
    lam0, u0 = lambda0_six()
    data = {"dim": 6, "lambda0": lam0, "u0_center": u0.M_plus,
            "u0_center_over_lambda0": u0.M_plus / lam0}
    print(json.dumps({"kind": "lambda0", "data": _round12(data)},
                     indent=1, sort_keys=True))
    return 0


def _report_gates(cfg: RunConfig, rows: list) -> list:
    """Per-dimension quantitative verdicts at the sweep endpoint."""
    dim = DimensionParams.from_dimension(cfg.dim)
    N = cfg.dim
    last = rows[-1]
    gates = []

    def gate(name, observed, target, tol):
        gates.append({"name": name, "observed": float(observed),
                      "target": float(target), "tolerance": float(tol),
                      "passed": bool(abs(observed - target) <= tol * abs(target))})

    lam2_ball = radial_eigenvalue(dim, 2)
    below = all(row["lambda2"] < lam2_ball for row in rows)
    gates.append({"name": "lambda2_below_ball_second_eigenvalue",
                  "observed": float(max(row["lambda2"] for row in rows)),
                  "target": float(lam2_ball), "tolerance": 0.0,
                  "passed": below})
    study = lambda2_limit_study(dim, [row["gamma"] for row in rows][:3])
    if N <= 6:
        tol = 0.01 if N == 6 else 0.02
        gate("lambda2_limit", last["lambda2"], study["target"], tol)
    gate("slope_law", last["gamma"] * _solve(cfg, last["gamma"]).slopes[0],
         slope_law_constant(dim), 0.02)
    S = sobolev_constant(N)
    j_target = S ** (N / 2.0) / N
    gate("positive_part_energy", last["J_plus"], j_target, 0.05)
    if N == 3:
        gate("node_radius", last["r_node"], 1.0 / 3.0, 0.02)
    if N == 6:
        gate("last_extremum_value", last["y0"], -0.5, 0.02)
        gate("negative_sup_norm_ratio",
             last["M_minus"] / (last["lambda2"] / 2.0), 1.0, 0.05)
    return gates


def _cmd_report(cfg: RunConfig) -> int:
    rows = [_curve_row(cfg, g) for g in _gamma_grid(cfg)]
    gates = _report_gates(cfg, rows)
    path = os.path.join(cfg.outdir, f"report_N{cfg.dim}.json")
    _write_json(path, "report", {"dim": cfg.dim, "rows": rows, "gates": gates})
    wrote = [path]
    if cfg.plots:
        wrote += emit_plot_data(rows, "lambda2", cfg.outdir, cfg.dim)
        wrote += emit_plot_data(rows, "t1fit", cfg.outdir, cfg.dim)
    for p in wrote:
        print(p)
    for g in gates:
        print(f"{'PASS' if g['passed'] else 'FAIL'} {g['name']}: "
              f"observed {g['observed']:.6g}")
    return 0


_COMMANDS = {
    "shoot": _cmd_shoot,
    "curve": _cmd_curve,
    "solution": _cmd_solution,
    "energy": _cmd_energy,
    "asymptotics": _cmd_asymptotics,
    "lambda0": _cmd_lambda0,
    "report": _cmd_report,
}


def _read_config_file(path: str) -> dict:
    """key=value lines; '#' starts a comment; keys match long flag names."""
    out = {}
    with open(path) as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ConfigurationError(f"{path}:{lineno}: expected key=value")
            key, val = (s.strip() for s in line.split("=", 1))
            out[key.replace("-", "_")] = val
    return out


_FIELD_TYPES = {
    "dim": int, "gamma": float, "gamma_min": float, "gamma_max": float,
    "points_per_decade": int, "rel_tol": float, "abs_tol": float,
    "outdir": str, "csv": bool, "json_out": bool, "plots": bool, "fast": bool,
}


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="efshoot", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)
    for name in _COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", default=None)
        p.add_argument("--dim", type=int, default=None)
        p.add_argument("--gamma", type=float, default=None)
        p.add_argument("--gamma-min", type=float, default=None)
        p.add_argument("--gamma-max", type=float, default=None)
        p.add_argument("--points-per-decade", type=int, default=None)
        p.add_argument("--rel-tol", type=float, default=None)
        p.add_argument("--abs-tol", type=float, default=None)
        p.add_argument("--outdir", default=None)
        p.add_argument("--csv", action="store_true", default=None)
        p.add_argument("--json", dest="json_out", action="store_true", default=None)
        p.add_argument("--plots", action="store_true", default=None)
        p.add_argument("--fast", action="store_true", default=None)
    return parser


def build_config(argv) -> RunConfig:
    """Merge flags over config file over defaults into a validated RunConfig."""
    ns = _build_parser().parse_args(argv)
    cfg = RunConfig(command=ns.command)
    cfg.outdir = os.environ.get("EFSHOOT_OUTDIR", ".")
    if ns.config:
        try:
            file_vals = _read_config_file(ns.config)
        except OSError as exc:
            raise ConfigurationError(f"cannot read config file: {exc}") from exc
        for key, raw in file_vals.items():
            if key not in _FIELD_TYPES:
                raise ConfigurationError(f"unknown config key {key!r}")
            typ = _FIELD_TYPES[key]
            try:
                val = raw.lower() in ("1", "true", "yes") if typ is bool else typ(raw)
            except ValueError:
                raise ConfigurationError(
                    f"config key {key!r}: cannot parse {raw!r}") from None
            setattr(cfg, key, val)
    for key in _FIELD_TYPES:
        flag_val = getattr(ns, key, None)
        if flag_val is not None:
            setattr(cfg, key, flag_val)
    cfg.validate()
    return cfg


def run_command(argv) -> int:
    """Dispatch one CLI invocation; returns the process exit code."""
    stage = "configuration"
    try:
        cfg = build_config(argv)
        stage = cfg.command
        os.makedirs(cfg.outdir, exist_ok=True)
        return _COMMANDS[cfg.command](cfg)
    except SystemExit as exc:
        # argparse reports its own diagnostics; normalize its exit code
        return 2 if exc.code not in (0, None) else 0
    except (ConfigurationError, DomainError) as exc:
        print(f"efshoot: usage error: {exc}", file=sys.stderr)
        return 2
    except NumericError as exc:
        print(f"efshoot: numeric failure in stage '{stage}': {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"efshoot: i/o failure in stage '{stage}': {exc}", file=sys.stderr)
        return 1


def main():
    sys.exit(run_command(sys.argv[1:]))


if __name__ == "__main__":
    main()
