"""Command-line frontend.

Subcommands: ``simulate`` runs linear scenarios from a config and writes
one trajectory CSV per (scenario, alpha); ``stability`` classifies
parameter grids into a verdict table; ``solve-nonlinear`` runs the
fixed-point solver; ``figures`` reproduces the three bundled demonstration
scenarios as CSV data plus an optional plot script.

CSV columns are fixed (trajectories: t,x,residual; verdicts: lambda,alpha,
h,status,mechanism,p_alpha,threshold_low,threshold_high), values are
printed with 17 significant digits and "\n" line endings, so identical
configs produce byte-identical files.  The environment variable CFTS_TOL
overrides the default numeric tolerance (quadrature and fixed-point
stopping; default 1e-10).
"""

from __future__ import annotations

import argparse
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

from .config import ConfigError, Scenario, build_rhs, build_signal, parse_config
from .errors import NonRegressiveParameter, NotContractive, NotRegressive
from .fractional import CFOrder
from .linear import (
    LinearCFProblem,
    classical_residual,
    classical_trajectory,
    residual_linear,
    solve_linear_trajectory,
)
from .nonlinear import NonlinearCFProblem, picard_solve, residual_nonlinear
from .signals import Sampled
from .stability import StabilityVerdict, classify_hz, classify_r
from .timescale import TimeScale, UniformGrid

#: Self-check bound announced for emitted trajectories.
RESIDUAL_GATE = 1e-8

TRAJECTORY_HEADER = ("t", "x", "residual")
VERDICT_HEADER = ("lambda", "alpha", "h", "status", "mechanism", "p_alpha",
                  "threshold_low", "threshold_high")


def _fmt(v) -> str:
    if isinstance(v, str):
        return v
    return f"{v:.17g}"


def _write_csv(path: Path, header, rows) -> None:
    with open(path, "w", newline="") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(_fmt(v) for v in row) + "\n")


def _alpha_tag(alpha: float) -> str:
    return f"{alpha:g}"


# -- simulate ---------------------------------------------------------------


def _linear_trajectory(scn: Scenario, alpha: float, tol: float):
    u = build_signal(scn.u_spec)
    if isinstance(u, Sampled):  # sample tables are given on the run mesh
        mesh = (scn.ts.mesh(0.0, scn.horizon) if scn.horizon is not None
                else scn.ts.mesh(0.0, scn.ts.t_max)[: scn.steps + 1])
        u = build_signal(scn.u_spec, mesh)
    if alpha == 1.0:
        traj = classical_trajectory(scn.ts, scn.lam, u, scn.x0,
                                    horizon=scn.horizon, steps=scn.steps, tol=tol)
        resid = []
        for i, t in enumerate(traj.mesh):
            if i + 1 < len(traj.mesh):
                resid.append(classical_residual(scn.ts, scn.lam, u, traj, t))
            else:
                resid.append(math.nan)  # sigma(t) beyond the sampled horizon
        return traj, resid
    prob = LinearCFProblem(scn.ts, scn.lam, u, scn.x0, CFOrder(alpha))
    traj = solve_linear_trajectory(prob, horizon=scn.horizon, steps=scn.steps,
                                   tol=tol)
    resid = [residual_linear(prob, traj, t, tol) for t in traj.mesh]
    return traj, resid


def _self_check(name: str, alpha: float, residuals) -> None:
    worst = max((abs(r) for r in residuals if math.isfinite(r)), default=0.0)
    if worst >= RESIDUAL_GATE:
        print(f"warning: {name} alpha={_alpha_tag(alpha)}: max |residual| = "
              f"{worst:.3g} exceeds {RESIDUAL_GATE:g} (the closed form solves "
              f"the equation exactly only when u(0) + lambda*x0 = 0)",
              file=sys.stderr)


def _scenario_verdict(scn: Scenario, alpha: float) -> tuple:
    segs = scn.ts.segments
    if len(segs) == 1 and isinstance(segs[0], UniformGrid):
        h = segs[0].step
        v = classify_hz(scn.lam, alpha, h)
        return verdict_row(scn.lam, alpha, h, v)
    v = classify_r(scn.lam, alpha)
    return verdict_row(scn.lam, alpha, None, v)


def verdict_row(lam: float, alpha: float, h: float | None,
                v: StabilityVerdict) -> tuple:
    return (lam, alpha, "" if h is None else h, v.status, v.mechanism,
            v.p_alpha, v.boundary_values[0], v.boundary_values[1])


def cmd_simulate(config_path: str, out_dir: str, tol: float) -> int:
    scenarios = parse_config(Path(config_path).read_text())
    for scn in scenarios:
        if scn.kind != "linear":
            raise ConfigError(
                f"scenario '{scn.name}' is nonlinear; use 'cfts solve-nonlinear'")
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)

    jobs = [(scn, alpha) for scn in scenarios for alpha in scn.alphas]
    with ThreadPoolExecutor(max_workers=min(8, max(1, len(jobs)))) as pool:
        results = list(pool.map(
            lambda job: _linear_trajectory(job[0], job[1], tol), jobs))

    verdicts: dict[str, list[tuple]] = {}
    for (scn, alpha), (traj, resid) in zip(jobs, results):
        _self_check(scn.name, alpha, resid)
        path = out / f"{scn.name}_alpha{_alpha_tag(alpha)}.csv"
        _write_csv(path, TRAJECTORY_HEADER,
                   zip(traj.mesh, traj.values, resid))
        if "verdict" in scn.outputs and alpha < 1.0:
            verdicts.setdefault(scn.name, []).append(_scenario_verdict(scn, alpha))
    for name, rows in verdicts.items():
        _write_csv(out / f"{name}_verdicts.csv", VERDICT_HEADER, rows)
    return 0


# -- stability --------------------------------------------------------------


def _parse_sweep(spec: str, flag: str) -> list[float]:
    try:
        if ":" in spec:
            lo_s, hi_s, n_s = spec.split(":")
            lo, hi, n = float(lo_s), float(hi_s), int(n_s)
            if n < 2:
                return [lo]
            step = (hi - lo) / (n - 1)
            return [lo + k * step for k in range(n)]
        return [float(s) for s in spec.split(",") if s]
    except ValueError:
        raise ConfigError(f"bad sweep {spec!r} for {flag}; use X | X,Y,... | lo:hi:count")


def cmd_stability(lams, alphas, hs, continuous: bool, out_path: str | None) -> int:
    rows = []
    for h in (hs if not continuous else [None]):
        for alpha in alphas:
            for lam in lams:
                v = classify_r(lam, alpha) if continuous else classify_hz(lam, alpha, h)
                rows.append(verdict_row(lam, alpha, h, v))
    if out_path:
        _write_csv(Path(out_path), VERDICT_HEADER, rows)
    else:
        sys.stdout.write(",".join(VERDICT_HEADER) + "\n")
        for row in rows:
            sys.stdout.write(",".join(_fmt(v) for v in row) + "\n")
    return 0


# -- solve-nonlinear --------------------------------------------------------


def cmd_solve_nonlinear(config_path: str, out_dir: str, tol: float) -> int:
    scenarios = parse_config(Path(config_path).read_text())
    for scn in scenarios:
        if scn.kind != "nonlinear":
            raise ConfigError(
                f"scenario '{scn.name}' is linear; use 'cfts simulate'")
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    for scn in scenarios:
        report_lines = []
        for alpha in scn.alphas:
            if alpha >= 1.0:
                raise ConfigError(
                    f"scenario '{scn.name}': the fixed-point solver needs alpha < 1")
            rhs = build_rhs(scn.rhs_spec)
            prob = NonlinearCFProblem(scn.ts, rhs, scn.lipschitz, scn.window[0],
                                      scn.window[1], scn.x0, CFOrder(alpha))
            result = picard_solve(prob, tol=tol)
            traj = result.solution
            resid = [residual_nonlinear(prob, traj, t) for t in traj.mesh]
            _self_check(scn.name, alpha, resid)
            path = out / f"{scn.name}_alpha{_alpha_tag(alpha)}.csv"
            _write_csv(path, TRAJECTORY_HEADER, zip(traj.mesh, traj.values, resid))
            report_lines.append(
                f"scenario={scn.name} alpha={_alpha_tag(alpha)} "
                f"q={_fmt(result.contraction_q)} iterations={result.iterations} "
                f"final_defect={_fmt(result.final_defect)} "
                f"apriori_bound={_fmt(result.apriori_bound)}")
        report = out / f"{scn.name}_report.txt"
        report.write_text("\n".join(report_lines) + "\n")
        for line in report_lines:
            print(line)
    return 0


# -- figures ----------------------------------------------------------------

FIGURE_CONFIGS = {
    1: """\
# Step-1 grid, lambda=0.2: growing trajectories for every order.
[scenario fig1]
segment = grid 0 1 31
equation = linear
lambda = 0.2
u = constant 1
x0 = 0
alpha = 0.2 0.5 0.9 1
horizon = steps 30
outputs = trajectory residuals verdict
""",
    2: """\
# Step-1 grid, lambda=4.2: bounded (stable) trajectories.
[scenario fig2]
segment = grid 0 1 31
equation = linear
lambda = 4.2
u = constant 1
x0 = 0
alpha = 0.2 0.5
horizon = steps 30
outputs = trajectory residuals verdict
""",
    3: """\
# Refining the step toward the continuous solution, alpha=0.5.
[scenario fig3_h0.1]
segment = grid 0 0.1 31
equation = linear
lambda = 0.2
u = constant 1
x0 = 0
alpha = 0.5
horizon = time 3
outputs = trajectory residuals

[scenario fig3_h0.5]
segment = grid 0 0.5 7
equation = linear
lambda = 0.2
u = constant 1
x0 = 0
alpha = 0.5
horizon = time 3
outputs = trajectory residuals

[scenario fig3_h1]
segment = grid 0 1 4
equation = linear
lambda = 0.2
u = constant 1
x0 = 0
alpha = 0.5
horizon = time 3
outputs = trajectory residuals
""",
}

_PLOT_TEMPLATE = """\
#!/usr/bin/env python3
# Generated plot script: reads the CSVs next to this file.
# Requires matplotlib, which the data-producing tool itself does not.
import csv
import pathlib

import matplotlib.pyplot as plt

HERE = pathlib.Path(__file__).parent
FILES = {files!r}

for name in FILES:
    with open(HERE / name) as fh:
        rows = list(csv.DictReader(fh))
    t = [float(r["t"]) for r in rows]
    x = [float(r["x"]) for r in rows]
    plt.plot(t, x, marker=".", label=name.rsplit(".", 1)[0])
plt.xlabel("t")
plt.ylabel("x(t)")
plt.legend()
plt.tight_layout()
plt.savefig(HERE / {png!r}, dpi=150)
print("wrote", HERE / {png!r})
"""


def cmd_figures(which: int, out_dir: str, tol: float, plot_script: bool) -> int:
    text = FIGURE_CONFIGS[which]
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    cfg_path = out / f"fig{which}.config"
    cfg_path.write_text(text)
    rc = cmd_simulate(str(cfg_path), str(out), tol)
    if rc == 0 and plot_script:
        files = [f"{scn.name}_alpha{_alpha_tag(a)}.csv"
                 for scn in parse_config(text) for a in scn.alphas]
        script = _PLOT_TEMPLATE.format(files=files, png=f"fig{which}.png")
        (out / f"plot_fig{which}.py").write_text(script)
    return rc


# -- entry point ------------------------------------------------------------


def _build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="cfts",
        description="Fractional dynamic equations on hybrid time scales: "
                    "simulation, stability classification, fixed-point solving.")
    sub = ap.add_subparsers(dest="command", required=True)

    sim = sub.add_parser("simulate", help="run linear scenarios from a config")
    sim.add_argument("config")
    sim.add_argument("--out", default=".", help="output directory")

    st = sub.add_parser("stability", help="classify a (lambda, alpha, h) grid")
    st.add_argument("--lambda", dest="lam", required=True,
                    help="value, comma list, or lo:hi:count sweep "
                         "(use --lambda=-1 for negative values)")
    st.add_argument("--alpha", required=True,
                    help="value, comma list, or lo:hi:count sweep")
    grp = st.add_mutually_exclusive_group(required=True)
    grp.add_argument("--h", help="grid step(s); value, comma list, or sweep")
    grp.add_argument("--continuous", action="store_true",
                     help="classify on the reals instead of a grid")
    st.add_argument("--out", default=None, help="CSV path (default: stdout)")

    nl = sub.add_parser("solve-nonlinear",
                        help="run the fixed-point solver from a config")
    nl.add_argument("config")
    nl.add_argument("--out", default=".", help="output directory")

    fig = sub.add_parser("figures", help="reproduce a bundled demonstration")
    fig.add_argument("--which", type=int, choices=(1, 2, 3), required=True)
    fig.add_argument("--out", required=True, help="output directory")
    fig.add_argument("--no-plot-script", action="store_true",
                     help="skip writing the matplotlib helper script")
    return ap


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        tol = float(os.environ["CFTS_TOL"]) if "CFTS_TOL" in os.environ else 1e-10
    except ValueError:
        print("error: CFTS_TOL must be a number", file=sys.stderr)
        return 2
    try:
        if args.command == "simulate":
            return cmd_simulate(args.config, args.out, tol)
        if args.command == "stability":
            lams = _parse_sweep(args.lam, "--lambda")
            alphas = _parse_sweep(args.alpha, "--alpha")
            hs = _parse_sweep(args.h, "--h") if args.h else []
            return cmd_stability(lams, alphas, hs, args.continuous, args.out)
        if args.command == "solve-nonlinear":
            return cmd_solve_nonlinear(args.config, args.out, tol)
        if args.command == "figures":
            return cmd_figures(args.which, args.out, tol, not args.no_plot_script)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except FileNotFoundError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except (NotRegressive, NonRegressiveParameter) as exc:
        print(f"regressivity violation: {exc}", file=sys.stderr)
        return 3
    except NotContractive as exc:
        print(f"not contractive: {exc}", file=sys.stderr)
        return 4
    return 0


if __name__ == "__main__":
    sys.exit(main())
