"""Command-line entry point.

Every subcommand prints one JSON report to stdout::

    {"command", "params", "results", "residuals", "pass", "wall_time_ms"}

``results`` and ``residuals`` are lists of ``{"name", "value"}`` objects;
residuals also carry their ``tolerance``. Exit codes: 0 pass, 1 tolerance
failure, 2 invalid arguments, 3 run aborted.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

from . import classical, lrl, so4
from .errors import ConvergenceError, SingularityError
from .geometry import SystemParams
from .spectrum import RadialGrid, level_energy, spectrum_table

EXIT_PASS, EXIT_FAIL, EXIT_ARGS, EXIT_ABORT = 0, 1, 2, 3


class Report:
    def __init__(self, command: str, params: dict):
        self.command = command
        self.params = params
        self.results: list[dict] = []
        self.residuals: list[dict] = []
        self.notes: list[str] = []
        self.aborted: str | None = None
        self._start = time.perf_counter()

    def result(self, name, value):
        self.results.append({"name": name, "value": _plain(value)})

    def residual(self, name, value, tolerance):
        self.residuals.append({"name": name, "value": float(value), "tolerance": float(tolerance)})

    @property
    def passed(self) -> bool:
        return self.aborted is None and all(r["value"] <= r["tolerance"] for r in self.residuals)

    def as_dict(self, timing: bool = True) -> dict:
        out = {
            "command": self.command,
            "params": self.params,
            "results": self.results,
            "residuals": self.residuals,
            "pass": self.passed,
            "wall_time_ms": int(round(1000 * (time.perf_counter() - self._start))) if timing else 0,
        }
        if self.notes:
            out["notes"] = self.notes
        if self.aborted:
            out["aborted"] = self.aborted
        return out


def _plain(value):
    if isinstance(value, dict):
        return {str(k): _plain(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_plain(v) for v in value]
    if isinstance(value, (bool, int, str)) or value is None:
        return value
    return float(value)


def _write_csv(path: Path, header, rows):
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for row in rows:
            writer.writerow([repr(float(v)) if isinstance(v, float) else v for v in row])


# -- subcommands ------------------------------------------------------------

def cmd_classical_check(args) -> Report:
    params = SystemParams(m=args.m, lam=args.lam, alpha=args.alpha)
    report = Report("classical-check", {
        "seed": args.seed, "points": args.points, "alpha": args.alpha, "m": args.m,
        "lam": args.lam, "mode": args.mode, "step": args.step,
    })
    modes = ["analytic", "finite-difference"] if args.mode == "both" else [args.mode]
    points = classical.sample_phase_points(args.seed, args.points)
    worst: dict[tuple[str, str], float] = {}
    skipped = 0
    for pp in points:
        for mode in modes:
            res = classical.identity_residuals(pp, params, mode, args.step)
            if mode == modes[0] and "casimir" not in res:
                skipped += 1
            for name, value in res.items():
                key = (mode, name)
                worst[key] = max(worst.get(key, 0.0), value)
    report.result("points", len(points))
    report.result("R_checks_skipped", skipped)
    if skipped:
        report.notes.append(f"R undefined at {skipped} point(s); R identities skipped there")
    for (mode, name), value in worst.items():
        if name.startswith("bracket_"):
            tol = args.tol_analytic if mode == "analytic" else args.tol_fd
            report.residual(f"{name}[{mode}]", value, tol)
        elif mode == modes[0]:
            report.residual(name, value, args.tol_identity)
    return report


def cmd_orbit(args) -> Report:
    params = SystemParams(m=args.m, lam=args.lam, alpha=args.alpha)
    report = Report("orbit", {
        "x0": list(args.x0), "p0": list(args.p0), "alpha": args.alpha, "m": args.m,
        "lam": args.lam, "dt": args.dt, "steps": args.steps, "fp_tol": args.fp_tol,
    })
    pp0 = classical.PhasePoint(args.x0, args.p0)
    try:
        traj = classical.integrate(pp0, params, args.dt, args.steps, args.fp_tol)
    except (SingularityError, ConvergenceError) as exc:
        traj = exc.partial
        report.aborted = str(exc)
    report.result("steps_completed", len(traj) - 1)
    if len(traj) and report.aborted is None:
        drift = classical.conserved_drift(traj, params)
        report.residual("H_relative_drift", drift.H_relative, args.drift_tol)
        for name in ("L", "A"):
            for i, v in enumerate(getattr(drift, name)):
                report.residual(f"{name}{i + 1}_drift", v, args.drift_tol)
        if drift.R is not None:
            for i, v in enumerate(drift.R):
                report.result(f"R{i + 1}_drift", v)
    if args.out_dir and len(traj):
        H = classical._hamiltonian(traj.x, traj.p, params)
        rows = (
            [traj.t[i], *traj.x[i], *traj.p[i], H[i]]
            for i in range(0, len(traj), args.stride)
        )
        name = "trajectory_partial.csv" if report.aborted else "trajectory.csv"
        _write_csv(Path(args.out_dir) / name, ["t", "x1", "x2", "x3", "p1", "p2", "p3", "H"],
                   ([float(v) for v in row] for row in rows))
    return report


def _quantum_cell(k, alpha):
    return k, alpha, lrl.quantum_residuals(k, alpha)


def cmd_quantum_check(args) -> Report:
    report = Report("quantum-check", {"k": [str(k) for k in args.k], "alpha": args.alpha})
    cells = [(k, a) for k in args.k for a in args.alpha]
    if args.parallel:
        with ThreadPoolExecutor() as pool:
            out = list(pool.map(lambda c: _quantum_cell(*c), cells))
    else:
        out = [_quantum_cell(*c) for c in cells]
    for k, alpha, res in out:
        for name, value in res.items():
            report.residual(f"{name}[k={k},alpha={alpha:g}]", value, args.tol)
        ops = so4.build_irrep(k)
        for name, value in so4.algebra_residuals(ops).items():
            report.residual(f"so4_{name}[k={k},alpha={alpha:g}]", value, args.tol)
        for label, F in (("one", lambda g: 1.0), ("gamma_sq", lambda g: g * g),
                         ("exp", lambda g: complex(math.cos(0.37 * g * (g + 1)), math.sin(0.37 * g * (g + 1))))):
            report.residual(f"shift_{label}[k={k},alpha={alpha:g}]",
                            so4.verify_shift_formula(ops.R, F, ops), args.tol)
        report.residual(f"A5[k={k},alpha={alpha:g}]", so4.verify_A5(ops.R, ops), args.tol)
    return report


def cmd_spectrum(args) -> Report:
    report = Report("spectrum", {
        "alpha": args.alpha, "n_max": args.n_max, "N": args.N, "richardson": args.richardson,
    })
    rows = spectrum_table(args.alpha, args.n_max, RadialGrid(args.N), args.richardson, args.parallel)
    for row in rows:
        report.result(f"h_closed[n={row['n']}]", row["h_closed"])
        for l, v in row["h_radial"].items():
            report.result(f"h_radial[n={row['n']},l={l}]", v)
        report.residual(f"delta[n={row['n']}]", row["max_abs_delta"], args.tol)
        report.residual(f"spread[n={row['n']}]", row["spread"], args.spread_tol)
    if args.out_dir:
        table = []
        for row in rows:
            for l, v in row["h_radial"].items():
                table.append([row["n"], l, row["h_closed"], v, v - row["h_closed"], row["spread"]])
        _write_csv(Path(args.out_dir) / "spectrum.csv",
                   ["n", "l", "h_closed", "h_radial", "delta", "spread"], table)
    return report


def cmd_f_table(args) -> Report:
    if args.rho is not None:
        rho = args.rho
        source = {"rho": rho}
    else:
        n = int(round(2 * float(so4.half_integer(args.k)))) + 1
        sp = lrl.spectral_params(level_energy(n, args.alpha), args.alpha)
        rho = sp.rho
        source = {"k": str(args.k), "alpha": args.alpha}
    report = Report("f-table", {**source, "x_min": args.x_min, "x_max": args.x_max, "x_step": args.x_step})
    report.result("rho", rho)
    count = int(round((args.x_max - args.x_min) / args.x_step)) + 1
    rows, worst_eq, worst_imag = [], 0.0, 0.0
    for i in range(count):
        x = args.x_min + i * args.x_step
        f = lrl.f_closed_form_complex(x, rho)
        prod = f * lrl.f_closed_form_complex(x - 1.0, rho) * (x * x + rho * rho)
        eq = abs(prod - 1.0)
        worst_eq = max(worst_eq, eq)
        if x == round(x):
            worst_imag = max(worst_imag, abs(f.imag) / abs(f))
        rows.append([x, f.real, f.imag, eq])
    report.residual("functional_equation", worst_eq, args.tol)
    report.residual("imag_at_integers", worst_imag, args.tol)
    if args.out_dir:
        _write_csv(Path(args.out_dir) / "f_table.csv", ["x", "re_f", "im_f", "functional_residual"], rows)
    return report


# -- argument parsing -------------------------------------------------------

def _half_integer(text):
    try:
        return so4.half_integer(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _positive_int(text):
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {value}")
    return value


def _positive_float(text):
    value = float(text)
    if not value > 0 or not math.isfinite(value):
        raise argparse.ArgumentTypeError(f"expected a positive number, got {text}")
    return value


def _add_system(p):
    p.add_argument("--alpha", type=float, default=1.0)
    p.add_argument("--m", type=_positive_float, default=1.0)
    p.add_argument("--lam", type=_positive_float, default=1.0)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="s3kepler", description=__doc__.splitlines()[0])
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out-dir", default=None, help="directory for CSV output")
    common.add_argument("--no-timing", action="store_true",
                        help="report wall_time_ms as 0 so reruns are byte-identical")
    common.add_argument("--parallel", action="store_true", help="fan out independent cells")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("classical-check", parents=[common], help="classical bracket algebra and identities")
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--points", type=_positive_int, default=100)
    _add_system(p)
    p.add_argument("--mode", choices=["analytic", "finite-difference", "both"], default="both")
    p.add_argument("--step", type=_positive_float, default=1e-5)
    p.add_argument("--tol-analytic", type=float, default=1e-10)
    p.add_argument("--tol-fd", type=float, default=1e-6)
    p.add_argument("--tol-identity", type=float, default=1e-10)
    p.set_defaults(func=cmd_classical_check)

    p = sub.add_parser("orbit", parents=[common], help="integrate one orbit and report drifts")
    p.add_argument("--x0", type=float, nargs=3, default=[1.0, 0.0, 0.0])
    p.add_argument("--p0", type=float, nargs=3, default=[0.0, 1.0, 0.0])
    _add_system(p)
    p.add_argument("--dt", type=_positive_float, default=1e-3)
    p.add_argument("--steps", type=_positive_int, default=100_000)
    p.add_argument("--fp-tol", type=_positive_float, default=1e-13)
    p.add_argument("--drift-tol", type=float, default=1e-8)
    p.add_argument("--stride", type=_positive_int, default=1, help="write every n-th point")
    p.set_defaults(func=cmd_orbit)

    p = sub.add_parser("quantum-check", parents=[common], help="matrix identities inside irreps (k, k)")
    p.add_argument("--k", type=_half_integer, nargs="+", default=[_half_integer(s) for s in ("1/2", "1", "3/2", "2")])
    p.add_argument("--alpha", type=float, nargs="+", default=[0.5, 1.0, 2.0])
    p.add_argument("--tol", type=float, default=1e-9)
    p.set_defaults(func=cmd_quantum_check)

    p = sub.add_parser("spectrum", parents=[common], help="closed-form levels against the radial oracle")
    p.add_argument("--alpha", type=float, default=1.0)
    p.add_argument("--n-max", type=_positive_int, default=5)
    p.add_argument("--N", type=int, default=8000)
    p.add_argument("--richardson", action="store_true")
    p.add_argument("--tol", type=float, default=1e-3)
    p.add_argument("--spread-tol", type=float, default=2e-3)
    p.set_defaults(func=cmd_spectrum)

    p = sub.add_parser("f-table", parents=[common], help="tabulate the closed-form dressing function")
    group = p.add_mutually_exclusive_group()
    group.add_argument("--rho", type=_positive_float)
    group.add_argument("--k", type=_half_integer, default=_half_integer("1/2"))
    p.add_argument("--alpha", type=float, default=1.0)
    p.add_argument("--x-min", type=float, default=0.5)
    p.add_argument("--x-max", type=float, default=10.0)
    p.add_argument("--x-step", type=_positive_float, default=0.25)
    p.add_argument("--tol", type=float, default=1e-10)
    p.set_defaults(func=cmd_f_table)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "spectrum" and args.N < 100:
        parser.error("--N must be at least 100")
    if args.command == "f-table" and args.rho is None and args.alpha == 0:
        parser.error("the closed form needs alpha != 0 (rho > 0)")
    report = args.func(args)
    json.dump(report.as_dict(timing=not args.no_timing), sys.stdout, indent=2)
    sys.stdout.write("\n")
    if report.aborted:
        return EXIT_ABORT
    return EXIT_PASS if report.passed else EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
