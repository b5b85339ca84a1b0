"""Command-line interface: scatter, reconstruct, roundtrip, evolve.

Exit codes are a stable contract:

  0  success
  1  roundtrip invariant failure
  2  input file violates a schema
  3  numeric invariant violation (e.g. sup|q| >= 1, sup|r| >= 1)
  4  reconstruction failed to converge at some sites (listed on stderr)
  5  evolution window breach (mass reached the window edge)
"""

from __future__ import annotations

import argparse
import os
import sys
import time
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import io as aio
from .circle import hk_norm, make_grid
from .evolution import default_window, evolve_reflection, oracle_compare
from .lattice import Potential, c_total, edge_amplitude, values_on_window
from .rh import ReconstructionError, prepare_reflection, reconstruct_window, trace_a
from .scattering import compute_scattering, validate_scattering, winding_number

EXIT_OK = 0
EXIT_INVARIANT_FAILED = 1
EXIT_SCHEMA = 2
EXIT_INVARIANT_VIOLATION = 3
EXIT_RECONSTRUCTION = 4
EXIT_WINDOW_BREACH = 5

EDGE_BREACH = 1e-6


@dataclass
class RunConfig:
    grid_n: int = 512
    tol: float = 1e-12
    max_iter: int = 200
    window: tuple[int, int] | None = None
    dt: float = 1e-3
    seed: int | None = None
    threads: int | None = None

    def validate(self) -> None:
        if self.grid_n < 64 or self.grid_n % 2:
            raise ValueError("grid size must be an even integer >= 64")
        if not (0.0 < self.tol <= 1e-6):
            raise ValueError("tol must lie in (0, 1e-6]")
        if self.max_iter < 1:
            raise ValueError("max-iter must be positive")
        if self.dt <= 0:
            raise ValueError("dt must be positive")
        if self.window is not None and self.window[0] > self.window[1]:
            raise ValueError("window is empty")


def _config_from_args(args) -> RunConfig:
    config = RunConfig(
        grid_n=args.grid,
        tol=args.tol,
        max_iter=args.max_iter,
        window=tuple(args.window) if args.window else None,
        dt=getattr(args, "dt", 1e-3),
        seed=getattr(args, "seed", None),
        threads=int(os.environ["ALIST_THREADS"]) if os.environ.get("ALIST_THREADS") else None,
    )
    config.validate()
    return config


def _random_potential(seed: int, sites: int, amp: float) -> Potential:
    rng = np.random.default_rng(seed)
    offsets = np.arange(sites) - (sites - 1) / 2.0
    env = amp / (1.0 + offsets**2) ** 0.5
    mag = env * np.sqrt(rng.uniform(0, 1, sites))
    return Potential(-(sites // 2), mag * np.exp(1j * rng.uniform(0, 2 * np.pi, sites)))


def cmd_scatter(args) -> int:
    config = _config_from_args(args)
    q = aio.read_potential(args.input)
    data = compute_scattering(q, make_grid(config.grid_n))
    validate_scattering(data)
    if args.output:
        aio.write_scattering(data, args.output)
    sup_r = float(np.max(np.abs(data.r.samples)))
    print(f"c_inf = {data.c_inf!r}")
    print(f"sup|r| = {sup_r!r}")
    for k in (1, 2, 3):
        print(f"hk_norm(r, {k}) = {hk_norm(data.r, k)!r}")
    return EXIT_OK


def cmd_reconstruct(args) -> int:
    config = _config_from_args(args)
    if config.window is None:
        print("error: reconstruct requires --window LO HI", file=sys.stderr)
        return EXIT_SCHEMA
    data = aio.read_scattering(args.input)
    reflection = prepare_reflection(data.r)
    n_lo, n_hi = config.window
    try:
        result = reconstruct_window(
            reflection, n_lo, n_hi,
            tol=config.tol, max_iter=config.max_iter, threads=config.threads,
        )
        failed = []
    except ReconstructionError as exc:
        result = exc.result
        failed = exc.failed_sites
    if args.output:
        aio.write_potential(result.potential, args.output)
        aio.write_site_csv(result.sites, args.csv or aio.default_csv_path(args.output))
    print(f"reconstructed sites {n_lo}..{n_hi}; c_inf = {reflection.c_inf!r}")
    if failed:
        print(f"non-converged sites: {failed}", file=sys.stderr)
        return EXIT_RECONSTRUCTION
    return EXIT_OK


def _check(label, value, bound) -> tuple[str, bool]:
    ok = value <= bound
    return f"{'PASS' if ok else 'FAIL'}  {label}: {value:.3e} (bound {bound:.0e})", ok


def cmd_roundtrip(args) -> int:
    config = _config_from_args(args)
    if args.input:
        q = aio.read_potential(args.input)
    else:
        seed = config.seed if config.seed is not None else 0
        q = _random_potential(seed, args.sites, args.amp)
        print(f"generated potential: seed={seed} sites={args.sites} amp={args.amp}")
    if len(q.values) == 0:
        print("empty potential: nothing to check")
        return EXIT_OK

    grid = make_grid(config.grid_n)
    t0 = time.perf_counter()
    data = compute_scattering(q, grid)
    t1 = time.perf_counter()
    reflection = prepare_reflection(data.r)
    t2 = time.perf_counter()
    window = config.window or (q.n_min, q.n_max)
    result = reconstruct_window(
        reflection, window[0], window[1],
        tol=config.tol, max_iter=config.max_iter, threads=config.threads,
    )
    t3 = time.perf_counter()

    truth = values_on_window(q, window[0], window[1])
    got = values_on_window(result.potential, window[0], window[1])
    scale = float(np.linalg.norm(truth))
    rel_err = float(np.linalg.norm(got - truth)) / (scale if scale > 0 else 1.0)

    det_err = float(np.max(np.abs(
        np.abs(data.a.samples) ** 2 - np.abs(data.b.samples) ** 2 - data.c_inf
    )))
    c_equiv = abs(reflection.c_inf - c_total(q))
    trace_err = float(np.max(np.abs(trace_a(reflection, grid.z) - data.a.samples)))
    dp, dm = reflection.delta_plus.samples, reflection.delta_minus.samples
    jump_err = float(np.max(np.abs(dp - dm * (1 - np.abs(data.r.samples) ** 2))))
    mod_err = float(np.max(np.abs(np.abs(dp * dm) - reflection.c_inf)))
    sup_r = float(np.max(np.abs(data.r.samples)))
    tilde_err = abs(float(np.max(np.abs(reflection.r_tilde.samples))) - sup_r)
    winding = winding_number(data.a)

    print(f"stage timings: scatter {t1 - t0:.3f}s, prepare {t2 - t1:.3f}s, reconstruct {t3 - t2:.3f}s")
    rows = [
        _check("determinant identity sup-node error", det_err, 1e-12),
        _check("winding number |w|", float(abs(winding)), 0.0),
        _check("conserved-product equivalence", c_equiv, 1e-10),
        _check("trace formula sup-node error", trace_err, 1e-9),
        _check("delta jump error", jump_err, 1e-12),
        _check("|delta+ delta-| - c_inf", mod_err, 1e-12),
        _check("sup|r_tilde| - sup|r|", tilde_err, 1e-12),
        _check("round-trip relative l2 error", rel_err, 1e-8),
    ]
    ok = True
    for line, passed in rows:
        print(line)
        ok = ok and passed
    return EXIT_OK if ok else EXIT_INVARIANT_FAILED


def cmd_evolve(args) -> int:
    config = _config_from_args(args)
    q0 = aio.read_potential(args.input)
    times = sorted(args.t)
    window = config.window or default_window(q0, times[-1])
    reports = []
    for t in times:
        report = oracle_compare(
            q0, t, dt=config.dt, window=window, grid_n=config.grid_n,
            tol=config.tol, max_iter=config.max_iter, method=args.method,
            threads=config.threads,
        )
        reports.append(report)
        print(f"t = {t}")
        if report.sup_error is not None:
            print(f"sup error (spectral vs rk4) = {report.sup_error!r}")
            print(f"l2 error = {report.l2_error!r}")
        if report.c_inf_drift is not None:
            print(f"c_inf drift (spectral) = {report.c_inf_drift!r}")
        if report.c_inf_drift_rk4 is not None:
            print(f"c_inf drift (rk4) = {report.c_inf_drift_rk4!r}")
    if args.output:
        aio.write_evolution_report(reports[-1], args.output)
        if len(reports) > 1:
            series_path = args.csv or Path(args.output).with_suffix(".series.csv")
            aio.write_evolution_series(reports, series_path)
    if args.plot:
        _emit_plots(args.plot, q0, reports[-1], times[-1], config.grid_n)

    breach = False
    for report in reports:
        if report.q_rk4 is not None and (report.edge_amplitude_rk4 or 0.0) > EDGE_BREACH:
            breach = True
        if report.q_ist is not None and edge_amplitude(report.q_ist) > EDGE_BREACH:
            breach = True
    if breach:
        print("mass reached the window edge; enlarge --window or the rk4 buffer", file=sys.stderr)
        return EXIT_WINDOW_BREACH
    return EXIT_OK


def _emit_plots(prefix, q0, report, t, grid_n) -> None:
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    fig, ax = plt.subplots(figsize=(7, 4))
    for q, label, marker in ((report.q_ist, "spectral", "o"), (report.q_rk4, "rk4", "x")):
        if q is not None:
            ax.plot(q.sites, np.abs(q.values), marker, ms=3, label=label)
    ax.set_xlabel("n")
    ax.set_ylabel("|q_n(t)|")
    ax.set_yscale("log")
    ax.legend()
    fig.tight_layout()
    fig.savefig(f"{prefix}_potential.png", dpi=120)
    plt.close(fig)

    grid = make_grid(grid_n)
    r_t = evolve_reflection(compute_scattering(q0, grid).r, t)
    fig, ax = plt.subplots(figsize=(7, 4))
    ax.plot(grid.theta, np.abs(r_t.samples))
    ax.set_xlabel("theta")
    ax.set_ylabel("|r(theta, t)|")
    fig.tight_layout()
    fig.savefig(f"{prefix}_reflection.png", dpi=120)
    plt.close(fig)


def _add_common(parser) -> None:
    parser.add_argument("--grid", type=int, default=512, help="circle grid size (even, >= 64)")
    parser.add_argument("--tol", type=float, default=1e-12, help="solver tolerance")
    parser.add_argument("--max-iter", type=int, default=200, help="iteration cap per site")
    parser.add_argument("--window", type=int, nargs=2, metavar=("LO", "HI"), default=None)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="alist",
        description="Direct and inverse scattering transforms for the defocusing "
        "Ablowitz-Ladik lattice.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    scatter = sub.add_parser("scatter", help="potential file -> scattering data file")
    scatter.add_argument("--input", required=True)
    scatter.add_argument("--output")
    _add_common(scatter)
    scatter.set_defaults(func=cmd_scatter)

    recon = sub.add_parser("reconstruct", help="scattering data file -> potential file")
    recon.add_argument("--input", required=True)
    recon.add_argument("--output")
    recon.add_argument("--csv", help="per-site report path (default: derived from --output)")
    _add_common(recon)
    recon.set_defaults(func=cmd_reconstruct)

    rt = sub.add_parser("roundtrip", help="scatter then reconstruct; check invariants")
    rt.add_argument("--input", help="potential file (omit to generate from --seed)")
    rt.add_argument("--seed", type=int, default=None, help="seed for the generated potential")
    rt.add_argument("--sites", type=int, default=32)
    rt.add_argument("--amp", type=float, default=0.3)
    _add_common(rt)
    rt.set_defaults(func=cmd_roundtrip)

    ev = sub.add_parser("evolve", help="integrate the initial-value problem")
    ev.add_argument("--input", required=True)
    ev.add_argument("--output")
    ev.add_argument("--t", type=float, nargs="+", required=True,
                    help="output time(s); several values emit a CSV time series")
    ev.add_argument("--dt", type=float, default=1e-3, help="rk4 step")
    ev.add_argument("--method", choices=("ist", "rk4", "both"), default="both")
    ev.add_argument("--csv", help="time-series path (default: derived from --output)")
    ev.add_argument("--plot", metavar="PREFIX", help="write PREFIX_{potential,reflection}.png")
    _add_common(ev)
    ev.set_defaults(func=cmd_evolve)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except aio.SchemaError as exc:
        print(f"schema error: {exc}", file=sys.stderr)
        return EXIT_SCHEMA
    except ReconstructionError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RECONSTRUCTION
    except ValueError as exc:
        print(f"invariant violation: {exc}", file=sys.stderr)
        return EXIT_INVARIANT_VIOLATION


if __name__ == "__main__":
    sys.exit(main())
