"""Command-line experiment drivers.

Subcommands:

    solve           evolve the full system, writing snapshots, a
                    (t, mass, energy) CSV, and a meson trace at x ~ 0
    converge-space  spatial convergence table against a fine reference
    converge-time   temporal convergence table with per-eps and
                    worst-over-eps rate rows
    limit-study     H1 distances to the two limit models over time
    validate        coefficient-oracle and scheme-equivalence suites

Every CSV starts with '#' comment lines carrying the full configuration,
so each table is self-describing. Sweeps parallelize across cells with
threads; results are deterministic regardless of thread count.
"""

from __future__ import annotations

import argparse
import math
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

from .config import ExperimentConfig, build_config, parse_config_file
from .diagnostics import energy, error_h2, mass, observed_orders
from .grid import Grid, make_grid
from .initial_data import benchmark_phi0, benchmark_phi1, benchmark_psi0
from .limits import advance_limit, eta_errors, initial_limit_state
from .reference import reference_solve
from .snapshots import load_snapshot, save_snapshot
from .stepper import FieldState, evolve, init_state
from .validation import (
    COEFFICIENT_TOL,
    EQUIVALENCE_TOL,
    coefficient_sweep,
    scheme_equivalence,
)

__all__ = ["main"]

# full-sweep extensions behind --full (kept off the desk-scale defaults)
_FULL_EPS = tuple(0.5**k for k in range(14))
_FULL_TAU = tuple(0.2 / 4**k for k in range(1, 7))

_DESK_EPS = tuple(0.5**k for k in range(10))
_DESK_TAU = tuple(0.2 / 4**k for k in range(1, 6))


def _floats(text: str) -> tuple[float, ...]:
    return tuple(float(part) for part in text.split(","))


def _ints(text: str) -> tuple[int, ...]:
    return tuple(int(part) for part in text.split(","))


def _eps_tag(eps: float) -> str:
    return f"{eps:g}".replace(".", "p").replace("-", "m")


def _config_from(args, command_defaults: dict) -> ExperimentConfig:
    file_values = parse_config_file(args.config) if args.config else None
    overrides = {}
    for name in (
        "eps", "tau", "mesh", "t_final", "output_dir", "threads", "seed", "snapshots",
    ):
        value = getattr(args, name, None)
        if value is not None:
            overrides[name] = value
    domain = getattr(args, "domain", None)
    if domain is not None:
        if len(domain) != 2:
            raise ValueError(f"--domain expects 'a,b', got {domain}")
        overrides["domain_a"], overrides["domain_b"] = domain
    if getattr(args, "initial_data", None) is not None:
        overrides["initial_data"] = args.initial_data
    if getattr(args, "full", False):
        overrides["full"] = True
    return build_config(file_values, defaults=command_defaults, **overrides)


def _write_csv(path: Path, title: str, cfg: ExperimentConfig, columns, rows) -> None:
    lines = [f"# kgspectral {title}"]
    lines.extend(f"# {entry}" for entry in cfg.dump_lines())
    lines.append(",".join(columns))
    for row in rows:
        lines.append(
            ",".join(f"{v:.5E}" if isinstance(v, float) else str(v) for v in row)
        )
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text("\n".join(lines) + "\n")


def _benchmark_fields(grid: Grid):
    x = grid.interior_nodes
    return benchmark_psi0(x), benchmark_phi0(x), benchmark_phi1(x)


def _single(values: tuple, what: str):
    if len(values) != 1:
        raise ValueError(f"this command uses a single {what}, got {values}")
    return values[0]


def _step_count(span: float, tau: float) -> int:
    steps = span / tau
    n = int(round(steps))
    if n < 0 or (span > 0 and abs(steps - n) > 1e-9 * steps):
        raise ValueError(
            f"time span {span} is not an integral number of steps of tau={tau}"
        )
    return n


def _run_cells(worker, cells, threads: int):
    """Evaluate worker over cells, optionally threaded; order preserved."""
    if threads <= 1 or len(cells) <= 1:
        return [worker(cell) for cell in cells]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(worker, cells))


# ---------------------------------------------------------------- solve


def _initial_state(cfg: ExperimentConfig, grid: Grid, eps: float) -> FieldState:
    if cfg.initial_data == "benchmark":
        psi0, phi0, phi1 = _benchmark_fields(grid)
        return init_state(psi0, phi0, phi1, grid, eps)
    state = load_snapshot(cfg.initial_data)
    if (state.grid.a, state.grid.b, state.grid.N) != (grid.a, grid.b, grid.N):
        raise ValueError(
            f"snapshot grid [{state.grid.a}, {state.grid.b}] N={state.grid.N} "
            f"does not match the configured grid [{grid.a}, {grid.b}] N={grid.N}"
        )
    return state


def cmd_solve(args) -> int:
    cfg = _config_from(args, {})
    n = _single(cfg.mesh, "mesh size")
    tau = _single(cfg.tau, "tau")
    grid = make_grid(cfg.domain_a, cfg.domain_b, n)
    out = Path(cfg.output_dir)
    x0_index = int(np.argmin(np.abs(grid.interior_nodes)))
    # a snapshot restart carries its own eps; cfg.eps drives benchmark runs only
    eps_cells = (
        list(cfg.eps)
        if cfg.initial_data == "benchmark"
        else [load_snapshot(cfg.initial_data).eps]
    )

    def run(eps: float):
        state = _initial_state(cfg, grid, eps)
        n_steps = _step_count(cfg.t_final - state.t, tau)
        snap_steps = sorted(
            {int(round(k * n_steps / max(cfg.snapshots - 1, 1)))
             for k in range(cfg.snapshots)}
        )
        tag = _eps_tag(eps)
        diag_rows = [(state.t, mass(state.Psi, grid), energy(state))]
        trace_rows = [(state.t, float(state.Phi[x0_index]))]
        snap_paths = []

        def emit(current: FieldState, index: int):
            path = out / f"state_eps{tag}_{index:04d}.snap"
            save_snapshot(path, current, tau=tau)
            snap_paths.append(path)

        emitted = 0
        if 0 in snap_steps:
            out.mkdir(parents=True, exist_ok=True)
            emit(state, emitted)
            emitted += 1

        remaining = set(snap_steps) - {0}

        def observer(i: int, current: FieldState):
            nonlocal emitted
            diag_rows.append((current.t, mass(current.Psi, grid), energy(current)))
            trace_rows.append((current.t, float(current.Phi[x0_index])))
            if (i + 1) in remaining:
                emit(current, emitted)
                emitted += 1

        evolve(state, tau, n_steps, observer=observer)
        _write_csv(out / f"solve_eps{tag}.csv", "solve", cfg,
                   ("t", "mass", "energy"), diag_rows)
        _write_csv(out / f"trace_eps{tag}.csv", "solve trace", cfg,
                   ("t", "phi_x0"), trace_rows)
        return tag, len(snap_paths)

    for tag, n_snaps in _run_cells(run, eps_cells, cfg.threads):
        print(f"eps tag {tag}: wrote {n_snaps} snapshots to {out}")
    return 0


# ------------------------------------------------------- converge-space


def cmd_converge_space(args) -> int:
    defaults = {
        "mesh": (64, 128, 256, 512, 1024),
        "tau": (2e-5,),
        "eps": (1.0, 0.25, 0.015625),
        "h_ref": 1.0 / 32.0,
        "tau_ref": 2e-5,
    }
    cfg = _config_from(args, defaults)
    tau = _single(cfg.tau, "tau")
    mesh = tuple(sorted(cfg.mesh))
    for coarse, fine in zip(mesh, mesh[1:]):
        if fine % coarse:
            raise ValueError(f"mesh sizes must be nested, {coarse} does not divide {fine}")
    if cfg.initial_data != "benchmark":
        raise ValueError("convergence sweeps run from the benchmark initial data")
    length = cfg.domain_b - cfg.domain_a
    n_ref = int(round(length / cfg.h_ref))
    for n in mesh:
        if n_ref % n:
            raise ValueError(
                f"reference mesh N={n_ref} is not a multiple of N={n}; "
                "choose a finer h_ref"
            )

    def run(eps: float):
        base = make_grid(cfg.domain_a, cfg.domain_b, mesh[0])
        ref = reference_solve(
            benchmark_psi0, benchmark_phi0, benchmark_phi1,
            base, eps, cfg.t_final, h_ref=cfg.h_ref, tau_ref=cfg.tau_ref,
        )
        errs_psi, errs_phi = [], []
        for n in mesh:
            grid = make_grid(cfg.domain_a, cfg.domain_b, n)
            psi0, phi0, phi1 = _benchmark_fields(grid)
            state = evolve(
                init_state(psi0, phi0, phi1, grid, eps),
                tau, _step_count(cfg.t_final, tau),
            )
            errs_psi.append(error_h2(state.Psi, ref.Psi, grid))
            errs_phi.append(error_h2(state.Phi, ref.Phi, grid))
        return errs_psi, errs_phi

    results = _run_cells(run, list(cfg.eps), cfg.threads)
    h_values = [(cfg.domain_b - cfg.domain_a) / n for n in mesh]
    columns = ["label"] + [f"h={h:.5E}" for h in h_values]
    out = Path(cfg.output_dir)

    for idx, which in ((0, "psi"), (1, "phi")):
        rows = []
        for eps, res in zip(cfg.eps, results):
            errs = res[idx]
            rows.append([f"eps={eps:.5E}"] + [float(e) for e in errs])
            if len(errs) > 1:
                rates = [""]
                for k in range(1, len(errs)):
                    if errs[k - 1] > 0 and errs[k] > 0:
                        factor = mesh[k] / mesh[k - 1]
                        rates.append(
                            f"{math.log(errs[k - 1] / errs[k]) / math.log(factor):.2f}"
                        )
                    else:
                        rates.append("")
                rows.append([f"rate(eps={eps:.5E})"] + rates)
        _write_csv(out / f"converge_space_{which}.csv", "converge-space", cfg,
                   columns, rows)
    print(f"wrote {out / 'converge_space_psi.csv'} and _phi.csv")
    return 0


# -------------------------------------------------------- converge-time


def _geometric_factor(taus: tuple[float, ...]) -> float:
    if len(taus) < 2:
        return 4.0
    factor = taus[0] / taus[1]
    for k in range(1, len(taus) - 1):
        if abs(taus[k] / taus[k + 1] - factor) > 1e-9 * factor:
            raise ValueError(f"tau list is not geometric: {taus}")
    if factor <= 1.0:
        raise ValueError("tau list must decrease")
    return factor


def cmd_converge_time(args) -> int:
    defaults = {
        "mesh": (1024,),
        "tau": _FULL_TAU if getattr(args, "full", False) else _DESK_TAU,
        "eps": _FULL_EPS if getattr(args, "full", False) else _DESK_EPS,
        "h_ref": 1.0 / 16.0,
        "tau_ref": 1e-5,
    }
    cfg = _config_from(args, defaults)
    n = _single(cfg.mesh, "mesh size")
    taus = tuple(sorted(cfg.tau, reverse=True))
    factor = _geometric_factor(taus)
    if cfg.initial_data != "benchmark":
        raise ValueError("convergence sweeps run from the benchmark initial data")
    grid = make_grid(cfg.domain_a, cfg.domain_b, n)
    psi0, phi0, phi1 = _benchmark_fields(grid)

    def run(cell):
        eps, kind = cell
        if kind == "ref":
            return reference_solve(
                benchmark_psi0, benchmark_phi0, benchmark_phi1,
                grid, eps, cfg.t_final, h_ref=cfg.h_ref, tau_ref=cfg.tau_ref,
            )
        tau = kind
        return evolve(
            init_state(psi0, phi0, phi1, grid, eps),
            tau, _step_count(cfg.t_final, tau),
        )

    cells = [(eps, "ref") for eps in cfg.eps]
    cells += [(eps, tau) for eps in cfg.eps for tau in taus]
    states = dict(zip(cells, _run_cells(run, cells, cfg.threads)))

    table_psi = np.empty((len(cfg.eps), len(taus)))
    table_phi = np.empty_like(table_psi)
    for i, eps in enumerate(cfg.eps):
        ref = states[(eps, "ref")]
        for j, tau in enumerate(taus):
            state = states[(eps, tau)]
            table_psi[i, j] = error_h2(state.Psi, ref.Psi, grid)
            table_phi[i, j] = error_h2(state.Phi, ref.Phi, grid)

    columns = ["label"] + [f"tau={tau:.5E}" for tau in taus]
    out = Path(cfg.output_dir)
    for table, which in ((table_psi, "psi"), (table_phi, "phi")):
        rows = []
        for i, eps in enumerate(cfg.eps):
            rows.append([f"eps={eps:.5E}"] + list(table[i]))
            if len(taus) > 1:
                rates = observed_orders(table[i], factor)
                rows.append([f"rate(eps={eps:.5E})", ""] +
                            [f"{r:.2f}" for r in rates])
        uniform = table.max(axis=0)
        rows.append(["uniform"] + list(uniform))
        if len(taus) > 1:
            rates = observed_orders(uniform, factor)
            rows.append(["rate(uniform)", ""] + [f"{r:.2f}" for r in rates])
        _write_csv(out / f"converge_time_{which}.csv", "converge-time", cfg,
                   columns, rows)
    print(f"wrote {out / 'converge_time_psi.csv'} and _phi.csv")
    return 0


# --------------------------------------------------------- limit-study


def _limit_memory_guard(n: int) -> None:
    # the stepper's batched transforms peak around 80 complex rows
    need = 80 * 16 * n
    if n > (1 << 21) or need > 2 * 2**30:
        raise ValueError(
            f"mesh N={n} exceeds the limit-study memory guard "
            f"(would need ~{need / 2**30:.1f} GiB of workspace)"
        )


def cmd_limit_study(args) -> int:
    defaults = {
        "domain_a": -512.0,
        "domain_b": 512.0,
        "mesh": (16384,),
        "tau": (1e-4,),
        "eps": (0.125, 0.0625, 0.03125),
        "snapshots": 11,
    }
    if getattr(args, "full", False):
        defaults["eps"] = tuple(0.5**k for k in range(3, 8))
    cfg = _config_from(args, defaults)
    n = _single(cfg.mesh, "mesh size")
    tau = _single(cfg.tau, "tau")
    _limit_memory_guard(n)
    if cfg.initial_data != "benchmark":
        raise ValueError("the limit study runs from the benchmark initial data")
    grid = make_grid(cfg.domain_a, cfg.domain_b, n)
    psi0, phi0, phi1 = _benchmark_fields(grid)
    n_steps = _step_count(cfg.t_final, tau)
    samples = sorted(
        {int(round(k * n_steps / max(cfg.snapshots - 1, 1)))
         for k in range(cfg.snapshots)}
    )

    def run(eps: float):
        sw0 = initial_limit_state(psi0, phi0, phi1, "wave_operator", eps)
        s0 = initial_limit_state(psi0, phi0, phi1, "schrodinger", eps)
        state = init_state(psi0, phi0, phi1, grid, eps)
        rows = []

        def record(current: FieldState):
            sw = advance_limit(sw0, grid, current.t)
            s = advance_limit(s0, grid, current.t)
            eta_sw, eta_s = eta_errors(current, sw, s)
            rows.append((current.t, eps, eta_sw, eta_s))

        if 0 in samples:
            record(state)
        remaining = set(samples) - {0}

        def observer(i: int, current: FieldState):
            if (i + 1) in remaining:
                record(current)

        evolve(state, tau, n_steps, observer=observer)
        return rows

    results = _run_cells(run, list(cfg.eps), cfg.threads)
    out = Path(cfg.output_dir)
    rows = [row for res in results for row in res]
    _write_csv(out / "limit_study.csv", "limit-study", cfg,
               ("t", "eps", "eta_sw", "eta_s"), rows)

    finals = {res[-1][1]: (res[-1][2], res[-1][3]) for res in results if res}
    ordered = sorted(finals, reverse=True)
    ratio_rows = []
    for coarse, fine in zip(ordered, ordered[1:]):
        ratio_rows.append((
            coarse, fine,
            finals[coarse][0] / finals[fine][0],
            finals[coarse][1] / finals[fine][1],
        ))
    _write_csv(out / "limit_ratios.csv", "limit-study ratios", cfg,
               ("eps_coarse", "eps_fine", "ratio_eta_sw", "ratio_eta_s"),
               ratio_rows)
    print(f"wrote {out / 'limit_study.csv'} and {out / 'limit_ratios.csv'}")
    return 0


# ------------------------------------------------------------ validate


def cmd_validate(args) -> int:
    seed = args.seed if args.seed is not None else 20260819
    failures = 0

    worst, _ = coefficient_sweep()
    ok = worst <= COEFFICIENT_TOL
    failures += not ok
    print(f"{'PASS' if ok else 'FAIL'} coefficient sweep: "
          f"worst |closed - quadrature| = {worst:.3E} (tol {COEFFICIENT_TOL:.0E})")

    worst = scheme_equivalence(seed=seed)
    ok = worst <= EQUIVALENCE_TOL
    failures += not ok
    print(f"{'PASS' if ok else 'FAIL'} scheme equivalence: "
          f"worst relative meson deviation = {worst:.3E} (tol {EQUIVALENCE_TOL:.0E})")
    return 1 if failures else 0


# -------------------------------------------------------------- parser


def _add_common(sub, *, seed=False):
    sub.add_argument("--config", help="flat key=value config file")
    sub.add_argument("--eps", type=_floats, help="comma-separated eps values")
    sub.add_argument("--tau", type=_floats, help="comma-separated time steps")
    sub.add_argument("--mesh", type=_ints, help="comma-separated grid sizes")
    sub.add_argument("--t-final", dest="t_final", type=float, help="final time")
    sub.add_argument("--domain", type=_floats, help="interval endpoints a,b")
    sub.add_argument("--out", dest="output_dir", help="output directory")
    sub.add_argument("--threads", type=int, help="parallel runs")
    sub.add_argument("--full", action="store_true",
                     help="run the complete (hours-long) sweep")
    if seed:
        sub.add_argument("--seed", type=int, help="RNG seed")


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="kgspectral",
        description="Multiscale spectral solver experiments for the "
                    "Klein-Gordon-Schroedinger system",
    )
    subs = parser.add_subparsers(dest="command", required=True)

    sub = subs.add_parser("solve", help="single runs with snapshots and diagnostics")
    _add_common(sub)
    sub.add_argument("--initial-data", dest="initial_data",
                     help="'benchmark' or a snapshot file to restart from")
    sub.add_argument("--snapshots", dest="snapshots", type=int,
                     help="number of evenly spaced snapshots")
    sub.set_defaults(func=cmd_solve)

    sub = subs.add_parser("converge-space", help="spatial convergence table")
    _add_common(sub)
    sub.set_defaults(func=cmd_converge_space)

    sub = subs.add_parser("converge-time", help="temporal convergence table")
    _add_common(sub)
    sub.set_defaults(func=cmd_converge_time)

    sub = subs.add_parser("limit-study", help="distance to the limit models")
    _add_common(sub)
    sub.add_argument("--snapshots", dest="snapshots", type=int,
                     help="number of sample times")
    sub.set_defaults(func=cmd_limit_study)

    sub = subs.add_parser("validate", help="run the validation suites")
    sub.add_argument("--seed", type=int, help="RNG seed")
    sub.set_defaults(func=cmd_validate)

    return parser


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except FloatingPointError as exc:
        print(f"solver failure: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
