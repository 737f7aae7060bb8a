"""Command-line interface.

Exit codes: 0 success, 2 domain or configuration error, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import cmath
import dataclasses
import math
import sys
from pathlib import Path

from . import __version__
from .config import RunConfig, load_config
from .errors import ConfigError, NumericalError, ParameterDomainError
from .experiments import (
    FIELD_COLUMNS,
    SWEEP_COLUMNS,
    SWEEP_MIN_OMEGA,
    SweepSpec,
    dressed_experiment,
    field_rows,
    partial_conversion_experiment,
    run_single,
    shapes_experiment,
    sweep_omega,
    timebin_experiment,
)
from .medium import derive, rb87_dressed_preset, validity
from .oracle import OracleSettings, integrate_pde, relative_l2
from .pulses import photon_number
from .reporting import RunManifest, dumps, write_json, write_manifest, write_table

EXIT_DOMAIN = 2
EXIT_NUMERICAL = 3


def _add_common(p: argparse.ArgumentParser):
    p.add_argument("--config", type=Path, help="INI config file or a run manifest (.json)")
    omega = p.add_mutually_exclusive_group()
    omega.add_argument("--omega", type=float, help="drive Rabi frequency in units of Gamma_ref")
    omega.add_argument("--omega-si", type=float, help="drive Rabi frequency in rad/s")
    p.add_argument("--out", type=Path, help="output file (CSV) or directory for multi-file commands")
    p.add_argument("--grid-points", type=int, help="number of time samples")
    p.add_argument("--z-planes", type=int, help="planes used for the conservation residual (>= 2)")
    p.add_argument("--nodes", type=int, help="Gauss-Legendre nodes for the kernel integral")
    p.add_argument("--force-validity", action="store_true", help="allow drives below the validity guard")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="slowlight-qfc", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("check", help="validity diagnostics for one drive")
    _add_common(p)

    p = sub.add_parser("propagate", help="single run, waveform CSV")
    _add_common(p)
    p.add_argument("--oracle", action="store_true", help="use the PDE integrator instead of the kernel")
    p.add_argument("--oracle-steps", type=int, default=512)

    p = sub.add_parser("sweep", help="quantum efficiency versus drive")
    _add_common(p)
    p.add_argument("--omega-min", type=float, default=3.0)
    p.add_argument("--omega-max", type=float, default=30.0)
    p.add_argument("--points", type=int, default=55)
    p.add_argument("--workers", type=int, default=1)

    p = sub.add_parser("shapes", help="exit waveforms for one input shape")
    _add_common(p)
    p.add_argument("--shape", choices=("gaussian", "double_hump"))
    p.add_argument("--beta-zero", action="store_true", help="switch the parametric coupling off")

    p = sub.add_parser("partial", help="partial conversion waveforms at several drives")
    _add_common(p)
    p.add_argument("--omegas", type=float, nargs="+", default=[6.0, 18.0])

    p = sub.add_parser("timebin", help="time-bin qubit transfer")
    _add_common(p)
    p.add_argument("--a", type=float, default=1 / math.sqrt(2), help="|a|; |b| follows from normalization")
    p.add_argument("--phase", type=float, default=0.0, help="relative phase of b in radians")
    p.add_argument("--tau-over-T", type=float, default=10.0)

    p = sub.add_parser("dressed", help="dressed-state scheme (780 nm <-> 1.47 um)")
    _add_common(p)

    p = sub.add_parser("oracle-compare", help="kernel solution against the PDE integrator")
    _add_common(p)
    p.add_argument("--oracle-steps", type=int, default=512)
    return parser


def _load_run(args) -> RunConfig:
    run = load_config(args.config) if args.config else RunConfig()
    changes = {}
    if args.omega is not None:
        changes["omega_over_gamma"] = args.omega
    elif args.omega_si is not None:
        changes["omega_over_gamma"] = args.omega_si / run.medium.Gamma_ref
    if args.grid_points is not None:
        changes["grid_points"] = args.grid_points
    if args.z_planes is not None:
        changes["z_planes"] = args.z_planes
    if args.nodes is not None:
        changes["quad_nodes"] = args.nodes
    return dataclasses.replace(run, **changes) if changes else run


def _run_config(args) -> RunConfig:
    run = _load_run(args)
    if run.omega_over_gamma < SWEEP_MIN_OMEGA and not args.force_validity:
        raise ConfigError(
            f"Omega = {run.omega_over_gamma:g} Gamma is below the validity guard of "
            f"{SWEEP_MIN_OMEGA:g} Gamma; use --force-validity"
        )
    return run


def _manifest(args, run: RunConfig, params=None, grid=None, **extra) -> RunManifest:
    arguments = {k: (str(v) if isinstance(v, Path) else v) for k, v in vars(args).items()}
    return RunManifest(
        config=run.flat(),
        derived=params.to_dict() if params is not None else {},
        grid=dataclasses.asdict(grid) if grid is not None else {"n_points": run.grid_points},
        command=args.command,
        extra={"arguments": arguments, **extra},
    )


def _emit(args, payload):
    print(dumps(payload))


def cmd_check(args):
    run = _run_config(args)
    report = validity(run.medium, run.Omega, run.T)
    payload = {"omega_over_gamma": run.omega_over_gamma, "derived": derive(run.medium, run.Omega).to_dict(),
               "validity": report.to_dict()}
    if args.out:
        write_json(args.out, payload)
        write_manifest(args.out, _manifest(args, run, derive(run.medium, run.Omega)))
    _emit(args, payload)


def cmd_propagate(args):
    run = _run_config(args)
    res = run_single(run, oracle=args.oracle, oracle_settings=OracleSettings(args.oracle_steps))
    payload = {"method": res.output.method, "report": res.report.to_dict(), "validity": res.validity.to_dict()}
    if res.output.error_estimate is not None:
        payload["error_estimate"] = res.output.error_estimate
    if args.out:
        write_table(args.out, FIELD_COLUMNS, field_rows(res.output))
        write_manifest(args.out, _manifest(args, run, res.params, res.output.grid, method=res.output.method))
    _emit(args, payload)


def cmd_sweep(args):
    run = _run_config(args)
    spec = SweepSpec(args.omega_min, args.omega_max, args.points, run, args.force_validity)
    rows = sweep_omega(spec, workers=args.workers)
    if args.out:
        write_table(args.out, SWEEP_COLUMNS, (r.as_tuple() for r in rows))
        write_manifest(args.out, _manifest(args, run, omega_min=spec.omega_min, omega_max=spec.omega_max,
                                           n_points=spec.n_points))
    best = max(rows, key=lambda r: r.qe)
    _emit(args, {"rows": len(rows), "peak_qe": best.qe, "peak_omega_over_gamma": best.omega_over_gamma})


def cmd_shapes(args):
    run = _run_config(args)
    result = shapes_experiment(run, args.shape, beta_zero=args.beta_zero)
    if args.out:
        write_table(args.out, result.columns, result.rows)
        write_manifest(args.out, _manifest(args, run, result.result.params, result.result.output.grid,
                                           shape=args.shape or run.shape))
    _emit(args, {"report": result.report.to_dict()})


def cmd_partial(args):
    run = _run_config(args)
    results = partial_conversion_experiment(run, args.omegas)
    payload = []
    for res in results:
        entry = {"omega_over_gamma": res.omega_over_gamma, "ordering": res.ordering, "report": res.report.to_dict()}
        if args.out:
            path = Path(args.out) / f"partial_omega_{res.omega_over_gamma:g}.csv"
            write_table(path, res.columns, res.rows)
            sub = dataclasses.replace(run, omega_over_gamma=res.omega_over_gamma)
            write_manifest(path, _manifest(args, sub, derive(sub.medium, sub.Omega)))
            write_json(path.with_suffix(".report.json"), entry)
        payload.append(entry)
    _emit(args, payload)


def cmd_timebin(args):
    run = _run_config(args)
    if not 0 <= args.a <= 1:
        raise ParameterDomainError(f"--a must lie in [0, 1], got {args.a!r}")
    a = complex(args.a)
    b = math.sqrt(max(0.0, 1 - args.a**2)) * cmath.exp(1j * args.phase)
    result = timebin_experiment(run, a, b, args.tau_over_T * run.T)
    rep = result.report
    phase = rep.relative_phase if abs(rep.a_out) > 0 and abs(rep.b_out) > 0 else None
    payload = {"fidelity": rep.fidelity, "relative_phase": phase, "input_phase": args.phase,
               "report": rep.to_dict(), "conversion": result.conversion.to_dict()}
    print(f"time-bin fidelity: {rep.fidelity:.12f}", file=sys.stderr)
    if args.out:
        write_table(args.out, result.columns, result.rows)
        write_manifest(args.out, _manifest(args, run, derive(run.medium, run.Omega), a=a, b=b,
                                           tau=args.tau_over_T * run.T))
    _emit(args, payload)


def cmd_dressed(args):
    run = _load_run(args)
    dressed = run.dressed or rb87_dressed_preset()
    omega = None if args.omega is None and args.omega_si is None else run.omega_over_gamma
    result = dressed_experiment(dressed, omega, run)
    payload = {"omega_over_gamma": result.omega_over_gamma, "labels": result.labels,
               "derived": result.params.to_dict(), "report": result.report.to_dict()}
    if args.out:
        write_json(args.out, payload)
        write_manifest(args.out, _manifest(args, dataclasses.replace(run, dressed=dressed), result.params))
    _emit(args, payload)


def cmd_oracle_compare(args):
    run = _run_config(args)
    res = run_single(run)
    oracle = integrate_pde(res.input, res.input * 0, run.medium.L, res.params, OracleSettings(args.oracle_steps))
    diff = relative_l2(res.output, oracle)
    payload = {"relative_l2": diff, "oracle_error_estimate": oracle.error_estimate,
               "qe_analytic": res.report.qe, "qe_oracle": oracle.n2 / photon_number(res.input)}
    if args.out:
        rows = ((t, abs(a) ** 2, abs(b) ** 2, abs(c) ** 2, abs(d) ** 2) for t, a, b, c, d in
                zip(res.output.grid.times, res.output.phi1, res.output.phi2, oracle.phi1, oracle.phi2))
        write_table(args.out, ("t_s", "abs2_phi1_analytic", "abs2_phi2_analytic", "abs2_phi1_oracle",
                               "abs2_phi2_oracle"), rows)
        write_manifest(args.out, _manifest(args, run, res.params, res.output.grid, oracle_steps=args.oracle_steps))
    _emit(args, payload)


COMMANDS = {
    "check": cmd_check,
    "propagate": cmd_propagate,
    "sweep": cmd_sweep,
    "shapes": cmd_shapes,
    "partial": cmd_partial,
    "timebin": cmd_timebin,
    "dressed": cmd_dressed,
    "oracle-compare": cmd_oracle_compare,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        COMMANDS[args.command](args)
    except (ParameterDomainError, ConfigError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    except NumericalError as exc:
        print(f"numerical failure: {exc} {exc.diagnostics}", file=sys.stderr)
        return EXIT_NUMERICAL
    return 0
