"""Command-line entry points.

Subcommands: describe, ground-state, scan, potential, string-model. JSON
configuration comes from a file path or stdin ("-"); tabular results are
written as CSV, reports as JSON, to --out or stdout. Exit codes: 0 success,
1 configuration error, 2 solver failure.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from contextlib import contextmanager

import numpy as np

from . import __version__
from .eigensolver import ConvergenceError, ground_state, low_spectrum
from .hamiltonian import HamiltonianOperator
from .lattice import BOUNDARY_KINDS, build_geometry, geometry_summary
from .observables import (
    electric_field_map,
    field_map_rows,
    particle_number_map,
    static_potential,
)
from .scan import (
    ConfigError,
    detect_breaking,
    point_config,
    run_scan,
    scan_rows_table,
    scan_spec_from_config,
)
from .stringmodel import StringPatch, string_model_rows

SCAN_HEADER = ("param", "value", "E0", "dE", "N", "degenerate", "residual")
POTENTIAL_HEADER = ("R", "E0_charged", "E0_free", "V")
STRING_MODEL_HEADER = ("config", "corners", "amplitude", "probability")
CONVERGENCE_HEADER = ("iteration", "ritz_value", "residual")


def _load_config(path: str) -> dict:
    try:
        if path == "-":
            text = sys.stdin.read()
        else:
            with open(path, "r", encoding="utf-8") as handle:
                text = handle.read()
    except OSError as exc:
        raise ConfigError(f"cannot read config: {exc}") from exc
    try:
        config = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"malformed JSON in config: {exc}") from exc
    if not isinstance(config, dict):
        raise ConfigError("config document must be a JSON object")
    return config


@contextmanager
def _open_out(path):
    if path in (None, "-"):
        yield sys.stdout
    else:
        with open(path, "w", encoding="utf-8", newline="") as handle:
            yield handle


def _write_csv(path, header, rows):
    with _open_out(path) as handle:
        writer = csv.writer(handle)
        writer.writerow(header)
        writer.writerows(rows)


def _write_json(path, document):
    with _open_out(path) as handle:
        json.dump(document, handle, indent=2)
        handle.write("\n")


def _cmd_describe(args) -> int:
    geometry = build_geometry(args.Lx, args.Ly, args.bc_x, args.bc_y)
    _write_json(args.out, geometry_summary(geometry))
    return 0


def _cmd_ground_state(args) -> int:
    config = _load_config(args.config)
    geometry, charges, couplings, solver = point_config(config, charges_required=True)
    operator = HamiltonianOperator(geometry, couplings, charges)
    result = ground_state(
        operator, keep_log=args.log_convergence is not None, **solver.ground_state_kwargs()
    )
    occupation, n_total = particle_number_map(result.vector, operator)
    field = electric_field_map(result.vector, operator)
    report = {
        "energy": result.energy,
        "delta_e": None,
        "n_total": n_total,
        "residual": result.residual,
        "iterations": result.iterations,
        "converged": result.converged,
        "degenerate": result.degenerate,
        "gap": result.gap,
        "site_occupation": occupation.tolist(),
        "link_field": field.tolist(),
    }
    if charges is not None:
        baseline = ground_state(
            HamiltonianOperator(geometry, couplings, None), **solver.ground_state_kwargs()
        )
        report["delta_e"] = result.energy - baseline.energy
        if not baseline.converged:
            report["converged"] = False
    if solver.levels > 1:
        spectrum = low_spectrum(operator, solver.levels, **solver.ground_state_kwargs())
        report["energies"] = spectrum.energies.tolist()
        if not spectrum.converged:
            report["converged"] = False
    if args.field_csv is not None:
        _write_csv(
            args.field_csv,
            ("link_id", "base_x", "base_y", "direction", "value"),
            field_map_rows(geometry, field),
        )
    if args.log_convergence is not None:
        spectrum = low_spectrum(
            operator, min(2, operator.dimension), keep_log=True,
            **solver.ground_state_kwargs(),
        )
        _write_csv(args.log_convergence, CONVERGENCE_HEADER, spectrum.log)
    _write_json(args.out, report)
    return 0 if report["converged"] else 2


def _cmd_scan(args) -> int:
    spec = scan_spec_from_config(_load_config(args.config))
    rows = run_scan(spec)
    _write_csv(args.out, SCAN_HEADER, scan_rows_table(rows))
    if args.breaking:
        point = detect_breaking(rows)
        if point is None:
            print("no breaking point detected", file=sys.stderr)
        else:
            print(
                f"breaking at {spec.param} = {point.value:.6g}"
                + ("" if point.unique else f" (all crossings: {point.crossings})"),
                file=sys.stderr,
            )
    if any(not row.converged or row.error is not None for row in rows):
        return 2
    return 0


def _cmd_potential(args) -> int:
    config = _load_config(args.config)
    geometry, _, couplings, solver = point_config(config, charges_required=False)
    try:
        separations = [int(token) for token in args.separations.split(",") if token]
    except ValueError as exc:
        raise ConfigError(f"invalid --separations: {exc}") from exc
    if not separations:
        raise ConfigError("--separations must list at least one distance")
    try:
        points = static_potential(
            geometry, couplings, separations, **solver.ground_state_kwargs()
        )
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    _write_csv(
        args.out,
        POTENTIAL_HEADER,
        [
            (p.separation, p.energy_charged, p.energy_free, p.potential)
            for p in points
        ],
    )
    return 0


def _cmd_string_model(args) -> int:
    try:
        patch = StringPatch(args.l1, args.l2)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    _write_csv(args.out, STRING_MODEL_HEADER, string_model_rows(patch, args.jp))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="z2strings",
        description=(
            "Exact diagonalization of the 2+1D Z2 gauge theory with static "
            "charges: ground states, string-breaking scans and the "
            "shortest-string fermion model."
        ),
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("describe", help="print geometry index tables as JSON")
    p.add_argument("--Lx", type=int, required=True)
    p.add_argument("--Ly", type=int, required=True)
    p.add_argument("--bc-x", choices=BOUNDARY_KINDS, default="open")
    p.add_argument("--bc-y", choices=BOUNDARY_KINDS, default="open")
    p.add_argument("--out", default=None, help="output path (default stdout)")
    p.set_defaults(func=_cmd_describe)

    p = sub.add_parser("ground-state", help="solve one parameter point")
    p.add_argument("--config", required=True, help="JSON config path or - for stdin")
    p.add_argument("--out", default=None, help="JSON report path (default stdout)")
    p.add_argument("--field-csv", default=None, help="also write the <sigma^x> map")
    p.add_argument(
        "--log-convergence", default=None, help="write the solver convergence log CSV"
    )
    p.set_defaults(func=_cmd_ground_state)

    p = sub.add_parser("scan", help="sweep one coupling over a grid")
    p.add_argument("--config", required=True)
    p.add_argument("--out", default=None, help="CSV path (default stdout)")
    p.add_argument(
        "--breaking", action="store_true", help="report the detected breaking point"
    )
    p.set_defaults(func=_cmd_scan)

    p = sub.add_parser("potential", help="static potential V(R) for in-line charges")
    p.add_argument("--config", required=True, help="config with charges null/absent")
    p.add_argument("--separations", required=True, help="comma list, e.g. 1,2,3")
    p.add_argument("--out", default=None)
    p.set_defaults(func=_cmd_potential)

    p = sub.add_parser("string-model", help="shortest-string fermion model table")
    p.add_argument("--l1", type=int, required=True)
    p.add_argument("--l2", type=int, required=True)
    p.add_argument("--jp", type=float, default=1.0, help="hopping strength (default 1)")
    p.add_argument("--out", default=None)
    p.set_defaults(func=_cmd_string_model)
    return parser


def cli_main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        code = exc.code if isinstance(exc.code, int) else 1
        return 0 if code == 0 else 1
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 1
    except ConvergenceError as exc:
        print(f"solver failure: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return 1


def main() -> None:
    sys.exit(cli_main())


if __name__ == "__main__":
    main()
