#!/usr/bin/env python3
"""String breaking driven by each of the three couplings.

Runs three sweeps on an open lattice with charges at opposite corners and
writes one CSV per sweep:

  * h_x up at fixed h_z (electric tension breaks the string),
  * h_z up at fixed h_x (charge fluctuations break it),
  * J_p down at fixed fields (losing resonances breaks it).

The plaquette term stabilizes strings, so sweeping h_x at several J_p shows
the breaking point moving right.
"""

import argparse
import csv
import pathlib

import numpy as np

from z2strings.hamiltonian import two_charge_config
from z2strings.lattice import build_geometry
from z2strings.scan import (
    ScanSpec,
    SolverSettings,
    detect_breaking,
    run_scan,
    scan_rows_table,
)

HEADER = ("param", "value", "E0", "dE", "N", "degenerate", "residual")


def write_rows(path, rows):
    with open(path, "w", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(HEADER)
        writer.writerows(scan_rows_table(rows))


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out-dir", default="scan_results")
    parser.add_argument("--J-s", type=float, default=2.5)
    parser.add_argument("--tol", type=float, default=1e-8)
    args = parser.parse_args()

    out_dir = pathlib.Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    geometry = build_geometry(4, 3)
    charges = two_charge_config(geometry, (0, 0), (3, 2))
    solver = SolverSettings(tol=args.tol)

    def sweep(name, fixed, param, grid):
        spec = ScanSpec(geometry, charges, fixed, param, tuple(grid), solver)
        rows = run_scan(spec)
        write_rows(out_dir / f"{name}.csv", rows)
        point = detect_breaking(rows)
        label = f"{point.value:.3f}" if point else "none"
        print(f"{name}: breaking at {param} = {label}")

    for J_p in (0.0, 0.5):
        sweep(
            f"hx_sweep_Jp{J_p}",
            {"J_s": args.J_s, "J_p": J_p, "h_z": 1.0},
            "h_x",
            np.round(np.arange(0.5, 1.4001, 0.1), 10),
        )
    sweep(
        "hz_sweep",
        {"J_s": args.J_s, "J_p": 0.2, "h_x": 0.8},
        "h_z",
        np.round(np.arange(0.25, 2.5001, 0.25), 10),
    )
    sweep(
        "jp_sweep",
        {"J_s": args.J_s, "h_z": 0.2, "h_x": 1.1},
        "J_p",
        np.round(np.arange(0.6, -0.0001, -0.05), 10),
    )


if __name__ == "__main__":
    main()
