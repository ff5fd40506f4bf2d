#!/usr/bin/env python3
"""Classical string breaking: scan h_x at J_p = h_z = 0 and locate the jump.

With the plaquette and transverse fields switched off the Hamiltonian is
diagonal and the scan is exact: the string of length l costs 2 h_x l, the
broken configuration 4 J_s, so the particle number jumps by 2 at
h_x = 2 J_s / l.
"""

import argparse

import numpy as np

from z2strings.hamiltonian import two_charge_config
from z2strings.lattice import build_geometry
from z2strings.scan import ScanSpec, SolverSettings, detect_breaking, run_scan


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--Lx", type=int, default=4)
    parser.add_argument("--Ly", type=int, default=3)
    parser.add_argument("--J-s", type=float, default=2.5)
    parser.add_argument("--step", type=float, default=0.05)
    args = parser.parse_args()

    geometry = build_geometry(args.Lx, args.Ly)
    charges = two_charge_config(geometry, (0, 0), (args.Lx - 1, args.Ly - 1))
    length = (args.Lx - 1) + (args.Ly - 1)
    critical = 2 * args.J_s / length
    grid = tuple(np.round(np.arange(0.5 * critical, 1.5 * critical, args.step), 12))
    spec = ScanSpec(
        geometry=geometry,
        charges=charges,
        fixed_couplings={"J_s": args.J_s, "J_p": 0.0, "h_z": 0.0},
        param="h_x",
        grid=grid,
        solver=SolverSettings(),
    )
    rows = run_scan(spec)
    print(f"{'h_x':>8} {'E0':>12} {'dE':>10} {'N':>6}")
    for row in rows:
        print(f"{row.value:8.3f} {row.energy:12.4f} {row.delta_e:10.4f} {row.n_total:6.2f}")
    point = detect_breaking(rows)
    print(f"\ndetected h_x* = {point.value:.4f}   exact 2 J_s / l = {critical:.4f}")


if __name__ == "__main__":
    main()
