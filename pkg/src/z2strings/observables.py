"""Measured quantities of a ground state: occupations, fields, potentials.

All functions are pure in (state vector, operator) and safe to evaluate
concurrently across scan points. Matter is a derived quantity throughout:
n_r = (1 - Q_r <A_r>) / 2.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import stringmodel
from .eigensolver import ConvergenceError, GroundStateResult, ground_state
from .hamiltonian import (
    ChargeConfig,
    Couplings,
    HamiltonianOperator,
    two_charge_config,
    vacuum_charges,
)
from .lattice import LatticeGeometry
from .stringmodel import StringPatch

NORM_TOL = 1e-8


def _check_norm(vector: np.ndarray, dimension: int) -> np.ndarray:
    vector = np.asarray(vector, dtype=np.float64)
    if vector.shape != (dimension,):
        raise ValueError("state vector length does not match the operator")
    norm = np.linalg.norm(vector)
    if abs(norm - 1.0) > NORM_TOL:
        raise ValueError(f"state vector norm deviates from 1 by {abs(norm - 1.0):.2e}")
    return vector


def particle_number_map(vector, operator: HamiltonianOperator):
    """Per-site occupation n_r and the total particle number N."""
    vector = _check_norm(vector, operator.dimension)
    weights = vector * vector
    q = operator.charges.q
    occupation = np.empty(operator.geometry.n_sites)
    for site in range(operator.geometry.n_sites):
        a_mean = float(weights @ operator.star_signs(site))
        occupation[site] = 0.5 * (1.0 - float(q[site]) * a_mean)
    return occupation, float(occupation.sum())


def electric_field_map(vector, operator: HamiltonianOperator) -> np.ndarray:
    """Per-link <sigma^x>; +1 on polarized links, -1 on an electric line."""
    vector = _check_norm(vector, operator.dimension)
    weights = vector * vector
    field = np.empty(operator.n_links)
    for link in range(operator.n_links):
        field[link] = float(weights @ operator.link_signs(link))
    return field


@dataclass
class ObservableReport:
    """Bundle of the scalar and map observables of one state."""

    energy: float
    delta_e: float | None
    n_total: float
    site_occupation: np.ndarray
    link_field: np.ndarray
    degenerate: bool


def observable_report(
    result: GroundStateResult,
    operator: HamiltonianOperator,
    baseline_energy: float | None = None,
) -> ObservableReport:
    occupation, total = particle_number_map(result.vector, operator)
    field = electric_field_map(result.vector, operator)
    delta_e = None if baseline_energy is None else result.energy - baseline_energy
    return ObservableReport(
        energy=result.energy,
        delta_e=delta_e,
        n_total=total,
        site_occupation=occupation,
        link_field=field,
        degenerate=result.degenerate,
    )


def field_map_rows(geometry: LatticeGeometry, values) -> list[tuple]:
    """CSV-ready rows (link_id, base_x, base_y, direction, value)."""
    axis_name = ("x", "y")
    rows = []
    for link, value in enumerate(np.asarray(values, dtype=np.float64)):
        x, y = geometry.site_xy(int(geometry.link_site[link]))
        rows.append((link, x, y, axis_name[int(geometry.link_axis[link])], float(value)))
    return rows


@dataclass
class PotentialPoint:
    separation: int
    energy_charged: float
    energy_free: float
    potential: float


def static_potential(
    geometry: LatticeGeometry,
    couplings: Couplings,
    separations,
    **solver_options,
) -> list[PotentialPoint]:
    """V(R) = E0(charges R apart in-line) - E0(no charges).

    Charges are placed along x in the middle row, centered; each requested R
    must fit, i.e. 1 <= R <= Lx - 1 on an open axis. Solver failures abort
    with :class:`ConvergenceError`.
    """
    y = geometry.Ly // 2
    points = []
    free = ground_state(
        HamiltonianOperator(geometry, couplings, vacuum_charges(geometry)),
        **solver_options,
    )
    if not free.converged:
        raise ConvergenceError("charge-free baseline did not converge")
    for separation in separations:
        separation = int(separation)
        if separation < 1:
            raise ValueError("charge separation must be at least 1 link")
        x0 = (geometry.Lx - 1 - separation) // 2
        if x0 < 0 or x0 + separation >= geometry.Lx:
            raise ValueError(
                f"separation {separation} does not fit an Lx={geometry.Lx} lattice"
            )
        charges = two_charge_config(geometry, (x0, y), (x0 + separation, y))
        charged = ground_state(
            HamiltonianOperator(geometry, couplings, charges), **solver_options
        )
        if not charged.converged:
            raise ConvergenceError(f"ground state at separation {separation} did not converge")
        points.append(
            PotentialPoint(
                separation=separation,
                energy_charged=charged.energy,
                energy_free=free.energy,
                potential=charged.energy - free.energy,
            )
        )
    return points


@dataclass
class StringWeightReport:
    """Squared overlaps with each shortest string plus everything else."""

    patch: StringPatch
    configs: list
    weights: np.ndarray
    leakage: float
    degenerate: bool

    @property
    def total(self) -> float:
        return float(self.weights.sum() + self.leakage)


def string_weights(
    vector,
    operator: HamiltonianOperator,
    patch: StringPatch,
    degenerate: bool = False,
) -> StringWeightReport:
    """Resolve a state over the shortest-string manifold of the charge pair.

    The operator must carry exactly two -1 charges sitting at the lower-left
    and upper-right corners of the given patch. Weights follow the canonical
    configuration order of :mod:`z2strings.stringmodel`; leakage is the weight
    outside the manifold, so weights and leakage sum to one.
    """
    vector = _check_norm(vector, operator.dimension)
    geometry = operator.geometry
    negatives = operator.charges.negative_sites()
    if len(negatives) != 2:
        raise ValueError("string weights require exactly two static charges")
    (x1, y1), (x2, y2) = sorted(geometry.site_xy(int(s)) for s in negatives)
    if not (x2 > x1 and y2 > y1):
        raise ValueError(
            "charges must sit at the lower-left and upper-right patch corners"
        )
    if (x2 - x1, y2 - y1) != (patch.l1, patch.l2):
        raise ValueError(
            f"patch ({patch.l1}, {patch.l2}) does not match the charge pair "
            f"separation ({x2 - x1}, {y2 - y1})"
        )
    configs = stringmodel.enumerate_shortest_strings(patch)
    masks = [
        stringmodel.path_to_mask(stringmodel.config_to_path(c, (x1, y1), geometry))
        for c in configs
    ]
    amplitudes = vector[np.asarray(masks, dtype=np.int64)]
    weights = amplitudes * amplitudes
    remainder = vector.copy()
    remainder[np.asarray(masks, dtype=np.int64)] = 0.0
    leakage = float(remainder @ remainder)
    return StringWeightReport(
        patch=patch,
        configs=configs,
        weights=weights,
        leakage=leakage,
        degenerate=degenerate,
    )
