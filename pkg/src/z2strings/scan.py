"""Coupling scans, string-breaking detection and strict JSON configuration.

A scan sweeps one of the four couplings over a grid, recomputing the ground
state of the charged sector and of the charge-free baseline independently at
every grid point (the baseline is never cached across couplings). The
breaking point is read off the total particle number crossing the midpoint of
its jump.

The JSON configuration schema is strict: unknown keys anywhere are rejected
and missing keys are listed. Sections:

    geometry  {Lx, Ly, bc_x, bc_y}
    charges   [[x1, y1], [x2, y2]] or null
    couplings {J_s, J_p, h_z, h_x}   (the swept one must be absent in a scan)
    scan      {param, grid}          grid = [..values..] or {start, stop, step}
    solver    {tol, max_iter, seed, levels}   (all optional)
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .eigensolver import DEFAULT_MAX_ITER, DEFAULT_TOL, ground_state
from .hamiltonian import (
    ChargeConfig,
    Couplings,
    HamiltonianOperator,
    two_charge_config,
    validate_sector,
)
from .lattice import BOUNDARY_KINDS, LatticeGeometry, build_geometry
from .observables import particle_number_map

COUPLING_NAMES = ("J_s", "J_p", "h_z", "h_x")


class ConfigError(ValueError):
    """A configuration document violates the schema."""


@dataclass(frozen=True)
class SolverSettings:
    tol: float = DEFAULT_TOL
    max_iter: int = DEFAULT_MAX_ITER
    seed: int = 0
    levels: int = 1

    def ground_state_kwargs(self) -> dict:
        return {"tol": self.tol, "max_iter": self.max_iter, "seed": self.seed}


@dataclass(frozen=True)
class ScanSpec:
    """A validated scan: geometry, charge pair, fixed couplings, grid."""

    geometry: LatticeGeometry
    charges: ChargeConfig | None
    fixed_couplings: dict
    param: str
    grid: tuple
    solver: SolverSettings = field(default_factory=SolverSettings)


def validate_spec(spec: ScanSpec) -> None:
    if spec.param not in COUPLING_NAMES:
        raise ConfigError(f"unknown scan parameter {spec.param!r}")
    if spec.param in spec.fixed_couplings:
        raise ConfigError(
            f"swept parameter {spec.param!r} also appears in the fixed couplings"
        )
    missing = [
        name
        for name in COUPLING_NAMES
        if name != spec.param and name not in spec.fixed_couplings
    ]
    if missing:
        raise ConfigError(f"missing fixed couplings: {', '.join(missing)}")
    diffs = np.diff(np.asarray(spec.grid, dtype=np.float64))
    if len(diffs) and not (np.all(diffs > 0) or np.all(diffs < 0)):
        raise ConfigError("scan grid must be strictly monotone")
    if spec.charges is not None:
        message = validate_sector(spec.geometry, spec.charges)
        if message is not None:
            raise ConfigError(f"inconsistent charge sector: {message}")


@dataclass
class ScanRow:
    param: str
    value: float
    energy: float
    delta_e: float
    n_total: float
    degenerate: bool
    residual: float
    converged: bool
    error: str | None = None


def run_scan(spec: ScanSpec) -> list[ScanRow]:
    """Execute the scan; one row per grid point, failures recorded per row."""
    validate_spec(spec)
    rows = []
    kwargs = spec.solver.ground_state_kwargs()
    for value in spec.grid:
        value = float(value)
        couplings = Couplings(**{**spec.fixed_couplings, spec.param: value})
        try:
            charged = HamiltonianOperator(spec.geometry, couplings, spec.charges)
            result = ground_state(charged, **kwargs)
            _, n_total = particle_number_map(result.vector, charged)
            converged = result.converged
            if spec.charges is None:
                delta_e = 0.0
            else:
                baseline = ground_state(
                    HamiltonianOperator(spec.geometry, couplings, None), **kwargs
                )
                delta_e = result.energy - baseline.energy
                converged = converged and baseline.converged
            rows.append(
                ScanRow(
                    param=spec.param,
                    value=value,
                    energy=result.energy,
                    delta_e=delta_e,
                    n_total=n_total,
                    degenerate=result.degenerate,
                    residual=result.residual,
                    converged=converged,
                )
            )
        except Exception as exc:  # keep scanning; the row records the failure
            rows.append(
                ScanRow(
                    param=spec.param,
                    value=value,
                    energy=math.nan,
                    delta_e=math.nan,
                    n_total=math.nan,
                    degenerate=False,
                    residual=math.nan,
                    converged=False,
                    error=str(exc),
                )
            )
    return rows


@dataclass(frozen=True)
class BreakingPoint:
    """Interpolated crossing(s) of the particle number through threshold."""

    value: float
    crossings: tuple

    @property
    def unique(self) -> bool:
        return len(self.crossings) == 1


def detect_breaking(rows, threshold: float = 1.0):
    """Locate where the total particle number crosses the threshold.

    Works in grid order for either sweep direction. Returns None when N never
    reaches the threshold; with multiple crossings, ``value`` is the first one
    in sweep order and all of them are reported.
    """
    points = [
        (row.value, row.n_total)
        for row in rows
        if row.error is None and math.isfinite(row.n_total)
    ]
    crossings = []
    for (v0, n0), (v1, n1) in zip(points, points[1:]):
        d0, d1 = n0 - threshold, n1 - threshold
        if d0 == 0.0:
            if not crossings or crossings[-1] != v0:
                crossings.append(v0)
        elif d0 * d1 < 0.0:
            crossings.append(v0 + d0 / (d0 - d1) * (v1 - v0))
    if points and points[-1][1] == threshold:
        if not crossings or crossings[-1] != points[-1][0]:
            crossings.append(points[-1][0])
    if not crossings:
        return None
    return BreakingPoint(value=crossings[0], crossings=tuple(crossings))


# -- strict JSON configuration ----------------------------------------------


def _check_keys(mapping, required, optional, where):
    if not isinstance(mapping, dict):
        raise ConfigError(f"{where} must be an object")
    unknown = sorted(set(mapping) - set(required) - set(optional))
    if unknown:
        raise ConfigError(f"unknown key(s) in {where}: {', '.join(unknown)}")
    missing = sorted(set(required) - set(mapping))
    if missing:
        raise ConfigError(f"missing required key(s) in {where}: {', '.join(missing)}")


def _number(value, where):
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"{where} must be a number")
    value = float(value)
    if not math.isfinite(value):
        raise ConfigError(f"{where} must be finite")
    return value


def geometry_from_config(section) -> LatticeGeometry:
    _check_keys(section, ("Lx", "Ly", "bc_x", "bc_y"), (), "geometry")
    for name in ("Lx", "Ly"):
        if not isinstance(section[name], int) or isinstance(section[name], bool):
            raise ConfigError(f"geometry.{name} must be an integer")
        if section[name] < 2:
            raise ConfigError(f"geometry.{name} must be at least 2")
    for name in ("bc_x", "bc_y"):
        if section[name] not in BOUNDARY_KINDS:
            raise ConfigError(
                f"geometry.{name} must be one of {list(BOUNDARY_KINDS)}"
            )
    return build_geometry(section["Lx"], section["Ly"], section["bc_x"], section["bc_y"])


def charges_from_config(value, geometry: LatticeGeometry):
    if value is None:
        return None
    if (
        not isinstance(value, list)
        or len(value) != 2
        or not all(isinstance(site, list) and len(site) == 2 for site in value)
    ):
        raise ConfigError("charges must be null or [[x1, y1], [x2, y2]]")
    (x1, y1), (x2, y2) = value
    for coord in (x1, y1, x2, y2):
        if not isinstance(coord, int) or isinstance(coord, bool):
            raise ConfigError("charge coordinates must be integers")
    try:
        return two_charge_config(geometry, (x1, y1), (x2, y2))
    except (IndexError, ValueError) as exc:
        raise ConfigError(f"invalid charges: {exc}") from exc


def couplings_from_config(section, exclude: str | None = None) -> dict:
    names = tuple(n for n in COUPLING_NAMES if n != exclude)
    _check_keys(section, names, (), "couplings")
    return {name: _number(section[name], f"couplings.{name}") for name in names}


def solver_from_config(section) -> SolverSettings:
    if section is None:
        return SolverSettings()
    _check_keys(section, (), ("tol", "max_iter", "seed", "levels"), "solver")
    settings = {}
    if "tol" in section:
        settings["tol"] = _number(section["tol"], "solver.tol")
        if settings["tol"] <= 0:
            raise ConfigError("solver.tol must be positive")
    for name in ("max_iter", "seed", "levels"):
        if name in section:
            if not isinstance(section[name], int) or isinstance(section[name], bool):
                raise ConfigError(f"solver.{name} must be an integer")
            settings[name] = section[name]
    if settings.get("max_iter", 1) < 1:
        raise ConfigError("solver.max_iter must be at least 1")
    if settings.get("levels", 1) < 1:
        raise ConfigError("solver.levels must be at least 1")
    return SolverSettings(**settings)


def grid_from_config(value) -> tuple:
    if isinstance(value, list):
        return tuple(_number(entry, "scan.grid entry") for entry in value)
    _check_keys(value, ("start", "stop", "step"), (), "scan.grid")
    start = _number(value["start"], "scan.grid.start")
    stop = _number(value["stop"], "scan.grid.stop")
    step = _number(value["step"], "scan.grid.step")
    if step == 0.0:
        raise ConfigError("scan.grid.step must be nonzero")
    count = int(math.floor((stop - start) / step + 1e-9)) + 1
    if count < 0:
        count = 0
    return tuple(start + step * i for i in range(count))


def scan_spec_from_config(config) -> ScanSpec:
    """Build and validate a ScanSpec from a parsed JSON document."""
    _check_keys(
        config, ("geometry", "charges", "couplings", "scan"), ("solver",), "config"
    )
    geometry = geometry_from_config(config["geometry"])
    charges = charges_from_config(config["charges"], geometry)
    section = config["scan"]
    _check_keys(section, ("param", "grid"), (), "scan")
    param = section["param"]
    if param not in COUPLING_NAMES:
        raise ConfigError(f"scan.param must be one of {list(COUPLING_NAMES)}")
    fixed = couplings_from_config(config["couplings"], exclude=param)
    spec = ScanSpec(
        geometry=geometry,
        charges=charges,
        fixed_couplings=fixed,
        param=param,
        grid=grid_from_config(section["grid"]),
        solver=solver_from_config(config.get("solver")),
    )
    validate_spec(spec)
    return spec


def point_config(config, charges_required: bool = True):
    """Parse a single-point (no sweep) configuration document.

    Returns (geometry, charges, couplings, solver). Used by the ground-state
    and potential entry points; the latter passes charges_required=False and
    rejects explicit charges.
    """
    required = ("geometry", "couplings")
    optional = ("solver", "charges") if not charges_required else ("solver",)
    if charges_required:
        required = ("geometry", "charges", "couplings")
    _check_keys(config, required, optional, "config")
    geometry = geometry_from_config(config["geometry"])
    charges = charges_from_config(config.get("charges"), geometry)
    if not charges_required and charges is not None:
        raise ConfigError("this entry point places its own charges; set charges to null")
    if charges is not None:
        message = validate_sector(geometry, charges)
        if message is not None:
            raise ConfigError(f"inconsistent charge sector: {message}")
    couplings = Couplings(**couplings_from_config(config["couplings"]))
    solver = solver_from_config(config.get("solver"))
    return geometry, charges, couplings, solver


def scan_rows_table(rows) -> list[tuple]:
    """CSV-ready rows under the header param,value,E0,dE,N,degenerate,residual."""
    return [
        (
            row.param,
            row.value,
            row.energy,
            row.delta_e,
            row.n_total,
            int(row.degenerate),
            row.residual,
        )
        for row in rows
    ]
