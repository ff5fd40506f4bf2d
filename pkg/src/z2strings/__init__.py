"""Z2 lattice gauge theory with static charges, at desk scale.

Exact ground states of the gauge-fixed Hamiltonian (star, plaquette,
transverse and electric terms over link spins), string-breaking parameter
scans, and the exact shortest-string / free-fermion effective model for
charges deep in the confined phase.
"""

__version__ = "0.1.0"

from .eigensolver import (
    ConvergenceError,
    GroundStateResult,
    SpectrumResult,
    ground_state,
    low_spectrum,
)
from .hamiltonian import (
    ChargeConfig,
    Couplings,
    HamiltonianOperator,
    embed_sector_vector,
    sector_matrix,
    two_charge_config,
    vacuum_charges,
    validate_sector,
    zero_particle_sector,
)
from .lattice import (
    LatticeGeometry,
    build_geometry,
    geometry_summary,
    plaquette_links,
    star_links,
)
from .observables import (
    ObservableReport,
    PotentialPoint,
    StringWeightReport,
    electric_field_map,
    field_map_rows,
    observable_report,
    particle_number_map,
    static_potential,
    string_weights,
)
from .scan import (
    BreakingPoint,
    ConfigError,
    ScanRow,
    ScanSpec,
    SolverSettings,
    detect_breaking,
    run_scan,
    scan_spec_from_config,
)
from .stringmodel import (
    FermionChain,
    FermionSpectrum,
    StringPatch,
    chain_for_patch,
    config_to_path,
    corner_count,
    enumerate_shortest_strings,
    fermion_spectrum,
    path_to_mask,
    single_particle_levels,
    slater_amplitudes,
    string_adjacency_hamiltonian,
)

__all__ = [name for name in dir() if not name.startswith("_")]
