"""Occupation maps, field maps, the static potential and string weights."""

import numpy as np
import pytest

from z2strings.eigensolver import ground_state
from z2strings.hamiltonian import (
    Couplings,
    HamiltonianOperator,
    embed_sector_vector,
    sector_matrix,
    two_charge_config,
    zero_particle_sector,
)
from z2strings.lattice import build_geometry
from z2strings.observables import (
    electric_field_map,
    field_map_rows,
    observable_report,
    particle_number_map,
    static_potential,
    string_weights,
)
from z2strings.stringmodel import (
    StringPatch,
    chain_for_patch,
    config_to_path,
    enumerate_shortest_strings,
    path_to_mask,
    slater_amplitudes,
)


def unit_state(dimension, index):
    state = np.zeros(dimension)
    state[index] = 1.0
    return state


@pytest.fixture
def charged_4x3(open_4x3):
    couplings = Couplings(J_s=2.5, J_p=0.0, h_z=0.0, h_x=0.8)
    charges = two_charge_config(open_4x3, (0, 0), (3, 2))
    return HamiltonianOperator(open_4x3, couplings, charges)


def test_particle_number_on_classical_states(charged_4x3, open_4x3):
    mask = path_to_mask(config_to_path((1, 1, 1, 0, 0), (0, 0), open_4x3))
    occupation, total = particle_number_map(
        unit_state(charged_4x3.dimension, mask), charged_4x3
    )
    assert total == pytest.approx(0.0, abs=1e-12)
    assert np.all(np.abs(occupation) < 1e-12)
    # broken string: no electric lines, two screening particles at the charges
    occupation, total = particle_number_map(
        unit_state(charged_4x3.dimension, 0), charged_4x3
    )
    assert total == pytest.approx(2.0, abs=1e-12)
    assert occupation[open_4x3.site_index(0, 0)] == pytest.approx(1.0)
    assert occupation[open_4x3.site_index(3, 2)] == pytest.approx(1.0)
    assert np.all((occupation > -1e-12) & (occupation < 1 + 1e-12))


def test_polarized_vacuum_is_empty():
    geometry = build_geometry(3, 2)
    op = HamiltonianOperator(geometry, Couplings(1.0, 0.1, 0.1, 50.0), None)
    result = ground_state(op)
    _, total = particle_number_map(result.vector, op)
    assert total < 0.01


def test_norm_precondition(charged_4x3):
    with pytest.raises(ValueError):
        particle_number_map(np.ones(charged_4x3.dimension), charged_4x3)
    with pytest.raises(ValueError):
        electric_field_map(2.0 * unit_state(charged_4x3.dimension, 0), charged_4x3)


def test_electric_field_on_basis_states(charged_4x3, open_4x3):
    field = electric_field_map(unit_state(charged_4x3.dimension, 0), charged_4x3)
    assert np.allclose(field, 1.0)
    links = config_to_path((1, 0, 1, 0, 1), (0, 0), open_4x3)
    field = electric_field_map(
        unit_state(charged_4x3.dimension, path_to_mask(links)), charged_4x3
    )
    expected = np.ones(17)
    expected[links] = -1.0
    assert np.allclose(field, expected)


def test_confined_ground_state_field_depression():
    # in-line charges on an open 4x2 lattice: the electric field collapses on
    # the connecting string and stays polarized elsewhere
    geometry = build_geometry(4, 2)
    charges = two_charge_config(geometry, (0, 0), (2, 0))
    op = HamiltonianOperator(geometry, Couplings(6.0, 0.3, 0.1, 2.0), charges)
    result = ground_state(op)
    field = electric_field_map(result.vector, op)
    inside = config_to_path((1, 1), (0, 0), geometry)
    outside = sorted(set(range(geometry.n_links)) - set(inside))
    assert field[inside].mean() < field[outside].mean() - 0.5
    _, total = particle_number_map(result.vector, op)
    assert total < 0.2


def test_observable_report(charged_4x3):
    result = ground_state(charged_4x3)
    report = observable_report(result, charged_4x3, baseline_energy=result.energy - 1.5)
    assert report.delta_e == pytest.approx(1.5)
    assert report.energy == result.energy
    assert report.n_total == pytest.approx(0.0, abs=1e-12)
    assert report.degenerate == result.degenerate
    assert len(report.site_occupation) == 12 and len(report.link_field) == 17


def test_field_map_rows(open_4x3):
    rows = field_map_rows(open_4x3, np.linspace(0, 1, 17))
    assert len(rows) == 17
    link, x, y, direction, value = rows[0]
    assert (link, x, y, direction) == (0, 0, 0, "x") and value == 0.0
    assert {row[3] for row in rows} == {"x", "y"}


def test_static_potential_classical_exact(open_4x3):
    for h_x, J_s in [(0.8, 2.5), (2.0, 2.5), (1.0, 0.9)]:
        couplings = Couplings(J_s=J_s, J_p=0.0, h_z=0.0, h_x=h_x)
        points = static_potential(open_4x3, couplings, [1, 2, 3])
        for point in points:
            assert point.potential == pytest.approx(
                min(2 * h_x * point.separation, 4 * J_s), abs=1e-12
            )


def test_static_potential_preconditions(open_4x3):
    couplings = Couplings(1.0, 0.0, 0.0, 1.0)
    with pytest.raises(ValueError):
        static_potential(open_4x3, couplings, [0])
    with pytest.raises(ValueError):
        static_potential(open_4x3, couplings, [4])


def test_static_potential_resonance_deficit():
    # a weak plaquette coupling lowers V(R) below the classical 2 h_x R by
    # an amount of order J_p^2 / h_x per unit length (virtual corner flips)
    geometry = build_geometry(4, 2)
    h_x, J_p = 2.0, 0.1
    couplings = Couplings(J_s=6.0, J_p=J_p, h_z=0.0, h_x=h_x)
    for point in static_potential(geometry, couplings, [1, 2, 3]):
        deficit = 2 * h_x * point.separation - point.potential
        assert 0.0 < deficit <= point.separation * J_p**2 / h_x


def sector_ground_vector(operator):
    indices = zero_particle_sector(operator)
    block = sector_matrix(operator, indices)
    _, vectors = np.linalg.eigh(block)
    return embed_sector_vector(indices, vectors[:, 0], operator.dimension)


def test_string_weights_sector_ground(open_4x3):
    charges = two_charge_config(open_4x3, (0, 0), (3, 2))
    op = HamiltonianOperator(open_4x3, Couplings(6.0, 0.2, 0.0, 8.0), charges)
    report = string_weights(sector_ground_vector(op), op, StringPatch(3, 2))
    assert len(report.configs) == 10
    assert report.total == pytest.approx(1.0, abs=1e-10)
    assert 0.0 < report.leakage < 0.05
    best = report.configs[int(np.argmax(report.weights))]
    assert best == (1, 0, 1, 0, 1)


def test_string_weights_converge_to_slater(open_4x3):
    charges = two_charge_config(open_4x3, (0, 0), (3, 2))
    patch = StringPatch(3, 2)
    slater_sq = slater_amplitudes(chain_for_patch(patch, 0.2)) ** 2
    deviations = []
    for h_x in (4.0, 8.0, 16.0):
        op = HamiltonianOperator(open_4x3, Couplings(6.0, 0.2, 0.0, h_x), charges)
        report = string_weights(sector_ground_vector(op), op, patch)
        renormalized = report.weights / (1.0 - report.leakage)
        deviations.append(np.max(np.abs(renormalized - slater_sq)))
    assert deviations[0] > deviations[1] > deviations[2]
    assert deviations[-1] < 0.01


def test_string_weights_flags_degeneracy(charged_4x3):
    result = ground_state(charged_4x3)
    assert result.degenerate  # classical string manifold
    report = string_weights(
        result.vector, charged_4x3, StringPatch(3, 2), degenerate=result.degenerate
    )
    assert report.degenerate
    # the returned vector is a single basis string, so one weight is 1
    assert report.weights.max() == pytest.approx(1.0, abs=1e-12)
    assert report.leakage == pytest.approx(0.0, abs=1e-12)


def test_string_weights_validation(open_4x3, charged_4x3):
    state = unit_state(charged_4x3.dimension, 0)
    with pytest.raises(ValueError):
        string_weights(state, charged_4x3, StringPatch(2, 2))
    free = HamiltonianOperator(open_4x3, charged_4x3.couplings, None)
    with pytest.raises(ValueError):
        string_weights(state, free, StringPatch(3, 2))
    anti = HamiltonianOperator(
        open_4x3, charged_4x3.couplings, two_charge_config(open_4x3, (0, 2), (3, 0))
    )
    with pytest.raises(ValueError):
        string_weights(state, anti, StringPatch(3, 2))


def test_maps_respect_diagonal_reflection():
    # square patch on a square lattice: occupation and field maps commute
    # with reflection across the patch diagonal
    geometry = build_geometry(3, 3)
    charges = two_charge_config(geometry, (0, 0), (2, 2))
    op = HamiltonianOperator(geometry, Couplings(6.0, 0.4, 0.0, 2.0), charges)
    vector = sector_ground_vector(op)
    occupation, _ = particle_number_map(vector, op)
    field = electric_field_map(vector, op)
    for x in range(3):
        for y in range(3):
            assert occupation[geometry.site_index(x, y)] == pytest.approx(
                occupation[geometry.site_index(y, x)], abs=1e-9
            )
    for link in range(geometry.n_links):
        x, y = geometry.site_xy(int(geometry.link_site[link]))
        axis = int(geometry.link_axis[link])
        mirror = geometry.link_index[geometry.site_index(y, x), 1 - axis]
        assert field[link] == pytest.approx(field[int(mirror)], abs=1e-9)
