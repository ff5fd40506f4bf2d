"""Shortest strings between two charges and their free-fermion dual.

Two static charges at opposite corners of an l1 x l2 patch are joined by
C(l1+l2, l1) monotone staircase strings. A string is encoded as a binary
tuple with l1 ones (horizontal moves) and l2 zeros (vertical moves); the
plaquette term exchanges adjacent (0,1) <-> (1,0) pairs, i.e. it flips one
corner of the string. Reading ones as occupied sites makes this exactly
nearest-neighbor hopping of N = l1 fermions on an open chain of length
L = l1 + l2 with hopping amplitude J_p, so the string manifold inherits the
exact open-chain spectrum and the ground state carries Slater-determinant
weights.

Configurations are always listed in ascending lexicographic order; other
modules index into the same ordering.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .lattice import LatticeGeometry

DENSE_LIMIT = 20_000


@dataclass(frozen=True)
class StringPatch:
    """Rectangular patch spanned by the charge pair: l1 columns, l2 rows."""

    l1: int
    l2: int

    def __post_init__(self):
        if self.l1 < 0 or self.l2 < 0 or self.l1 + self.l2 < 1:
            raise ValueError(f"invalid patch ({self.l1}, {self.l2})")

    @property
    def length(self) -> int:
        return self.l1 + self.l2

    @property
    def n_strings(self) -> int:
        return math.comb(self.length, self.l1)


@dataclass(frozen=True)
class FermionChain:
    """N free fermions hopping on an open chain of L sites."""

    length: int
    n_fermions: int
    hopping: float

    def __post_init__(self):
        if self.length < 1:
            raise ValueError("chain length must be positive")
        if not 0 <= self.n_fermions <= self.length:
            raise ValueError("fermion number must lie in [0, length]")


def chain_for_patch(patch: StringPatch, hopping: float) -> FermionChain:
    """The dual chain of a patch: L = l1 + l2 sites at filling l1 / L."""
    return FermionChain(length=patch.length, n_fermions=patch.l1, hopping=hopping)


def enumerate_shortest_strings(patch: StringPatch) -> list[tuple[int, ...]]:
    """All C(l1+l2, l1) staircase configurations, lexicographically ascending."""
    length = patch.length
    configs = []
    for positions in itertools.combinations(range(length), patch.l1):
        config = [0] * length
        for p in positions:
            config[p] = 1
        configs.append(tuple(config))
    return sorted(configs)


def corner_count(config) -> int:
    """Number of direction changes along the string."""
    return sum(1 for a, b in zip(config, config[1:]) if a != b)


def config_to_path(config, origin, geometry: LatticeGeometry) -> list[int]:
    """Link ids of the staircase walked from origin: 1 steps +x, 0 steps +y.

    Raises when the walk requires a link that does not exist (path leaves the
    lattice through an open boundary).
    """
    site = geometry.resolve_site(origin)
    x, y = geometry.site_xy(site)
    links = []
    for move in config:
        axis = 0 if move == 1 else 1
        s = geometry.site_index(x, y)
        link = geometry.link_index[s, axis]
        if link < 0:
            raise ValueError(
                f"path leaves the lattice at site ({x}, {y}) moving "
                f"{'+x' if axis == 0 else '+y'}"
            )
        links.append(int(link))
        if axis == 0:
            x += 1
            x %= geometry.Lx
        else:
            y += 1
            y %= geometry.Ly
    return links


def path_to_mask(links) -> int:
    """Bitmask (basis-state index) of a link path."""
    mask = 0
    for b in links:
        mask |= 1 << int(b)
    return mask


def string_adjacency_hamiltonian(
    patch: StringPatch, hopping: float, max_configs: int = DENSE_LIMIT
) -> np.ndarray:
    """Corner-flip Hamiltonian over the shortest strings.

    Entry -J_p connects configurations differing by one adjacent
    transposition; the common electric energy 2 h_x l is dropped, so the
    diagonal is zero.
    """
    if patch.n_strings > max_configs:
        raise ValueError(
            f"patch has {patch.n_strings} strings, above the dense limit {max_configs}"
        )
    configs = enumerate_shortest_strings(patch)
    position = {c: i for i, c in enumerate(configs)}
    n = len(configs)
    matrix = np.zeros((n, n))
    for config, i in position.items():
        for site in range(len(config) - 1):
            if config[site] != config[site + 1]:
                swapped = list(config)
                swapped[site], swapped[site + 1] = swapped[site + 1], swapped[site]
                matrix[i, position[tuple(swapped)]] = -hopping
    return matrix


def single_particle_levels(chain: FermionChain) -> np.ndarray:
    """Open-chain levels eps_k = -2 J cos(k pi / (L+1)), k = 1..L."""
    k = np.arange(1, chain.length + 1)
    return -2.0 * chain.hopping * np.cos(k * np.pi / (chain.length + 1))


@dataclass
class FermionSpectrum:
    single_particle: np.ndarray
    many_body: np.ndarray       # all C(L, N) subset sums, ascending
    ground_energy: float


def fermion_spectrum(chain: FermionChain) -> FermionSpectrum:
    """Exact many-body spectrum by subset sums over single-particle levels."""
    levels = single_particle_levels(chain)
    sums = [
        float(sum(combo))
        for combo in itertools.combinations(levels, chain.n_fermions)
    ]
    many_body = np.sort(np.asarray(sums))
    ground = float(np.sort(levels)[: chain.n_fermions].sum())
    return FermionSpectrum(
        single_particle=levels, many_body=many_body, ground_energy=ground
    )


def slater_amplitudes(chain: FermionChain) -> np.ndarray:
    """Ground-state amplitude per string configuration (canonical order).

    Occupied positions of a configuration are the indices of its ones
    (chain site j = tuple position + 1); the amplitude is the determinant of
    the N lowest open-chain orbitals phi_k(j) = sqrt(2/(L+1)) sin(k pi j/(L+1))
    evaluated at those positions. The squared amplitudes sum to one.
    """
    L, N = chain.length, chain.n_fermions
    levels = single_particle_levels(chain)
    occupied_k = 1 + np.argsort(levels, kind="stable")[:N]
    sites = np.arange(1, L + 1)
    orbitals = np.sqrt(2.0 / (L + 1)) * np.sin(
        np.outer(occupied_k, sites) * np.pi / (L + 1)
    )
    configs = enumerate_shortest_strings(StringPatch(l1=N, l2=L - N))
    amplitudes = np.empty(len(configs))
    for i, config in enumerate(configs):
        columns = [j for j, move in enumerate(config) if move == 1]
        if N == 0:
            amplitudes[i] = 1.0
        else:
            amplitudes[i] = np.linalg.det(orbitals[:, columns])
    return amplitudes


def string_model_rows(patch: StringPatch, hopping: float) -> list[tuple]:
    """CSV-ready rows: (config bitstring, corners, amplitude, probability)."""
    configs = enumerate_shortest_strings(patch)
    amplitudes = slater_amplitudes(chain_for_patch(patch, hopping))
    return [
        (
            "".join(str(t) for t in config),
            corner_count(config),
            float(amp),
            float(amp * amp),
        )
        for config, amp in zip(configs, amplitudes)
    ]
