"""Shared fixtures and the independent dense oracle.

The oracle assembles the Hamiltonian from explicit Kronecker products of
single-link 2x2 matrices in the sigma^x eigenbasis, touching none of the
bitmask arithmetic of the package. Basis-index bit b corresponds to Kronecker
factor position (n_links - 1 - b), i.e. the first factor is the most
significant bit.
"""

import numpy as np
import pytest

from z2strings.hamiltonian import vacuum_charges
from z2strings.lattice import OPEN, PERIODIC, build_geometry

SX = np.diag([1.0, -1.0])          # sigma^x: diagonal, bit 0 -> +1
SZ = np.array([[0.0, 1.0], [1.0, 0.0]])  # sigma^z: flips the bit
ID = np.eye(2)


def kron_on_links(n_links, links, op):
    """Kronecker chain with `op` on the given links and identity elsewhere."""
    factors = [ID] * n_links
    for b in links:
        factors[n_links - 1 - int(b)] = op
    matrix = factors[0]
    for factor in factors[1:]:
        matrix = np.kron(matrix, factor)
    return matrix


def kron_hamiltonian(geometry, couplings, charges=None, plaquette_signs=None):
    """Independent dense assembly of the full Hamiltonian."""
    if charges is None:
        charges = vacuum_charges(geometry)
    n = geometry.n_links
    dim = 1 << n
    matrix = np.zeros((dim, dim))
    for site, star in enumerate(geometry.star_table):
        matrix -= couplings.J_s * float(charges.q[site]) * kron_on_links(n, star, SX)
    for p, plaquette in enumerate(geometry.plaquette_table):
        sign = 1.0 if plaquette_signs is None else float(plaquette_signs[p])
        matrix -= couplings.J_p * sign * kron_on_links(n, plaquette, SZ)
    for b in range(n):
        matrix -= couplings.h_z * kron_on_links(n, [b], SZ)
        matrix -= couplings.h_x * kron_on_links(n, [b], SX)
    return matrix


def small_geometries(max_links=10):
    """Every boundary combination with at most `max_links` links."""
    geometries = []
    for Lx in range(2, 6):
        for Ly in range(2, 6):
            for bc_x in (OPEN, PERIODIC):
                for bc_y in (OPEN, PERIODIC):
                    geometry = build_geometry(Lx, Ly, bc_x, bc_y)
                    if geometry.n_links <= max_links:
                        geometries.append(geometry)
    return geometries


class MatrixOperator:
    """Wrap a dense symmetric matrix in the operator protocol."""

    def __init__(self, matrix):
        self.matrix = np.asarray(matrix, dtype=np.float64)
        self.dimension = self.matrix.shape[0]

    def apply(self, vec):
        return self.matrix @ vec

    def dense(self, limit=None):
        return self.matrix.copy()


@pytest.fixture
def open_4x3():
    return build_geometry(4, 3, OPEN, OPEN)


@pytest.fixture
def torus_2x2():
    return build_geometry(2, 2, PERIODIC, PERIODIC)
