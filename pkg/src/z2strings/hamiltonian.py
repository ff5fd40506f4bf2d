"""Gauge-fixed Z2 Hamiltonian with static charges as a matrix-free operator.

The model acts on the 2^n_links dimensional space of link spins and contains
four terms: a star term coupled to a background charge pattern, a plaquette
term, a transverse link field and an electric field,

    H = -J_s sum_r Q_r A_r - J_p sum_p B_p - h_z sum_b sigma^z_b
        - h_x sum_b sigma^x_b.

Everything is expressed in the sigma^x eigenbasis: a basis state is an integer
bitmask over links with bit b set when sigma^x = -1 on link b (an electric
line occupies the link). The star operator A_r is then diagonal,
A_r = (-1)^(set bits among the star's links); sigma^z_b flips bit b, and the
plaquette operator B_p flips the four bits of plaquette p. All matrix elements
are real, so H is real symmetric.

Dynamical matter is never stored: the occupation of site r is the derived
quantity n_r = (1 - Q_r <A_r>) / 2.

Operators are immutable after construction and safe for concurrent reads;
``apply`` is sequential and bit-for-bit reproducible for a fixed installation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .lattice import PERIODIC, LatticeGeometry

try:  # optional fused kernel; the numpy path below is the reference
    from numba import njit as _njit
except ImportError:  # pragma: no cover - exercised only without numba
    _njit = None

#: Toggle for the optional numba kernel (tests exercise both paths).
USE_NUMBA = _njit is not None

_FUSED_MIN_DIM = 1 << 14


@dataclass(frozen=True)
class Couplings:
    """The four energies of the model. Any finite real values are allowed."""

    J_s: float
    J_p: float
    h_z: float
    h_x: float

    def __post_init__(self):
        for name in ("J_s", "J_p", "h_z", "h_x"):
            value = float(getattr(self, name))
            if not math.isfinite(value):
                raise ValueError(f"coupling {name} must be finite, got {value!r}")
            object.__setattr__(self, name, value)

    def replace(self, **kwargs) -> "Couplings":
        values = {k: getattr(self, k) for k in ("J_s", "J_p", "h_z", "h_x")}
        values.update(kwargs)
        return Couplings(**values)


@dataclass(frozen=True)
class ChargeConfig:
    """Background charge Q_r = +-1 per site (-1 marks a static charge)."""

    q: np.ndarray

    def __post_init__(self):
        q = np.asarray(self.q, dtype=np.int8)
        if not np.all(np.abs(q) == 1):
            raise ValueError("charges must be +1 or -1")
        q = q.copy()
        q.flags.writeable = False
        object.__setattr__(self, "q", q)

    @property
    def n_negative(self) -> int:
        return int(np.sum(self.q == -1))

    def negative_sites(self) -> np.ndarray:
        return np.nonzero(self.q == -1)[0]


def vacuum_charges(geometry: LatticeGeometry) -> ChargeConfig:
    """The homogeneous sector: Q_r = +1 everywhere."""
    return ChargeConfig(np.ones(geometry.n_sites, dtype=np.int8))


def two_charge_config(geometry: LatticeGeometry, r1, r2) -> ChargeConfig:
    """Static charge pair: Q = -1 at the two given sites, +1 elsewhere.

    Sites may be given as indices or (x, y) pairs.
    """
    s1 = geometry.resolve_site(r1)
    s2 = geometry.resolve_site(r2)
    if s1 == s2:
        raise ValueError("the two charges must sit on distinct sites")
    q = np.ones(geometry.n_sites, dtype=np.int8)
    q[s1] = -1
    q[s2] = -1
    return ChargeConfig(q)


def validate_sector(geometry: LatticeGeometry, charges: ChargeConfig):
    """Check the charge pattern against the geometry's parity constraint.

    On a torus the product of all star operators is the identity, which forces
    an even number of -1 charges. Open or cylindrical boundaries accept any
    pattern (flux can terminate on the boundary). Returns None when the sector
    is consistent, otherwise a message naming the failure.
    """
    if geometry.bc_x == PERIODIC and geometry.bc_y == PERIODIC:
        n_neg = charges.n_negative
        if n_neg % 2 == 1:
            return (
                f"torus requires an even number of -1 charges "
                f"(product of all star operators is +1), got {n_neg}"
            )
    return None


def _parity(values: np.ndarray) -> np.ndarray:
    """Parity of the set bits of each entry (values must fit in 32 bits)."""
    v = values.copy()
    for shift in (16, 8, 4, 2, 1):
        v ^= v >> shift
    return (v & 1).astype(np.int8)


def _links_to_mask(links) -> int:
    mask = 0
    for b in links:
        mask |= 1 << int(b)
    return mask


def _xor_view_shape(n_links: int, mask: int):
    """Shape and slice realizing v[i ^ mask] as a strided view of v.

    Viewing the length 2^n array as nested blocks around each set bit of the
    mask, the XOR permutation is a reversal of the corresponding length-2
    axes.
    """
    bits = [b for b in range(n_links) if (mask >> b) & 1]
    shape = []
    prev = n_links
    for b in reversed(bits):
        shape.append(1 << (prev - b - 1))
        shape.append(2)
        prev = b
    shape.append(1 << prev)
    slices = tuple(
        slice(None, None, -1) if i % 2 == 1 else slice(None) for i in range(len(shape))
    )
    return tuple(shape), slices


_fused_matvec = None
if _njit is not None:

    @_njit(cache=True)
    def _fused_matvec(vec, diag, masks, coeffs, out):  # pragma: no cover - numba
        n = vec.shape[0]
        for i in range(n):
            acc = diag[i] * vec[i]
            for t in range(masks.shape[0]):
                acc -= coeffs[t] * vec[i ^ masks[t]]
            out[i] = acc


class HamiltonianOperator:
    """Matrix-free H for one (geometry, couplings, charge pattern) triple.

    ``plaquette_signs`` optionally flips the sign of J_p on selected
    plaquettes (entries +-1, default uniform +1).
    """

    def __init__(
        self,
        geometry: LatticeGeometry,
        couplings: Couplings,
        charges: ChargeConfig | None = None,
        plaquette_signs=None,
    ):
        if charges is None:
            charges = vacuum_charges(geometry)
        if len(charges.q) != geometry.n_sites:
            raise ValueError("charge pattern length does not match the geometry")
        if plaquette_signs is None:
            plaquette_signs = np.ones(geometry.n_plaquettes, dtype=np.int8)
        else:
            plaquette_signs = np.asarray(plaquette_signs, dtype=np.int8)
            if plaquette_signs.shape != (geometry.n_plaquettes,) or not np.all(
                np.abs(plaquette_signs) == 1
            ):
                raise ValueError("plaquette_signs must be +-1 per plaquette")
        self.geometry = geometry
        self.couplings = couplings
        self.charges = charges
        self.plaquette_signs = plaquette_signs
        self.n_links = geometry.n_links
        self.dimension = 1 << geometry.n_links
        self.star_masks = tuple(_links_to_mask(star) for star in geometry.star_table)
        self.plaquette_masks = tuple(
            _links_to_mask(row) for row in geometry.plaquette_table
        )
        self._offdiag = None
        self._diag = None

    # -- structure ---------------------------------------------------------

    @property
    def is_diagonal(self) -> bool:
        return self.couplings.J_p == 0.0 and self.couplings.h_z == 0.0

    @cached_property
    def _basis(self) -> np.ndarray:
        basis = np.arange(self.dimension, dtype=np.int64)
        basis.flags.writeable = False
        return basis

    def star_signs(self, site: int) -> np.ndarray:
        """A_r eigenvalue (+-1) of every basis state, as an int8 array."""
        return 1 - 2 * _parity(self._basis & self.star_masks[site])

    def link_signs(self, link: int) -> np.ndarray:
        """sigma^x eigenvalue (+-1) of every basis state on one link."""
        return (1 - 2 * ((self._basis >> link) & 1)).astype(np.int8)

    # -- diagonal ----------------------------------------------------------

    def diagonal(self) -> np.ndarray:
        """The diagonal of H (star + electric terms), cached, read-only."""
        if self._diag is None:
            c, q = self.couplings, self.charges.q
            diag = np.zeros(self.dimension)
            for site, mask in enumerate(self.star_masks):
                parity = _parity(self._basis & mask).astype(np.float64)
                diag -= c.J_s * float(q[site]) * (1.0 - 2.0 * parity)
            popcount = np.zeros(self.dimension)
            for b in range(self.n_links):
                popcount += (self._basis >> b) & 1
            diag -= c.h_x * (self.n_links - 2.0 * popcount)
            diag.flags.writeable = False
            self._diag = diag
        return self._diag

    def diagonal_energy(self, state: int) -> float:
        """Diagonal matrix element <state|H|state> of one basis state."""
        if not (0 <= state < self.dimension):
            raise ValueError(f"basis state {state} out of range")
        c, q = self.couplings, self.charges.q
        energy = 0.0
        for site, mask in enumerate(self.star_masks):
            a = 1 - 2 * ((state & mask).bit_count() & 1)
            energy -= c.J_s * float(q[site]) * a
        energy -= c.h_x * (self.n_links - 2 * state.bit_count())
        return energy

    # -- matvec ------------------------------------------------------------

    def _offdiagonal_terms(self):
        if self._offdiag is None:
            c = self.couplings
            terms = []
            if c.J_p != 0.0:
                for m, sign in zip(self.plaquette_masks, self.plaquette_signs):
                    terms.append((m, c.J_p * float(sign)))
            if c.h_z != 0.0:
                for b in range(self.n_links):
                    terms.append((1 << b, c.h_z))
            views = [
                (_xor_view_shape(self.n_links, m), coeff) for m, coeff in terms
            ]
            masks = np.array([m for m, _ in terms], dtype=np.int64)
            coeffs = np.array([coeff for _, coeff in terms])
            self._offdiag = (terms, views, masks, coeffs)
        return self._offdiag

    def apply(self, vec: np.ndarray) -> np.ndarray:
        """Return H @ vec without assembling a matrix."""
        vec = np.asarray(vec, dtype=np.float64)
        if vec.shape != (self.dimension,):
            raise ValueError(
                f"vector length {vec.shape} does not match dimension {self.dimension}"
            )
        diag = self.diagonal()
        _, views, masks, coeffs = self._offdiagonal_terms()
        if (
            USE_NUMBA
            and _fused_matvec is not None
            and self.dimension >= _FUSED_MIN_DIM
            and len(masks) > 0
        ):
            out = np.empty_like(vec)
            _fused_matvec(vec, diag, masks, coeffs, out)
            return out
        out = diag * vec
        for (shape, slices), coeff in views:
            out.reshape(shape)[...] -= coeff * vec.reshape(shape)[slices]
        return out

    def dense(self, limit: int = 4096) -> np.ndarray:
        """Assemble H as a dense array by applying to unit vectors."""
        if self.dimension > limit:
            raise ValueError(
                f"dense assembly refused at dimension {self.dimension} > {limit}"
            )
        unit = np.zeros(self.dimension)
        columns = np.empty((self.dimension, self.dimension))
        for i in range(self.dimension):
            unit[i] = 1.0
            columns[:, i] = self.apply(unit)
            unit[i] = 0.0
        return columns


# -- exact star sectors (h_z = 0) -------------------------------------------


def zero_particle_sector(operator: HamiltonianOperator) -> np.ndarray:
    """Basis states with Q_r A_r = +1 at every site (no dynamical matter).

    At h_z = 0 every A_r commutes with H, so these states span an exactly
    invariant block: the string manifold of the charge pattern.
    """
    keep = np.ones(operator.dimension, dtype=bool)
    q = operator.charges.q
    for site in range(operator.geometry.n_sites):
        keep &= operator.star_signs(site) * q[site] == 1
    return np.nonzero(keep)[0]


def sector_matrix(operator: HamiltonianOperator, indices: np.ndarray) -> np.ndarray:
    """Dense H restricted to an invariant star sector.

    Only valid at h_z = 0 (single bit flips leave any star sector). The
    indices must be closed under all plaquette flips.
    """
    if operator.couplings.h_z != 0.0:
        raise ValueError("star sectors are invariant only at h_z = 0")
    indices = np.asarray(indices, dtype=np.int64)
    position = {int(s): i for i, s in enumerate(indices)}
    d = len(indices)
    block = np.zeros((d, d))
    diag = operator.diagonal()
    block[np.arange(d), np.arange(d)] = diag[indices]
    c = operator.couplings
    if c.J_p != 0.0:
        for mask, sign in zip(operator.plaquette_masks, operator.plaquette_signs):
            for i, s in enumerate(indices):
                target = int(s) ^ mask
                j = position.get(target)
                if j is None:
                    raise ValueError("sector is not closed under plaquette flips")
                block[i, j] -= c.J_p * float(sign)
    return block


def embed_sector_vector(
    indices: np.ndarray, coefficients: np.ndarray, dimension: int
) -> np.ndarray:
    """Lift a sector-basis vector back to the full 2^n_links space."""
    full = np.zeros(dimension)
    full[np.asarray(indices, dtype=np.int64)] = coefficients
    return full
