"""Rectangular lattice geometry: sites, oriented links, stars and plaquettes.

Spin-1/2 link variables live on the links of an Lx x Ly square lattice with
independently chosen open or periodic boundaries per axis. This module only
builds the index tables; operators over the links are assembled elsewhere.

Indexing conventions are frozen (bitmask layouts and file formats depend on
them):

* Sites are row-major: ``site = y * Lx + x`` with ``0 <= x < Lx``,
  ``0 <= y < Ly``.
* Links are site-major, direction-minor: sites are visited in index order and
  each contributes its outgoing +x link (when present), then its outgoing +y
  link (when present). A link exists only if both endpoints exist (wrapping
  on a periodic axis), so there are no dangling links at open boundaries.
* Plaquettes are indexed by their lower-left (base) site, in site order. The
  four boundary links are stored as (bottom, left, top, right).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

OPEN = "open"
PERIODIC = "periodic"
BOUNDARY_KINDS = (OPEN, PERIODIC)


@dataclass(frozen=True)
class LatticeGeometry:
    """Immutable index tables for one lattice.

    Build through :func:`build_geometry`. All arrays are read-only, so a
    geometry can be shared freely between threads and workers.
    """

    Lx: int
    Ly: int
    bc_x: str
    bc_y: str
    n_sites: int
    n_links: int
    n_plaquettes: int
    link_site: np.ndarray        # (n_links,)  base site of each link
    link_axis: np.ndarray        # (n_links,)  0 = +x, 1 = +y
    link_index: np.ndarray       # (n_sites, 2) link id or -1 when absent
    star_table: tuple            # per site: ndarray of incident link ids
    plaquette_table: np.ndarray  # (n_plaquettes, 4) links (bottom, left, top, right)
    plaquette_site: np.ndarray   # (n_plaquettes,) lower-left site of the square

    def site_index(self, x: int, y: int) -> int:
        if not (0 <= x < self.Lx and 0 <= y < self.Ly):
            raise IndexError(f"site ({x}, {y}) outside {self.Lx} x {self.Ly} lattice")
        return y * self.Lx + x

    def site_xy(self, site: int) -> tuple[int, int]:
        if not (0 <= site < self.n_sites):
            raise IndexError(f"site index {site} out of range")
        return site % self.Lx, site // self.Lx

    def neighbor(self, site: int, axis: int, step: int = 1):
        """Neighboring site index along an axis, or None past an open edge."""
        x, y = self.site_xy(site)
        if axis == 0:
            x += step
            if not 0 <= x < self.Lx:
                if self.bc_x != PERIODIC:
                    return None
                x %= self.Lx
        else:
            y += step
            if not 0 <= y < self.Ly:
                if self.bc_y != PERIODIC:
                    return None
                y %= self.Ly
        return y * self.Lx + x

    def resolve_site(self, site) -> int:
        """Accept either a site index or an (x, y) pair."""
        if isinstance(site, (tuple, list)):
            return self.site_index(int(site[0]), int(site[1]))
        site = int(site)
        if not (0 <= site < self.n_sites):
            raise IndexError(f"site index {site} out of range")
        return site


def build_geometry(Lx: int, Ly: int, bc_x: str = OPEN, bc_y: str = OPEN) -> LatticeGeometry:
    """Construct the index tables for an Lx x Ly lattice.

    Both extents must be at least 2; any combination of open/periodic
    boundaries is supported.
    """
    Lx, Ly = int(Lx), int(Ly)
    if Lx < 2 or Ly < 2:
        raise ValueError(f"lattice extents must be >= 2, got {Lx} x {Ly}")
    if bc_x not in BOUNDARY_KINDS or bc_y not in BOUNDARY_KINDS:
        raise ValueError(f"boundary kinds must be one of {BOUNDARY_KINDS}")

    n_sites = Lx * Ly
    link_index = np.full((n_sites, 2), -1, dtype=np.int64)
    link_site, link_axis = [], []
    for y in range(Ly):
        for x in range(Lx):
            s = y * Lx + x
            if x + 1 < Lx or bc_x == PERIODIC:
                link_index[s, 0] = len(link_site)
                link_site.append(s)
                link_axis.append(0)
            if y + 1 < Ly or bc_y == PERIODIC:
                link_index[s, 1] = len(link_site)
                link_site.append(s)
                link_axis.append(1)
    link_site = np.asarray(link_site, dtype=np.int64)
    link_axis = np.asarray(link_axis, dtype=np.int64)

    def _neighbor(s, axis, step):
        x, y = s % Lx, s // Lx
        if axis == 0:
            x += step
            if not 0 <= x < Lx:
                if bc_x != PERIODIC:
                    return None
                x %= Lx
        else:
            y += step
            if not 0 <= y < Ly:
                if bc_y != PERIODIC:
                    return None
                y %= Ly
        return y * Lx + x

    stars = []
    for s in range(n_sites):
        incident = []
        for axis in (0, 1):
            if link_index[s, axis] >= 0:
                incident.append(link_index[s, axis])
            prev = _neighbor(s, axis, -1)
            if prev is not None and link_index[prev, axis] >= 0:
                incident.append(link_index[prev, axis])
        arr = np.array(sorted(incident), dtype=np.int64)
        arr.flags.writeable = False
        stars.append(arr)

    plaq_links, plaq_site = [], []
    for s in range(n_sites):
        right = _neighbor(s, 0, +1)
        up = _neighbor(s, 1, +1)
        if right is None or up is None:
            continue
        plaq_links.append(
            [link_index[s, 0], link_index[s, 1], link_index[up, 0], link_index[right, 1]]
        )
        plaq_site.append(s)
    plaquette_table = np.asarray(plaq_links, dtype=np.int64).reshape(len(plaq_site), 4)
    plaquette_site = np.asarray(plaq_site, dtype=np.int64)

    for arr in (link_site, link_axis, link_index, plaquette_table, plaquette_site):
        arr.flags.writeable = False

    return LatticeGeometry(
        Lx=Lx,
        Ly=Ly,
        bc_x=bc_x,
        bc_y=bc_y,
        n_sites=n_sites,
        n_links=len(link_site),
        n_plaquettes=len(plaq_site),
        link_site=link_site,
        link_axis=link_axis,
        link_index=link_index,
        star_table=tuple(stars),
        plaquette_table=plaquette_table,
        plaquette_site=plaquette_site,
    )


def star_links(geometry: LatticeGeometry, site: int) -> np.ndarray:
    """Links meeting at a vertex: 4 in the bulk/torus, 2 or 3 at open edges."""
    if not (0 <= site < geometry.n_sites):
        raise IndexError(f"site index {site} out of range")
    return geometry.star_table[site]


def plaquette_links(geometry: LatticeGeometry, plaquette: int) -> np.ndarray:
    """The four links bounding the unit square at a dual-lattice site."""
    if not (0 <= plaquette < geometry.n_plaquettes):
        raise IndexError(f"plaquette index {plaquette} out of range")
    return geometry.plaquette_table[plaquette]


def geometry_summary(geometry: LatticeGeometry) -> dict:
    """JSON-serializable summary: counts plus the full index tables."""
    axis_name = ("x", "y")
    return {
        "Lx": geometry.Lx,
        "Ly": geometry.Ly,
        "bc_x": geometry.bc_x,
        "bc_y": geometry.bc_y,
        "n_sites": geometry.n_sites,
        "n_links": geometry.n_links,
        "n_plaquettes": geometry.n_plaquettes,
        "sites": [list(geometry.site_xy(s)) for s in range(geometry.n_sites)],
        "links": [
            [int(geometry.link_site[b]), axis_name[int(geometry.link_axis[b])]]
            for b in range(geometry.n_links)
        ],
        "stars": [star.tolist() for star in geometry.star_table],
        "plaquettes": geometry.plaquette_table.tolist(),
    }
