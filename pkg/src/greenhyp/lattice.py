"""Finite causal lattice: a time slab over a periodic spatial torus.

Geometry conventions, fixed once here and relied on everywhere else:

* axis 0 is time, with levels 0 .. n_time-1 and no wrap-around; the other
  m-1 axes are spatial, periodic, of extent >= 4;
* the discrete causal cone has unit slope measured in the per-axis
  wrap-around L1 metric: one spatial step costs one time step;
* cubical k-cells are encoded as ``(sbits, coords)`` where bit i of
  ``sbits`` marks extension along axis i and ``coords`` is the anchor
  (minimal corner); a cell extended in time needs t <= n_time-2;
* a cell belongs to a region when all of its vertices do;
* "compact" support means time support inside [margin, n_time-1-margin].

Everything in this module is immutable after construction and all
operations are pure.
"""

from __future__ import annotations

import itertools
import json
from fractions import Fraction
from typing import Iterable, Iterator

Site = tuple[int, ...]          # (t, x1[, x2])
Cell = tuple[int, tuple[int, ...]]   # (sbits, anchor coords)


class CausalLattice:
    def __init__(self, spacetime_dim: int, n_time: int,
                 spatial_extents: tuple[int, ...] | list[int], margin: int = 2):
        if spacetime_dim not in (2, 3):
            raise ValueError("spacetime_dim must be 2 or 3")
        if n_time < 8:
            raise ValueError("n_time must be at least 8")
        spatial_extents = tuple(int(L) for L in spatial_extents)
        if len(spatial_extents) != spacetime_dim - 1:
            raise ValueError("need one spatial extent per spatial axis")
        if any(L < 4 for L in spatial_extents):
            raise ValueError("every spatial extent must be at least 4")
        if margin < 2:
            raise ValueError("margin must be at least 2")
        self.m = spacetime_dim
        self.n_time = n_time
        self.spatial_extents = spatial_extents
        self.margin = margin
        self.step_ratio = Fraction(1)
        self._registered_radii: list[int] = []

    # -- registration --------------------------------------------------------

    def register_stencil_radius(self, radius: int) -> None:
        if radius > self.margin:
            raise ValueError(
                f"stencil radius {radius} exceeds lattice margin {self.margin}")
        self._registered_radii.append(radius)

    # -- sites ----------------------------------------------------------------

    def sites(self) -> Iterator[Site]:
        for t in range(self.n_time):
            for xs in itertools.product(*(range(L) for L in self.spatial_extents)):
                yield (t, *xs)

    def n_sites(self) -> int:
        n = self.n_time
        for L in self.spatial_extents:
            n *= L
        return n

    def contains_site(self, s: Site) -> bool:
        if len(s) != self.m or not (0 <= s[0] < self.n_time):
            return False
        return all(0 <= x < L for x, L in zip(s[1:], self.spatial_extents))

    def wrap(self, s: Site) -> Site:
        return (s[0], *(x % L for x, L in zip(s[1:], self.spatial_extents)))

    def spatial_distance(self, a: Site, b: Site) -> int:
        d = 0
        for x, y, L in zip(a[1:], b[1:], self.spatial_extents):
            dx = abs(x - y)
            d += min(dx, L - dx)
        return d

    # -- cells ------------------------------------------------------------------

    def cell_exists(self, cell: Cell) -> bool:
        sbits, coords = cell
        if not self.contains_site(coords):
            return False
        if sbits & 1 and coords[0] > self.n_time - 2:
            return False
        return sbits < (1 << self.m)

    def cells(self, k: int) -> list[Cell]:
        """All k-cells sorted by (time anchor, direction bits, space)."""
        if not (0 <= k <= self.m):
            return []
        sbits_list = [b for b in range(1 << self.m) if bin(b).count("1") == k]
        out = []
        for t in range(self.n_time):
            for sbits in sbits_list:
                if sbits & 1 and t > self.n_time - 2:
                    continue
                for xs in itertools.product(*(range(L) for L in self.spatial_extents)):
                    out.append((sbits, (t, *xs)))
        return out

    def cell_vertices(self, cell: Cell) -> list[Site]:
        sbits, coords = cell
        dirs = [i for i in range(self.m) if sbits >> i & 1]
        verts = []
        for picks in itertools.product((0, 1), repeat=len(dirs)):
            v = list(coords)
            for d, p in zip(dirs, picks):
                v[d] += p
            verts.append(self.wrap(tuple(v)))
        return verts

    def cell_shift(self, cell: Cell, axis: int, step: int) -> Cell | None:
        sbits, coords = cell
        v = list(coords)
        v[axis] += step
        shifted = (sbits, self.wrap(tuple(v)))
        return shifted if self.cell_exists(shifted) else None

    def cell_time_span(self, cell: Cell) -> tuple[int, int]:
        t = cell[1][0]
        return (t, t + 1) if cell[0] & 1 else (t, t)

    # -- misc -------------------------------------------------------------------

    def interior_times(self) -> range:
        return range(self.margin, self.n_time - self.margin)

    def describe(self) -> dict:
        return {"spacetime_dim": self.m, "n_time": self.n_time,
                "spatial_extents": list(self.spatial_extents),
                "margin": self.margin}

    def __eq__(self, other: object) -> bool:
        return (isinstance(other, CausalLattice)
                and self.describe() == other.describe())


class Region:
    """A set of sites, closed by construction; cells derive from vertices."""

    def __init__(self, lattice: CausalLattice, sites: Iterable[Site]):
        ss = frozenset(lattice.wrap(s) for s in sites)
        for s in ss:
            if not lattice.contains_site(s):
                raise ValueError(f"site {s} outside lattice")
        self.lattice = lattice
        self.sites = ss

    # set algebra ---------------------------------------------------------

    def __contains__(self, s: Site) -> bool:
        return s in self.sites

    def __len__(self) -> int:
        return len(self.sites)

    def __le__(self, other: "Region") -> bool:
        return self.sites <= other.sites

    def __eq__(self, other: object) -> bool:
        return isinstance(other, Region) and self.sites == other.sites

    def union(self, other: "Region") -> "Region":
        return Region(self.lattice, self.sites | other.sites)

    def intersect(self, other: "Region") -> "Region":
        return Region(self.lattice, self.sites & other.sites)

    def is_empty(self) -> bool:
        return not self.sites

    def time_range(self) -> tuple[int, int] | None:
        if not self.sites:
            return None
        ts = [s[0] for s in self.sites]
        return min(ts), max(ts)

    def is_compact(self) -> bool:
        """Time support inside the margins (the slab notion of compact)."""
        tr = self.time_range()
        if tr is None:
            return True
        lat = self.lattice
        return lat.margin <= tr[0] and tr[1] <= lat.n_time - 1 - lat.margin

    def has_cell(self, cell: Cell) -> bool:
        return all(v in self.sites for v in self.lattice.cell_vertices(cell))

    def cells(self, k: int) -> list[Cell]:
        """Derived k-cells: those with every vertex in the region."""
        return [c for c in self.lattice.cells(k) if self.has_cell(c)]

    def to_json(self) -> str:
        return json.dumps(sorted(self.sites))

    @staticmethod
    def from_json(lattice: CausalLattice, text: str) -> "Region":
        return Region(lattice, [tuple(s) for s in json.loads(text)])


class CauchySlice:
    """A constant-time slice; interior slices keep clear of both margins."""

    def __init__(self, lattice: CausalLattice, time_index: int):
        if not (lattice.margin <= time_index <= lattice.n_time - 1 - lattice.margin):
            raise ValueError(
                f"slice time {time_index} outside interior "
                f"[{lattice.margin}, {lattice.n_time - 1 - lattice.margin}]")
        self.lattice = lattice
        self.time_index = time_index

    def region(self) -> Region:
        t = self.time_index
        return Region(self.lattice,
                      [s for s in self.lattice.sites() if s[0] == t])


# -- causal structure ----------------------------------------------------------


def _cone(lattice: CausalLattice, K: Region, direction: int) -> Region:
    """Unit-slope causal cone of K (direction +1 future, -1 past).

    Level-by-level dilation: the slice at distance k from a seed grows to
    the wrap-L1 ball of radius k, truncated at the temporal boundary.
    """
    by_time: dict[int, set[tuple[int, ...]]] = {}
    for s in K.sites:
        by_time.setdefault(s[0], set()).add(s[1:])
    if not by_time:
        return Region(lattice, [])
    out: set[Site] = set(K.sites)
    times = (range(min(by_time), lattice.n_time) if direction > 0
             else range(max(by_time), -1, -1))
    frontier: set[tuple[int, ...]] = set()
    for t in times:
        frontier = _dilate(lattice, frontier) | by_time.get(t, set())
        for xs in frontier:
            out.add((t, *xs))
    return Region(lattice, out)


def _dilate(lattice: CausalLattice, spatial: set[tuple[int, ...]]) -> set[tuple[int, ...]]:
    if not spatial:
        return set()
    out = set(spatial)
    for xs in spatial:
        for ax, L in enumerate(lattice.spatial_extents):
            for step in (-1, 1):
                ys = list(xs)
                ys[ax] = (ys[ax] + step) % L
                out.add(tuple(ys))
    return out


def causal_future(lattice: CausalLattice, K: Region) -> Region:
    return _cone(lattice, K, +1)


def causal_past(lattice: CausalLattice, K: Region) -> Region:
    return _cone(lattice, K, -1)


def causal_hull(lattice: CausalLattice, K: Region) -> Region:
    return causal_future(lattice, K).union(causal_past(lattice, K))


def sigma_map(lattice: CausalLattice, K: Region,
              slice_minus: CauchySlice, slice_plus: CauchySlice) -> Region:
    """(J+(S-) n J-(K)) u (J-(S+) n J+(K)): the minimal enlargement of K
    containing both J+(S-) n J-(K) and J-(S+) n J+(K)."""
    if slice_plus.time_index <= slice_minus.time_index:
        raise ValueError("the later slice must be strictly later")
    jp = causal_future(lattice, K)
    jm = causal_past(lattice, K)
    t_lo = slice_minus.time_index
    t_hi = slice_plus.time_index
    part1 = {s for s in jm.sites if s[0] >= t_lo}    # J+(S-) = {t >= t_lo}
    part2 = {s for s in jp.sites if s[0] <= t_hi}    # J-(S+) = {t <= t_hi}
    return Region(lattice, part1 | part2)


class PartitionOfUnity:
    """Two per-site rational weights with chi+ + chi- = 1.

    chi+ vanishes at and before the earlier slice, equals one at and after
    the later slice, and interpolates linearly in time in between; both
    weights are constant on each time slice.
    """

    def __init__(self, lattice: CausalLattice, slice_minus: CauchySlice,
                 slice_plus: CauchySlice):
        if slice_plus.time_index < slice_minus.time_index + 2:
            raise ValueError("slices too close: need at least two steps apart")
        self.lattice = lattice
        self.t_minus = slice_minus.time_index
        self.t_plus = slice_plus.time_index

    def chi_plus(self, t: int) -> Fraction:
        if t <= self.t_minus:
            return Fraction(0)
        if t >= self.t_plus:
            return Fraction(1)
        return Fraction(t - self.t_minus, self.t_plus - self.t_minus)

    def chi_minus(self, t: int) -> Fraction:
        return 1 - self.chi_plus(t)

    def support_invariants_hold(self) -> bool:
        lat = self.lattice
        for t in range(lat.n_time):
            if self.chi_plus(t) + self.chi_minus(t) != 1:
                return False
            if self.chi_plus(t) != 0 and t <= self.t_minus:
                return False          # supp chi+ inside I+(Sigma-)
            if self.chi_minus(t) != 0 and t >= self.t_plus:
                return False          # supp chi- inside I-(Sigma+)
        return True


def partition_of_unity(lattice: CausalLattice, slice_minus: CauchySlice,
                       slice_plus: CauchySlice) -> PartitionOfUnity:
    pou = PartitionOfUnity(lattice, slice_minus, slice_plus)
    assert pou.support_invariants_hold()
    return pou


# -- randomized region suites ---------------------------------------------------


def random_compact_region(lattice: CausalLattice, rng, max_sites: int = 4,
                          time_window: tuple[int, int] | None = None) -> Region:
    """A small random compact region (seed for the cone test suites)."""
    if time_window is None:
        time_window = (lattice.margin, lattice.n_time - 1 - lattice.margin)
    t_lo, t_hi = time_window
    n = rng.randint(1, max_sites)
    sites = []
    for _ in range(n):
        t = rng.randint(t_lo, t_hi)
        xs = tuple(rng.randrange(L) for L in lattice.spatial_extents)
        sites.append((t, *xs))
    return Region(lattice, sites)
