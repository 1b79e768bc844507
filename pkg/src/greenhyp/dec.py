"""Cubical exterior calculus on a causal lattice, with exact rationals.

The coboundary d is the usual cubical one.  The codifferential is defined
as the literal matrix adjoint of d with respect to the diagonal metric
weights, so the global summation-by-parts identity

    <d phi, psi>_w = <phi, codiff psi>_w

is an exact matrix identity on the whole slab, with no boundary caveats.
Weights carry the Lorentzian signature: a cell extended along the time
axis picks up a factor -1 per the mostly-plus convention.  This makes the
cell-wise wave operator d*codiff + codiff*d act component-wise with leading
time coefficient +1, which is what the causal solver needs.

Bilinear pairings are represented as lists of stencil terms

    (coeff, shift1, sbits1, shift2, sbits2, out_sbits)

attached to output cells: the output cochain at cell (out_sbits, w) receives
coeff * phi1(sbits1, w+shift1) * phi2(sbits2, w+shift2).  The key algebraic
fact, verified in the test-suite by direct expansion, is the local
summation-by-parts identity

    <codiff F, A>_w  -  <F, d A>_w  =  d [ j(F, A) ]          (*)

as an equality of top cochains, where the current j is the explicit
staggered bilinear built by :func:`current_terms`.  All model pairings are
assembled from (*) and anchored products, which is what makes their
anti-symmetry and d-compatibility exact rather than approximate.
"""

from __future__ import annotations

import itertools
from fractions import Fraction
from typing import Iterable

from .homalg import GradedMap, GradedSpace, SparseMatrix, Cochain, LadderComplex
from .lattice import CausalLattice, Cell, Region

Term = tuple[Fraction, tuple[int, ...], int, tuple[int, ...], int, int]


# -- basic cell calculus --------------------------------------------------------


def face_sign(i: int, sbits: int) -> int:
    """(-1)^(number of directions in sbits below i)."""
    return -1 if bin(sbits & ((1 << i) - 1)).count("1") % 2 else 1


def weight(sbits: int) -> Fraction:
    """Diagonal metric weight of a cell type: -1 per time extension."""
    return Fraction(-1) if sbits & 1 else Fraction(1)


def form_space(lattice: CausalLattice, degrees_to_k: dict[int, int]) -> GradedSpace:
    """Graded space whose degree-n basis is the k(n)-cells of the lattice."""
    return GradedSpace({n: lattice.cells(k) for n, k in degrees_to_k.items()})


def build_d(lattice: CausalLattice, k: int) -> SparseMatrix:
    """Cubical coboundary from k-cells to (k+1)-cells."""
    src = lattice.cells(k)
    dst = lattice.cells(k + 1)
    src_idx = {c: i for i, c in enumerate(src)}
    m = SparseMatrix(len(dst), len(src))
    for ci, cell in enumerate(dst):
        sbits, coords = cell
        for i in range(lattice.m):
            if not (sbits >> i & 1):
                continue
            s = face_sign(i, sbits)
            fb = sbits & ~(1 << i)
            lower = (fb, coords)
            upper_coords = list(coords)
            upper_coords[i] += 1
            upper = (fb, lattice.wrap(tuple(upper_coords)))
            if lattice.cell_exists(upper):
                m.add_at(ci, src_idx[upper], s)
            if lattice.cell_exists(lower):
                m.add_at(ci, src_idx[lower], -s)
    return m


def weight_diagonal(lattice: CausalLattice, k: int) -> SparseMatrix:
    cells = lattice.cells(k)
    m = SparseMatrix(len(cells), len(cells))
    for i, c in enumerate(cells):
        m.add_at(i, i, weight(c[0]))
    return m


def build_codiff(lattice: CausalLattice, k: int) -> SparseMatrix:
    """Codifferential on k-cells: the w-adjoint of d from (k-1)-cells."""
    if k <= 0 or k > lattice.m:
        return SparseMatrix(len(lattice.cells(max(k - 1, 0))), len(lattice.cells(k)))
    d = build_d(lattice, k - 1)
    wk = weight_diagonal(lattice, k)
    wk1_inv = weight_diagonal(lattice, k - 1)   # weights are +-1, self-inverse
    return wk1_inv @ d.transpose() @ wk


def de_rham_space(lattice: CausalLattice) -> GradedSpace:
    return form_space(lattice, {k: k for k in range(lattice.m + 1)})


def de_rham_complex(lattice: CausalLattice) -> LadderComplex:
    """The lattice form complex (degrees 0..m, differential d)."""
    space = de_rham_space(lattice)
    Q = GradedMap(space, space, 1,
                  {k: build_d(lattice, k) for k in range(lattice.m)},
                  support_radius=1, causal_class="local")
    lattice.register_stencil_radius(1)
    return LadderComplex(space, Q)


# -- supports -------------------------------------------------------------------


def cochain_site_support(lattice: CausalLattice, c: Cochain) -> Region:
    sites = []
    for cell in c.coeffs:
        sites.extend(lattice.cell_vertices(cell))
    return Region(lattice, sites)


def cell_in_time_window(lattice: CausalLattice, cell: Cell,
                        window: tuple[int, int]) -> bool:
    lo, hi = lattice.cell_time_span(cell)
    return window[0] <= lo and hi <= window[1]


def window_labels(lattice: CausalLattice, space: GradedSpace, degree: int,
                  window: tuple[int, int]) -> list[Cell]:
    return [c for c in space.labels(degree)
            if cell_in_time_window(lattice, c, window)]


# -- multiplication by a time profile -------------------------------------------


def time_profile_mult(lattice: CausalLattice, space: GradedSpace,
                      profile) -> GradedMap:
    """Diagonal operator scaling each cell by profile(anchor time)."""
    blocks = {}
    for n in space.degrees():
        cells = space.labels(n)
        b = SparseMatrix(len(cells), len(cells))
        for i, c in enumerate(cells):
            v = profile(c[1][0])
            if v:
                b.add_at(i, i, v)
        blocks[n] = b
    return GradedMap(space, space, 0, blocks, support_radius=0)


# -- stencil pairings ------------------------------------------------------------


def anchored_product_terms(lattice: CausalLattice, k: int) -> list[Term]:
    """<a, b>_w as a top cochain anchored at each top cell: the w-weighted
    component product of two k-forms sampled at the cell anchor."""
    full = (1 << lattice.m) - 1
    zero = (0,) * lattice.m
    out = []
    for sbits in range(1 << lattice.m):
        if bin(sbits).count("1") != k:
            continue
        out.append((weight(sbits), zero, sbits, zero, sbits, full))
    return out


def current_terms(lattice: CausalLattice, k: int) -> list[Term]:
    """The staggered current j with <codiff F, A>_w - <F, dA>_w = d j(F, A).

    F runs over (k+1)-forms, A over k-forms; the current is an (m-1)-cochain
    whose component normal to axis i reads F one step back along axis i.
    """
    m = lattice.m
    full = (1 << m) - 1
    out: list[Term] = []
    for i in range(m):
        out_bits = full & ~(1 << i)
        shift1 = tuple(-1 if ax == i else 0 for ax in range(m))
        zero = (0,) * m
        for sbits in range(1 << m):
            if sbits >> i & 1 or bin(sbits).count("1") != k:
                continue
            coeff = Fraction(-face_sign(i, out_bits) * face_sign(i, sbits)) \
                * weight(sbits | (1 << i))
            out.append((coeff, shift1, sbits | (1 << i), zero, sbits, out_bits))
    return out


def transpose_terms(terms: list[Term], sign: Fraction | int) -> list[Term]:
    """Swap the two slots and scale: sign * terms(phi2, phi1)."""
    return [(Fraction(sign) * c, s2, b2, s1, b1, ob)
            for (c, s1, b1, s2, b2, ob) in terms]


def scale_terms(terms: list[Term], sign: Fraction | int) -> list[Term]:
    return [(Fraction(sign) * c, s1, b1, s2, b2, ob)
            for (c, s1, b1, s2, b2, ob) in terms]


def shift_terms_slot1(terms: list[Term], extra: tuple[int, ...]) -> list[Term]:
    return [(c, tuple(a + b for a, b in zip(s1, extra)), b1, s2, b2, ob)
            for (c, s1, b1, s2, b2, ob) in terms]


def evaluate_terms(lattice: CausalLattice, terms: list[Term],
                   phi1: dict[Cell, Fraction], phi2: dict[Cell, Fraction],
                   out_cells: Iterable[Cell] | None = None,
                   out_k: int | None = None) -> dict[Cell, Fraction]:
    """Evaluate a stencil pairing on two cell-coefficient dicts."""
    if out_cells is None:
        if out_k is None:
            raise ValueError("need out_cells or out_k")
        out_cells = lattice.cells(out_k)
    acc: dict[Cell, Fraction] = {}
    for w_cell in out_cells:
        out_bits_cell, w = w_cell
        total = Fraction(0)
        for coeff, s1, b1, s2, b2, ob in terms:
            if ob != out_bits_cell:
                continue
            c1 = (b1, lattice.wrap(tuple(a + b for a, b in zip(w, s1))))
            c2 = (b2, lattice.wrap(tuple(a + b for a, b in zip(w, s2))))
            if c1[1][0] < 0 or c2[1][0] < 0:
                continue
            v1 = phi1.get(c1)
            if not v1:
                continue
            v2 = phi2.get(c2)
            if not v2:
                continue
            total += coeff * v1 * v2
        if total:
            acc[w_cell] = total
    return acc


def terms_region_matrix(lattice: CausalLattice, terms: list[Term],
                        out_cells: Iterable[Cell],
                        space1: list[Cell], space2: list[Cell]) -> SparseMatrix:
    """Assemble sum_{c in out_cells} (phi1, phi2)(c) as a bilinear matrix B,
    so the region sum equals  phi1^T B phi2  in the given cell bases."""
    idx1 = {c: i for i, c in enumerate(space1)}
    idx2 = {c: i for i, c in enumerate(space2)}
    B = SparseMatrix(len(space1), len(space2))
    for w_cell in out_cells:
        out_bits_cell, w = w_cell
        for coeff, s1, b1, s2, b2, ob in terms:
            if ob != out_bits_cell:
                continue
            c1 = (b1, lattice.wrap(tuple(a + b for a, b in zip(w, s1))))
            c2 = (b2, lattice.wrap(tuple(a + b for a, b in zip(w, s2))))
            i = idx1.get(c1)
            if i is None:
                continue
            j = idx2.get(c2)
            if j is None:
                continue
            B.add_at(i, j, coeff)
    return B


# -- integration domains ----------------------------------------------------------


def top_cells(lattice: CausalLattice) -> list[Cell]:
    return lattice.cells(lattice.m)


def top_cells_future(lattice: CausalLattice, t_slice: int) -> list[Cell]:
    """Top cells with every vertex at time >= t_slice (anchors >= t_slice)."""
    return [c for c in top_cells(lattice) if c[1][0] >= t_slice]


def top_cells_past(lattice: CausalLattice, t_slice: int) -> list[Cell]:
    """Top cells with every vertex at time <= t_slice (anchors < t_slice)."""
    return [c for c in top_cells(lattice) if c[1][0] + 1 <= t_slice]


def slice_cells(lattice: CausalLattice, t_slice: int) -> list[Cell]:
    """Purely spatial (m-1)-cells lying in the slice {t = t_slice}."""
    sp_bits = ((1 << lattice.m) - 1) & ~1
    return [c for c in lattice.cells(lattice.m - 1)
            if c[0] == sp_bits and c[1][0] == t_slice]


def integrate_top(omega: dict[Cell, Fraction],
                  cells: Iterable[Cell]) -> Fraction:
    total = Fraction(0)
    for c in cells:
        v = omega.get(c)
        if v:
            total += v
    return total


def slice_integral(lattice: CausalLattice, omega: dict[Cell, Fraction],
                   t_slice: int) -> Fraction:
    """Integral of an (m-1)-cochain over a constant-time slice.

    The slice orientation is fixed by the discrete Stokes split

        sum_{future top cells} (d omega)  = -int_slice omega   (+ top boundary)
        sum_{pasteq top cells} (d omega)  = +int_slice omega   (- bottom boundary)

    so taking the raw sum of the spatial components *is* the orientation
    convention; tests pin the split above exactly.
    """
    return integrate_top(omega, slice_cells(lattice, t_slice))
