"""Graded spaces, cochains, graded maps and ladder complexes over Q.

A ``GradedSpace`` is a finite ordered basis per degree.  A ``GradedMap`` of
degree d is a family of sparse blocks, one per source degree n, mapping
degree n to degree n+d.  A ``LadderComplex`` is a graded space with a
degree +1 differential Q satisfying Q o Q = 0 exactly.

All equality checks here are literal: no tolerances.
"""

from __future__ import annotations

import json
from fractions import Fraction
from typing import Any, Callable, Hashable, Iterable

from . import signs
from .sparse import SparseMatrix, rank

Label = Hashable


class GradedSpace:
    """Ordered basis labels per degree, with index lookup."""

    def __init__(self, bases: dict[int, list[Label]]):
        self.bases = {n: list(labels) for n, labels in bases.items() if labels}
        self._index: dict[int, dict[Label, int]] = {}
        for n, labels in self.bases.items():
            idx = {lab: i for i, lab in enumerate(labels)}
            if len(idx) != len(labels):
                raise ValueError(f"duplicate basis labels in degree {n}")
            self._index[n] = idx

    def degrees(self) -> list[int]:
        return sorted(self.bases)

    def dim(self, n: int) -> int:
        return len(self.bases.get(n, ()))

    def total_dim(self) -> int:
        return sum(len(b) for b in self.bases.values())

    def labels(self, n: int) -> list[Label]:
        return self.bases.get(n, [])

    def index(self, n: int, label: Label) -> int:
        return self._index[n][label]

    def has(self, n: int, label: Label) -> bool:
        return label in self._index.get(n, {})

    def __eq__(self, other: object) -> bool:
        return isinstance(other, GradedSpace) and self.bases == other.bases


class Cochain:
    """A homogeneous element: degree plus sparse coefficients by label."""

    def __init__(self, space: GradedSpace, degree: int,
                 coeffs: dict[Label, Fraction] | None = None):
        self.space = space
        self.degree = degree
        self.coeffs: dict[Label, Fraction] = {}
        if coeffs:
            for lab, v in coeffs.items():
                if v == 0:
                    continue
                if not space.has(degree, lab):
                    raise KeyError(f"label {lab!r} not in degree {degree} basis")
                self.coeffs[lab] = Fraction(v)

    def is_zero(self) -> bool:
        return not self.coeffs

    def support(self) -> set[Label]:
        return set(self.coeffs)

    def __add__(self, other: "Cochain") -> "Cochain":
        if self.degree != other.degree or self.space is not other.space:
            raise ValueError("cochain degree/space mismatch")
        out = dict(self.coeffs)
        for lab, v in other.coeffs.items():
            w = out.get(lab, Fraction(0)) + v
            if w == 0:
                out.pop(lab, None)
            else:
                out[lab] = w
        return Cochain(self.space, self.degree, out)

    def __sub__(self, other: "Cochain") -> "Cochain":
        return self + other.scaled(-1)

    def scaled(self, a: Fraction | int) -> "Cochain":
        if a == 0:
            return Cochain(self.space, self.degree)
        return Cochain(self.space, self.degree,
                       {lab: v * a for lab, v in self.coeffs.items()})

    def __eq__(self, other: object) -> bool:
        return (isinstance(other, Cochain) and self.degree == other.degree
                and self.coeffs == other.coeffs)

    def to_indices(self) -> dict[int, Fraction]:
        return {self.space.index(self.degree, lab): v
                for lab, v in self.coeffs.items()}

    @staticmethod
    def from_indices(space: GradedSpace, degree: int,
                     vec: dict[int, Fraction]) -> "Cochain":
        labels = space.labels(degree)
        return Cochain(space, degree, {labels[i]: v for i, v in vec.items()})


class GradedMap:
    """Degree-homogeneous linear map between graded spaces.

    ``blocks[n]`` maps source degree n into target degree n + degree.
    Optional metadata (``support_radius``, ``causal_class``) describes the
    lattice stencil when the bases are lattice cells; geometric validation
    lives with the lattice layer.
    """

    def __init__(self, source: GradedSpace, target: GradedSpace, degree: int,
                 blocks: dict[int, SparseMatrix] | None = None,
                 support_radius: int | None = None,
                 causal_class: str = "local"):
        self.source = source
        self.target = target
        self.degree = degree
        self.blocks: dict[int, SparseMatrix] = {}
        self.support_radius = support_radius
        self.causal_class = causal_class
        if blocks:
            for n, b in blocks.items():
                self._check_block(n, b)
                if not b.is_zero():
                    self.blocks[n] = b

    def _check_block(self, n: int, b: SparseMatrix) -> None:
        want = (self.target.dim(n + self.degree), self.source.dim(n))
        if (b.nrows, b.ncols) != want:
            raise ValueError(f"block {n}: shape {(b.nrows, b.ncols)} != {want}")

    def block(self, n: int) -> SparseMatrix:
        b = self.blocks.get(n)
        if b is None:
            b = SparseMatrix(self.target.dim(n + self.degree), self.source.dim(n))
        return b

    def set_entry(self, n: int, row_label: Label, col_label: Label,
                  value: Fraction | int) -> None:
        b = self.blocks.get(n)
        if b is None:
            b = SparseMatrix(self.target.dim(n + self.degree), self.source.dim(n))
            self.blocks[n] = b
        b.add_at(self.target.index(n + self.degree, row_label),
                 self.source.index(n, col_label), value)

    @staticmethod
    def identity(space: GradedSpace) -> "GradedMap":
        return GradedMap(space, space, 0,
                         {n: SparseMatrix.identity(space.dim(n))
                          for n in space.degrees()})

    @staticmethod
    def zero(source: GradedSpace, target: GradedSpace, degree: int) -> "GradedMap":
        return GradedMap(source, target, degree)

    def apply(self, c: Cochain) -> Cochain:
        if c.space is not self.source and c.space != self.source:
            raise ValueError("cochain not in source space")
        out = self.block(c.degree).apply(c.to_indices())
        return Cochain.from_indices(self.target, c.degree + self.degree, out)

    def compose(self, other: "GradedMap") -> "GradedMap":
        """self after other."""
        if other.target != self.source:
            raise ValueError("composition space mismatch")
        deg = self.degree + other.degree
        blocks = {}
        for n in other.source.degrees():
            b = self.block(n + other.degree) @ other.block(n)
            if not b.is_zero():
                blocks[n] = b
        return GradedMap(other.source, self.target, deg, blocks)

    def __matmul__(self, other: "GradedMap") -> "GradedMap":
        return self.compose(other)

    def __add__(self, other: "GradedMap") -> "GradedMap":
        self._check_parallel(other)
        blocks = dict(self.blocks)
        for n, b in other.blocks.items():
            blocks[n] = (blocks[n] + b) if n in blocks else b
        return GradedMap(self.source, self.target, self.degree, blocks)

    def __sub__(self, other: "GradedMap") -> "GradedMap":
        return self + other.scaled(-1)

    def scaled(self, a: Fraction | int) -> "GradedMap":
        return GradedMap(self.source, self.target, self.degree,
                         {n: b.scaled(a) for n, b in self.blocks.items()},
                         support_radius=self.support_radius,
                         causal_class=self.causal_class)

    def __neg__(self) -> "GradedMap":
        return self.scaled(-1)

    def is_zero(self) -> bool:
        return all(b.is_zero() for b in self.blocks.values())

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, GradedMap):
            return NotImplemented
        if self.degree != other.degree:
            return False
        return (self - other).is_zero()

    def _check_parallel(self, other: "GradedMap") -> None:
        if (self.degree != other.degree or self.source != other.source
                or self.target != other.target):
            raise ValueError("graded maps not parallel")

    # -- serialization ------------------------------------------------------

    def to_triplets(self) -> list[list[Any]]:
        """Sparse-triplet form: (degree, row-label, col-label, num, den)."""
        out = []
        for n in sorted(self.blocks):
            b = self.blocks[n]
            rows = self.target.labels(n + self.degree)
            cols = self.source.labels(n)
            for i, j, v in b.entries():
                out.append([n, _label_json(rows[i]), _label_json(cols[j]),
                            v.numerator, v.denominator])
        return out

    def to_json(self) -> str:
        return json.dumps({"degree": self.degree, "entries": self.to_triplets()})


def _label_json(label: Label) -> Any:
    if isinstance(label, tuple):
        return [_label_json(x) for x in label]
    return label


class LadderComplex:
    """A graded space with a degree +1 differential squaring to zero."""

    def __init__(self, space: GradedSpace, Q: GradedMap, check: bool = True):
        if Q.degree != 1 or Q.source != space or Q.target != space:
            raise ValueError("differential must be a degree +1 endomap")
        self.space = space
        self.Q = Q
        if check and not (Q @ Q).is_zero():
            raise ValueError("differential does not square to zero")

    def degrees(self) -> list[int]:
        return self.space.degrees()

    def dim(self, n: int) -> int:
        return self.space.dim(n)


# -- operations ---------------------------------------------------------------


def internal_hom_differential(f: GradedMap, V: LadderComplex,
                              W: LadderComplex) -> GradedMap:
    """D f = Q_W o f - (-1)^{|f|} f o Q_V, a map of degree |f| + 1."""
    if f.source != V.space or f.target != W.space:
        raise ValueError("map does not go from V to W")
    return (W.Q @ f) - (f @ V.Q).scaled(signs.internal_hom(f.degree))


def is_cochain_map(f: GradedMap, V: LadderComplex, W: LadderComplex) -> bool:
    return internal_hom_differential(f, V, W).is_zero()


def check_homotopy(f: GradedMap, g: GradedMap, h: GradedMap,
                   V: LadderComplex, W: LadderComplex) -> bool:
    """True iff D h = g - f exactly (entry by entry)."""
    if h.degree != f.degree - 1 or g.degree != f.degree:
        raise ValueError("degree mismatch: need |h| = |f| - 1 = |g| - 1")
    return internal_hom_differential(h, V, W) == (g - f)


def shift(V: LadderComplex, p: int) -> LadderComplex:
    """The p-shift: degrees n -> n+p, differential scaled by (-1)^p."""
    space = GradedSpace({n - p: V.space.labels(n) for n in V.space.degrees()})
    s = signs.shift_differential(p)
    blocks = {n - p: b.scaled(s) for n, b in V.Q.blocks.items()}
    return LadderComplex(space, GradedMap(space, space, 1, blocks), check=False)


def cone(f: GradedMap, V: LadderComplex, W: LadderComplex,
         check_map: bool = True) -> LadderComplex:
    """Mapping cone of a cochain map f: V -> W.

    Degree n is V^{n+1} (+) W^n with labels ("dom", l) / ("cod", l);
    the differential sends (v, w) to (-Q_V v, Q_W w - f v).
    """
    if f.degree != 0:
        raise ValueError("cone needs a degree 0 cochain map")
    if check_map and not is_cochain_map(f, V, W):
        raise ValueError("cone of a non-cochain-map")
    degs = sorted(set([n - 1 for n in V.space.degrees()] + W.space.degrees()))
    bases = {n: [("dom", l) for l in V.space.labels(n + 1)]
             + [("cod", l) for l in W.space.labels(n)] for n in degs}
    space = GradedSpace(bases)
    Q = GradedMap(space, space, 1)
    for n in degs:
        for lab_src in V.space.labels(n + 1):
            col = Cochain(V.space, n + 1, {lab_src: Fraction(1)})
            qv = V.Q.apply(col)
            for lab, val in qv.coeffs.items():
                Q.set_entry(n, ("dom", lab), ("dom", lab_src), -val)
            fv = f.apply(col)
            for lab, val in fv.coeffs.items():
                Q.set_entry(n, ("cod", lab), ("dom", lab_src), -val)
        for lab_src in W.space.labels(n):
            col = Cochain(W.space, n, {lab_src: Fraction(1)})
            qw = W.Q.apply(col)
            for lab, val in qw.coeffs.items():
                Q.set_entry(n, ("cod", lab), ("cod", lab_src), val)
    return LadderComplex(space, Q, check=True)


def cohomology_dims(V: LadderComplex, mod_p: int | None = None) -> dict[int, int]:
    """dim H^n = dim V^n - rank Q^n - rank Q^{n-1}, by exact elimination.

    With ``mod_p`` set, ranks are computed modulo that prime instead; since
    mod-p ranks only underestimate ranks over Q, the resulting dims are
    exact upper bounds and a result of 0 is an exact certificate.
    """
    from .sparse import rank_mod_p
    rk: dict[int, int] = {}
    for n in V.space.degrees():
        b = V.Q.blocks.get(n)
        if b is None or b.is_zero():
            rk[n] = 0
        else:
            rk[n] = rank(b) if mod_p is None else rank_mod_p(b, mod_p)
    return {n: V.dim(n) - rk.get(n, 0) - rk.get(n - 1, 0)
            for n in V.space.degrees()}


def complex_is_acyclic(V: LadderComplex, mod_p: int | None = None) -> bool:
    return all(d == 0 for d in cohomology_dims(V, mod_p=mod_p).values())


def restrict_complex(V: LadderComplex, keep: Callable[[int, Label], bool],
                     check: bool = True) -> LadderComplex:
    """Subcomplex spanned by the kept labels; fails if Q leaks outside."""
    bases = {n: [l for l in V.space.labels(n) if keep(n, l)]
             for n in V.space.degrees()}
    space = GradedSpace(bases)
    Q = GradedMap(space, space, 1)
    for n in space.degrees():
        for lab_src in space.labels(n):
            img = V.Q.apply(Cochain(V.space, n, {lab_src: Fraction(1)}))
            for lab, val in img.coeffs.items():
                if not space.has(n + 1, lab):
                    if check:
                        raise ValueError(
                            f"restriction not a subcomplex: {lab_src!r} leaks "
                            f"to {lab!r} in degree {n + 1}")
                    continue
                Q.set_entry(n, lab, lab_src, val)
    return LadderComplex(space, Q, check=False)
