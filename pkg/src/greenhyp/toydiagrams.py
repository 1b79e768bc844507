"""Random small complexes and diagrams for the randomized law suites.

The generators are deterministic given the caller's Random instance, so
the harness stays reproducible.  Complexes are built so that each
differential's rows lie in the kernel of the previous transpose, which
makes Q Q = 0 hold by construction rather than by rejection sampling.
"""

from __future__ import annotations

import random
from fractions import Fraction

from .homalg import (GradedMap, GradedSpace, LadderComplex, SparseMatrix,
                     internal_hom_differential, nullspace)


def rand_matrix(rng: random.Random, nr: int, nc: int, density: float = 0.5,
                lo: int = -2, hi: int = 2) -> SparseMatrix:
    m = SparseMatrix(nr, nc)
    for i in range(nr):
        for j in range(nc):
            if rng.random() < density:
                m.add_at(i, j, Fraction(rng.randint(lo, hi)))
    return m


def rand_complex(rng: random.Random, tag: str, degs=(0, 1, 2),
                 maxdim: int = 3) -> LadderComplex:
    degs = tuple(degs)
    dims = {n: rng.randint(1, maxdim) for n in degs}
    space = GradedSpace({n: [(tag, n, i) for i in range(dims[n])] for n in degs})
    blocks = {}
    prev = None
    for n in degs[:-1]:
        b = SparseMatrix(dims[n + 1], dims[n])
        if prev is None:
            b = rand_matrix(rng, dims[n + 1], dims[n])
        else:
            ns = nullspace(prev.transpose())
            for i in range(dims[n + 1]):
                for vec in ns:
                    if rng.random() < 0.6:
                        c = Fraction(rng.randint(-2, 2))
                        for jj, v in vec.items():
                            b.add_at(i, jj, c * v)
        blocks[n] = b
        prev = b
    return LadderComplex(space, GradedMap(space, space, 1, blocks))


def rand_graded_map(rng: random.Random, V: LadderComplex, W: LadderComplex,
                    degree: int, density: float = 0.4) -> GradedMap:
    gm = GradedMap(V.space, W.space, degree)
    for n in V.space.degrees():
        tgt = W.space.labels(n + degree)
        if not tgt:
            continue
        for ls in V.space.labels(n):
            for lt in tgt:
                if rng.random() < density:
                    gm.set_entry(n, lt, ls, Fraction(rng.randint(-2, 2)))
    return gm


def chain_diagram(rng: random.Random, n_obj: int, tag: str, maxdim: int = 3):
    """A diagram over the chain poset with null-homotopic covering arrows,
    composed functorially."""
    from . import dgcat
    objs = list(range(n_obj))
    poset = dgcat.Poset(objs, [(i, i + 1) for i in range(n_obj - 1)])
    values = {o: rand_complex(rng, f"{tag}{o}", maxdim=maxdim) for o in objs}
    cover = {}
    for i in range(n_obj - 1):
        h = rand_graded_map(rng, values[i], values[i + 1], -1)
        cover[(i, i + 1)] = internal_hom_differential(h, values[i], values[i + 1])
    arrows = {}
    for i in range(n_obj):
        for j in range(i + 1, n_obj):
            f = cover[(i, i + 1)]
            for k in range(i + 1, j):
                f = cover[(k, k + 1)] @ f
            arrows[(i, j)] = f
    return dgcat.FiniteDiagram(poset, values, arrows)


def square_diagram(rng: random.Random, tag: str, maxdim: int = 2):
    """A non-total poset (a < b, c < d) with commuting null upper arrows."""
    from . import dgcat
    poset = dgcat.Poset(["a", "b", "c", "d"],
                        [("a", "b"), ("a", "c"), ("b", "d"), ("c", "d")])
    values = {o: rand_complex(rng, f"{tag}{o}", maxdim=maxdim)
              for o in poset.objects}
    fb = internal_hom_differential(
        rand_graded_map(rng, values["a"], values["b"], -1),
        values["a"], values["b"])
    fc = internal_hom_differential(
        rand_graded_map(rng, values["a"], values["c"], -1),
        values["a"], values["c"])
    arrows = {
        ("a", "b"): fb, ("a", "c"): fc,
        ("b", "d"): GradedMap.zero(values["b"].space, values["d"].space, 0),
        ("c", "d"): GradedMap.zero(values["c"].space, values["d"].space, 0),
        ("a", "d"): GradedMap.zero(values["a"].space, values["d"].space, 0),
    }
    return dgcat.FiniteDiagram(poset, values, arrows)


def contractible_complex(rng: random.Random, tag: str) -> LadderComplex:
    n0 = rng.randint(1, 2)
    space = GradedSpace({0: [(tag, 0, i) for i in range(n0)],
                         1: [(tag, 1, i) for i in range(n0)]})
    return LadderComplex(space,
                         GradedMap(space, space, 1,
                                   {0: SparseMatrix.identity(n0)}))


def contractible_diagram(rng: random.Random, poset, tag: str):
    """A diagram of two-term contractible complexes with null arrows."""
    from . import dgcat
    values = {o: contractible_complex(rng, f"{tag}{o}") for o in poset.objects}
    arrows = {}
    for (a, b) in poset.leq:
        if a == b:
            continue
        h = rand_graded_map(rng, values[a], values[b], -1)
        arrows[(a, b)] = internal_hom_differential(h, values[a], values[b])
    # force functoriality by zeroing non-cover composites when they disagree
    try:
        return dgcat.FiniteDiagram(poset, values, arrows)
    except ValueError:
        arrows = {k: GradedMap.zero(values[k[0]].space, values[k[1]].space, 0)
                  for k in arrows}
        return dgcat.FiniteDiagram(poset, values, arrows)


def rand_mapping_cochain(rng: random.Random, src, tgt, degree: int,
                         density: float = 0.3):
    from . import dgcat
    eta = dgcat.MappingCochain(src, tgt, degree)
    for ch in src.poset.chains():
        q = len(ch) - 1
        gm = rand_graded_map(rng, src.values[ch[0]], tgt.values[ch[-1]],
                             degree - q, density)
        if not gm.is_zero():
            eta.set(ch, gm)
    return eta
