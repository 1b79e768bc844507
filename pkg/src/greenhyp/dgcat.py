"""Mapping complexes and homotopy colimits over finite posets.

Diagrams are cochain-complex-valued functors on a finite poset.  Chains
are the strictly increasing tuples (c0 < c1 < ... < cq); this is the
normalized model of the (co)simplicial constructions, where components on
degenerate chains vanish identically, and it keeps every total complex
finite-dimensional.

Conventions (all signs drawn from homalg.signs):

* a mapping cochain of total degree n has, for each level-q chain, a
  graded map value(c0) -> value(cq) of degree n - q;
* the mapping differential is delta = delta_h + delta_v with
    pr_q delta_h = sum_k (-1)^k d^{q-k} pr_{q-1},
    pr_{q,chain} delta_v = (-1)^q D pr_{q,chain},
  where d^0 pre-composes with the source arrow, d^q post-composes with the
  target arrow, middle cofaces drop an object, and D is the internal hom
  differential;
* composition splits the chain:  sum_k (-1)^{k(q-k+|g|)} g_{>=k} o f_{<=k};
* the homotopy colimit of a diagram is the sum over chains of
  value(c0)^{n+q} with total differential -d_h + d_v, face 0 applying the
  first arrow and the other faces dropping an object;
* the colimit-comparison map keeps only level-0 components;
* the action of a degree-m mapping cochain on the homotopy colimit is
    sum_k (-1)^{qm + k(q-k)} incl_{q-k, chain>=k} (eta_{<=k} v),
  and dropping to the constant diagram gives the adjunction isomorphism
  with the (-1)^{qm} component signs.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Hashable, Iterable

from .homalg import (Cochain, GradedMap, GradedSpace, LadderComplex,
                     SparseMatrix, internal_hom_differential, signs)

Obj = Hashable
Chain = tuple[Obj, ...]


class Poset:
    """A finite poset given by objects and a relation (closure is taken)."""

    def __init__(self, objects: Iterable[Obj],
                 relations: Iterable[tuple[Obj, Obj]]):
        self.objects = list(objects)
        rel = {(a, a) for a in self.objects}
        rel.update((a, b) for a, b in relations)
        changed = True
        while changed:
            changed = False
            for (a, b), (c, d) in itertools.product(list(rel), list(rel)):
                if b == c and (a, d) not in rel:
                    rel.add((a, d))
                    changed = True
        self.leq = rel
        for a, b in rel:
            if a != b and (b, a) in rel:
                raise ValueError(f"not antisymmetric: {a} ~ {b}")

    def less(self, a: Obj, b: Obj) -> bool:
        return a != b and (a, b) in self.leq

    def chains(self, max_level: int | None = None) -> list[Chain]:
        """All strictly increasing chains, by level then lexicographically."""
        idx = {o: i for i, o in enumerate(self.objects)}
        out: list[Chain] = [(o,) for o in self.objects]
        level = [(o,) for o in self.objects]
        q = 0
        while level and (max_level is None or q < max_level):
            nxt = []
            for ch in level:
                for o in self.objects:
                    if self.less(ch[-1], o):
                        nxt.append(ch + (o,))
            out.extend(nxt)
            level = nxt
            q += 1
        return sorted(out, key=lambda ch: (len(ch), tuple(idx[o] for o in ch)))

    def has_top(self) -> bool:
        return any(all((a, t) in self.leq for a in self.objects)
                   for t in self.objects)


class FiniteDiagram:
    """A functor from a finite poset to ladder complexes."""

    def __init__(self, poset: Poset, values: dict[Obj, LadderComplex],
                 arrows: dict[tuple[Obj, Obj], GradedMap], check: bool = True):
        self.poset = poset
        self.values = values
        self.arrows = dict(arrows)
        if check:
            self._check_functorial()

    def arrow(self, a: Obj, b: Obj) -> GradedMap:
        if a == b:
            return GradedMap.identity(self.values[a].space)
        return self.arrows[(a, b)]

    def _check_functorial(self) -> None:
        for (a, b) in self.poset.leq:
            if a != b and (a, b) not in self.arrows:
                raise ValueError(f"missing arrow {a} -> {b}")
        for ch in self.poset.chains():
            if len(ch) != 3:
                continue
            a, b, c = ch
            if self.arrow(a, c) != self.arrow(b, c) @ self.arrow(a, b):
                raise ValueError(f"arrows not functorial along {ch}")
        for (a, b), f in self.arrows.items():
            lhs = self.values[b].Q @ f
            rhs = f @ self.values[a].Q
            if lhs != rhs:
                raise ValueError(f"arrow {a} -> {b} is not a cochain map")


@dataclass
class MappingCochain:
    """A total-degree-n element of the mapping complex between diagrams."""

    source: FiniteDiagram
    target: FiniteDiagram
    degree: int
    components: dict[Chain, GradedMap] = field(default_factory=dict)

    def component(self, chain: Chain) -> GradedMap:
        got = self.components.get(chain)
        if got is not None:
            return got
        q = len(chain) - 1
        return GradedMap.zero(self.source.values[chain[0]].space,
                              self.target.values[chain[-1]].space,
                              self.degree - q)

    def set(self, chain: Chain, gm: GradedMap) -> None:
        q = len(chain) - 1
        if gm.degree != self.degree - q:
            raise ValueError(f"component degree {gm.degree} != "
                             f"{self.degree} - {q}")
        if not gm.is_zero():
            self.components[chain] = gm

    def __add__(self, other: "MappingCochain") -> "MappingCochain":
        if other.degree != self.degree:
            raise ValueError("degree mismatch")
        out = MappingCochain(self.source, self.target, self.degree,
                             dict(self.components))
        for ch, gm in other.components.items():
            cur = out.components.get(ch)
            new = gm if cur is None else cur + gm
            if new.is_zero():
                out.components.pop(ch, None)
            else:
                out.components[ch] = new
        return out

    def scaled(self, a) -> "MappingCochain":
        return MappingCochain(self.source, self.target, self.degree,
                              {ch: gm.scaled(a)
                               for ch, gm in self.components.items()})

    def __sub__(self, other: "MappingCochain") -> "MappingCochain":
        return self + other.scaled(-1)

    def is_zero(self) -> bool:
        return all(gm.is_zero() for gm in self.components.values())

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, MappingCochain):
            return NotImplemented
        return self.degree == other.degree and (self - other).is_zero()


def identity_cochain(diagram: FiniteDiagram) -> MappingCochain:
    eta = MappingCochain(diagram, diagram, 0)
    for o in diagram.poset.objects:
        eta.set((o,), GradedMap.identity(diagram.values[o].space))
    return eta


def embed_natural(source: FiniteDiagram, target: FiniteDiagram,
                  components: dict[Obj, GradedMap], degree: int) -> MappingCochain:
    """A strictly natural family as a mapping cochain (level 0 only)."""
    eta = MappingCochain(source, target, degree)
    for o, gm in components.items():
        eta.set((o,), gm)
    return eta


def mapping_differential(eta: MappingCochain) -> MappingCochain:
    out = MappingCochain(eta.source, eta.target, eta.degree + 1)
    for chain in eta.source.poset.chains():
        q = len(chain) - 1
        acc: GradedMap | None = None

        def add(gm: GradedMap, sign: int) -> None:
            nonlocal acc
            t = gm.scaled(sign)
            acc = t if acc is None else acc + t

        # horizontal part: coface index j = q - k carries sign (-1)^k
        if q >= 1:
            for k in range(q + 1):
                j = q - k
                s = signs.mapping_horizontal(k)
                if j == 0:
                    comp = eta.component(chain[1:])
                    add(comp @ eta.source.arrow(chain[0], chain[1]), s)
                elif j == q:
                    comp = eta.component(chain[:-1])
                    add(eta.target.arrow(chain[-2], chain[-1]) @ comp, s)
                else:
                    add(eta.component(chain[:j] + chain[j + 1:]), s)
        # vertical part
        comp = eta.components.get(chain)
        if comp is not None:
            add(internal_hom_differential(
                comp, eta.source.values[chain[0]],
                eta.target.values[chain[-1]]), signs.mapping_vertical(q))
        if acc is not None and not acc.is_zero():
            out.set(chain, acc)
    return out


def mapping_compose(g: MappingCochain, f: MappingCochain) -> MappingCochain:
    if f.target is not g.source and f.target.values != g.source.values:
        raise ValueError("diagram mismatch in composition")
    out = MappingCochain(f.source, g.target, f.degree + g.degree)
    for chain in f.source.poset.chains():
        q = len(chain) - 1
        acc: GradedMap | None = None
        for k in range(q + 1):
            lower = chain[:k + 1]
            upper = chain[k:]
            gc = g.components.get(upper)
            fc = f.components.get(lower)
            if gc is None or fc is None:
                continue
            term = (gc @ fc).scaled(signs.dg_composition(k, q, g.degree))
            acc = term if acc is None else acc + term
        if acc is not None and not acc.is_zero():
            out.set(chain, acc)
    return out


# -- homotopy colimits -------------------------------------------------------------


@dataclass
class HocolimComplex:
    diagram: FiniteDiagram
    complex: LadderComplex
    # label: (chain, base_label); degree n collects value(c0)^{n+q}

    def include(self, chain: Chain, v: Cochain) -> Cochain:
        """iota_{q, chain} of a cochain in value(chain[0])."""
        q = len(chain) - 1
        return Cochain(self.complex.space, v.degree - q,
                       {(chain, lab): val for lab, val in v.coeffs.items()})


def hocolim(diagram: FiniteDiagram) -> HocolimComplex:
    chains = diagram.poset.chains()
    degrees: dict[int, list] = {}
    for chain in chains:
        q = len(chain) - 1
        V0 = diagram.values[chain[0]].space
        for a in V0.degrees():
            degrees.setdefault(a - q, []).extend(
                ((chain, lab) for lab in V0.labels(a)))
    space = GradedSpace(degrees)
    Q = GradedMap(space, space, 1)
    for chain in chains:
        q = len(chain) - 1
        V0 = diagram.values[chain[0]]
        for a in V0.space.degrees():
            n = a - q
            for lab in V0.space.labels(a):
                src = (chain, lab)
                # vertical: (-1)^q iota Q v
                img = V0.Q.apply(Cochain(V0.space, a, {lab: Fraction(1)}))
                sv = signs.hocolim_vertical(q)
                for lab2, val in img.coeffs.items():
                    Q.set_entry(n, (chain, lab2), src, sv * val)
                # horizontal: -sum_k (-1)^k iota_{chain minus k} (face_k v)
                if q >= 1:
                    for k in range(q + 1):
                        s = signs.HOCOLIM_H_COEFF * signs.hocolim_horizontal(k)
                        if k == 0:
                            arr = diagram.arrow(chain[0], chain[1])
                            img0 = arr.apply(
                                Cochain(V0.space, a, {lab: Fraction(1)}))
                            for lab2, val in img0.coeffs.items():
                                Q.set_entry(n, (chain[1:], lab2), src, s * val)
                        else:
                            Q.set_entry(n, (chain[:k] + chain[k + 1:], lab),
                                        src, s)
    return HocolimComplex(diagram, LadderComplex(space, Q, check=True))


def colimit(diagram: FiniteDiagram) -> tuple[LadderComplex, dict[Obj, GradedMap]]:
    """Ordinary colimit as a quotient of the direct sum, with the canonical
    maps from each value."""
    chains1 = [(a, b) for (a, b) in diagram.poset.leq if a != b]
    degrees: dict[int, list] = {}
    for o in diagram.poset.objects:
        sp = diagram.values[o].space
        for a in sp.degrees():
            degrees.setdefault(a, []).extend(((o, lab) for lab in sp.labels(a)))
    total = GradedSpace(degrees)
    # relation generators: iota_b(arrow v) - iota_a(v)
    reducers: dict[int, list[tuple[int, dict[int, Fraction]]]] = {}
    pivots: dict[int, set[int]] = {}
    for n in total.degrees():
        reducers[n] = []
        pivots[n] = set()
    index = {n: {lab: i for i, lab in enumerate(total.labels(n))}
             for n in total.degrees()}

    def reduce_vec(n: int, vec: dict[int, Fraction]) -> dict[int, Fraction]:
        for pr, red in reducers[n]:
            x = vec.get(pr)
            if x:
                for j, v in red.items():
                    w = vec.get(j, Fraction(0)) - x * v
                    if w:
                        vec[j] = w
                    else:
                        vec.pop(j, None)
        return vec

    for (a, b) in chains1:
        arr = diagram.arrow(a, b)
        spa = diagram.values[a].space
        for n in spa.degrees():
            for lab in spa.labels(n):
                img = arr.apply(Cochain(spa, n, {lab: Fraction(1)}))
                vec = {index[n][(b, l2)]: v for l2, v in img.coeffs.items()}
                i = index[n][(a, lab)]
                vec[i] = vec.get(i, Fraction(0)) - 1
                vec = reduce_vec(n, {k: v for k, v in vec.items() if v})
                if not vec:
                    continue
                pr = min(vec)
                pv = vec[pr]
                reducers[n].append((pr, {j: v / pv for j, v in vec.items()}))
                pivots[n].add(pr)

    bases = {n: [lab for i, lab in enumerate(total.labels(n))
                 if i not in pivots[n]] for n in total.degrees()}
    space = GradedSpace(bases)

    def project(n: int, coeffs: dict) -> dict:
        if not coeffs:
            return {}
        vec = {index[n][lab]: v for lab, v in coeffs.items()}
        vec = reduce_vec(n, vec)
        labs = total.labels(n)
        return {labs[i]: v for i, v in vec.items() if v}

    Q = GradedMap(space, space, 1)
    for n in space.degrees():
        for (o, lab) in space.labels(n):
            V = diagram.values[o]
            img = V.Q.apply(Cochain(V.space, n, {lab: Fraction(1)}))
            red = project(n + 1, {(o, l2): v for l2, v in img.coeffs.items()})
            for lab2, v in red.items():
                Q.set_entry(n, lab2, (o, lab), v)
    cx = LadderComplex(space, Q, check=True)
    canon: dict[Obj, GradedMap] = {}
    for o in diagram.poset.objects:
        sp = diagram.values[o].space
        gm = GradedMap(sp, space, 0)
        for n in sp.degrees():
            for lab in sp.labels(n):
                red = project(n, {(o, lab): Fraction(1)})
                for lab2, v in red.items():
                    gm.set_entry(n, lab2, lab, v)
        canon[o] = gm
    return cx, canon


def hocolim_to_colim(h: HocolimComplex,
                     colim: tuple[LadderComplex, dict[Obj, GradedMap]]) -> GradedMap:
    """The comparison map: level-0 summands by the canonical maps, higher
    levels to zero."""
    cx, canon = colim
    gm = GradedMap(h.complex.space, cx.space, 0)
    for n in h.complex.space.degrees():
        for (chain, lab) in h.complex.space.labels(n):
            if len(chain) != 1:
                continue
            o = chain[0]
            img = canon[o].apply(
                Cochain(h.diagram.values[o].space, n, {lab: Fraction(1)}))
            for lab2, v in img.coeffs.items():
                gm.set_entry(n, lab2, (chain, lab), v)
    return gm


def hocolim_on_morphisms(eta: MappingCochain, hs: HocolimComplex,
                         ht: HocolimComplex) -> GradedMap:
    """The action of a mapping cochain on homotopy colimits."""
    m = eta.degree
    gm = GradedMap(hs.complex.space, ht.complex.space, m)
    for n in hs.complex.space.degrees():
        for (chain, lab) in hs.complex.space.labels(n):
            q = len(chain) - 1
            V0 = eta.source.values[chain[0]].space
            a = n + q
            v = Cochain(V0, a, {lab: Fraction(1)})
            for k in range(q + 1):
                comp = eta.components.get(chain[:k + 1])
                if comp is None:
                    continue
                img = comp.apply(v)
                if img.is_zero():
                    continue
                s = signs.hocolim_action(q, m, k)
                out = ht.include(chain[k:], img)
                for lab2, val in out.coeffs.items():
                    gm.set_entry(n, lab2, (chain, lab), s * val)
    return gm


# -- the adjunction with the constant diagram -----------------------------------------


def constant_diagram(poset: Poset, V: LadderComplex) -> FiniteDiagram:
    arrows = {(a, b): GradedMap.identity(V.space)
              for (a, b) in poset.leq if a != b}
    return FiniteDiagram(poset, {o: V for o in poset.objects}, arrows,
                         check=False)


def adjunct_forward(eta: MappingCochain, h: HocolimComplex,
                    V: LadderComplex) -> GradedMap:
    """map(D, const V) -> [hocolim D, V]."""
    m = eta.degree
    gm = GradedMap(h.complex.space, V.space, m)
    for n in h.complex.space.degrees():
        for (chain, lab) in h.complex.space.labels(n):
            q = len(chain) - 1
            comp = eta.components.get(chain)
            if comp is None:
                continue
            V0 = eta.source.values[chain[0]].space
            img = comp.apply(Cochain(V0, n + q, {lab: Fraction(1)}))
            s = signs.adjunction(q, m)
            for lab2, val in img.coeffs.items():
                gm.set_entry(n, lab2, (chain, lab), s * val)
    return gm


def adjunct_backward(f: GradedMap, source: FiniteDiagram,
                     h: HocolimComplex, V: LadderComplex) -> MappingCochain:
    """[hocolim D, V] -> map(D, const V), inverse to adjunct_forward."""
    m = f.degree
    const = constant_diagram(source.poset, V)
    eta = MappingCochain(source, const, m)
    for chain in source.poset.chains():
        q = len(chain) - 1
        V0 = source.values[chain[0]].space
        comp = GradedMap(V0, V.space, m - q)
        s = signs.adjunction(q, m)
        for a in V0.degrees():
            for lab in V0.labels(a):
                img = f.apply(h.include(chain, Cochain(V0, a, {lab: Fraction(1)})))
                for lab2, val in img.coeffs.items():
                    comp.set_entry(a, lab2, lab, s * val)
        if not comp.is_zero():
            eta.set(chain, comp)
    return eta


# -- the mapping complex as a finite ladder complex ------------------------------------


def mapping_complex_as_ladder(source: FiniteDiagram,
                              target: FiniteDiagram) -> LadderComplex:
    """Materialize the whole mapping complex as one finite complex.

    Basis labels are (chain, source label @ degree a, target label @ degree
    a + n - q); finite because all value complexes are.
    """
    chains = source.poset.chains()
    degrees: dict[int, list] = {}
    for chain in chains:
        q = len(chain) - 1
        Vs = source.values[chain[0]].space
        Ws = target.values[chain[-1]].space
        for a in Vs.degrees():
            for b in Ws.degrees():
                n = (b - a) + q
                degrees.setdefault(n, []).extend(
                    (chain, a, ls, lt)
                    for ls in Vs.labels(a) for lt in Ws.labels(b))
    space = GradedSpace(degrees)
    Q = GradedMap(space, space, 1)
    for n in space.degrees():
        for basis_lab in space.labels(n):
            chain, a, ls, lt = basis_lab
            Vs = source.values[chain[0]].space
            Ws = target.values[chain[-1]].space
            comp = GradedMap(Vs, Ws, n - (len(chain) - 1))
            comp.set_entry(a, lt, ls, Fraction(1))
            eta = MappingCochain(source, target, n, {chain: comp})
            deta = mapping_differential(eta)
            for ch2, gm in deta.components.items():
                q2 = len(ch2) - 1
                for aa in gm.source.degrees():
                    block = gm.blocks.get(aa)
                    if block is None:
                        continue
                    rows = gm.target.labels(aa + gm.degree)
                    cols = gm.source.labels(aa)
                    for i, j, v in block.entries():
                        Q.set_entry(n, (ch2, aa, cols[j], rows[i]),
                                    basis_lab, v)
    return LadderComplex(space, Q, check=True)
