"""Single source of truth for graded sign conventions.

Every module takes its Koszul-style signs from here, so a convention can be
audited (and fixed) in exactly one place.  All functions return +1 or -1 as
plain ints.

Conventions implemented:

* internal hom differential on a degree-n map f:
      (D f) = Q_target o f  -  internal_hom(n) * f o Q_source,
  with ``internal_hom(n) = (-1)**n``.
* p-shift of a complex: the shifted differential is
  ``shift_differential(p) * Q`` degree-wise, with value (-1)**p.
* tensor-product differential (graded Leibniz): the right factor picks up
  ``tensor_leibniz(q)`` past a degree-q left factor.
* symmetric braiding v (x) w -> braiding(|v|, |w|) w (x) v.
* mapping-complex total differential delta = delta_h + delta_v with
  ``mapping_horizontal(k)`` on the k-th coface summand and
  ``mapping_vertical(q)`` on the cosimplicial-level-q component.
* dg-composition of mapping cochains g (degree n) after f:
  the summand splitting the chain at position k carries
  ``dg_composition(k, q, n)``.
* homotopy-colimit total differential d = -d_h + d_v with
  ``hocolim_horizontal(k)`` on face summands, ``hocolim_vertical(q)`` on
  level-q components, and the overall relative sign carried by the caller
  as ``HOCOLIM_H_COEFF``.
* homotopy colimit acting on a degree-m mapping cochain at level q,
  splitting at k: ``hocolim_action(q, m, k)``.
* the adjunction identification map(V, Delta W) = [hocolim V, W]:
  the level-q component of a degree-m cochain carries ``adjunction(q, m)``.
"""

from __future__ import annotations


def _pm(parity: int) -> int:
    return -1 if parity % 2 else 1


def koszul(deg_a: int, deg_b: int) -> int:
    return _pm(deg_a * deg_b)


braiding = koszul


def internal_hom(map_degree: int) -> int:
    return _pm(map_degree)


def shift_differential(p: int) -> int:
    return _pm(p)


def tensor_leibniz(left_degree: int) -> int:
    return _pm(left_degree)


def mapping_horizontal(k: int) -> int:
    return _pm(k)


def mapping_vertical(q: int) -> int:
    return _pm(q)


def dg_composition(k: int, q: int, g_degree: int) -> int:
    return _pm(k * (q - k + g_degree))


def hocolim_horizontal(k: int) -> int:
    return _pm(k)


def hocolim_vertical(q: int) -> int:
    return _pm(q)


HOCOLIM_H_COEFF = -1


def hocolim_action(q: int, m: int, k: int) -> int:
    return _pm(q * m + k * (q - k))


def adjunction(q: int, m: int) -> int:
    return _pm(q * m)
