"""Lattice field models: ladder complexes, witnesses, differential pairings.

Four model families are shipped:

* ``KleinGordon(mass)``: two copies of the 0-form space in degrees 0 and 1,
  with the certified wave-plus-mass operator as the only differential and
  the identity witness;
* ``DeRham``: the form complex with differential d and witness codiff;
* ``ChernSimons`` (m = 3): the 1-shift of the de Rham model, complex and
  witness only (its natural pairing needs a graded-commutative product,
  which the cell-level cup product is not, so it is excluded);
* ``MaxwellP`` (p = 1, m = 2): degrees -1..2 carrying forms
  (0, 1, 1, 0) with differentials (d, codiff d, codiff) and witness
  (codiff, id, d).

Differential pairings are assembled out of two exact primitives from the
dec module: anchored w-products and the summation-by-parts currents.  Both
pairing axioms (graded anti-symmetry, and d-compatibility against the
model differential) then hold exactly by construction; the validators
re-check them on random sections anyway, since they are the contract.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Callable

from . import dec
from .green import CausalOperator, GreenOperators, certify_causal, support_in_zone, boundary_zones
from .homalg import Cochain, GradedMap, GradedSpace, LadderComplex, SparseMatrix, shift
from .lattice import CausalLattice, Cell

KINDS = ("KleinGordon", "DeRham", "ChernSimons", "MaxwellP")


class UnsupportedModelError(ValueError):
    pass


@dataclass(frozen=True)
class ModelSpec:
    kind: str
    lattice: CausalLattice
    mass: Fraction = Fraction(0)
    p: int = 1

    def __post_init__(self):
        if self.kind not in KINDS:
            raise UnsupportedModelError(f"unknown model kind {self.kind!r}")
        if self.kind == "ChernSimons" and self.lattice.m != 3:
            raise UnsupportedModelError("ChernSimons needs spacetime_dim 3")
        if self.kind == "MaxwellP":
            if self.p > self.lattice.m - 1:
                raise UnsupportedModelError("MaxwellP needs p <= m-1")
            if (self.p, self.lattice.m) != (1, 2):
                raise UnsupportedModelError("only MaxwellP(p=1) on a 2d lattice "
                                            "is shipped")
        if self.mass < 0:
            raise UnsupportedModelError("mass must be nonnegative")


# -- complexes -------------------------------------------------------------------


def _wave_block(lattice: CausalLattice, k: int) -> SparseMatrix:
    """d codiff + codiff d on k-forms (leading time coefficient +1)."""
    acc = None
    if k < lattice.m:
        acc = dec.build_codiff(lattice, k + 1) @ dec.build_d(lattice, k)
    if k > 0:
        second = dec.build_d(lattice, k - 1) @ dec.build_codiff(lattice, k)
        acc = second if acc is None else acc + second
    return acc


def build_complex(spec: ModelSpec) -> LadderComplex:
    lattice = spec.lattice
    if spec.kind == "KleinGordon":
        space = dec.form_space(lattice, {0: 0, 1: 0})
        n0 = space.dim(0)
        p0 = _wave_block(lattice, 0) - SparseMatrix.identity(n0).scaled(spec.mass ** 2)
        Q = GradedMap(space, space, 1, {0: p0}, support_radius=2)
        lattice.register_stencil_radius(2)
        return LadderComplex(space, Q, check=False)   # two-term: Q^2 = 0 trivially
    if spec.kind == "DeRham":
        return dec.de_rham_complex(lattice)
    if spec.kind == "ChernSimons":
        return shift(dec.de_rham_complex(lattice), 1)
    if spec.kind == "MaxwellP":
        space = dec.form_space(lattice, {-1: 0, 0: 1, 1: 1, 2: 0})
        blocks = {
            -1: dec.build_d(lattice, 0),
            0: dec.build_codiff(lattice, 2) @ dec.build_d(lattice, 1),
            1: dec.build_codiff(lattice, 1),
        }
        Q = GradedMap(space, space, 1, blocks, support_radius=2)
        lattice.register_stencil_radius(2)
        return LadderComplex(space, Q)
    raise UnsupportedModelError(spec.kind)


# -- witnesses -------------------------------------------------------------------


@dataclass
class GreenWitness:
    spec: ModelSpec
    complex: LadderComplex
    W: GradedMap
    op: CausalOperator          # certificate for P = QW + WQ
    green: GreenOperators

    @property
    def lattice(self) -> CausalLattice:
        return self.spec.lattice


def witness_map(spec: ModelSpec, complex_: LadderComplex) -> GradedMap:
    lattice = spec.lattice
    space = complex_.space
    if spec.kind == "KleinGordon":
        return GradedMap(space, space, -1,
                         {1: SparseMatrix.identity(space.dim(1))},
                         support_radius=0)
    if spec.kind == "DeRham":
        return GradedMap(space, space, -1,
                         {k: dec.build_codiff(lattice, k)
                          for k in range(1, lattice.m + 1)},
                         support_radius=1)
    if spec.kind == "ChernSimons":
        return GradedMap(space, space, -1,
                         {k - 1: dec.build_codiff(lattice, k)
                          for k in range(1, lattice.m + 1)},
                         support_radius=1)
    if spec.kind == "MaxwellP":
        return GradedMap(space, space, -1, {
            0: dec.build_codiff(lattice, 1),
            1: SparseMatrix.identity(space.dim(1)),
            2: dec.build_d(lattice, 0),
        }, support_radius=1)
    raise UnsupportedModelError(spec.kind)


def build_witness(spec: ModelSpec, complex_: LadderComplex | None = None) -> GreenWitness:
    cx = complex_ if complex_ is not None else build_complex(spec)
    W = witness_map(spec, cx)
    P = (cx.Q @ W) + (W @ cx.Q)
    op = certify_causal(spec.lattice, P)
    return GreenWitness(spec, cx, W, op, GreenOperators(op))


# -- differential pairings ---------------------------------------------------------


def _expand_slot1_d(lattice: CausalLattice, terms: list[dec.Term]) -> list[dec.Term]:
    """Rewrite terms reading slot 1 through the coboundary d."""
    out: list[dec.Term] = []
    for coeff, s1, b1, s2, b2, ob in terms:
        for i in range(lattice.m):
            if not (b1 >> i & 1):
                continue
            fs = dec.face_sign(i, b1 & ~(1 << i))
            fb = b1 & ~(1 << i)
            up = tuple(v + (1 if ax == i else 0) for ax, v in enumerate(s1))
            out.append((coeff * fs, up, fb, s2, b2, ob))
            out.append((-coeff * fs, s1, fb, s2, b2, ob))
    return out


class DifferentialPairing:
    """Graded anti-symmetric bilinear pairing into the shifted form complex.

    Components are stored for canonical degree pairs; the flipped component
    is produced by the anti-symmetry rule, so the full pairing is graded
    anti-symmetric by construction.  The two axioms are still exposed as
    validators because they are the lattice contract.
    """

    def __init__(self, spec: ModelSpec, space: GradedSpace,
                 components: dict[tuple[int, int], list[dec.Term]],
                 locality_radius: int):
        self.spec = spec
        self.lattice = spec.lattice
        self.space = space
        self.components = components
        self.locality_radius = locality_radius

    def out_form_degree(self, d1: int, d2: int) -> int:
        return d1 + d2 + self.lattice.m - 1

    def terms(self, d1: int, d2: int) -> list[dec.Term]:
        got = self.components.get((d1, d2))
        if got is not None:
            return got
        flipped = self.components.get((d2, d1))
        if flipped is not None:
            # (phi1, phi2) = -(-1)^{d1 d2} (phi2, phi1)
            return dec.transpose_terms(flipped, -((-1) ** (d1 * d2)))
        return []

    def evaluate(self, phi1: Cochain, phi2: Cochain) -> dict[Cell, Fraction]:
        k = self.out_form_degree(phi1.degree, phi2.degree)
        if not (0 <= k <= self.lattice.m):
            return {}
        return dec.evaluate_terms(self.lattice, self.terms(phi1.degree, phi2.degree),
                                  phi1.coeffs, phi2.coeffs, out_k=k)

    def region_matrix(self, d1: int, d2: int, out_cells) -> SparseMatrix:
        return dec.terms_region_matrix(self.lattice, self.terms(d1, d2), out_cells,
                                       self.space.labels(d1), self.space.labels(d2))

    # -- validators -------------------------------------------------------------

    def check_antisymmetry(self, phi1: Cochain, phi2: Cochain) -> bool:
        lhs = self.evaluate(phi1, phi2)
        rhs = self.evaluate(phi2, phi1)
        sign = -((-1) ** (phi1.degree * phi2.degree))
        return lhs == {c: sign * v for c, v in rhs.items()}

    def check_compatibility(self, Q: GradedMap, phi1: Cochain, phi2: Cochain) -> bool:
        """(Q a, b) + (-1)^{|a|} (a, Q b) = (-1)^{m-1} d (a, b), exactly."""
        lattice = self.lattice
        m = lattice.m
        lhs = self.evaluate(Q.apply(phi1), phi2)
        sign = (-1) ** phi1.degree
        for c, v in self.evaluate(phi1, Q.apply(phi2)).items():
            w = lhs.get(c, Fraction(0)) + sign * v
            if w:
                lhs[c] = w
            else:
                lhs.pop(c, None)
        k = self.out_form_degree(phi1.degree, phi2.degree)
        if not (0 <= k <= m - 1):
            return not lhs
        pairing = self.evaluate(phi1, phi2)
        cells_k = lattice.cells(k)
        idx = {c: i for i, c in enumerate(cells_k)}
        dmat = dec.build_d(lattice, k)
        img = dmat.apply({idx[c]: v for c, v in pairing.items()})
        cells_k1 = lattice.cells(k + 1)
        rhs = {cells_k1[i]: ((-1) ** (m - 1)) * v for i, v in img.items() if v}
        return lhs == rhs


def build_pairing(spec: ModelSpec, complex_: LadderComplex | None = None) -> DifferentialPairing:
    lattice = spec.lattice
    m = lattice.m
    cx = complex_ if complex_ is not None else build_complex(spec)
    space = cx.space
    if spec.kind == "KleinGordon":
        # (phi+, phi): anchored product; (phi1, phi2): staggered Wronskian
        # current, arranged so compatibility telescopes exactly.
        top = dec.anchored_product_terms(lattice, 0)
        j = _expand_slot1_d(lattice, dec.current_terms(lattice, 0))
        mid = dec.scale_terms(
            [*j, *dec.transpose_terms(j, -1)], (-1) ** (m - 1))
        return DifferentialPairing(spec, space, {(1, 0): top, (0, 0): mid},
                                   locality_radius=1)
    if spec.kind == "MaxwellP":
        # degrees: -1 scalar, 0 vector potential, 1 antifield 1-form,
        # 2 antifield scalar.  All components derive from the two exact
        # primitives; see the module docstring.
        c2b = dec.anchored_product_terms(lattice, 1)                  # (1, 0)
        c2a = dec.anchored_product_terms(lattice, 0)                  # (2, -1)
        c1a = dec.scale_terms(dec.current_terms(lattice, 0), -1)      # (1, -1)
        j1d = _expand_slot1_d(lattice, dec.current_terms(lattice, 1))
        c1b = dec.scale_terms(
            [*j1d, *dec.transpose_terms(j1d, -1)], -1)                # (0, 0)
        # (0, -1): reads the field strength one step back along each axis.
        back = tuple([-1] * m)
        c0 = _expand_slot1_d(
            lattice, [(Fraction(1), back, (1 << m) - 1, (0,) * m, 0, 0)])
        comps = {(1, 0): c2b, (2, -1): c2a, (1, -1): c1a, (0, 0): c1b,
                 (0, -1): c0}
        return DifferentialPairing(spec, space, comps, locality_radius=2)
    raise UnsupportedModelError(
        f"no differential pairing is shipped for {spec.kind}; the cell-level "
        "wedge product is not graded-commutative, so the natural candidate "
        "fails exact anti-symmetry")


# -- bundles and validators ---------------------------------------------------------


@dataclass
class ModelBundle:
    spec: ModelSpec
    complex: LadderComplex
    witness: GreenWitness
    pairing: DifferentialPairing | None

    @property
    def lattice(self) -> CausalLattice:
        return self.spec.lattice


def build_model(spec: ModelSpec) -> ModelBundle:
    cx = build_complex(spec)
    wit = build_witness(spec, cx)
    try:
        pairing = build_pairing(spec, cx)
    except UnsupportedModelError:
        pairing = None
    return ModelBundle(spec, cx, wit, pairing)


def random_section(space: GradedSpace, lattice: CausalLattice, degree: int,
                   rng, window: tuple[int, int] | None = None,
                   density: float = 0.25) -> Cochain:
    if window is None:
        window = (lattice.margin, lattice.n_time - 1 - lattice.margin)
    cells = dec.window_labels(lattice, space, degree, window)
    return Cochain(space, degree,
                   {c: Fraction(rng.randint(-3, 3)) for c in cells
                    if rng.random() < density})


def integrate_pairing(pairing: DifferentialPairing, phi1: Cochain,
                      phi2: Cochain) -> Fraction:
    """Integral over the slab of the top component of (phi1, phi2)."""
    if pairing.out_form_degree(phi1.degree, phi2.degree) != pairing.lattice.m:
        return Fraction(0)
    return dec.integrate_top(pairing.evaluate(phi1, phi2),
                             dec.top_cells(pairing.lattice))


def validate_pairing(bundle: ModelBundle, suite, rng, n_pairs: int = 20) -> None:
    pairing = bundle.pairing
    if pairing is None:
        raise UnsupportedModelError("model has no pairing")
    space = bundle.complex.space
    lattice = bundle.lattice
    degs = space.degrees()

    def rand(d):
        return random_section(space, lattice, d, rng)

    def check_antisym():
        for _ in range(n_pairs):
            d1, d2 = rng.choice(degs), rng.choice(degs)
            if not pairing.check_antisymmetry(rand(d1), rand(d2)):
                return False, {"degrees": (d1, d2)}
        return True
    suite.run("pairing_graded_antisymmetry", "pairing axiom 1", check_antisym)

    def check_compat():
        for _ in range(n_pairs):
            d1, d2 = rng.choice(degs), rng.choice(degs)
            if not pairing.check_compatibility(bundle.complex.Q, rand(d1), rand(d2)):
                return False, {"degrees": (d1, d2)}
        return True
    suite.run("pairing_d_compatibility", "pairing axiom 2", check_compat)

    def check_diag():
        for _ in range(n_pairs):
            d = rng.choice([d for d in degs if d % 2 == 0])
            phi = rand(d)
            if pairing.evaluate(phi, phi):
                return False, {"degree": d}
        return True
    suite.run("pairing_even_diagonal_zero", "anti-symmetry on the diagonal",
              check_diag)


def validate_self_adjoint_witness(bundle: ModelBundle, suite, rng,
                                  n_pairs: int = 20) -> None:
    """Both witness compatibility conditions plus their consequences.

    (i)  Q W W = W W Q as exact matrices;
    (ii) int (W a, b) = (-1)^{|a|} int (a, W b) on compact sections;
    then P W = W P exactly, formal self-adjointness of P under the pairing,
    and G_pm W = W G_pm with residual confined to the boundary zones.
    """
    W = bundle.witness.W
    Q = bundle.complex.Q
    P = bundle.witness.op.p
    pairing = bundle.pairing
    lattice = bundle.lattice
    space = bundle.complex.space
    degs = space.degrees()

    suite.run("witness_square_compat", "Q W W = W W Q",
              lambda: (Q @ W @ W) == (W @ W @ Q))
    suite.run("witness_commutes_P", "P W = W P",
              lambda: (P @ W) == (W @ P))

    if pairing is not None:
        def rand(d):
            return random_section(space, lattice, d, rng)

        def check_ii():
            vacuous = True
            for _ in range(4 * n_pairs):
                d1, d2 = rng.choice(degs), rng.choice(degs)
                a, b = rand(d1), rand(d2)
                lhs = integrate_pairing(pairing, W.apply(a), b)
                rhs = ((-1) ** d1) * integrate_pairing(pairing, a, W.apply(b))
                if lhs != rhs:
                    return False, {"degrees": (d1, d2)}
                if lhs != 0:
                    vacuous = False
            return True, ({"note": "vacuous"} if vacuous else None)
        suite.run("witness_pairing_self_adjoint",
                  "int (W a, b) = (-1)^{|a|} int (a, W b)", check_ii)

        def check_p_self_adjoint():
            for _ in range(2 * n_pairs):
                d1, d2 = rng.choice(degs), rng.choice(degs)
                a, b = rand(d1), rand(d2)
                if integrate_pairing(pairing, P.apply(a), b) != \
                        integrate_pairing(pairing, a, P.apply(b)):
                    return False, {"degrees": (d1, d2)}
            return True
        suite.run("induced_operator_self_adjoint",
                  "int (P a, b) = int (a, P b)", check_p_self_adjoint)

    green = bundle.witness.green
    top_zone, bottom_zone = boundary_zones(bundle.witness.op)

    def check_gw(direction, zone):
        for _ in range(n_pairs):
            d = rng.choice(degs)
            a = random_section(space, lattice, d, rng, density=0.15)
            try:
                lhs = green.apply(W.apply(a), direction)
            except ValueError:
                continue
            rhs = W.apply(green.apply(a, direction))
            if not support_in_zone(lattice, lhs - rhs, zone):
                return False, {"degree": d}
        return True
    suite.run("witness_commutes_solver_retarded",
              "G+ W = W G+ (residual in the top boundary zone)",
              lambda: check_gw(+1, top_zone))
    suite.run("witness_commutes_solver_advanced",
              "G- W = W G- (residual in the bottom boundary zone)",
              lambda: check_gw(-1, bottom_zone))


def broken_witness_detected(bundle: ModelBundle, rng, n_pairs: int = 40) -> bool:
    """Negative control: an unbalanced witness rescaling must fail axiom (ii).

    Doubling W in a single degree leaves Q W W = W W Q intact for the
    shipped witnesses but breaks the pairing symmetry whenever the two
    sides of (ii) route through different witness components.  (A uniform
    rescaling 2W would NOT fail (ii): the condition is W-homogeneous.)
    """
    pairing = bundle.pairing
    if pairing is None:
        return False
    W = bundle.witness.W
    space = bundle.complex.space
    lattice = bundle.lattice
    degs = space.degrees()
    top = max(W.blocks)
    broken = GradedMap(space, space, -1,
                       {n: (b.scaled(2) if n == top else b)
                        for n, b in W.blocks.items()})
    for _ in range(n_pairs):
        d1, d2 = rng.choice(degs), rng.choice(degs)
        a = random_section(space, lattice, d1, rng)
        b = random_section(space, lattice, d2, rng)
        lhs = integrate_pairing(pairing, broken.apply(a), b)
        rhs = ((-1) ** d1) * integrate_pairing(pairing, a, broken.apply(b))
        if lhs != rhs:
            return True
    return False
