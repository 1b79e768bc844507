"""Poisson structures from the differential pairing, with exact homotopies.

Bilinear forms are stored blockwise as matrices over the cell bases, one
sparse block per (unshifted) degree pair; evaluation is  phi1^T B phi2.
The solution homotopies enter through their assembled matrices, whose
columns cover the margin-interior cells; every identity is asserted as a
literal submatrix equality over a declared interior test window.

Degree conventions: the covariant forms live on the 1-shift of the
compact complex, so their grading and Koszul signs use the shifted degree
s = (cell degree) - 1 and the shifted differential -Q; the fixed-time form
lives on slab sections with the unshifted conventions.  The fixed-time
form is

    sigma(psi1 (x) psi2) := (-1)^(m-1) * (slice sum of (psi1, psi2)),

where the slice sum is pinned by the discrete Stokes split (dec module):
summing d(omega) over the future (past) half of the slab telescopes to
-(+) the slice sum of omega.  With that orientation the comparison chain

    D lambda~ = sigma o Lambda^(x)2 - tau~

closes exactly, and each intermediate line of it is asserted separately.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable

from . import dec
from .green import boundary_zones
from .homalg import Cochain, GradedMap, SparseMatrix
from .lattice import CauchySlice, CausalLattice
from .models import DifferentialPairing, ModelBundle
from .rma import QuasiIsoCertificate, RMAMap

HALF = Fraction(1, 2)

Blocks = dict[tuple[int, int], SparseMatrix]


@dataclass
class BilinearForm:
    """Blockwise bilinear form; ``shifted`` selects the grading convention."""

    bundle: ModelBundle
    blocks: Blocks
    shifted: bool                  # True: lives on the 1-shift (covariant side)
    degree: int = 0                # total degree as a cochain on the tensor square

    def _s(self, d: int) -> int:
        return d - 1 if self.shifted else d

    def block(self, d1: int, d2: int) -> SparseMatrix:
        b = self.blocks.get((d1, d2))
        if b is None:
            space = self.bundle.complex.space
            b = SparseMatrix(space.dim(d1), space.dim(d2))
        return b

    def value(self, phi1: Cochain, phi2: Cochain) -> Fraction:
        b = self.block(phi1.degree, phi2.degree)
        tot = Fraction(0)
        v2 = phi2.to_indices()
        img = b.apply(v2)
        for i, v in phi1.to_indices().items():
            u = img.get(i)
            if u:
                tot += v * u
        return tot

    def __sub__(self, other: "BilinearForm") -> "BilinearForm":
        keys = set(self.blocks) | set(other.blocks)
        return BilinearForm(self.bundle,
                            {k: self.block(*k) - other.block(*k) for k in keys},
                            self.shifted, self.degree)

    def __add__(self, other: "BilinearForm") -> "BilinearForm":
        keys = set(self.blocks) | set(other.blocks)
        return BilinearForm(self.bundle,
                            {k: self.block(*k) + other.block(*k) for k in keys},
                            self.shifted, self.degree)

    def scaled(self, a) -> "BilinearForm":
        return BilinearForm(self.bundle,
                            {k: b.scaled(a) for k, b in self.blocks.items()},
                            self.shifted, self.degree)

    def asym(self) -> "BilinearForm":
        """Graded anti-symmetrization (idempotent on anti-symmetric forms)."""
        keys = set(self.blocks) | {(d2, d1) for (d1, d2) in self.blocks}
        out: Blocks = {}
        for (d1, d2) in keys:
            sign = (-1) ** (self._s(d1) * self._s(d2))
            out[(d1, d2)] = (self.block(d1, d2)
                             - self.block(d2, d1).transpose().scaled(sign)) \
                .scaled(HALF)
        return BilinearForm(self.bundle, out, self.shifted, self.degree)

    def is_antisymmetric_on(self, window_idx: dict[int, list[int]]) -> bool:
        return (self - self.asym()).vanishes_on(window_idx)

    def diff(self) -> "BilinearForm":
        """The internal-hom differential of the form on the tensor square."""
        Q = self.bundle.complex.Q
        sgn_q = -1 if self.shifted else 1     # shifted differential is -Q
        keys = set()
        for (d1, d2) in self.blocks:
            keys.add((d1 - 1, d2))
            keys.add((d1, d2 - 1))
        out: Blocks = {}
        for (d1, d2) in keys:
            space = self.bundle.complex.space
            acc = SparseMatrix(space.dim(d1), space.dim(d2))
            b1 = self.blocks.get((d1 + 1, d2))
            if b1 is not None and d1 in Q.blocks:
                acc = acc + (Q.block(d1).transpose() @ b1).scaled(sgn_q)
            b2 = self.blocks.get((d1, d2 + 1))
            if b2 is not None and d2 in Q.blocks:
                s = sgn_q * ((-1) ** self._s(d1))
                acc = acc + (b2 @ Q.block(d2)).scaled(s)
            if not acc.is_zero():
                out[(d1, d2)] = acc
        return BilinearForm(self.bundle, out, self.shifted, self.degree + 1)

    def vanishes_on(self, window_idx: dict[int, list[int]]) -> bool:
        for (d1, d2), b in self.blocks.items():
            rows = window_idx.get(d1)
            cols = window_idx.get(d2)
            if rows is None or cols is None:
                continue
            if not b.restrict(rows, cols).is_zero():
                return False
        return True

    def equals_on(self, other: "BilinearForm",
                  window_idx: dict[int, list[int]]) -> bool:
        return (self - other).vanishes_on(window_idx)


# -- assembly context ---------------------------------------------------------------


class PoissonContext:
    """Assembled operators and evaluation matrices for one model."""

    def __init__(self, bundle: ModelBundle, rma: RMAMap,
                 extra_plus: GradedMap | None = None,
                 extra_minus: GradedMap | None = None,
                 domain_window: tuple[int, int] | None = None):
        if bundle.pairing is None:
            raise ValueError("model has no differential pairing")
        self.bundle = bundle
        self.rma = rma
        self.pairing: DifferentialPairing = bundle.pairing
        lattice = bundle.lattice
        self.lattice = lattice
        if domain_window is None:
            d = bundle.witness.op.boundary_zone_depth() + 1
            domain_window = (max(1, d - 1),
                             min(lattice.n_time - 2, lattice.n_time - d))
        self.domain_window = domain_window
        self.hom_plus = rma.hom_plus.matrix(domain_window)
        self.hom_minus = rma.hom_minus.matrix(domain_window)
        if extra_plus is not None:
            self.hom_plus = self.hom_plus + extra_plus
        if extra_minus is not None:
            self.hom_minus = self.hom_minus + extra_minus
        self.lam = self.hom_plus - self.hom_minus
        self._ev_cache: dict[tuple, Blocks] = {}
        self._form_cache: dict[tuple, BilinearForm] = {}

    # evaluation matrices over cell regions --------------------------------------

    def _ev_blocks(self, cells_key: str, t_slice: int | None = None) -> Blocks:
        key = (cells_key, t_slice)
        got = self._ev_cache.get(key)
        if got is not None:
            return got
        lattice = self.lattice
        m = lattice.m
        if cells_key == "all":
            cells = dec.top_cells(lattice)
            want = m
        elif cells_key == "future":
            cells = dec.top_cells_future(lattice, t_slice)
            want = m
        elif cells_key == "past":
            cells = dec.top_cells_past(lattice, t_slice)
            want = m
        elif cells_key == "slice":
            cells = dec.slice_cells(lattice, t_slice)
            want = m - 1
        else:
            raise KeyError(cells_key)
        space = self.bundle.complex.space
        out: Blocks = {}
        degs = space.degrees()
        for d1 in degs:
            for d2 in degs:
                if self.pairing.out_form_degree(d1, d2) != want:
                    continue
                out[(d1, d2)] = self.pairing.region_matrix(d1, d2, cells)
        self._ev_cache[key] = out
        return out

    def ev_full(self) -> Blocks:
        return self._ev_blocks("all")

    # the Poisson structures ------------------------------------------------------

    def _cached(self, key: tuple, build) -> BilinearForm:
        got = self._form_cache.get(key)
        if got is None:
            got = build()
            self._form_cache[key] = got
        return got

    def tau_tilde(self) -> BilinearForm:
        """ev_M(phi1, Lambda phi2) on the shifted compact side."""
        return self._cached(("tau_tilde",), self._tau_tilde)

    def _tau_tilde(self) -> BilinearForm:
        E = self.ev_full()
        out: Blocks = {}
        for (a, b), eb in E.items():
            d2 = b + 1
            blk = self.lam.blocks.get(d2)
            if blk is None:
                continue
            prod = eb @ blk
            if not prod.is_zero():
                out[(a, d2)] = prod
        return BilinearForm(self.bundle, out, shifted=True)

    def tau(self, antisymmetrize: bool = False) -> BilinearForm:
        t = self.tau_tilde()
        return t.asym() if antisymmetrize else t

    def tau_pm(self, direction: int) -> BilinearForm:
        """+- ev(phi1, hom phi2) -+ braided counterpart; anti-symmetric by
        construction."""
        return self._cached(("tau_pm", direction),
                            lambda: self._tau_pm(direction))

    def _tau_pm(self, direction: int) -> BilinearForm:
        E = self.ev_full()
        hom = self.hom_plus if direction > 0 else self.hom_minus
        sgn = 1 if direction > 0 else -1
        out: Blocks = {}
        for (a, b), eb in E.items():
            d2 = b + 1
            blk = hom.blocks.get(d2)
            if blk is None:
                continue
            first = eb.scaled(sgn) @ blk
            key = (a, d2)
            out[key] = out.get(key, SparseMatrix(first.nrows, first.ncols)) + first
        for (a, b), eb in E.items():
            # second term: -+ (-1)^{s1 s2} ev(phi2, hom phi1) transposed
            d1 = b + 1
            blk = hom.blocks.get(d1)
            if blk is None:
                continue
            s1, s2 = d1 - 1, a - 1
            sign = -sgn * ((-1) ** (s1 * s2))
            second = (eb @ blk).transpose().scaled(sign)
            key = (d1, a)
            out[key] = out.get(key, SparseMatrix(second.nrows, second.ncols)) \
                + second
        return BilinearForm(self.bundle, {k: v for k, v in out.items()
                                          if not v.is_zero()}, shifted=True)

    def lambda_m_tilde(self) -> BilinearForm:
        """-ev_M(hom+ phi1, hom- phi2), comparing tau+ with tau."""
        return self._cached(("lambda_m_tilde",), self._lambda_m_tilde)

    def _lambda_m_tilde(self) -> BilinearForm:
        E = self.ev_full()
        out: Blocks = {}
        for (a, b), eb in E.items():
            for d1, blk1 in self.hom_plus.blocks.items():
                if d1 - 1 != a:
                    continue
                for d2, blk2 in self.hom_minus.blocks.items():
                    if d2 - 1 != b:
                        continue
                    prod = (blk1.transpose() @ eb @ blk2).scaled(-1)
                    if not prod.is_zero():
                        key = (d1, d2)
                        out[key] = out.get(
                            key, SparseMatrix(prod.nrows, prod.ncols)) + prod
        return BilinearForm(self.bundle, out, shifted=True)

    def lambda_m(self) -> BilinearForm:
        return self.lambda_m_tilde().asym()

    def sigma(self, t_slice: int) -> BilinearForm:
        """(-1)^(m-1) x slice sum of the pairing: the fixed-time structure."""
        m = self.lattice.m
        S = self._ev_blocks("slice", t_slice)
        sgn = (-1) ** (m - 1)
        return BilinearForm(self.bundle,
                            {k: b.scaled(sgn) for k, b in S.items()},
                            shifted=False)

    def sigma_pullback(self, t_slice: int) -> BilinearForm:
        """sigma(Lambda phi1 (x) Lambda phi2) on the shifted compact side."""
        return self._cached(("sigma_pullback", t_slice),
                            lambda: self._sigma_pullback(t_slice))

    def _sigma_pullback(self, t_slice: int) -> BilinearForm:
        sig = self.sigma(t_slice)
        out: Blocks = {}
        for (a, b), sb in sig.blocks.items():
            for d1, blk1 in self.lam.blocks.items():
                if d1 - 1 != a:
                    continue
                for d2, blk2 in self.lam.blocks.items():
                    if d2 - 1 != b:
                        continue
                    prod = blk1.transpose() @ sb @ blk2
                    if not prod.is_zero():
                        key = (d1, d2)
                        out[key] = out.get(
                            key, SparseMatrix(prod.nrows, prod.ncols)) + prod
        return BilinearForm(self.bundle, out, shifted=True)

    def lambda_compat_tilde(self, t_slice: int) -> BilinearForm:
        """sum_{future}(hom- phi1, Lambda phi2) + sum_{past}(hom+ phi1, ...)."""
        return self._cached(("lambda_compat_tilde", t_slice),
                            lambda: self._lambda_compat_tilde(t_slice))

    def _lambda_compat_tilde(self, t_slice: int) -> BilinearForm:
        EP = self._ev_blocks("future", t_slice)
        EM = self._ev_blocks("past", t_slice)
        out: Blocks = {}
        for blocks, hom in ((EP, self.hom_minus), (EM, self.hom_plus)):
            for (a, b), eb in blocks.items():
                for d1, blk1 in hom.blocks.items():
                    if d1 - 1 != a:
                        continue
                    for d2, blk2 in self.lam.blocks.items():
                        if d2 - 1 != b:
                            continue
                        prod = blk1.transpose() @ eb @ blk2
                        if not prod.is_zero():
                            key = (d1, d2)
                            out[key] = out.get(
                                key, SparseMatrix(prod.nrows, prod.ncols)) + prod
        return BilinearForm(self.bundle, out, shifted=True)

    def lambda_compat(self, t_slice: int) -> BilinearForm:
        return self.lambda_compat_tilde(t_slice).asym()

    # windows ----------------------------------------------------------------------

    def window_indices(self, window: tuple[int, int]) -> dict[int, list[int]]:
        space = self.bundle.complex.space
        lattice = self.lattice
        out = {}
        for n in space.degrees():
            labels = space.labels(n)
            out[n] = [i for i, c in enumerate(labels)
                      if dec.cell_in_time_window(lattice, c, window)]
        return out

    def default_window(self) -> tuple[int, int]:
        d = self.bundle.witness.op.boundary_zone_depth() + 1
        return (d + 1, self.lattice.n_time - 2 - d)


# -- verification drivers --------------------------------------------------------------


def verify_ev_cochain_map(ctx: PoissonContext, suite, rng, n_pairs: int = 50,
                          window: tuple[int, int] | None = None) -> None:
    """Integration over the slab kills total differentials (discrete Stokes)."""
    from .models import random_section
    bundle = ctx.bundle
    space = bundle.complex.space
    lattice = ctx.lattice
    if window is None:
        window = (lattice.margin, lattice.n_time - 1 - lattice.margin)
    Q = bundle.complex.Q

    def check():
        pairing = ctx.pairing
        for _ in range(n_pairs):
            d1 = rng.choice(space.degrees())
            d2 = rng.choice(space.degrees())
            a = random_section(space, lattice, d1, rng, window=window)
            b = random_section(space, lattice, d2, rng, window=window)
            from .models import integrate_pairing
            lhs = integrate_pairing(pairing, Q.apply(a), b) \
                + ((-1) ** d1) * integrate_pairing(pairing, a, Q.apply(b))
            if lhs != 0:
                return False, {"degrees": (d1, d2)}
        return True
    suite.run("ev_kills_total_differentials",
              "slab integration is a cochain map to the ground field", check)


def verify_covariant_poisson(ctx: PoissonContext, suite,
                             window: tuple[int, int] | None = None) -> None:
    """tau, tau+ and tau- are anti-symmetric cochain maps and coincide for a
    self-adjoint witness; D(lambda_M) = tau+ - tau = tau - tau-."""
    if window is None:
        window = ctx.default_window()
    W = ctx.window_indices(window)
    tau_t = ctx.tau_tilde()
    tau = tau_t.asym()
    tp = ctx.tau_pm(+1)
    tm = ctx.tau_pm(-1)

    suite.run("tau_tilde_antisymmetric",
              "ev(phi1, Lambda phi2) is already graded anti-symmetric",
              lambda: tau_t.equals_on(tau, W))
    suite.run("tau_plus_antisymmetric", "tau+ graded anti-symmetric",
              lambda: tp.is_antisymmetric_on(W))
    suite.run("tau_minus_antisymmetric", "tau- graded anti-symmetric",
              lambda: tm.is_antisymmetric_on(W))
    suite.run("tau_cochain_map", "D tau = 0 on the window",
              lambda: tau.diff().vanishes_on(W))
    suite.run("tau_pm_cochain_map", "D tau+- = 0 on the window",
              lambda: tp.diff().vanishes_on(W) and tm.diff().vanishes_on(W))
    suite.run("tau_pm_coincide", "tau+ = tau- = tau for the self-adjoint witness",
              lambda: tp.equals_on(tau, W) and tm.equals_on(tau, W))
    lam_m = ctx.lambda_m()
    suite.run("lambda_M_asym_consistent",
              "lambda_M is the anti-symmetrization of its unsymmetrized form",
              lambda: lam_m.equals_on(ctx.lambda_m_tilde().asym(), W))
    dlm = lam_m.diff()
    suite.run("lambda_M_compares_tau_plus", "D lambda_M = tau+ - tau",
              lambda: dlm.equals_on(tp - tau, W))
    suite.run("lambda_M_compares_tau_minus", "D lambda_M = tau - tau-",
              lambda: dlm.equals_on(tau - tm, W))


def verify_sigma(ctx: PoissonContext, slice_: CauchySlice, suite,
                 window: tuple[int, int] | None = None) -> None:
    if window is None:
        window = ctx.default_window()
    W = ctx.window_indices(window)
    sig = ctx.sigma(slice_.time_index)
    suite.run("sigma_antisymmetric", "fixed-time structure graded anti-symmetric",
              lambda: sig.is_antisymmetric_on(W))
    suite.run("sigma_cochain_map", "D sigma = 0 on the window",
              lambda: sig.diff().vanishes_on(W))


def verify_lambda_compat(ctx: PoissonContext, slice_: CauchySlice, suite,
                         window: tuple[int, int] | None = None) -> None:
    """D lambda = sigma o Lambda^2 - tau, with every intermediate line of the
    comparison chain asserted on the declared window."""
    if window is None:
        window = ctx.default_window()
    W = ctx.window_indices(window)
    t = slice_.time_index
    lam_t = ctx.lambda_compat_tilde(t)
    m = ctx.lattice.m
    sgn = (-1) ** (m - 1)

    # direct evaluation route for the intermediate lines, on window samples
    bundle = ctx.bundle
    space = bundle.complex.space
    lattice = ctx.lattice
    Q = bundle.complex.Q
    pairing = ctx.pairing
    lam_mat = ctx.lam
    hom_p, hom_m = ctx.hom_plus, ctx.hom_minus

    def apply_map(gm: GradedMap, phi: Cochain) -> Cochain:
        return gm.apply(phi)

    def pair_sum(aa: Cochain, bb: Cochain, cells) -> Fraction:
        vals = pairing.evaluate(aa, bb)
        return dec.integrate_top(vals, cells)

    dm1 = dec.build_d(lattice, m - 1)
    cells_m1 = lattice.cells(m - 1)
    idx_m1 = {c: i for i, c in enumerate(cells_m1)}
    cells_m = lattice.cells(m)

    def mid_component(aa: Cochain, bb: Cochain) -> dict:
        """The (m-1)-form component of the pairing, empty in other degrees."""
        if pairing.out_form_degree(aa.degree, bb.degree) != m - 1:
            return {}
        return pairing.evaluate(aa, bb)

    def d_of(om: dict) -> dict:
        vec = {idx_m1[c]: v for c, v in om.items()}
        img = dm1.apply(vec)
        return {cells_m[i]: v for i, v in img.items()}

    def chain_lines(phi1: Cochain, phi2: Cochain):
        t_fut = dec.top_cells_future(lattice, t)
        t_pst = dec.top_cells_past(lattice, t)
        s1 = phi1.degree - 1
        d1p1 = Q.apply(phi1).scaled(-1)
        d1p2 = Q.apply(phi2).scaled(-1)
        line1 = (pair_sum(apply_map(hom_m, d1p1), apply_map(lam_mat, phi2), t_fut)
                 + pair_sum(apply_map(hom_p, d1p1), apply_map(lam_mat, phi2), t_pst)
                 + ((-1) ** s1) * (
                     pair_sum(apply_map(hom_m, phi1), apply_map(lam_mat, d1p2), t_fut)
                     + pair_sum(apply_map(hom_p, phi1), apply_map(lam_mat, d1p2), t_pst)))
        # line 3: (-1)^(m-1) half-slab sums of d(pairing) minus tau~
        om_m = mid_component(apply_map(hom_m, phi1), apply_map(lam_mat, phi2))
        om_p = mid_component(apply_map(hom_p, phi1), apply_map(lam_mat, phi2))
        tau_term = pair_sum(phi1, apply_map(lam_mat, phi2), dec.top_cells(lattice))
        line3 = sgn * (dec.integrate_top(d_of(om_m), t_fut)
                       + dec.integrate_top(d_of(om_p), t_pst)) - tau_term
        # line 4: slice form
        omega = mid_component(apply_map(lam_mat, phi1), apply_map(lam_mat, phi2))
        line4 = sgn * dec.slice_integral(lattice, omega, t) - tau_term
        return line1, line3, line4

    import random as _random

    def check_chain():
        rng = _random.Random(2029)
        degs = space.degrees()
        count = 0
        for _ in range(200):
            d1, d2 = rng.choice(degs), rng.choice(degs)
            cells1 = dec.window_labels(lattice, space, d1, window)
            cells2 = dec.window_labels(lattice, space, d2, window)
            if not cells1 or not cells2:
                continue
            phi1 = Cochain(space, d1, {rng.choice(cells1): Fraction(1)})
            phi2 = Cochain(space, d2, {rng.choice(cells2): Fraction(1)})
            l1, l3, l4 = chain_lines(phi1, phi2)
            sig_term = ctx.sigma_pullback(t).value(phi1, phi2)
            tau_term = ctx.tau_tilde().value(phi1, phi2)
            l5 = sig_term - tau_term
            if not (l1 == l3 == l4 == l5):
                return False, {"degrees": (d1, d2),
                               "lines": [str(l1), str(l3), str(l4), str(l5)]}
            count += 1
            if count >= 40:
                break
        return True
    suite.run("stokes_chain_linewise",
              "each line of the comparison computation agrees", check_chain)

    lam_form = lam_t.asym()
    target = (ctx.sigma_pullback(t) - ctx.tau_tilde()).asym()
    suite.run("lambda_compat_identity",
              "D lambda = sigma o Lambda^2 - tau on the window",
              lambda: lam_form.diff().equals_on(target, ctx.window_indices(window)))


def cauchy_independence(ctx: PoissonContext, cert: QuasiIsoCertificate,
                        rma: RMAMap, t1: int, t2: int, suite,
                        window: tuple[int, int] | None = None) -> BilinearForm:
    """A homotopy between the fixed-time structures of two slices.

    Built from the two comparison homotopies and the certificate data:
    with D := sigma_1 - sigma_2 and ell := lambda_1 - lambda_2,

        hom := ell o (Theta (x) Theta) + D o (Upsilon (x) id)
                 + D o (Lambda Theta (x) Upsilon),

    whose differential is exactly D on the declared slab window (temporal
    boundary defects of Upsilon are invisible to interior slice sums).
    """
    if window is None:
        window = ctx.default_window()
    bundle = ctx.bundle
    space = bundle.complex.space
    Q = bundle.complex.Q
    chi = cert.pou.chi_plus
    mchi = dec.time_profile_mult(ctx.lattice, space, chi)
    theta = (Q @ mchi) - (mchi @ Q)
    mchi_m = dec.time_profile_mult(ctx.lattice, space, cert.pou.chi_minus)
    upsilon = (ctx.hom_plus @ mchi) + (ctx.hom_minus @ mchi_m)
    lam_theta = ctx.lam @ theta

    sig1 = ctx.sigma(t1)
    sig2 = ctx.sigma(t2)
    D = sig1 - sig2
    ell = ctx.lambda_compat_tilde(t1).asym() - ctx.lambda_compat_tilde(t2).asym()

    out: Blocks = {}

    def add(key, mat):
        if not mat.is_zero():
            out[key] = out.get(key, SparseMatrix(mat.nrows, mat.ncols)) + mat

    # ell o (Theta (x) Theta): Theta raises the cell degree by one
    for (d1, d2), b in ell.blocks.items():
        t1b = theta.blocks.get(d1 - 1)
        t2b = theta.blocks.get(d2 - 1)
        if t1b is None or t2b is None:
            continue
        add((d1 - 1, d2 - 1), t1b.transpose() @ b @ t2b)
    # D o (Upsilon (x) id)
    for (a, b), db in D.blocks.items():
        ub = upsilon.blocks.get(a + 1)
        if ub is not None:
            add((a + 1, b), ub.transpose() @ db)
    # D o (Lambda Theta (x) Upsilon), Koszul sign (-1)^a from |Upsilon| = -1
    for (a, b), db in D.blocks.items():
        lt = lam_theta.blocks.get(a)
        ub = upsilon.blocks.get(b + 1)
        if lt is None or ub is None:
            continue
        add((a, b + 1), (lt.transpose() @ db @ ub).scaled((-1) ** a))
    hom = BilinearForm(bundle, out, shifted=False).asym()

    W = ctx.window_indices(window)
    suite.run("cauchy_independence",
              f"D hom = sigma(t={t1}) - sigma(t={t2}) on the window",
              lambda: hom.diff().equals_on(D, W))
    return hom
