"""Config-driven verification harness and command line.

Subcommands:

* ``verify       --config PATH [--seed N] [--suite NAME ...] [--report PATH]``
* ``green-dump   --config PATH --source t,x[,y] [--degree N]
                 [--variant retarded|advanced] --out PATH``
* ``cohomology   --config PATH [--report PATH]``
* ``list-models``

Exit codes: 0 all checks pass, 1 at least one check failed, 2 config error.
Reports are deterministic for a fixed (config, seed) up to the timing and
environment fields.
"""

from __future__ import annotations

import argparse
import csv
import random
import sys
from fractions import Fraction
from pathlib import Path

from . import dec, poisson, rma as rmamod
from .config import ConfigError, RunConfig, load_config
from .green import (boundary_zones, cone_containment, formal_adjoint_check,
                    verify_green_identities, verify_solver_determinism)
from .homalg import Cochain, cohomology_dims, shift
from .lattice import CausalLattice, random_compact_region
from .models import (KINDS, ModelBundle, ModelSpec, broken_witness_detected,
                     build_model, validate_pairing,
                     validate_self_adjoint_witness)
from .report import Report, strip_timing


def _suite_rng(cfg: RunConfig, name: str) -> random.Random:
    return random.Random(f"{cfg.seed}:{name}")


def _window_sample(bundle: ModelBundle, window: tuple[int, int],
                   rng: random.Random, limit: int) -> list:
    space = bundle.complex.space
    lattice = bundle.lattice
    sample = [(n, c) for n in space.degrees()
              for c in dec.window_labels(lattice, space, n, window)]
    if len(sample) > limit:
        sample = rng.sample(sample, limit)
        sample.sort()
    return sample


def _default_window(cfg: RunConfig) -> tuple[int, int]:
    return (cfg.slice_minus, cfg.slice_plus)


def _run_witness_suite(cfg: RunConfig, bundle: ModelBundle, rep: Report) -> None:
    suite = rep.suite("witness")
    rng = _suite_rng(cfg, "witness")
    Q = bundle.complex.Q
    suite.run("differential_squares_to_zero", "Q Q = 0 as exact matrices",
              lambda: (Q @ Q).is_zero())
    P = bundle.witness.op.p
    suite.run("induced_operator_decomposition", "P = Q W + W Q",
              lambda: P == (Q @ bundle.witness.W) + (bundle.witness.W @ Q))
    suite.add("induced_operator_certified",
              "P certified causally solvable in every degree", True,
              witness={"stencil_radius": bundle.witness.op.stencil_radius})
    window = _default_window(cfg)
    limit = 400 if bundle.lattice.m == 2 else 160
    sample = _window_sample(bundle, window, rng, limit)
    rmap = rmamod.rma_map(bundle)
    rmamod.verify_green_homotopy(rmap.hom_plus, suite, window, sample=sample)
    rmamod.verify_green_homotopy(rmap.hom_minus, suite, window, sample=sample)
    small = sample[: max(20, limit // 6)]
    rmamod.verify_two_homotopy(bundle, suite, window, sample=small)
    mu = rmamod.witness_perturbation(bundle, rng)
    if mu is not None:
        rmamod.verify_two_homotopy(bundle, suite, window, sample=small,
                                   perturbation=mu, expect_coincide=False,
                                   tag="perturbed")


def _run_green_suite(cfg: RunConfig, bundle: ModelBundle, rep: Report) -> None:
    suite = rep.suite("green")
    rng = _suite_rng(cfg, "green")
    window = _default_window(cfg)
    limit = 240 if bundle.lattice.m == 2 else 100
    sample = _window_sample(bundle, window, rng, limit)
    verify_green_identities(bundle.witness.op, bundle.witness.green, bundle.complex.Q,
                            suite, window=window, sample=sample)
    verify_solver_determinism(bundle.witness.op, suite, sample[:20])
    formal_adjoint_check(bundle.witness.op, bundle.witness.green, suite, rng,
                         window=window)


def _run_rma_suite(cfg: RunConfig, bundle: ModelBundle, rep: Report) -> None:
    suite = rep.suite("rma")
    rng = _suite_rng(cfg, "rma")
    s_minus, s_mid, s_plus = cfg.slices()
    window = _default_window(cfg)
    rmap = rmamod.rma_map(bundle)
    limit = 200 if bundle.lattice.m == 2 else 80
    sample = _window_sample(bundle, window, rng, limit)
    rmamod.verify_rma_map(rmap, suite, window, sample=sample)
    rmamod.build_certificate(bundle, rmap, s_minus, s_plus, suite,
                             window=window, sample=sample[: max(20, limit // 4)])
    if bundle.lattice.m == 2:
        rmamod.cone_acyclicity(bundle, rmap, suite)
    n_regions = 4 if bundle.lattice.m == 2 else 2
    for i in range(n_regions):
        K = random_compact_region(bundle.lattice, rng, max_sites=2,
                                  time_window=(cfg.slice_mid - 1, cfg.slice_mid + 1))
        rmamod.verify_cone_acyclicity_recognition(bundle, rmap, K, +1, suite)
        rmamod.verify_cone_acyclicity_recognition(bundle, rmap, K, -1, suite)


def _run_poisson_suite(cfg: RunConfig, bundle: ModelBundle, rep: Report) -> None:
    suite = rep.suite("poisson")
    if bundle.pairing is None:
        suite.add("pairing_available",
                  "model ships no differential pairing (see model notes)", True,
                  witness={"note": "suite skipped"})
        return
    rng = _suite_rng(cfg, "poisson")
    s_minus, s_mid, s_plus = cfg.slices()
    rmap = rmamod.rma_map(bundle)
    ctx = poisson.PoissonContext(bundle, rmap)
    poisson.verify_ev_cochain_map(ctx, suite, rng)
    poisson.verify_covariant_poisson(ctx, suite)
    poisson.verify_sigma(ctx, s_mid, suite)
    poisson.verify_lambda_compat(ctx, s_mid, suite)
    cert = rmamod.build_certificate(bundle, rmap, s_minus, s_plus, suite)
    poisson.cauchy_independence(ctx, cert, rmap, s_mid.time_index,
                                min(s_plus.time_index, s_mid.time_index + 2),
                                suite)
    mu = rmamod.witness_perturbation(bundle, rng)
    if mu is not None:
        ctx_p = poisson.PoissonContext(bundle, rmap, extra_plus=mu)
        W = ctx_p.window_indices(ctx_p.default_window())
        tau_p = ctx_p.tau_pm(+1)
        tau_c = ctx_p.tau(antisymmetrize=True)
        delta = tau_p - tau_c
        suite.add("perturbed_homotopy_separates",
                  "a perturbed solution homotopy separates tau+ from tau",
                  not delta.vanishes_on(W))
        suite.run("perturbed_lambda_M_identity",
                  "D lambda_M = tau+ - tau with both sides nonzero",
                  lambda: ctx_p.lambda_m().diff().equals_on(delta, W))


def _run_models_suite(cfg: RunConfig, bundle: ModelBundle, rep: Report) -> None:
    suite = rep.suite("models")
    rng = _suite_rng(cfg, "models")
    if bundle.pairing is not None:
        validate_pairing(bundle, suite, rng)
    validate_self_adjoint_witness(bundle, suite, rng)
    if bundle.pairing is not None:
        suite.run("unbalanced_witness_rejected",
                  "an unbalanced witness rescaling fails the pairing symmetry",
                  lambda: broken_witness_detected(bundle, rng))
    if cfg.model_kind == "ChernSimons":
        from .models import build_complex
        de_rham = build_complex(ModelSpec("DeRham", cfg.lattice))
        shifted = shift(de_rham, 1)
        suite.run("shift_of_form_complex",
                  "the shifted form complex coincides with this model",
                  lambda: (shifted.space == bundle.complex.space
                           and shifted.Q == bundle.complex.Q))


_SUITE_RUNNERS = {
    "witness": _run_witness_suite,
    "green": _run_green_suite,
    "rma": _run_rma_suite,
    "poisson": _run_poisson_suite,
    "models": _run_models_suite,
}


def run_verify(cfg: RunConfig) -> Report:
    rep = Report(cfg.echo())
    bundle = build_model(cfg.model_spec())
    for name in cfg.suites:
        if name == "dgcat":
            _run_dgcat_standalone(cfg, rep)
        else:
            _SUITE_RUNNERS[name](cfg, bundle, rep)
    return rep


def _run_dgcat_standalone(cfg: RunConfig, rep: Report) -> None:
    """Randomized mapping-complex and homotopy-colimit law checks on small
    diagrams; independent of the configured model."""
    from . import dgcat
    from .homalg import (GradedMap, complex_is_acyclic, cone,
                         internal_hom_differential)
    from .toydiagrams import (chain_diagram, contractible_diagram,
                              rand_mapping_cochain, square_diagram,
                              rand_complex, rand_graded_map)
    suite = rep.suite("dgcat")
    rng = _suite_rng(cfg, "dgcat")

    def mk_pair(i):
        if i % 2:
            return (chain_diagram(rng, 3, f"s{i}"), chain_diagram(rng, 3, f"t{i}"))
        return (square_diagram(rng, f"s{i}"), square_diagram(rng, f"t{i}"))

    def check_dd():
        for i in range(20):
            A, B = mk_pair(i)
            eta = rand_mapping_cochain(rng, A, B, rng.randint(-2, 2))
            if not dgcat.mapping_differential(
                    dgcat.mapping_differential(eta)).is_zero():
                return False, {"trial": i}
        return True
    suite.run("mapping_differential_squares_to_zero", "delta delta = 0",
              check_dd)

    def check_compose():
        for i in range(20):
            A = chain_diagram(rng, 2, f"ca{i}")
            B = chain_diagram(rng, 2, f"cb{i}")
            C = chain_diagram(rng, 2, f"cc{i}")
            D = chain_diagram(rng, 2, f"cd{i}")
            f = rand_mapping_cochain(rng, A, B, rng.randint(-1, 1))
            g = rand_mapping_cochain(rng, B, C, rng.randint(-1, 1))
            h = rand_mapping_cochain(rng, C, D, rng.randint(-1, 1))
            if dgcat.mapping_compose(dgcat.mapping_compose(h, g), f) != \
                    dgcat.mapping_compose(h, dgcat.mapping_compose(g, f)):
                return False, {"trial": i, "law": "associativity"}
            lhs = dgcat.mapping_differential(dgcat.mapping_compose(g, f))
            rhs = dgcat.mapping_compose(dgcat.mapping_differential(g), f) \
                + dgcat.mapping_compose(
                    g, dgcat.mapping_differential(f)).scaled((-1) ** g.degree)
            if lhs != rhs:
                return False, {"trial": i, "law": "Leibniz"}
        return True
    suite.run("composition_associative_leibniz",
              "dg-composition: associativity and graded Leibniz", check_compose)

    def check_hocolim():
        for i in range(20):
            D = (chain_diagram(rng, 3, f"h{i}") if i % 2
                 else square_diagram(rng, f"h{i}"))
            H = dgcat.hocolim(D)          # validates d^2 = 0 on construction
            col = dgcat.colimit(D)
            cmp_map = dgcat.hocolim_to_colim(H, col)
            if not internal_hom_differential(cmp_map, H.complex, col[0]).is_zero():
                return False, {"trial": i, "law": "comparison cochain map"}
            if D.poset.has_top() and not complex_is_acyclic(
                    cone(cmp_map, H.complex, col[0])):
                return False, {"trial": i, "law": "filtered comparison quasi-iso"}
        return True
    suite.run("hocolim_total_complex", "d d = 0 and the colimit comparison",
              check_hocolim)

    def check_adjunction():
        for i in range(20):
            A = chain_diagram(rng, 2, f"ad{i}")
            V = rand_complex(rng, f"adv{i}")
            H = dgcat.hocolim(A)
            const = dgcat.constant_diagram(A.poset, V)
            eta = rand_mapping_cochain(rng, A, const, rng.randint(-1, 1))
            fwd = dgcat.adjunct_forward(eta, H, V)
            if dgcat.adjunct_backward(fwd, A, H, V) != eta:
                return False, {"trial": i, "law": "roundtrip"}
            f = rand_graded_map(rng, H.complex, V, rng.randint(-1, 1))
            if dgcat.adjunct_forward(
                    dgcat.adjunct_backward(f, A, H, V), H, V) != f:
                return False, {"trial": i, "law": "roundtrip back"}
            if dgcat.adjunct_forward(dgcat.mapping_differential(eta), H, V) != \
                    internal_hom_differential(fwd, H.complex, V):
                return False, {"trial": i, "law": "cochain property"}
        return True
    suite.run("dg_adjunction_roundtrip",
              "the homotopy colimit / constant diagram adjunction", check_adjunction)

    def check_map_acyclic():
        for i in range(20):
            A = chain_diagram(rng, 2, f"ma{i}", maxdim=2)
            T = contractible_diagram(rng, A.poset, f"mt{i}")
            M = dgcat.mapping_complex_as_ladder(A, T)
            if not complex_is_acyclic(M):
                return False, {"trial": i}
        return True
    suite.run("mapping_into_acyclic_acyclic",
              "the mapping complex into an acyclic diagram is acyclic",
              check_map_acyclic)


# -- other subcommands -----------------------------------------------------------------


def run_green_dump(cfg: RunConfig, source: tuple[int, ...], degree: int,
                   variant: str, out_path: Path) -> None:
    bundle = build_model(cfg.model_spec())
    space = bundle.complex.space
    lattice = bundle.lattice
    cell = (0, source)
    if not space.has(degree, cell):
        raise ConfigError(f"no degree-{degree} site cell at {source}")
    phi = Cochain(space, degree, {cell: Fraction(1)})
    direction = +1 if variant == "retarded" else -1
    psi = bundle.witness.green.apply(phi, direction, strict_margin=True)
    if not cone_containment(bundle.witness.op, phi, psi, direction):
        raise AssertionError("cone containment violated; refusing to write dump")
    with out_path.open("w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["t", *(f"x{i}" for i in range(1, lattice.m)),
                    "degree", "fiber", "numerator", "denominator"])
        for c in sorted(psi.coeffs):
            sbits, coords = c
            v = psi.coeffs[c]
            w.writerow([coords[0], *coords[1:], degree, sbits,
                        v.numerator, v.denominator])


def run_cohomology(cfg: RunConfig) -> Report:
    rep = Report(cfg.echo())
    bundle = build_model(cfg.model_spec())
    rmap = rmamod.rma_map(bundle)
    suite = rep.suite("cohomology")
    rng = _suite_rng(cfg, "cohomology")
    n_regions = 3 if bundle.lattice.m == 2 else 2
    for i in range(n_regions):
        K = random_compact_region(bundle.lattice, rng, max_sites=2,
                                  time_window=(cfg.slice_mid - 1, cfg.slice_mid + 1))
        for direction in (+1, -1):
            rmamod.verify_cone_acyclicity_recognition(bundle, rmap, K,
                                                      direction, suite)
    if bundle.lattice.m == 2:
        rmamod.cone_acyclicity(bundle, rmap, suite)
    dims = cohomology_dims(bundle.complex,
                           mod_p=(1 << 31) - 1 if bundle.lattice.m == 3 else None)
    suite.add("full_slab_cohomology",
              "unrestricted slab cohomology (reported, not a failure)", True,
              witness={"dims": {str(k): v for k, v in dims.items()}})
    return rep


def list_models() -> str:
    lines = ["shipped models:"]
    notes = {
        "KleinGordon": "degrees 0,1 site fields; wave-plus-mass differential; "
                       "identity witness; pairing shipped",
        "DeRham": "form complex, degrees 0..m; witness = codifferential",
        "ChernSimons": "1-shift of the form complex (m = 3); complex and "
                       "witness only, no pairing (cell products are not "
                       "graded-commutative)",
        "MaxwellP": "p = 1 on a 2d lattice, degrees -1..2; "
                    "witness (codiff, id, d); pairing shipped",
    }
    for k in KINDS:
        lines.append(f"  {k}: {notes[k]}")
    return "\n".join(lines)


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(prog="greenhyp", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p_verify = sub.add_parser("verify", help="run the identity suites")
    p_verify.add_argument("--config", required=True)
    p_verify.add_argument("--seed", type=int)
    p_verify.add_argument("--suite", action="append", default=None)
    p_verify.add_argument("--report", type=Path)
    p_verify.add_argument("--cache", type=Path)

    p_dump = sub.add_parser("green-dump", help="dump one solver column as CSV")
    p_dump.add_argument("--config", required=True)
    p_dump.add_argument("--source", required=True,
                        help="comma-separated site, e.g. 8,3")
    p_dump.add_argument("--degree", type=int, default=0)
    p_dump.add_argument("--variant", choices=("retarded", "advanced"),
                        default="retarded")
    p_dump.add_argument("--out", type=Path, required=True)

    p_coh = sub.add_parser("cohomology", help="cohomology reports")
    p_coh.add_argument("--config", required=True)
    p_coh.add_argument("--report", type=Path)

    sub.add_parser("list-models", help="list shipped model kinds")

    args = parser.parse_args(argv)
    try:
        if args.command == "list-models":
            print(list_models())
            return 0
        cfg = load_config(args.config)
        if getattr(args, "seed", None) is not None:
            cfg.seed = args.seed
        if getattr(args, "suite", None):
            from .config import SUITE_ORDER
            for s in args.suite:
                if s not in SUITE_ORDER:
                    raise ConfigError(f"unknown suite {s!r}")
            cfg.suites = tuple(s for s in SUITE_ORDER if s in args.suite)
        if getattr(args, "cache", None) is not None:
            cfg.cache_dir = str(args.cache)
        if args.command == "verify":
            rep = run_verify(cfg)
            text = rep.to_json()
            if args.report:
                args.report.write_text(text)
            for s in rep.suites:
                for c in s.checks:
                    print(f"[{'PASS' if c.passed else 'FAIL'}] "
                          f"{s.name}.{c.name}: {c.anchor}")
            print("overall:", "PASS" if rep.passed() else "FAIL")
            return 0 if rep.passed() else 1
        if args.command == "green-dump":
            source = tuple(int(x) for x in args.source.split(","))
            run_green_dump(cfg, source, args.degree, args.variant, args.out)
            print(f"wrote {args.out}")
            return 0
        if args.command == "cohomology":
            rep = run_cohomology(cfg)
            text = rep.to_json()
            if args.report:
                args.report.write_text(text)
            for s in rep.suites:
                for c in s.checks:
                    print(f"[{'PASS' if c.passed else 'FAIL'}] "
                          f"{s.name}.{c.name}")
            print("overall:", "PASS" if rep.passed() else "FAIL")
            return 0 if rep.passed() else 1
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    return 2


if __name__ == "__main__":
    sys.exit(main())
