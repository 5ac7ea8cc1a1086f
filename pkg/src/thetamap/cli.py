"""Command-line front end: instance generation, verification suites and
replayable JSON certificates.

Every run is deterministic in (seed, prime): randomness flows from one
master seed through labelled child streams, certificates carry no
timestamps, and replaying a configuration reproduces the certificate byte
for byte.  Exit codes: 0 all checks pass, 1 a mathematical check failed,
2 configuration error, 3 inconclusive (a rank failed to saturate even
after doubling the samples).
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass, field as dc_field

from thetamap.exact_core import (
    DEFAULT_PRIME,
    PrimeField,
    derived_rng,
    is_prime,
    random_point,
)
from thetamap import hyperelliptic as he
from thetamap import modulimaps as mm
from thetamap import rnc as rnc_mod
from thetamap.linsys import find_relations
from thetamap import polys

CERT_SCHEMA = "thetamap-certificate/1"

PASS = "pass"
FAIL = "fail"
INCONCLUSIVE = "inconclusive"


@dataclass
class CheckResult:
    name: str
    claim: str
    status: str
    details: dict = dc_field(default_factory=dict)

    def to_jsonable(self) -> dict:
        return {
            "name": self.name,
            "claim": self.claim,
            "status": self.status,
            "details": self.details,
        }


@dataclass
class SuiteConfig:
    genus: int = 3
    field: str = "fp"
    prime: int = DEFAULT_PRIME
    seed: int = 1
    margin: int = 10
    suites: tuple = ()
    out: str = ""

    def validate(self) -> None:
        if self.genus < 3:
            raise ConfigError("genus must be at least 3")
        if self.field not in ("fp", "q"):
            raise ConfigError("field must be 'fp' or 'q'")
        if self.prime % 2 == 0 or not is_prime(self.prime):
            raise ConfigError("prime must be an odd prime")
        if self.prime <= 2 * (2 * self.genus):
            raise ConfigError("prime is too small for the degrees in play")
        if self.margin < 1:
            raise ConfigError("margin must be positive")


class ConfigError(ValueError):
    pass


def _result(name, claim, ok, details=None) -> CheckResult:
    return CheckResult(name, claim, PASS if ok else FAIL, details or {})


def _instance(cfg: SuiteConfig) -> he.Instance:
    return he.generate_instance(cfg.genus, cfg.seed, prime=cfg.prime)


def _trace(cfg: SuiteConfig, inst: he.Instance) -> rnc_mod.InvolutionSecantCurve:
    rng = derived_rng(cfg.seed, f"trace-g{cfg.genus}")
    return rnc_mod.involution_secant_curve(inst, rng)


# ---------------------------------------------------------------------------
# the suites


def suite_rr(cfg: SuiteConfig) -> list:
    g = cfg.genus
    results = []
    ok_2d, ok_k2d = True, True
    for i in range(10):
        inst = he.generate_instance(g, cfg.seed + i, prime=cfg.prime)
        dd = inst.divisor_d().times(2)
        dim_2d = len(he.riemann_roch_basis(inst.curve, dd))
        dim_k2d = len(inst.k2d_basis)
        ok_2d &= dim_2d == g + 1
        ok_k2d &= dim_k2d == 3 * g - 1
    results.append(
        _result(
            "rr-dim-2d",
            f"dim L(2D) = g+1 = {g + 1} on 10 random instances",
            ok_2d,
            {"genus": g},
        )
    )
    results.append(
        _result(
            "rr-dim-k2d",
            f"dim L(K+2D) = 3g-1 = {3 * g - 1} on 10 random instances",
            ok_k2d,
            {"genus": g},
        )
    )
    return results


def suite_embed(cfg: SuiteConfig) -> list:
    g = cfg.genus
    inst = _instance(cfg)
    rng = derived_rng(cfg.seed, f"embed-g{g}")
    field = inst.field
    expected = 4 * g - 2
    degrees = []
    for _ in range(6):
        lam = [field.random(rng) for _ in inst.k2d_basis]
        psi = he.combine_functions(inst.k2d_basis, lam)
        degrees.append(he.pole_divisor_degree(psi, inst.d_points))
    ok_deg = all(d == expected for d in degrees)
    span_ok = inst.n_span().dim == 2 * g - 2
    distinct = len(set(inst.embedded_n())) == 2 * g
    return [
        _result(
            "embed-hyperplane-degree",
            f"pulled-back hyperplanes have zero-divisor degree {expected}",
            ok_deg,
            {"degrees": degrees},
        ),
        _result(
            "embed-span-of-n",
            f"the 2g marked points span a P^{2 * g - 2}",
            span_ok,
            {"span_dim": inst.n_span().dim},
        ),
        _result("embed-injective-on-n", "marked points embed to distinct points", distinct),
    ]


def suite_gamma(cfg: SuiteConfig) -> list:
    g = cfg.genus
    inst = _instance(cfg)
    trace = _trace(cfg, inst)
    degree = len(trace.rnc.components[0]) - 1
    section_ok = rnc_mod.hyperplane_section_is_marked_points(
        trace, tuple(range(2 * g - 2))
    )
    return [
        _result(
            "gamma-rnc-degree",
            f"the secant trace is a rational normal curve of degree {2 * g - 2}",
            degree == 2 * g - 2,
            {"degree": degree, "samples": len(trace.samples)},
        ),
        _result(
            "gamma-through-n",
            "the trace curve passes through all 2g marked points",
            all(rnc_mod.contains_point(trace.rnc, q)[0] for q in trace.n_local),
        ),
        _result(
            "gamma-hyperplane-section",
            "a hyperplane through 2g-2 marked points meets the trace only there",
            section_ok,
        ),
    ]


def suite_hn(cfg: SuiteConfig) -> list:
    g = cfg.genus
    inst = _instance(cfg)
    trace = _trace(cfg, inst)
    rng = derived_rng(cfg.seed, f"hn-g{g}")
    fsys, fmap = mm.forgetful_system(list(trace.n_local))
    results = [
        CheckResult(
            "hn-dimension",
            "dimension of the degree-g system through the (g-1)-point spans",
            PASS if (g != 3 or fsys.dim == 5) else FAIL,
            {"dim": fsys.dim},
        )
    ]
    contracted = []
    for _ in range(10):
        curve = mm.random_rnc_through(list(trace.n_local), rng)
        image = mm.map_contracts_curve(fmap, curve, rng, n_params=12)
        contracted.append(image)
    ok_contract = all(v is not None for v in contracted)
    distinct = len({tuple(v.coords) for v in contracted if v is not None}) == len(contracted)
    results.append(
        _result(
            "hn-contracts-rncs",
            "the forgetful map contracts 10 sampled rational normal curves",
            ok_contract and distinct,
            {"distinct_images": distinct},
        )
    )
    if g == 3:
        rel = find_relations(list(fmap.components), 3, rng)
        results.append(
            _result(
                "hn-segre-relation",
                "exactly one cubic relation among the components (Segre cubic)",
                rel.dim == 1 and rel.saturated,
                {"relations": rel.dim},
            )
        )
    return results


def suite_kumar(cfg: SuiteConfig) -> list:
    g = cfg.genus
    field = PrimeField(cfg.prime)
    rng = derived_rng(cfg.seed, f"kumar-g{g}")
    ambient = 2 * g - 3
    e_pts = [random_point(field, ambient, rng) for _ in range(2 * g - 1)]
    osys, omap = mm.quotient_embedding_system(e_pts)
    e0 = random_point(field, ambient, rng)
    lsys, lmap = mm.double_cover_system(e_pts, e0)
    results = [
        CheckResult(
            "kumar-omega-dim",
            "dimension of the degree-(g-1) system with multiplicity g-2 at 2g-1 points",
            PASS if (g != 3 or osys.dim == 5) else FAIL,
            {"dim": osys.dim},
        ),
        CheckResult(
            "kumar-lambda-dim",
            "dimension after one more multiplicity-(g-2) point",
            PASS if (g != 3 or lsys.dim == 4) else FAIL,
            {"dim": lsys.dim},
        ),
        _result(
            "kumar-lambda-in-omega",
            "the projected system is a subsystem of the embedding system",
            osys.span().contains_subspace(lsys.span()),
        ),
    ]
    if g == 3:
        rel = find_relations(list(omap.components), 3, rng)
        cubic_ok = rel.dim == 1
        fibre_ok = cubic_ok and _double_cover_line_check(field, rel.basis[0], omap, e0, rng)
        results.append(
            _result(
                "kumar-image-cubic",
                "the image of the embedding is a cubic hypersurface",
                cubic_ok,
                {"relations": rel.dim},
            )
        )
        results.append(
            _result(
                "kumar-degree-2",
                "20 random lines through the centre meet the cubic in 2 further points",
                fibre_ok,
            )
        )
    return results


def _double_cover_line_check(field, cubic, omap, e0, rng, n_lines: int = 20) -> bool:
    from thetamap.forms import substitute_curve

    w = omap.evaluate(e0)
    if w is None or not field.is_zero(cubic.evaluate(w)):
        return False
    t = cubic.ambient
    for _ in range(n_lines):
        v = random_point(field, t, rng)
        line = [[w.coords[i], v.coords[i]] for i in range(t + 1)]
        restricted = substitute_curve(cubic, line)
        # restricted = c0 s^3 + c1 s^2 t + c2 s t^2 + c3 t^3 with c0 = F(w) = 0;
        # the residual binary quadratic must have two distinct roots
        if not field.is_zero(restricted[0]):
            return False
        quad = restricted[1:]
        if len(quad) != 3 or field.is_zero(quad[0]):
            return False
        disc = field.sub(
            field.mul(quad[1], quad[1]),
            field.mul(field(4), field.mul(quad[0], quad[2])),
        )
        if field.is_zero(disc):
            return False
    return True


def suite_theta3(cfg: SuiteConfig) -> list:
    if cfg.genus != 3:
        raise ConfigError("the theta3 suite runs at genus 3")
    inst = _instance(cfg)
    rng = derived_rng(cfg.seed, "theta3")
    tsys = mm.theta_system(inst, rng, margin=cfg.margin)
    results = []
    if not tsys.saturated:
        results.append(
            CheckResult(
                "theta3-dimension",
                "rank saturation failed even after doubling samples",
                INCONCLUSIVE,
                {"dim": tsys.dim},
            )
        )
        return results
    results.append(
        _result(
            "theta3-dimension",
            "the degree-3 double-vanishing system on P^7 has dimension 8",
            tsys.dim == 8,
            {"dim": tsys.dim, "samples": tsys.provenance.get("samples")},
        )
    )
    ssys = mm.secant_line_system(inst, rng, margin=cfg.margin)
    results.append(
        _result(
            "theta3-secant-variant",
            "the secant-line system coincides with the double-vanishing system",
            ssys.saturated and tsys.same_span(ssys),
            {"secant_dim": ssys.dim},
        )
    )
    rel = find_relations(list(tsys.basis), 2, rng)
    results.append(
        _result(
            "theta3-quadric-relation",
            "exactly one quadric relation among the 8 components",
            rel.dim == 1 and rel.saturated,
            {"relations": rel.dim},
        )
    )
    return results


def suite_factor3(cfg: SuiteConfig) -> list:
    if cfg.genus != 3:
        raise ConfigError("the factor3 suite runs at genus 3")
    inst = _instance(cfg)
    trace = _trace(cfg, inst)
    rng = derived_rng(cfg.seed, "factor3")
    fsys, fmap = mm.forgetful_system(list(trace.n_local))
    results = []
    for k in (0, 1):
        proj = mm.contracting_projection(list(trace.n_local), k)
        osys, _ = mm.quotient_embedding_system(proj.marked_images)
        comp = mm.ComposedMap((proj.map, mm.RationalMap.from_system(osys)))
        ok, _m = mm.compare_maps_up_to_pgl(fmap, comp, rng, n_samples=50)
        results.append(
            _result(
                f"factor3-forgetful-k{k}",
                "the forgetful map equals the quotient embedding after the "
                f"contracting projection at marked point {k}",
                ok,
            )
        )
    tsys = mm.theta_system(inst, rng, margin=cfg.margin)
    rsys = mm.restrict_to_span(tsys, trace.chart)
    phi_dn = mm.RationalMap.from_system(rsys)
    rep = mm.osculating_center_check(trace, fsys, fmap, rng)
    comp = mm.ComposedMap((fmap, mm.projection_from_point(rep.centre)))
    ok, _m = mm.compare_maps_up_to_pgl(phi_dn, comp, rng, n_samples=50)
    results.append(
        _result(
            "factor3-restricted-map",
            "the restricted theta map equals the centre projection after the forgetful map",
            ok,
            {"restricted_dim": rsys.dim},
        )
    )
    results.append(
        _result(
            "factor3-centre-pullback",
            "hyperplanes through the contraction point pull back to the trace-curve system",
            rep.contracted and rep.pullback_equals_gamma,
        )
    )
    return results


def _suite_baselocus(cfg: SuiteConfig, genus: int) -> list:
    if cfg.genus != genus:
        cfg = SuiteConfig(
            genus, cfg.field, cfg.prime, cfg.seed, cfg.margin, cfg.suites, cfg.out
        )
    inst = _instance(cfg)
    trace = _trace(cfg, inst)
    rng = derived_rng(cfg.seed, f"baselocus-g{genus}")
    report = mm.extra_base_locus_scan(trace, rng, trials=20)
    if genus in (4, 5):
        ok = report.all_on_trace
        claim = "all extra secant intersections land on the involution-secant curve"
    else:
        ok = report.all_secant_lines
        claim = "extra intersections are secant lines of the involution-secant curve"
    return [
        _result(
            f"baselocus{genus}",
            claim,
            ok,
            {"trials": len(report.trials)},
        )
    ]


def suite_stretch_weddle(cfg: SuiteConfig) -> list:
    field = PrimeField(cfg.prime)
    rng = derived_rng(cfg.seed, "weddle")
    e_pts = [random_point(field, 3, rng) for _ in range(5)]
    try:
        _osys, omap = mm.quotient_embedding_system(e_pts)
        e0 = random_point(field, 3, rng)
        rep = mm.branch_discriminant_quartic(omap, e0, rng)
    except Exception as exc:  # stretch goal: inconclusive, never a hard failure
        return [
            CheckResult(
                "stretch-weddle",
                f"branch-locus discriminant could not be formed ({exc})",
                INCONCLUSIVE,
            )
        ]
    return [
        _result(
            "stretch-weddle",
            "the branch locus of the centre projection is a quartic surface",
            rep.degree_ok,
            {"chart_degree": rep.chart_quartic.degree},
        )
    ]


SUITES = {
    "rr": suite_rr,
    "embed": suite_embed,
    "gamma": suite_gamma,
    "hn": suite_hn,
    "kumar": suite_kumar,
    "theta3": suite_theta3,
    "factor3": suite_factor3,
    "baselocus4": lambda cfg: _suite_baselocus(cfg, 4),
    "baselocus5": lambda cfg: _suite_baselocus(cfg, 5),
    "baselocus6": lambda cfg: _suite_baselocus(cfg, 6),
    "stretch-weddle": suite_stretch_weddle,
}

CURVE_SUITES = {
    "rr",
    "embed",
    "gamma",
    "hn",
    "theta3",
    "factor3",
    "baselocus4",
    "baselocus5",
    "baselocus6",
}


def default_suites(genus: int) -> list:
    suites = ["rr", "embed", "gamma"]
    if genus == 3:
        suites += ["hn", "kumar", "theta3", "factor3"]
    if genus in (4, 5, 6):
        suites.append(f"baselocus{genus}")
    return suites


def run(cfg: SuiteConfig):
    """Run the configured suites; returns (exit status, certificate dict)."""
    cfg.validate()
    suites = list(cfg.suites) or default_suites(cfg.genus)
    for name in suites:
        if name not in SUITES:
            raise ConfigError(f"unknown suite {name!r}")
        if name in CURVE_SUITES and cfg.field != "fp":
            raise ConfigError(f"suite {name!r} needs the prime-field backend")
    results = []
    for name in suites:
        results.extend(SUITES[name](cfg))
    statuses = {r.status for r in results}
    if FAIL in statuses:
        status, code = FAIL, 1
    elif INCONCLUSIVE in statuses:
        status, code = INCONCLUSIVE, 3
    else:
        status, code = PASS, 0
    certificate = {
        "schema": CERT_SCHEMA,
        "config": {
            "genus": cfg.genus,
            "field": cfg.field,
            "prime": cfg.prime,
            "seed": cfg.seed,
            "margin": cfg.margin,
            "suites": suites,
        },
        "results": [r.to_jsonable() for r in results],
        "status": status,
    }
    return code, certificate


# ---------------------------------------------------------------------------
# argument parsing and subcommands


def _add_common(p):
    p.add_argument("--genus", type=int, default=3)
    p.add_argument("--field", choices=("fp", "q"), default="fp")
    p.add_argument("--prime", type=int, default=DEFAULT_PRIME)
    p.add_argument("--seed", type=int, default=1)
    p.add_argument("--margin", type=int, default=10)
    p.add_argument("--out", default="")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="thetamap",
        description="Exact verification suites for the projective geometry of "
        "hyperelliptic theta maps.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_gen = sub.add_parser("gen", help="generate a (curve, D, N) instance as JSON")
    _add_common(p_gen)

    p_embed = sub.add_parser("embed", help="embedding report for an instance")
    _add_common(p_embed)
    p_embed.add_argument("--infile", default="", help="instance JSON to reuse")

    p_verify = sub.add_parser("verify", help="run verification suites")
    _add_common(p_verify)
    p_verify.add_argument(
        "--suite",
        action="append",
        default=[],
        help="suite name (repeatable); default depends on genus",
    )

    p_report = sub.add_parser("report", help="summarise a certificate")
    p_report.add_argument("--infile", required=True)
    return parser


def _emit(payload: dict, out: str) -> None:
    text = json.dumps(payload, indent=2, sort_keys=True)
    if out:
        with open(out, "w") as fh:
            fh.write(text + "\n")
    else:
        print(text)


def _cmd_gen(args) -> int:
    cfg = SuiteConfig(args.genus, args.field, args.prime, args.seed, args.margin, (), args.out)
    cfg.validate()
    if cfg.field != "fp":
        raise ConfigError("instance generation needs the prime-field backend")
    inst = he.generate_instance(cfg.genus, cfg.seed, prime=cfg.prime)
    _emit(inst.to_jsonable(), args.out)
    return 0


def _cmd_embed(args) -> int:
    cfg = SuiteConfig(args.genus, args.field, args.prime, args.seed, args.margin, (), args.out)
    cfg.validate()
    if args.infile:
        with open(args.infile) as fh:
            inst = he.Instance.from_jsonable(json.load(fh))
        cfg = SuiteConfig(
            inst.genus, "fp", inst.provenance.get("prime", cfg.prime),
            inst.provenance.get("seed", cfg.seed), cfg.margin, (), args.out,
        )
    results = suite_embed(cfg)
    payload = {
        "schema": CERT_SCHEMA,
        "config": {"genus": cfg.genus, "prime": cfg.prime, "seed": cfg.seed},
        "results": [r.to_jsonable() for r in results],
        "status": FAIL if any(r.status == FAIL for r in results) else PASS,
    }
    _emit(payload, args.out)
    return 0 if payload["status"] == PASS else 1


def _cmd_verify(args) -> int:
    cfg = SuiteConfig(
        args.genus, args.field, args.prime, args.seed, args.margin,
        tuple(s for entry in args.suite for s in entry.split(",") if s), args.out,
    )
    code, certificate = run(cfg)
    _emit(certificate, args.out)
    return code


def _cmd_report(args) -> int:
    with open(args.infile) as fh:
        cert = json.load(fh)
    print(f"certificate: {cert.get('schema')}  status: {cert.get('status')}")
    config = cert.get("config", {})
    print(
        "config: genus={genus} field={field} prime={prime} seed={seed}".format(
            genus=config.get("genus"), field=config.get("field"),
            prime=config.get("prime"), seed=config.get("seed"),
        )
    )
    for r in cert.get("results", []):
        print(f"  [{r['status']:>12}] {r['name']}: {r['claim']}")
    return 0 if cert.get("status") == PASS else 1


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    handlers = {
        "gen": _cmd_gen,
        "embed": _cmd_embed,
        "verify": _cmd_verify,
        "report": _cmd_report,
    }
    try:
        return handlers[args.command](args)
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 2
    except (he.InstanceGenerationError, rnc_mod.GenericityError) as exc:
        print(f"inconclusive: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
