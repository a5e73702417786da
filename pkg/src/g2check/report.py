"""Check registry, run configuration and the verification report document."""

from __future__ import annotations

import random
import re
import time
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Callable, Iterable, Sequence

from . import __version__, linalg
from .cdga import (ConfigError, complete_model, default_targets, builtin_models, parse_config, quasi_iso_range,
                   s_formality_check, verify_morphism)
from .exterior import ExteriorForm, d_poly, format_form, monomial, parse_form
from .g2 import PHI, PHI0, THETA, evaluate, hodge_star, is_g2_form, torsion_flags, unit
from .lie import (STRUCTURE_EQUATIONS, RHO_SIGNS, LieAlgebraSpec, betti_numbers, ce_cohomology, diagonal_action,
                  invariant_cohomology, parse_structure)
from .scalars import PolyElement

__all__ = [
    "SCHEMA_VERSION",
    "PASS",
    "FAIL",
    "FLAGGED",
    "RunConfig",
    "parse_run_config",
    "Check",
    "build_checks",
    "ALIASES",
    "select",
    "verify_suite",
    "render_markdown",
    "jsonable",
]

SCHEMA_VERSION = 1
PASS, FAIL, FLAGGED = "pass", "fail", "flagged-assumption"


# configuration

@dataclass
class RunConfig:
    structure: str = STRUCTURE_EQUATIONS
    epsilon: float = 0.2
    t_samples: int = 64
    r_samples: int = 64
    t_max: float = 1.0
    modes: int = 10
    component: int = 1
    formality: str | None = None

    def spec(self) -> LieAlgebraSpec:
        try:
            return parse_structure(self.structure, "g")
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc

    def as_dict(self) -> dict:
        return {"structure": self.structure.strip().splitlines(), "epsilon": self.epsilon,
                "t_samples": self.t_samples, "r_samples": self.r_samples, "t_max": self.t_max,
                "modes": self.modes, "component": self.component, "formality": self.formality is not None}


_PARAMS = {"epsilon": float, "t_samples": int, "r_samples": int, "t_max": float, "modes": int,
           "component": int, "formality": str}
_SECTION = re.compile(r"^\[(\w+)\]$")


def parse_run_config(text: str, base_dir: str | Path | None = None) -> RunConfig:
    """Sections ``[structure]`` (lines ``de^i = <2-form>``) and ``[parameters]``
    (``key = value``); ``formality = <path>`` names a model file read relative to ``base_dir``."""
    cfg = RunConfig()
    section = None
    structure: list[str] = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        mt = _SECTION.match(line)
        if mt:
            section = mt.group(1)
            if section not in ("structure", "parameters"):
                raise ConfigError(f"line {lineno}: unknown section [{section}]")
            continue
        if section == "structure":
            structure.append(line)
        elif section == "parameters":
            key, sep, value = (s.strip() for s in line.partition("="))
            if not sep or key not in _PARAMS:
                raise ConfigError(f"line {lineno}: unknown parameter {key!r}")
            try:
                setattr(cfg, key, _PARAMS[key](value))
            except ValueError as exc:
                raise ConfigError(f"line {lineno}: bad value for {key}: {value!r}") from exc
        else:
            raise ConfigError(f"line {lineno}: content outside a section")
    if structure:
        cfg.structure = "\n".join(structure) + "\n"
        cfg.spec()
    if cfg.formality is not None:
        path = Path(base_dir or ".") / cfg.formality
        try:
            cfg.formality = path.read_text()
        except OSError as exc:
            raise ConfigError(f"cannot read formality model {path}: {exc}") from exc
    if cfg.modes < 0 or cfg.t_samples < 1 or cfg.r_samples < 1 or cfg.epsilon <= 0:
        raise ConfigError("modes must be >= 0, sample counts >= 1 and epsilon > 0")
    if not 1 <= cfg.component <= 8:
        raise ConfigError("component must be in 1..8")
    return cfg


# shared context

class Context:
    """Run configuration plus a cache of expensive shared objects."""

    def __init__(self, config: RunConfig):
        self.config = config
        self._cache: dict = {}

    def get(self, key: str, build: Callable[[], object]):
        if key not in self._cache:
            self._cache[key] = build()
        return self._cache[key]

    @property
    def spec(self) -> LieAlgebraSpec:
        return self.get("spec", self.config.spec)

    @property
    def actions(self) -> list:
        return [diagonal_action(RHO_SIGNS)]

    def base_ring(self):
        from .ring import lie_ring
        return self.get("base_ring", lambda: lie_ring(self.spec, self.actions, "Mhat"))

    def resolved_ring(self):
        from .ring import build_resolved_ring
        return self.get("resolved_ring", lambda: build_resolved_ring(self.base_ring()))

    def models(self):
        return self.get("models", builtin_models)

    def connection(self):
        from .deform import levi_civita
        return self.get("connection", lambda: levi_civita(self.spec))

    def d1(self):
        from .deform import assemble_D1
        return self.get("d1", lambda: assemble_D1(self.connection()))


@dataclass(frozen=True)
class Check:
    id: str
    module: str
    anchor: str
    deps: tuple[str, ...]
    run: Callable[[Context], tuple[str, str, dict]]


# exterior-core

def _exterior_self_test(ctx: Context):
    from .local_model import coframe_unprimed
    dd = all(d_poly(d_poly(e)).is_zero() for e in coframe_unprimed())
    e = [monomial(7, [i]) for i in range(1, 8)]
    anti = all(e[i] * e[j] == -(e[j] * e[i]) for i in range(7) for j in range(7))
    ev = evaluate(PHI0, [unit(7, 1), unit(7, 2), unit(7, 7)]) == 1
    ok = dd and anti and ev
    return (PASS if ok else FAIL, "d^2 = 0 on the coordinate coframe; wedge and evaluation consistent",
            {"d_squared_zero": dd, "wedge_antisymmetric": anti, "phi0_e1_e2_e7": ev})


# lie-nilmanifold

_H2_LISTED = ["e^{16}", "e^{17}", "e^{23}", "e^{24}", "e^{25} + e^{34}", "e^{35}", "e^{27} - e^{45} - e^{36}"]
_H3_LISTED = ["e^{136}", "e^{146}", "e^{147}", "e^{157}", "e^{167}", "e^{234}", "e^{235}", "e^{236} + e^{245}",
              "e^{237} + e^{345}", "e^{246}", "e^{357}", "e^{247} + e^{256} + e^{346}",
              "e^{257} + e^{347} + e^{356}"]
_H_INV_LISTED = {1: ["e^{3}"], 2: ["e^{16}", "e^{25} + e^{34}"]}


def _jacobi(ctx: Context):
    defects = ctx.spec.jacobi_defects()
    return (PASS if not defects else FAIL, f"d^2 e^i = 0 fails for i in {defects}" if defects else "d^2 = 0",
            {"defects": defects})


def _listed_span(H, spec: LieAlgebraSpec, texts: Sequence[str]) -> bool:
    forms = [parse_form(t, 7) for t in texts]
    if not all(spec.d(f).is_zero() for f in forms) or len(forms) != H.dim:
        return False
    return linalg.rank([H.class_of(f) for f in forms], H.dim) == H.dim


def _betti_M(ctx: Context):
    spec = ctx.spec
    betti = betti_numbers(spec)
    spans = {2: _listed_span(ce_cohomology(spec, 2), spec, _H2_LISTED),
             3: _listed_span(ce_cohomology(spec, 3), spec, _H3_LISTED)}
    ok = betti[1:4] == [3, 7, 13] and all(spans.values())
    return PASS if ok else FAIL, "M: " + " ".join(map(str, betti)), {"betti": betti, "listed_span": spans}


def _betti_Mhat(ctx: Context):
    spec = ctx.spec
    betti = betti_numbers(spec, ctx.actions)
    spans = {k: _listed_span(invariant_cohomology(spec, k, ctx.actions), spec, texts)
             for k, texts in _H_INV_LISTED.items()}
    ok = betti[1:4] == [1, 2, 8] and all(spans.values())
    return PASS if ok else FAIL, "Mhat: " + " ".join(map(str, betti)), {"betti": betti, "span_equal": spans}


def _group_suite(ctx: Context):
    from .nilgroup import (RHO, commutator_check, conjugate_by_j, in_lattice, is_automorphism,
                           mapping_torus_check, multiply, rho, sigma_equivariance, verify_lattice_stability)
    rng = random.Random(20240601)

    def point():
        return tuple(Fraction(rng.randint(-9, 9), rng.randint(1, 5)) for _ in range(7))
    pairs = all(rho(multiply(a, b)) == multiply(rho(a), rho(b)) for a, b in ((point(), point()) for _ in range(100)))
    conj = all(conjugate_by_j(a) == rho(a) for a in (point() for _ in range(50)))
    lattice = verify_lattice_stability(RHO)
    elems = [(2 * rng.randint(-3, 3),) + tuple(rng.randint(-3, 3) for _ in range(6)) for _ in range(20)]
    equiv = all(in_lattice(A) and sigma_equivariance(A) for A in elems)
    mt = mapping_torus_check()
    comm = commutator_check()["ok"]
    w = {"rho_symbolic_automorphism": is_automorphism(RHO), "rho_random_pairs": pairs, "rho_conjugation_by_j": conj,
         "rho_lattice_stable": lattice, "sigma_equivariance_20": equiv, "E_identity": mt["E_matches"],
         "mapping_torus": mt["ok"], "commutators": comm}
    ok = all(w.values())
    return PASS if ok else FAIL, "rho automorphism, lattice and equivariance identities", w


def _fixed_loci(ctx: Context):
    from .nilgroup import RHO, SIGMA, fixed_locus, group_law_fixed_audit, sigma
    half, q = Fraction(1, 2), Fraction(1, 4)
    A = {(a1, a2, a5, a6) for a1 in (0, 1) for a2 in (0, half) for a5 in (0, half) for a6 in (0, half)}
    B = {(b1, b2, b5, b6) for b1 in (0, 1) for b2 in (0, half) for b5 in (0, half) for b6 in (q, 3 * q)}
    fr, fs, fh = fixed_locus(RHO), fixed_locus(SIGMA), fixed_locus(SIGMA, "Mhat")
    sets = {c.base for c in fr} == A and {c.base for c in fs} == B
    counts = [len(fr), len(fs), len(fh)]
    audit = group_law_fixed_audit(sigma, fh)
    ok = counts == [16, 16, 8] and sets and A.isdisjoint(B)
    return (PASS if ok else FAIL, f"{counts[0]} components (rho), {counts[1]} (sigma), {counts[2]} (sigma on Mhat)",
            {"counts": counts, "sets_match": sets, "disjoint": A.isdisjoint(B),
             "sheared_on_Mhat": sum(1 for a in audit if not a["straight_fixed"])})


# g2-linear

def _positivity(ctx: Context):
    out = {}
    for name, phi in (("phi0", PHI0), ("phi", PHI)):
        st = is_g2_form(phi)
        out[name] = {"status": st.status, "identity_metric": st.metric == tuple(map(tuple, linalg.identity(7)))}
    ok = all(v["status"] == "G2-positive" and v["identity_metric"] for v in out.values())
    return PASS if ok else FAIL, "phi0 and phi are G2-positive with the identity metric", out


def _torsion(ctx: Context):
    flags = torsion_flags(PHI, ctx.spec)
    star = hodge_star(PHI) == THETA
    ok = flags["closed"] and not flags["coclosed"] and star
    summary = "d phi = 0, d*phi != 0, *phi = theta" if ok else \
        f"closed: {flags['closed']}, coclosed: {flags['coclosed']}, *phi = theta: {star}"
    return (PASS if ok else FAIL, summary,
            {"dphi": format_form(flags["dphi"]), "dstarphi": format_form(flags["dstarphi"]), "star_is_theta": star})


# local-model-resolution

def _coordinates(ctx: Context):
    from .local_model import coordinate_change_check
    rep = coordinate_change_check()
    w = {k: v for k, v in rep.items() if k != "coframe_on_section"}
    w["coframe_on_section"] = all(rep["coframe_on_section"])
    return PASS if rep["ok"] else FAIL, "primed coordinates: psi - phi vanishes on the zero section", w


def _blowup(ctx: Context):
    from .local_model import blowup_chart_check
    rep = blowup_chart_check()
    return PASS if rep["ok"] else FAIL, f"chart pullbacks {rep['chart1']}, {rep['chart2']}", rep


def _eh(ctx: Context):
    from .local_model import eh_grid_sweep
    c = ctx.config
    rep = eh_grid_sweep(c.epsilon, c.t_samples, c.r_samples, c.t_max)
    ok = rep["exists_positive"] and rep["h_finite"]
    w = {k: rep[k] for k in ("best_t", "best_t_margin", "t_with_positive_margin", "min_margin", "h_finite")}
    w["grid"] = [c.t_samples, c.r_samples]
    return (PASS if ok else FAIL,
            f"positive margin {rep['best_t_margin']:.6g} at t = {rep['best_t']:.6g} on a {c.t_samples}x{c.r_samples} grid", w)


def _disjoint(ctx: Context):
    from .local_model import neighbourhood_disjointness
    eps = Fraction(str(ctx.config.epsilon))
    ok = neighbourhood_disjointness(eps)
    return PASS if ok else FAIL, f"radius {eps} boxes around the 16 components are disjoint", {"epsilon": eps,
                                                                                             "disjoint": ok}


# resolution-cohomology

def _ring_betti(ctx: Context):
    from .ring import poincare_check
    t = time.perf_counter()
    R = ctx.resolved_ring()
    build = time.perf_counter() - t
    pc = poincare_check(R)
    ok = R.betti == [1, 1, 18, 56, 56, 18, 1, 1] and pc["ok"] and build < 5.0
    return PASS if ok else FAIL, "Mtilde: " + " ".join(map(str, R.betti)), {"betti": R.betti,
                                                                          "poincare_ranks": pc["ranks"]}


def _golden(ctx: Context):
    R = ctx.resolved_ring()
    e = lambda s: monomial(7, s)
    a1, a2, lam = R.from_form(e("16")), R.from_form(e("25") + e("34")), R.from_form(e("1256"))
    w = {"a1^2 = 0": (a1 * a1).is_zero(), "a2^2 = 2[e2345]": a2 * a2 == R.from_form(e("2345")).scale(2),
         "a1 a2 = 2[e1256]": a1 * a2 == lam.scale(2)}
    for j in range(1, 17):
        Ej = R.by_label(2, f"1*E{j}")
        w[f"E{j}^2 = -2[e1256]"] = Ej * Ej == lam.scale(-2)
    ok = all(w.values())
    return PASS if ok else FAIL, "cup-product values on the resolved ring", w


def _scan(ctx: Context):
    from .ring import obstruction_scan, torus_ring
    cert = obstruction_scan(ctx.resolved_ring())
    ctrl = obstruction_scan(ctx.get("torus_ring", torus_ring))
    ok = cert.all_zero and not ctrl.all_zero
    return (PASS if ok else FAIL, f"{cert.monomials_checked} coefficients of eta*omega^3 vanish; "
            f"control ring has {len(ctrl.nonzero)} nonzero",
            {"monomials_checked": cert.monomials_checked, "nonzero": list(cert.nonzero),
             "control_nonzero": len(ctrl.nonzero), "control_sample": list(ctrl.nonzero[:3])})


def _restriction(ctx: Context):
    from .ring import TANGENT, restriction_map
    H = ctx.base_ring().meta["cohomology"]
    uniform = all(restriction_map(r, j) == restriction_map(r, 1)
                  for k in range(1, 4) for r in H[k].representatives for j in range(2, 17))
    return (FLAGGED if uniform else FAIL,
            "restriction to every singular component taken as the same map onto H*(T^3) in x3, x4, x7",
            {"uniform": uniform, "tangent": list(TANGENT)})


# formality

def _formality_pair(f, A, split, s: int = 3) -> dict:
    m = verify_morphism(f)
    q = quasi_iso_range(f, s)
    sf = s_formality_check(A, split, s, f)
    rows = [{k: r[k] for k in ("degree", "source_dim", "target_dim", "rank", "required", "pass", "kernel_dim",
                               "kernel_sample")} for r in q["degrees"]]
    return {"morphism_ok": m["ok"], "offending": m["offending"], "quasi_iso_ok": q["ok"], "degrees": rows,
            "s_formality_ok": sf["ok"], "s_formality_method": sf["method"]}


def _formality_rho(ctx: Context):
    m = ctx.models()
    w = _formality_pair(m["rho"], m["W"], m["W_split"])
    ok = w["morphism_ok"] and w["quasi_iso_ok"] and w["s_formality_ok"]
    bad = [r for r in w["degrees"] if not r["pass"]]
    summary = "rho: morphism, iso through H^3, mono on H^4" if ok else \
        f"rho: H^{bad[0]['degree']} kernel of dimension {bad[0]['kernel_dim']}, e.g. {bad[0]['kernel_sample'][:1]}"
    return PASS if ok else FAIL, summary, w


def _formality_theta(ctx: Context):
    m = ctx.models()
    w = _formality_pair(m["theta"], m["Z"], m["Z_split"])
    ok = w["morphism_ok"] and w["quasi_iso_ok"] and w["s_formality_ok"]
    bad = [r for r in w["degrees"] if not r["pass"]]
    summary = "theta: morphism, iso through H^3, mono on H^4" if ok else \
        f"theta: H^{bad[0]['degree']} kernel of dimension {bad[0]['kernel_dim']} (source {bad[0]['source_dim']})"
    return PASS if ok else FAIL, summary, w


def _formality_completed(ctx: Context):
    m = ctx.models()
    out, ok = {}, True
    for key, A, split in (("rho", "W", "W_split"), ("theta", "Z", "Z_split")):
        f, log = complete_model(m[key], 3)
        extra = [g for g in f.source.names if g not in m[A].names]
        sf = s_formality_check(f.source, m[split] + extra, 3, f)
        good = verify_morphism(f)["ok"] and quasi_iso_range(f, 3)["ok"] and sf["ok"]
        ok &= good
        out[key] = {"added": sum(r["added"] for r in log), "ok": good}
    return (PASS if ok else FAIL,
            f"completed models pass s = 3 after adding {out['rho']['added']} and {out['theta']['added']} generators",
            out)


def _formality_config(ctx: Context):
    cfg = parse_config(ctx.config.formality, default_targets())
    out, ok = {}, True
    for name, f in cfg["morphisms"].items():
        split = cfg["splits"].get(f.source.name, [])
        w = _formality_pair(f, f.source, split)
        good = w["morphism_ok"] and w["quasi_iso_ok"] and w["s_formality_ok"]
        ok &= good
        out[name] = w
    return PASS if ok else FAIL, f"{len(out)} configured morphisms checked", out


# calibration-deform

def _frame(ctx: Context):
    from .deform import frame_duality_check
    rep = frame_duality_check(ctx.spec)
    summary = "coframe and frame are dual; frame brackets match structure constants" if rep["ok"] else \
        f"dual: {rep['dual']}, brackets match: {rep['brackets_match_structure_constants']}"
    return (PASS if rep["ok"] else FAIL, summary,
            {"dual": rep["dual"], "brackets": rep["brackets_match_structure_constants"]})


def _connection(ctx: Context):
    from .deform import table_comparison
    conn = ctx.connection()
    defects = conn.defects()
    rep = table_comparison(conn)
    chosen = rep["conventions"][rep["chosen_convention"]]
    ok = not defects["metric"] and not defects["torsion"] and rep["all_match"]
    summary = f"{chosen['matches']} of {rep['total']} reference entries reproduced"
    return PASS if ok else FAIL, summary, {"metric_defects": defects["metric"], "torsion_defects": defects["torsion"],
                                          "convention": rep["chosen_convention"], "matches": chosen["matches"],
                                          "mismatches": chosen["mismatches"]}


def _koszul_convention(ctx: Context):
    from .deform import table_comparison
    rep = table_comparison(ctx.connection())
    op = ctx.d1()
    w = {name: c["matches"] for name, c in rep["conventions"].items()}
    w.update({"chosen": rep["chosen_convention"], "torsion_term_order": op.pairing, "sign_flag": op.sign_flag})
    return (FLAGGED, f"bracket convention '{rep['chosen_convention']}', torsion term read as (nabla_v *phi)(omega_Y, e_i)",
            w)


def _d1_assembly(ctx: Context):
    op = ctx.d1()
    ok = not op.mismatches and op.normal_valued
    summary = f"assembled D1 equals the displayed operator (sign flag {op.sign_flag:+d})" if ok else \
        f"assembled D1 differs from the displayed operator in {len(op.mismatches)} entries"
    return (PASS if ok else FAIL, summary,
            {"sign_flag": op.sign_flag, "pairing": op.pairing, "mismatches": op.mismatches,
             "zero_order": op.zero_order, "first_order": op.first_order})


def _d1_kernel(ctx: Context):
    from .deform import fourier_kernel
    res = fourier_kernel(ctx.config.modes, ctx.d1())
    ok = res.total_dimension == 3 and res.pfaffian_ok and res.conjugation_ok
    return (PASS if ok else FAIL, f"kernel dimension: {res.total_dimension} over {res.modes_checked} modes",
            {"N": res.N, "modes_checked": res.modes_checked, "kernel_modes": res.kernel_modes,
             "zero_mode_kernel": res.zero_mode_kernel, "pfaffian_ok": res.pfaffian_ok,
             "conjugation_ok": res.conjugation_ok, "note": res.note})


def _calibration(ctx: Context):
    from .deform import (associative_check, associative_family, component_parametrization,
                         special_lagrangian_check)
    from .exterior import PolyMap
    from .local_model import UNPRIMED
    from .scalars import poly_ring
    fam = associative_check(associative_family(), ("y1", "y2", "y3"))
    R = poly_ring(("y1", "y2", "y3"))
    y0 = associative_family().compose(PolyMap(("y1", "y2", "y3"), associative_family().source,
                                              [0, 0, 0, *R.gens], R))
    sl = special_lagrangian_check(y0, ("y1", "y2", "y3"))
    param, info = component_parametrization(ctx.config.component)
    comp = associative_check(param, ("y1", "y2", "y3"))
    S = poly_ring(("s", "t", "u"))
    s, t, u = S.gens
    plane = associative_check(PolyMap(("s", "t", "u"), UNPRIMED, [s, t, 0, u, 0, 0, 0], S), ("s", "t", "u"))
    ok = fam.calibrated and sl["ok"] and comp.calibrated and not plane.chi_zero
    return (PASS if ok else FAIL, f"phi restricted to Y(a,b,c) is {fam.restricted}; Y0 special Lagrangian",
            {"family": {"phi_value": fam.phi_value, "gram": fam.gram, "chi_zero": fam.chi_zero},
             "y0_special_lagrangian": sl, "component": {**info, "calibrated": comp.calibrated},
             "e1_e2_e4_associative": plane.chi_zero})


def _fibration(ctx: Context):
    from .deform import coassociative_fibration_check
    rep = coassociative_fibration_check()
    return (PASS if rep["ok"] else FAIL,
            f"phi vanishes on span(d4..d7); singular base {[(str(a), str(b)) for a, b in rep['singular_base']]}", rep)


# registry

def build_checks(config: RunConfig | None = None) -> list[Check]:
    c = [
        Check("exterior.self-test", "exterior-core", "exterior algebra identities", (), _exterior_self_test),
        Check("lie.jacobi", "lie-nilmanifold", "d^2 = 0 on the structure equations", (), _jacobi),
        Check("lie.betti-M", "lie-nilmanifold", "b1, b2, b3 of M = 3, 7, 13", ("lie.jacobi",), _betti_M),
        Check("lie.betti-Mhat", "lie-nilmanifold", "invariant b1, b2, b3 = 1, 2, 8", ("lie.jacobi",), _betti_Mhat),
        Check("nilgroup.group-suite", "lie-nilmanifold", "rho automorphism and lattice identities", (), _group_suite),
        Check("nilgroup.fixed-loci", "lie-nilmanifold", "fixed loci of rho and sigma", (), _fixed_loci),
        Check("g2.positivity", "g2-linear", "G2-positivity of phi0 and phi", (), _positivity),
        Check("g2.torsion", "g2-linear", "closed, not coclosed, *phi = theta", ("lie.jacobi", "g2.positivity"),
              _torsion),
        Check("local.coordinates", "local-model-resolution", "primed coordinates near the singular locus",
              ("g2.positivity",), _coordinates),
        Check("local.blowup", "local-model-resolution", "blow-up chart pullbacks", (), _blowup),
        Check("local.eh-sample", "local-model-resolution", "Eguchi-Hanson nondegeneracy sampling", (), _eh),
        Check("local.disjointness", "local-model-resolution", "disjoint tubular boxes", ("nilgroup.fixed-loci",),
              _disjoint),
        Check("ring.betti", "resolution-cohomology", "Betti vector of the resolution",
              ("lie.betti-Mhat", "nilgroup.fixed-loci"), _ring_betti),
        Check("ring.golden-products", "resolution-cohomology", "cup-product values", ("ring.betti",), _golden),
        Check("ring.restriction-uniformity", "resolution-cohomology", "restriction to the singular tori",
              ("lie.betti-Mhat",), _restriction),
        Check("ring.obstruction-scan", "resolution-cohomology", "torsion-free obstruction eta*omega^3",
              ("ring.betti",), _scan),
        Check("formality.rho", "formality", "W model of the orbifold", ("lie.betti-Mhat",), _formality_rho),
        Check("formality.theta", "formality", "Z model of the resolution", ("ring.betti",), _formality_theta),
        Check("formality.completed", "formality", "completed models", ("formality.rho", "formality.theta"),
              _formality_completed),
    ]
    if config is not None and config.formality is not None:
        c.append(Check("formality.config", "formality", "configured morphisms", ("ring.betti",), _formality_config))
    c += [
        Check("deform.frame-duality", "calibration-deform", "frame field dual to the coframe", ("lie.jacobi",),
              _frame),
        Check("deform.connection", "calibration-deform", "Levi-Civita connection check-point values",
              ("lie.jacobi",), _connection),
        Check("deform.koszul-convention", "calibration-deform", "bracket sign and torsion-term order",
              ("deform.connection",), _koszul_convention),
        Check("deform.d1-assembly", "calibration-deform", "deformation operator D1", ("deform.connection",
                                                                                      "g2.torsion"), _d1_assembly),
        Check("deform.d1-kernel", "calibration-deform", "kernel of D1 has dimension 3", ("deform.d1-assembly",),
              _d1_kernel),
        Check("deform.calibration", "calibration-deform", "associative and special Lagrangian tori",
              ("nilgroup.fixed-loci", "g2.positivity"), _calibration),
        Check("deform.fibration", "calibration-deform", "coassociative fibration", ("g2.positivity",
                                                                                   "nilgroup.group-suite"),
              _fibration),
    ]
    return c


ALIASES = {
    "betti": ("lie.betti-M", "lie.betti-Mhat", "ring.betti"),
    "fixed-loci": ("nilgroup.fixed-loci",),
    "obstruction-scan": ("ring.obstruction-scan",),
    "formality": ("formality.rho", "formality.theta"),
    "d1-kernel": ("deform.d1-kernel",),
    "eh-sample": ("local.eh-sample",),
    "fibration": ("deform.fibration",),
}


def select(checks: Sequence[Check], only: Iterable[str] | None) -> list[Check]:
    """Requested checks (ids, id prefixes, aliases or module names) plus their dependency closure, in registry order."""
    by_id = {c.id: c for c in checks}
    if not only:
        return list(checks)
    want: set[str] = set()
    for name in only:
        if name in by_id:
            want.add(name)
        elif name in ALIASES:
            want.update(ALIASES[name])
        elif any(c.module == name for c in checks):
            want.update(c.id for c in checks if c.module == name)
        elif any(c.id.startswith(name + ".") for c in checks):
            want.update(c.id for c in checks if c.id.startswith(name + "."))
        else:
            raise ConfigError(f"unknown check {name!r}")
    stack = list(want)
    while stack:
        for d in by_id[stack.pop()].deps:
            if d not in want:
                want.add(d)
                stack.append(d)
    return [c for c in checks if c.id in want]


def jsonable(x):
    """Exact values as strings, containers as lists and string-keyed dicts."""
    if isinstance(x, bool) or x is None or isinstance(x, (int, str)):
        return x
    if isinstance(x, float):
        return x
    if isinstance(x, Fraction):
        return str(x)
    if isinstance(x, ExteriorForm):
        return format_form(x)
    if isinstance(x, PolyElement):
        return str(x.as_expr())
    if isinstance(x, dict):
        return {(k if isinstance(k, str) else ",".join(map(str, k)) if isinstance(k, tuple) else str(k)):
                jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [jsonable(v) for v in x]
    if isinstance(x, (set, frozenset)):
        return sorted(jsonable(v) for v in x)
    if hasattr(x, "item"):
        return x.item()
    return str(x)


def verify_suite(config: RunConfig | None = None, only: Iterable[str] | None = None,
                 timings: bool = True) -> dict:
    """Run the selected checks in dependency order and assemble the report document."""
    config = config or RunConfig()
    checks = select(build_checks(config), only)
    ctx = Context(config)
    records = []
    status_of: dict[str, str] = {}
    for c in checks:
        t = time.perf_counter()
        try:
            status, summary, witness = c.run(ctx)
        except ConfigError:
            raise
        except Exception as exc:  # a failing check is recorded, the run continues
            status, summary, witness = FAIL, f"error: {exc}", {"error": f"{type(exc).__name__}: {exc}"}
        failed_deps = [d for d in c.deps if status_of.get(d) == FAIL]
        status_of[c.id] = status
        rec = {"id": c.id, "module": c.module, "anchor": c.anchor, "status": status, "summary": summary,
               "depends_on": list(c.deps), "failed_dependencies": failed_deps, "witness": jsonable(witness)}
        if timings:
            rec["wall_time"] = round(time.perf_counter() - t, 3)
        records.append(rec)
    totals = {s: sum(1 for r in records if r["status"] == s) for s in (PASS, FAIL, FLAGGED)}
    return {"schema_version": SCHEMA_VERSION, "tool": "g2check", "version": __version__,
            "config": config.as_dict(), "checks": records, "totals": totals,
            "exit_code": 1 if totals[FAIL] else 0}


def render_markdown(doc: dict) -> str:
    """Human-readable summary rendered from the report document."""
    t = doc["totals"]
    lines = [f"# g2check report (schema {doc['schema_version']})", "",
             f"pass: {t[PASS]}  fail: {t[FAIL]}  flagged-assumption: {t[FLAGGED]}", "",
             "| check | status | summary |", "|---|---|---|"]
    for r in doc["checks"]:
        summary = r["summary"].replace("|", "\\|")
        lines.append(f"| {r['id']} | {r['status']} | {summary} |")
    return "\n".join(lines) + "\n"
