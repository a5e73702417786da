"""Command-line entry point: ``g2check <subcommand>``."""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction
from pathlib import Path
from typing import Sequence

from . import report
from .cdga import ConfigError

EXIT_OK, EXIT_FAIL, EXIT_CONFIG = 0, 1, 2


def _load_config(path: str | None) -> report.RunConfig:
    if path is None:
        return report.RunConfig()
    p = Path(path)
    try:
        text = p.read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {p}: {exc}") from exc
    return report.parse_run_config(text, p.parent)


def resolve_component(text: str) -> int:
    """A torus index 1..8 or its base coordinates ``x1,x2,x5,x6`` (fractions allowed)."""
    from .nilgroup import SIGMA, fixed_locus
    text = text.strip()
    if "," not in text:
        try:
            index = int(text)
        except ValueError as exc:
            raise ConfigError(f"bad component {text!r}") from exc
        if not 1 <= index <= 8:
            raise ConfigError("component must be in 1..8")
        return index
    try:
        base = tuple(Fraction(v.strip()) for v in text.split(","))
    except ValueError as exc:
        raise ConfigError(f"bad component coordinates {text!r}") from exc
    for i, c in enumerate(fixed_locus(SIGMA, "Mhat"), 1):
        if c.base == base:
            return i
    raise ConfigError(f"no fixed torus with base coordinates {text}")


def _cmd_verify(args) -> int:
    cfg = _load_config(args.config)
    if args.modes is not None:
        cfg.modes = args.modes
    if args.epsilon is not None:
        cfg.epsilon = args.epsilon
    only = [s for item in args.only or [] for s in item.split(",") if s]
    doc = report.verify_suite(cfg, only)
    if args.format == "json":
        print(json.dumps(doc, sort_keys=True, indent=1))
    else:
        print(report.render_markdown(doc), end="")
    return doc["exit_code"]


def _cmd_betti(args) -> int:
    from .lie import RHO_SIGNS, betti_numbers, diagonal_action
    from .ring import build_resolved_ring, lie_ring
    spec = _load_config(args.config).spec()
    actions = [diagonal_action(RHO_SIGNS)]
    bm, bh = betti_numbers(spec), betti_numbers(spec, actions)
    bt = build_resolved_ring(lie_ring(spec, actions, "Mhat")).betti
    print("; ".join(f"{name}: " + " ".join(map(str, b)) for name, b in (("M", bm), ("M̂", bh), ("M̃", bt))))
    return EXIT_OK


def _cmd_fixed_loci(args) -> int:
    from .nilgroup import RHO, SIGMA, fixed_locus, group_law_fixed_audit, rho, sigma
    action, f = (RHO, rho) if args.action == "rho" else (SIGMA, sigma)
    comps = fixed_locus(action, args.space)
    print(f"{len(comps)} components")
    names = ", ".join(f"x{i}" for i in comps[0].base_indices) if comps else ""
    for c, audit in zip(comps, group_law_fixed_audit(f, comps)):
        shear = "" if audit["straight_fixed"] else \
            f"  (group law: x6 = c - x1*x4, c in {{{', '.join(map(str, audit['sheared_offsets']))}}})"
        print(f"  ({names}) = ({', '.join(map(str, c.base))}){shear}")
    return EXIT_OK


def _cmd_obstruction(args) -> int:
    from .ring import build_resolved_ring, invariant_ring, obstruction_scan, torus_ring
    ring = build_resolved_ring(invariant_ring()) if args.ring == "resolved" else torus_ring()
    cert = obstruction_scan(ring)
    print(f"ring {cert.ring}: {cert.omega_vars} degree-2 and {cert.eta_vars} degree-1 variables, "
          f"{cert.monomials_checked} coefficients of eta*omega^3 checked, {len(cert.nonzero)} nonzero")
    for name, v in cert.nonzero[:args.show]:
        print(f"  {name}: {v}")
    # the resolved ring must give zero, the torus control must not
    expected = cert.all_zero if args.ring == "resolved" else not cert.all_zero
    return EXIT_OK if expected else EXIT_FAIL


def _cmd_formality(args) -> int:
    from .cdga import complete_model, default_targets, builtin_models, parse_config
    if args.config:
        try:
            text = Path(args.config).read_text()
        except OSError as exc:
            raise ConfigError(f"cannot read {args.config}: {exc}") from exc
        cfg = parse_config(text, default_targets())
        pairs = [(f, cfg["splits"].get(f.source.name, [])) for f in cfg["morphisms"].values()]
    else:
        m = builtin_models()
        pairs = [(m["rho"], m["W_split"]), (m["theta"], m["Z_split"])]
    ok = True
    for f, split in pairs:
        if args.complete:
            names = set(f.source.names)
            f, log = complete_model(f, args.s)
            split = list(split) + [g for g in f.source.names if g not in names]
            print(f"{f.name}: completed with {sum(r['added'] for r in log)} generators")
        rec = report._formality_pair(f, f.source, split, args.s)
        good = rec["morphism_ok"] and rec["quasi_iso_ok"] and rec["s_formality_ok"]
        ok &= good
        print(f"{f.name}: {f.source.name} -> {f.target.name}  {'pass' if good else 'fail'}")
        print(f"  morphism: {'ok' if rec['morphism_ok'] else 'offending ' + ', '.join(rec['offending'])}")
        for r in rec["degrees"]:
            line = f"  H^{r['degree']}: {r['source_dim']} -> {r['target_dim']}, rank {r['rank']}, " \
                   f"{r['required']} {'ok' if r['pass'] else 'FAILS'}"
            if r["kernel_dim"]:
                line += f"; kernel {r['kernel_dim']}, e.g. {r['kernel_sample'][0]}"
            print(line)
        print(f"  s-formality (s = {args.s}, {rec['s_formality_method']}): "
              f"{'ok' if rec['s_formality_ok'] else 'fails'}")
    return EXIT_OK if ok else EXIT_FAIL


def _cmd_d1_kernel(args) -> int:
    from .deform import associative_check, component_parametrization, fourier_kernel
    if args.modes < 0:
        raise ConfigError("--modes must be >= 0")
    index = resolve_component(args.component)
    param, info = component_parametrization(index)
    verdict = associative_check(param, ("y1", "y2", "y3"))
    res = fourier_kernel(args.modes)
    base = ", ".join(map(str, info["base"]))
    print(f"torus {index} at (x1, x2, x5, x6) = ({base}): "
          f"{'associative' if verdict.calibrated else 'not associative'}")
    print(f"modes |n_k| <= {res.N}: {res.modes_checked} checked, Pfaffian identity "
          f"{'holds' if res.pfaffian_ok else 'FAILS'}, conjugation {'consistent' if res.conjugation_ok else 'FAILS'}")
    print(f"kernel dimension: {res.total_dimension}")
    if args.dump:
        with open(args.dump, "w") as fh:
            for cert in res.certificates:
                fh.write(json.dumps(report.jsonable(cert.record()), sort_keys=True) + "\n")
    ok = verdict.calibrated and res.pfaffian_ok and res.conjugation_ok and res.total_dimension == 3
    return EXIT_OK if ok else EXIT_FAIL


def _cmd_eh(args) -> int:
    from .local_model import eh_grid_sweep
    if args.epsilon <= 0 or args.t_samples < 1 or args.r_samples < 1:
        raise ConfigError("epsilon must be positive and sample counts at least 1")
    rep = eh_grid_sweep(args.epsilon, args.t_samples, args.r_samples, args.t_max)
    t, r = rep["min_location"]
    print(f"grid {args.t_samples} x {args.r_samples}, epsilon = {args.epsilon}")
    print(f"minimal margin {rep['min_margin']:.6g} at t = {t:.6g}, r = {r:.6g}")
    print(f"best t = {rep['best_t']:.6g} with margin {rep['best_t_margin']:.6g}; "
          f"{len(rep['t_with_positive_margin'])} sampled t with positive margin")
    print(f"h(t, r) finite on the grid: {rep['h_finite']}")
    return EXIT_OK if rep["exists_positive"] and rep["h_finite"] else EXIT_FAIL


def _cmd_fibration(args) -> int:
    from .deform import coassociative_fibration_check
    rep = coassociative_fibration_check()
    print(f"phi on span(d4, d5, d6, d7): {'0' if rep['phi_on_fiber_zero'] else 'nonzero'}")
    print(f"theta / vol on the fiber: {rep['theta_over_volume']}")
    print("invariance: " + ", ".join(f"{k} {'ok' if v else 'fails'}" for k, v in rep["invariance"].items()))
    print("singular base: " + ", ".join(f"({a}, {b})" for a, b in rep["singular_base"]))
    print(f"lattice compatible: {rep['lattice_compatible']}")
    return EXIT_OK if rep["ok"] else EXIT_FAIL


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="g2check", description="Exact verification of a G2-calibrated nilmanifold "
                                                            "quotient and its resolution.")
    sub = p.add_subparsers(dest="command", required=True)

    v = sub.add_parser("verify", help="run the check suite and print a report")
    v.add_argument("--config", help="run configuration file")
    v.add_argument("--only", action="append", help="check ids, subcommand names or module names (comma separated)")
    v.add_argument("--modes", type=int, help="Fourier truncation N")
    v.add_argument("--epsilon", type=float, help="neighbourhood radius")
    v.add_argument("--format", choices=("json", "markdown"), default="json")
    v.set_defaults(func=_cmd_verify)

    b = sub.add_parser("betti", help="Betti numbers of M, its quotient and the resolution")
    b.add_argument("--config", help="run configuration file (structure equations)")
    b.set_defaults(func=_cmd_betti)

    f = sub.add_parser("fixed-loci", help="fixed components of rho or sigma")
    f.add_argument("--action", choices=("rho", "sigma"), default="rho")
    f.add_argument("--space", choices=("M", "Mhat"), default="M")
    f.set_defaults(func=_cmd_fixed_loci)

    o = sub.add_parser("obstruction-scan", help="coefficients of eta*omega^3 on a cohomology ring")
    o.add_argument("--ring", choices=("resolved", "torus"), default="resolved")
    o.add_argument("--show", type=int, default=5, help="nonzero coefficients to print")
    o.set_defaults(func=_cmd_obstruction)

    m = sub.add_parser("formality", help="morphism, quasi-isomorphism range and s-formality")
    m.add_argument("--config", help="CDGA model file; defaults to the built-in W and Z models")
    m.add_argument("--s", type=int, default=3)
    m.add_argument("--complete", action="store_true", help="add generators killing the H^{s+1} kernel first")
    m.set_defaults(func=_cmd_formality)

    d = sub.add_parser("d1-kernel", help="Fourier kernel of the deformation operator")
    d.add_argument("--modes", type=int, default=10)
    d.add_argument("--component", default="1", help="torus index 1..8 or base coordinates x1,x2,x5,x6")
    d.add_argument("--dump", help="write per-mode certificates as JSON lines")
    d.set_defaults(func=_cmd_d1_kernel)

    e = sub.add_parser("eh-sample", help="Eguchi-Hanson gluing margin on a (t, r) grid")
    e.add_argument("--epsilon", type=float, default=0.2)
    e.add_argument("--t-samples", type=int, default=64)
    e.add_argument("--r-samples", type=int, default=64)
    e.add_argument("--t-max", type=float, default=1.0)
    e.set_defaults(func=_cmd_eh)

    c = sub.add_parser("fibration", help="coassociative fibration over the (x1, x2) torus")
    c.set_defaults(func=_cmd_fibration)
    return p


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"g2check: configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
