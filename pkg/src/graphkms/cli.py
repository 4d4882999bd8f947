"""Command line front end: analyze graph files, list states, sweep phases."""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from . import kms, oracle
from .graph import GraphParseError, parse_graph, seneta_order


class _Parser(argparse.ArgumentParser):
    # usage errors exit with code 1, not argparse's default 2
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _f12(x: float) -> float:
    """Round to 12 significant digits; the result round-trips through JSON."""
    return float(f"{x:.12g}")


def _load(path: str):
    with open(path, encoding="utf-8") as handle:
        return parse_graph(handle.read())


def _label_str(state: kms.StateMeasure) -> str:
    lab = state.label
    if isinstance(lab, kms.PsiC):
        return "psi{" + ",".join(lab.component.members) + "}"
    if isinstance(lab, kms.PhiBetaV):
        return f"phi[{lab.vertex}]"
    return f"mixture(r={lab.r:g})"


def _graph_json(G) -> dict:
    return {
        "vertices": list(G.vertices),
        "edges": [
            {"source": e.source, "range": e.range, "multiplicity": e.multiplicity}
            for e in G.edges
        ],
        "components": [
            {
                "id": c.id,
                "members": list(c.members),
                "trivial": c.trivial,
                "spectral_radius": _f12(c.spectral_radius),
                "period": c.period,
            }
            for c in G.components
        ],
        "seneta_order": [c.id for c in seneta_order(G)],
    }


def _criticals_json(G, criticals) -> list[dict]:
    return [
        {"beta": _f12(kms.beta_value(G, spec)), "component": spec.component}
        for spec in criticals
    ]


def _simplex_json(G, sx) -> dict:
    out = {
        "beta": _f12(sx.beta_value),
        "case": sx.case,
        "extremes": [
            {
                "label": _label_str(s),
                "m": {v: _f12(x) for v, x in s.m.items()},
                "factors_through_graph_algebra": s.factors_through_graph_algebra,
                "state_type": s.state_type,
            }
            for s in sx.extremes
        ],
    }
    if isinstance(sx.beta, kms.CriticalOf):
        out["beta_definition"] = f"ln rho(component {sx.beta.component})"
    return out


def _beta_from_args(G, args) -> kms.Numeric | kms.CriticalOf:
    if args.critical is not None:
        criticals = kms.critical_temperatures(G)
        if not 0 <= args.critical < len(criticals):
            raise ValueError(
                f"critical index {args.critical} out of range "
                f"({len(criticals)} critical temperatures)"
            )
        return criticals[args.critical]
    return kms.Numeric(args.beta)


def _beta_text(G, spec) -> str:
    val = kms.beta_value(G, spec)
    if isinstance(spec, kms.CriticalOf):
        members = ",".join(G.components[spec.component].members)
        return f"{val:.9g} (= ln rho({{{members}}}), component {spec.component})"
    return f"{val:.9g}"


def cmd_analyze(args) -> int:
    G = _load(args.file)
    criticals = kms.critical_temperatures(G)
    if args.json:
        payload = {
            "graph": _graph_json(G),
            "criticals": _criticals_json(G, criticals),
        }
        print(json.dumps(payload, indent=2))
        return 0
    n_edges = sum(e.multiplicity for e in G.edges)
    print(f"graph: {len(G.vertices)} vertices, {n_edges} edges")
    print("components (Seneta order):")
    print(f"  {'id':>3}  {'radius':>14}  {'period':>6}  members")
    for c in seneta_order(G):
        radius = f"{c.spectral_radius:.9g}" if not c.trivial else "-"
        period = str(c.period) if not c.trivial else "-"
        print(f"  {c.id:>3}  {radius:>14}  {period:>6}  {{{','.join(c.members)}}}")
    print("vertex divergence temperatures (beta_v):")
    for v in G.vertices:
        bv = kms.beta_v(G, v)
        print(f"  {v}: {'-inf' if bv is None else f'{bv:.9g}'}")
    if all(c.trivial for c in G.components):
        print("no cycles; no critical temperatures")
        return 0
    mc = sorted(kms.minimal_critical_components(G), key=lambda c: c.id)
    print(
        "minimal critical components: "
        + ", ".join("{" + ",".join(c.members) + "}" for c in mc)
    )
    print("critical temperatures:")
    for k, spec in enumerate(criticals):
        print(f"  [{k}] beta = {_beta_text(G, spec)}")
    return 0


def cmd_states(args) -> int:
    G = _load(args.file)
    spec = _beta_from_args(G, args)
    sx = kms.kms_simplex(G, spec)
    if args.json:
        payload = {
            "graph": _graph_json(G),
            "criticals": _criticals_json(G, kms.critical_temperatures(G)),
            "simplex": _simplex_json(G, sx),
        }
        print(json.dumps(payload, indent=2))
        return 0
    print(f"beta = {_beta_text(G, spec)}")
    print(f"case: {sx.case}")
    print(f"H_beta = {{{','.join(sorted(sx.H_beta.members, key=G.index.get))}}}")
    print(f"K_beta = {{{','.join(sorted(sx.K_beta.members, key=G.index.get))}}}")
    if not sx.extremes:
        print("no KMS states at this beta")
        if args.verify:
            print("all checks passed")
        return 0
    print(f"extreme states ({len(sx.extremes)}):")
    width = max(len(_label_str(s)) for s in sx.extremes)
    for s in sx.extremes:
        factors = "yes" if s.factors_through_graph_algebra else "no"
        mvals = "  ".join(f"m[{v}]={s.m[v]:.9g}" for v in G.vertices)
        print(
            f"  {_label_str(s):<{width}}  type={s.state_type:<8} "
            f"factors={factors:<3}  {mvals}"
        )
    if args.verify:
        failures = oracle.verify_simplex(G, sx)
        for failure in failures:
            print(f"FAIL {failure}")
        if failures:
            return 2
        print("all checks passed")
    return 0


def cmd_phase_diagram(args) -> int:
    G = _load(args.file)
    if not args.beta_min < args.beta_max:
        raise ValueError("beta-min must be strictly below beta-max")
    if args.steps < 1:
        raise ValueError("steps must be at least 1")
    rows: list[tuple[float, object]] = []
    criticals = [
        (kms.beta_value(G, spec), spec) for spec in kms.critical_temperatures(G)
    ]
    kept_criticals = [
        (val, spec) for val, spec in criticals if args.beta_min <= val <= args.beta_max
    ]
    for g in np.linspace(args.beta_min, args.beta_max, args.steps):
        g = float(g)
        if any(abs(g - val) <= 1e-12 for val, _ in kept_criticals):
            continue
        rows.append((g, kms.Numeric(g)))
    rows.extend(kept_criticals)
    rows.sort(key=lambda pair: pair[0])
    print("beta,case,dim_toeplitz,dim_graph_algebra")
    for val, spec in rows:
        sx = kms.kms_simplex(G, spec)
        dim_t = len(sx.extremes) - 1
        dim_g = sum(1 for s in sx.extremes if s.factors_through_graph_algebra) - 1
        print(f"{val:.12g},{sx.case},{dim_t},{dim_g}")
    return 0


def cmd_perron(args) -> int:
    coeffs = list(args.coeffs)
    for c in coeffs:
        if abs(c - round(c)) > 1e-12:
            raise ValueError("coefficients must be integers")
    roots = np.roots([round(c) for c in coeffs])
    dist = np.abs(roots - args.root)
    pick = int(np.argmin(dist))
    if dist[pick] > max(1e-2, 1e-2 * abs(args.root)):
        raise ValueError(f"no polynomial root near {args.root:g}")
    designated = float(roots[pick].real)
    verdict = kms.perron_check(coeffs, designated)
    listed = ", ".join(f"{r.real:.12g}{r.imag:+.12g}j" if abs(r.imag) > 1e-9
                       else f"{r.real:.12g}" for r in roots)
    print(f"roots: {listed}")
    print(f"designated root: {designated:.12g}")
    print(f"verdict: {'Perron' if verdict else 'NOT Perron'}")
    return 0


def cmd_verify(args) -> int:
    G = _load(args.file)
    spec = _beta_from_args(G, args)
    sx = kms.kms_simplex(G, spec)
    print(f"beta = {_beta_text(G, spec)}; case {sx.case}; "
          f"{len(sx.extremes)} extreme states")
    failures = oracle.verify_simplex(G, sx)
    for failure in failures:
        print(f"FAIL {failure}")
    if failures:
        return 2
    print("all checks passed")
    return 0


def build_parser() -> _Parser:
    parser = _Parser(prog="graphkms", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("analyze", help="components, radii, critical temperatures")
    p.add_argument("file")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("states", help="extreme KMS states at one beta")
    p.add_argument("file")
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("--beta", type=float)
    group.add_argument("--critical", type=int,
                       help="0-based index into the ascending critical list")
    p.add_argument("--json", action="store_true")
    p.add_argument("--verify", action="store_true",
                   help="run the oracle checks on the emitted states")
    p.set_defaults(func=cmd_states, critical=None)

    p = sub.add_parser("phase-diagram", help="CSV sweep of simplex dimensions")
    p.add_argument("file")
    p.add_argument("--beta-min", type=float, required=True)
    p.add_argument("--beta-max", type=float, required=True)
    p.add_argument("--steps", type=int, default=50)
    p.set_defaults(func=cmd_phase_diagram)

    p = sub.add_parser("perron", help="check a designated polynomial root")
    p.add_argument("coeffs", nargs="+", type=float,
                   help="monic integer coefficients, highest degree first")
    p.add_argument("--root", type=float, required=True)
    p.set_defaults(func=cmd_perron)

    p = sub.add_parser("verify", help="oracle checks on the states at one beta")
    p.add_argument("file")
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("--beta", type=float)
    group.add_argument("--critical", type=int)
    p.set_defaults(func=cmd_verify, critical=None)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except GraphParseError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (ValueError, OSError, ArithmeticError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def entry_point() -> None:
    raise SystemExit(main(sys.argv[1:]))
