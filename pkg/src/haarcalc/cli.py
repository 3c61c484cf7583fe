"""Command line front end.

Every verb prints one JSON report to stdout (and to ``--report FILE`` when
given).  Exit status: 0 when every verdict passes, 1 when some verdict fails,
2 on usage or input errors, which go to stderr.

Randomized verbs draw from ``random.Random(seed)`` (Mersenne Twister MT19937)
and record the seed in the report.
"""

from __future__ import annotations

import argparse
import json
import random
import sys
from typing import Any, Sequence

from . import __version__, acceptance, haar, ktheory
from . import sequences as sq
from .errors import HaarcalcError
from .gg import FinitePGroup, gg_build, gg_loop, gg_pi0
from .lca import CompactOpenChoice, classify, is_vector_free, structure_decompose
from .morphisms import mod_of, validate_automorphism
from .parsing import parse_diagram, parse_expr, parse_morphism, parse_positive_real
from .randgen import random_automorphism, random_expr

PRNG = "MT19937 (Python random.Random)"


class UsageError(Exception):
    pass


def verdict(name: str, ok: bool) -> dict:
    return {"name": name, "pass": bool(ok)}


def _expr_arg(args, name: str = "expr"):
    text = getattr(args, name)
    if text is None:
        raise UsageError(f"--{name.replace('_', '-')} is required")
    return parse_expr(text)


def _choice_arg(expr, text: str | None) -> CompactOpenChoice:
    if text is None or text.strip() == "":
        return CompactOpenChoice.canonical(expr)
    values = [int(v) for v in text.split(",") if v.strip()]
    return CompactOpenChoice.from_free(expr, values)


def _real_flag(results: dict, *exprs) -> None:
    if any(not is_vector_free(e) for e in exprs):
        results["real_convention"] = sq.REAL_CONVENTION


# -- verbs -----------------------------------------------------------------


def cmd_parse(args) -> tuple[dict, dict, list]:
    e = _expr_arg(args)
    text = str(e)
    again = parse_expr(text)
    results = {"normalized": text, "atoms": [{"atom": str(a), "multiplicity": k} for a, k in e.terms]}
    return {"expr": args.expr}, results, [verdict("round_trip", again == e and str(again) == text)]


def cmd_classify(args):
    e = _expr_arg(args)
    dec = structure_decompose(e)
    results = {
        "expr": str(e),
        "classification": classify(e).to_json(),
        "decomposition": {
            "real_rank": dec.real_rank,
            "compact_open": str(dec.compact),
            "choice": dec.choice.to_json(),
            "discrete_quotient": str(dec.discrete),
        },
    }
    ok = classify(dec.compact).compact and classify(dec.discrete).discrete
    return {"expr": args.expr}, results, [verdict("decomposition_pieces", ok)]


def _morphism(args, e):
    if args.morphism is None:
        raise UsageError("--morphism is required")
    return parse_morphism(args.morphism, e)


def cmd_module(args):
    e = _expr_arg(args)
    f = _morphism(args, e)
    violation = validate_automorphism(f)
    inputs = {"expr": args.expr, "morphism": args.morphism}
    if violation is not None:
        return inputs, {"violation": violation.to_json()}, [verdict("automorphism", False)]
    m = mod_of(f)
    results = {"module": m.to_json(), "value": str(m), "rational": m.is_rational}
    _real_flag(results, e)
    checks = [verdict("automorphism", True)]
    if is_vector_free(e):
        checks.append(verdict("rational_on_vector_free", m.is_rational))
    return inputs, results, checks


def cmd_k1(args):
    e = _expr_arg(args)
    f = _morphism(args, e)
    k = ktheory.k1_class(f)
    tors = ktheory.k1_torsor_action(f)
    results = {"k1": k.to_json(), "scalar": str(k.as_scalar()), "module": mod_of(f).to_json()}
    return (
        {"expr": args.expr, "morphism": args.morphism},
        results,
        [verdict("basechange_matches_module", tors.scale == mod_of(f))],
    )


def cmd_k0(args):
    e = _expr_arg(args)
    return {"expr": args.expr}, {"k0": ktheory.k0_class(e).to_json()}, []


def _sequence_arg(args) -> sq.ExactSequence:
    kind = (args.kind or "").upper()
    if not kind:
        raise UsageError("--kind is required")
    try:
        sk = sq.SeqKind(kind)
    except ValueError:
        raise UsageError(f"unknown sequence kind {args.kind!r}; one of {[k.value for k in sq.SeqKind]}") from None

    def need(name):
        v = getattr(args, name)
        if v is None:
            raise UsageError(f"{kind} needs --{name}")
        return v

    if sk is sq.SeqKind.COMPACT_OPEN:
        e = _expr_arg(args)
        return sq.compact_open(e, _choice_arg(e, args.choice))
    if sk is sq.SeqKind.UNIFORMIZER:
        return sq.uniformizer(need("q"))
    if sk is sq.SeqKind.IDEAL_FILTRATION:
        return sq.ideal_filtration(need("q"), need("a"), need("b"))
    if sk is sq.SeqKind.MULT_UNIF_PRUFER:
        return sq.mult_unif_prufer(need("q"))
    if sk is sq.SeqKind.MULT_N_Z:
        return sq.mult_n_z(need("n"))
    if sk is sq.SeqKind.MULT_N_T:
        return sq.mult_n_t(need("n"))
    if sk is sq.SeqKind.LATTICE_REAL:
        return sq.lattice_real()
    if sk is sq.SeqKind.SUM_SPLIT:
        return sq.sum_split(_expr_arg(args), _expr_arg(args, "expr2"))
    e = _expr_arg(args)
    f = _morphism(args, e)
    return sq.iso_left(f) if sk is sq.SeqKind.ISO_LEFT else sq.iso_right(f)


def _sequence_inputs(args) -> dict:
    keys = ("kind", "expr", "expr2", "choice", "morphism", "q", "a", "b", "n")
    return {k: getattr(args, k) for k in keys if getattr(args, k, None) is not None}


def cmd_defect(args):
    seq = _sequence_arg(args)
    d = sq.defect(seq)
    spread = sq.defect_spread(seq)
    results = {"sequence": seq.to_json(), "defect": d.to_json(), "value": str(d)}
    return _sequence_inputs(args), results, [verdict("independent_of_adapted_choice", spread == {d})]


def cmd_split(args):
    seq = _sequence_arg(args)
    scale = parse_positive_real(args.scale) if args.scale else None
    mu = haar.HaarElement(seq.total, scale) if scale else haar.canonical_measure(seq.total)
    s = haar.split(seq, mu)
    back = haar.glue(seq, s.sub, s.quot)
    inputs = _sequence_inputs(args)
    inputs["scale"] = args.scale
    results = {"sequence": seq.to_json(), "measure": mu.to_json(), "split": s.to_json(), "glued": back.to_json()}
    return inputs, results, [verdict("glue_inverts_split", back == mu)]


def cmd_check_axioms(args):
    rng = random.Random(args.seed)
    which = args.axiom
    results: dict[str, Any] = {}
    checks = []
    if which in ("3", "all"):
        res = []
        for _ in range(args.count):
            X = random_expr(rng, vector_free=rng.random() < 0.7)
            res.extend(haar.check_axiom3(random_automorphism(rng, X, allow_symbols=True)))
        results["axiom3"] = [r.to_json() for r in res]
        checks.append(verdict("axiom3", all(r.passed for r in res)))
    if which in ("4", "all"):
        res = [haar.check_axiom4(f) for f in haar.catalog_filtrations(args.bound)]
        failing = [r.to_json() for r in res if not r.passed]
        results["axiom4"] = {"filtrations": len(res), "failing": failing}
        checks.append(verdict("axiom4", not failing))
    if which in ("5", "all"):
        res = []
        for _ in range(args.count):
            X1, X2 = random_expr(rng, max_terms=2), random_expr(rng, max_terms=2)
            res.append(haar.check_axiom5(X1, X2))
        results["axiom5"] = [r.to_json() for r in res]
        checks.append(verdict("axiom5", all(r.passed for r in res)))
    inputs = {"axiom": which, "seed": args.seed, "prng": PRNG, "count": args.count, "bound": args.bound}
    return inputs, results, checks


def cmd_holonomy(args):
    if args.file:
        with open(args.file, encoding="utf-8") as fh:
            raw = fh.read()
    elif args.diagram:
        raw = args.diagram
    else:
        raise UsageError("holonomy needs --file or --diagram")
    d, cycles = parse_diagram(raw)
    cycles = cycles if cycles is not None else haar.fundamental_cycles(d)
    rows = []
    for cyc in cycles:
        h = haar.holonomy(d, cyc)
        rows.append({"cycle": [list(s) for s in cyc], "holonomy": h.to_json(), "value": str(h), "rational": h.is_rational})
    results = {"vector_free": d.vector_free, "cycles": rows}
    _real_flag(results, *d.vertices)
    checks = []
    if d.vector_free:
        checks.append(verdict("rational_holonomy_on_vector_free", all(r["rational"] for r in rows)))
    return {"file": args.file, "diagram": args.diagram}, results, checks


def cmd_haq(args):
    e = _expr_arg(args)
    scale = parse_positive_real(args.scale or "1")
    mu = haar.HaarElement(e, scale)
    return {"expr": args.expr, "scale": args.scale}, {"measure": mu.to_json(), "member": haar.haq_membership(mu)}, []


def cmd_gg_pi0(args):
    report = gg_pi0(gg_build(args.prime, args.max_length))
    checks = [
        verdict("all_sequences_exact", report["invalid_sequences"] == 0),
        verdict("difference_constant_on_components", report["difference_constant"]),
        verdict("basepoint_joins_diagonal", all(report["basepoint_joins_diagonal"].values())),
    ]
    if args.loop:
        P = FinitePGroup(args.prime, tuple(int(x) for x in args.loop_group.split(",")))
        cert = gg_loop(P, json.loads(args.loop))
        report["loop"] = cert
        checks.append(verdict("loop_certificate", cert["valid"]))
    return {"prime": args.prime, "max_length": args.max_length}, report, checks


def cmd_selftest(args):
    crits = [f(args.seed) for f in acceptance.CRITERIA]
    results = {"criteria": [c.to_json() for c in crits]}
    checks = [verdict(f"criterion_{c.number}", c.passed) for c in crits]
    return {"seed": args.seed, "prng": PRNG}, results, checks


COMMANDS = {
    "parse": cmd_parse,
    "classify": cmd_classify,
    "module": cmd_module,
    "k1": cmd_k1,
    "k0": cmd_k0,
    "defect": cmd_defect,
    "split": cmd_split,
    "check-axioms": cmd_check_axioms,
    "holonomy": cmd_holonomy,
    "haq": cmd_haq,
    "gg-pi0": cmd_gg_pi0,
    "selftest": cmd_selftest,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=acceptance.DEFAULT_SEED, help="seed for randomized suites")
    common.add_argument("--report", metavar="FILE", help="also write the JSON report here")

    parser = argparse.ArgumentParser(prog="haarcalc", description="Exact Haar-measure bookkeeping on vector-free LCA groups.")
    parser.add_argument("--version", action="version", version=f"haarcalc {__version__}")
    sub = parser.add_subparsers(dest="verb", required=True)

    def add(name, help_text):
        return sub.add_parser(name, parents=[common], help=help_text)

    for name, text in (("parse", "normalize a group expression"), ("classify", "classification and structure decomposition"), ("k0", "K_0 class of a finite group")):
        add(name, text).add_argument("--expr", required=True)
    for name, text in (("module", "module of an automorphism"), ("k1", "K_1 class of an automorphism")):
        p = add(name, text)
        p.add_argument("--expr", required=True)
        p.add_argument("--morphism", required=True, help="mul(q), val(k), id or JSON blocks")
    for name, text in (("defect", "defect of a catalog sequence"), ("split", "split a measure along a catalog sequence")):
        p = add(name, text)
        p.add_argument("--kind", required=True, help="sequence kind, e.g. UNIFORMIZER")
        p.add_argument("--expr")
        p.add_argument("--expr2")
        p.add_argument("--choice", help="comma separated compact open parameters")
        p.add_argument("--morphism")
        for flag in ("q", "a", "b", "n"):
            p.add_argument(f"--{flag}", type=int)
        if name == "split":
            p.add_argument("--scale", help="scale of the measure on the total group, e.g. 3/2*c")
    p = add("check-axioms", "run the determinant functor axiom checks")
    p.add_argument("--axiom", choices=("3", "4", "5", "all"), default="all")
    p.add_argument("--count", type=int, default=50)
    p.add_argument("--bound", type=int, default=3)
    p = add("holonomy", "holonomies of a diagram")
    p.add_argument("--file")
    p.add_argument("--diagram", help="diagram JSON given inline")
    p = add("haq", "membership in the rational Haar measures")
    p.add_argument("--expr", required=True)
    p.add_argument("--scale", default="1")
    p = add("gg-pi0", "components of the Gillet-Grayson 1-skeleton")
    p.add_argument("--prime", type=int, required=True)
    p.add_argument("--max-length", type=int, required=True)
    p.add_argument("--loop", help="automorphism matrix (JSON) for a loop certificate")
    p.add_argument("--loop-group", default="1", help="partition of the loop group, e.g. 1,1")
    add("selftest", "run the acceptance suite")
    return parser


def run(argv: Sequence[str] | None = None) -> tuple[int, dict | None]:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return (0 if exc.code == 0 else 2), None
    try:
        inputs, results, checks = COMMANDS[args.verb](args)
    except (UsageError, HaarcalcError, ValueError, OSError, json.JSONDecodeError) as exc:
        print(f"haarcalc {args.verb}: {exc}", file=sys.stderr)
        return 2, None
    report = {
        "verb": args.verb,
        "inputs": inputs,
        "results": results,
        "verdicts": checks,
        "version": __version__,
    }
    text = json.dumps(report, sort_keys=True, indent=2) + "\n"
    sys.stdout.write(text)
    if args.report:
        with open(args.report, "w", encoding="utf-8") as fh:
            fh.write(text)
    return (0 if all(c["pass"] for c in checks) else 1), report


def main(argv: Sequence[str] | None = None) -> int:
    code, _ = run(argv)
    return code


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
