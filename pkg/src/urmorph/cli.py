"""Command-line front end. Every subcommand reads a rule file and calls the library directly."""
from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction
from pathlib import Path

from . import oracle as oracle_mod
from .bounded import Finite, InfinitePower, build_graph_q
from .contraction import contract
from .corpus import run_corpus
from .decider import INCONCLUSIVE, NO, YES
from .growth import GrowthAnalysis, all_same_order, growth_bounds
from .pipeline import decide_system, reduce_system
from .primitive import HOracle, is_periodic_primitive
from .rauzy import build_scheme, detect_protocol, evolve, validate_scheme
from .rulefile import RuleFileError, dump_system, load
from .words import MorphismError, factors

EXIT = {YES: 0, NO: 1, INCONCLUSIVE: 2}


def _num(x):
    if isinstance(x, Fraction):
        return float(x) if x.denominator != 1 else x.numerator
    return x


def _emit(args, payload: dict, text: list[str]) -> None:
    if args.json:
        print(json.dumps(payload, indent=2, sort_keys=True, default=_num))
    else:
        print("\n".join(text))


def cmd_decide(args) -> int:
    sys_ = load(args.file).system
    d = decide_system(sys_, max_steps=args.max_steps)
    if args.trace:
        Path(args.trace).write_text("\n".join(d.trace) + "\n")
    ledger = d.verdict.ledger.values if d.verdict and d.verdict.ledger else {}
    payload = {"answer": d.answer, "stage": d.stage, "reason": d.reason,
               "uniformly_recurrent": d.recurrent, "constants": ledger}
    if d.verdict and d.verdict.witness:
        q, k = d.verdict.witness
        payload["witness"] = {"source": [ord(c) for c in q], "k": k, "verified": d.verdict.verified}
    text = [f"{d.answer}  ({d.stage}: {d.reason})"]
    if d.verdict and d.verdict.ledger:
        text += ["  " + line for line in d.verdict.ledger.lines()]
    _emit(args, payload, text)
    return EXIT[d.answer]


def cmd_bounded(args) -> int:
    r = reduce_system(load(args.file).system, with_core=False)
    A = r.W.A
    growing = [A.token(a) for a in sorted(r.cls.growing, key=ord)]
    bounded = [A.token(a) for a in sorted(r.cls.bounded, key=ord)]
    payload = {"growing": growing, "bounded": bounded}
    text = [f"growing: {' '.join(growing) or '-'}", f"bounded: {' '.join(bounded) or '-'}"]
    if isinstance(r.report, InfinitePower):
        U = A.render(r.report.U, " ")
        payload["infinite_power"] = U
        text.append(f"unbounded powers of: {U}")
    else:
        assert isinstance(r.report, Finite)
        words = sorted((A.render(w, " ") for w in r.report.words if w), key=lambda s: (len(s), s))
        payload["bounded_factors"] = words
        text.append(f"bounded factors ({len(words)} nonempty): {', '.join(words) or '-'}")
    if args.dot:
        if r.cls.bounded:
            Path(args.dot).write_text(build_graph_q(r.W.phi, r.cls, r.W.a1).to_dot(A))
    _emit(args, payload, text)
    return 0


def cmd_contract(args) -> int:
    r = reduce_system(load(args.file).system, with_core=False)
    if not r.cls.bounded:
        print("no bounded letters; nothing to contract", file=sys.stderr)
        return 0
    if isinstance(r.report, InfinitePower):
        print("a bounded word has unbounded powers; contraction does not apply", file=sys.stderr)
        return 1
    c = contract(r.W, r.cls)
    out = c.system(r.W.psi)
    payload = {"triples": list(c.C.tokens), "rules": dump_system(out)}
    _emit(args, payload, [dump_system(out).rstrip()])
    return 0


def cmd_growth(args) -> int:
    r = reduce_system(load(args.file).system, with_core=False)
    if r.grown is None:
        print("a bounded word has unbounded powers; growth analysis skipped", file=sys.stderr)
        return 1
    S = r.grown
    ga = GrowthAnalysis(S.phi)
    orders = {S.A.token(a): ga.order(a) for a in S.A.letters}
    same, _ = all_same_order(S.phi)
    payload = {"orders": {t: {"d": o.d, "theta": float(o.theta)} for t, o in orders.items()},
               "same_order": same}
    text = [f"{t}: {o}" for t, o in orders.items()] + [f"same order: {same}"]
    if same and next(iter(orders.values())).d == 0:
        b = growth_bounds(S.phi, S.psi)
        payload["bounds"] = {"C1": b.C1, "C2": b.C2, "theta_lo": b.theta_lo, "theta_hi": b.theta_hi}
        text.append(f"bounds: C1={b.C1} C2={float(b.C2):.6g} theta in [{b.theta_lo}, {float(b.theta_hi):.6g}]")
    _emit(args, payload, text)
    return 0


def cmd_core(args) -> int:
    r = reduce_system(load(args.file).system)
    if r.core is None:
        print("a bounded word has unbounded powers; no primitive core", file=sys.stderr)
        return 1
    c = r.core
    pv = is_periodic_primitive(c.H)
    D = sorted(r.grown.A.token(a) for a in c.D)
    payload = {"letters": D, "power": c.power, "start": r.grown.A.token(c.d0),
               "periodic": pv.period is not None, "periods_checked": pv.n_checked,
               "aperiodicity_heuristic": pv.heuristic, "rules": dump_system(c.H)}
    verdict = f"periodic: {pv.period is not None}"
    if pv.heuristic:
        verdict += f" (no period up to {pv.n_checked}; heuristic bound)"
    text = [f"core letters: {' '.join(D)}", f"power: {c.power}", f"start: {r.grown.A.token(c.d0)}",
            verdict, dump_system(c.H).rstrip()]
    _emit(args, payload, text)
    return 0


def cmd_rauzy(args) -> int:
    r = reduce_system(load(args.file).system)
    if r.core is None:
        print("a bounded word has unbounded powers; no primitive core", file=sys.stderr)
        return 1
    H = r.core.H
    if is_periodic_primitive(H).period is not None:
        print("the core is periodic; Rauzy schemes need an aperiodic word", file=sys.stderr)
        return 1
    f = HOracle(H).__contains__
    S = build_scheme(H, min_scale=2)
    rows = []
    for step in range(args.steps + 1):
        rep = validate_scheme(S, H, f)
        rows.append({"step": step, "scale": S.scale, "edges": len(S.keys), "vertices": len(S.vertices),
                     "violations": rep.violations})
        if args.dot:
            d = Path(args.dot)
            d.mkdir(parents=True, exist_ok=True)
            (d / f"scheme-{step:03d}.dot").write_text(S.to_dot(lambda w: H.B.render(w)))
        if step < args.steps:
            S = evolve(S, f).scheme
    proto = detect_protocol(build_scheme(H, min_scale=2), f, args.T)
    payload = {"steps": rows, "preperiod": proto.preperiod, "period": proto.period, "T": args.T}
    text = [f"step {x['step']:3d}: scale {x['scale']:8d}  edges {x['edges']:3d}  violations {x['violations'] or '-'}"
            for x in rows]
    text.append(f"protocol with T={args.T}: preperiod {proto.preperiod}, period {proto.period}")
    _emit(args, payload, text)
    return 0


def cmd_factors(args) -> int:
    r = reduce_system(load(args.file).system, with_core=False)
    B = r.W.B
    fs = sorted(B.render(w, " ") for w in factors(r.W, args.n))
    _emit(args, {"n": args.n, "count": len(fs), "factors": fs}, [f"{len(fs)} factors of length {args.n}"] + fs)
    return 0


def cmd_oracle(args) -> int:
    sys_ = load(args.file).system
    rep = oracle_mod.check(sys_, args.N, args.n_max)
    witness = sys_.B.render(rep.witness, " ") if rep.witness else None
    payload = {"verdict": rep.verdict, "N": rep.N, "n_max": rep.n_max, "R": list(rep.R),
               "R_doubled": list(rep.R_doubled), "witness": witness}
    text = [rep.verdict + (f" (witness: {witness})" if witness else ""), "R(n): " + " ".join(map(str, rep.R)), "R(n) at 2N: " + " ".join(map(str, rep.R_doubled))]
    _emit(args, payload, text)
    return 0


def cmd_corpus(args) -> int:
    rows = run_corpus(args.dir, jobs=args.jobs, oracle_N=args.oracle_n)
    payload = {"entries": [row.as_dict(timings=not args.no_timings) for row in rows]}
    text = [f"{'name':10s} {'expect':6s} {'verdict':12s} {'stage':9s} {'oracle':24s} agree"
            + ("" if args.no_timings else "  seconds")]
    for row in rows:
        if row.error:
            text.append(f"{row.name:10s} ERROR {row.error}")
        else:
            line = (f"{row.name:10s} {row.expected:6s} {row.verdict:12s} {row.stage:9s} "
                    f"{row.oracle:24s} {'yes' if row.agree else 'NO ':5s}")
            text.append(line.rstrip() if args.no_timings else f"{line} {row.seconds:7.1f}")
    _emit(args, payload, text)
    return 0 if all(row.agree for row in rows) else 1


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="urmorph", description="Uniform recurrence of morphic words.")
    p.add_argument("--json", action="store_true", help="machine-readable output")
    p.add_argument("--seedless", action="store_true",
                   help="deterministic behaviour; accepted for scripts, nothing here is random")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("decide", help="decide uniform recurrence")
    s.add_argument("file")
    s.add_argument("--trace", metavar="FILE", help="write the decision trace to FILE")
    s.add_argument("--max-steps", type=int, default=20_000)
    s.set_defaults(func=cmd_decide)

    s = sub.add_parser("bounded", help="bounded letters and bounded factors")
    s.add_argument("file")
    s.add_argument("--dot", metavar="FILE", help="write the graph of bounded blocks as DOT")
    s.set_defaults(func=cmd_bounded)

    s = sub.add_parser("contract", help="rule file of the contracted system")
    s.add_argument("file")
    s.set_defaults(func=cmd_contract)

    s = sub.add_parser("growth", help="growth orders and length bounds")
    s.add_argument("file")
    s.set_defaults(func=cmd_growth)

    s = sub.add_parser("core", help="primitive core")
    s.add_argument("file")
    s.set_defaults(func=cmd_core)

    s = sub.add_parser("rauzy", help="Rauzy scheme evolution of the core")
    s.add_argument("file")
    s.add_argument("--steps", type=int, default=10)
    s.add_argument("--dot", metavar="DIR", help="write one DOT file per step")
    s.add_argument("--T", type=int, default=6, help="path length for ruled schemes")
    s.set_defaults(func=cmd_rauzy)

    s = sub.add_parser("factors", help="factors of a given length")
    s.add_argument("file")
    s.add_argument("n", type=int)
    s.set_defaults(func=cmd_factors)

    s = sub.add_parser("oracle", help="empirical recurrence check")
    s.add_argument("file")
    s.add_argument("--N", type=int, default=100_000)
    s.add_argument("--n-max", type=int, default=10)
    s.set_defaults(func=cmd_oracle)

    s = sub.add_parser("corpus", help="run a labelled corpus")
    s.add_argument("dir", nargs="?", help="directory of rule files (default: the bundled corpus)")
    s.add_argument("--jobs", type=int, default=1)
    s.add_argument("--oracle-n", type=int, default=100_000)
    s.add_argument("--no-timings", action="store_true", help="omit timings, for byte-identical reruns")
    s.set_defaults(func=cmd_corpus)
    return p


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (RuleFileError, MorphismError, OSError, ValueError) as exc:
        print(f"urmorph: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
