"""Command-line front end.

Subcommands: fold, member, check, intersect, sample-subgroup, count,
experiment, ratio-table.  Graph input/output uses the canonical
serialization; all other JSON is emitted with sorted keys and no
extraneous whitespace so golden-file tests stay byte-stable.  Exit
status: 0 on success, 1 on domain errors, 2 on usage errors.
"""

from __future__ import annotations

import argparse
import json
import random
import sys
from pathlib import Path

from . import experiments, properties, stallings
from .partial_injections import CountCache, _COUNTERS
from .samplers import GenericityParams, SamplingError, sample_graph_subgroup, sample_word_tuple
from .stallings import fold, membership, parse, serialize
from .words import format_word, parse_word


def _dump(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"))


def _load_graph(path: str) -> stallings.StallingsGraph:
    return parse(Path(path).read_text())


def _cmd_fold(args) -> int:
    pieces = args.generators.split(",") if args.generators else []
    g = fold([p.strip() for p in pieces], args.r)
    print(serialize(g))
    return 0


def _cmd_member(args) -> int:
    g = _load_graph(args.graph)
    w = parse_word(args.word, g.r)
    print("true" if membership(g, w) else "false")
    return 0


def _cmd_check(args) -> int:
    g = _load_graph(args.graph)
    if args.property == "malnormal":
        report = properties.is_malnormal(g)
        detail = {"malnormal": report.malnormal, "witness": None}
        if report.witness is not None:
            (x, y), word = report.witness
            detail["witness"] = {"pair": [x, y], "word": format_word(word)}
        line = f"malnormal: {str(report.malnormal).lower()}"
    elif args.property == "pure":
        verdict = properties.purity_status(g, args.dmax)
        if isinstance(verdict, properties.NonPure):
            detail = {
                "verdict": "NonPure",
                "witness_word": format_word(verdict.witness_word),
                "orbit": verdict.orbit,
                "period": verdict.period,
            }
            line = "pure: false"
        else:
            detail = {"verdict": "PureUpTo", "d_max": verdict.d_max}
            line = f"pure: unknown (no witness of period <= {verdict.d_max})"
    elif args.property == "rank":
        value = stallings.rank(g)
        detail = {
            "rank": value,
            "reduced_rank": stallings.reduced_rank(g),
            "vertices": g.n,
            "edges": g.num_edges,
        }
        line = f"rank: {value}"
    elif args.property == "trivial-closure":
        report = properties.normal_closure_trivial_sufficient(g)
        detail = {"verdict": report.verdict, "per_letter_gcd": report.per_letter_gcd}
        line = f"trivial-closure: {report.verdict}"
    else:  # avoid-generators
        value = properties.avoids_generator_conjugates(g)
        detail = {"avoids_generator_conjugates": value}
        line = f"avoid-generators: {str(value).lower()}"
    print(line)
    print(_dump(detail))
    return 0


def _cmd_intersect(args) -> int:
    g1 = _load_graph(args.graph1)
    g2 = _load_graph(args.graph2)
    if args.shnc:
        report = properties.hnc_report(g1, g2)
        print(
            _dump(
                {
                    "chi_delta1": report.chi_delta1,
                    "chi_delta2": report.chi_delta2,
                    "rr_H": report.rr_H,
                    "rr_K": report.rr_K,
                    "rank_intersection": report.rank_intersection,
                    "hnc_ok": report.hnc_ok,
                    "shnc_ok": report.shnc_ok,
                }
            )
        )
    else:
        print(serialize(properties.intersection(g1, g2)))
    return 0


def _cmd_sample(args) -> int:
    rng = random.Random(args.seed)
    if args.mode == "graph":
        if args.n is None:
            raise ValueError("graph mode needs --n (vertex count)")
        cache = CountCache()
        for _ in range(args.count):
            print(serialize(sample_graph_subgroup(args.r, args.n, cache, rng)))
    else:
        bound = args.maxlen if args.maxlen is not None else args.n
        if bound is None:
            raise ValueError("word mode needs --maxlen (word length bound)")
        if args.k is None:
            raise ValueError("word mode needs --k (words per tuple)")
        for _ in range(args.count):
            t = sample_word_tuple(args.r, args.k, bound, rng)
            print(",".join(format_word(w) for w in t.words))
    return 0


def _cmd_count(args) -> int:
    table = _COUNTERS[args.sequence](args.n)
    for m, value in enumerate(table):
        print(f"{args.sequence} {m} {value}")
    return 0


def _parse_ns(text: str) -> tuple:
    try:
        return tuple(int(piece) for piece in text.split(","))
    except ValueError:
        raise ValueError(f"expected an integer or comma list, got {text!r}") from None


def _cmd_experiment(args) -> int:
    params = GenericityParams(alpha=args.alpha, lam=args.lam, beta=args.beta)
    spec = experiments.ExperimentSpec(
        name=args.name,
        r=args.r,
        ns=_parse_ns(args.n),
        k=args.k,
        trials=args.trials,
        master_seed=args.seed,
        params=params,
        d_max=args.dmax,
    )
    report = experiments.run_experiment(spec)
    if args.out:
        if args.json:
            experiments.write_json(report, args.out)
        else:
            experiments.write_csv(report, args.out)
        if not args.no_figures:
            experiments.render_report_figure(report, str(Path(args.out).with_suffix(".png")))
    elif args.json:
        experiments.write_json(report, sys.stdout)
    else:
        experiments.write_csv(report, sys.stdout)
    return 0


def _cmd_ratio_table(args) -> int:
    rows = experiments.exact_ratio_table(args.n)
    if args.out:
        experiments.write_ratio_csv(rows, args.out)
        if not args.no_figures:
            experiments.render_ratio_figure(rows, str(Path(args.out).with_suffix(".png")))
    else:
        experiments.write_ratio_csv(rows, sys.stdout)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="freegroups",
        description="Stallings graphs, partial injections and subgroup statistics.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("fold", help="fold generators into a subgroup graph")
    p.add_argument("--r", type=int, required=True, help="alphabet rank")
    p.add_argument("--generators", required=True, help="comma-separated reduced words")
    p.set_defaults(handler=_cmd_fold)

    p = sub.add_parser("member", help="test membership of a word in a subgroup")
    p.add_argument("--graph", required=True, help="graph file")
    p.add_argument("--word", required=True, help="reduced word")
    p.set_defaults(handler=_cmd_member)

    p = sub.add_parser("check", help="decide a property of a subgroup graph")
    p.add_argument("--graph", required=True, help="graph file")
    p.add_argument(
        "--property",
        required=True,
        choices=["malnormal", "pure", "rank", "trivial-closure", "avoid-generators"],
    )
    p.add_argument("--dmax", type=int, default=2, help="purity search depth")
    p.set_defaults(handler=_cmd_check)

    p = sub.add_parser("intersect", help="intersect two subgroups")
    p.add_argument("--graph1", required=True)
    p.add_argument("--graph2", required=True)
    p.add_argument("--shnc", action="store_true", help="report the Hanna Neumann quantities")
    p.set_defaults(handler=_cmd_intersect)

    p = sub.add_parser("sample-subgroup", help="sample random subgroups")
    p.add_argument("--mode", required=True, choices=["graph", "word"])
    p.add_argument("--r", type=int, default=2)
    p.add_argument("--n", type=int, help="vertex count (graph mode)")
    p.add_argument("--k", type=int, help="words per tuple (word mode)")
    p.add_argument("--maxlen", type=int, help="word length bound (word mode)")
    p.add_argument("--count", type=int, default=1, help="samples to emit")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(handler=_cmd_sample)

    p = sub.add_parser("count", help="print a counting table")
    p.add_argument("--sequence", required=True, choices=sorted(_COUNTERS))
    p.add_argument("--n", type=int, required=True)
    p.set_defaults(handler=_cmd_count)

    p = sub.add_parser("experiment", help="run a registry experiment")
    p.add_argument("--name", required=True, choices=sorted(experiments.REGISTRY))
    p.add_argument("--r", type=int, default=2)
    p.add_argument("--k", type=int)
    p.add_argument("--n", required=True, help="sphere size, int or comma list")
    p.add_argument("--trials", type=int, default=1000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--dmax", type=int, default=2)
    p.add_argument("--alpha", type=float, default=0.75)
    p.add_argument("--lambda", dest="lam", type=float, default=0.125)
    p.add_argument("--beta", type=float, default=0.25)
    p.add_argument("--out", help="write the report here (figure rendered alongside)")
    p.add_argument("--json", action="store_true", help="JSON instead of CSV")
    p.add_argument("--no-figures", action="store_true", help="skip figure rendering")
    p.set_defaults(handler=_cmd_experiment)

    p = sub.add_parser("ratio-table", help="exact scaled count ratios for n = 1..N")
    p.add_argument("--n", type=int, required=True, help="largest n")
    p.add_argument("--out", help="write the table here (figure rendered alongside)")
    p.add_argument("--no-figures", action="store_true", help="skip figure rendering")
    p.set_defaults(handler=_cmd_ratio_table)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.handler(args)
    except (ValueError, SamplingError, AssertionError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
