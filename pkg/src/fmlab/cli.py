"""Command line interface.

Subcommands: gen, classify, enumerate, quantifier sample, eval, and
experiment {zero-one|ext-axioms|dichotomy|definability|compare|iterated}.
Experiments take a JSON config file plus flag overrides and write canonical
JSON reports; the exit code is 0 only when no acceptance-relevant assertion
failed.  Timing goes to stderr so reports stay byte-reproducible.
"""

from __future__ import annotations

import argparse
import json
import sys
import time

from .canon import enumerate_graphs
from .experiments import (
    ExperimentConfig,
    QLevelKind,
    compare_distributions,
    default_registry,
    run_definability_experiment,
    run_dichotomy_experiment,
    run_extension_axiom_experiment,
    run_iterated_experiment,
    run_zero_one_experiment,
)
from .formulas import parse as parse_formula
from .graphio import dump_structure, graph6_to_graph, graph_to_graph6
from .growth import growth_from_spec
from .iterated import CountingFormula, NewKind, UDescriptor
from .kinds import Kind
from .logic import SchemeRegistry, evaluate
from .lowness import classify_low
from .quantifier import QuantifierClass, sample_tbar_prefix
from .reports import canonical_json
from .schemes import scheme_from_json
from .structures import draw_random_graph
from .kinds import GRAPH_SIG


def _load_registry(path: str | None) -> SchemeRegistry:
    registry = default_registry()
    if path:
        with open(path, "r", encoding="utf-8") as fh:
            data = json.load(fh)
        for entry in data.get("schemes", []):
            registry.register(scheme_from_json(entry, GRAPH_SIG))
    return registry


def _read_graph(path: str):
    text = sys.stdin.read() if path == "-" else open(path, "r", encoding="utf-8").read()
    return graph6_to_graph(text.strip().splitlines()[0])


def _cmd_gen(args) -> int:
    g = draw_random_graph(args.n, args.q, args.seed)
    if args.format == "g6":
        print(graph_to_graph6(g))
    else:
        print(dump_structure(g))
    return 0


def _cmd_classify(args) -> int:
    g = _read_graph(args.input)
    gf = growth_from_spec(args.growth)
    verdict = classify_low(g, args.iota, gf, args.budget)
    print(canonical_json(verdict), end="")
    return 0


def _cmd_enumerate(args) -> int:
    for form in enumerate_graphs(args.max_n):
        print(json.dumps({"n": form.n, "canon_hex": form.hex}))
    return 0


def _cmd_quantifier_sample(args) -> int:
    qc = QuantifierClass(
        args.iota, growth_from_spec(args.growth), args.seed, args.prob_mode, exact_cap=args.max_n
    )
    rows = sample_tbar_prefix(qc, args.count) if args.count else sample_tbar_prefix(
        qc, sum(1 for _ in enumerate_graphs(args.max_n))
    )
    print(canonical_json(rows), end="")
    return 0


def _cmd_eval(args) -> int:
    g = _read_graph(args.model)
    registry = _load_registry(args.schemes)
    if args.formula:
        text = args.formula
    else:
        with open(args.formula_file, "r", encoding="utf-8") as fh:
            text = fh.read().strip()
    from .logic import elaborate

    ast = elaborate(parse_formula(text), registry)
    qc = QuantifierClass(args.iota, growth_from_spec(args.growth), args.seed, args.prob_mode)
    value = evaluate(g, ast, {}, qc, registry)
    print(canonical_json({"formula": text, "value": value}), end="")
    return 0


def _config_from_file(path: str | None) -> dict:
    if not path:
        return {}
    with open(path, "r", encoding="utf-8") as fh:
        return json.load(fh)


def _experiment_config(args) -> ExperimentConfig:
    raw = _config_from_file(args.config)
    overrides = {
        "sentences": tuple(args.sentence) if args.sentence else None,
        "sizes": tuple(int(x) for x in args.sizes.split(",")) if args.sizes else None,
        "trials": args.trials,
        "q": args.q,
        "growth": args.growth,
        "iota": args.iota,
        "seed": args.seed,
        "prob_mode": args.prob_mode,
        "draw_mode": args.draw_mode,
        "rank": args.rank,
    }
    for key, value in overrides.items():
        if value is not None:
            raw[key] = value
    for key in ("sentences", "sizes", "pairs"):
        if key in raw and isinstance(raw[key], list):
            raw[key] = tuple(tuple(x) if isinstance(x, list) else x for x in raw[key])
    return ExperimentConfig(**raw)


def _cmd_experiment(args) -> int:
    started = time.monotonic()
    cfg_raw = _config_from_file(args.config)
    registry = _load_registry(args.schemes)
    if args.kind == "zero-one":
        report = run_zero_one_experiment(_experiment_config(args), registry)
    elif args.kind == "ext-axioms":
        cfg = _experiment_config(args)
        report = run_extension_axiom_experiment(cfg.q, cfg.sizes, cfg.trials, cfg.pairs, cfg.seed)
    elif args.kind == "definability":
        report = run_definability_experiment(_experiment_config(args), registry)
    elif args.kind == "dichotomy":
        cfg = _experiment_config(args)
        scheme = registry.get(args.scheme or "nbhd")
        report = run_dichotomy_experiment(scheme, cfg)
    elif args.kind == "compare":
        cfg = _experiment_config(args)
        pipeline = []
        for level in cfg_raw.get("pipeline", []):
            level_kinds = []
            for entry in level:
                kind = Kind(
                    entry["kind"],
                    int(entry["arity"]),
                    tuple(tuple(g) for g in entry.get("generators", [])),
                )
                level_kinds.append(
                    QLevelKind(kind, tuple(entry["param_vars"]), entry["formula"])
                )
            pipeline.append(tuple(level_kinds))
        report = compare_distributions(cfg, tuple(pipeline), registry)
    elif args.kind == "iterated":
        cfg = _experiment_config(args)
        u = _u_from_config(cfg_raw.get("u", {"base_q": cfg.q, "levels": []}))
        report = run_iterated_experiment(u, cfg, b17=bool(cfg_raw.get("b17", False)), registry=registry)
    else:
        raise SystemExit(f"unknown experiment {args.kind!r}")
    text = report.to_json()
    if args.output:
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(text)
    print(text, end="")
    if args.csv:
        with open(args.csv, "w", encoding="utf-8") as fh:
            fh.write(report.rows_csv())
    print(f"elapsed: {time.monotonic() - started:.2f}s", file=sys.stderr)
    return 0 if report.ok else 1


def _u_from_config(data: dict) -> UDescriptor:
    levels = []
    for level in data.get("levels", []):
        new_kinds = []
        for entry in level:
            kind = Kind(
                entry["kind"],
                int(entry["arity"]),
                tuple(tuple(g) for g in entry.get("generators", [])),
            )
            counters = tuple(
                CountingFormula(
                    parse_formula(c["formula"]),
                    tuple(c["vars"]),
                    tuple(tuple(g) for g in c.get("generators", [])),
                )
                for c in entry.get("counters", [])
            )
            new_kinds.append(
                NewKind(
                    kind,
                    tuple(entry["param_vars"]),
                    parse_formula(entry["admission"]),
                    counters,
                    entry.get("scheme"),
                )
            )
        levels.append(tuple(new_kinds))
    return UDescriptor(float(data.get("base_q", 0.5)), tuple(levels))


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="fmlab")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", help="draw a random graph")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--q", type=float, default=0.5)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--format", choices=("g6", "json"), default="g6")
    p.set_defaults(func=_cmd_gen)

    p = sub.add_parser("classify", help="low/high classification of a graph")
    p.add_argument("--iota", type=int, choices=(1, 2), default=1)
    p.add_argument("--growth", default="paper")
    p.add_argument("--budget", type=int, default=10_000_000)
    p.add_argument("--input", default="-", help="graph6 file, or - for stdin")
    p.set_defaults(func=_cmd_classify)

    p = sub.add_parser("enumerate", help="canonical forms up to a size")
    p.add_argument("--max-n", type=int, default=7)
    p.set_defaults(func=_cmd_enumerate)

    p = sub.add_parser("quantifier", help="quantifier class utilities")
    qsub = p.add_subparsers(dest="qcommand", required=True)
    ps = qsub.add_parser("sample", help="explicit membership bit prefix")
    ps.add_argument("--seed", type=int, default=0)
    ps.add_argument("--iota", type=int, choices=(1, 2), default=1)
    ps.add_argument("--growth", default="paper")
    ps.add_argument("--prob-mode", choices=("h-of-size", "g-inverse"), default="h-of-size")
    ps.add_argument("--max-n", type=int, default=7)
    ps.add_argument("--count", type=int, default=0, help="rows to emit (default: all classes)")
    ps.set_defaults(func=_cmd_quantifier_sample)

    p = sub.add_parser("eval", help="evaluate a formula on a model")
    p.add_argument("--model", required=True, help="graph6 file, or - for stdin")
    p.add_argument("--formula", default=None)
    p.add_argument("--formula-file", default=None)
    p.add_argument("--schemes", default=None, help="scheme registry JSON")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--iota", type=int, choices=(1, 2), default=1)
    p.add_argument("--growth", default="paper")
    p.add_argument("--prob-mode", choices=("h-of-size", "g-inverse"), default="h-of-size")
    p.set_defaults(func=_cmd_eval)

    p = sub.add_parser("experiment", help="run a Monte Carlo experiment")
    p.add_argument(
        "kind",
        choices=("zero-one", "ext-axioms", "dichotomy", "definability", "compare", "iterated"),
    )
    p.add_argument("--config", default=None, help="JSON config file")
    p.add_argument("--schemes", default=None)
    p.add_argument("--scheme", default=None, help="scheme name for dichotomy")
    p.add_argument("--output", default=None)
    p.add_argument("--csv", default=None)
    p.add_argument("--sentence", action="append", default=None)
    p.add_argument("--sizes", default=None, help="comma separated")
    p.add_argument("--trials", type=int, default=None)
    p.add_argument("--q", type=float, default=None)
    p.add_argument("--growth", default=None)
    p.add_argument("--iota", type=int, default=None)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--prob-mode", dest="prob_mode", default=None)
    p.add_argument("--draw-mode", dest="draw_mode", default=None)
    p.add_argument("--rank", type=int, default=None)
    p.set_defaults(func=_cmd_experiment)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
