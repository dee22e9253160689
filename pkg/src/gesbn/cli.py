"""Command-line surface: generate, learn, score, oracle, experiment."""

from __future__ import annotations

import argparse
import os
import sys

from .datagen import GOLD_STANDARDS, RngSeed, load_model, observed_sample, save_model
from .graphs import (
    complete_cpdag,
    consistent_extensions,
    cpdag_from_text,
    empty_cpdag,
    encode_edges,
    parameter_count,
)
from .harness import (
    DESK_SIZES,
    ExperimentPlan,
    paper_plan,
    run_experiment,
    write_results,
)
from .oracle import ci_holds, composition_holds, observed_margin
from .scoring import ScoreConfig, load_dataset, save_dataset, save_schema, score
from .search import SearchConfig, run_search

GOLD_FLAGS = {"w": "w_structure", "cycle4": "four_cycle"}


def _score_config(args) -> ScoreConfig:
    return ScoreConfig(criterion=args.score, ess=args.ess)


def _add_score_flags(p):
    p.add_argument("--score", choices=("bdeu", "bic", "oracle"), default="bdeu")
    p.add_argument("--ess", type=float, default=10.0,
                   help="equivalent sample size for bdeu (default 10)")


def cmd_generate(args) -> int:
    os.makedirs(args.out, exist_ok=True)
    gold = GOLD_STANDARDS[GOLD_FLAGS[args.gold]]().with_parameters(
        ess=args.ess, seed=RngSeed(args.seed, 0)
    )
    data = observed_sample(gold, args.m, RngSeed(args.seed, 1))
    save_model(gold, os.path.join(args.out, "model.json"))
    save_dataset(data, os.path.join(args.out, "data.csv"))
    save_schema(data.spec, os.path.join(args.out, "data.schema.json"))
    print(f"wrote model.json, data.csv, data.schema.json to {args.out}")
    return 0


def _load_learn_inputs(args):
    """Dataset or exact margin, plus the observable spec, per the flags."""
    if args.score == "oracle":
        if not args.joint:
            raise SystemExit("--score oracle requires --joint <model file>")
        gold = load_model(args.joint)
        margin = observed_margin(gold)
        return None, margin, margin.spec
    if not args.data:
        raise SystemExit("--data is required unless --score oracle is used")
    schema = args.schema if args.schema else None
    data = load_dataset(args.data, schema=schema, infer_cards=args.infer_schema)
    return data, None, data.spec


def _resolve_start_flag(start, spec):
    if start in (None, "empty"):
        return empty_cpdag(spec.n)
    if start == "complete":
        return complete_cpdag(spec.n)
    with open(start) as fh:
        return cpdag_from_text(fh.read(), spec)


def cmd_learn(args) -> int:
    data, joint, spec = _load_learn_inputs(args)
    cfg = SearchConfig(
        algorithm=args.algorithm,
        start=_resolve_start_flag(args.start, spec),
        score=_score_config(args),
    )
    learned, trace = run_search(cfg, data=data, joint=joint)
    os.makedirs(args.out, exist_ok=True)
    class_path = os.path.join(args.out, "class.txt")
    with open(class_path, "w") as fh:
        fh.write("# vars: " + " ".join(spec.names) + "\n")
        fh.write(encode_edges(learned, spec))
    with open(os.path.join(args.out, "trace.log"), "w") as fh:
        fh.write(trace.to_log())
    print(f"learned class written to {class_path}")
    return 0


def cmd_score(args) -> int:
    data = load_dataset(args.data, schema=args.schema, infer_cards=args.infer_schema)
    with open(args.graph) as fh:
        c = cpdag_from_text(fh.read(), data.spec)
    g = consistent_extensions(c)[0]
    total = score(g, data, _score_config(args))
    print(f"{args.score} score: {total!r}")
    return 0


def _parse_ci_flag(text, spec):
    lhs, _, zpart = text.partition("|")
    xname, yname = (s.strip() for s in lhs.split(","))
    z = [spec.index(s.strip()) for s in zpart.split(",") if s.strip()]
    return spec.index(xname), spec.index(yname), frozenset(z)


def cmd_oracle(args) -> int:
    from .oracle import inclusion_optimal_classes, parameter_optimal_classes

    gold = load_model(args.model)
    margin = observed_margin(gold)
    if margin.n > 4:
        raise SystemExit("oracle sweeps are limited to 4 observable variables")
    spec = margin.spec
    optimal = inclusion_optimal_classes(margin)
    popt = set(parameter_optimal_classes(margin))
    print(f"inclusion-optimal classes: {len(optimal)}")
    for c in optimal:
        rep = consistent_extensions(c)[0]
        d = parameter_count(rep, spec)
        tag = " (parameter optimal)" if c in popt else ""
        enc = "; ".join(encode_edges(c, spec).splitlines()) or "(empty)"
        print(f"  [{d} parameters]{tag} {enc}")
    comp = composition_holds(margin)
    print(f"composition property: {'holds' if comp.holds else 'FAILS'}")
    if not comp.holds:
        cx = comp.counterexample
        names = lambda vs: "{" + ",".join(spec.names[v] for v in sorted(vs)) + "}"
        print(f"  counterexample: {names(cx.x)} dep {names(cx.y)} | {names(cx.z)}")
    for ci in args.ci or ():
        x, y, z = _parse_ci_flag(ci, spec)
        verdict = "independent" if ci_holds(margin, x, y, z) else "dependent"
        print(f"ci {ci}: {verdict}")
    return 0


def cmd_experiment(args) -> int:
    gold = GOLD_FLAGS[args.gold]
    score_cfg = _score_config(args)
    if args.paper_scale:
        plan = paper_plan(gold, args.seed, score=score_cfg, algorithm=args.algorithm)
    else:
        sizes = (
            tuple(int(s) for s in args.sizes.split(","))
            if args.sizes
            else DESK_SIZES
        )
        plan = ExperimentPlan(
            gold, sizes, args.replicates, args.seed, score_cfg, args.algorithm
        )
    rows = run_experiment(plan, workers=args.workers, models_dir=args.save_models)
    write_results(args.out, rows, timings=args.timings)
    errors = sum(1 for r in rows if r.outcome == "error")
    print(f"wrote {len(rows)} rows to {args.out}" + (f" ({errors} errors)" if errors else ""))
    return 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="gesbn",
        description="Greedy equivalence search toolkit with an exact small-instance oracle",
    )
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", help="sample a gold-standard model and dataset")
    p.add_argument("--gold", choices=tuple(GOLD_FLAGS), required=True)
    p.add_argument("--m", type=int, required=True, help="number of observed records")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--ess", type=float, default=10.0,
                   help="concentration of the generative parameter prior")
    p.add_argument("--out", required=True, help="output directory")
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("learn", help="run an equivalence-class search on a dataset")
    p.add_argument("--data", help="dataset CSV")
    p.add_argument("--schema", help="schema sidecar JSON")
    p.add_argument("--infer-schema", action="store_true",
                   help="infer cardinalities as column max + 1")
    p.add_argument("--joint", help="model JSON; with --score oracle the exact margin is used")
    _add_score_flags(p)
    p.add_argument("--algorithm", choices=("ges", "uges", "fes", "bes"), default="ges")
    p.add_argument("--start", default=None,
                   help="empty, complete, or a class file (default: per-algorithm)")
    p.add_argument("--out", required=True, help="output directory")
    p.set_defaults(func=cmd_learn)

    p = sub.add_parser("score", help="score a class file against a dataset")
    p.add_argument("--data", required=True)
    p.add_argument("--schema")
    p.add_argument("--infer-schema", action="store_true")
    p.add_argument("--graph", required=True, help="class encoding text file")
    _add_score_flags(p)
    p.set_defaults(func=cmd_score)

    p = sub.add_parser("oracle", help="exact optimal classes and CI queries for a model")
    p.add_argument("--model", required=True, help="model JSON file")
    p.add_argument("--ci", action="append",
                   help="CI query 'X,Y|Z1,Z2' (repeatable)")
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser("experiment", help="replicated sweep over sample sizes")
    p.add_argument("--gold", choices=tuple(GOLD_FLAGS), required=True)
    p.add_argument("--sizes", help="comma-separated sample sizes (default 10..163840)")
    p.add_argument("--replicates", type=int, default=50)
    p.add_argument("--paper-scale", action="store_true",
                   help="published protocol: sizes up to 655360, 100 replicates")
    p.add_argument("--seed", type=int, default=0)
    _add_score_flags(p)
    p.add_argument("--algorithm", choices=("ges", "uges", "fes", "bes"), default="ges")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--timings", action="store_true",
                   help="record wall time per row (breaks byte-reproducibility)")
    p.add_argument("--save-models", metavar="DIR",
                   help="store each replicate's generative model JSON")
    p.add_argument("--out", required=True, help="results CSV path")
    p.set_defaults(func=cmd_experiment)

    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
