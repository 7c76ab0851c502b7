"""Command line interface.

Every subcommand that runs pipeline stages takes ``--config FILE`` (JSON)
plus one override flag per config key: ``cap`` becomes ``--cap``,
``seed_lexicon`` becomes ``--seed-lexicon`` and nested keys keep their
section, e.g. ``--train.learning-rate``.

Exit codes: 0 success, 1 stage failure, 2 usage or configuration error.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import logging
import os
import sys

from . import graph as G
from . import pipeline as P
from .evaluation import (
    BaselineConfig,
    TuneSpace,
    baseline_from_counts,
    count_tagged_corpus,
    micro_f1,
    seed_curve,
    top_weights,
    tune,
    tune_baseline,
)
from .lexicon import (
    AttributeInventory,
    LexiconFormatError,
    ModelFormatError,
    load_lexicon,
    load_model,
    save_lexicon,
    save_model,
)
from .propagation import PropagationConfig, TrainConfig, propagate, train

log = logging.getLogger("lexigraph")

SECTIONS = {"train": TrainConfig, "propagation": PropagationConfig}


def _flag(name: str) -> str:
    return "--" + name.replace("_", "-")


def _parse_bool(text: str) -> bool:
    value = text.strip().lower()
    if value in ("1", "true", "yes", "on"):
        return True
    if value in ("0", "false", "no", "off"):
        return False
    raise argparse.ArgumentTypeError(f"expected a boolean, got {text!r}")


def _parse_list(text: str) -> list[str]:
    return [item for item in text.split(",") if item]


def _converter(default):
    if isinstance(default, bool):
        return _parse_bool
    if isinstance(default, int):
        return int
    if isinstance(default, float):
        return float
    if isinstance(default, tuple):
        return _parse_list
    return str


def _add_config_args(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", help="JSON pipeline config")
    group = parser.add_argument_group("config overrides")
    defaults = P.PipelineConfig()
    for f in dataclasses.fields(P.PipelineConfig):
        if f.name in SECTIONS:
            section = SECTIONS[f.name]()
            for sf in dataclasses.fields(section):
                group.add_argument(
                    f"--{f.name}.{sf.name.replace('_', '-')}",
                    dest=f"ov:{f.name}.{sf.name}",
                    type=_converter(getattr(section, sf.name)),
                    metavar=sf.name.upper(),
                )
        else:
            group.add_argument(
                _flag(f.name),
                dest=f"ov:{f.name}",
                type=_converter(getattr(defaults, f.name)),
                metavar=f.name.upper(),
            )


def config_from_args(args) -> P.PipelineConfig:
    data: dict = {}
    base_dir = None
    if args.config:
        try:
            with open(args.config, encoding="utf-8") as fh:
                data = json.load(fh)
        except OSError as exc:
            raise P.ConfigError(f"cannot read config {args.config}: {exc}") from exc
        except json.JSONDecodeError as exc:
            raise P.ConfigError(f"{args.config}: invalid JSON: {exc}") from exc
        base_dir = os.path.dirname(os.path.abspath(args.config))
        data = P.config_from_dict(data, base_dir).to_dict()
    for key, value in vars(args).items():
        if not key.startswith("ov:") or value is None:
            continue
        name = key[3:]
        if "." in name:
            section, sub = name.split(".", 1)
            data.setdefault(section, {})[sub] = value
        else:
            data[name] = value
    return P.config_from_dict(data)


# --------------------------------------------------------------------------
# subcommands


def cmd_build_graph(args) -> int:
    cfg = config_from_args(args)
    P.check_inputs(cfg)
    with P.stage("load"):
        inputs = P.load_inputs(cfg)
    with P.stage("build-graph"):
        graph = P.build(cfg, inputs)
    stats = P.graph_stats(graph, inputs)
    with P.stage("write"):
        os.makedirs(cfg.output_dir, exist_ok=True)
        out = args.output or os.path.join(cfg.output_dir, "graph.tsv")
        G.save_graph(graph, out)
        with open(os.path.join(cfg.output_dir, "stats.txt"), "w", encoding="utf-8") as fh:
            fh.write(stats + "\n")
    print(stats)
    return 0


def _graph_for(args, cfg, inputs):
    if getattr(args, "graph", None):
        with P.stage("load-graph"):
            return G.load_graph(args.graph).with_labeled(inputs.seed.words)
    with P.stage("build-graph"):
        return P.build(cfg, inputs)


def cmd_train(args) -> int:
    cfg = config_from_args(args)
    P.check_inputs(cfg, need_providers=not args.graph)
    with P.stage("load"):
        inputs = P.load_inputs(cfg)
    graph = _graph_for(args, cfg, inputs)
    with P.stage("train"):
        model = train(graph, inputs.seed, cfg.train)
    os.makedirs(cfg.output_dir, exist_ok=True)
    out = args.output or os.path.join(cfg.output_dir, "model.tsv")
    save_model(model, out)
    print(out)
    return 0


def cmd_propagate(args) -> int:
    cfg = config_from_args(args)
    P.check_inputs(cfg, need_providers=not args.graph)
    with P.stage("load"):
        inputs = P.load_inputs(cfg)
    graph = _graph_for(args, cfg, inputs)
    model_path = args.model or os.path.join(cfg.output_dir, "model.tsv")
    if not os.path.exists(model_path):
        raise P.ConfigError(f"no model file at {model_path}; run `train` first")
    with P.stage("propagate"):
        model = load_model(model_path)
        if model.inventory.attributes != inputs.inventory.attributes:
            raise P.ConfigError("model inventory does not match the configured lexicons")
        result = propagate(graph, model, inputs.seed, cfg.propagation)
    os.makedirs(cfg.output_dir, exist_ok=True)
    out = args.output or os.path.join(cfg.output_dir, "propagated.lex")
    save_lexicon(result.lexicon, out, scores=cfg.write_scores)
    log.info("propagation: %d sweeps, converged=%s", result.sweeps, result.converged)
    print(out)
    return 0


def cmd_project(args) -> int:
    cfg = config_from_args(args)
    P.check_inputs(cfg, need_providers=False)
    with P.stage("load"):
        inputs = P.load_inputs(cfg)
        src = args.propagated or os.path.join(cfg.output_dir, "propagated.lex")
        if not os.path.exists(src):
            raise P.ConfigError(f"no propagated lexicon at {src}")
        propagated = load_lexicon(src, inputs.inventory)
        if len(propagated) and propagated.is_gold():
            log.warning(
                "%s holds thresholded vectors only; propagate with --write-scores true "
                "to project the raw scores as `run` does",
                src,
            )
    with P.stage("project"):
        projected = P.finalize(propagated, inputs.seed, True, cfg.skip_unlabeled)
    os.makedirs(cfg.output_dir, exist_ok=True)
    out = args.output or os.path.join(cfg.output_dir, "projected.lex")
    save_lexicon(projected, out)
    print(out)
    return 0


def _shared_inventory(*paths) -> AttributeInventory:
    names = set()
    for path in paths:
        if path:
            names.update(load_lexicon(path).inventory)
    return AttributeInventory.from_names(names)


def cmd_evaluate(args) -> int:
    for path in (args.predicted, args.gold, args.seed):
        if path and not os.path.exists(path):
            raise P.ConfigError(f"no such file {path}")
    with P.stage("evaluate"):
        inventory = _shared_inventory(args.predicted, args.gold, args.seed)
        predicted = load_lexicon(args.predicted, inventory)
        gold = load_lexicon(args.gold, inventory)
        if args.seed:
            from .evaluation import exclude_seen

            gold = exclude_seen(gold, load_lexicon(args.seed, inventory))
        report = micro_f1(predicted, gold)
    _emit(report.format(), args.output)
    return 0


def cmd_baseline(args) -> int:
    for path in (args.corpus, args.dev, args.gold):
        if path and not os.path.exists(path):
            raise P.ConfigError(f"no such file {path}")
    if args.k is None and not args.dev:
        raise P.ConfigError("give --k or a --dev lexicon to tune k on")
    with P.stage("baseline"):
        counts = count_tagged_corpus(args.corpus)
        names = {a for _, a in counts}
        for path in (args.dev, args.gold):
            if path:
                names.update(load_lexicon(path).inventory)
        inventory = AttributeInventory.from_names(names)
        k = args.k
        if k is None:
            k, dev_f1 = tune_baseline(counts, load_lexicon(args.dev, inventory))
            log.info("baseline: k=%d tuned on dev (micro-F1 %.4f)", k, dev_f1)
        try:
            cfg = BaselineConfig(k)
        except ValueError as exc:
            raise P.ConfigError(str(exc)) from exc
        lexicon = baseline_from_counts(counts, cfg, inventory)
    if args.output:
        save_lexicon(lexicon, args.output)
    print(f"k\t{k}")
    if args.gold:
        print(micro_f1(lexicon, load_lexicon(args.gold, inventory)).format(), end="")
    return 0


def cmd_run(args) -> int:
    cfg = config_from_args(args)
    result = P.run(cfg)
    if result.report is not None:
        print(result.report.format(), end="")
    for name, path in sorted(result.paths.items()):
        log.info("wrote %s: %s", name, path)
    return 0


def _load_space(path) -> TuneSpace:
    if not os.path.exists(path):
        raise P.ConfigError(f"no such file {path}")
    try:
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
        return TuneSpace(
            tuple(tuple(s) for s in data.get("feature_subsets", [])),
            tuple(bool(p) for p in data.get("projection_choices", [False, True])),
        )
    except (ValueError, AttributeError, TypeError) as exc:
        raise P.ConfigError(f"bad tuning space {path}: {exc}") from exc


def cmd_tune(args) -> int:
    cfg = config_from_args(args)
    space = _load_space(args.space)
    for subset in space.feature_subsets:
        P.check_inputs(cfg.replace(features=subset))
    if not cfg.dev_lexicon:
        raise P.ConfigError("tuning needs a dev_lexicon")
    with P.stage("load"):
        inputs = P.load_inputs(cfg)
    if inputs.dev is None or len(inputs.dev) == 0:
        raise P.ConfigError("dev lexicon is empty after removing seed words")
    result = tune(space, inputs.dev, P.tuning_pipeline(cfg, inputs), threads=cfg.threads)
    for subset, proj, f1 in result.scores:
        log.info("features=%s projection=%s dev micro-F1 %.4f", ",".join(subset), proj, f1)
    chosen = cfg.replace(features=result.feature_subset, projection=result.projection)
    os.makedirs(cfg.output_dir, exist_ok=True)
    out = args.output or os.path.join(cfg.output_dir, "tuned_config.json")
    P.save_config(chosen, out)
    print(f"features\t{','.join(result.feature_subset)}")
    print(f"projection\t{str(result.projection).lower()}")
    print(f"dev micro-F1\t{result.dev_f1:.4f}")
    return 0


def cmd_seed_curve(args) -> int:
    cfg = config_from_args(args)
    P.check_inputs(cfg)
    try:
        sizes = [int(s) for s in args.sizes.split(",") if s]
    except ValueError as exc:
        raise P.ConfigError(f"bad --sizes: {exc}") from exc
    with P.stage("load"):
        inputs = P.load_inputs(cfg)
    gold = inputs.test if inputs.test is not None else inputs.dev
    if gold is None:
        raise P.ConfigError("seed-curve needs a test_lexicon or dev_lexicon")
    if any(s > len(inputs.seed) for s in sizes):
        raise P.ConfigError(f"seed sizes must not exceed {len(inputs.seed)}")
    curve = seed_curve(inputs.seed, sizes, cfg.sample_seed, P.seed_pipeline(cfg, inputs), gold)
    text = "size\tmicro-F1\n" + "".join(f"{s}\t{f:.4f}\n" for s, f in curve)
    os.makedirs(cfg.output_dir, exist_ok=True)
    _emit(text, args.output or os.path.join(cfg.output_dir, "seed_curve.tsv"))
    return 0


def cmd_inspect_weights(args) -> int:
    if not os.path.exists(args.model):
        raise P.ConfigError(f"no such file {args.model}")
    model = load_model(args.model)
    if args.attribute not in model.inventory:
        raise P.ConfigError(f"attribute {args.attribute!r} is not in the model")
    highest, lowest = top_weights(model, args.attribute, args.n)
    lines = [f"# {args.attribute}", "# highest"]
    lines += [f"{f}\t{w:.6g}" for f, w in highest]
    lines.append("# lowest")
    lines += [f"{f}\t{w:.6g}" for f, w in lowest]
    print("\n".join(lines))
    return 0


def _emit(text: str, path=None) -> None:
    print(text, end="")
    if path:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)


def make_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="lexigraph", description=__doc__.split("\n\n")[0])
    parser.add_argument("-q", "--quiet", action="store_true", help="only log warnings")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("build-graph", help="build and dump the word graph")
    _add_config_args(p)
    p.add_argument("--output")
    p.set_defaults(func=cmd_build_graph)

    p = sub.add_parser("train", help="learn edge-feature weights")
    _add_config_args(p)
    p.add_argument("--graph", help="reuse a graph dump instead of rebuilding")
    p.add_argument("--output")
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("propagate", help="propagate attributes to unlabeled words")
    _add_config_args(p)
    p.add_argument("--graph")
    p.add_argument("--model")
    p.add_argument("--output")
    p.set_defaults(func=cmd_propagate)

    p = sub.add_parser("project", help="project propagated vectors onto seed paradigms")
    _add_config_args(p)
    p.add_argument("--propagated")
    p.add_argument("--output")
    p.set_defaults(func=cmd_project)

    p = sub.add_parser("evaluate", help="micro-F1 of a predicted lexicon against gold")
    p.add_argument("--predicted", required=True)
    p.add_argument("--gold", required=True)
    p.add_argument("--seed", help="drop gold words that occur in this seed lexicon")
    p.add_argument("--output")
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("baseline", help="corpus-count baseline lexicon")
    p.add_argument("--corpus", required=True, help="tagged corpus, word<TAB>ATTR ... per token")
    p.add_argument("--k", type=int, help="count threshold in [2, 20]")
    p.add_argument("--dev", help="tune k on this lexicon when --k is not given")
    p.add_argument("--gold", help="report micro-F1 against this lexicon")
    p.add_argument("--output")
    p.set_defaults(func=cmd_baseline)

    p = sub.add_parser("tune", help="choose features and projection on the dev lexicon")
    _add_config_args(p)
    p.add_argument("--space", required=True, help="JSON with feature_subsets and projection_choices")
    p.add_argument("--output")
    p.set_defaults(func=cmd_tune)

    p = sub.add_parser("run", help="run every stage end to end")
    _add_config_args(p)
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("seed-curve", help="micro-F1 for random seed subsets")
    _add_config_args(p)
    p.add_argument("--sizes", required=True, help="comma-separated seed sizes")
    p.add_argument("--output")
    p.set_defaults(func=cmd_seed_curve)

    p = sub.add_parser("inspect-weights", help="highest and lowest weighted features")
    p.add_argument("--model", required=True)
    p.add_argument("--attribute", required=True)
    p.add_argument("--n", type=int, default=10)
    p.set_defaults(func=cmd_inspect_weights)
    return parser


def main(argv=None) -> int:
    parser = make_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=logging.WARNING if args.quiet else logging.INFO,
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        return args.func(args)
    except P.ConfigError as exc:
        print(f"lexigraph: error: {exc}", file=sys.stderr)
        return 2
    except P.StageError as exc:
        print(f"lexigraph: {exc}", file=sys.stderr)
        return 1
    except (LexiconFormatError, ModelFormatError, G.GraphError, ValueError, OSError) as exc:
        print(f"lexigraph: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
