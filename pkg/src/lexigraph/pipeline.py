"""End-to-end orchestration: inputs -> graph -> weights -> propagation -> projection -> report."""

from __future__ import annotations

import contextlib
import dataclasses
import json
import logging
import os
import time
import warnings
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Any

from . import graph as G
from .evaluation import EvalReport, exclude_seen, micro_f1
from .lexicon import (
    AttributeInventory,
    Lexicon,
    ParadigmSet,
    WeightMatrix,
    load_lexicon,
    read_word_list,
    save_lexicon,
    save_model,
)
from .projection import project_lexicon
from .propagation import PropagationConfig, PropagationResult, TrainConfig, propagate, train

log = logging.getLogger(__name__)

PATH_KEYS = ("seed_lexicon", "unlabeled_vocab", "dev_lexicon", "test_lexicon", "clusters", "rules")


class ConfigError(ValueError):
    """Bad or inconsistent configuration; maps to exit code 2."""


class StageError(RuntimeError):
    """A pipeline stage failed at run time; maps to exit code 1."""

    def __init__(self, stage: str, cause: BaseException):
        super().__init__(f"stage {stage!r} failed: {cause}")
        self.stage = stage
        self.cause = cause


@dataclass
class PipelineConfig:
    seed_lexicon: str = ""
    unlabeled_vocab: str | None = None
    dev_lexicon: str | None = None
    test_lexicon: str | None = None
    clusters: str | None = None
    rules: str | None = None
    output_dir: str = "out"
    features: tuple[str, ...] = G.FEATURE_KINDS
    cap: int = G.DEFAULT_CAP
    affix_min: int = 2
    affix_max: int = 3
    projection: bool = True
    skip_unlabeled: bool = True
    write_scores: bool = False
    graph_seed: int = 0
    sample_seed: int = 0
    threads: int = 1
    train: TrainConfig = field(default_factory=TrainConfig)
    propagation: PropagationConfig = field(default_factory=PropagationConfig)

    def __post_init__(self):
        self.features = tuple(self.features)
        for kind in self.features:
            if kind not in G.FEATURE_KINDS:
                raise ConfigError(f"unknown feature kind {kind!r}; choose from {G.FEATURE_KINDS}")
        if self.cap < 1:
            raise ConfigError(f"cap must be positive, got {self.cap}")
        if self.threads < 1:
            raise ConfigError(f"threads must be positive, got {self.threads}")

    def to_dict(self) -> dict[str, Any]:
        d = dataclasses.asdict(self)
        d["features"] = list(self.features)
        return d

    def dumps(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"

    def replace(self, **changes) -> "PipelineConfig":
        return dataclasses.replace(self, **changes)


def _section(cls, data):
    if isinstance(data, cls):
        return data
    if not isinstance(data, dict):
        raise ConfigError(f"{cls.__name__} section must be a mapping")
    names = {f.name for f in dataclasses.fields(cls)}
    unknown = set(data) - names
    if unknown:
        raise ConfigError(f"unknown {cls.__name__} keys: {sorted(unknown)}")
    try:
        return cls(**data)
    except (TypeError, ValueError) as exc:
        raise ConfigError(str(exc)) from exc


def config_from_dict(data: dict[str, Any], base_dir: str | None = None) -> PipelineConfig:
    """Build a config; relative paths are resolved against ``base_dir``."""
    data = dict(data)
    names = {f.name for f in dataclasses.fields(PipelineConfig)}
    unknown = set(data) - names
    if unknown:
        raise ConfigError(f"unknown config keys: {sorted(unknown)}")
    if "train" in data:
        data["train"] = _section(TrainConfig, data["train"])
    if "propagation" in data:
        data["propagation"] = _section(PropagationConfig, data["propagation"])
    if base_dir:
        for key in PATH_KEYS + ("output_dir",):
            value = data.get(key)
            if value and not os.path.isabs(value):
                data[key] = os.path.join(base_dir, value)
    try:
        return PipelineConfig(**data)
    except TypeError as exc:
        raise ConfigError(str(exc)) from exc


def load_config(path) -> PipelineConfig:
    try:
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: invalid JSON: {exc}") from exc
    return config_from_dict(data, os.path.dirname(os.path.abspath(path)))


def save_config(cfg: PipelineConfig, path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(cfg.dumps())


def check_inputs(cfg: PipelineConfig, need_providers: bool = True) -> None:
    """Fail early on missing files or an empty feature selection."""
    if not cfg.seed_lexicon:
        raise ConfigError("seed_lexicon is required")
    for key in PATH_KEYS:
        path = getattr(cfg, key)
        if path and not os.path.exists(path):
            raise ConfigError(f"{key}: no such file {path}")
    if need_providers:
        if not cfg.features:
            raise ConfigError("no edge feature kinds enabled")
        if "cluster" in cfg.features and not cfg.clusters:
            raise ConfigError("cluster features enabled but no clusters file given")
        if "morphtrans" in cfg.features and not cfg.rules:
            raise ConfigError("morphtrans features enabled but no rules file given")


@contextlib.contextmanager
def stage(name: str):
    start = time.perf_counter()
    try:
        yield
    except (ConfigError, StageError):
        raise
    except Exception as exc:
        raise StageError(name, exc) from exc
    finally:
        log.info("stage %s: %.3fs", name, time.perf_counter() - start)


# --------------------------------------------------------------------------
# inputs


@dataclass
class Inputs:
    seed: Lexicon
    vocab: list[str]
    dev: Lexicon | None
    test: Lexicon | None

    @property
    def inventory(self) -> AttributeInventory:
        return self.seed.inventory


def load_inputs(cfg: PipelineConfig) -> Inputs:
    """Read lexicons under one shared inventory and assemble the vocabulary.

    The inventory is the sorted union of attributes across seed, dev and test
    files, so that all lexicons compare directly.  Dev and test words seen in
    the seed are dropped.
    """
    raw_seed = load_lexicon(cfg.seed_lexicon)
    raw_dev = load_lexicon(cfg.dev_lexicon) if cfg.dev_lexicon else None
    raw_test = load_lexicon(cfg.test_lexicon) if cfg.test_lexicon else None
    names = set(raw_seed.inventory)
    for lex in (raw_dev, raw_test):
        if lex is not None:
            names.update(lex.inventory)
    inventory = AttributeInventory.from_names(names)
    seed = raw_seed.with_inventory(inventory)
    dev = exclude_seen(raw_dev.with_inventory(inventory), seed, "dev") if raw_dev else None
    test = exclude_seen(raw_test.with_inventory(inventory), seed, "test") if raw_test else None
    vocab = list(seed.words)
    if cfg.unlabeled_vocab:
        vocab.extend(read_word_list(cfg.unlabeled_vocab))
    return Inputs(seed, vocab, dev, test)


def providers_for(cfg: PipelineConfig, inputs: Inputs, features=None) -> list[G.EdgeCandidates]:
    features = cfg.features if features is None else tuple(features)
    if not features:
        raise ConfigError("no edge feature kinds enabled")
    out = []
    for kind in G.FEATURE_KINDS:
        if kind not in features:
            continue
        if kind == "cluster":
            if not cfg.clusters:
                raise ConfigError("cluster features enabled but no clusters file given")
            out.append(G.cluster_features(cfg.clusters, inputs.vocab))
        elif kind in ("suffix", "prefix"):
            out.append(
                G.affix_features(inputs.vocab, inputs.seed.words, kind, cfg.affix_min, cfg.affix_max)
            )
        else:
            if not cfg.rules:
                raise ConfigError("morphtrans features enabled but no rules file given")
            out.append(G.morphtrans_features(cfg.rules, inputs.vocab))
    for prov in out:
        if prov.report:
            log.info("%s provider: %s", prov.kind, dict(sorted(prov.report.items())))
    return out


def build(cfg: PipelineConfig, inputs: Inputs, features=None) -> G.FeatureGraph:
    return G.build_graph(
        inputs.vocab,
        providers_for(cfg, inputs, features),
        cap=cfg.cap,
        seed=cfg.graph_seed,
        labeled=inputs.seed.words,
    )


def graph_stats(graph: G.FeatureGraph, inputs: Inputs) -> str:
    n_paradigms = len(ParadigmSet.from_lexicon(inputs.seed))
    return (
        f"|L|={int(graph.labeled.sum())} |W|={graph.n_nodes} |E|={graph.n_edges} "
        f"|A|={len(inputs.inventory)} |P|={n_paradigms}"
    )


def finalize(
    propagated: Lexicon, seed: Lexicon, projection: bool, skip_unlabeled: bool = True
) -> Lexicon:
    """The predicted lexicon: projected vectors, or propagated vectors as they are."""
    if not projection:
        return propagated
    return project_lexicon(propagated, ParadigmSet.from_lexicon(seed, "seed"), skip_unlabeled)


@dataclass
class RunResult:
    graph: G.FeatureGraph
    model: WeightMatrix
    propagation: PropagationResult
    projected: Lexicon
    predicted: Lexicon
    report: EvalReport | None
    paths: dict[str, str]


def fit_predict(
    cfg: PipelineConfig, inputs: Inputs, features=None
) -> tuple[G.FeatureGraph, WeightMatrix, PropagationResult]:
    """Graph, trained weights and propagation for one feature selection."""
    with stage("build-graph"):
        graph = build(cfg, inputs, features)
    with stage("train"):
        model = train(graph, inputs.seed, cfg.train)
    with stage("propagate"):
        result = propagate(graph, model, inputs.seed, cfg.propagation)
    return graph, model, result


def run(cfg: PipelineConfig) -> RunResult:
    """Run every stage and write graph, model, lexicons and report to ``cfg.output_dir``."""
    check_inputs(cfg)
    with stage("load"):
        inputs = load_inputs(cfg)
    graph, model, prop = fit_predict(cfg, inputs)
    with stage("project"):
        # written either way so both lexicons can be compared
        projected = finalize(prop.lexicon, inputs.seed, True, cfg.skip_unlabeled)
    predicted = projected if cfg.projection else prop.lexicon

    gold = inputs.test if inputs.test is not None else inputs.dev
    report = micro_f1(predicted, gold) if gold is not None else None

    with stage("write"):
        os.makedirs(cfg.output_dir, exist_ok=True)
        paths = {
            "graph": os.path.join(cfg.output_dir, "graph.tsv"),
            "stats": os.path.join(cfg.output_dir, "stats.txt"),
            "model": os.path.join(cfg.output_dir, "model.tsv"),
            "propagated": os.path.join(cfg.output_dir, "propagated.lex"),
            "projected": os.path.join(cfg.output_dir, "projected.lex"),
        }
        G.save_graph(graph, paths["graph"])
        _write(paths["stats"], graph_stats(graph, inputs) + "\n")
        save_model(model, paths["model"])
        save_lexicon(prop.lexicon, paths["propagated"], scores=cfg.write_scores)
        save_lexicon(projected, paths["projected"])
        if report is not None:
            paths["report"] = os.path.join(cfg.output_dir, "report.txt")
            _write(paths["report"], report.format())
    return RunResult(graph, model, prop, projected, predicted, report, paths)


def _write(path, text: str) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)


def tuning_pipeline(cfg: PipelineConfig, inputs: Inputs):
    """``(subset, projection) -> predicted lexicon`` with training cached per subset."""

    @lru_cache(maxsize=None)
    def propagated(subset: tuple[str, ...]) -> Lexicon:
        _, _, prop = fit_predict(cfg, inputs, subset)
        return prop.lexicon

    def pipeline(subset, projection: bool) -> Lexicon:
        return finalize(propagated(tuple(subset)), inputs.seed, projection, cfg.skip_unlabeled)

    return pipeline


def seed_pipeline(cfg: PipelineConfig, inputs: Inputs):
    """``seed lexicon -> predicted lexicon`` with everything else fixed."""

    def pipeline(seed: Lexicon) -> Lexicon:
        sub_inputs = Inputs(seed, inputs.vocab, inputs.dev, inputs.test)
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            _, _, prop = fit_predict(cfg, sub_inputs)
        return finalize(prop.lexicon, seed, cfg.projection, cfg.skip_unlabeled)

    return pipeline
