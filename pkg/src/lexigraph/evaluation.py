"""Intrinsic evaluation, the corpus-count baseline, tuning and diagnostics."""

from __future__ import annotations

import itertools
import logging
import warnings
from collections import Counter
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence

import numpy as np

from .lexicon import AttributeInventory, Lexicon, LexiconFormatError, WeightMatrix

log = logging.getLogger(__name__)


@dataclass
class EvalReport:
    true_positives: int = 0
    false_positives: int = 0
    false_negatives: int = 0
    per_attribute: dict[str, tuple[int, int, int]] = field(default_factory=dict)

    @property
    def micro_f1(self) -> float:
        denom = 2 * self.true_positives + self.false_positives + self.false_negatives
        return 2 * self.true_positives / denom if denom else 0.0

    @property
    def precision(self) -> float:
        denom = self.true_positives + self.false_positives
        return self.true_positives / denom if denom else 0.0

    @property
    def recall(self) -> float:
        denom = self.true_positives + self.false_negatives
        return self.true_positives / denom if denom else 0.0

    def format(self) -> str:
        lines = ["attribute\ttp\tfp\tfn"]
        for name, (tp, fp, fn) in self.per_attribute.items():
            lines.append(f"{name}\t{tp}\t{fp}\t{fn}")
        lines.append(
            f"total\t{self.true_positives}\t{self.false_positives}\t{self.false_negatives}"
        )
        lines.append(f"precision\t{self.precision:.4f}")
        lines.append(f"recall\t{self.recall:.4f}")
        lines.append(f"micro-F1\t{self.micro_f1:.4f}")
        return "\n".join(lines) + "\n"


def micro_f1(predicted: Lexicon, gold: Lexicon) -> EvalReport:
    """Pool tp/fp/fn over every (gold word, attribute) decision.

    Words missing from ``predicted`` count as predicting nothing; predicted
    words outside ``gold`` are ignored.
    """
    if predicted.inventory.attributes != gold.inventory.attributes:
        raise ValueError("predicted and gold lexicons use different attribute inventories")
    inv = gold.inventory
    n = len(inv)
    words = gold.words
    G = gold.matrix(words) > 0 if words else np.zeros((0, n), dtype=bool)
    P = np.zeros_like(G)
    for row, w in enumerate(words):
        if w in predicted:
            P[row] = predicted[w] > 0
    tp = np.sum(G & P, axis=0)
    fp = np.sum(~G & P, axis=0)
    fn = np.sum(G & ~P, axis=0)
    per = {
        name: (int(tp[i]), int(fp[i]), int(fn[i])) for i, name in enumerate(inv.attributes)
    }
    return EvalReport(int(tp.sum()), int(fp.sum()), int(fn.sum()), per)


def exclude_seen(gold: Lexicon, seed: Lexicon, name: str = "gold") -> Lexicon:
    """Drop gold words that also occur in the seed lexicon, with a warning."""
    overlap = [w for w in gold if w in seed]
    if overlap:
        warnings.warn(
            f"dropping {len(overlap)} {name} words that occur in the seed lexicon", stacklevel=2
        )
        return gold.without(overlap)
    return gold


# --------------------------------------------------------------------------
# corpus baseline


@dataclass(frozen=True)
class BaselineConfig:
    k: int = 2

    def __post_init__(self):
        if not 2 <= self.k <= 20:
            raise ValueError(f"k must lie in [2, 20], got {self.k}")


def count_tagged_corpus(path) -> Counter:
    """``(word, attribute)`` occurrence counts from a ``word<TAB>ATTR ...`` token file."""
    counts: Counter = Counter()
    with open(path, encoding="utf-8", newline="\n") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.rstrip("\n")
            if not line or line.startswith("#"):
                continue
            parts = line.split("\t")
            if len(parts) != 2 or not parts[0]:
                raise LexiconFormatError("expected word<TAB>ATTR ...", path, lineno)
            for attr in parts[1].split():
                counts[(parts[0], attr)] += 1
    return counts


def baseline_from_counts(
    counts: Counter, cfg: BaselineConfig, inventory: AttributeInventory | None = None
) -> Lexicon:
    sets: dict[str, set[str]] = {}
    for (word, attr), c in sorted(counts.items()):
        if c >= cfg.k:
            sets.setdefault(word, set()).add(attr)
    if inventory is None:
        inventory = AttributeInventory.from_names(a for _, a in counts)
    return Lexicon.from_sets(sets, inventory)


def corpus_baseline(
    tagged_corpus, cfg: BaselineConfig, inventory: AttributeInventory | None = None
) -> Lexicon:
    """Keep a word's attribute when the pair was tagged at least ``cfg.k`` times."""
    return baseline_from_counts(count_tagged_corpus(tagged_corpus), cfg, inventory)


def tune_baseline(counts: Counter, dev_gold: Lexicon, ks: Iterable[int] = range(2, 21)):
    """Best ``k`` on the dev lexicon; the smallest ``k`` wins ties."""
    best = None
    for k in ks:
        pred = baseline_from_counts(counts, BaselineConfig(k), dev_gold.inventory)
        score = micro_f1(pred, dev_gold).micro_f1
        if best is None or score > best[1]:
            best = (k, score)
    return best


# --------------------------------------------------------------------------
# dev tuning


@dataclass(frozen=True)
class TuneSpace:
    feature_subsets: tuple[tuple[str, ...], ...]
    projection_choices: tuple[bool, ...] = (False, True)

    def __post_init__(self):
        subsets = tuple(tuple(s) for s in self.feature_subsets)
        object.__setattr__(self, "feature_subsets", subsets)
        object.__setattr__(self, "projection_choices", tuple(self.projection_choices))
        if not subsets or not self.projection_choices:
            raise ValueError("tuning space is empty")

    def configurations(self) -> list[tuple[tuple[str, ...], bool]]:
        """All configurations in tie-break order: fewer features, then projection off."""
        grid = list(itertools.product(self.feature_subsets, self.projection_choices))
        return sorted(grid, key=lambda c: (len(c[0]), c[1]))


@dataclass
class TuneResult:
    feature_subset: tuple[str, ...]
    projection: bool
    dev_f1: float
    scores: list[tuple[tuple[str, ...], bool, float]]


Pipeline = Callable[[tuple[str, ...], bool], Lexicon]


def tune(space: TuneSpace, dev_gold: Lexicon, pipeline: Pipeline, threads: int = 1) -> TuneResult:
    """Grid-evaluate ``pipeline(subset, projection)`` on the dev lexicon and keep the best."""
    if len(dev_gold) == 0:
        raise ValueError("dev lexicon is empty")
    configs = space.configurations()

    def score(cfg):
        subset, proj = cfg
        f1 = micro_f1(pipeline(subset, proj), dev_gold).micro_f1
        log.info("tune %s projection=%s dev F1 %.4f", ",".join(subset), proj, f1)
        return f1

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            f1s = list(pool.map(score, configs))
    else:
        f1s = [score(c) for c in configs]
    scores = [(s, p, f) for (s, p), f in zip(configs, f1s)]
    best = max(range(len(scores)), key=lambda k: (scores[k][2], -k))
    subset, proj, f1 = scores[best]
    return TuneResult(subset, proj, f1, scores)


# --------------------------------------------------------------------------
# diagnostics


def top_weights(model: WeightMatrix, attribute: str, n: int):
    """Highest ``n`` and lowest ``n`` weighted features for one attribute.

    Ties are broken by feature name in both lists.
    """
    row = model.row(attribute)
    pairs = [(f, float(w)) for f, w in zip(model.features, row.tolist())]
    if n <= 0:
        return [], []
    highest = sorted(pairs, key=lambda p: (-p[1], p[0]))[:n]
    lowest = sorted(pairs, key=lambda p: (p[1], p[0]))[:n]
    return highest, lowest


def seed_curve(
    full_seed: Lexicon,
    sizes: Sequence[int],
    rng_seed: int,
    pipeline: Callable[[Lexicon], Lexicon],
    test_gold: Lexicon,
) -> list[tuple[int, float]]:
    """Micro-F1 on ``test_gold`` for random seed subsets of each requested size."""
    for size in sizes:
        if not 0 <= size <= len(full_seed):
            raise ValueError(f"seed size {size} exceeds seed lexicon of {len(full_seed)} words")
    rng = np.random.default_rng(rng_seed)
    words = full_seed.words
    curve = []
    for size in sizes:
        picked = np.sort(rng.choice(len(words), size=size, replace=False))
        subset = full_seed.subset(words[k] for k in picked.tolist())
        f1 = micro_f1(pipeline(subset), test_gold).micro_f1
        log.info("seed size %d: micro-F1 %.4f", size, f1)
        curve.append((size, f1))
    return curve
