"""Artificial languages with known morphology for end-to-end checks.

:func:`suffix_language` builds an agglutinative toy language: every word is
``prefix + stem + suffix``.  The stem is the lemma and fixes the part of
speech; the derivational prefix carries no attributes; the inflectional
suffix encodes number plus case (nouns) or tense (verbs).  Cluster ids follow
the lemma and transformation rules rewrite one suffix into another.
"""

from __future__ import annotations

import itertools
import os
from dataclasses import dataclass

import numpy as np

from .lexicon import AttributeInventory, Lexicon, save_lexicon

CONSONANTS = "bcdfghjklmnprstvz"
VOWELS = "aeiou"

NOUN_SUFFIXES = {
    ("Sing", "Nom"): "on", ("Sing", "Acc"): "om", ("Sing", "Gen"): "os",
    ("Sing", "Dat"): "od", ("Sing", "Loc"): "ol",
    ("Plur", "Nom"): "en", ("Plur", "Acc"): "em", ("Plur", "Gen"): "es",
    ("Plur", "Dat"): "ed", ("Plur", "Loc"): "el",
}
VERB_SUFFIXES = {
    ("Sing", "Past"): "ik", ("Sing", "Pres"): "ip", ("Sing", "Fut"): "it",
    ("Sing", "Cond"): "ig", ("Sing", "Imp"): "ib",
    ("Plur", "Past"): "uk", ("Plur", "Pres"): "up", ("Plur", "Fut"): "ut",
    ("Plur", "Cond"): "ug", ("Plur", "Imp"): "ub",
}


@dataclass
class SyntheticLanguage:
    lexicon: Lexicon
    clusters: list[tuple[str, str]]
    rules: list[tuple[str, str, str]]

    @property
    def words(self) -> list[str]:
        return self.lexicon.words

    def split(self, seed_size: int, rng_seed: int = 0) -> tuple[Lexicon, Lexicon]:
        """Random ``(seed, held_out)`` partition of the gold lexicon."""
        rng = np.random.default_rng(rng_seed)
        words = self.lexicon.words
        picked = set(rng.choice(len(words), size=seed_size, replace=False).tolist())
        seed = [w for k, w in enumerate(words) if k in picked]
        rest = [w for k, w in enumerate(words) if k not in picked]
        return self.lexicon.subset(seed), self.lexicon.subset(rest)

    def write(self, directory, seed_size: int, rng_seed: int = 0) -> dict[str, str]:
        """Write seed, held-out, vocabulary, cluster and rule files; return their paths."""
        os.makedirs(directory, exist_ok=True)
        seed, held = self.split(seed_size, rng_seed)
        paths = {
            "seed_lexicon": os.path.join(directory, "seed.lex"),
            "test_lexicon": os.path.join(directory, "test.lex"),
            "unlabeled_vocab": os.path.join(directory, "unlabeled.txt"),
            "clusters": os.path.join(directory, "clusters.tsv"),
            "rules": os.path.join(directory, "rules.tsv"),
        }
        save_lexicon(seed, paths["seed_lexicon"])
        save_lexicon(held, paths["test_lexicon"])
        _write_lines(paths["unlabeled_vocab"], held.words)
        _write_lines(paths["clusters"], [f"{w}\t{c}" for w, c in self.clusters])
        _write_lines(paths["rules"], [f"{s}\t{t}\t{r}" for s, t, r in self.rules])
        return paths


def _write_lines(path, lines) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for line in lines:
            fh.write(line + "\n")


def _syllables(rng, n_syllables: int) -> str:
    return "".join(rng.choice(list(CONSONANTS)) + rng.choice(list(VOWELS)) for _ in range(n_syllables))


def _unique_strings(rng, count: int, make) -> list[str]:
    out: list[str] = []
    while len(out) < count:
        s = make()
        if s not in out:
            out.append(s)
    return out


def suffix_rule(a: str, b: str) -> str:
    """``suffix:x:y`` rule turning ``a`` into ``b`` after stripping their common prefix."""
    k = 0
    while k < min(len(a), len(b)) and a[k] == b[k]:
        k += 1
    return f"suffix:{a[k:] or '{null}'}:{b[k:] or '{null}'}"


def suffix_language(n_lemmas: int = 20, n_prefixes: int = 10, rng_seed: int = 0) -> SyntheticLanguage:
    """``n_lemmas * n_prefixes * 10`` words (2,000 with the defaults)."""
    rng = np.random.default_rng(rng_seed)
    stems = _unique_strings(rng, n_lemmas, lambda: _syllables(rng, 2) + rng.choice(list(CONSONANTS)))
    prefixes = _unique_strings(
        rng, n_prefixes, lambda: rng.choice(list(VOWELS)) + rng.choice(list(CONSONANTS)) + rng.choice(list(VOWELS))
    )
    sets: dict[str, set[str]] = {}
    clusters = []
    rules = []
    for li, stem in enumerate(stems):
        is_noun = li % 2 == 0
        table = NOUN_SUFFIXES if is_noun else VERB_SUFFIXES
        second = "Case" if is_noun else "Tense"
        for prefix in prefixes:
            forms = []
            for (num, val), suffix in table.items():
                word = prefix + stem + suffix
                sets[word] = {"POS:" + ("Noun" if is_noun else "Verb"), "Num:" + num, f"{second}:{val}"}
                clusters.append((word, str(li)))
                forms.append(word)
            for a, b in itertools.permutations(forms, 2):
                rules.append((a, b, suffix_rule(a, b)))
    inventory = AttributeInventory.from_names(a for s in sets.values() for a in s)
    return SyntheticLanguage(Lexicon.from_sets(sets, inventory), clusters, rules)


def cluster_language(
    n_clusters: int = 8, words_per_cluster: int = 25, rng_seed: int = 0
) -> SyntheticLanguage:
    """Words whose attributes follow their cluster; spellings are random.

    Affixes carry no signal here, so cluster features alone are informative.
    """
    rng = np.random.default_rng(rng_seed)
    classes = [("POS:Noun", "Num:Sing"), ("POS:Noun", "Num:Plur"), ("POS:Verb", "Num:Sing"), ("POS:Verb", "Num:Plur")]
    total = n_clusters * words_per_cluster
    words = _unique_strings(rng, total, lambda: _syllables(rng, 3))
    sets = {}
    clusters = []
    for k, word in enumerate(words):
        c = k % n_clusters
        sets[word] = set(classes[c % len(classes)])
        clusters.append((word, str(c)))
    inventory = AttributeInventory.from_names(a for s in sets.values() for a in s)
    return SyntheticLanguage(Lexicon.from_sets(sets, inventory), clusters, [])


def tagged_corpus(lexicon: Lexicon, n_tokens: int, noise: float = 0.1, rng_seed: int = 0) -> list[str]:
    """Token lines ``word<TAB>ATTR ...`` sampled from a gold lexicon.

    With probability ``noise`` a token carries one extra random attribute, the
    kind of tagger error the count threshold is meant to absorb.
    """
    rng = np.random.default_rng(rng_seed)
    words = lexicon.words
    names = lexicon.inventory.attributes
    lines = []
    for _ in range(n_tokens):
        w = words[int(rng.integers(len(words)))]
        attrs = sorted(lexicon.attribute_set(w))
        if names and rng.random() < noise:
            extra = names[int(rng.integers(len(names)))]
            if extra not in attrs:
                attrs.append(extra)
        lines.append(f"{w}\t{' '.join(attrs)}")
    return lines
