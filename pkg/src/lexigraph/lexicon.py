"""Attribute inventories, lexicons, paradigm sets and weight matrices.

A lexicon maps word types to dense attribute vectors in ``[-1, 1]``.  Gold
vectors use ``+1`` for a present attribute and ``-1`` for an absent one.

File formats
------------
Lexicon file, UTF-8, LF line endings::

    #attributes<TAB>Num:Plur Num:Sing POS:Noun
    cats<TAB>Num:Plur POS:Noun

``#`` lines are comments.  The optional ``#attributes`` comment pins the
inventory order.  A third column with ``ATTR=score`` tokens carries raw
propagation scores; when present, it defines the vector and the attribute
column may be empty.

Model file::

    #lexigraph-model v1
    #attributes<TAB>A1<TAB>A2
    #features<TAB>f1<TAB>f2
    A1<TAB>f1<TAB>-0.25
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Mapping

import numpy as np

MODEL_HEADER = "#lexigraph-model v1"
ATTRIBUTES_TAG = "#attributes"
FEATURES_TAG = "#features"


class LexiconFormatError(ValueError):
    """A lexicon-like file could not be parsed."""

    def __init__(self, message: str, path=None, lineno: int | None = None):
        where = ""
        if path is not None:
            where = f"{path}:"
        if lineno is not None:
            where += f"{lineno}:"
        super().__init__(f"{where} {message}" if where else message)
        self.path = path
        self.lineno = lineno


class InventoryError(ValueError):
    """An attribute name is not part of the fixed inventory."""


class ModelFormatError(ValueError):
    """A model file is malformed or has the wrong version stamp."""


def _freeze(array: np.ndarray) -> np.ndarray:
    array.setflags(write=False)
    return array


@dataclass(frozen=True)
class AttributeInventory:
    """Ordered, duplicate-free list of ``Category:Value`` attribute names."""

    attributes: tuple[str, ...] = ()
    index: Mapping[str, int] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        attributes = tuple(self.attributes)
        object.__setattr__(self, "attributes", attributes)
        index = {}
        for i, name in enumerate(attributes):
            if not name or any(c.isspace() for c in name):
                raise InventoryError(f"invalid attribute name {name!r}")
            if name in index:
                raise InventoryError(f"duplicate attribute {name!r}")
            index[name] = i
        object.__setattr__(self, "index", index)

    @classmethod
    def from_names(cls, names: Iterable[str]) -> "AttributeInventory":
        """Build a lexicographically sorted inventory from any name collection."""
        return cls(tuple(sorted(set(names))))

    def __len__(self) -> int:
        return len(self.attributes)

    def __iter__(self) -> Iterator[str]:
        return iter(self.attributes)

    def __contains__(self, name) -> bool:
        return name in self.index

    def index_of(self, name: str) -> int:
        try:
            return self.index[name]
        except KeyError:
            raise InventoryError(f"unknown attribute {name!r}") from None

    def encode(self, names: Iterable[str]) -> np.ndarray:
        """Gold vector: +1 for each listed attribute, -1 elsewhere."""
        vec = -np.ones(len(self), dtype=float)
        for name in names:
            vec[self.index_of(name)] = 1.0
        return vec


def to_attribute_set(vector, inventory: AttributeInventory) -> set[str]:
    """Attributes whose component is strictly positive."""
    vector = np.asarray(vector, dtype=float)
    if vector.shape != (len(inventory),):
        raise ValueError(
            f"vector of length {vector.shape} does not match inventory of size {len(inventory)}"
        )
    return {inventory.attributes[i] for i in np.flatnonzero(vector > 0)}


class Lexicon:
    """Immutable mapping from word to attribute vector.

    Entry order is preserved as given; vectors are read-only float arrays.
    """

    def __init__(self, entries: Mapping[str, np.ndarray], inventory: AttributeInventory):
        self.inventory = inventory
        n = len(inventory)
        frozen = {}
        for word, vec in entries.items():
            if not word:
                raise ValueError("empty word")
            arr = np.array(vec, dtype=float)
            if arr.shape != (n,):
                raise ValueError(f"vector for {word!r} has shape {arr.shape}, expected ({n},)")
            if np.any(np.abs(arr) > 1.0) or np.any(np.isnan(arr)):
                raise ValueError(f"vector for {word!r} leaves [-1, 1]")
            frozen[word] = _freeze(arr)
        self._entries = frozen

    @classmethod
    def from_sets(
        cls, sets: Mapping[str, Iterable[str]], inventory: AttributeInventory | None = None
    ) -> "Lexicon":
        if inventory is None:
            inventory = AttributeInventory.from_names(a for attrs in sets.values() for a in attrs)
        return cls({w: inventory.encode(attrs) for w, attrs in sets.items()}, inventory)

    @classmethod
    def empty(cls, inventory: AttributeInventory | None = None) -> "Lexicon":
        return cls({}, inventory or AttributeInventory())

    def __len__(self) -> int:
        return len(self._entries)

    def __contains__(self, word) -> bool:
        return word in self._entries

    def __getitem__(self, word: str) -> np.ndarray:
        return self._entries[word]

    def __iter__(self) -> Iterator[str]:
        return iter(self._entries)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Lexicon):
            return NotImplemented
        return (
            self.inventory.attributes == other.inventory.attributes
            and list(self._entries) == list(other._entries)
            and all(np.array_equal(v, other._entries[w]) for w, v in self._entries.items())
        )

    def __repr__(self) -> str:
        return f"Lexicon({len(self)} words, {len(self.inventory)} attributes)"

    def items(self):
        return self._entries.items()

    @property
    def words(self) -> list[str]:
        return list(self._entries)

    def attribute_set(self, word: str) -> set[str]:
        return to_attribute_set(self._entries[word], self.inventory)

    def as_sets(self) -> dict[str, set[str]]:
        return {w: to_attribute_set(v, self.inventory) for w, v in self._entries.items()}

    def matrix(self, words: Iterable[str] | None = None) -> np.ndarray:
        words = self.words if words is None else list(words)
        if not words:
            return np.zeros((0, len(self.inventory)))
        return np.stack([self._entries[w] for w in words])

    def is_gold(self) -> bool:
        return all(np.all(np.abs(v) == 1.0) for v in self._entries.values())

    def subset(self, words: Iterable[str]) -> "Lexicon":
        """Restrict to the given words, keeping this lexicon's entry order."""
        keep = set(words)
        return Lexicon({w: v for w, v in self._entries.items() if w in keep}, self.inventory)

    def without(self, words: Iterable[str]) -> "Lexicon":
        drop = set(words)
        return Lexicon({w: v for w, v in self._entries.items() if w not in drop}, self.inventory)

    def with_inventory(self, inventory: AttributeInventory) -> "Lexicon":
        """Re-encode gold entries under a superset inventory (new attributes absent)."""
        for name in self.inventory:
            inventory.index_of(name)
        out = {}
        for w, v in self._entries.items():
            new = -np.ones(len(inventory))
            for i, name in enumerate(self.inventory):
                new[inventory.index[name]] = v[i]
            out[w] = new
        return Lexicon(out, inventory)


def load_lexicon(path, inventory: AttributeInventory | None = None) -> Lexicon:
    """Read a lexicon file.

    Without ``inventory``, the ``#attributes`` comment fixes the order if
    present; otherwise the encountered attributes are sorted.  Repeated word
    lines are merged by taking the union of their attribute sets.
    """
    sets: dict[str, set[str]] = {}
    scores: dict[str, dict[str, float]] = {}
    header: list[str] | None = None
    with open(path, encoding="utf-8", newline="\n") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.rstrip("\n")
            if not line:
                continue
            if line.startswith("#"):
                if line.startswith(ATTRIBUTES_TAG + "\t") and header is None:
                    header = line.split("\t", 1)[1].split()
                continue
            parts = line.split("\t")
            if len(parts) < 2:
                raise LexiconFormatError("missing tab separator", path, lineno)
            if len(parts) > 3:
                raise LexiconFormatError("too many columns", path, lineno)
            word, attrs = parts[0], parts[1].split()
            if not word:
                raise LexiconFormatError("empty word", path, lineno)
            if len(parts) == 3:
                if word in sets:
                    raise LexiconFormatError(f"duplicate scored entry {word!r}", path, lineno)
                scores[word] = _parse_scores(parts[2], path, lineno)
            elif not attrs:
                raise LexiconFormatError("empty attribute list", path, lineno)
            elif word in scores:
                raise LexiconFormatError(f"duplicate scored entry {word!r}", path, lineno)
            sets.setdefault(word, set()).update(attrs)

    if inventory is None:
        if header is not None:
            inventory = AttributeInventory(tuple(header))
        else:
            seen = {a for attrs in sets.values() for a in attrs}
            seen.update(a for row in scores.values() for a in row)
            inventory = AttributeInventory.from_names(seen)

    entries = {}
    for word, attrs in sets.items():
        if word in scores:
            vec = np.zeros(len(inventory))
            for name, value in scores[word].items():
                vec[inventory.index_of(name)] = value
            for name in attrs:
                inventory.index_of(name)
        else:
            vec = inventory.encode(attrs)
        entries[word] = vec
    return Lexicon(entries, inventory)


def _parse_scores(column: str, path, lineno: int) -> dict[str, float]:
    out = {}
    for token in column.split():
        name, sep, value = token.rpartition("=")
        if not sep or not name:
            raise LexiconFormatError(f"bad score token {token!r}", path, lineno)
        try:
            score = float(value)
        except ValueError:
            raise LexiconFormatError(f"bad score value {value!r}", path, lineno) from None
        if not -1.0 <= score <= 1.0:
            raise LexiconFormatError(f"score {score} outside [-1, 1]", path, lineno)
        out[name] = score
    return out


def format_lexicon(lexicon: Lexicon, scores: bool = False) -> str:
    inv = lexicon.inventory
    lines = [ATTRIBUTES_TAG + "\t" + " ".join(inv.attributes)]
    for word, vec in lexicon.items():
        attrs = " ".join(inv.attributes[i] for i in np.flatnonzero(vec > 0))
        if scores:
            raw = " ".join(f"{name}={float(v)!r}" for name, v in zip(inv.attributes, vec))
            lines.append(f"{word}\t{attrs}\t{raw}")
        elif attrs:
            lines.append(f"{word}\t{attrs}")
    return "\n".join(lines) + "\n"


def save_lexicon(lexicon: Lexicon, path, scores: bool = False) -> None:
    """Write a lexicon file.

    Without ``scores`` only thresholded sets are written, so words with no
    positive attribute are left out (they stay unlabeled).
    """
    _write_text(path, format_lexicon(lexicon, scores=scores))


def _write_text(path, text: str) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)


@dataclass(frozen=True, eq=False)
class ParadigmSet:
    """Distinct gold attribute vectors observed in a seed lexicon.

    Rows are kept in lexicographic order (``-1 < +1``, inventory column
    order), which is also the tie-break order for projection.
    """

    paradigms: np.ndarray
    inventory: AttributeInventory
    provenance: str = ""

    @classmethod
    def from_lexicon(cls, lexicon: Lexicon, provenance: str = "") -> "ParadigmSet":
        if not lexicon.is_gold():
            raise ValueError("paradigms can only be collected from a {-1,+1} lexicon")
        rows = sorted({tuple(v.tolist()) for _, v in lexicon.items()})
        arr = np.array(rows, dtype=float).reshape(len(rows), len(lexicon.inventory))
        return cls(_freeze(arr), lexicon.inventory, provenance)

    def __len__(self) -> int:
        return self.paradigms.shape[0]

    def __iter__(self):
        return iter(self.paradigms)


class WeightMatrix:
    """Per-attribute edge-feature weights, shape ``(|A|, |F|)``."""

    def __init__(self, weights, features: Iterable[str], inventory: AttributeInventory):
        self.features = tuple(features)
        self.inventory = inventory
        self.feature_index = {f: j for j, f in enumerate(self.features)}
        if len(self.feature_index) != len(self.features):
            raise ValueError("duplicate feature names")
        w = np.array(weights, dtype=float).reshape(len(inventory), len(self.features))
        self.weights = _freeze(w)

    @classmethod
    def zeros(cls, features: Iterable[str], inventory: AttributeInventory) -> "WeightMatrix":
        features = tuple(features)
        return cls(np.zeros((len(inventory), len(features))), features, inventory)

    @property
    def shape(self) -> tuple[int, int]:
        return self.weights.shape

    def row(self, attribute: str) -> np.ndarray:
        return self.weights[self.inventory.index_of(attribute)]

    def weight(self, attribute: str, feature: str) -> float:
        return float(self.weights[self.inventory.index_of(attribute), self.feature_index[feature]])

    def __eq__(self, other) -> bool:
        if not isinstance(other, WeightMatrix):
            return NotImplemented
        return (
            self.features == other.features
            and self.inventory.attributes == other.inventory.attributes
            and np.array_equal(self.weights, other.weights)
        )

    def __repr__(self) -> str:
        return f"WeightMatrix({len(self.inventory)} attributes x {len(self.features)} features)"


def format_model(model: WeightMatrix) -> str:
    lines = [
        MODEL_HEADER,
        "\t".join((ATTRIBUTES_TAG,) + model.inventory.attributes),
        "\t".join((FEATURES_TAG,) + model.features),
    ]
    w = model.weights
    # zeros are implied; -0.0 is kept so reloads are bit-identical
    rows, cols = np.nonzero((w != 0) | np.signbit(w))
    for i, j in zip(rows.tolist(), cols.tolist()):
        lines.append(f"{model.inventory.attributes[i]}\t{model.features[j]}\t{float(w[i, j])!r}")
    return "\n".join(lines) + "\n"


def save_model(model: WeightMatrix, path) -> None:
    _write_text(path, format_model(model))


def load_model(path, features: Iterable[str] | None = None) -> WeightMatrix:
    """Read a model file.

    If ``features`` is given, every feature column in the file must belong to
    it; the returned matrix still uses the file's own column order.
    """
    allowed = None if features is None else set(features)
    with open(path, encoding="utf-8", newline="\n") as fh:
        lines = [line.rstrip("\n") for line in fh]
    if not lines or lines[0] != MODEL_HEADER:
        found = lines[0] if lines else "<empty file>"
        raise ModelFormatError(f"{path}: expected header {MODEL_HEADER!r}, found {found!r}")
    attributes: tuple[str, ...] | None = None
    feature_names: tuple[str, ...] | None = None
    body = []
    for lineno, line in enumerate(lines[1:], start=2):
        if line.startswith(ATTRIBUTES_TAG):
            attributes = tuple(line.split("\t")[1:])
        elif line.startswith(FEATURES_TAG):
            feature_names = tuple(line.split("\t")[1:])
        elif line and not line.startswith("#"):
            body.append((lineno, line))
    if attributes is None or feature_names is None:
        raise ModelFormatError(f"{path}: missing attribute or feature declaration")
    if attributes == ("",):
        attributes = ()
    if feature_names == ("",):
        feature_names = ()
    if allowed is not None:
        for name in feature_names:
            if name not in allowed:
                raise ModelFormatError(f"{path}: unknown feature {name!r}")

    inventory = AttributeInventory(attributes)
    fidx = {f: j for j, f in enumerate(feature_names)}
    weights = np.zeros((len(attributes), len(feature_names)))
    for lineno, line in body:
        parts = line.split("\t")
        if len(parts) != 3:
            raise ModelFormatError(f"{path}:{lineno}: expected 3 tab-separated fields")
        attr, feat, value = parts
        if attr not in inventory:
            raise ModelFormatError(f"{path}:{lineno}: unknown attribute {attr!r}")
        if feat not in fidx:
            raise ModelFormatError(f"{path}:{lineno}: unknown feature {feat!r}")
        try:
            weights[inventory.index[attr], fidx[feat]] = float(value)
        except ValueError:
            raise ModelFormatError(f"{path}:{lineno}: bad weight {value!r}") from None
    return WeightMatrix(weights, feature_names, inventory)


def read_word_list(path) -> list[str]:
    """One word per line; blank and ``#`` lines are skipped."""
    words = []
    with open(path, encoding="utf-8", newline="\n") as fh:
        for line in fh:
            word = line.rstrip("\n")
            if word and not word.startswith("#"):
                words.append(word)
    return words


def ensure_dir(path) -> str:
    os.makedirs(path, exist_ok=True)
    return str(path)
