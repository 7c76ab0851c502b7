"""Featurized word graph construction.

Three evidence sources produce edge candidates:

* word clusters: every pair of words in the same cluster, feature ``cluster:<id>``;
* shared affixes: 2- and 3-character suffixes/prefixes that occur on at least
  two seed words, features ``suffix:<s>`` and ``prefix:<p>``;
* morphological transformation rules read from a file, feature ``<rule>`` on
  ``source -> target`` and the inverted rule on ``target -> source``.

An edge ``w -> v`` carries the binary features phi(w, v) and is read when
estimating the attributes of ``w`` from ``v``.  For every (node, feature)
pair at most ``cap`` neighbors are kept.
"""

from __future__ import annotations

import logging
import zlib
from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

import numpy as np
import scipy.sparse as sp

log = logging.getLogger(__name__)

GRAPH_HEADER = "#lexigraph-graph v1"
FEATURE_KINDS = ("cluster", "suffix", "prefix", "morphtrans")
SYMMETRIC_KINDS = ("cluster", "suffix", "prefix")
NULL_AFFIX = "{null}"
DEFAULT_CAP = 100


class GraphError(ValueError):
    pass


# --------------------------------------------------------------------------
# transformation rules


def parse_rule(rule: str) -> tuple[str, str, str]:
    """Split ``kind:from:to`` into its parts; ``{null}`` stands for the empty affix."""
    parts = rule.split(":")
    if len(parts) != 3 or parts[0] not in ("suffix", "prefix"):
        raise GraphError(f"malformed transformation rule {rule!r}")
    kind, old, new = parts
    if not old or not new:
        raise GraphError(f"empty affix in rule {rule!r}; use {NULL_AFFIX}")
    return kind, old, new


def invert_rule(rule: str) -> str:
    kind, old, new = parse_rule(rule)
    return f"{kind}:{new}:{old}"


def apply_rule(rule: str, word: str) -> str | None:
    """Rewrite ``word`` with ``rule``; ``None`` if the rule does not match."""
    kind, old, new = parse_rule(rule)
    old = "" if old == NULL_AFFIX else old
    new = "" if new == NULL_AFFIX else new
    if kind == "suffix":
        if not word.endswith(old):
            return None
        return word[: len(word) - len(old)] + new
    if not word.startswith(old):
        return None
    return new + word[len(old):]


# --------------------------------------------------------------------------
# candidate providers


@dataclass
class EdgeCandidates:
    """Unsampled evidence from one provider.

    ``groups`` maps a symmetric feature to the words it links pairwise;
    ``rules`` lists oriented ``(source, target, rule)`` triples.
    """

    kind: str
    groups: dict[str, list[str]] = field(default_factory=dict)
    rules: list[tuple[str, str, str]] = field(default_factory=list)
    report: Counter = field(default_factory=Counter)


def read_cluster_file(path) -> list[tuple[str, str]]:
    pairs = []
    with open(path, encoding="utf-8", newline="\n") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.rstrip("\n")
            if not line or line.startswith("#"):
                continue
            parts = line.split("\t")
            if len(parts) != 2 or not parts[0] or not parts[1]:
                raise GraphError(f"{path}:{lineno}: expected word<TAB>clusterId")
            pairs.append((parts[0], parts[1]))
    return pairs


def read_rules_file(path) -> list[tuple[str, str, str]]:
    triples = []
    with open(path, encoding="utf-8", newline="\n") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.rstrip("\n")
            if not line or line.startswith("#"):
                continue
            parts = line.split("\t")
            if len(parts) != 3 or not all(parts):
                raise GraphError(f"{path}:{lineno}: expected source<TAB>target<TAB>rule")
            triples.append((parts[0], parts[1], parts[2]))
    return triples


def cluster_features(clusters, vocab: Iterable[str]) -> EdgeCandidates:
    """Group vocabulary words by cluster id.

    ``clusters`` is a path to a cluster file or an iterable of
    ``(word, cluster_id)`` pairs.  Words outside the vocabulary are dropped
    and counted; a word's first listed cluster wins.
    """
    if isinstance(clusters, (str, bytes)) or hasattr(clusters, "__fspath__"):
        clusters = read_cluster_file(clusters)
    vocab = set(vocab)
    out = EdgeCandidates("cluster")
    assigned: set[str] = set()
    for word, cid in clusters:
        if word not in vocab:
            out.report["oov"] += 1
            continue
        if word in assigned:
            out.report["duplicate"] += 1
            continue
        assigned.add(word)
        out.groups.setdefault(f"cluster:{cid}", []).append(word)
    return out


def _affixes(word: str, kind: str, nmin: int, nmax: int) -> list[str]:
    out = []
    for n in range(nmin, nmax + 1):
        if len(word) >= n:
            out.append(word[-n:] if kind == "suffix" else word[:n])
    return out


def affix_features(
    vocab: Iterable[str],
    seed_words: Iterable[str],
    kind: str = "suffix",
    nmin: int = 2,
    nmax: int = 3,
    min_seed_count: int = 2,
) -> EdgeCandidates:
    """Group words sharing a suffix (or prefix) that is frequent enough in the seed."""
    if kind not in ("suffix", "prefix"):
        raise GraphError(f"affix kind must be suffix or prefix, got {kind!r}")
    if not 1 <= nmin <= nmax:
        raise GraphError(f"bad affix length range [{nmin}, {nmax}]")
    seed_counts = Counter(a for w in set(seed_words) for a in _affixes(w, kind, nmin, nmax))
    admitted = {a for a, c in seed_counts.items() if c >= min_seed_count}
    out = EdgeCandidates(kind)
    out.report["admitted"] = len(admitted)
    out.report["rejected"] = len(seed_counts) - len(admitted)
    for word in sorted(set(vocab)):
        for affix in _affixes(word, kind, nmin, nmax):
            if affix in admitted:
                out.groups.setdefault(f"{kind}:{affix}", []).append(word)
    return out


def morphtrans_features(rules, vocab: Iterable[str]) -> EdgeCandidates:
    """Oriented transformation triples restricted to the vocabulary.

    ``rules`` is a path to a rules file or an iterable of
    ``(source, target, rule)`` triples.
    """
    if isinstance(rules, (str, bytes)) or hasattr(rules, "__fspath__"):
        rules = read_rules_file(rules)
    vocab = set(vocab)
    out = EdgeCandidates("morphtrans")
    for src, dst, rule in rules:
        if src not in vocab or dst not in vocab:
            out.report["oov"] += 1
            continue
        if src == dst:
            out.report["self_loop"] += 1
            continue
        try:
            parse_rule(rule)
        except GraphError:
            out.report["malformed"] += 1
            continue
        out.rules.append((src, dst, rule))
    return out


# --------------------------------------------------------------------------
# the graph


@dataclass(frozen=True)
class FeatureCatalog:
    names: tuple[str, ...]
    kinds: tuple[str, ...]

    def __post_init__(self):
        if len(self.names) != len(self.kinds):
            raise GraphError("catalog names and kinds differ in length")
        if len(set(self.names)) != len(self.names):
            raise GraphError("duplicate feature names in catalog")
        object.__setattr__(self, "_index", {n: j for j, n in enumerate(self.names)})

    def __len__(self) -> int:
        return len(self.names)

    def index(self, name: str) -> int:
        return self._index[name]  # type: ignore[attr-defined]

    def __contains__(self, name) -> bool:
        return name in self._index  # type: ignore[attr-defined]

    def kind_of(self, name: str) -> str:
        return self.kinds[self.index(name)]


class FeatureGraph:
    """Directed graph over word types with a binary feature row per edge.

    Edges are stored sorted by ``(node, neighbor)``.  ``phi`` is a CSR matrix
    of shape ``(n_edges, n_features)``.
    """

    def __init__(self, words, labeled, catalog: FeatureCatalog, node, neighbor, phi):
        self.words = tuple(words)
        self.index = {w: i for i, w in enumerate(self.words)}
        self.labeled = np.asarray(labeled, dtype=bool)
        self.catalog = catalog
        node = np.asarray(node, dtype=np.int64)
        neighbor = np.asarray(neighbor, dtype=np.int64)
        order = np.lexsort((neighbor, node))
        self.node = node[order]
        self.neighbor = neighbor[order]
        phi = sp.csr_matrix(phi, shape=(len(order), len(catalog)))
        self.phi = phi[order] if len(order) else phi
        self.phi.sort_indices()
        for arr in (self.labeled, self.node, self.neighbor):
            arr.setflags(write=False)
        if len(self.node):
            if np.any(self.node == self.neighbor):
                raise GraphError("self-loop in graph")
            keys = self.node * len(self.words) + self.neighbor
            if np.any(np.diff(keys) == 0):
                raise GraphError("duplicate ordered edge")
            if np.any(np.diff(self.phi.indptr) == 0):
                raise GraphError("edge without features")
        # CSR offsets into the edge arrays, one slot per node
        self.offsets = np.searchsorted(self.node, np.arange(len(self.words) + 1))

    @property
    def n_nodes(self) -> int:
        return len(self.words)

    @property
    def n_edges(self) -> int:
        return len(self.node)

    @property
    def n_features(self) -> int:
        return len(self.catalog)

    def edge_features(self, e: int) -> list[str]:
        cols = self.phi.indices[self.phi.indptr[e] : self.phi.indptr[e + 1]]
        return [self.catalog.names[j] for j in cols]

    def neighbors(self, word: str) -> list[tuple[str, list[str]]]:
        i = self.index[word]
        return [
            (self.words[self.neighbor[e]], self.edge_features(e))
            for e in range(self.offsets[i], self.offsets[i + 1])
        ]

    def has_edge(self, w: str, v: str, feature: str | None = None) -> bool:
        i, j = self.index[w], self.index[v]
        lo, hi = self.offsets[i], self.offsets[i + 1]
        k = lo + np.searchsorted(self.neighbor[lo:hi], j)
        if k >= hi or self.neighbor[k] != j:
            return False
        return feature is None or feature in self.edge_features(int(k))

    def edge_triples(self):
        """Yield ``(node_id, neighbor_id, feature_id)`` for every firing feature."""
        coo = self.phi.tocoo()
        return zip(self.node[coo.row].tolist(), self.neighbor[coo.row].tolist(), coo.col.tolist())

    def feature_degrees(self) -> Counter:
        """Neighbor count per ``(node_id, feature_id)``."""
        coo = self.phi.tocoo()
        return Counter(zip(self.node[coo.row].tolist(), coo.col.tolist()))

    def labeled_subgraph_mask(self) -> np.ndarray:
        """Edges whose two endpoints are both labeled."""
        return self.labeled[self.node] & self.labeled[self.neighbor]

    def with_labeled(self, labeled_words: Iterable[str]) -> "FeatureGraph":
        mask = np.zeros(self.n_nodes, dtype=bool)
        for w in labeled_words:
            if w in self.index:
                mask[self.index[w]] = True
        return FeatureGraph(self.words, mask, self.catalog, self.node, self.neighbor, self.phi)

    def stats(self) -> dict[str, int]:
        return {
            "labeled": int(self.labeled.sum()),
            "nodes": self.n_nodes,
            "edges": self.n_edges,
            "features": self.n_features,
        }

    def __repr__(self) -> str:
        return f"FeatureGraph({self.n_nodes} nodes, {self.n_edges} edges, {self.n_features} features)"


def _rng_for(seed: int, name: str) -> np.random.Generator:
    # one stream per feature so sampling does not depend on provider order
    return np.random.default_rng([seed, zlib.crc32(name.encode("utf-8"))])


def sample_group(n: int, cap: int, rng: np.random.Generator) -> tuple[np.ndarray, np.ndarray]:
    """Undirected pairs over ``range(n)`` with every vertex degree at most ``cap``.

    Small groups become cliques.  Larger groups are randomly permuted onto a
    ring; each vertex links to its ``cap // 2`` nearest ring neighbours on each
    side, plus one long chord when ``cap`` is odd, so the degree is exactly
    ``cap`` except for a single vertex when both ``n`` and ``cap`` are odd.
    """
    if n < 2 or cap <= 0:
        return np.empty(0, dtype=np.int64), np.empty(0, dtype=np.int64)
    if n <= cap + 1:
        a, b = np.triu_indices(n, k=1)
        return a.astype(np.int64), b.astype(np.int64)
    perm = rng.permutation(n)
    k = np.arange(n)
    left, right = [], []
    for d in range(1, cap // 2 + 1):
        left.append(perm[k])
        right.append(perm[(k + d) % n])
    if cap % 2:
        half = n // 2
        m = np.arange(half)
        left.append(perm[m])
        right.append(perm[m + half])
    return np.concatenate(left), np.concatenate(right)


def _sample_rules(rules, cap, seed, index):
    """Keep oriented rule pairs with both directions within the per-feature cap."""
    seen = set()
    unique = []
    for src, dst, rule in rules:
        inv = invert_rule(rule)
        key = min((src, dst, rule), (dst, src, inv))
        if key in seen:
            continue
        seen.add(key)
        unique.append((src, dst, rule, inv))
    rng = _rng_for(seed, "morphtrans")
    counts: Counter = Counter()
    kept = []
    for k in rng.permutation(len(unique)).tolist():
        src, dst, rule, inv = unique[k]
        if counts[(src, rule)] < cap and counts[(dst, inv)] < cap:
            counts[(src, rule)] += 1
            counts[(dst, inv)] += 1
            kept.append((src, dst, rule, inv))
    triples = []
    for src, dst, rule, inv in kept:
        triples.append((index[src], index[dst], rule))
        triples.append((index[dst], index[src], inv))
    return triples


def build_graph(
    vocab: Iterable[str],
    providers: Sequence[EdgeCandidates],
    cap: int = DEFAULT_CAP,
    seed: int = 0,
    labeled: Iterable[str] = (),
) -> FeatureGraph:
    """Merge provider candidates into a :class:`FeatureGraph`.

    The cap is applied per provider and per feature before merging; edges for
    the same ordered pair then share one feature row.
    """
    words = sorted(set(vocab))
    if not words:
        raise GraphError("empty vocabulary")
    if not providers:
        raise GraphError("no edge feature providers enabled")
    if cap < 1:
        raise GraphError(f"cap must be positive, got {cap}")
    index = {w: i for i, w in enumerate(words)}

    kinds: dict[str, str] = {}
    src_parts, dst_parts, feat_names = [], [], []
    rule_src, rule_dst, rule_names = [], [], []
    for prov in providers:
        if prov.kind not in FEATURE_KINDS:
            raise GraphError(f"unknown provider kind {prov.kind!r}")
        for feature in sorted(prov.groups):
            members = sorted({index[w] for w in prov.groups[feature] if w in index})
            a, b = sample_group(len(members), cap, _rng_for(seed, feature))
            if not len(a):
                continue
            members = np.asarray(members, dtype=np.int64)
            kinds.setdefault(feature, prov.kind)
            src_parts.append(np.concatenate([members[a], members[b]]))
            dst_parts.append(np.concatenate([members[b], members[a]]))
            feat_names.append((feature, 2 * len(a)))
        if prov.rules:
            triples = _sample_rules(
                [t for t in prov.rules if t[0] in index and t[1] in index], cap, seed, index
            )
            for s, d, rule in triples:
                kinds.setdefault(rule, prov.kind)
                rule_src.append(s)
                rule_dst.append(d)
                rule_names.append(rule)

    names = sorted(kinds)
    catalog = FeatureCatalog(tuple(names), tuple(kinds[n] for n in names))
    if not src_parts and not rule_src:
        empty = np.empty(0, dtype=np.int64)
        return FeatureGraph(
            words, _labeled_mask(words, labeled), catalog, empty, empty,
            sp.csr_matrix((0, len(catalog))),
        )
    src = np.concatenate(src_parts + [np.asarray(rule_src, dtype=np.int64)])
    dst = np.concatenate(dst_parts + [np.asarray(rule_dst, dtype=np.int64)])
    fcol = np.concatenate(
        [np.full(count, catalog.index(name), dtype=np.int64) for name, count in feat_names]
        + [np.array([catalog.index(r) for r in rule_names], dtype=np.int64)]
    )
    keys = src * len(words) + dst
    uniq, edge_id = np.unique(keys, return_inverse=True)
    phi = sp.coo_matrix(
        (np.ones(len(keys)), (edge_id, fcol)), shape=(len(uniq), len(catalog))
    ).tocsr()
    phi.data[:] = 1.0
    node = uniq // len(words)
    neighbor = uniq % len(words)
    return FeatureGraph(words, _labeled_mask(words, labeled), catalog, node, neighbor, phi)


def _labeled_mask(words, labeled) -> np.ndarray:
    labeled = set(labeled)
    return np.array([w in labeled for w in words], dtype=bool)


# --------------------------------------------------------------------------
# dump format


def _esc(name: str) -> str:
    return name.replace("%", "%25").replace(",", "%2C")


def _unesc(name: str) -> str:
    return name.replace("%2C", ",").replace("%25", "%")


def format_graph(graph: FeatureGraph) -> str:
    lines = [GRAPH_HEADER, "#nodes"]
    for w, lab in zip(graph.words, graph.labeled.tolist()):
        lines.append(f"{w}\t{'labeled' if lab else 'unlabeled'}")
    lines.append("#features")
    for name, kind in zip(graph.catalog.names, graph.catalog.kinds):
        lines.append(f"{name}\t{kind}")
    lines.append("#edges")
    indptr, indices = graph.phi.indptr, graph.phi.indices
    names = graph.catalog.names
    for e in range(graph.n_edges):
        feats = ",".join(_esc(names[j]) for j in indices[indptr[e] : indptr[e + 1]])
        lines.append(f"{graph.words[graph.node[e]]}\t{graph.words[graph.neighbor[e]]}\t{feats}")
    return "\n".join(lines) + "\n"


def save_graph(graph: FeatureGraph, path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(format_graph(graph))


def load_graph(path) -> FeatureGraph:
    with open(path, encoding="utf-8", newline="\n") as fh:
        lines = [line.rstrip("\n") for line in fh]
    if not lines or lines[0] != GRAPH_HEADER:
        raise GraphError(f"{path}: not a graph dump (expected {GRAPH_HEADER!r})")
    section = None
    words, labeled, fnames, fkinds, edges = [], [], [], [], []
    for lineno, line in enumerate(lines[1:], start=2):
        if line in ("#nodes", "#features", "#edges"):
            section = line[1:]
            continue
        if not line:
            continue
        parts = line.split("\t")
        if section == "nodes" and len(parts) == 2:
            words.append(parts[0])
            labeled.append(parts[1] == "labeled")
        elif section == "features" and len(parts) == 2:
            fnames.append(parts[0])
            fkinds.append(parts[1])
        elif section == "edges" and len(parts) == 3:
            edges.append(parts)
        else:
            raise GraphError(f"{path}:{lineno}: unexpected line")
    catalog = FeatureCatalog(tuple(fnames), tuple(fkinds))
    index = {w: i for i, w in enumerate(words)}
    node, neighbor, rows, cols = [], [], [], []
    for e, (w, v, feats) in enumerate(edges):
        node.append(index[w])
        neighbor.append(index[v])
        for f in feats.split(","):
            rows.append(e)
            cols.append(catalog.index(_unesc(f)))
    phi = sp.csr_matrix(
        (np.ones(len(rows)), (rows, cols)), shape=(len(edges), len(catalog))
    )
    return FeatureGraph(words, labeled, catalog, node, neighbor, phi)


def graph_from_edges(
    words: Sequence[str],
    edges: Mapping[tuple[str, str], Iterable[str]],
    labeled: Iterable[str] = (),
    features: Sequence[str] | None = None,
) -> FeatureGraph:
    """Build a graph directly from ``{(w, v): features}``; handy for small fixtures."""
    words = list(words)
    index = {w: i for i, w in enumerate(words)}
    if features is None:
        features = sorted({f for fs in edges.values() for f in fs})
    kinds = tuple(_guess_kind(f) for f in features)
    catalog = FeatureCatalog(tuple(features), kinds)
    node, neighbor, rows, cols = [], [], [], []
    for e, ((w, v), fs) in enumerate(edges.items()):
        node.append(index[w])
        neighbor.append(index[v])
        for f in fs:
            rows.append(e)
            cols.append(catalog.index(f))
    phi = sp.csr_matrix((np.ones(len(rows)), (rows, cols)), shape=(len(edges), len(catalog)))
    labeled = set(labeled)
    return FeatureGraph(words, [w in labeled for w in words], catalog, node, neighbor, phi)


def _guess_kind(name: str) -> str:
    head = name.split(":", 1)[0]
    if head == "cluster":
        return "cluster"
    if head in ("suffix", "prefix"):
        return "morphtrans" if name.count(":") == 2 else head
    return "morphtrans"
