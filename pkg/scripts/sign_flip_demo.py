"""Show a suffix rewrite learning a negative weight for the attribute it changes.

played/talked carry Tense:Past, playing/talking do not; walked/walking are
unlabeled.  The rule suffix:ed:ing should end up with a strongly negative
Tense:Past weight, so walking receives the opposite sign of walked.
"""

from lexigraph.evaluation import top_weights
from lexigraph.graph import build_graph, cluster_features, morphtrans_features
from lexigraph.lexicon import AttributeInventory, Lexicon
from lexigraph.propagation import propagate, train


def main():
    vocab = ["played", "playing", "talked", "talking", "walked", "walking"]
    clusters = [("played", "7"), ("talked", "7"), ("walked", "7")]
    rules = [(f"{s}ed", f"{s}ing", "suffix:ed:ing") for s in ("play", "talk", "walk")]
    seed = Lexicon.from_sets(
        {
            "played": {"POS:Verb", "Tense:Past"},
            "talked": {"POS:Verb", "Tense:Past"},
            "playing": {"POS:Verb"},
            "talking": {"POS:Verb"},
        },
        AttributeInventory(("POS:Verb", "Tense:Past")),
    )
    graph = build_graph(
        vocab, [cluster_features(clusters, vocab), morphtrans_features(rules, vocab)], labeled=seed.words
    )
    model = train(graph, seed)
    for attr in seed.inventory:
        high, low = top_weights(model, attr, 3)
        print(f"{attr}")
        print("  highest: " + ", ".join(f"{f}={w:+.3f}" for f, w in high))
        print("  lowest:  " + ", ".join(f"{f}={w:+.3f}" for f, w in low))
    result = propagate(graph, model, seed)
    print(f"propagation: {result.sweeps} sweeps")
    for word, vec in result.lexicon.items():
        scores = " ".join(f"{a}={x:+.3f}" for a, x in zip(seed.inventory, vec))
        print(f"  {word}\t{scores}\t-> {sorted(result.lexicon.attribute_set(word))}")


if __name__ == "__main__":
    main()
