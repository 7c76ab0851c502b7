"""Micro-F1 against seed size on the synthetic suffix language.

Every point is one random seed subset drawn from the same 200-word seed, so
the curve shows how quickly the learned edge weights become useful.
"""

import argparse
import logging
import os
import tempfile

from lexigraph.evaluation import seed_curve
from lexigraph.pipeline import PipelineConfig, load_inputs, seed_pipeline
from lexigraph.synthetic import suffix_language


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--sizes", default="10,25,50,100,200")
    ap.add_argument("--repeats", type=int, default=3, help="sample seeds per size")
    ap.add_argument("--no-projection", action="store_true")
    args = ap.parse_args()
    logging.basicConfig(level=logging.WARNING)
    sizes = [int(s) for s in args.sizes.split(",")]

    with tempfile.TemporaryDirectory() as tmp:
        paths = suffix_language().write(os.path.join(tmp, "data"), max(sizes), 0)
        cfg = PipelineConfig(
            seed_lexicon=paths["seed_lexicon"],
            unlabeled_vocab=paths["unlabeled_vocab"],
            test_lexicon=paths["test_lexicon"],
            clusters=paths["clusters"],
            rules=paths["rules"],
            projection=not args.no_projection,
        )
        inputs = load_inputs(cfg)
        pipeline = seed_pipeline(cfg, inputs)
        print("size\t" + "\t".join(f"rep{r}" for r in range(args.repeats)))
        table = {s: [] for s in sizes}
        for rep in range(args.repeats):
            for size, f1 in seed_curve(inputs.seed, sizes, rep, pipeline, inputs.test):
                table[size].append(f1)
        for size in sizes:
            print(f"{size}\t" + "\t".join(f"{f:.4f}" for f in table[size]))


if __name__ == "__main__":
    main()
