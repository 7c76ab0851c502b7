"""Expand a seed morpho-syntactic lexicon by learned label propagation over a word graph."""

from .evaluation import EvalReport, micro_f1, top_weights
from .graph import FeatureGraph, build_graph
from .lexicon import (
    AttributeInventory,
    Lexicon,
    ParadigmSet,
    WeightMatrix,
    load_lexicon,
    save_lexicon,
    to_attribute_set,
)
from .projection import project, project_lexicon
from .propagation import PropagationConfig, TrainConfig, propagate, train

__version__ = "0.1.0"
