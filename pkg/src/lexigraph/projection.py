"""Snap propagated attribute vectors onto the nearest observed paradigm."""

from __future__ import annotations

import numpy as np

from .lexicon import Lexicon, ParadigmSet


class EmptyParadigmSetError(ValueError):
    pass


def _check(paradigms: ParadigmSet) -> np.ndarray:
    if len(paradigms) == 0:
        raise EmptyParadigmSetError("cannot project onto an empty paradigm set")
    return paradigms.paradigms


def nearest_paradigms(vectors: np.ndarray, paradigms: ParadigmSet, chunk: int = 4096) -> np.ndarray:
    """Row index into ``paradigms`` of the closest paradigm for each vector.

    Squared Euclidean distance; ties go to the lowest row, i.e. the
    lexicographically smallest paradigm.
    """
    P = _check(paradigms)
    vectors = np.atleast_2d(np.asarray(vectors, dtype=float))
    if vectors.shape[1] != P.shape[1]:
        raise ValueError(f"vectors have {vectors.shape[1]} attributes, paradigms have {P.shape[1]}")
    out = np.empty(len(vectors), dtype=np.int64)
    for lo in range(0, len(vectors), chunk):
        block = vectors[lo : lo + chunk]
        diff = block[:, None, :] - P[None, :, :]
        out[lo : lo + chunk] = np.argmin(np.sum(diff * diff, axis=2), axis=1)
    return out


def project(vector, paradigms: ParadigmSet) -> np.ndarray:
    """The paradigm closest to ``vector``."""
    k = nearest_paradigms(np.asarray(vector, dtype=float)[None, :], paradigms)[0]
    return paradigms.paradigms[k].copy()


def project_lexicon(
    propagated: Lexicon, paradigms: ParadigmSet, skip_unlabeled: bool = True
) -> Lexicon:
    """Project every vector of ``propagated``.

    With ``skip_unlabeled``, all-zero vectors (nodes propagation never
    reached) are dropped instead of being forced onto a paradigm.
    """
    if propagated.inventory.attributes != paradigms.inventory.attributes:
        raise ValueError("propagated lexicon and paradigm set use different inventories")
    words = [w for w, v in propagated.items() if not (skip_unlabeled and not np.any(v))]
    if not words:
        return Lexicon({}, propagated.inventory)
    _check(paradigms)
    idx = nearest_paradigms(propagated.matrix(words), paradigms)
    P = paradigms.paradigms
    return Lexicon({w: P[k] for w, k in zip(words, idx.tolist())}, propagated.inventory)
