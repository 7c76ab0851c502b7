"""Reference implementations kept independent of the package code paths.

They work on plain Python containers and loops so that a bug in the
vectorized code cannot be mirrored here.
"""

import math


def naive_estimates(words, edges, theta, state, labeled_only=None):
    """a_hat for every word by direct summation.

    ``edges`` maps ``(w, v)`` to a list of feature indices, ``theta`` is a
    list of rows, ``state`` maps word -> list of values.
    """
    n_attr = len(theta)
    out = {}
    for w in words:
        z = [0.0] * n_attr
        for (a, v), feats in edges.items():
            if a != w:
                continue
            if labeled_only is not None and not (w in labeled_only and v in labeled_only):
                continue
            for i in range(n_attr):
                dot = sum(theta[i][f] for f in feats)
                z[i] += dot * state[v][i]
        out[w] = [math.tanh(x) for x in z]
    return out


def naive_loss(words, edges, theta, gold):
    """Squared error over gold words using gold-gold edges only."""
    labeled = set(gold)
    state = {w: gold.get(w, [0.0] * len(theta)) for w in words}
    est = naive_estimates(words, edges, theta, state, labeled_only=labeled)
    return sum((gold[w][i] - est[w][i]) ** 2 for w in gold for i in range(len(theta)))


def finite_difference_gradient(f, theta, h=1e-5):
    """Central differences of ``f`` over a list-of-lists ``theta``."""
    grad = [[0.0] * len(row) for row in theta]
    for i, row in enumerate(theta):
        for j in range(len(row)):
            saved = row[j]
            row[j] = saved + h
            up = f(theta)
            row[j] = saved - h
            down = f(theta)
            row[j] = saved
            grad[i][j] = (up - down) / (2 * h)
    return grad


def confusion_counts(predicted, gold, attributes):
    """tp/fp/fn by iterating over every (gold word, attribute) pair.

    ``predicted`` and ``gold`` map word -> set of attribute names.
    """
    tp = fp = fn = 0
    for word, gold_set in gold.items():
        pred_set = predicted.get(word, set())
        for a in attributes:
            g = a in gold_set
            p = a in pred_set
            if g and p:
                tp += 1
            elif p:
                fp += 1
            elif g:
                fn += 1
    return tp, fp, fn


def brute_force_nearest(vector, paradigms):
    """Closest paradigm by full scan; ties go to the smallest tuple."""
    best = None
    for p in sorted(tuple(x) for x in paradigms):
        d = sum((a - b) ** 2 for a, b in zip(vector, p))
        if best is None or d < best[0]:
            best = (d, p)
    return best[1]
