# src/evaluation/metrics.py
import math
from dataclasses import dataclass

import numpy as np

from src.utils.errors import DataError, UsageError


@dataclass(frozen=True)
class RankedList:
    """One user's recommendation list for CF accuracy.

    Args:
        hit_positions: 0-based list positions holding preferred items
        list_length: R, the number of recommendations shown
        preferred_count: M, the number of items the user actually prefers
    """

    hit_positions: tuple
    list_length: int
    preferred_count: int


def _check_half_life(alpha):
    if alpha <= 0:
        raise UsageError(f"Half-life must be positive, got {alpha}")


def halflife_weight(k, alpha):
    """Probability 2^(-k/alpha) that a user views list position k (0-based)."""
    _check_half_life(alpha)
    if k < 0:
        raise DataError(f"List positions are non-negative, got {k}")
    return 2.0 ** (-k / alpha)


def cf_accuracy_list(lists, alpha):
    """CF accuracy of general ranked lists, averaged over users.

    Each user scores sum of p(k) over hits within the first R positions,
    divided by the best achievable sum over the first M positions.
    """
    _check_half_life(alpha)
    lists = list(lists)
    if not lists:
        raise DataError("CF accuracy needs at least one list")

    scores = []
    for ranked in lists:
        if ranked.preferred_count < 1:
            raise DataError("Every user must prefer at least one item")
        if ranked.list_length < 1:
            raise DataError("Every user must receive at least one recommendation")
        gained = math.fsum(halflife_weight(k, alpha) for k in ranked.hit_positions
                           if k < ranked.list_length)
        best = math.fsum(halflife_weight(k, alpha) for k in range(ranked.preferred_count))
        scores.append(gained / best)
    return math.fsum(scores) / len(scores)


def rank_weights(ranks, alpha):
    """Per-vote CF credit 2^(1/alpha) p(rank) = 2^(-(rank - 1)/alpha) for 1-based ranks."""
    _check_half_life(alpha)
    ranks = np.asarray(ranks, dtype=np.float64)
    return np.power(2.0, -(ranks - 1.0) / alpha)


def cf_accuracy_from_ranks(ranks, alpha):
    """Mean per-vote CF credit over 1-based ranks of the actual votes."""
    ranks = np.asarray(ranks)
    if ranks.size == 0:
        raise DataError("CF accuracy needs at least one vote")
    return math.fsum(rank_weights(ranks, alpha)) / ranks.size
