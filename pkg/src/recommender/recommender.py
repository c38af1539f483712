# src/recommender/recommender.py
from dataclasses import dataclass

import numpy as np

from src.utils.errors import DataError


@dataclass(frozen=True)
class Prediction:
    """Renormalized next-vote distribution over items 1..g.

    `probs[k - 1]` is the probability of item k; `ranking` lists items by
    descending probability, ties by ascending index.
    """

    probs: np.ndarray
    ranking: np.ndarray

    @classmethod
    def from_raw(cls, raw_scores):
        probs = renormalize(np.asarray(raw_scores, dtype=np.float64))
        return cls(probs=probs, ranking=rank_items(probs))

    def rank_of(self, item):
        """1-based rank of an item."""
        return int(np.flatnonzero(self.ranking == item)[0]) + 1

    def top(self, n):
        return [(int(item), float(self.probs[item - 1])) for item in self.ranking[:n]]


def renormalize(raw_scores):
    """Divide per-item scores by their sum (row-wise for a matrix)."""
    raw_scores = np.asarray(raw_scores, dtype=np.float64)
    return raw_scores / raw_scores.sum(axis=-1, keepdims=True)


def rank_items(probs):
    """Items (1-based) by descending probability, ties by ascending index."""
    indices = np.arange(len(probs))
    return np.lexsort((indices, -probs)) + 1


def ranks_of(probs, items):
    """1-based rank of `items[r]` within row r of a probability matrix.

    Same order as rank_items: higher probability first, ties by lower index.
    """
    probs = np.atleast_2d(probs)
    items = np.asarray(items, dtype=np.int64)
    rows = np.arange(probs.shape[0])
    actual = probs[rows, items - 1][:, None]
    indices = np.arange(probs.shape[1])[None, :]
    better = (probs > actual) | ((probs == actual) & (indices < (items - 1)[:, None]))
    return better.sum(axis=1) + 1


def select_bin(scheme, partial_length):
    """0-based index of the bin model used after `partial_length` votes.

    A length of 0 uses the first bin; lengths past the last bound use the last.
    """
    if partial_length <= 0:
        return 0
    return scheme.locate(partial_length)


def check_prefix(model, partial):
    partial = tuple(int(v) for v in partial)
    for vote in partial:
        if not 1 <= vote <= model.item_count:
            raise DataError(f"Prefix item {vote} outside catalog range [1, {model.item_count}]")
    return partial


def predict_next(model, partial):
    """Next-vote distribution given a (possibly empty) prefix.

    Args:
        model: TrainedModel
        partial: Sequence of item indices already voted for

    Returns:
        Prediction
    """
    partial = check_prefix(model, partial)
    return Prediction.from_raw(model.raw_scores([partial])[0])


def recommend(model, partial, top_n, exclude_seen=False):
    """The `top_n` best next items as (item, probability) pairs.

    With `exclude_seen`, items already in the prefix are skipped and the list
    may be shorter than `top_n`.
    """
    if not 1 <= top_n <= model.item_count:
        raise DataError(f"topN must lie in [1, {model.item_count}], got {top_n}")

    partial = check_prefix(model, partial)
    prediction = predict_next(model, partial)
    ranking = prediction.ranking
    if exclude_seen:
        seen = np.asarray(sorted(set(partial)), dtype=np.int64)
        ranking = ranking[~np.isin(ranking, seen)]
    return [(int(item), float(prediction.probs[item - 1])) for item in ranking[:top_n]]
