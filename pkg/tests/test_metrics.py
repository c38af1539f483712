import math

import numpy as np
import pytest
from pytest import approx, mark

from src.evaluation.metrics import (
    RankedList,
    cf_accuracy_from_ranks,
    cf_accuracy_list,
    halflife_weight,
    rank_weights,
)
from src.utils.errors import DataError, UsageError


def test_halflife_weight():
    assert halflife_weight(0, 10) == 1.0
    assert halflife_weight(10, 10) == approx(0.5)
    assert halflife_weight(20, 10) == approx(0.25)


def test_halflife_checks():
    with pytest.raises(UsageError):
        halflife_weight(1, 0)
    with pytest.raises(DataError):
        halflife_weight(-1, 10)


def test_rank_one_everywhere():
    assert cf_accuracy_from_ranks(np.ones(50, dtype=int), 10) == 1.0


def test_rank_weights():
    assert rank_weights([1, 11, 21], 10) == approx([1.0, 0.5, 0.25])


@mark.parametrize("seed", range(100))
def test_per_vote_equals_single_preferred_lists(seed):
    rng = np.random.default_rng(seed)
    items = int(rng.integers(2, 60))
    ranks = rng.integers(1, items + 1, size=int(rng.integers(1, 40)))
    alpha = float(rng.uniform(1, 20))
    lists = [RankedList((int(r) - 1,), items, 1) for r in ranks]
    assert cf_accuracy_from_ranks(ranks, alpha) == approx(cf_accuracy_list(lists, alpha), abs=1e-12)


def test_list_best_ordering_scores_one():
    ranked = RankedList((0, 1, 2), 10, 3)
    assert cf_accuracy_list([ranked], 10) == approx(1.0)


def test_list_hits_beyond_length_ignored():
    ranked = RankedList((0, 7), 5, 2)
    expected = 1.0 / (1.0 + 2 ** (-1 / 10))
    assert cf_accuracy_list([ranked], 10) == approx(expected)


def test_list_average_over_users():
    lists = [RankedList((0,), 5, 1), RankedList((10,), 20, 1)]
    assert cf_accuracy_list(lists, 10) == approx((1.0 + 0.5) / 2)


def test_list_errors():
    with pytest.raises(DataError):
        cf_accuracy_list([], 10)
    with pytest.raises(DataError):
        cf_accuracy_list([RankedList((), 5, 0)], 10)
    with pytest.raises(DataError):
        cf_accuracy_from_ranks([], 10)


def test_weights_are_probabilities():
    weights = rank_weights(np.arange(1, 1001), 10)
    assert (weights > 0).all() and (weights <= 1).all()
    assert math.isclose(weights[0], 1.0)
