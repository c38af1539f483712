import itertools

import numpy as np
import pytest
from pytest import mark

from src.ingest.catalog import ItemCatalog
from src.ingest.sessions import SessionDataset, VoteHistory, parse_sessions
from src.transforms.bag_of_votes import bag_case_set, bag_of_votes_case, build_evidence_bag
from src.transforms.binning import BinScheme, bin_assign, bin_masses, compute_bin_bounds
from src.transforms.expansion import (
    ExpansionScheme,
    build_evidence_expanded,
    expand_history,
    expanded_case_set,
)
from src.transforms.variables import (
    BinaryCase,
    CaseSet,
    VariableId,
    VariableSpace,
    cache_var,
    item_var,
    lag_var,
    target_var,
)
from src.utils.errors import DataError

MATRIX, STAR_WARS, FARGO, PULP_FICTION = 1, 2, 3, 4


def _dataset(lengths):
    # a history of length n votes for items 1..n
    item_count = max(lengths)
    catalog = ItemCatalog([str(k) for k in range(1, item_count + 1)])
    histories = [VoteHistory(tuple(range(1, n + 1))) for n in lengths]
    return SessionDataset(catalog, histories)


def test_bag_case_movie_history():
    case = bag_of_votes_case(VoteHistory((MATRIX, PULP_FICTION, STAR_WARS)), 4)
    assert case.positives == {item_var(MATRIX), item_var(PULP_FICTION), item_var(STAR_WARS)}
    assert item_var(FARGO) not in case


def test_bag_case_discards_multiplicity():
    assert bag_of_votes_case(VoteHistory((3, 3, 3)), 4).positives == {item_var(3)}


@mark.parametrize("order", list(itertools.permutations([2, 4, 1])))
def test_bag_case_order_invariant(order):
    assert bag_of_votes_case(VoteHistory(order), 4) == bag_of_votes_case(VoteHistory((2, 4, 1)), 4)


def test_expand_movie_history():
    cases = expand_history(VoteHistory((MATRIX, PULP_FICTION, STAR_WARS)), ExpansionScheme(1), 4)
    assert [c.positives for c in cases] == [
        {target_var(MATRIX)},
        {target_var(PULP_FICTION), lag_var(MATRIX, 1), cache_var(MATRIX)},
        {target_var(STAR_WARS), lag_var(PULP_FICTION, 1), cache_var(MATRIX), cache_var(PULP_FICTION)},
    ]


@mark.parametrize("history_length", [1, 2, 5])
def test_expand_single_vote(history_length):
    cases = expand_history(VoteHistory((5,)), ExpansionScheme(history_length), 6)
    assert [c.positives for c in cases] == [{target_var(5)}]


def test_expand_self_repeat():
    cases = expand_history(VoteHistory((7, 7)), ExpansionScheme(2), 7)
    assert cases[1].positives == {target_var(7), lag_var(7, 1), cache_var(7)}


def test_expand_lag_and_cache_soundness():
    votes = (3, 1, 3, 2, 4, 1)
    l = 3
    cases = expand_history(VoteHistory(votes), ExpansionScheme(l), 4)
    for j, case in enumerate(cases):
        targets = [v for v in case.positives if v.role.value == "target"]
        assert targets == [target_var(votes[j])]
        for k in range(1, 5):
            assert (cache_var(k) in case) == (k in votes[:j])
            for d in range(1, l + 1):
                assert (lag_var(k, d) in case) == (j - d >= 0 and votes[j - d] == k)


def test_expanded_case_counts():
    data = parse_sessions(["a b a", "c", "b b c a"])
    cases = expanded_case_set(data.histories, ExpansionScheme(2), data.catalog)
    assert len(cases) == data.total_votes
    assert cases.space.variable_count == 3 * (2 + 2)
    target_sums = np.asarray(cases.matrix[:, :3].sum(axis=0)).ravel()
    assert target_sums.tolist() == [3, 3, 2]
    assert (np.asarray(cases.matrix[:, :3].sum(axis=1)).ravel() == 1).all()


def test_evidence_empty_prefix():
    assert build_evidence_bag((), 4).positives == frozenset()
    assert build_evidence_expanded((), ExpansionScheme(1), 4).positives == frozenset()


def test_evidence_movie_prefix():
    expanded = build_evidence_expanded((1, 4), ExpansionScheme(1), 4)
    assert expanded.positives == {lag_var(4, 1), cache_var(1), cache_var(4)}
    assert build_evidence_bag((1, 4), 4).positives == {item_var(1), item_var(4)}


@mark.parametrize("history_length", [1, 2, 3])
def test_evidence_matches_expansion(history_length):
    votes = (2, 5, 2, 1, 3, 5, 4)
    scheme = ExpansionScheme(history_length)
    cases = expand_history(VoteHistory(votes), scheme, 5)
    for j, case in enumerate(cases):
        predictors = {v for v in case.positives if v.role.value != "target"}
        assert build_evidence_expanded(votes[:j], scheme, 5).positives == predictors


def test_bin_bounds_balanced():
    scheme = compute_bin_bounds(_dataset([2, 2, 2, 3, 3]), 2)
    assert scheme.bounds == ((1, 2), (3, None))
    assert bin_masses(_dataset([2, 2, 2, 3, 3]), scheme) == [6, 6]


def test_bin_bounds_single_bin():
    assert compute_bin_bounds(_dataset([1, 4, 2]), 1).bounds == ((1, None),)


def test_bin_bounds_skewed():
    data = _dataset([1, 1, 1, 1, 9])
    scheme = compute_bin_bounds(data, 2)
    assert scheme.bounds == ((1, 1), (2, None))
    assert bin_masses(data, scheme) == [4, 9]


def test_bin_bounds_too_many_bins():
    with pytest.raises(DataError):
        compute_bin_bounds(_dataset([2, 2, 3]), 3)


def test_bin_bounds_every_bin_nonempty():
    data = _dataset([1, 2, 2, 3, 3, 3, 4, 5, 8, 13])
    for bins in range(1, 8):
        scheme = compute_bin_bounds(data, bins)
        assert scheme.bin_count == bins
        assert all(mass > 0 for mass in bin_masses(data, scheme))


def test_bin_scheme_validation():
    with pytest.raises(DataError):
        BinScheme(((1, 3), (5, None)))
    with pytest.raises(DataError):
        BinScheme(((1, 3), (4, 9)))


def test_prefix_assignment_long_history():
    votes = tuple(range(1, 91))
    data = SessionDataset(ItemCatalog([str(k) for k in votes]), (VoteHistory(votes),))
    scheme = BinScheme(((1, 5), (6, 10), (11, None)), prefix_mode=True)
    first, second, third = bin_assign(data, scheme)
    assert first.matrix.indices.tolist() == list(range(5))
    assert second.matrix.indices.tolist() == list(range(10))
    assert third.matrix.indices.tolist() == list(range(90))


def test_non_prefix_assignment_long_history():
    votes = tuple(range(1, 91))
    data = SessionDataset(ItemCatalog([str(k) for k in votes]), (VoteHistory(votes),))
    scheme = BinScheme(((1, 5), (6, 10), (11, None)), prefix_mode=False)
    assert [len(c) for c in bin_assign(data, scheme)] == [0, 0, 1]


def test_prefix_bin_cardinality():
    lengths = [1, 2, 2, 3, 4, 5, 6, 7, 9, 12]
    data = _dataset(lengths)
    scheme = compute_bin_bounds(data, 3)
    case_sets = bin_assign(data, scheme)
    for (lo, _), cases in zip(scheme.bounds, case_sets):
        assert len(cases) == sum(1 for n in lengths if n >= lo)


def test_variable_token_round_trip():
    for var in (item_var(3), target_var(1), lag_var(4, 2), cache_var(9)):
        assert VariableId.parse(str(var)) == var
    assert str(lag_var(4, 1)) == "lag:4:1"


@mark.parametrize("space", [VariableSpace.bag(4), VariableSpace.expanded(4, 1), VariableSpace.expanded(3, 3)])
def test_space_columns_bijective(space):
    columns = [space.column(space.variable(c)) for c in range(space.variable_count)]
    assert columns == list(range(space.variable_count))


def test_predictor_counts():
    bag = VariableSpace.bag(4)
    expanded = VariableSpace.expanded(4, 1)
    assert len(bag.predictor_columns(2)) == 3
    assert 1 not in bag.predictor_columns(2)
    assert len(expanded.predictor_columns(2)) == 8
    assert expanded.variable_count == 4 * 3


def test_tie_break_order():
    space = VariableSpace.expanded(3, 2)
    ordered = [space.variable(c) for c in space.in_tie_break_order(space.predictor_columns(1)[::-1])]
    assert ordered == sorted(ordered, key=VariableId.sort_key)
    assert ordered[:3] == [lag_var(1, 1), lag_var(1, 2), lag_var(2, 1)]


def test_case_set_dump(movie_data):
    cases = bag_case_set(movie_data.histories, movie_data.catalog)
    assert cases.dump() == "item:1 item:4\nitem:1 item:2 item:4\n"
    assert cases.cases[1] == BinaryCase({item_var(1), item_var(2), item_var(4)})


def test_case_set_rejects_wrong_space():
    cases = CaseSet.from_cases(VariableSpace.bag(3), [BinaryCase({item_var(2)})])
    assert cases.matrix.shape == (1, 3)
    with pytest.raises(DataError):
        CaseSet.from_cases(VariableSpace.bag(3), [BinaryCase({target_var(2)})])
