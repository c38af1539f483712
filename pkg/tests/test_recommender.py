import math
from dataclasses import replace

import numpy as np
import pytest
from pytest import approx, fixture

from config.run_config import RunConfig
from src.evaluation.evaluator import EvalConfig, evaluate
from src.ingest.catalog import ItemCatalog
from src.ingest.sessions import parse_sessions
from src.ingest.synthetic import bigram_sessions, markov_chain_sessions
from src.models.forest import learn_forest
from src.models.scoring import ScoreParams
from src.output.json_formatter import model_from_document, model_to_document
from src.output.text_formatter import format_report
from src.recommender.recommender import (
    Prediction,
    predict_next,
    rank_items,
    ranks_of,
    recommend,
    renormalize,
    select_bin,
)
from src.recommender.trained_model import BaselineModel, BinnedModel
from src.recommender.training import train_model, tune_kappa
from src.transforms.binning import BinScheme
from src.transforms.variables import CaseSet, VariableSpace
from src.utils.errors import DataError


def _config(**kwargs):
    return RunConfig(command="train", **kwargs).validate().resolve()


def _uniform_model(item_count):
    catalog = ItemCatalog([str(k) for k in range(1, item_count + 1)], frozen=True)
    space = VariableSpace.bag(item_count)
    forest = learn_forest(space, CaseSet.from_rows(space, [], catalog), ScoreParams())
    return BaselineModel(catalog, forest)


@fixture(scope="module")
def bigram_model():
    return train_model(bigram_sessions(200, seed=0), _config(transform="expand", history_length=1))


def test_renormalize_sums_to_one():
    probs = renormalize([0.2, 0.6, 0.2, 1.0])
    assert probs.sum() == approx(1.0)
    assert probs == approx([0.1, 0.3, 0.1, 0.5])


def test_renormalize_scale_invariant():
    raw = np.array([0.3, 0.05, 0.9, 0.4])
    assert rank_items(renormalize(raw)).tolist() == rank_items(renormalize(raw * 7.5)).tolist()
    assert renormalize(raw * 7.5) == approx(renormalize(raw))


def test_ties_by_ascending_index():
    probs = np.array([0.25, 0.25, 0.5, 0.0])
    assert rank_items(probs).tolist() == [3, 1, 2, 4]
    assert ranks_of(probs[None, :], [1]).tolist() == [2]
    assert ranks_of(probs[None, :], [2]).tolist() == [3]


def test_prediction_top():
    prediction = Prediction.from_raw([0.1, 0.3, 0.2])
    assert prediction.rank_of(2) == 1
    assert [item for item, _ in prediction.top(2)] == [2, 3]


def test_select_bin():
    scheme = BinScheme(((1, 2), (3, 5), (6, None)))
    assert [select_bin(scheme, k) for k in (0, 1, 2, 3, 5, 6, 400)] == [0, 0, 0, 1, 1, 2, 2]


def test_bigram_prefers_follower(bigram_model):
    [(item, probability)] = recommend(bigram_model, [1], 1)
    assert item == 2
    assert probability == approx(predict_next(bigram_model, [1]).probs[1])
    assert probability > 0.9
    assert predict_next(bigram_model, [3, 1]).ranking[0] == 2


def test_empty_prefix_uses_empty_evidence(bigram_model):
    raw = bigram_model.raw_scores([()])[0]
    assert predict_next(bigram_model, []).ranking[0] == int(np.argmax(raw)) + 1


def test_recommend_exclude_seen(bigram_model):
    items = [item for item, _ in recommend(bigram_model, [1, 2], 3, exclude_seen=True)]
    assert items == [3]


def test_recommend_top_range(bigram_model):
    with pytest.raises(DataError):
        recommend(bigram_model, [1], 0)
    with pytest.raises(DataError):
        recommend(bigram_model, [1], 4)


def test_recommend_rejects_out_of_range_prefix(bigram_model):
    with pytest.raises(DataError):
        predict_next(bigram_model, [9])


def test_uniform_model_log_score():
    model = _uniform_model(4)
    test = parse_sessions(["1 2 3", "4 4", "2"], catalog=model.catalog)
    report = evaluate(model, test)
    assert report.mean_log_prob == approx(math.log(1 / 4), abs=1e-12)
    assert report.vote_count == 6


def test_single_bin_equals_baseline():
    data = markov_chain_sessions(300, item_count=8, seed=4)
    train, test = data.histories[:240], data.histories[240:]
    train_data = replace(data, histories=train)
    test_data = replace(data, histories=test)

    baseline = train_model(train_data, _config(transform="bag"))
    binned = train_model(train_data, _config(transform="bin", bins=1))
    assert isinstance(binned, BinnedModel)
    assert format_report(evaluate(binned, test_data)) == format_report(evaluate(baseline, test_data))


def test_document_round_trip_preserves_report():
    data = markov_chain_sessions(200, item_count=6, seed=2)
    test_data = replace(data, histories=data.histories[150:])
    for config in (_config(transform="bag"), _config(transform="bin", bins=2),
                   _config(transform="expand", history_length=2),
                   _config(transform="cluster", cluster_classes=2)):
        model = train_model(replace(data, histories=data.histories[:150]), config)
        again = model_from_document(model_to_document(model))
        assert type(again) is type(model)
        assert format_report(evaluate(again, test_data)) == format_report(evaluate(model, test_data))


def test_tune_kappa_table():
    data = markov_chain_sessions(200, item_count=6, seed=9)
    best, table = tune_kappa(data, _config(transform="expand", history_length=1))
    assert best in table["kappa"].tolist()
    assert table["kappa"].tolist() == sorted(table["kappa"].tolist(), reverse=True)
    assert len(table) == 5


def test_tune_kappa_ties_prefer_larger():
    data = parse_sessions(["x x", "x", "x x x"] * 4)
    best, table = tune_kappa(data, _config(transform="bag"))
    assert table["cf_accuracy"].nunique() == 1
    assert best == 1.0


def test_evaluate_list_mode_single_votes():
    model = _uniform_model(3)
    test = parse_sessions(["1", "3", "2"], catalog=model.catalog)
    per_vote = evaluate(model, test, EvalConfig(half_life=10))
    lists = evaluate(model, test, EvalConfig(half_life=10, per_vote=False))
    assert lists.cf_accuracy == approx(per_vote.cf_accuracy, abs=1e-12)
    assert lists.mode == "list"
