import math

import numpy as np
import pytest
from pytest import approx, fixture

from config.run_config import RunConfig
from src.evaluation.evaluator import (
    EvalConfig,
    cf_accuracy_pervote,
    compare_models,
    evaluate,
    log_score,
    per_position_table,
    score_votes,
)
from src.ingest.catalog import ItemCatalog
from src.ingest.sessions import parse_sessions
from src.ingest.synthetic import markov_chain_sessions
from src.recommender.recommender import predict_next
from src.recommender.training import train_model
from src.utils.errors import CatalogMismatchError, UsageError


@fixture(scope="module")
def markov_model():
    data = markov_chain_sessions(400, item_count=10, seed=3)
    config = RunConfig(command="train", transform="expand").validate().resolve()
    model = train_model(data, config)
    test = markov_chain_sessions(60, item_count=10, seed=3)
    return model, test


def test_score_votes_matches_single_predictions(markov_model):
    model, test = markov_model
    scores = score_votes(model, test, chunk_rows=7)
    assert len(scores) == test.total_votes
    row = 0
    for history in test.histories[:10]:
        for j, vote in enumerate(history.votes):
            prediction = predict_next(model, history.votes[:j])
            assert scores.ranks[row] == prediction.rank_of(vote)
            assert scores.log_probs[row] == approx(math.log(prediction.probs[vote - 1]))
            assert scores.positions[row] == j + 1
            row += 1


def test_evaluate_matches_helpers(markov_model):
    model, test = markov_model
    report = evaluate(model, test, EvalConfig(half_life=10))
    assert report.cf_accuracy == approx(cf_accuracy_pervote(model, test, alpha=10))
    assert report.mean_log_prob == approx(log_score(model, test))
    assert report.vote_count == test.total_votes
    assert report.session_count == 60
    assert 0 < report.cf_accuracy <= 1
    assert report.mean_log_prob < 0


def test_chunk_size_does_not_change_report(markov_model):
    model, test = markov_model
    small = score_votes(model, test, chunk_rows=3)
    large = score_votes(model, test, chunk_rows=10000)
    assert np.array_equal(small.ranks, large.ranks)
    assert np.array_equal(small.log_probs, large.log_probs)


def test_per_position_table(markov_model):
    model, test = markov_model
    report = evaluate(model, test)
    table = report.per_position
    assert table["position"].tolist() == sorted(table["position"].tolist())
    assert table["votes"].sum() == test.total_votes
    weighted = (table["cf_accuracy"] * table["votes"]).sum() / table["votes"].sum()
    assert weighted == approx(report.cf_accuracy)

    scores = score_votes(model, test)
    assert per_position_table(scores, 10).equals(table)


def test_list_mode_not_above_one(markov_model):
    model, test = markov_model
    report = evaluate(model, test, EvalConfig(per_vote=False))
    assert 0 < report.cf_accuracy <= 1


def test_compare_models(markov_model):
    model, test = markov_model
    table = compare_models({"DE-1": model, "again": model}, test)
    assert table["model"].tolist() == ["DE-1", "again"]
    assert table["cf_accuracy"].iloc[0] == table["cf_accuracy"].iloc[1]


def test_catalog_mismatch(markov_model):
    model, _ = markov_model
    catalog = ItemCatalog([str(k) for k in range(1, 12)])
    test = parse_sessions(["1 11"], catalog=catalog)
    with pytest.raises(CatalogMismatchError):
        evaluate(model, test)


def test_catalog_with_permuted_tokens_rejected():
    data = parse_sessions(["a b", "a b c"] * 5)
    model = train_model(data, RunConfig(command="train", transform="expand").validate().resolve())
    same = parse_sessions(["a b"] * 5, catalog=model.catalog)

    permuted = parse_sessions(["a b"] * 5, catalog=ItemCatalog(["b", "a", "c"]))
    with pytest.raises(CatalogMismatchError):
        evaluate(model, permuted)
    with pytest.raises(CatalogMismatchError):
        log_score(model, permuted)

    prefix = parse_sessions(["a b"] * 5, catalog=ItemCatalog(["a", "b"]))
    assert evaluate(model, prefix).to_dict() == evaluate(model, same).to_dict()


def test_half_life_positive():
    with pytest.raises(UsageError):
        EvalConfig(half_life=0)


def test_report_has_no_per_position_in_dict(markov_model):
    model, test = markov_model
    assert set(evaluate(model, test).to_dict()) == {
        "cf_accuracy", "mean_log_prob", "vote_count", "session_count", "half_life", "mode"}
