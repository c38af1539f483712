# src/evaluation/evaluator.py
import math
from dataclasses import dataclass, field

import numpy as np
import pandas as pd
from tqdm.auto import tqdm

from config.settings import DEFAULT_ALPHA, EVAL_CHUNK_ROWS, SHOW_PROGRESS
from config.logging_config import logger
from src.evaluation.metrics import RankedList, cf_accuracy_from_ranks, cf_accuracy_list, rank_weights
from src.recommender.recommender import ranks_of, renormalize
from src.utils.errors import CatalogMismatchError, DataError, UsageError


@dataclass(frozen=True)
class EvalConfig:
    half_life: float = DEFAULT_ALPHA
    per_vote: bool = True

    def __post_init__(self):
        if self.half_life <= 0:
            raise UsageError(f"Half-life must be positive, got {self.half_life}")


@dataclass
class VoteScores:
    """Per-vote outcomes of scoring a test corpus, in corpus order."""

    sessions: np.ndarray
    positions: np.ndarray
    ranks: np.ndarray
    log_probs: np.ndarray
    lists: list = field(default_factory=list)

    def __len__(self):
        return len(self.ranks)


@dataclass
class EvalReport:
    cf_accuracy: float
    mean_log_prob: float
    vote_count: int
    session_count: int
    half_life: float
    mode: str
    per_position: pd.DataFrame = field(repr=False, default=None)

    def to_dict(self):
        return {
            "cf_accuracy": self.cf_accuracy,
            "mean_log_prob": self.mean_log_prob,
            "vote_count": self.vote_count,
            "session_count": self.session_count,
            "half_life": self.half_life,
            "mode": self.mode,
        }


def _check_corpus(model, test_data):
    if test_data.session_count == 0:
        raise DataError("Cannot evaluate on an empty test corpus")
    if test_data.catalog.item_count > model.item_count:
        raise CatalogMismatchError(
            f"Test corpus has {test_data.catalog.item_count} items, model knows {model.item_count}")
    if test_data.catalog.tokens != model.catalog.tokens[:test_data.catalog.item_count]:
        raise CatalogMismatchError("Test corpus catalog maps tokens to different indices than the model catalog")


def _rank_matrix(probs):
    # rank of every item in every row, same tie order as rank_items
    order = np.argsort(-probs, axis=1, kind="stable")
    ranks = np.empty_like(order)
    np.put_along_axis(ranks, order, np.arange(1, probs.shape[1] + 1)[None, :], axis=1)
    return ranks


def score_votes(model, test_data, with_lists=False, chunk_rows=EVAL_CHUNK_ROWS):
    """Score every vote of every test session against its preceding prefix.

    Args:
        model: TrainedModel
        test_data: SessionDataset over the model's catalog
        with_lists: Also build one RankedList per vote whose preferred set is
            the distinct items among the remaining votes of the session
        chunk_rows: Prefixes predicted per batch

    Returns:
        VoteScores
    """
    _check_corpus(model, test_data)

    sessions, positions, ranks, log_probs, lists = [], [], [], [], []
    pending = []

    def flush():
        prefixes = [votes[:j] for _, j, votes in pending]
        actual = np.array([votes[j] for _, j, votes in pending], dtype=np.int64)
        probs = renormalize(model.raw_scores(prefixes))
        ranks.append(ranks_of(probs, actual))
        log_probs.append(np.log(probs[np.arange(len(actual)), actual - 1]))
        sessions.append(np.array([s for s, _, _ in pending], dtype=np.int64))
        positions.append(np.array([j + 1 for _, j, _ in pending], dtype=np.int64))
        if with_lists:
            full_ranks = _rank_matrix(probs)
            for row, (_, j, votes) in enumerate(pending):
                preferred = sorted(set(votes[j:]))
                hits = tuple(int(full_ranks[row, item - 1]) - 1 for item in preferred)
                lists.append(RankedList(hits, model.item_count, len(preferred)))
        pending.clear()

    show = SHOW_PROGRESS and test_data.session_count > 1000
    for session_index, history in enumerate(tqdm(test_data.histories, desc="evaluating",
                                                 disable=not show, leave=False)):
        votes = history.votes
        for j in range(len(votes)):
            pending.append((session_index, j, votes))
        if len(pending) >= chunk_rows:
            flush()
    if pending:
        flush()

    return VoteScores(
        sessions=np.concatenate(sessions),
        positions=np.concatenate(positions),
        ranks=np.concatenate(ranks),
        log_probs=np.concatenate(log_probs),
        lists=lists,
    )


def cf_accuracy_pervote(model, test_data, alpha=DEFAULT_ALPHA):
    """Mean over all test votes of 2^(-(k - 1)/alpha), k the 1-based rank of the actual vote."""
    return cf_accuracy_from_ranks(score_votes(model, test_data).ranks, alpha)


def log_score(model, test_data):
    """Mean natural-log renormalized probability of the actual votes."""
    scores = score_votes(model, test_data)
    return math.fsum(scores.log_probs) / len(scores)


def per_position_table(scores, alpha):
    """CF accuracy and mean log-probability per vote position j."""
    frame = pd.DataFrame({
        "position": scores.positions,
        "weight": rank_weights(scores.ranks, alpha),
        "log_prob": scores.log_probs,
    })
    return (frame.groupby("position", sort=True)
            .agg(votes=("weight", "size"), cf_accuracy=("weight", "mean"), mean_log_prob=("log_prob", "mean"))
            .reset_index())


def evaluate(model, test_data, cfg=None):
    """CF accuracy and log score of a model on a test corpus in one pass.

    Args:
        model: TrainedModel
        test_data: SessionDataset
        cfg: EvalConfig; per-vote CF accuracy unless `cfg.per_vote` is False,
            in which case each (session, position) list is scored against
            all remaining votes of the session

    Returns:
        EvalReport
    """
    cfg = cfg or EvalConfig()
    scores = score_votes(model, test_data, with_lists=not cfg.per_vote)

    if cfg.per_vote:
        cf_accuracy = cf_accuracy_from_ranks(scores.ranks, cfg.half_life)
    else:
        cf_accuracy = cf_accuracy_list(scores.lists, cfg.half_life)

    report = EvalReport(
        cf_accuracy=cf_accuracy,
        mean_log_prob=math.fsum(scores.log_probs) / len(scores),
        vote_count=len(scores),
        session_count=test_data.session_count,
        half_life=cfg.half_life,
        mode="per-vote" if cfg.per_vote else "list",
        per_position=per_position_table(scores, cfg.half_life),
    )
    logger.info(f"Evaluated {report.vote_count} votes in {report.session_count} sessions: "
                f"CF accuracy {report.cf_accuracy:.6f}, mean log-prob {report.mean_log_prob:.6f}")
    return report


def compare_models(models, test_data, cfg=None):
    """One report row per labelled model, in the given order.

    Args:
        models: Mapping label -> TrainedModel
        test_data: SessionDataset
        cfg: EvalConfig

    Returns:
        DataFrame with columns model, cf_accuracy, mean_log_prob, vote_count
    """
    rows = []
    for label, model in models.items():
        logger.info(f"Evaluating {label}")
        report = evaluate(model, test_data, cfg)
        rows.append({"model": label, "cf_accuracy": report.cf_accuracy,
                     "mean_log_prob": report.mean_log_prob, "vote_count": report.vote_count})
    return pd.DataFrame(rows, columns=["model", "cf_accuracy", "mean_log_prob", "vote_count"])
