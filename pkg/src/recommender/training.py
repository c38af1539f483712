# src/recommender/training.py
from dataclasses import replace

import pandas as pd

from config.settings import KAPPA_GRID, TUNING_HOLDOUT_FRACTION, EM_MAX_ITERATIONS, EM_TOLERANCE, \
    EM_SMOOTHING, EM_RESTARTS
from config.logging_config import logger
from src.evaluation.evaluator import EvalConfig, evaluate
from src.ingest.sessions import SessionDataset, SplitSpec, split_train_test
from src.models.cluster import EMConfig, em_fit
from src.models.forest import learn_forest
from src.models.scoring import ScoreParams
from src.recommender.trained_model import BaselineModel, BinnedModel, ExpandedModel, ClusterRecommender
from src.transforms.bag_of_votes import bag_case_set
from src.transforms.binning import compute_bin_bounds, bin_assign
from src.transforms.expansion import ExpansionScheme, expanded_case_set
from src.utils.errors import UsageError


def train_model(train_data, config):
    """Train the model family selected by `config.transform`.

    Args:
        train_data: SessionDataset
        config: resolved RunConfig

    Returns:
        TrainedModel carrying a frozen copy of the training catalog
    """
    catalog = train_data.catalog.freeze()
    snapshot = config.training_snapshot()
    threads = config.threads or 1

    if config.transform == "cluster":
        cases = bag_case_set(train_data.histories, catalog)
        em_config = EMConfig(class_count=config.cluster_classes, max_iterations=EM_MAX_ITERATIONS,
                             tolerance=EM_TOLERANCE, seed=config.seed, smoothing=EM_SMOOTHING,
                             restarts=EM_RESTARTS)
        snapshot["case_counts"] = [len(cases)]
        return ClusterRecommender(catalog, em_fit(cases, em_config), snapshot)

    params = ScoreParams(config.kappa)

    if config.transform == "bag":
        cases = bag_case_set(train_data.histories, catalog)
        snapshot["case_counts"] = [len(cases)]
        forest = learn_forest(cases.space, cases, params, threads)
        return BaselineModel(catalog, forest, snapshot)

    if config.transform == "bin":
        scheme = compute_bin_bounds(train_data, config.bins, config.prefix_mode)
        case_sets = bin_assign(SessionDataset(catalog, train_data.histories), scheme)
        forests = []
        for index, cases in enumerate(case_sets):
            lo, hi = scheme.bounds[index]
            logger.info(f"Bin {index + 1} (lengths {lo}..{hi if hi is not None else 'inf'}): {len(cases)} cases")
            forests.append(learn_forest(cases.space, cases, params, threads))
        snapshot["case_counts"] = [len(cases) for cases in case_sets]
        return BinnedModel(catalog, scheme, forests, snapshot)

    if config.transform == "expand":
        scheme = ExpansionScheme(config.history_length)
        cases = expanded_case_set(train_data.histories, scheme, catalog)
        snapshot["case_counts"] = [len(cases)]
        forest = learn_forest(cases.space, cases, params, threads)
        return ExpandedModel(catalog, scheme, forest, snapshot)

    raise UsageError(f"Unknown transform {config.transform!r}")


def tune_kappa(train_data, config, grid=KAPPA_GRID, criterion="cf_accuracy",
               holdout_fraction=TUNING_HOLDOUT_FRACTION):
    """Pick kappa by hold-out accuracy on a split of the training sessions.

    Args:
        train_data: SessionDataset
        config: resolved RunConfig of a decision-tree family
        grid: Candidate kappa values
        criterion: "cf_accuracy" or "mean_log_prob"
        holdout_fraction: Share of training sessions held out

    Returns:
        (best kappa, DataFrame with one row per candidate); ties go to the
        larger kappa
    """
    if criterion not in ("cf_accuracy", "mean_log_prob"):
        raise UsageError(f"Unknown tuning criterion {criterion!r}")

    fit_part, holdout = split_train_test(train_data, SplitSpec(holdout_fraction, config.seed))
    eval_config = EvalConfig(half_life=config.alpha)

    rows = []
    for kappa in sorted(grid, reverse=True):
        model = train_model(fit_part, replace(config, kappa=kappa))
        report = evaluate(model, holdout, eval_config)
        rows.append({"kappa": kappa, "cf_accuracy": report.cf_accuracy, "mean_log_prob": report.mean_log_prob})
        logger.info(f"kappa={kappa}: CF accuracy {report.cf_accuracy:.6f}, "
                    f"mean log-prob {report.mean_log_prob:.6f}")

    table = pd.DataFrame(rows, columns=["kappa", "cf_accuracy", "mean_log_prob"])
    best = float(table.loc[table[criterion].idxmax(), "kappa"])
    logger.info(f"Selected kappa={best} by hold-out {criterion}")
    return best, table
