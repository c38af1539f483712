#!/usr/bin/env python
# main.py - Temporal CF Entry Point

import sys
import time
import argparse
from dataclasses import replace
from pathlib import Path

# Add the project directory to the path
sys.path.insert(0, str(Path(__file__).resolve().parent))

from config.settings import OUTPUT_DIR, EXPERIMENT_FAMILIES
from config.logging_config import logger
from config.run_config import RunConfig, TRANSFORMS
from src.evaluation.evaluator import EvalConfig, evaluate, compare_models
from src.ingest.catalog import read_catalog, write_catalog
from src.ingest.sessions import read_session_file, corpus_stats
from src.output.csv_formatter import CSVFormatter
from src.output.json_formatter import JSONFormatter
from src.output.plotting import plot_model_comparison, plot_per_position
from src.output.text_formatter import TextFormatter, format_key_values, format_recommendations, format_report
from src.recommender.recommender import recommend
from src.recommender.training import train_model, tune_kappa
from src.utils.errors import TemporalCFError, CatalogMismatchError, UnknownTokenError

COMMANDS = ("train", "evaluate", "recommend", "stats", "experiment")


class ArgumentParser(argparse.ArgumentParser):
    """argparse with usage errors on exit code 1."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def parse_arguments(argv=None):
    """Parse command line arguments."""
    common = ArgumentParser(add_help=False)
    common.add_argument("--transform", choices=TRANSFORMS, default="bag", help="Model family to train")
    common.add_argument("--bins", type=int, help="Number of length bins (--transform bin)")
    common.add_argument("--no-prefix", dest="prefix_mode", action="store_false",
                        help="Do not add prefixes of long sessions to shorter bins")
    common.add_argument("--history-len", dest="history_length", type=int,
                        help="Lagged history window (--transform expand)")
    common.add_argument("--kappa", type=float, help="Model prior per free parameter, in (0, 1]")
    common.add_argument("--classes", dest="cluster_classes", type=int,
                        help="Latent classes (--transform cluster)")
    common.add_argument("--alpha", type=float, help="CF accuracy half-life")
    common.add_argument("--seed", type=int, help="Seed for every random choice")
    common.add_argument("--threads", type=int, help="Worker threads for forest learning")
    common.add_argument("--train", dest="train_path", help="Training session file")
    common.add_argument("--test", dest="test_path", help="Test session file")
    common.add_argument("--model", dest="model_path", help="Model document path")
    common.add_argument("--report", dest="report_path", help="Report output path")
    common.add_argument("--top", dest="top_n", type=int, help="Number of recommendations")
    common.add_argument("--exclude-seen", action="store_true", help="Skip items already in the prefix")
    common.add_argument("--per-position", action="store_true",
                        help="Also write accuracy by vote position (evaluate)")
    common.add_argument("--list-mode", action="store_true",
                        help="Score every remaining vote of a session as preferred (evaluate)")
    common.add_argument("--tune-kappa", action="store_true",
                        help="Choose kappa on a hold-out split of the training data (train)")

    parser = ArgumentParser(description="Temporal collaborative filtering")
    subparsers = parser.add_subparsers(dest="command", required=True)
    subparsers.add_parser("train", parents=[common], help="Train a model family")
    subparsers.add_parser("evaluate", parents=[common], help="Score a model on a test corpus")
    recommend_parser = subparsers.add_parser("recommend", parents=[common], help="Recommend next items")
    recommend_parser.add_argument("prefix", nargs="*", help="Item tokens voted for so far")
    subparsers.add_parser("stats", parents=[common], help="Session length statistics")
    subparsers.add_parser("experiment", parents=[common], help="Compare all model families")

    args = parser.parse_args(argv)
    values = {name: value for name, value in vars(args).items() if name in RunConfig.__dataclass_fields__}
    return RunConfig(**values)


def _path(value):
    return Path(value).resolve() if value is not None else None


def _report_sibling(report_path, suffix):
    return report_path.with_name(report_path.name + suffix)


def _load_model(model_path):
    """Load a model and check it against the catalog file written beside it, if any."""
    model = JSONFormatter().load_model(model_path)
    catalog_path = _report_sibling(model_path, ".catalog.tsv")
    if catalog_path.exists() and read_catalog(catalog_path).content_hash() != model.catalog.content_hash():
        raise CatalogMismatchError(f"Catalog file {catalog_path} does not match model {model_path}")
    return model


def _read_test(test_path, catalog):
    try:
        return read_session_file(test_path, catalog=catalog)
    except UnknownTokenError as e:
        raise CatalogMismatchError(f"Test corpus {test_path}: {e.message}; not in the model catalog") from e


def cmd_train(config):
    """Train the selected family and write the model document plus its catalog."""
    logger.info("Step 1: Reading training data")
    train_data = read_session_file(_path(config.train_path))

    tuning = None
    if config.tune_kappa:
        logger.info("Step 2: Tuning kappa on a hold-out split")
        best, tuning = tune_kappa(train_data, config)
        config = replace(config, kappa=best)

    logger.info(f"Step {3 if tuning is not None else 2}: Training {config.transform} model")
    model = train_model(train_data, config)
    if tuning is not None:
        model.training["kappa_tuning"] = [
            {"kappa": float(row.kappa), "cf_accuracy": float(row.cf_accuracy),
             "mean_log_prob": float(row.mean_log_prob)}
            for row in tuning.itertuples(index=False)
        ]

    model_path = _path(config.model_path)
    JSONFormatter().save_model(model, model_path)
    write_catalog(model.catalog, _report_sibling(model_path, ".catalog.tsv"))

    summary = model.summary()
    lines = {"variant": model.variant, "items": model.item_count}
    for index, count in enumerate(model.training.get("case_counts", []), 1):
        lines[f"cases_{index}"] = count
    if "leaves" in summary:
        leaves = summary["leaves"]
        lines["leaves"] = sum(leaves) if isinstance(leaves, list) else leaves
    if config.tune_kappa:
        lines["kappa"] = config.kappa
    sys.stdout.write(format_key_values(lines))
    return 0


def cmd_evaluate(config):
    """Evaluate a stored model on a test corpus."""
    logger.info("Step 1: Loading model")
    model = _load_model(_path(config.model_path))

    logger.info("Step 2: Reading test data")
    test_data = _read_test(_path(config.test_path), model.catalog)

    logger.info("Step 3: Scoring test votes")
    report = evaluate(model, test_data, EvalConfig(half_life=config.alpha, per_vote=not config.list_mode))
    sys.stdout.write(format_report(report))

    report_path = _path(config.report_path)
    if report_path is not None:
        TextFormatter().save_report(report, report_path)
        JSONFormatter().save_report(report, _report_sibling(report_path, ".json"))

    if config.per_position:
        base = report_path if report_path is not None else OUTPUT_DIR / "evaluation"
        CSVFormatter().save_per_position(report, _report_sibling(base, ".positions.csv"))
        plot_per_position(report.per_position, _report_sibling(base, ".positions.png"))
    return 0


def cmd_recommend(config):
    """Print `rank token probability` lines for the best next items."""
    model = _load_model(_path(config.model_path))
    partial = [model.catalog.index_of(token) for token in config.prefix]
    top_n = min(config.top_n, model.item_count)
    recommendations = recommend(model, partial, top_n, exclude_seen=config.exclude_seen)
    sys.stdout.write(format_recommendations(recommendations, model.catalog))
    return 0


def cmd_stats(config):
    """Print length statistics of a session file."""
    stats = corpus_stats(read_session_file(_path(config.train_path)))
    text = format_key_values(stats.to_dict())
    sys.stdout.write(text)

    report_path = _path(config.report_path)
    if report_path is not None:
        report_path.parent.mkdir(parents=True, exist_ok=True)
        report_path.write_text(text, encoding="utf-8")
        logger.info(f"Saved statistics to {report_path}")
    return 0


def cmd_experiment(config):
    """Train and compare every model family on one train/test pair."""
    logger.info("Step 1: Reading training and test data")
    train_data = read_session_file(_path(config.train_path))
    test_data = _read_test(_path(config.test_path), train_data.catalog.freeze())

    families = list(EXPERIMENT_FAMILIES)
    if "cluster_classes" not in config.defaulted:
        families.append(("Cluster", "cluster", None, None))

    logger.info("Step 2: Training model families")
    models = {}
    for label, transform, bins, history_length in families:
        family_config = replace(config, transform=transform,
                                bins=bins or config.bins,
                                history_length=history_length or config.history_length)
        try:
            models[label] = train_model(train_data, family_config)
        except TemporalCFError as e:
            logger.warning(f"Skipping {label}: {e.message}")

    logger.info("Step 3: Evaluating model families")
    table = compare_models(models, test_data, EvalConfig(half_life=config.alpha))
    sys.stdout.write(table.to_string(index=False) + "\n")

    report_path = _path(config.report_path) or OUTPUT_DIR / "experiment.csv"
    csv_path = CSVFormatter().save_table(table, report_path)
    plot_model_comparison(table, "cf_accuracy", csv_path.with_name(csv_path.stem + "_cf_accuracy.png"),
                          title="CF accuracy")
    plot_model_comparison(table, "mean_log_prob", csv_path.with_name(csv_path.stem + "_log_score.png"),
                          title="Log score")
    return 0


HANDLERS = {
    "train": cmd_train,
    "evaluate": cmd_evaluate,
    "recommend": cmd_recommend,
    "stats": cmd_stats,
    "experiment": cmd_experiment,
}


def main(argv=None):
    """Run one command and return its exit code."""
    try:
        config = parse_arguments(argv)
    except SystemExit as e:
        return e.code if isinstance(e.code, int) else 1

    start_time = time.time()
    try:
        config.validate().check_paths().resolve()
        logger.info(f"Running {config.command}")
        code = HANDLERS[config.command](config)
    except TemporalCFError as e:
        logger.error(e.message)
        if e.hint:
            logger.info(e.hint)
        return e.exit_code
    except Exception as e:
        logger.exception(f"Unexpected error: {e}")
        return 1

    logger.info(f"{config.command} finished in {time.time() - start_time:.2f} seconds")
    return code


if __name__ == "__main__":
    sys.exit(main())
