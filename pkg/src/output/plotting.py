# src/output/plotting.py
from pathlib import Path

import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt

from config.logging_config import logger


def _save(fig, file_path):
    file_path = Path(file_path)
    file_path.parent.mkdir(parents=True, exist_ok=True)
    fig.tight_layout()
    fig.savefig(file_path, dpi=120, metadata={"Software": None})
    plt.close(fig)
    logger.info(f"Saved plot to {file_path}")
    return file_path


def plot_model_comparison(table, metric, file_path, title=None):
    """Bar chart of one metric column per model (rows in table order).

    Args:
        table: DataFrame with a `model` column and the metric column
        metric: "cf_accuracy" or "mean_log_prob"
        file_path: PNG path

    Returns:
        Path to saved file
    """
    fig, ax = plt.subplots(figsize=(7, 4))
    ax.bar(table["model"], table[metric], color="tab:blue")
    ax.set_xlabel("Model")
    ax.set_ylabel("CF accuracy" if metric == "cf_accuracy" else "Mean log-probability")
    ax.set_title(title or metric)
    if metric == "cf_accuracy":
        ax.set_ylim(0.0, min(1.0, max(table[metric].max() * 1.15, 1e-3)))
    return _save(fig, file_path)


def plot_per_position(per_position, file_path):
    """CF accuracy and mean log-probability against vote position."""
    fig, (top, bottom) = plt.subplots(2, 1, sharex=True, figsize=(7, 6))
    top.plot(per_position["position"], per_position["cf_accuracy"], marker="o")
    top.set_ylabel("CF accuracy")
    bottom.plot(per_position["position"], per_position["mean_log_prob"], marker="o", color="tab:orange")
    bottom.set_ylabel("Mean log-probability")
    bottom.set_xlabel("Vote position")
    top.set_title("Accuracy by position in session")
    return _save(fig, file_path)
