# src/models/scoring.py
import math
from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln

from config.settings import DEFAULT_KAPPA
from src.utils.errors import UsageError


@dataclass(frozen=True)
class ScoreParams:
    """Bayesian score parameters: model prior kappa^f over f leaves."""

    kappa: float = DEFAULT_KAPPA

    def __post_init__(self):
        if not 0.0 < self.kappa <= 1.0:
            raise UsageError(f"kappa must lie in (0, 1], got {self.kappa}")

    @property
    def log_kappa(self):
        return math.log(self.kappa)


@dataclass(frozen=True)
class LeafCounts:
    n1: int = 0
    n0: int = 0

    @property
    def total(self):
        return self.n1 + self.n0

    @property
    def posterior_mean(self):
        """Predictive P(x1) under the flat Beta(1, 1) prior."""
        return (self.n1 + 1.0) / (self.n1 + self.n0 + 2.0)


def leaf_log_marginal(n1, n0):
    """ln[n1! n0! / (n1 + n0 + 1)!], the Beta(1, 1) marginal likelihood.

    Works elementwise on numpy arrays.
    """
    n1 = np.asarray(n1, dtype=np.float64)
    n0 = np.asarray(n0, dtype=np.float64)
    result = gammaln(n1 + 1.0) + gammaln(n0 + 1.0) - gammaln(n1 + n0 + 2.0)
    return float(result) if result.ndim == 0 else result


def split_gain(n1, n0, b1, b0, log_kappa):
    """Score change from splitting a leaf (n1, n0) into (n1-b1, n0-b0) and (b1, b0).

    One extra leaf costs ln kappa. Vectorized over candidate splits.
    """
    return (log_kappa
            + leaf_log_marginal(n1 - b1, n0 - b0)
            + leaf_log_marginal(b1, b0)
            - leaf_log_marginal(n1, n0))


def tree_log_score(tree, params):
    """f ln kappa + sum of leaf log marginals, f the number of leaves."""
    marginal = math.fsum(leaf_log_marginal(leaf.counts.n1, leaf.counts.n0) for leaf in tree.leaves())
    return tree.free_param_count * params.log_kappa + marginal
