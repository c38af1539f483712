# src/models/cluster.py
import math
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp
from scipy.special import logsumexp

from config.settings import (
    DEFAULT_CLUSTER_CLASSES,
    EM_MAX_ITERATIONS,
    EM_TOLERANCE,
    EM_SMOOTHING,
    EM_RESTARTS,
    DEFAULT_SEED,
)
from config.logging_config import logger
from src.utils.errors import DataError, UsageError


@dataclass(frozen=True)
class EMConfig:
    class_count: int = DEFAULT_CLUSTER_CLASSES
    max_iterations: int = EM_MAX_ITERATIONS
    tolerance: float = EM_TOLERANCE
    seed: int = DEFAULT_SEED
    smoothing: float = EM_SMOOTHING
    restarts: int = EM_RESTARTS

    def __post_init__(self):
        if self.class_count < 1:
            raise UsageError(f"Class count must be at least 1, got {self.class_count}")
        if self.tolerance <= 0:
            raise UsageError(f"EM tolerance must be positive, got {self.tolerance}")
        if self.smoothing <= 0:
            raise UsageError(f"EM smoothing must be positive, got {self.smoothing}")
        if self.max_iterations < 1 or self.restarts < 1:
            raise UsageError("EM needs at least one iteration and one restart")


@dataclass
class ClusterModel:
    """Latent-class model: P(c, x) = P(c) prod_k P(x_k | c) over binary items."""

    class_prior: np.ndarray
    item_prob: np.ndarray
    objective_trace: list = field(default_factory=list)

    def __post_init__(self):
        self.class_prior = np.asarray(self.class_prior, dtype=np.float64)
        self.item_prob = np.atleast_2d(np.asarray(self.item_prob, dtype=np.float64))
        if self.item_prob.shape[0] != len(self.class_prior):
            raise DataError("Item probabilities need one row per class")
        if abs(self.class_prior.sum() - 1.0) > 1e-9 or (self.class_prior <= 0).any():
            raise DataError("Class prior must be a positive distribution")
        if ((self.item_prob <= 0) | (self.item_prob >= 1)).any():
            raise DataError("Item probabilities must lie strictly inside (0, 1)")

    @property
    def class_count(self):
        return len(self.class_prior)

    @property
    def item_count(self):
        return self.item_prob.shape[1]

    def _log_terms(self):
        log_on = np.log(self.item_prob)
        log_off = np.log1p(-self.item_prob)
        return log_on, log_off

    def joint_log(self, matrix):
        """(rows x classes) ln P(C = c, case) for a sparse 0/1 case matrix."""
        log_on, log_off = self._log_terms()
        weights = (log_on - log_off).T
        base = np.log(self.class_prior) + log_off.sum(axis=1)
        return np.asarray(sp.csr_matrix(matrix, dtype=np.float64) @ weights) + base

    def class_posterior(self, matrix):
        """(rows x classes) P(C = c | case); rows sum to one."""
        joint = self.joint_log(matrix)
        return np.exp(joint - logsumexp(joint, axis=1, keepdims=True))

    def raw_scores(self, evidence):
        """(rows x items) P(x_j = x1 | evidence on all items but j)."""
        log_on, log_off = self._log_terms()
        dense = sp.csr_matrix(evidence).toarray() > 0
        joint = self.joint_log(evidence)

        # online log-sum-exp over classes keeps memory at rows x items
        running_max = np.full(dense.shape, -np.inf)
        denominator = np.zeros(dense.shape)
        numerator = np.zeros(dense.shape)
        for c in range(self.class_count):
            term = joint[:, [c]] - np.where(dense, log_on[c], log_off[c])
            new_max = np.maximum(running_max, term)
            rescale = np.exp(running_max - new_max)
            weight = np.exp(term - new_max)
            denominator = denominator * rescale + weight
            numerator = numerator * rescale + weight * self.item_prob[c]
            running_max = new_max
        return numerator / denominator


def _m_step(matrix, responsibilities, smoothing):
    class_mass = responsibilities.sum(axis=0)
    n_cases, class_count = responsibilities.shape
    prior = (class_mass + smoothing) / (n_cases + class_count * smoothing)
    positives = np.asarray(matrix.T @ responsibilities).T
    item_prob = (positives + smoothing) / (class_mass[:, None] + 2.0 * smoothing)
    return prior, item_prob


def _log_prior(model, smoothing):
    log_on, log_off = model._log_terms()
    return smoothing * (np.log(model.class_prior).sum() + log_on.sum() + log_off.sum())


def cluster_loglik(model, data):
    """Sum over cases of ln sum_c P(C = c, case)."""
    matrix = data.matrix if hasattr(data, "matrix") else data
    if matrix.shape[0] == 0:
        return 0.0
    return math.fsum(logsumexp(model.joint_log(matrix), axis=1))


def _fit_once(matrix, cfg, restart):
    rng = np.random.default_rng([cfg.seed, restart])
    n_cases = matrix.shape[0]
    responsibilities = rng.dirichlet(np.ones(cfg.class_count), size=n_cases) if cfg.class_count > 1 \
        else np.ones((n_cases, 1))

    trace = []
    model = None
    for iteration in range(cfg.max_iterations):
        prior, item_prob = _m_step(matrix, responsibilities, cfg.smoothing)
        model = ClusterModel(prior, item_prob)
        joint = model.joint_log(matrix)
        row_log = logsumexp(joint, axis=1, keepdims=True)
        objective = math.fsum(row_log.ravel()) + _log_prior(model, cfg.smoothing)
        trace.append(objective)
        responsibilities = np.exp(joint - row_log)

        if iteration > 0 and trace[-1] - trace[-2] < cfg.tolerance:
            break

    model.objective_trace = trace
    logger.debug(f"EM restart {restart}: {len(trace)} iterations, objective {trace[-1]:.4f}")
    return model


def em_fit(data, cfg):
    """Fit a latent-class model to bag-of-votes cases with EM.

    The M-step is a MAP step with `cfg.smoothing` pseudo-counts, so the
    penalized log-likelihood recorded in `objective_trace` never decreases.

    Args:
        data: CaseSet in the bag space
        cfg: EMConfig

    Returns:
        ClusterModel with the best final objective over `cfg.restarts` starts
    """
    if data.space.is_expanded:
        raise DataError("The cluster model is learned from bag-of-votes cases")

    matrix = sp.csr_matrix(data.matrix, dtype=np.float64)
    best = None
    for restart in range(cfg.restarts):
        model = _fit_once(matrix, cfg, restart)
        if best is None or model.objective_trace[-1] > best.objective_trace[-1]:
            best = model

    logger.info(f"Fitted {cfg.class_count}-class model on {matrix.shape[0]} cases "
                f"({len(best.objective_trace)} iterations, objective {best.objective_trace[-1]:.4f})")
    return best


def cluster_predict(model, evidence, item):
    """P(x_item = x1 | evidence) with the item's own evidence left out.

    Args:
        model: ClusterModel
        evidence: BinaryCase over item variables (closed world)
        item: 1-based item index

    Returns:
        sum_c P(c | evidence without item) P(x_item = x1 | c)
    """
    log_on, log_off = model._log_terms()
    present = np.zeros(model.item_count, dtype=bool)
    for var in evidence.positives:
        present[var.item - 1] = True
    present[item - 1] = False

    column = item - 1
    logits = np.log(model.class_prior) + np.where(present, log_on, log_off).sum(axis=1) \
        - log_off[:, column]
    posterior = np.exp(logits - logsumexp(logits))
    return float(posterior @ model.item_prob[:, column])
