# src/models/decision_tree.py
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp

from config.logging_config import logger
from src.models.scoring import LeafCounts, split_gain
from src.utils.errors import DataError


@dataclass
class Leaf:
    counts: LeafCounts = field(default_factory=LeafCounts)


@dataclass
class Split:
    """Binary split: cases with `variable` = x0 go left, x1 go right."""

    variable: object
    column: int
    x0: object
    x1: object


class DecisionTree:
    """Probabilistic decision tree for one binary target variable."""

    def __init__(self, target, root, space):
        """Initialize the tree.

        Args:
            target: VariableId the tree predicts
            root: Leaf or Split
            space: VariableSpace split columns refer to
        """
        self.target = target
        self.root = root
        self.space = space

    def leaves(self):
        stack = [self.root]
        while stack:
            node = stack.pop()
            if isinstance(node, Leaf):
                yield node
            else:
                stack.append(node.x1)
                stack.append(node.x0)

    @property
    def leaf_count(self):
        return sum(1 for _ in self.leaves())

    @property
    def free_param_count(self):
        # one Bernoulli parameter per leaf
        return self.leaf_count

    @property
    def depth(self):
        deepest = 0
        stack = [(self.root, 0)]
        while stack:
            node, depth = stack.pop()
            if isinstance(node, Split):
                stack.append((node.x0, depth + 1))
                stack.append((node.x1, depth + 1))
            else:
                deepest = max(deepest, depth)
        return deepest

    def paths(self):
        """(split variables on the path, leaf) for every leaf, left to right."""
        stack = [(self.root, ())]
        while stack:
            node, path = stack.pop()
            if isinstance(node, Leaf):
                yield path, node
            else:
                stack.append((node.x1, path + (node.variable,)))
                stack.append((node.x0, path + (node.variable,)))

    def __repr__(self):
        return f"DecisionTree(target={self.target}, leaves={self.leaf_count})"


def route_batch(tree, evidence):
    """Route every row of a sparse evidence matrix to its leaf.

    Returns:
        List of (Leaf, row indices) pairs; rows of different leaves are disjoint.
    """
    evidence = sp.csc_matrix(evidence)
    n_rows = evidence.shape[0]
    routed = []
    column_cache = {}
    stack = [(tree.root, np.arange(n_rows))]
    while stack:
        node, rows = stack.pop()
        if isinstance(node, Leaf):
            routed.append((node, rows))
            continue
        positive = column_cache.get(node.column)
        if positive is None:
            positive = np.zeros(n_rows, dtype=bool)
            positive[evidence.indices[evidence.indptr[node.column]:evidence.indptr[node.column + 1]]] = True
            column_cache[node.column] = positive
        mask = positive[rows]
        stack.append((node.x1, rows[mask]))
        stack.append((node.x0, rows[~mask]))
    return routed


def tree_predict(tree, evidence):
    """P(target = x1) for one case of evidence (closed world).

    Args:
        tree: DecisionTree
        evidence: BinaryCase; variables not listed are x0

    Returns:
        Posterior mean (n1 + 1) / (n1 + n0 + 2) of the reached leaf
    """
    node = tree.root
    while isinstance(node, Split):
        node = node.x1 if node.variable in evidence.positives else node.x0
    return node.counts.posterior_mean


def tree_predict_batch(tree, evidence):
    """Vector of P(target = x1), one entry per row of a sparse evidence matrix."""
    result = np.empty(evidence.shape[0], dtype=np.float64)
    for leaf, rows in route_batch(tree, evidence):
        result[rows] = leaf.counts.posterior_mean
    return result


class _OpenLeaf:
    """Growth state of one leaf: its rows and per-candidate counts."""

    __slots__ = ("leaf", "rows", "n1", "n0", "totals", "positives", "used",
                 "depth", "path", "parent", "branch", "best")

    def __init__(self, rows, n1, n0, totals, positives, used, depth, path, parent, branch):
        self.leaf = Leaf(LeafCounts(int(n1), int(n0)))
        self.rows = rows
        self.n1 = n1
        self.n0 = n0
        self.totals = totals
        self.positives = positives
        self.used = used
        self.depth = depth
        self.path = path
        self.parent = parent
        self.branch = branch
        self.best = None


class TreeGrower:
    """Greedy Bayesian-score tree growth over one sparse CaseSet.

    Sparse column sums are taken once per CaseSet and shared by every tree
    grown from it.
    """

    def __init__(self, case_set, params):
        self.case_set = case_set
        self.space = case_set.space
        self.params = params
        self.log_kappa = params.log_kappa
        self.rows = case_set.matrix
        self.columns = sp.csc_matrix(case_set.matrix)
        self.column_totals = np.asarray(self.rows.sum(axis=0), dtype=np.int64).ravel()

    def _column_rows(self, column):
        return self.columns.indices[self.columns.indptr[column]:self.columns.indptr[column + 1]]

    def _row_sums(self, rows):
        if len(rows) == 0:
            return np.zeros(self.rows.shape[1], dtype=np.int64)
        return np.asarray(self.rows[rows].sum(axis=0), dtype=np.int64).ravel()

    def _best_split(self, node):
        if len(node.used) == 0 or node.n1 + node.n0 == 0:
            return None
        b1 = node.positives
        b0 = node.totals - node.positives
        gains = split_gain(node.n1, node.n0, b1, b0, self.log_kappa)
        gains = np.where(node.used, -np.inf, gains)
        best = int(np.argmax(gains))
        if gains[best] > 0.0:
            return float(gains[best]), best
        return None

    def grow(self, target, candidates=None):
        """Grow the tree for `target`.

        Repeatedly applies the (leaf, candidate) split with the largest
        strictly positive score gain; ties go to the candidate first in
        (role, item, lag) order, then to the shallower, leftmost leaf.

        Args:
            target: VariableId to predict
            candidates: Iterable of VariableId allowed as splits; the space's
                predictor variables for the target's item when None

        Returns:
            DecisionTree
        """
        target_column = self.space.column(target)
        if candidates is None:
            candidate_columns = self.space.predictor_columns(target.item)
        else:
            candidate_columns = np.array([self.space.column(v) for v in candidates], dtype=np.int64)
        if target_column in set(candidate_columns.tolist()):
            raise DataError(f"Target {target} cannot be its own split candidate")
        candidate_columns = self.space.in_tie_break_order(candidate_columns)

        n_cases = self.rows.shape[0]
        is_positive = np.zeros(n_cases, dtype=bool)
        is_positive[self._column_rows(target_column)] = True

        n1 = int(is_positive.sum())
        root = _OpenLeaf(
            rows=np.arange(n_cases),
            n1=n1,
            n0=n_cases - n1,
            totals=self.column_totals[candidate_columns],
            positives=self._row_sums(np.flatnonzero(is_positive))[candidate_columns],
            used=np.zeros(len(candidate_columns), dtype=bool),
            depth=0, path=(), parent=None, branch=None,
        )
        root.best = self._best_split(root)
        tree_root = root.leaf
        frontier = [root] if root.best is not None else []

        while frontier:
            node = min(frontier, key=lambda o: (-o.best[0], o.best[1], o.depth, o.path))
            frontier.remove(node)
            index = node.best[1]
            column = int(candidate_columns[index])

            mask = np.isin(node.rows, self._column_rows(column), assume_unique=True)
            rows1 = node.rows[mask]
            rows0 = node.rows[~mask]
            totals1 = self._row_sums(rows1)[candidate_columns]
            positives1 = self._row_sums(rows1[is_positive[rows1]])[candidate_columns]
            used = node.used.copy()
            used[index] = True

            n1_right = int(node.positives[index])
            n0_right = int(node.totals[index]) - n1_right
            left = _OpenLeaf(rows0, node.n1 - n1_right, node.n0 - n0_right,
                             node.totals - totals1, node.positives - positives1, used,
                             node.depth + 1, node.path + (0,), None, "x0")
            right = _OpenLeaf(rows1, n1_right, n0_right, totals1, positives1, used,
                              node.depth + 1, node.path + (1,), None, "x1")

            split = Split(self.space.variable(column), column, left.leaf, right.leaf)
            if node.parent is None:
                tree_root = split
            else:
                setattr(node.parent, node.branch, split)
            left.parent = right.parent = split

            for child in (left, right):
                child.best = self._best_split(child)
                if child.best is not None:
                    frontier.append(child)

        tree = DecisionTree(target, tree_root, self.space)
        logger.debug(f"Grew tree for {target}: {tree.leaf_count} leaves, depth {tree.depth}")
        return tree


def grow_tree(target, candidates, data, params):
    """Greedy Bayesian-score tree for `target` from a CaseSet.

    Args:
        target: VariableId to predict
        candidates: Set of VariableId the tree may split on (target excluded)
        data: CaseSet
        params: ScoreParams

    Returns:
        DecisionTree
    """
    return TreeGrower(data, params).grow(target, candidates)
