# src/models/forest.py
import math

import numpy as np

from config.logging_config import logger
from src.models.decision_tree import TreeGrower, tree_predict_batch
from src.models.scoring import tree_log_score
from src.transforms.variables import item_var, target_var
from src.utils.errors import DataError
from src.utils.helpers import ordered_map


class Forest:
    """One probabilistic decision tree per item, all over one variable space."""

    def __init__(self, trees, space):
        """Initialize the forest.

        Args:
            trees: Sequence of DecisionTree; trees[k - 1] predicts item k
            space: VariableSpace the trees were learned in
        """
        trees = tuple(trees)
        if len(trees) != space.item_count:
            raise DataError(f"A forest over {space.item_count} items needs as many trees, got {len(trees)}")
        self.trees = trees
        self.space = space

    def tree_for(self, item):
        return self.trees[item - 1]

    @property
    def leaf_count(self):
        return sum(tree.leaf_count for tree in self.trees)

    def log_score(self, params):
        return math.fsum(tree_log_score(tree, params) for tree in self.trees)

    def raw_scores(self, evidence):
        """(rows x items) matrix of per-item P(x1) for a sparse evidence matrix."""
        scores = np.empty((evidence.shape[0], len(self.trees)), dtype=np.float64)
        for index, tree in enumerate(self.trees):
            scores[:, index] = tree_predict_batch(tree, evidence)
        return scores

    def __repr__(self):
        return f"Forest({self.space.kind}, {len(self.trees)} trees, {self.leaf_count} leaves)"


def target_for(space, item):
    """The variable the tree of `item` predicts in `space`."""
    return target_var(item) if space.is_expanded else item_var(item)


def learn_forest(space, data, params, threads=1):
    """Learn one tree per item from a CaseSet.

    In the bag space the tree for item j splits on the other items; in an
    expanded space the tree for target j splits on all lag and cache variables.

    Args:
        space: VariableSpace of `data`
        data: CaseSet
        params: ScoreParams
        threads: Trees grown concurrently

    Returns:
        Forest
    """
    if data.space != space:
        raise DataError(f"CaseSet space {data.space} does not match {space}")

    grower = TreeGrower(data, params)
    items = range(1, space.item_count + 1)
    trees = ordered_map(lambda item: grower.grow(target_for(space, item)), items,
                        threads=threads, desc=f"trees ({space.kind})")

    forest = Forest(trees, space)
    logger.info(f"Learned forest over {len(data)} cases: {len(trees)} trees, {forest.leaf_count} leaves "
                f"(kappa={params.kappa})")
    return forest
