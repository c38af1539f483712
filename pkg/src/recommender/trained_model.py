# src/recommender/trained_model.py
from abc import ABC, abstractmethod

import numpy as np

from src.recommender.recommender import select_bin
from src.transforms.bag_of_votes import bag_evidence_rows
from src.transforms.expansion import expanded_evidence_rows
from src.transforms.variables import rows_to_matrix
from src.utils.errors import DataError


class TrainedModel(ABC):
    """A trained model family plus the catalog and settings it was built with."""

    variant = None

    def __init__(self, catalog, training=None):
        """Initialize the model.

        Args:
            catalog: ItemCatalog of the training corpus
            training: Dict snapshot of the training configuration
        """
        self.catalog = catalog
        self.training = dict(training or {})

    @property
    def item_count(self):
        return self.catalog.item_count

    @abstractmethod
    def raw_scores(self, prefixes):
        """(len(prefixes) x items) unnormalized next-vote scores."""

    def summary(self):
        return {"variant": self.variant, "items": self.item_count}

    def __repr__(self):
        return f"{type(self).__name__}({self.item_count} items)"


class BaselineModel(TrainedModel):
    """Bag-of-votes forest."""

    variant = "baseline"

    def __init__(self, catalog, forest, training=None):
        super().__init__(catalog, training)
        self.forest = forest

    def raw_scores(self, prefixes):
        evidence = rows_to_matrix(bag_evidence_rows(prefixes), self.forest.space.variable_count)
        return self.forest.raw_scores(evidence)

    def summary(self):
        return {**super().summary(), "leaves": self.forest.leaf_count}


class BinnedModel(TrainedModel):
    """One bag-of-votes forest per history-length bin."""

    variant = "binned"

    def __init__(self, catalog, scheme, forests, training=None):
        super().__init__(catalog, training)
        forests = tuple(forests)
        if len(forests) != scheme.bin_count:
            raise DataError(f"Binned model needs {scheme.bin_count} forests, got {len(forests)}")
        self.scheme = scheme
        self.forests = forests

    def raw_scores(self, prefixes):
        prefixes = list(prefixes)
        scores = np.empty((len(prefixes), self.item_count), dtype=np.float64)
        bins = np.array([select_bin(self.scheme, len(p)) for p in prefixes], dtype=np.int64)
        for index, forest in enumerate(self.forests):
            rows = np.flatnonzero(bins == index)
            if len(rows) == 0:
                continue
            evidence = rows_to_matrix(bag_evidence_rows([prefixes[r] for r in rows]),
                                      forest.space.variable_count)
            scores[rows] = forest.raw_scores(evidence)
        return scores

    def summary(self):
        return {**super().summary(), "bounds": self.scheme.bounds,
                "leaves": [forest.leaf_count for forest in self.forests]}


class ExpandedModel(TrainedModel):
    """Forest over target, lag and cache variables."""

    variant = "expanded"

    def __init__(self, catalog, scheme, forest, training=None):
        super().__init__(catalog, training)
        if forest.space.history_length != scheme.history_length:
            raise DataError(f"Forest history length {forest.space.history_length} does not match "
                            f"scheme history length {scheme.history_length}")
        self.scheme = scheme
        self.forest = forest

    def raw_scores(self, prefixes):
        rows = expanded_evidence_rows(prefixes, self.scheme, self.item_count)
        return self.forest.raw_scores(rows_to_matrix(rows, self.forest.space.variable_count))

    def summary(self):
        return {**super().summary(), "history_length": self.scheme.history_length,
                "leaves": self.forest.leaf_count}


class ClusterRecommender(TrainedModel):
    """Latent-class baseline over bag-of-votes evidence."""

    variant = "cluster"

    def __init__(self, catalog, cluster, training=None):
        super().__init__(catalog, training)
        self.cluster = cluster

    def raw_scores(self, prefixes):
        evidence = rows_to_matrix(bag_evidence_rows(prefixes), self.item_count)
        return self.cluster.raw_scores(evidence)

    def summary(self):
        return {**super().summary(), "classes": self.cluster.class_count}
