# src/output/json_formatter.py
import json
from pathlib import Path

import numpy as np

from config.settings import OUTPUT_DIR, MODEL_FORMAT, MODEL_FORMAT_VERSION
from config.logging_config import logger
from src.ingest.catalog import ItemCatalog
from src.models.cluster import ClusterModel
from src.models.decision_tree import DecisionTree, Leaf, Split
from src.models.forest import Forest
from src.models.scoring import LeafCounts
from src.recommender.trained_model import BaselineModel, BinnedModel, ExpandedModel, ClusterRecommender
from src.transforms.binning import BinScheme
from src.transforms.expansion import ExpansionScheme
from src.transforms.variables import VariableId, VariableSpace
from src.utils.errors import CatalogMismatchError, DataError, ModelFormatError


def _encode_node(node):
    if isinstance(node, Leaf):
        return {"leaf": [int(node.counts.n1), int(node.counts.n0)]}
    return {"split": str(node.variable), "x0": _encode_node(node.x0), "x1": _encode_node(node.x1)}


def _decode_node(data, space):
    if "leaf" in data:
        n1, n0 = data["leaf"]
        return Leaf(LeafCounts(int(n1), int(n0)))
    variable = VariableId.parse(data["split"])
    return Split(variable, space.column(variable), _decode_node(data["x0"], space), _decode_node(data["x1"], space))


def _space_from(description, item_count):
    if description["kind"] == "expanded":
        return VariableSpace.expanded(item_count, int(description["history_length"]))
    return VariableSpace.bag(item_count)


def encode_forest(forest):
    return {
        "space": forest.space.describe(),
        "trees": [{"target": str(tree.target), "root": _encode_node(tree.root)} for tree in forest.trees],
    }


def decode_forest(data, item_count):
    space = _space_from(data["space"], item_count)
    trees = [DecisionTree(VariableId.parse(tree["target"]), _decode_node(tree["root"], space), space)
             for tree in data["trees"]]
    return Forest(trees, space)


def model_to_document(model):
    """Self-describing dict for a TrainedModel (no timestamps)."""
    document = {
        "format": MODEL_FORMAT,
        "version": MODEL_FORMAT_VERSION,
        "variant": model.variant,
        "catalog": {"hash": model.catalog.content_hash(), "tokens": list(model.catalog.tokens)},
        "training": model.training,
    }
    if isinstance(model, BaselineModel):
        document["model"] = {"forest": encode_forest(model.forest)}
    elif isinstance(model, BinnedModel):
        document["model"] = {"bins": model.scheme.describe(),
                             "forests": [encode_forest(forest) for forest in model.forests]}
    elif isinstance(model, ExpandedModel):
        document["model"] = {"expansion": model.scheme.describe(), "forest": encode_forest(model.forest)}
    elif isinstance(model, ClusterRecommender):
        cluster = model.cluster
        document["model"] = {
            "class_prior": cluster.class_prior.tolist(),
            "item_prob": cluster.item_prob.tolist(),
            "objective_trace": [float(v) for v in cluster.objective_trace],
        }
    else:
        raise ModelFormatError(f"Cannot encode model of type {type(model).__name__}")
    return document


def model_from_document(document):
    """Rebuild a TrainedModel; verifies format, version and catalog hash."""
    if not isinstance(document, dict):
        raise ModelFormatError("Model document must be a JSON object")
    if document.get("format") != MODEL_FORMAT:
        raise ModelFormatError(f"Not a model document (format {document.get('format')!r})")
    if document.get("version") != MODEL_FORMAT_VERSION:
        raise ModelFormatError(f"Unsupported model version {document.get('version')!r}")

    try:
        catalog = ItemCatalog(document["catalog"]["tokens"], frozen=True)
        if catalog.content_hash() != document["catalog"]["hash"]:
            raise CatalogMismatchError("Model catalog does not match its stored hash")

        variant = document["variant"]
        payload = document["model"]
        training = document.get("training", {})
        g = catalog.item_count

        if variant == BaselineModel.variant:
            return BaselineModel(catalog, decode_forest(payload["forest"], g), training)
        if variant == BinnedModel.variant:
            scheme = BinScheme(tuple(tuple(b) for b in payload["bins"]["bounds"]),
                               bool(payload["bins"]["prefix_mode"]))
            forests = [decode_forest(forest, g) for forest in payload["forests"]]
            return BinnedModel(catalog, scheme, forests, training)
        if variant == ExpandedModel.variant:
            scheme = ExpansionScheme(int(payload["expansion"]["history_length"]))
            return ExpandedModel(catalog, scheme, decode_forest(payload["forest"], g), training)
        if variant == ClusterRecommender.variant:
            cluster = ClusterModel(np.array(payload["class_prior"]), np.array(payload["item_prob"]),
                                   list(payload.get("objective_trace", [])))
            if cluster.item_count != g:
                raise ModelFormatError("Cluster model item count does not match its catalog")
            return ClusterRecommender(catalog, cluster, training)
    except (KeyError, TypeError, ValueError, DataError) as e:
        raise ModelFormatError(f"Malformed model document: {e}") from e

    raise ModelFormatError(f"Unknown model variant {variant!r}")


class JSONFormatter:
    def __init__(self, output_dir=OUTPUT_DIR):
        """Initialize the JSON formatter.

        Args:
            output_dir: Directory relative file names resolve against
        """
        self.output_dir = Path(output_dir)

    def _resolve(self, filename):
        file_path = self.output_dir / filename
        file_path.parent.mkdir(parents=True, exist_ok=True)
        return file_path

    def save_model(self, model, filename):
        """Write a model document.

        Returns:
            Path to saved file
        """
        file_path = self._resolve(filename)
        with open(file_path, 'w', encoding='utf-8') as f:
            json.dump(model_to_document(model), f, indent=2)
            f.write("\n")
        logger.info(f"Saved {model.variant} model to {file_path}")
        return file_path

    def load_model(self, filename):
        """Read a model document back into a TrainedModel."""
        file_path = self.output_dir / filename
        if not file_path.exists():
            raise ModelFormatError(f"Model file not found: {file_path}")
        try:
            with open(file_path, 'r', encoding='utf-8') as f:
                document = json.load(f)
        except (OSError, UnicodeDecodeError, json.JSONDecodeError) as e:
            raise ModelFormatError(f"Cannot read model file {file_path}: {e}") from e

        model = model_from_document(document)
        logger.info(f"Loaded {model.variant} model over {model.item_count} items from {file_path}")
        return model

    def save_report(self, report, filename):
        """Write an EvalReport as JSON.

        Returns:
            Path to saved file
        """
        file_path = self._resolve(filename)
        with open(file_path, 'w', encoding='utf-8') as f:
            json.dump(report.to_dict(), f, indent=2)
            f.write("\n")
        logger.info(f"Saved evaluation report to {file_path}")
        return file_path
