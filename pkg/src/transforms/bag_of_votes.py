# src/transforms/bag_of_votes.py
from config.logging_config import logger
from src.transforms.variables import VariableSpace, CaseSet, case_from_columns


def bag_columns(votes):
    """Sorted item columns of the distinct items in a vote sequence."""
    return sorted({v - 1 for v in votes})


def bag_of_votes_case(history, item_count):
    """One case marking every item that occurs anywhere in the history.

    Order and multiplicity are discarded.
    """
    space = VariableSpace.bag(item_count)
    return case_from_columns(space, bag_columns(history))


def build_evidence_bag(partial, item_count):
    """Evidence for predicting the next vote after `partial` (may be empty).

    Closed world: items not in the prefix are x0.
    """
    return bag_of_votes_case(partial, item_count)


def bag_case_set(histories, catalog):
    """Bag-of-votes CaseSet with one case per history."""
    space = VariableSpace.bag(catalog.item_count)
    case_set = CaseSet.from_rows(space, [bag_columns(h) for h in histories], catalog)
    logger.debug(f"Bag-of-votes transformation produced {len(case_set)} cases")
    return case_set


def bag_evidence_rows(prefixes):
    """Column lists of bag evidence for a batch of prefixes."""
    return [bag_columns(p) for p in prefixes]
