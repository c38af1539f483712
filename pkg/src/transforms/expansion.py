# src/transforms/expansion.py
from dataclasses import dataclass

from config.logging_config import logger
from src.transforms.variables import VariableSpace, CaseSet, case_from_columns
from src.utils.errors import DataError


@dataclass(frozen=True)
class ExpansionScheme:
    history_length: int = 1

    def __post_init__(self):
        if self.history_length < 1:
            raise DataError(f"History length must be at least 1, got {self.history_length}")

    def space(self, item_count):
        return VariableSpace.expanded(item_count, self.history_length)

    def describe(self):
        return {"history_length": self.history_length}


def _predictor_columns(prefix, seen, history_length, item_count):
    """Lag and cache columns for the position right after `prefix`.

    `seen` must be the set of items in `prefix`.
    """
    g = item_count
    columns = []
    for lag in range(1, min(history_length, len(prefix)) + 1):
        columns.append(g * lag + prefix[-lag] - 1)
    cache_base = g * (history_length + 1) - 1
    columns.extend(cache_base + item for item in seen)
    return sorted(columns)


def expanded_rows(votes, history_length, item_count):
    """Column lists of the expanded cases of one history, one per vote."""
    rows = []
    seen = set()
    for position, vote in enumerate(votes):
        predictors = _predictor_columns(votes[:position], seen, history_length, item_count)
        rows.append([vote - 1] + predictors)
        seen.add(vote)
    return rows


def expand_history(history, scheme, item_count):
    """One case per vote of the history.

    The case for vote v at position j sets target v, lag variable (k, d) for
    every d <= l with V^{j-d} = k, and cache variable k for every item seen
    before position j.

    Returns:
        List of BinaryCase, in vote order
    """
    space = scheme.space(item_count)
    return [case_from_columns(space, row)
            for row in expanded_rows(tuple(history), scheme.history_length, item_count)]


def expansion_evidence_columns(partial, scheme, item_count):
    partial = tuple(partial)
    return _predictor_columns(partial, set(partial), scheme.history_length, item_count)


def build_evidence_expanded(partial, scheme, item_count):
    """Lag and cache evidence for predicting the vote after `partial`.

    Equals the predictor part of the case expand_history would create for
    position len(partial) + 1; no target is set.
    """
    space = scheme.space(item_count)
    return case_from_columns(space, expansion_evidence_columns(partial, scheme, item_count))


def expanded_case_set(histories, scheme, catalog):
    """Expanded CaseSet over all votes of all histories (input order)."""
    g = catalog.item_count
    rows = []
    for history in histories:
        rows.extend(expanded_rows(history.votes, scheme.history_length, g))
    case_set = CaseSet.from_rows(scheme.space(g), rows, catalog)
    logger.debug(f"Data expansion (l={scheme.history_length}) produced {len(case_set)} cases "
                 f"over {case_set.space.variable_count} variables")
    return case_set


def expanded_evidence_rows(prefixes, scheme, item_count):
    """Column lists of expanded evidence for a batch of prefixes."""
    return [expansion_evidence_columns(p, scheme, item_count) for p in prefixes]
