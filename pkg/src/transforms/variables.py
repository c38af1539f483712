# src/transforms/variables.py
"""Binary variables, sparse cases and case sets.

A variable space fixes a column layout so that cases can be stored as rows of
a sparse 0/1 matrix:

- bag space: column k-1 is the item variable of item k.
- expanded space with history length l: targets occupy columns [0, g),
  lag d (1 <= d <= l) occupies [g*d, g*(d+1)), cache variables
  [g*(l+1), g*(l+2)), where g is the item count.
"""
from dataclasses import dataclass
from enum import Enum

import numpy as np
import scipy.sparse as sp

from src.utils.errors import DataError


class Role(Enum):
    ITEM = "item"
    TARGET = "target"
    LAG = "lag"
    CACHE = "cache"

    @property
    def rank(self):
        return _ROLE_ORDER[self]


_ROLE_ORDER = {Role.ITEM: 0, Role.TARGET: 1, Role.LAG: 2, Role.CACHE: 3}


@dataclass(frozen=True, order=False)
class VariableId:
    role: Role
    item: int
    lag: int = 0

    def __post_init__(self):
        if (self.role is Role.LAG) != (self.lag >= 1):
            raise ValueError(f"Lag offset {self.lag} does not fit role {self.role.value}")

    def sort_key(self):
        """Tie-break order: role, then item index, then lag offset."""
        return self.role.rank, self.item, self.lag

    def __str__(self):
        if self.role is Role.LAG:
            return f"lag:{self.item}:{self.lag}"
        return f"{self.role.value}:{self.item}"

    @classmethod
    def parse(cls, text):
        """Inverse of str(): `role:item[:lag]`."""
        parts = text.split(":")
        try:
            role = Role(parts[0])
            if role is Role.LAG:
                if len(parts) != 3:
                    raise ValueError(text)
                return cls(role, int(parts[1]), int(parts[2]))
            if len(parts) != 2:
                raise ValueError(text)
            return cls(role, int(parts[1]))
        except ValueError as e:
            raise DataError(f"Malformed variable token {text!r}") from e


def item_var(k):
    return VariableId(Role.ITEM, k)


def target_var(k):
    return VariableId(Role.TARGET, k)


def lag_var(k, d):
    return VariableId(Role.LAG, k, d)


def cache_var(k):
    return VariableId(Role.CACHE, k)


@dataclass(frozen=True)
class VariableSpace:
    """Descriptor of a variable space: `bag` or `expanded` with history length l."""

    kind: str
    item_count: int
    history_length: int = 0

    def __post_init__(self):
        if self.kind not in ("bag", "expanded"):
            raise ValueError(f"Unknown variable space {self.kind!r}")
        if self.item_count < 1:
            raise ValueError("A variable space needs at least one item")
        if self.kind == "expanded" and self.history_length < 1:
            raise ValueError("Expanded spaces need a history length >= 1")
        if self.kind == "bag" and self.history_length != 0:
            raise ValueError("Bag spaces have no history length")

    @classmethod
    def bag(cls, item_count):
        return cls("bag", item_count)

    @classmethod
    def expanded(cls, item_count, history_length):
        return cls("expanded", item_count, history_length)

    @property
    def is_expanded(self):
        return self.kind == "expanded"

    @property
    def variable_count(self):
        if self.is_expanded:
            return self.item_count * (self.history_length + 2)
        return self.item_count

    def describe(self):
        if self.is_expanded:
            return {"kind": "expanded", "history_length": self.history_length}
        return {"kind": "bag"}

    def column(self, var):
        """Matrix column of a variable; DataError if it does not belong here."""
        g = self.item_count
        if not 1 <= var.item <= g:
            raise DataError(f"Variable {var} outside item range [1, {g}]")
        if self.is_expanded:
            if var.role is Role.TARGET:
                return var.item - 1
            if var.role is Role.LAG and var.lag <= self.history_length:
                return g * var.lag + var.item - 1
            if var.role is Role.CACHE:
                return g * (self.history_length + 1) + var.item - 1
        elif var.role is Role.ITEM:
            return var.item - 1
        raise DataError(f"Variable {var} is not valid in the {self.kind} space")

    def variable(self, column):
        """Variable for a matrix column."""
        g = self.item_count
        if not 0 <= column < self.variable_count:
            raise DataError(f"Column {column} outside the {self.kind} space")
        if not self.is_expanded:
            return item_var(column + 1)
        block, offset = divmod(column, g)
        if block == 0:
            return target_var(offset + 1)
        if block <= self.history_length:
            return lag_var(offset + 1, block)
        return cache_var(offset + 1)

    def target_column(self, item):
        """Column of the variable a tree for `item` predicts."""
        return item - 1

    def predictor_columns(self, item):
        """Candidate split columns for the tree of `item`.

        Bag space: every other item. Expanded space: all lag and cache
        variables, no targets.
        """
        g = self.item_count
        if self.is_expanded:
            return np.arange(g, self.variable_count)
        return np.delete(np.arange(g), item - 1)

    def in_tie_break_order(self, columns):
        """Columns reordered by variable role, then item index, then lag offset."""
        columns = np.asarray(columns, dtype=np.int64)
        g = self.item_count
        if not self.is_expanded:
            return np.sort(columns)
        block, offset = np.divmod(columns, g)
        role = np.where(block == 0, Role.TARGET.rank,
                        np.where(block <= self.history_length, Role.LAG.rank, Role.CACHE.rank))
        lag = np.where(role == Role.LAG.rank, block, 0)
        return columns[np.lexsort((lag, offset, role))]


@dataclass(frozen=True)
class BinaryCase:
    """One case: the set of variables whose value is x1; all others are x0."""

    positives: frozenset

    def __post_init__(self):
        object.__setattr__(self, "positives", frozenset(self.positives))

    def __contains__(self, var):
        return var in self.positives

    def __len__(self):
        return len(self.positives)

    def tokens(self):
        """Debug form: sorted `role:item[:lag]` tokens."""
        return " ".join(str(v) for v in sorted(self.positives, key=VariableId.sort_key))


def case_from_columns(space, columns):
    return BinaryCase(frozenset(space.variable(int(c)) for c in columns))


def rows_to_matrix(rows, n_columns):
    """CSR 0/1 matrix from a list of column-index lists (one list per row)."""
    indptr = np.zeros(len(rows) + 1, dtype=np.int64)
    if rows:
        indptr[1:] = np.cumsum([len(r) for r in rows])
    indices = np.fromiter((c for r in rows for c in r), dtype=np.int32, count=int(indptr[-1]))
    data = np.ones(len(indices), dtype=np.int32)
    matrix = sp.csr_matrix((data, indices, indptr), shape=(len(rows), n_columns))
    matrix.sort_indices()
    return matrix


class CaseSet:
    """Cases of one variable space, stored as a sparse CSR 0/1 matrix."""

    def __init__(self, space, matrix, catalog=None):
        """Initialize the case set.

        Args:
            space: VariableSpace the columns refer to
            matrix: scipy.sparse matrix, one row per case
            catalog: ItemCatalog the item indices refer to
        """
        matrix = sp.csr_matrix(matrix)
        if matrix.shape[1] != space.variable_count:
            raise DataError(f"Case matrix has {matrix.shape[1]} columns, "
                            f"space needs {space.variable_count}")
        self.space = space
        self.matrix = matrix
        self.catalog = catalog

    @classmethod
    def from_rows(cls, space, rows, catalog=None):
        return cls(space, rows_to_matrix(rows, space.variable_count), catalog)

    @classmethod
    def from_cases(cls, space, cases, catalog=None):
        rows = [sorted(space.column(v) for v in case.positives) for case in cases]
        return cls.from_rows(space, rows, catalog)

    def __len__(self):
        return self.matrix.shape[0]

    @property
    def cases(self):
        matrix = self.matrix
        return [case_from_columns(self.space, matrix.indices[matrix.indptr[i]:matrix.indptr[i + 1]])
                for i in range(matrix.shape[0])]

    def dump(self):
        """Debug text: one line of positive-variable tokens per case."""
        return "".join(case.tokens() + "\n" for case in self.cases)
