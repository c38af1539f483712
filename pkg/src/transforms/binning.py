# src/transforms/binning.py
from dataclasses import dataclass

import numpy as np

from config.logging_config import logger
from src.transforms.bag_of_votes import bag_columns
from src.transforms.variables import VariableSpace, CaseSet
from src.utils.errors import DataError


@dataclass(frozen=True)
class BinScheme:
    """Contiguous history-length intervals covering [1, inf).

    `bounds` holds (lo, hi) pairs; the last hi is None (unbounded).
    """

    bounds: tuple
    prefix_mode: bool = True

    def __post_init__(self):
        bounds = tuple((int(lo), None if hi is None else int(hi)) for lo, hi in self.bounds)
        object.__setattr__(self, "bounds", bounds)
        if not bounds or bounds[0][0] != 1 or bounds[-1][1] is not None:
            raise DataError(f"Bin bounds must start at 1 and end unbounded: {bounds}")
        for (lo, hi), (next_lo, _) in zip(bounds, bounds[1:]):
            if hi is None or hi < lo or next_lo != hi + 1:
                raise DataError(f"Bin bounds are not contiguous and ascending: {bounds}")

    @property
    def bin_count(self):
        return len(self.bounds)

    def locate(self, length):
        """Index of the bin whose interval contains `length` (>= 1)."""
        for index, (lo, hi) in enumerate(self.bounds):
            if hi is None or length <= hi:
                return index
        return self.bin_count - 1

    def describe(self):
        return {"bounds": [[lo, hi] for lo, hi in self.bounds], "prefix_mode": self.prefix_mode}


def compute_bin_bounds(train_data, bin_count, prefix_mode=True):
    """Choose bin bounds that balance the original-history vote mass per bin.

    Walks the distinct history lengths in ascending order, accumulating vote
    mass (length x count), and closes a bin at the first length where the
    accumulated mass meets the quota remaining_mass / remaining_bins. A bin is
    also closed when exactly enough distinct lengths remain to give every later
    bin one. The last bin is unbounded.

    Args:
        train_data: SessionDataset whose original histories set the masses
        bin_count: Number of bins B
        prefix_mode: Stored on the scheme; does not affect the bounds

    Returns:
        BinScheme
    """
    if bin_count < 1:
        raise DataError(f"Bin count must be at least 1, got {bin_count}")
    if train_data.session_count == 0:
        raise DataError("Cannot compute bin bounds of an empty dataset")

    distinct, counts = np.unique(train_data.lengths(), return_counts=True)
    if bin_count > len(distinct):
        raise DataError(f"{bin_count} bins requested but the data has only "
                        f"{len(distinct)} distinct history lengths")

    masses = distinct * counts
    remaining_mass = float(masses.sum())
    remaining_bins = bin_count
    bounds = []
    lo = 1
    accumulated = 0.0

    for position, (length, mass) in enumerate(zip(distinct, masses)):
        if remaining_bins == 1:
            break
        accumulated += mass
        quota = remaining_mass / remaining_bins
        lengths_left = len(distinct) - position - 1
        if accumulated >= quota or lengths_left == remaining_bins - 1:
            bounds.append((lo, int(length)))
            lo = int(length) + 1
            remaining_mass -= accumulated
            remaining_bins -= 1
            accumulated = 0.0

    bounds.append((lo, None))
    scheme = BinScheme(tuple(bounds), prefix_mode)
    logger.info(f"Bin bounds for {bin_count} bins: {scheme.bounds}, "
                f"vote masses {bin_masses(train_data, scheme)}")
    return scheme


def bin_masses(data, scheme):
    """Original-history vote mass per bin."""
    masses = [0] * scheme.bin_count
    for history in data.histories:
        masses[scheme.locate(len(history))] += len(history)
    return masses


def bin_assign(data, scheme):
    """Bag-of-votes CaseSets, one per bin.

    Without prefix mode every history goes to the bin containing its length.
    In prefix mode a history in bin b also contributes, to every earlier bin
    b' < b, the case of its first hi(b') votes.

    Returns:
        List of CaseSet, in bin order
    """
    rows = [[] for _ in range(scheme.bin_count)]
    for history in data.histories:
        votes = history.votes
        home = scheme.locate(len(votes))
        if scheme.prefix_mode:
            for earlier in range(home):
                rows[earlier].append(bag_columns(votes[:scheme.bounds[earlier][1]]))
        rows[home].append(bag_columns(votes))

    space = VariableSpace.bag(data.catalog.item_count)
    case_sets = [CaseSet.from_rows(space, bin_rows, data.catalog) for bin_rows in rows]
    for index, case_set in enumerate(case_sets):
        if len(case_set) == 0:
            logger.warning(f"Bin {index + 1} {scheme.bounds[index]} received no cases")
    logger.debug(f"Bin case counts: {[len(c) for c in case_sets]}")
    return case_sets
