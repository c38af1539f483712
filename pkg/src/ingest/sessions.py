# src/ingest/sessions.py
from dataclasses import dataclass
from pathlib import Path

import numpy as np
import pandas as pd

from config.settings import DEFAULT_TEST_FRACTION
from config.logging_config import logger
from src.ingest.catalog import ItemCatalog
from src.utils.errors import DataError


@dataclass(frozen=True)
class VoteHistory:
    """Ordered votes (1-based item indices) of one user or session."""

    votes: tuple

    def __post_init__(self):
        object.__setattr__(self, "votes", tuple(int(v) for v in self.votes))
        if not self.votes:
            raise DataError("A vote history needs at least one vote")

    def __len__(self):
        return len(self.votes)

    def __iter__(self):
        return iter(self.votes)

    def validate(self, item_count):
        """Raise DataError unless every vote lies in [1, item_count]."""
        for vote in self.votes:
            if not 1 <= vote <= item_count:
                raise DataError(f"Vote {vote} outside catalog range [1, {item_count}]")


@dataclass(frozen=True)
class SessionDataset:
    """Vote histories over one item catalog."""

    catalog: ItemCatalog
    histories: tuple

    def __post_init__(self):
        object.__setattr__(self, "histories", tuple(self.histories))
        for history in self.histories:
            history.validate(self.catalog.item_count)

    @property
    def total_votes(self):
        return sum(len(h) for h in self.histories)

    @property
    def session_count(self):
        return len(self.histories)

    def __len__(self):
        return len(self.histories)

    def lengths(self):
        return np.fromiter((len(h) for h in self.histories), dtype=np.int64, count=len(self.histories))


@dataclass(frozen=True)
class SplitSpec:
    test_fraction: float = DEFAULT_TEST_FRACTION
    seed: int = 0


@dataclass(frozen=True)
class CorpusStats:
    mean_length: float
    median_length: float
    max_length: int
    total_votes: int
    session_count: int
    item_count: int

    def to_dict(self):
        return {
            "mean_length": self.mean_length,
            "median_length": self.median_length,
            "max_length": self.max_length,
            "total_votes": self.total_votes,
            "session_count": self.session_count,
            "item_count": self.item_count,
        }


def parse_sessions(stream, catalog=None):
    """Parse session lines into a SessionDataset.

    Each non-empty, non-comment line is one session: whitespace-separated item
    tokens in time order. Tokens are opaque strings.

    Args:
        stream: Iterable of text lines (an open file, a list of strings)
        catalog: ItemCatalog to resolve tokens with; a new mutable catalog
            when None. A frozen catalog raises UnknownTokenError on unseen tokens.

    Returns:
        SessionDataset
    """
    if catalog is None:
        catalog = ItemCatalog()

    histories = []
    for line_number, raw in enumerate(stream, 1):
        line = raw.strip()
        if not line or line.startswith('#'):
            continue

        votes = []
        for token in line.split():
            if not token.isprintable():
                raise DataError(f"Malformed token {token!r} on line {line_number}")
            votes.append(catalog.index_of(token, line_number=line_number))
        histories.append(VoteHistory(tuple(votes)))

    if not histories:
        raise DataError("No sessions found in input")

    dataset = SessionDataset(catalog=catalog, histories=tuple(histories))
    logger.debug(f"Parsed {dataset.session_count} sessions, {dataset.total_votes} votes, "
                 f"{catalog.item_count} items")
    return dataset


def read_session_file(file_path, catalog=None):
    """Parse a session file from disk (see parse_sessions)."""
    file_path = Path(file_path)
    if not file_path.exists():
        raise DataError(f"Session file not found: {file_path}")

    try:
        with open(file_path, 'r', encoding='utf-8') as f:
            dataset = parse_sessions(f, catalog=catalog)
    except UnicodeDecodeError as e:
        raise DataError(f"Session file {file_path} is not valid UTF-8: {e}") from e

    logger.info(f"Read {dataset.session_count} sessions ({dataset.total_votes} votes) from {file_path}")
    return dataset


def serialize_sessions(dataset):
    """Session file text for a dataset, one history per line."""
    token_of = dataset.catalog.token_of
    return "".join(" ".join(token_of(v) for v in history) + "\n" for history in dataset.histories)


def write_session_file(dataset, file_path):
    """Write a dataset in the session line format."""
    file_path = Path(file_path)
    file_path.parent.mkdir(parents=True, exist_ok=True)
    with open(file_path, 'w', encoding='utf-8') as f:
        f.write(serialize_sessions(dataset))
    logger.info(f"Saved {dataset.session_count} sessions to {file_path}")
    return file_path


def split_train_test(data, spec):
    """Split a dataset by whole sessions.

    Args:
        data: SessionDataset
        spec: SplitSpec with the test fraction and seed

    Returns:
        (train, test) SessionDatasets sharing the input catalog; sessions keep
        their original relative order on each side.
    """
    n = data.session_count
    if n == 0:
        raise DataError("Cannot split an empty dataset")
    if not 0.0 < spec.test_fraction < 1.0:
        raise DataError(f"Test fraction must lie in (0, 1), got {spec.test_fraction}")

    test_count = int(round(n * spec.test_fraction))
    if test_count == 0 or test_count == n:
        raise DataError(f"Test fraction {spec.test_fraction} leaves an empty side for {n} sessions")

    rng = np.random.default_rng(spec.seed)
    permutation = rng.permutation(n)
    test_mask = np.zeros(n, dtype=bool)
    test_mask[permutation[:test_count]] = True

    train = SessionDataset(data.catalog, tuple(h for h, t in zip(data.histories, test_mask) if not t))
    test = SessionDataset(data.catalog, tuple(h for h, t in zip(data.histories, test_mask) if t))
    logger.info(f"Split {n} sessions into {train.session_count} train / {test.session_count} test "
                f"(seed {spec.seed})")
    return train, test


def corpus_stats(data):
    """Length statistics over the histories of a dataset."""
    if data.session_count == 0:
        raise DataError("Cannot compute statistics of an empty dataset")

    lengths = pd.Series(data.lengths())
    return CorpusStats(
        mean_length=float(lengths.mean()),
        median_length=float(lengths.median()),
        max_length=int(lengths.max()),
        total_votes=int(lengths.sum()),
        session_count=int(len(lengths)),
        item_count=data.catalog.item_count,
    )
