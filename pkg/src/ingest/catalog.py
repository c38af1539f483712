# src/ingest/catalog.py
from pathlib import Path

from config.logging_config import logger
from src.utils.errors import DataError, UnknownTokenError
from src.utils.helpers import read_data_lines, sha256_text


class ItemCatalog:
    """Bidirectional map between external item tokens and indices 1..item_count.

    A mutable catalog grows as new tokens are seen; a frozen one rejects them.
    """

    def __init__(self, tokens=(), frozen=False):
        """Initialize the catalog.

        Args:
            tokens: Tokens in index order (first token gets index 1)
            frozen: Reject unseen tokens in `index_of`
        """
        self._index_to_id = []
        self._id_to_index = {}
        self.frozen = False
        for token in tokens:
            self.add(token)
        self.frozen = frozen

    @property
    def item_count(self):
        return len(self._index_to_id)

    @property
    def tokens(self):
        return tuple(self._index_to_id)

    def __len__(self):
        return self.item_count

    def __contains__(self, token):
        return token in self._id_to_index

    def __eq__(self, other):
        return isinstance(other, ItemCatalog) and self._index_to_id == other._index_to_id

    def __repr__(self):
        state = "frozen" if self.frozen else "mutable"
        return f"ItemCatalog({self.item_count} items, {state})"

    def add(self, token):
        """Register a token and return its index."""
        if token in self._id_to_index:
            return self._id_to_index[token]
        if self.frozen:
            raise UnknownTokenError(token)
        self._index_to_id.append(token)
        index = len(self._index_to_id)
        self._id_to_index[token] = index
        return index

    def index_of(self, token, line_number=None):
        """Index for a token, extending the catalog unless frozen."""
        index = self._id_to_index.get(token)
        if index is not None:
            return index
        if self.frozen:
            raise UnknownTokenError(token, line_number=line_number)
        return self.add(token)

    def token_of(self, index):
        """Token for a 1-based index."""
        if not 1 <= index <= self.item_count:
            raise DataError(f"Item index {index} outside catalog range [1, {self.item_count}]")
        return self._index_to_id[index - 1]

    def freeze(self):
        """Return a frozen catalog with the same mapping."""
        return ItemCatalog(self._index_to_id, frozen=True)

    def to_text(self):
        """Catalog file text: one `index<TAB>token` line per item."""
        return "".join(f"{index}\t{token}\n" for index, token in enumerate(self._index_to_id, 1))

    def content_hash(self):
        """SHA-256 of the catalog file text."""
        return sha256_text(self.to_text())


def write_catalog(catalog, file_path):
    """Write a catalog file.

    Args:
        catalog: ItemCatalog to write
        file_path: Destination path

    Returns:
        Path to the written file
    """
    file_path = Path(file_path)
    file_path.parent.mkdir(parents=True, exist_ok=True)
    with open(file_path, 'w', encoding='utf-8') as f:
        f.write(catalog.to_text())
    logger.info(f"Saved catalog of {catalog.item_count} items to {file_path}")
    return file_path


def read_catalog(file_path):
    """Read a catalog file into a frozen ItemCatalog.

    Indices must be exactly 1..n in any line order, tokens unique.
    """
    entries = {}
    for number, line in read_data_lines(file_path):
        parts = line.split('\t')
        if len(parts) != 2 or not parts[0].strip().isdigit() or not parts[1]:
            raise DataError(f"Malformed catalog line {number} in {file_path}: {line!r}")
        index = int(parts[0])
        if index in entries:
            raise DataError(f"Duplicate catalog index {index} in {file_path}")
        entries[index] = parts[1]

    if sorted(entries) != list(range(1, len(entries) + 1)):
        raise DataError(f"Catalog indices in {file_path} are not exactly 1..{len(entries)}")

    tokens = [entries[index] for index in range(1, len(entries) + 1)]
    if len(set(tokens)) != len(tokens):
        raise DataError(f"Duplicate tokens in catalog {file_path}")

    logger.info(f"Read catalog of {len(tokens)} items from {file_path}")
    return ItemCatalog(tokens, frozen=True)
