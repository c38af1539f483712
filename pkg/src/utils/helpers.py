# src/utils/helpers.py
import hashlib
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

from tqdm.auto import tqdm

from config.settings import SHOW_PROGRESS
from config.logging_config import logger
from src.utils.errors import DataError


def read_data_lines(file_path):
    """Read a UTF-8 text file as (line_number, text) pairs.

    Blank lines and `#` comments are dropped; line numbers are 1-based and
    refer to the physical file.

    Args:
        file_path: Path to the text file

    Returns:
        List of (line_number, stripped line) tuples
    """
    file_path = Path(file_path)

    if not file_path.exists():
        raise DataError(f"File not found: {file_path}")

    try:
        with open(file_path, 'r', encoding='utf-8') as f:
            lines = [(number, line.strip()) for number, line in enumerate(f, 1)]
    except (OSError, UnicodeDecodeError) as e:
        raise DataError(f"Cannot read {file_path}: {e}") from e

    lines = [(number, line) for number, line in lines if line and not line.startswith('#')]
    logger.debug(f"Read {len(lines)} data lines from {file_path}")
    return lines


def sha256_text(text):
    """Hex SHA-256 digest of a text string (UTF-8)."""
    return hashlib.sha256(text.encode('utf-8')).hexdigest()


def ordered_map(func, items, threads=1, desc=None):
    """Apply `func` to every item, optionally on a thread pool.

    Results come back in input order whatever the thread count.

    Args:
        func: Callable of one argument
        items: Sequence of arguments
        threads: Worker count; 1 runs inline
        desc: Progress-bar label (None hides the bar)

    Returns:
        List of results
    """
    items = list(items)
    show = SHOW_PROGRESS and desc is not None
    if threads <= 1:
        return [func(item) for item in tqdm(items, desc=desc, disable=not show, leave=False)]

    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(tqdm(pool.map(func, items), total=len(items), desc=desc,
                         disable=not show, leave=False))
