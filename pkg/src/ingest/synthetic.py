# src/ingest/synthetic.py
"""Seeded synthetic session corpora.

Used by the test-suite to check that order-aware and length-aware models
pick up the structure they are built for.
"""
import numpy as np

from src.ingest.catalog import ItemCatalog
from src.ingest.sessions import SessionDataset, VoteHistory


def _numbered_catalog(item_count):
    # token "k" <-> index k
    return ItemCatalog([str(k) for k in range(1, item_count + 1)])


def _zipf_weights(size, exponent=1.0):
    weights = 1.0 / np.arange(1, size + 1) ** exponent
    return weights / weights.sum()


def markov_chain_sessions(session_count, item_count=20, mean_length=4.0, follow_prob=0.9, seed=0):
    """Sessions from a first-order Markov chain with skewed transitions.

    Items sit on a random cycle; from every item the chain moves to its cycle
    successor with probability `follow_prob` and to any other item uniformly
    otherwise. Start items follow a Zipf law over a random item order and
    session lengths are geometric with the given mean.
    """
    rng = np.random.default_rng(seed)
    order = rng.permutation(item_count)
    successor = np.empty(item_count, dtype=np.int64)
    successor[order] = np.roll(order, -1)

    start_probs = np.empty(item_count)
    start_probs[rng.permutation(item_count)] = _zipf_weights(item_count)

    lengths = rng.geometric(1.0 / mean_length, size=session_count)
    histories = []
    for length in lengths:
        current = rng.choice(item_count, p=start_probs)
        votes = [current]
        for _ in range(length - 1):
            if rng.random() < follow_prob:
                current = successor[current]
            else:
                others = rng.integers(item_count - 1)
                current = others if others < successor[current] else others + 1
            votes.append(current)
        histories.append(VoteHistory(tuple(int(v) + 1 for v in votes)))

    return SessionDataset(_numbered_catalog(item_count), tuple(histories))


def length_dependent_sessions(session_count, mean_length=4.0, short_max_length=3,
                              short_items=5, item_count=20, seed=0):
    """Sessions whose item distribution depends on the session length.

    Sessions of at most `short_max_length` votes draw items 1..short_items,
    longer sessions draw the remaining items; draws are iid within a session
    with Zipf-skewed popularity.
    """
    rng = np.random.default_rng(seed)
    short_pool = np.arange(1, short_items + 1)
    long_pool = np.arange(short_items + 1, item_count + 1)
    short_probs = _zipf_weights(len(short_pool))
    long_probs = _zipf_weights(len(long_pool))

    lengths = rng.geometric(1.0 / mean_length, size=session_count)
    histories = []
    for length in lengths:
        if length <= short_max_length:
            votes = rng.choice(short_pool, size=length, p=short_probs)
        else:
            votes = rng.choice(long_pool, size=length, p=long_probs)
        histories.append(VoteHistory(tuple(int(v) for v in votes)))

    return SessionDataset(_numbered_catalog(item_count), tuple(histories))


def bigram_sessions(session_count=200, seed=0):
    """Three-item sessions in which item 2 always follows item 1.

    Every session contains the bigram (1, 2) once, optionally preceded and/or
    followed by item 3.
    """
    rng = np.random.default_rng(seed)
    histories = []
    for _ in range(session_count):
        votes = [1, 2]
        if rng.random() < 0.5:
            votes.insert(0, 3)
        if rng.random() < 0.5:
            votes.append(3)
        histories.append(VoteHistory(tuple(votes)))

    return SessionDataset(_numbered_catalog(3), tuple(histories))
