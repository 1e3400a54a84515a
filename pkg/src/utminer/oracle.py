"""Exhaustive high-utility itemset enumeration, used as ground truth."""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations

from .dataset import TransactionDatabase
from .preprocess import compute_twu

DEFAULT_MAX_ITEMS = 20


class OracleLimitError(ValueError):
    pass


@dataclass
class OracleResult:
    itemsets: dict[tuple[int, ...], int] = field(default_factory=dict)
    evaluated: int = 0


def utility_of(db: TransactionDatabase, itemset) -> int:
    """Sum of u(X, T) over the transactions T that contain every item of X."""
    wanted = set(itemset)
    if not wanted:
        raise ValueError("itemset must be non-empty")
    total = 0
    for t in db.transactions:
        if wanted.issubset(t.items):
            total += sum(u for i, u in zip(t.items, t.utilities) if i in wanted)
    return total


class _Index:
    """Per-item tid bitmasks and utilities, so each subset costs a few ANDs."""

    def __init__(self, db: TransactionDatabase):
        self.mask: dict[int, int] = {}
        self.util: dict[int, dict[int, int]] = {}
        for t in db.transactions:
            for i, u in zip(t.items, t.utilities):
                self.mask[i] = self.mask.get(i, 0) | (1 << t.tid)
                self.util.setdefault(i, {})[t.tid] = u

    def utility(self, itemset) -> int:
        mask = -1
        for i in itemset:
            mask &= self.mask.get(i, 0)
            if not mask:
                return 0
        total = 0
        while mask:
            low = mask & -mask
            tid = low.bit_length() - 1
            for i in itemset:
                total += self.util[i][tid]
            mask ^= low
        return total


def mine_bruteforce(
    db: TransactionDatabase,
    theta: int,
    max_items: int = DEFAULT_MAX_ITEMS,
    twu_skip: bool = False,
) -> OracleResult:
    """Check every non-empty subset of the item universe against ``theta``.

    Subsets are visited by increasing size, then lexicographically. With
    ``twu_skip`` items whose TWU is below theta are left out of the universe.
    """
    universe = sorted({i for t in db.transactions for i in t.items})
    if len(universe) > max_items:
        raise OracleLimitError(
            f"{len(universe)} distinct items exceeds the brute-force limit of {max_items}"
        )
    if twu_skip:
        twu = compute_twu(db)
        universe = [i for i in universe if twu[i] >= theta]
    index = _Index(db)
    result = OracleResult()
    for size in range(1, len(universe) + 1):
        for itemset in combinations(universe, size):
            result.evaluated += 1
            u = index.utility(itemset)
            if u >= theta:
                result.itemsets[itemset] = u
    return result
