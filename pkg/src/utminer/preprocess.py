"""TWU computation, pruning and transaction reorganization.

Runs before tree construction: one scan to get TWU, one to drop
unpromising items, order the rest by increasing TWU, merge duplicate
transactions and precompute exact/remaining utilities.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

from .dataset import Transaction, TransactionDatabase


@dataclass(slots=True)
class ReorganizedTransaction:
    tid: int
    items: tuple[int, ...]  # increasing TWU order
    utilities: tuple[int, ...]
    rus: tuple[int, ...]

    @property
    def entries(self) -> list[tuple[int, int, int, int]]:
        """``(item, utility, eu, ru)`` per position; eu is the item utility."""
        return [(i, u, u, r) for i, u, r in zip(self.items, self.utilities, self.rus)]


@dataclass(slots=True)
class ReorganizedDatabase:
    transactions: list[ReorganizedTransaction]
    twu: dict[int, int]
    theta: int
    item_eu_ru: dict[int, tuple[int, int]]
    # item -> position in the processing order (increasing TWU, ties by id)
    rank: dict[int, int] = field(default_factory=dict)

    def as_database(self, labels: list[str]) -> TransactionDatabase:
        return TransactionDatabase(
            [Transaction(t.tid, t.items, t.utilities) for t in self.transactions], list(labels)
        )


def compute_twu(db: TransactionDatabase) -> dict[int, int]:
    twu: dict[int, int] = {}
    for t in db.transactions:
        tu = t.tu
        for i in t.items:
            twu[i] = twu.get(i, 0) + tu
    return twu


def resolve_threshold(db: TransactionDatabase, pct: float) -> int:
    """Absolute threshold for a percentage of the database's total utility.

    Rounds up, and never returns less than 1.
    """
    if not 0 <= pct <= 100:
        raise ValueError(f"threshold percentage {pct} not in [0, 100]")
    # go through str() so 25.2 means 252/10, not its binary approximation
    theta = math.ceil(Fraction(str(pct)) * db.total_utility / 100)
    return max(1, theta)


def order_key(twu: dict[int, int]):
    return lambda item: (twu[item], item)


def _suffix_sums(utilities) -> tuple[int, ...]:
    rus = [0] * len(utilities)
    acc = 0
    for k in range(len(utilities) - 1, -1, -1):
        rus[k] = acc
        acc += utilities[k]
    return tuple(rus)


def prune_and_reorganize(db: TransactionDatabase, twu: dict[int, int], theta: int) -> ReorganizedDatabase:
    if theta < 1:
        raise ValueError("theta must be >= 1")
    key = order_key(twu)
    promising = sorted((i for i, w in twu.items() if w >= theta), key=key)
    rank = {item: r for r, item in enumerate(promising)}

    kept = []
    for t in db.transactions:
        pairs = sorted(
            ((rank[i], i, u) for i, u in zip(t.items, t.utilities) if i in rank),
        )
        if pairs:
            kept.append((tuple(p[0] for p in pairs), t.tid, [p[2] for p in pairs]))
    kept.sort(key=lambda k: (k[0], k[1]))

    next_tid = max((t.tid for t in db.transactions), default=-1) + 1
    merged: list[tuple[tuple[int, ...], int, list[int]]] = []
    for ranks, tid, utils in kept:
        if merged and merged[-1][0] == ranks:
            summed = [a + b for a, b in zip(merged[-1][2], utils)]
            merged[-1] = (ranks, -1, summed)  # -1: fresh tid assigned below
        else:
            merged.append((ranks, tid, utils))

    transactions = []
    item_eu_ru: dict[int, list[int]] = {}
    for ranks, tid, utils in merged:
        if tid == -1:
            tid = next_tid
            next_tid += 1
        items = tuple(promising[r] for r in ranks)
        rus = _suffix_sums(utils)
        transactions.append(ReorganizedTransaction(tid, items, tuple(utils), rus))
        for i, u, r in zip(items, utils, rus):
            acc = item_eu_ru.setdefault(i, [0, 0])
            acc[0] += u
            acc[1] += r

    return ReorganizedDatabase(
        transactions,
        dict(twu),
        theta,
        {i: (eu, ru) for i, (eu, ru) in item_eu_ru.items()},
        rank,
    )


def initial_extension_list(rdb: ReorganizedDatabase) -> list[int]:
    """Items whose EU+RU over the reorganized database reaches theta.

    Returned in increasing TWU order, which is the bottom-up exploration order.
    """
    items = [i for i, (eu, ru) in rdb.item_eu_ru.items() if eu + ru >= rdb.theta]
    return sorted(items, key=rdb.rank.__getitem__)
