from itertools import combinations

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from utminer.dataset import TransactionDatabase, parse_database
from utminer.oracle import utility_of
from utminer.preprocess import (
    compute_twu,
    initial_extension_list,
    prune_and_reorganize,
    resolve_threshold,
)

from .conftest import databases


def named(db, mapping):
    return {db.labels[i]: v for i, v in mapping.items()}


def test_twu_table2(table2):
    assert named(table2, compute_twu(table2)) == {
        "A": 37, "B": 50, "C": 85, "D": 85, "E": 107, "F": 122, "G": 130,
    }


def test_twu_single_transaction():
    db = parse_database("a b c:6:1 2 3\n")
    assert set(compute_twu(db).values()) == {6}


def test_twu_absent_item():
    db = parse_database("a:1:1\n")
    assert compute_twu(db) == {0: 1}


@pytest.mark.parametrize("pct, expected", [(100, 159), (0, 1), (25.2, 41)])
def test_resolve_threshold(table2, pct, expected):
    assert resolve_threshold(table2, pct) == expected


@pytest.mark.parametrize("pct", [-0.1, 100.5])
def test_resolve_threshold_range(table2, pct):
    with pytest.raises(ValueError):
        resolve_threshold(table2, pct)


def test_prune_theta_40_drops_a(table2):
    rdb = prune_and_reorganize(table2, compute_twu(table2), 40)
    a = table2.item_id("A")
    assert all(a not in t.items for t in rdb.transactions)
    t7 = next(t for t in rdb.transactions if t.tid == 6)
    assert sorted(table2.labels[i] for i in t7.items) == ["C", "D", "E", "G"]


def test_prune_theta_20_keeps_everything(table2):
    rdb = prune_and_reorganize(table2, compute_twu(table2), 20)
    assert len(rdb.transactions) == 10
    t1 = next(t for t in rdb.transactions if t.tid == 0)
    assert [table2.labels[i] for i in t1.items] == ["C", "E", "F", "G"]
    assert t1.rus == (17, 16, 3, 0)
    assert t1.rus[0] == table2.transactions[0].tu - t1.utilities[0]


def test_merge_identical_sequences():
    db = parse_database("X Y:3:1 2\nZ:5:5\nY X:4:1 3\n")
    rdb = prune_and_reorganize(db, compute_twu(db), 1)
    merged = [t for t in rdb.transactions if len(t.items) == 2]
    assert len(merged) == 1
    got = dict(zip((db.labels[i] for i in merged[0].items), merged[0].utilities))
    assert got == {"X": 4, "Y": 3}
    assert merged[0].tid not in (0, 1, 2)
    assert len({t.tid for t in rdb.transactions}) == len(rdb.transactions)


def _eu_ru_brute(db, theta):
    """EU+RU per item, straight from the raw transactions."""
    twu = compute_twu(db)
    key = lambda i: (twu[i], i)  # noqa: E731
    out = {}
    for t in db.transactions:
        kept = sorted(((i, u) for i, u in t.entries if twu[i] >= theta), key=lambda p: key(p[0]))
        for pos, (i, u) in enumerate(kept):
            out[i] = out.get(i, 0) + u + sum(v for _, v in kept[pos + 1:])
    return out


def test_initial_extensions_table2(table2):
    rdb = prune_and_reorganize(table2, compute_twu(table2), 20)
    brute = _eu_ru_brute(table2, 20)
    assert named(table2, brute) == {"A": 37, "B": 50, "C": 77, "D": 70, "E": 59, "F": 77, "G": 31}
    assert [table2.labels[i] for i in initial_extension_list(rdb)] == ["A", "B", "C", "D", "E", "F", "G"]


def test_initial_extensions_edge_cases(table2):
    rdb = prune_and_reorganize(table2, compute_twu(table2), table2.total_utility + 1)
    assert initial_extension_list(rdb) == []
    db = parse_database("X:5:5\n")
    rdb = prune_and_reorganize(db, compute_twu(db), 5)
    assert initial_extension_list(rdb) == [0]


@settings(max_examples=150)
@given(databases(), st.integers(1, 300))
def test_reorganized_invariants(db, theta):
    twu = compute_twu(db)
    rdb = prune_and_reorganize(db, twu, theta)
    seen = set()
    for t in rdb.transactions:
        assert t.items
        assert t.items not in seen
        seen.add(t.items)
        assert all(twu[i] >= theta for i in t.items)
        assert list(t.items) == sorted(t.items, key=lambda i: (twu[i], i))
        for k in range(len(t.items)):
            assert t.utilities[k] + t.rus[k] == sum(t.utilities[k:])
        assert t.rus[-1] == 0
    # per-item utility survives merging
    for i, w in twu.items():
        if w >= theta:
            before = sum(t.utility_of(i) for t in db.transactions)
            after = sum(u for t in rdb.transactions for j, u in zip(t.items, t.utilities) if j == i)
            assert before == after
    assert _eu_ru_brute(db, theta) == {i: eu + ru for i, (eu, ru) in rdb.item_eu_ru.items()}


@given(databases(), st.integers(1, 300))
def test_prune_idempotent(db, theta):
    twu = compute_twu(db)
    rdb = prune_and_reorganize(db, twu, theta)
    again = prune_and_reorganize(rdb.as_database(db.labels), twu, theta)
    assert again.transactions == rdb.transactions
    assert again.item_eu_ru == rdb.item_eu_ru


@settings(max_examples=60)
@given(databases(max_items=6), st.integers(1, 200))
def test_twu_pruning_sound(db, theta):
    twu = compute_twu(db)
    low = [i for i, w in twu.items() if w < theta]
    universe = sorted(twu)
    for i in low:
        others = [j for j in universe if j != i]
        for r in range(len(others) + 1):
            for rest in combinations(others, r):
                assert utility_of(db, (i, *rest)) < theta


def test_empty_database():
    db = TransactionDatabase([])
    rdb = prune_and_reorganize(db, compute_twu(db), 1)
    assert rdb.transactions == [] and initial_extension_list(rdb) == []
