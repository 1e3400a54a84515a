import random
from pathlib import Path

import pytest
from hypothesis import strategies as st

from utminer.dataset import TransactionDatabase, read_database

DATA = Path(__file__).parent / "data"
TABLE2 = DATA / "table2.txt"


@pytest.fixture
def table2() -> TransactionDatabase:
    return read_database(TABLE2)


def ids(db, *labels):
    return db.itemset(*labels)


def random_database(seed: int, max_items: int = 12, max_tx: int = 30) -> TransactionDatabase:
    """Small random db: quantity 1..10 times a fixed per-item price 1..10."""
    rng = random.Random(seed)
    n_items = rng.randint(1, max_items)
    n_tx = rng.randint(1, max_tx)
    price = [rng.randint(1, 10) for _ in range(n_items)]
    rows = []
    for _ in range(n_tx):
        size = rng.randint(1, n_items)
        items = sorted(rng.sample(range(n_items), size))
        rows.append([(f"i{i}", rng.randint(1, 10) * price[i]) for i in items])
    return TransactionDatabase.from_rows(rows)


def thresholds_for(db: TransactionDatabase) -> list[int]:
    """Ten descending thresholds spread from 60% down to 0.5% of total utility."""
    fracs = [0.6, 0.4, 0.25, 0.15, 0.1, 0.07, 0.04, 0.02, 0.01, 0.005]
    return [max(1, round(db.total_utility * f)) for f in fracs]


@st.composite
def databases(draw, max_items=8, max_tx=12, max_utility=100):
    n_items = draw(st.integers(1, max_items))
    n_tx = draw(st.integers(0, max_tx))
    rows = []
    for _ in range(n_tx):
        items = draw(st.lists(st.integers(0, n_items - 1), min_size=1, max_size=n_items, unique=True))
        rows.append([(f"x{i}", draw(st.integers(1, max_utility))) for i in items])
    return TransactionDatabase.from_rows(rows)


# -- acceptance reporting: one PASS/FAIL line per criterion ---------------

_criteria: dict[str, tuple[str, str]] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(label): acceptance criterion reported in the summary")


def pytest_runtest_logreport(report):
    marker = getattr(report, "criterion", None)
    if marker is None:
        return
    if report.when == "call" or (report.when == "setup" and report.outcome != "passed"):
        _criteria[report.nodeid] = (marker, "PASS" if report.passed else "FAIL")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    marker = item.get_closest_marker("criterion")
    if marker is not None:
        outcome.get_result().criterion = marker.args[0]


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for label, status in sorted(_criteria.values()):
        terminalreporter.write_line(f"{status}  {label}")
