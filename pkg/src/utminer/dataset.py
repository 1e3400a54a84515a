"""Transaction databases with per-item utilities.

The on-disk format is the usual utility-mining text layout, one transaction
per line::

    <item> <item> ...:<transaction utility>:<utility> <utility> ...

Item labels are arbitrary tokens; internally they are mapped to dense
integer ids in order of first appearance.
"""

from __future__ import annotations

import io
from dataclasses import dataclass, field
from typing import IO, Iterable, Sequence

import numpy as np

COMMENT_PREFIXES = ("#", "%", "@")


class DatabaseFormatError(ValueError):
    """Raised for a malformed line in a utility database file."""

    def __init__(self, lineno: int, message: str):
        super().__init__(f"line {lineno}: {message}")
        self.lineno = lineno


@dataclass(frozen=True, slots=True)
class Transaction:
    tid: int
    items: tuple[int, ...]
    utilities: tuple[int, ...]

    @property
    def tu(self) -> int:
        return sum(self.utilities)

    @property
    def entries(self) -> list[tuple[int, int]]:
        return list(zip(self.items, self.utilities))

    def utility_of(self, item: int) -> int:
        """Utility of ``item`` in this transaction, 0 if absent."""
        try:
            return self.utilities[self.items.index(item)]
        except ValueError:
            return 0


@dataclass(eq=True, slots=True)
class TransactionDatabase:
    transactions: list[Transaction]
    labels: list[str] = field(default_factory=list)
    total_utility: int = 0

    def __post_init__(self):
        self.total_utility = sum(t.tu for t in self.transactions)

    @classmethod
    def from_rows(cls, rows: Iterable[Sequence[tuple[str, int]]]) -> "TransactionDatabase":
        """Build a database from rows of ``(label, utility)`` pairs.

        Labels get dense ids in first-appearance order and tids follow row
        order. Validation is left to the callers.
        """
        ids: dict[str, int] = {}
        labels: list[str] = []
        transactions = []
        for tid, row in enumerate(rows):
            items = []
            for label, _ in row:
                if label not in ids:
                    ids[label] = len(labels)
                    labels.append(label)
                items.append(ids[label])
            transactions.append(Transaction(tid, tuple(items), tuple(u for _, u in row)))
        return cls(transactions, labels)

    @property
    def num_items(self) -> int:
        return len(self.labels)

    @property
    def avg_length(self) -> float:
        if not self.transactions:
            return 0.0
        return sum(len(t.items) for t in self.transactions) / len(self.transactions)

    def item_id(self, label: str) -> int:
        return self.labels.index(label)

    def itemset(self, *labels: str) -> tuple[int, ...]:
        """Internal sorted itemset for the given external labels."""
        return tuple(sorted(self.item_id(label) for label in labels))

    def label_itemset(self, itemset: Iterable[int]) -> list[str]:
        return sorted((self.labels[i] for i in itemset), key=label_sort_key)


def label_sort_key(label: str):
    # numeric labels compare as numbers and sort before textual ones
    return (0, int(label), "") if label.isdigit() else (1, 0, label)


def _parse_int(token: str, lineno: int, what: str) -> int:
    try:
        return int(token)
    except ValueError:
        raise DatabaseFormatError(lineno, f"non-integer {what} {token!r}") from None


def _parse_line(line: str, lineno: int) -> list[tuple[str, int]]:
    fields = line.split(":")
    if len(fields) != 3:
        raise DatabaseFormatError(lineno, f"expected 3 ':'-separated fields, got {len(fields)}")
    labels = fields[0].split()
    declared = _parse_int(fields[1].strip(), lineno, "transaction utility")
    utilities = [_parse_int(tok, lineno, "utility") for tok in fields[2].split()]
    if not labels:
        raise DatabaseFormatError(lineno, "transaction has no items")
    if len(labels) != len(utilities):
        raise DatabaseFormatError(
            lineno, f"{len(labels)} items but {len(utilities)} utilities"
        )
    if len(set(labels)) != len(labels):
        raise DatabaseFormatError(lineno, "duplicate item in transaction")
    for u in utilities:
        if u < 1:
            raise DatabaseFormatError(lineno, f"utility {u} is not positive")
    if sum(utilities) != declared:
        raise DatabaseFormatError(
            lineno, f"utilities sum to {sum(utilities)} but transaction utility is {declared}"
        )
    return list(zip(labels, utilities))


def load_database(reader: IO) -> TransactionDatabase:
    """Parse a database from a binary or text stream.

    Blank lines and lines starting with ``#``, ``%`` or ``@`` are skipped.
    Raises DatabaseFormatError naming the offending line.
    """
    rows = []
    for lineno, raw in enumerate(reader, start=1):
        line = raw.decode("utf-8") if isinstance(raw, bytes) else raw
        line = line.strip()
        if not line or line.startswith(COMMENT_PREFIXES):
            continue
        rows.append(_parse_line(line, lineno))
    return TransactionDatabase.from_rows(rows)


def read_database(path) -> TransactionDatabase:
    with open(path, "rb") as fh:
        return load_database(fh)


def parse_database(text: str) -> TransactionDatabase:
    return load_database(io.StringIO(text))


def format_database(db: TransactionDatabase) -> str:
    lines = []
    for t in db.transactions:
        labels = " ".join(db.labels[i] for i in t.items)
        utils = " ".join(str(u) for u in t.utilities)
        lines.append(f"{labels}:{t.tu}:{utils}\n")
    return "".join(lines)


def dump_database(db: TransactionDatabase, writer: IO[bytes]) -> None:
    """Inverse of :func:`load_database`."""
    writer.write(format_database(db).encode("utf-8"))


def format_results(itemsets: dict[tuple[int, ...], int], labels: Sequence[str]) -> str:
    rows = []
    for itemset, utility in itemsets.items():
        names = sorted((labels[i] for i in itemset), key=label_sort_key)
        rows.append(([label_sort_key(n) for n in names], names, utility))
    rows.sort(key=lambda r: r[0])
    return "".join(f"{' '.join(names)} #UTIL: {u}\n" for _, names, u in rows)


def write_results(result, writer: IO[bytes], labels: Sequence[str]) -> None:
    """Write ``<labels> #UTIL: <u>`` lines, sorted by label sequence.

    ``result`` is a MiningResult or OracleResult (anything with ``itemsets``)
    or a plain itemset -> utility mapping.
    """
    itemsets = getattr(result, "itemsets", result)
    writer.write(format_results(itemsets, labels).encode("utf-8"))


def generate_synthetic(
    num_tx: int,
    num_items: int,
    avg_len: int,
    seed: int,
    gaussian_mean: float = 5.0,
    gaussian_sd: float = 2.0,
) -> TransactionDatabase:
    """Random database with quantity x unit-price utilities.

    Transaction lengths are uniform on ``[1, 2*avg_len - 1]`` (clipped to the
    item count), quantities uniform on 1..10, and each item carries a fixed
    price ``max(1, round(|N(mean, sd)|))``. Items are labelled ``1..num_items``.
    """
    if num_tx < 0:
        raise ValueError("num_tx must be >= 0")
    if num_items < 1:
        raise ValueError("num_items must be >= 1")
    if not 1 <= avg_len <= num_items:
        raise ValueError("avg_len must be in [1, num_items]")
    if gaussian_sd < 0:
        raise ValueError("gaussian_sd must be >= 0")

    rng = np.random.default_rng(seed)
    prices = np.maximum(1, np.rint(np.abs(rng.normal(gaussian_mean, gaussian_sd, num_items))))
    prices = prices.astype(np.int64)
    max_len = min(2 * avg_len - 1, num_items)
    lengths = rng.integers(1, max_len, size=num_tx, endpoint=True)

    rows = []
    for length in lengths:
        items = np.sort(rng.choice(num_items, size=int(length), replace=False))
        qty = rng.integers(1, 10, size=int(length), endpoint=True)
        utils = (qty * prices[items]).tolist()
        rows.append([(str(i + 1), u) for i, u in zip(items.tolist(), utils)])
    return TransactionDatabase.from_rows(rows)
