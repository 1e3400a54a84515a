"""One-phase high-utility itemset mining over a Utility-Tree."""

from .dataset import (
    DatabaseFormatError,
    Transaction,
    TransactionDatabase,
    generate_synthetic,
    load_database,
    read_database,
    write_results,
)
from .miner import MiningResult, mine, mine_database
from .oracle import mine_bruteforce, utility_of
from .preprocess import compute_twu, initial_extension_list, prune_and_reorganize, resolve_threshold
from .utree import UtilityTree, build_tree

__all__ = [
    "DatabaseFormatError",
    "MiningResult",
    "Transaction",
    "TransactionDatabase",
    "UtilityTree",
    "build_tree",
    "compute_twu",
    "generate_synthetic",
    "initial_extension_list",
    "load_database",
    "mine",
    "mine_bruteforce",
    "mine_database",
    "prune_and_reorganize",
    "read_database",
    "resolve_threshold",
    "utility_of",
    "write_results",
]
