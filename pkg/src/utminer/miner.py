"""UT-Miner: depth-first growth over the Utility-Tree.

Itemsets grow bottom-up: an itemset ending at tree item ``i`` can only be
extended by ancestors of ``i``-nodes. Instead of building a projected tree
per prefix, each expanded prefix pushes a LocalNode onto the local stack of
the relevant ancestor nodes and pops it when its subtree is finished.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Callable

from .dataset import TransactionDatabase
from .preprocess import ReorganizedDatabase, compute_twu, initial_extension_list, prune_and_reorganize
from .utree import UtilityTree, build_tree


@dataclass(slots=True)
class Anchor:
    """Where an itemset's last item sits in the tree, with its utilities there."""

    node: int
    tids: list[int]
    utility: int  # exact utility of the itemset over ``tids``
    remaining: int  # summed utility of the node's ancestors over ``tids``


@dataclass(slots=True)
class PrefixFrame:
    itemset: tuple[int, ...]  # in exploration order; last item is the anchor item
    prefix_id: int
    anchors: list[Anchor] = field(default_factory=list)
    sum_eu: int = 0
    sum_ru: int = 0
    extensions: list[int] = field(default_factory=list)
    # item -> nodes of that item holding a LocalNode for this frame
    local_nodes: dict[int, list[int]] = field(default_factory=dict)


@dataclass(slots=True)
class AncestorStats:
    local_twu: dict[int, int] = field(default_factory=dict)
    local_ext_utility: dict[int, int] = field(default_factory=dict)


@dataclass(slots=True)
class MiningStats:
    candidates: int = 0
    elapsed: float = 0.0
    peak_local_nodes: int = 0


@dataclass(slots=True)
class MiningResult:
    itemsets: dict[tuple[int, ...], int] = field(default_factory=dict)
    stats: MiningStats = field(default_factory=MiningStats)


@dataclass(slots=True)
class FrameReport:
    """What the miner decided for one candidate itemset; passed to ``on_frame``."""

    itemset: tuple[int, ...]
    sum_eu: int
    sum_ru: int
    local_twu: dict[int, int]
    local_ext_utility: dict[int, int]
    unpromising: set[int]
    updated_ub: int
    expanded: bool
    hlist: list[int]
    hlist_bounds: dict[int, int]
    prefix_utility: dict[int, int]  # ancestor node -> prefix utility sent to it


def evaluate_extension(tree: UtilityTree, frame: PrefixFrame, item: int) -> tuple[int, int, list[Anchor]]:
    """Exact utility, remaining utility and anchors of ``frame.itemset + (item,)``."""
    sum_eu = sum_ru = 0
    anchors = []
    if not frame.itemset:
        for node in tree.header_nodes(item):
            gmap = tree.gmap[node]
            eu = ru = 0
            for e, r in gmap.values():
                eu += e
                ru += r
            anchors.append(Anchor(node, list(gmap), eu, ru))
            sum_eu += eu
            sum_ru += ru
        return sum_eu, sum_ru, anchors

    nodes = frame.local_nodes.get(item)
    if nodes is None:
        nodes = tree.header_nodes(item)
    pid = frame.prefix_id
    for node in nodes:
        local = tree.top_local(node)
        if local is None or local.prefix_id != pid:
            continue
        tids: list[int] = []
        eu = ru = 0
        for entry in local.lmap.values():
            tids.extend(entry.tids)
            eu += entry.prefix_utility + entry.ext_utility
            ru += entry.rem_utility
        if tids:
            anchors.append(Anchor(node, tids, eu, ru))
            sum_eu += eu
            sum_ru += ru
    return sum_eu, sum_ru, anchors


def ancestor_stats(tree: UtilityTree, anchors: list[Anchor]) -> AncestorStats:
    """Local TWU and summed exact utility of every ancestor item.

    An anchor's weight is its EU+RU mass, which is what any extension
    through that anchor can at most be worth.
    """
    twu: dict[int, int] = {}
    ext: dict[int, int] = {}
    item_of = tree.item
    gmaps = tree.gmap
    for anchor in anchors:
        w = anchor.utility + anchor.remaining
        tids = anchor.tids
        for a in tree.ancestors(anchor.node):
            j = item_of[a]
            gmap = gmaps[a]
            twu[j] = twu.get(j, 0) + w
            ext[j] = ext.get(j, 0) + sum(gmap[t][0] for t in tids)
    return AncestorStats(twu, ext)


def tighten_bound(sum_eu: int, sum_ru: int, stats: AncestorStats, theta: int) -> tuple[int, set[int]]:
    unpromising = {j for j, w in stats.local_twu.items() if w < theta}
    ub = sum_eu + sum_ru - sum(stats.local_ext_utility[j] for j in unpromising)
    return ub, unpromising


def project(tree: UtilityTree, frame: PrefixFrame, promising: set[int]) -> list[int]:
    """Push this frame's LocalNodes onto the promising ancestors of its anchors.

    Returns the touched nodes; the caller pops them when the frame is done.
    """
    touched = []
    item_of = tree.item
    by_item = frame.local_nodes
    pid = frame.prefix_id
    for anchor in frame.anchors:
        if not anchor.tids:
            continue
        for a in tree.ancestors(anchor.node):
            j = item_of[a]
            if j not in promising:
                continue
            local = tree.top_local(a)
            fresh = local is None or local.prefix_id != pid
            tree.push_local(a, pid, anchor.node, anchor.tids, anchor.utility)
            if fresh:
                touched.append(a)
                by_item.setdefault(j, []).append(a)
    return touched


def build_hlist(tree: UtilityTree, frame: PrefixFrame, theta: int) -> tuple[list[int], dict[int, int]]:
    """Extensions of ``frame`` whose projected EU+RU reaches theta, in exploration order."""
    bounds: dict[int, int] = {}
    for item, nodes in frame.local_nodes.items():
        total = 0
        for node in nodes:
            for entry in tree.top_local(node).lmap.values():
                total += entry.prefix_utility + entry.ext_utility + entry.rem_utility
        bounds[item] = total
    hlist = sorted((j for j, b in bounds.items() if b >= theta), key=tree.rank.__getitem__)
    return hlist, bounds


class _Run:
    def __init__(self, tree: UtilityTree, theta: int, on_frame):
        self.tree = tree
        self.theta = theta
        self.on_frame = on_frame
        self.result = MiningResult()
        self.next_prefix_id = 1

    def grow(self, frame: PrefixFrame) -> None:
        tree, theta = self.tree, self.theta
        stats = self.result.stats
        for item in frame.extensions:
            stats.candidates += 1
            itemset = frame.itemset + (item,)
            sum_eu, sum_ru, anchors = evaluate_extension(tree, frame, item)
            if sum_eu >= theta:
                self.result.itemsets[tuple(sorted(itemset))] = sum_eu

            anc = ancestor_stats(tree, anchors)
            ub, unpromising = tighten_bound(sum_eu, sum_ru, anc, theta)
            if ub < theta:
                # skip only this extension; its siblings are independent
                if self.on_frame:
                    self._report(itemset, sum_eu, sum_ru, anc, unpromising, ub, None, [], {})
                continue

            child = PrefixFrame(itemset, self.next_prefix_id, anchors, sum_eu, sum_ru)
            self.next_prefix_id += 1
            promising = anc.local_twu.keys() - unpromising
            touched = project(tree, child, promising)
            child.extensions, bounds = build_hlist(tree, child, theta)
            if self.on_frame:
                self._report(itemset, sum_eu, sum_ru, anc, unpromising, ub, child, child.extensions, bounds)
            if child.extensions:
                self.grow(child)
            for node in touched:
                tree.pop_local(node, child.prefix_id)

    def _report(self, itemset, sum_eu, sum_ru, anc, unpromising, ub, child, hlist, bounds):
        pu = {}
        if child is not None:
            for nodes in child.local_nodes.values():
                for node in nodes:
                    pu[node] = sum(e.prefix_utility for e in self.tree.top_local(node).lmap.values())
        self.on_frame(
            FrameReport(
                itemset, sum_eu, sum_ru, dict(anc.local_twu), dict(anc.local_ext_utility),
                set(unpromising), ub, child is not None, list(hlist), dict(bounds), pu,
            )
        )


def mine(
    tree: UtilityTree,
    rdb: ReorganizedDatabase,
    theta: int,
    on_frame: Callable[[FrameReport], None] | None = None,
) -> MiningResult:
    """All itemsets with utility >= theta, with exact utilities.

    ``on_frame`` is called once per candidate itemset with the bounds the
    miner computed for it (debugging and tests).
    """
    if theta < 1:
        raise ValueError("theta must be >= 1")
    start = time.perf_counter()
    tree.peak_local_nodes = tree.live_local_nodes
    run = _Run(tree, theta, on_frame)
    run.grow(PrefixFrame((), 0, extensions=initial_extension_list(rdb)))
    stats = run.result.stats
    stats.elapsed = time.perf_counter() - start
    stats.peak_local_nodes = tree.peak_local_nodes
    return run.result


def mine_database(db: TransactionDatabase, theta: int, on_frame=None) -> MiningResult:
    """Prune, reorganize, build the tree and mine, timing the whole pipeline."""
    start = time.perf_counter()
    rdb = prune_and_reorganize(db, compute_twu(db), theta)
    tree = build_tree(rdb)
    result = mine(tree, rdb, theta, on_frame)
    result.stats.elapsed = time.perf_counter() - start
    return result
