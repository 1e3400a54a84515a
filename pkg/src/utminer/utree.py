"""Utility-Tree: a prefix tree over reorganized transactions.

Paths run root to leaf in decreasing TWU order, so the ancestors of a node
are exactly the items that may extend an itemset ending at that node. Each
node keeps ``gmap``: tid -> (exact utility, remaining utility), where the
remaining utility is the summed utility of the node's ancestors in that
transaction.

Nodes live in parallel arrays indexed by node id. Id 0 is the root.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Iterator

from .preprocess import ReorganizedDatabase

ROOT = 0
NO_NODE = -1


class ProjectionError(RuntimeError):
    """Local-node bookkeeping went out of sync with the recursion."""


@dataclass(slots=True)
class LocalEntry:
    tids: list[int]
    ext_utility: int
    rem_utility: int
    prefix_utility: int


@dataclass(slots=True)
class LocalNode:
    prefix_id: int
    lmap: dict[int, LocalEntry] = field(default_factory=dict)


@dataclass(slots=True)
class HeaderEntry:
    item: int
    twu: int
    link: int = NO_NODE
    tail: int = NO_NODE


class UtilityTree:
    def __init__(self, twu: dict[int, int], rank: dict[int, int]):
        self.item: list[int] = [NO_NODE]
        self.parent: list[int] = [NO_NODE]
        self.depth: list[int] = [0]
        self.gmap: list[dict[int, tuple[int, int]]] = [{}]
        self.hlink: list[int] = [NO_NODE]
        self.local_stack: list[list[LocalNode] | None] = [None]
        self.rank = rank
        # children keyed by parent * stride + item keeps one dict for the whole tree
        self._stride = max(rank.values(), default=0) + 1
        self._child: dict[int, int] = {}
        # decreasing TWU, i.e. reverse of the exploration order
        self.header: dict[int, HeaderEntry] = {
            i: HeaderEntry(i, twu[i]) for i in sorted(rank, key=rank.__getitem__, reverse=True)
        }
        self.live_local_nodes = 0
        self.peak_local_nodes = 0

    def __len__(self) -> int:
        return len(self.item)

    @property
    def root(self) -> int:
        return ROOT

    def child(self, node: int, item: int) -> int:
        return self._child.get(node * self._stride + self.rank[item], NO_NODE)

    def children(self, node: int) -> dict[int, int]:
        """item -> child id. Linear scan; meant for inspection, not mining."""
        return {self.item[n]: n for n in range(1, len(self.item)) if self.parent[n] == node}

    def _new_node(self, item: int, parent: int) -> int:
        node = len(self.item)
        self.item.append(item)
        self.parent.append(parent)
        self.depth.append(self.depth[parent] + 1)
        self.gmap.append({})
        self.hlink.append(NO_NODE)
        self.local_stack.append(None)
        self._child[parent * self._stride + self.rank[item]] = node
        entry = self.header[item]
        if entry.link == NO_NODE:
            entry.link = node
        else:
            self.hlink[entry.tail] = node
        entry.tail = node
        return node

    def insert(self, tid: int, items, utilities, rus) -> None:
        """Insert one reorganized transaction (given in increasing TWU order)."""
        node = ROOT
        stride = self._stride
        rank = self.rank
        for k in range(len(items) - 1, -1, -1):
            item = items[k]
            nxt = self._child.get(node * stride + rank[item], NO_NODE)
            if nxt == NO_NODE:
                nxt = self._new_node(item, node)
            self.gmap[nxt][tid] = (utilities[k], rus[k])
            node = nxt

    # -- traversal ---------------------------------------------------------

    def header_nodes(self, item: int) -> Iterator[int]:
        entry = self.header.get(item)
        node = entry.link if entry is not None else NO_NODE
        hlink = self.hlink
        while node != NO_NODE:
            yield node
            node = hlink[node]

    def ancestors(self, node: int) -> Iterator[int]:
        """Strict ancestors of ``node``, bottom-up, without the root."""
        parent = self.parent
        node = parent[node]
        while node > ROOT:
            yield node
            node = parent[node]

    # -- local projections -------------------------------------------------

    def top_local(self, node: int) -> LocalNode | None:
        stack = self.local_stack[node]
        return stack[-1] if stack else None

    def push_local(
        self, node: int, prefix_id: int, contributor: int, tids: Iterable[int], prefix_utility: int
    ) -> LocalEntry:
        gmap = self.gmap[node]
        tids = list(tids)
        ext = rem = 0
        try:
            for t in tids:
                eu, ru = gmap[t]
                ext += eu
                rem += ru
        except KeyError as exc:
            raise ProjectionError(f"tid {exc.args[0]} does not pass through node {node}") from None

        stack = self.local_stack[node]
        if stack is None:
            stack = self.local_stack[node] = []
        if stack and stack[-1].prefix_id == prefix_id:
            local = stack[-1]
        else:
            local = LocalNode(prefix_id)
            stack.append(local)
            self.live_local_nodes += 1
            if self.live_local_nodes > self.peak_local_nodes:
                self.peak_local_nodes = self.live_local_nodes

        entry = local.lmap.get(contributor)
        if entry is None:
            entry = local.lmap[contributor] = LocalEntry(tids, ext, rem, prefix_utility)
        else:
            entry.tids.extend(tids)
            entry.ext_utility += ext
            entry.rem_utility += rem
            entry.prefix_utility += prefix_utility
        return entry

    def pop_local(self, node: int, prefix_id: int) -> None:
        stack = self.local_stack[node]
        if not stack:
            raise ProjectionError(f"pop for prefix {prefix_id} on node {node} with empty local stack")
        if stack[-1].prefix_id != prefix_id:
            raise ProjectionError(
                f"unbalanced pop on node {node}: top is prefix {stack[-1].prefix_id}, not {prefix_id}"
            )
        stack.pop()
        self.live_local_nodes -= 1

    def local_stacks_empty(self) -> bool:
        return all(not s for s in self.local_stack)

    # -- debugging -----------------------------------------------------------

    def to_dot(self, labels: list[str] | None = None) -> str:
        """Graphviz dump; node label is item/summed eu/summed ru."""
        out = ["digraph utree {", '  n0 [label="root"];']
        for n in range(1, len(self.item)):
            name = labels[self.item[n]] if labels else str(self.item[n])
            eu = sum(v[0] for v in self.gmap[n].values())
            ru = sum(v[1] for v in self.gmap[n].values())
            out.append(f'  n{n} [label="{name}/{eu}/{ru}"];')
            out.append(f"  n{self.parent[n]} -> n{n};")
        out.append("}")
        return "\n".join(out) + "\n"


def build_tree(rdb: ReorganizedDatabase) -> UtilityTree:
    tree = UtilityTree(rdb.twu, rdb.rank)
    for t in rdb.transactions:
        tree.insert(t.tid, t.items, t.utilities, t.rus)
    return tree


def header_nodes(tree: UtilityTree, item: int) -> Iterator[int]:
    return tree.header_nodes(item)


def ancestors(tree: UtilityTree, node: int) -> Iterator[int]:
    return tree.ancestors(node)


def push_local(tree: UtilityTree, node, prefix_id, contributor, tids, prefix_utility) -> LocalEntry:
    return tree.push_local(node, prefix_id, contributor, tids, prefix_utility)


def pop_local(tree: UtilityTree, node, prefix_id) -> None:
    tree.pop_local(node, prefix_id)
