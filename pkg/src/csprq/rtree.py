"""R-tree over bounding boxes with page-access accounting.

Bulk construction uses sort-tile-recursive packing; updates use the classic
choose-leaf / quadratic-split insertion and condense-on-underflow removal.
Every node visit during a search increments an ``AccessStats``, standing in
for I/O cost: one node is charged ``ceil(node bytes / page size)`` pages.
"""

from dataclasses import dataclass
from math import ceil, sqrt

import numpy as np

from .geometry import Mbr, mbr_intersects

DEFAULT_FANOUT = 50
DEFAULT_PAGE_SIZE = 4096
_ENTRY_BYTES = 40   # four float64 box coordinates plus an id slot
_NODE_HEADER = 16


@dataclass
class AccessStats:
    """Per-query page-access accounting; never shared between queries."""

    nodes_visited: int = 0
    pages_read: int = 0

    def merge(self, other: "AccessStats") -> None:
        self.nodes_visited += other.nodes_visited
        self.pages_read += other.pages_read


class _Node:
    __slots__ = ("leaf", "entries", "mbr", "_boxes")

    def __init__(self, leaf: bool, entries=None):
        self.leaf = leaf
        self.entries = entries if entries is not None else []
        self.mbr = None
        self._boxes = None
        self.refit()

    def refit(self) -> None:
        """Recompute the node box and the vectorized child-box cache."""
        if not self.entries:
            self.mbr = None
            self._boxes = np.empty((0, 4))
            return
        boxes = np.array([e[0] for e in self.entries], dtype=np.float64)
        self._boxes = boxes
        self.mbr = Mbr(float(boxes[:, 0].min()), float(boxes[:, 1].min()),
                       float(boxes[:, 2].max()), float(boxes[:, 3].max()))

    def overlapping(self, probe: Mbr) -> np.ndarray:
        b = self._boxes
        mask = ((b[:, 0] <= probe.xhi) & (probe.xlo <= b[:, 2])
                & (b[:, 1] <= probe.yhi) & (probe.ylo <= b[:, 3]))
        return np.flatnonzero(mask)

    @property
    def byte_size(self) -> int:
        return _NODE_HEADER + len(self.entries) * _ENTRY_BYTES


class RTree:
    """Spatial index over (box, id) entries."""

    def __init__(self, fanout: int = DEFAULT_FANOUT, page_size: int = DEFAULT_PAGE_SIZE):
        if fanout < 4:
            raise ValueError(f"fanout must be >= 4, got {fanout}")
        self.fanout = fanout
        self.page_size = page_size
        self.root = _Node(leaf=True)
        self.height = 1
        self._id_box: dict = {}

    def __len__(self) -> int:
        return len(self._id_box)

    def __contains__(self, id_) -> bool:
        return id_ in self._id_box

    # -- construction -------------------------------------------------------

    @staticmethod
    def build(entries, fanout: int = DEFAULT_FANOUT,
              page_size: int = DEFAULT_PAGE_SIZE) -> "RTree":
        """Bulk-load with sort-tile-recursive packing."""
        tree = RTree(fanout=fanout, page_size=page_size)
        entries = list(entries)
        if not entries:
            return tree
        tree._id_box = {id_: box for box, id_ in entries}
        if len(tree._id_box) != len(entries):
            raise ValueError("duplicate ids in bulk load")
        level = [_Node(leaf=True, entries=chunk)
                 for chunk in _str_pack(entries, fanout)]
        height = 1
        while len(level) > 1:
            parents = [(node.mbr, node) for node in level]
            level = [_Node(leaf=False, entries=chunk)
                     for chunk in _str_pack(parents, fanout)]
            height += 1
        tree.root = level[0]
        tree.height = height
        return tree

    # -- search --------------------------------------------------------------

    def range_search(self, probe: Mbr, stats: AccessStats | None = None) -> list:
        """Ids of all entries whose box intersects the probe (closed
        intervals: touching boundaries count)."""
        stats = stats if stats is not None else AccessStats()
        out = []
        stack = [self.root]
        while stack:
            node = stack.pop()
            stats.nodes_visited += 1
            stats.pages_read += ceil(max(node.byte_size, 1) / self.page_size)
            if not node.entries:
                continue
            idx = node.overlapping(probe)
            if node.leaf:
                for i in idx:
                    out.append(node.entries[i][1])
            else:
                for i in idx:
                    stack.append(node.entries[i][1])
        return out

    # -- updates --------------------------------------------------------------

    def insert(self, box: Mbr, id_) -> None:
        if id_ in self._id_box:
            raise ValueError(f"id already present: {id_!r}")
        self._id_box[id_] = box
        path = [self.root]
        node = self.root
        while not node.leaf:
            node = node.entries[_choose_subtree(node, box)][1]
            path.append(node)
        node.entries.append((box, id_))
        self._adjust_upward(path)

    def remove(self, id_) -> None:
        if id_ not in self._id_box:
            raise KeyError(f"id not found: {id_!r}")
        box = self._id_box.pop(id_)
        path = self._find_leaf(self.root, box, id_, [])
        if path is None:  # registry said present; tree must agree
            raise KeyError(f"id not found in tree: {id_!r}")
        leaf = path[-1]
        leaf.entries = [e for e in leaf.entries if e[1] != id_]
        self._condense(path)

    # -- internals -------------------------------------------------------------

    def _find_leaf(self, node: _Node, box: Mbr, id_, path: list):
        path = path + [node]
        if node.leaf:
            for b, eid in node.entries:
                if eid == id_:
                    return path
            return None
        for i in node.overlapping(box):
            found = self._find_leaf(node.entries[i][1], box, id_, path)
            if found is not None:
                return found
        return None

    def _adjust_upward(self, path: list) -> None:
        """Refit boxes bottom-up, splitting overflowing nodes."""
        for depth in range(len(path) - 1, -1, -1):
            node = path[depth]
            if len(node.entries) > self.fanout:
                left, right = _quadratic_split(node)
                if depth == 0:
                    self.root = _Node(leaf=False,
                                      entries=[(left.mbr, left), (right.mbr, right)])
                    self.height += 1
                    return
                parent = path[depth - 1]
                parent.entries = [e for e in parent.entries if e[1] is not node]
                parent.entries.append((left.mbr, left))
                parent.entries.append((right.mbr, right))
                parent.refit()
            else:
                node.refit()
                if depth > 0:
                    parent = path[depth - 1]
                    parent.entries = [(node.mbr if e[1] is node else e[0], e[1])
                                      for e in parent.entries]

    def _condense(self, path: list) -> None:
        min_fill = max(1, self.fanout // 2)
        orphans = []
        for depth in range(len(path) - 1, 0, -1):
            node = path[depth]
            parent = path[depth - 1]
            if len(node.entries) < min_fill:
                parent.entries = [e for e in parent.entries if e[1] is not node]
                orphans.extend(_leaf_entries(node))
            else:
                node.refit()
                parent.entries = [(node.mbr if e[1] is node else e[0], e[1])
                                  for e in parent.entries]
        self.root.refit()
        if not self.root.leaf and len(self.root.entries) == 1:
            self.root = self.root.entries[0][1]
            self.height -= 1
        if not self.root.entries and not self.root.leaf:
            self.root = _Node(leaf=True)
            self.height = 1
        for box, id_ in orphans:
            del self._id_box[id_]  # reinsert below restores the registry
            self.insert(box, id_)

    def check_invariants(self) -> None:
        """Structural validation used by the test suite."""
        depths = set()

        def walk(node, depth, bound):
            if bound is not None:
                assert bound.contains_mbr(node.mbr), "child escapes parent box"
            assert len(node.entries) <= self.fanout, "fanout exceeded"
            if node.leaf:
                depths.add(depth)
                return
            for box, child in node.entries:
                assert box == child.mbr
                walk(child, depth + 1, box)

        if self.root.entries:
            walk(self.root, 1, None)
            assert len(depths) == 1, "leaves at unequal depth"
            assert depths.pop() == self.height


def _str_pack(entries, fanout: int) -> list:
    """Sort-tile-recursive grouping of (box, payload) pairs into chunks."""
    n = len(entries)
    n_nodes = ceil(n / fanout)
    n_slabs = ceil(sqrt(n_nodes))
    slab_len = ceil(n / n_slabs)
    by_x = sorted(entries, key=lambda e: (e[0].xlo + e[0].xhi, e[0].ylo + e[0].yhi))
    chunks = []
    for s in range(0, n, slab_len):
        slab = sorted(by_x[s:s + slab_len],
                      key=lambda e: (e[0].ylo + e[0].yhi, e[0].xlo + e[0].xhi))
        for k in range(0, len(slab), fanout):
            chunks.append(slab[k:k + fanout])
    return chunks


def _choose_subtree(node: _Node, box: Mbr) -> int:
    """Least-enlargement child, ties by smaller area."""
    best = None
    for i, (b, _child) in enumerate(node.entries):
        area = (b.xhi - b.xlo) * (b.yhi - b.ylo)
        ex_lo_x = min(b.xlo, box.xlo)
        ex_lo_y = min(b.ylo, box.ylo)
        ex_hi_x = max(b.xhi, box.xhi)
        ex_hi_y = max(b.yhi, box.yhi)
        enlarged = (ex_hi_x - ex_lo_x) * (ex_hi_y - ex_lo_y) - area
        key = (enlarged, area, i)
        if best is None or key < best[0]:
            best = (key, i)
    return best[1]


def _quadratic_split(node: _Node):
    """Guttman quadratic split into two nodes of the same kind."""
    entries = node.entries

    def area(b):
        return (b.xhi - b.xlo) * (b.yhi - b.ylo)

    def join(a, b):
        return Mbr(min(a.xlo, b.xlo), min(a.ylo, b.ylo),
                   max(a.xhi, b.xhi), max(a.yhi, b.yhi))

    worst = None
    for i in range(len(entries)):
        for j in range(i + 1, len(entries)):
            waste = area(join(entries[i][0], entries[j][0])) \
                - area(entries[i][0]) - area(entries[j][0])
            if worst is None or waste > worst[0]:
                worst = (waste, i, j)
    _, i, j = worst
    g1 = [entries[i]]
    g2 = [entries[j]]
    b1 = entries[i][0]
    b2 = entries[j][0]
    rest = [e for k, e in enumerate(entries) if k not in (i, j)]
    min_fill = max(1, len(entries) // 2 - len(entries) % 2)
    for k, e in enumerate(rest):
        remaining = len(rest) - k
        if len(g1) + remaining <= min_fill:
            g1.append(e)
            b1 = join(b1, e[0])
            continue
        if len(g2) + remaining <= min_fill:
            g2.append(e)
            b2 = join(b2, e[0])
            continue
        d1 = area(join(b1, e[0])) - area(b1)
        d2 = area(join(b2, e[0])) - area(b2)
        if d1 < d2 or (d1 == d2 and len(g1) <= len(g2)):
            g1.append(e)
            b1 = join(b1, e[0])
        else:
            g2.append(e)
            b2 = join(b2, e[0])
    left = _Node(leaf=node.leaf, entries=g1)
    right = _Node(leaf=node.leaf, entries=g2)
    return left, right


def _leaf_entries(node: _Node) -> list:
    if node.leaf:
        return list(node.entries)
    out = []
    for _box, child in node.entries:
        out.extend(_leaf_entries(child))
    return out
