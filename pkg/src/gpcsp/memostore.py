"""Per-level memo storage.

Three lookup disciplines are supported:

``exact``
    a goal set fails only if it was stored verbatim (hash lookup);
``subset``
    a goal set fails if any stored memo is a subset of it (UB-tree);
``partial``
    like ``subset`` but only memos of size ``n`` and ``n - 1`` are
    considered for an ``n``-sized goal set.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

MODES = ("exact", "subset", "partial")


@dataclass(frozen=True)
class Memo:
    level: int
    props: tuple[int, ...]

    def __post_init__(self):
        if not self.props:
            raise ValueError("a memo must name at least one proposition")
        if any(a >= b for a, b in zip(self.props, self.props[1:])):
            raise ValueError("memo propositions must be strictly ascending")

    def __len__(self) -> int:
        return len(self.props)


class UbTreeNode:
    __slots__ = ("element", "children", "end")

    def __init__(self, element: int = -1):
        self.element = element
        self.children: dict[int, UbTreeNode] = {}
        self.end = False


class UbTree:
    """Set-enumeration trie answering "is some stored set a subset of Q?"."""

    def __init__(self):
        self.root = UbTreeNode()
        self.node_count = 0

    def insert(self, elements: Sequence[int]) -> None:
        node = self.root
        for e in elements:
            child = node.children.get(e)
            if child is None:
                child = node.children[e] = UbTreeNode(e)
                self.node_count += 1
            node = child
        node.end = True

    def find_subset(self, query: Sequence[int]) -> tuple[int, ...] | None:
        """First stored subset of ``query`` in ascending depth-first order."""
        path: list[int] = []
        n = len(query)

        def walk(node: UbTreeNode, start: int) -> bool:
            children = node.children
            if not children:
                return False
            for i in range(start, n):
                child = children.get(query[i])
                if child is None:
                    continue
                path.append(child.element)
                if child.end or walk(child, i + 1):
                    return True
                path.pop()
            return False

        return tuple(path) if walk(self.root, 0) else None


class MemoTable:
    def __init__(self, mode: str = "exact"):
        if mode not in MODES:
            raise ValueError(f"unknown memo mode {mode!r}")
        self.mode = mode
        self._sets: dict[int, set[tuple[int, ...]]] = {}
        self._trees: dict[int, UbTree] = {}
        self.stored = 0
        self.hits = 0
        self.lookups = 0
        self.total_stored_length = 0

    def insert(self, memo: Memo) -> bool:
        """Store ``memo``; returns False when it was already present."""
        bucket = self._sets.setdefault(memo.level, set())
        if memo.props in bucket:
            return False
        bucket.add(memo.props)
        if self.mode == "subset":
            tree = self._trees.get(memo.level)
            if tree is None:
                tree = self._trees[memo.level] = UbTree()
            tree.insert(memo.props)
        self.stored += 1
        self.total_stored_length += len(memo.props)
        return True

    def lookup(self, level: int, goals: Sequence[int]) -> Memo | None:
        """Return a stored memo that declares ``goals`` (sorted) failing at ``level``."""
        self.lookups += 1
        bucket = self._sets.get(level)
        if not bucket:
            return None
        key = tuple(goals)
        found = None
        if self.mode == "exact":
            if key in bucket:
                found = key
        elif self.mode == "subset":
            found = self._trees[level].find_subset(key)
        else:
            if key in bucket:
                found = key
            else:
                for i in range(len(key)):
                    sub = key[:i] + key[i + 1:]
                    if sub in bucket:
                        found = sub
                        break
        if found is None:
            return None
        self.hits += 1
        return Memo(level, found)

    def count_at(self, level: int) -> int:
        return len(self._sets.get(level, ()))

    def memos(self, level: int | None = None) -> list[Memo]:
        levels = sorted(self._sets) if level is None else [level]
        return [Memo(k, props) for k in levels for props in sorted(self._sets.get(k, ()))]

    def levels(self) -> list[int]:
        return sorted(self._sets)

    def node_count(self) -> int:
        return sum(t.node_count for t in self._trees.values())

    @property
    def avln(self) -> float:
        return self.total_stored_length / self.stored if self.stored else 0.0

    @property
    def avfm(self) -> float:
        return self.hits / self.stored if self.stored else 0.0

    def dump(self, names=None) -> str:
        """Per-level listing of stored memos, one memo per line."""
        lines = []
        for k in self.levels():
            for props in sorted(self._sets[k]):
                shown = [names(p) for p in props] if names else [str(p) for p in props]
                lines.append(f"{k}: {' '.join(shown)}")
        return "\n".join(lines) + ("\n" if lines else "")


def naive_subset_scan(all_memos: Iterable[Memo], level: int, goals: Sequence[int]) -> Memo | None:
    """Linear-scan reference for subset lookup."""
    query = set(goals)
    for memo in all_memos:
        if memo.level == level and query.issuperset(memo.props):
            return memo
    return None
