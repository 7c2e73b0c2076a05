# Disjoint sets whose representative is always the least member.
import collections
from collections.abc import Callable, Hashable, Iterable
from typing import Any, Generic, TypeVar

from iffkit.iffkit_utils import sort_key

T = TypeVar("T", bound=Hashable)


class UnionFind(Generic[T]):
    def __init__(self, elements: Iterable[T] = (), key: Callable[[T], Any] = sort_key) -> None:
        self.parent: dict[T, T] = {}
        self.key = key
        for e in elements:
            self.make_set(e)

    def make_set(self, e: T) -> None:
        if e not in self.parent:
            self.parent[e] = e

    # find with path compression
    def find(self, e: T) -> T:
        self.make_set(e)
        root = e
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[e] != root:
            self.parent[e], e = root, self.parent[e]
        return root

    def union(self, x: T, y: T) -> T:
        x_root = self.find(x)
        y_root = self.find(y)
        if x_root == y_root:
            return x_root
        if self.key(y_root) < self.key(x_root):
            x_root, y_root = y_root, x_root
        self.parent[y_root] = x_root
        return x_root

    def classes(self) -> dict[T, list[T]]:
        """Representative -> members, both in key order."""
        sets: dict[T, list[T]] = collections.defaultdict(list)
        for e in sorted(self.parent, key=self.key):
            sets[self.find(e)].append(e)
        return dict(sorted(sets.items(), key=lambda item: self.key(item[0])))

    def __len__(self) -> int:
        return len({self.find(e) for e in self.parent})
