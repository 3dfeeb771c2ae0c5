"""
Union-find structures used by the engines.

- `DisjointSet`: a small dict-based forest (union by size, path halving) used when
  contracting graphs and pre-merging forced-open edges.
- `BatchedUnionFind`: one forest per row of a numpy batch, so a whole chunk of edge
  configurations is processed with vectorised operations. It always hooks the larger
  root under the smaller one, so the root of every component is its smallest vertex
  index; rows of `roots()` are therefore canonical partition labels.
"""
from __future__ import annotations

import collections
from typing import Dict, Generic, Hashable, Iterable, Iterator, List, Set, Tuple, TypeVar

import numpy as np

T = TypeVar('T', bound=Hashable)


class DisjointSet(Generic[T]):
    def __init__(self, items: Iterable[T] = ()):
        self._data: Dict[T, Tuple[T, int]] = {}
        for item in items:
            self.add(item)

    def __len__(self) -> int:
        return len(self._data)

    def __contains__(self, item: T) -> bool:
        return item in self._data

    def add(self, x: T):
        if x not in self._data:
            self._data[x] = (x, 1)

    def find(self, x: T) -> T:
        return self._find(x)[0]

    def _find(self, x: T) -> Tuple[T, int]:
        data = self._data
        while x != data[x][0]:
            data[x] = data[data[x][0]]
            x = data[x][0]
        return data[x]

    def union(self, x: T, y: T) -> bool:
        """ Merges the sets of `x` and `y`; returns False if they were already merged. """
        root_x, size_x = self._find(x)
        root_y, size_y = self._find(y)
        if root_x == root_y:
            return False
        if size_x < size_y:
            root_x, root_y = root_y, root_x
        self._data[root_y] = (root_x, size_x + size_y)
        self._data[root_x] = (root_x, size_x + size_y)
        return True

    def connected(self, x: T, y: T) -> bool:
        return self.find(x) == self.find(y)

    def itersets(self) -> Iterator[Set[T]]:
        classes: Dict[T, Set[T]] = collections.defaultdict(set)
        for element in self._data:
            classes[self.find(element)].add(element)
        yield from classes.values()

    def groups(self, order: Iterable[T]) -> List[List[T]]:
        """ Sets as lists, each ordered by `order`, listed by their first member in `order`. """
        by_root: Dict[T, List[T]] = {}
        for item in order:
            by_root.setdefault(self.find(item), []).append(item)
        return list(by_root.values())


class BatchedUnionFind:
    def __init__(self, batch: int, n: int):
        self.batch = batch
        self.n = n
        self.parent = np.tile(np.arange(n, dtype=np.int64), (batch, 1))
        self._rows = np.arange(batch)

    def find(self, x: np.ndarray) -> np.ndarray:
        """ Roots of `x[r]` in row `r`, compressing each queried vertex onto its root. """
        start = x
        root = x
        while True:
            parent = self.parent[self._rows, root]
            if np.array_equal(parent, root):
                break
            root = parent
        self.parent[self._rows, start] = root
        return root

    def union(self, a: int, b: int, mask: np.ndarray):
        """ Joins vertices `a` and `b` in every row where `mask` is set. """
        root_a = self.find(np.full(self.batch, a, dtype=np.int64))
        root_b = self.find(np.full(self.batch, b, dtype=np.int64))
        selected = mask & (root_a != root_b)
        if not selected.any():
            return
        rows = self._rows[selected]
        low = np.minimum(root_a[selected], root_b[selected])
        high = np.maximum(root_a[selected], root_b[selected])
        self.parent[rows, high] = low

    def roots(self) -> np.ndarray:
        """ `(batch, n)` matrix of component roots (= smallest member index). """
        columns = [
            self.find(np.full(self.batch, vertex, dtype=np.int64)) for vertex in range(self.n)
        ]
        if not columns:
            return np.zeros((self.batch, 0), dtype=np.int64)
        return np.stack(columns, axis=1)


def batched_roots(n: int, edges: List[Tuple[int, int]], open_mask: np.ndarray) -> np.ndarray:
    """
    Component labels for a batch of edge configurations.

    Args:
        n: Vertex count (vertices are `0..n-1`).
        edges: Endpoint index pairs, one per column of `open_mask`.
        open_mask: `(batch, len(edges))` boolean matrix, `True` where the edge is open.
    """
    forest = BatchedUnionFind(open_mask.shape[0], n)
    for column, (a, b) in enumerate(edges):
        forest.union(a, b, open_mask[:, column])
    return forest.roots()
