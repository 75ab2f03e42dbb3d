"""Union-find over dense integer ids.

The representative of every class is its least element, which keeps class
numbering independent of merge order.
"""

from __future__ import annotations

import numpy as np


class UnionFind:
    def __init__(self, size: int):
        self.parent = list(range(size))

    def __len__(self):
        return len(self.parent)

    def find(self, x: int) -> int:
        parent = self.parent
        root = x
        while parent[root] != root:
            root = parent[root]
        while parent[x] != root:
            parent[x], x = root, parent[x]
        return root

    def union(self, x: int, y: int) -> bool:
        rx, ry = self.find(x), self.find(y)
        if rx == ry:
            return False
        if rx < ry:
            self.parent[ry] = rx
        else:
            self.parent[rx] = ry
        return True

    def same(self, x: int, y: int) -> bool:
        return self.find(x) == self.find(y)

    def labels(self) -> tuple[list[int], int]:
        """Dense class labels, numbered by least member, and the class count."""
        label: dict[int, int] = {}
        out = []
        for x in range(len(self.parent)):
            r = self.find(x)
            if r not in label:
                label[r] = len(label)
            out.append(label[r])
        return out, len(label)

    def roots(self) -> np.ndarray:
        """Representative of every element as an array (pointer jumping)."""
        parent = np.asarray(self.parent, dtype=np.int64)
        while True:
            nxt = parent[parent]
            if np.array_equal(nxt, parent):
                return parent
            parent = nxt
