"""Union-find with an optional parity bit per element."""

from __future__ import annotations


class UnionFind:
    def __init__(self, items=()):
        self.parent = {}
        self.parity = {}
        self.rank = {}
        for x in items:
            self.add(x)

    def add(self, x):
        if x not in self.parent:
            self.parent[x] = x
            self.parity[x] = 1
            self.rank[x] = 0

    def find(self, x):
        """Return (root, parity of x relative to root)."""
        self.add(x)
        path = []
        while self.parent[x] != x:
            path.append(x)
            x = self.parent[x]
        root = x
        # compress, accumulating parity from the top of the path down
        acc = 1
        for y in reversed(path):
            acc *= self.parity[y]
            self.parity[y] = acc
            self.parent[y] = root
        return root, (self.parity[path[0]] if path else 1)

    def root(self, x):
        return self.find(x)[0]

    def union(self, a, b, parity: int = 1) -> bool:
        """Record a = b^parity. Returns False on a parity contradiction."""
        ra, pa = self.find(a)
        rb, pb = self.find(b)
        if ra == rb:
            return pa * pb == parity
        if self.rank[ra] < self.rank[rb]:
            ra, rb, pa, pb = rb, ra, pb, pa
        self.parent[rb] = ra
        self.parity[rb] = pa * pb * parity
        if self.rank[ra] == self.rank[rb]:
            self.rank[ra] += 1
        return True

    def groups(self) -> dict:
        out: dict = {}
        for x in self.parent:
            out.setdefault(self.root(x), []).append(x)
        return out
