"""Disjoint-set forest keyed by arbitrary hashable ids."""

from __future__ import annotations

from typing import Hashable, Iterable


class UnionFind:
    """Union by size with path halving."""

    def __init__(self, items: Iterable[Hashable] = ()):
        self.parent: dict = {}
        self.size: dict = {}
        for item in items:
            self.add(item)

    def add(self, item) -> None:
        if item not in self.parent:
            self.parent[item] = item
            self.size[item] = 1

    def __contains__(self, item) -> bool:
        return item in self.parent

    def find(self, item):
        parent = self.parent
        while parent[item] != item:
            parent[item] = parent[parent[item]]
            item = parent[item]
        return item

    def union(self, a, b) -> bool:
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return False
        if self.size[ra] < self.size[rb]:
            ra, rb = rb, ra
        self.parent[rb] = ra
        self.size[ra] += self.size[rb]
        return True

    def groups(self) -> list[list]:
        """Components as sorted member lists, ordered by their smallest member."""
        comps: dict = {}
        for item in self.parent:
            comps.setdefault(self.find(item), []).append(item)
        return sorted((sorted(c) for c in comps.values()), key=lambda c: c[0])
