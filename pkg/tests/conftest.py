"""Shared fixtures and an independent regular-tree oracle.

The oracle builds breadth-first adjacency for a regular tree with a plain
queue, so the arithmetic vertex numbering in the package can be checked
against code that cannot share its bugs.
"""

from __future__ import annotations

from collections import deque

import pytest

from hallforest import TreeEntourage


def bfs_tree_adjacency(r: int, max_vertex: int) -> dict[int, list[int]]:
    """Neighbor lists of the r-regular tree under breadth-first numbering.

    Vertices are 1..max_vertex; lists come out in discovery order, parent
    first for every vertex except the root. Vertices close to max_vertex
    may be missing children that fell outside the range.
    """
    adj: dict[int, list[int]] = {1: []}
    queue = deque([1])
    next_label = 2
    while next_label <= max_vertex and queue:
        v = queue.popleft()
        want = r if v == 1 else r - 1
        for _ in range(want):
            if next_label > max_vertex:
                break
            w = next_label
            next_label += 1
            adj[v].append(w)
            adj[w] = [v]
            queue.append(w)
    return adj


@pytest.fixture(scope="session")
def tree6() -> TreeEntourage:
    return TreeEntourage(6)


@pytest.fixture(scope="session")
def tree7() -> TreeEntourage:
    return TreeEntourage(7)
