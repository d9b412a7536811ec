"""Bijection between q-reduced divisors and spanning trees.

Both directions are edge-burning processes driven by the global edge
index: repeatedly take the smallest unprocessed edge with exactly one
endpoint reached.  Going divisor -> tree, a vertex joins when its chip
count equals the number of already-processed edges at it; going tree ->
divisor, tree edges force the join and the processed-edge count is
recorded as the chip count.  Non-tree edges split into externally active
ones (never processed) and passive ones (processed but not in the tree).
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations

from . import _kernels
from .graph import Divisor
from .reduction import dhar


@dataclass(frozen=True)
class SpanningTree:
    """A spanning tree by edge indices, with its external activity split."""

    tree_edges: frozenset
    ext_active: frozenset
    ext_passive: frozenset

    @property
    def processed_edges(self):
        """The set R of edges consumed by the burning process: T u passive."""
        return self.tree_edges | self.ext_passive


def is_spanning_tree(G, edge_indices):
    """True iff the index set is acyclic and touches every vertex."""
    edge_indices = set(edge_indices)
    if len(edge_indices) != G.n - 1:
        return False
    if any(not (0 <= e < G.m) for e in edge_indices):
        return False
    parent = list(range(G.n))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for e in edge_indices:
        u, v = G.edges[e]
        ru, rv = find(u), find(v)
        if ru == rv:
            return False
        parent[ru] = rv
    return True


def enumerate_spanning_trees(G):
    """Brute-force iterator over all spanning trees as frozensets of indices."""
    for combo in combinations(range(G.m), G.n - 1):
        if is_spanning_tree(G, combo):
            yield frozenset(combo)


def _tree_adjacency(G, tree_edges):
    adj = [[] for _ in range(G.n)]
    for e in tree_edges:
        u, v = G.edges[e]
        adj[u].append((v, e))
        adj[v].append((u, e))
    return adj


def _tree_path_edges(adj, n, s, t):
    """Edge indices along the unique tree path from s to t."""
    prev = [None] * n
    seen = [False] * n
    seen[s] = True
    queue = [s]
    head = 0
    while head < len(queue):
        v = queue[head]
        head += 1
        if v == t:
            break
        for w, e in adj[v]:
            if not seen[w]:
                seen[w] = True
                prev[w] = (v, e)
                queue.append(w)
    path = []
    v = t
    while v != s:
        v, e = prev[v]
        path.append(e)
    return path


def external_activity(G, tree_edges):
    """Independent split of non-tree edges into (active, passive, count).

    An edge e not in T is externally active iff e has the largest index in
    the unique cycle of T + e.
    """
    tree_edges = frozenset(tree_edges)
    if not is_spanning_tree(G, tree_edges):
        raise ValueError("edge set is not a spanning tree")
    adj = _tree_adjacency(G, tree_edges)
    active = set()
    passive = set()
    for e in range(G.m):
        if e in tree_edges:
            continue
        u, v = G.edges[e]
        cycle = _tree_path_edges(adj, G.n, u, v)
        if all(e > c for c in cycle):
            active.add(e)
        else:
            passive.add(e)
    return frozenset(active), frozenset(passive), len(active)


def divisor_to_tree(G, q, D, backend=None):
    """Burn a q-reduced divisor into its spanning tree.

    Rejects divisors that fail Dhar's criterion.  The returned tree carries
    the activity split read off the burn: active = never processed,
    passive = processed but not kept.
    """
    if len(D) != G.n:
        raise ValueError("divisor size does not match graph")
    if not dhar(G, q, D, backend=backend).reduced:
        raise ValueError("divisor is not q-reduced")
    tree, in_r = _kernels.tree_from_reduced(G, list(D), q, backend=backend)
    if tree is None:
        raise AssertionError("burn stalled on a reduced divisor")
    tree_set = frozenset(tree)
    processed = frozenset(e for e in range(G.m) if in_r[e])
    return SpanningTree(
        tree_edges=tree_set,
        ext_active=frozenset(range(G.m)) - processed,
        ext_passive=processed - tree_set,
    )


def tree_to_divisor(G, q, tree, d=None, backend=None):
    """Burn a spanning tree into the q-reduced divisor of degree d.

    `tree` is a SpanningTree or an edge-index set; d defaults to the genus
    g = m - n + 1, for which the chip count at q equals the external
    activity of the tree.
    """
    edges = tree.tree_edges if isinstance(tree, SpanningTree) else frozenset(tree)
    if not is_spanning_tree(G, edges):
        raise ValueError("edge set is not a spanning tree")
    if d is None:
        d = G.genus()
    mask = [e in edges for e in range(G.m)]
    a, _in_r = _kernels.divisor_from_tree(G, mask, q, backend=backend)
    a[q] = d - sum(a[v] for v in G.vertices if v != q)
    return Divisor(a)


def processed_edges_of_tree(G, q, tree_edges, backend=None):
    """The R set produced when burning tree -> divisor (for cross-checks)."""
    mask = [e in set(tree_edges) for e in range(G.m)]
    _a, in_r = _kernels.divisor_from_tree(G, mask, q, backend=backend)
    return frozenset(e for e in range(G.m) if in_r[e])
