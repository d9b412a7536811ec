"""Shared graph corpus for the test suite.

Three tiers:
    - SMALL: every connected simple graph on up to 5 vertices, one per
      isomorphism class (1 + 1 + 2 + 6 + 21 = 31 graphs).
    - NAMED: the standard families the oracles were frozen on.
    - RANDOM: 20 seeded connected multigraphs (parallel edges allowed).
"""

import itertools

import numpy as np

from chipfire.graph import Graph, Divisor, complete_graph, cycle_graph, path_graph


def _canonical_form(n, edges):
    """Min over vertex relabelings of the sorted edge multiset."""
    best = None
    for perm in itertools.permutations(range(n)):
        relab = tuple(sorted(tuple(sorted((perm[u], perm[v]))) for u, v in edges))
        if best is None or relab < best:
            best = relab
    return best


def _connected(n, edges):
    if n == 1:
        return True
    adj = [[] for _ in range(n)]
    for u, v in edges:
        adj[u].append(v)
        adj[v].append(u)
    seen = {0}
    stack = [0]
    while stack:
        for w in adj[stack.pop()]:
            if w not in seen:
                seen.add(w)
                stack.append(w)
    return len(seen) == n


def connected_simple_graphs(n):
    """All connected simple graphs on n labeled vertices, one per iso class."""
    pairs = list(itertools.combinations(range(n), 2))
    seen = set()
    out = []
    for r in range(n - 1, len(pairs) + 1):
        for subset in itertools.combinations(pairs, r):
            if not _connected(n, subset):
                continue
            key = _canonical_form(n, subset)
            if key in seen:
                continue
            seen.add(key)
            out.append(Graph(n, subset))
    return out


def random_multigraph(n, extra, rng):
    """Random spanning tree plus `extra` uniform chords; parallel edges kept."""
    edges = []
    for v in range(1, n):
        edges.append((int(rng.integers(0, v)), v))
    for _ in range(extra):
        u = int(rng.integers(0, n))
        v = int(rng.integers(0, n - 1))
        if v >= u:
            v += 1
        edges.append((u, v))
    return Graph(n, edges)


def random_divisor(n, rng, lo=-3, hi=8):
    return Divisor([int(rng.integers(lo, hi + 1)) for _ in range(n)])


def small_corpus():
    graphs = []
    for n in range(1, 6):
        graphs.extend(connected_simple_graphs(n))
    return graphs


def named_corpus():
    return [
        complete_graph(3),
        complete_graph(4),
        cycle_graph(3),
        cycle_graph(4),
        cycle_graph(5),
        cycle_graph(6),
        cycle_graph(7),
        cycle_graph(8),
        path_graph(2),
        path_graph(5),
    ]


def random_corpus(count=20, seed=20240817):
    rng = np.random.default_rng(seed)
    graphs = []
    for _ in range(count):
        n = int(rng.integers(2, 8))
        extra = int(rng.integers(0, min(6, 13 - n)))
        graphs.append(random_multigraph(n, extra, rng))
    return graphs


SMALL = small_corpus()
NAMED = named_corpus()
RANDOM = random_corpus()
