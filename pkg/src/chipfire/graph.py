"""Connected loopless multigraphs, divisors, and chip-firing moves.

A Graph stores an indexed edge list; parallel edges are repeated pairs and
the edge index 0..m-1 is the canonical total order used by the burning
algorithms.  Divisors are integer chip vectors, vertex functions are integer
potentials, and the Laplacian acts by Delta(f)(v) = sum over edges {v,w} of
f(v) - f(w).
"""

from __future__ import annotations

from fractions import Fraction

import numpy as np

from . import exact


class Graph:
    """Finite connected loopless multigraph with indexed edges.

    Vertices are 0..n-1.  Edges are unordered pairs given in a fixed order;
    parallel edges simply repeat.  Loops and disconnected inputs are
    rejected.  n = 1 with no edges is the smallest legal graph.
    """

    __slots__ = ("n", "edges", "deg", "_indptr", "_nbr", "_eidx")

    def __init__(self, n, edges):
        n = int(n)
        if n < 1:
            raise ValueError("graph needs at least one vertex")
        norm = []
        for e in edges:
            u, v = e
            u, v = int(u), int(v)
            if not (0 <= u < n and 0 <= v < n):
                raise ValueError(f"edge {e!r} out of range for n={n}")
            if u == v:
                raise ValueError(f"loop at vertex {u} not allowed")
            norm.append((min(u, v), max(u, v)))
        self.n = n
        self.edges = tuple(norm)

        deg = [0] * n
        for u, v in self.edges:
            deg[u] += 1
            deg[v] += 1
        self.deg = tuple(deg)

        # CSR-style incidence, half-edges sorted by edge index per vertex.
        indptr = np.zeros(n + 1, dtype=np.int64)
        for u, v in self.edges:
            indptr[u + 1] += 1
            indptr[v + 1] += 1
        indptr = np.cumsum(indptr)
        nbr = np.zeros(2 * len(self.edges), dtype=np.int64)
        eidx = np.zeros(2 * len(self.edges), dtype=np.int64)
        fill = indptr[:-1].copy()
        for i, (u, v) in enumerate(self.edges):
            nbr[fill[u]] = v
            eidx[fill[u]] = i
            fill[u] += 1
            nbr[fill[v]] = u
            eidx[fill[v]] = i
            fill[v] += 1
        self._indptr = indptr
        self._nbr = nbr
        self._eidx = eidx

        if not self._connected():
            raise ValueError("graph must be connected")

    def _connected(self):
        if self.n == 1:
            return True
        seen = [False] * self.n
        seen[0] = True
        stack = [0]
        count = 1
        while stack:
            v = stack.pop()
            for w in self.neighbors(v):
                if not seen[w]:
                    seen[w] = True
                    count += 1
                    stack.append(w)
        return count == self.n

    @property
    def m(self):
        return len(self.edges)

    @property
    def vertices(self):
        return range(self.n)

    def degree(self, v):
        return self.deg[v]

    def neighbors(self, v):
        """Neighbor of v across each incident edge, in edge-index order."""
        return self._nbr[self._indptr[v]:self._indptr[v + 1]]

    def incident(self, v):
        """Indices of edges incident to v, in increasing edge order."""
        return self._eidx[self._indptr[v]:self._indptr[v + 1]]

    def genus(self):
        """First Betti number m - n + 1 (independent cycles)."""
        return self.m - self.n + 1

    def __eq__(self, other):
        return (
            isinstance(other, Graph)
            and self.n == other.n
            and self.edges == other.edges
        )

    def __hash__(self):
        return hash((self.n, self.edges))

    def __repr__(self):
        return f"Graph({self.n}, {list(self.edges)!r})"


class Divisor:
    """Integer chip configuration on the vertices of a graph."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs):
        self.coeffs = tuple(int(c) for c in coeffs)

    @property
    def degree(self):
        return sum(self.coeffs)

    def is_effective(self, skip=None):
        """True when every coefficient is >= 0, optionally off one vertex."""
        return all(c >= 0 for v, c in enumerate(self.coeffs) if v != skip)

    def __getitem__(self, v):
        return self.coeffs[v]

    def __len__(self):
        return len(self.coeffs)

    def __iter__(self):
        return iter(self.coeffs)

    def __add__(self, other):
        return Divisor(a + b for a, b in zip(self.coeffs, other.coeffs, strict=True))

    def __sub__(self, other):
        return Divisor(a - b for a, b in zip(self.coeffs, other.coeffs, strict=True))

    def __neg__(self):
        return Divisor(-c for c in self.coeffs)

    def __rmul__(self, k):
        return Divisor(int(k) * c for c in self.coeffs)

    def __eq__(self, other):
        return isinstance(other, Divisor) and self.coeffs == other.coeffs

    def __hash__(self):
        return hash(self.coeffs)

    def __repr__(self):
        return f"Divisor({list(self.coeffs)!r})"


class VertexFunction:
    """Integer-valued function on vertices (a firing potential)."""

    __slots__ = ("values",)

    def __init__(self, values):
        self.values = tuple(int(x) for x in values)

    def __getitem__(self, v):
        return self.values[v]

    def __len__(self):
        return len(self.values)

    def __iter__(self):
        return iter(self.values)

    def __add__(self, other):
        return type(self)(a + b for a, b in zip(self.values, other.values, strict=True))

    def __neg__(self):
        return type(self)(-x for x in self.values)

    def __eq__(self, other):
        return isinstance(other, VertexFunction) and self.values == other.values

    def __hash__(self):
        return hash(self.values)

    def __repr__(self):
        return f"{type(self).__name__}({list(self.values)!r})"


class FiringScript(VertexFunction):
    """Vertex function normalized to vanish at the base vertex q.

    Adding a constant does not change Delta(f), so scripts are stored in the
    unique representative with f(q) = 0.
    """

    __slots__ = ("q",)

    def __init__(self, values, q):
        values = [int(x) for x in values]
        base = values[q]
        super().__init__(x - base for x in values)
        self.q = q

    def __eq__(self, other):
        return (
            isinstance(other, FiringScript)
            and self.values == other.values
            and self.q == other.q
        )

    def __hash__(self):
        return hash((self.values, self.q))

    def __repr__(self):
        return f"FiringScript({list(self.values)!r}, q={self.q})"


def laplacian(G):
    """Graph Laplacian Q = D - A as an (n x n) int64 array."""
    Q = np.zeros((G.n, G.n), dtype=np.int64)
    for u, v in G.edges:
        Q[u, u] += 1
        Q[v, v] += 1
        Q[u, v] -= 1
        Q[v, u] -= 1
    return Q


def reduced_laplacian(G, q):
    """Q with row and column q deleted; rows/cols follow vertex order."""
    keep = [v for v in G.vertices if v != q]
    Q = laplacian(G)
    return Q[np.ix_(keep, keep)]


def apply_laplacian(G, f):
    """Divisor Delta(f); f is a VertexFunction or any integer sequence."""
    vals = list(f)
    out = [0] * G.n
    for u, v in G.edges:
        d = vals[u] - vals[v]
        out[u] += d
        out[v] -= d
    return Divisor(out)


def apply_laplacian_rational(G, f):
    """Delta(f) for rational-valued f; returns a list of Fractions."""
    vals = [Fraction(x) for x in f]
    out = [Fraction(0)] * G.n
    for u, v in G.edges:
        d = vals[u] - vals[v]
        out[u] += d
        out[v] -= d
    return out


def indicator(n, A):
    """Characteristic vector of a vertex set A as a VertexFunction."""
    chi = [0] * n
    for v in A:
        chi[v] = 1
    return VertexFunction(chi)


def fire_set(G, D, A):
    """Fire every vertex of A once: D - Delta(chi_A).

    Each vertex of A sends one chip along each edge leaving A; edges inside
    A cancel.
    """
    A = set(A)
    for v in A:
        if not (0 <= v < G.n):
            raise ValueError(f"vertex {v} out of range")
    return D - apply_laplacian(G, indicator(G.n, A))


def outdeg(G, A, v):
    """Number of edges from v to vertices outside A; requires v in A."""
    A = set(A)
    if v not in A:
        raise ValueError(f"vertex {v} must belong to the firing set")
    return int(sum(1 for w in G.neighbors(v) if w not in A))


def is_linearly_equivalent(G, D1, D2, q):
    """FiringScript f with D1 - Delta(f) = D2, or None.

    Solves the reduced system L_(q) [D1 - D2] and accepts iff the solution
    is integral; degrees must match first.
    """
    if len(D1) != G.n or len(D2) != G.n:
        raise ValueError("divisor size does not match graph")
    if D1.degree != D2.degree:
        return None
    diff = D1 - D2
    if all(c == 0 for c in diff):
        return FiringScript([0] * G.n, q)
    keep = [v for v in G.vertices if v != q]
    Qq = reduced_laplacian(G, q).tolist()
    rhs = [[diff[v]] for v in keep]
    sol = exact.solve(Qq, rhs)
    f = [0] * G.n
    for idx, v in enumerate(keep):
        x = sol[idx][0]
        if x.denominator != 1:
            return None
        f[v] = int(x)
    script = FiringScript(f, q)
    if D1 - apply_laplacian(G, script) != D2:
        raise AssertionError("equivalence solve produced a wrong script")
    return script


def complete_graph(n):
    """K_n."""
    return Graph(n, [(i, j) for i in range(n) for j in range(i + 1, n)])


def cycle_graph(n):
    """C_n (n >= 3 simple; n = 2 gives the doubled edge)."""
    if n == 2:
        return Graph(2, [(0, 1), (0, 1)])
    return Graph(n, [(i, (i + 1) % n) for i in range(n)])


def path_graph(n):
    """Path on n vertices."""
    return Graph(n, [(i, i + 1) for i in range(n - 1)])


def canonical_plus(G):
    """The divisor K+ with deg(v) - 1 chips at every vertex."""
    return Divisor(d - 1 for d in G.deg)
