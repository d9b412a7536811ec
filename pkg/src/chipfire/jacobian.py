"""Smith normal form, the Jacobian group, tree sampling, and the dollar game.

The Jacobian Jac(G) = Div0(G) / im(Delta) is presented by the Smith normal
form of the reduced Laplacian: S = U M V with U, V unimodular and S
diagonal with a divisibility chain.  Cokernel classes map through U^{-1}:
the standard basis vector e_i of coker(S) pulls back to column i of U^{-1},
whose image divisor has order S[i][i].  The product of the invariant
factors is the number of spanning trees (matrix-tree), which also powers
the uniform tree sampler: pick a uniform group element, reduce it, and burn
the reduced divisor into its tree.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import exact
from .graph import Divisor, FiringScript, reduced_laplacian
from .reduction import dhar, reduce
from .treebij import divisor_to_tree


@dataclass(frozen=True)
class SmithDecomposition:
    """S = U M V with U, V unimodular, S diagonal, diagonal divisibility.

    u_inv is carried along because cokernel generators live in its columns.
    Matrices are tuples of tuples of ints; S has the same shape as M.
    """

    U: tuple
    S: tuple
    V: tuple
    u_inv: tuple

    @property
    def diagonal(self):
        return tuple(
            self.S[i][i] for i in range(min(len(self.S), len(self.S[0]) if self.S else 0))
        )


def _identity(k):
    return [[1 if i == j else 0 for j in range(k)] for i in range(k)]


def smith_normal_form(M):
    """Exact Smith normal form of an integer matrix (any shape).

    Pivots are chosen as the smallest nonzero absolute value in the work
    region (lexicographic tie-break), diagonal entries are made nonnegative
    and repaired into a divisibility chain.
    """
    S = [[int(x) for x in row] for row in M]
    rows = len(S)
    cols = len(S[0]) if rows else 0
    U = _identity(rows)
    Uinv = _identity(rows)
    V = _identity(cols)

    def row_swap(i, j):
        S[i], S[j] = S[j], S[i]
        U[i], U[j] = U[j], U[i]
        for r in Uinv:
            r[i], r[j] = r[j], r[i]

    def row_negate(i):
        S[i] = [-x for x in S[i]]
        U[i] = [-x for x in U[i]]
        for r in Uinv:
            r[i] = -r[i]

    def row_addmul(i, j, k):
        # row_i += k * row_j  (on S and U); Uinv: col_j -= k * col_i
        S[i] = [a + k * b for a, b in zip(S[i], S[j])]
        U[i] = [a + k * b for a, b in zip(U[i], U[j])]
        for r in Uinv:
            r[j] -= k * r[i]

    def col_swap(i, j):
        for r in S:
            r[i], r[j] = r[j], r[i]
        for r in V:
            r[i], r[j] = r[j], r[i]

    def col_addmul(i, j, k):
        # col_i += k * col_j (on S and V)
        for r in S:
            r[i] += k * r[j]
        for r in V:
            r[i] += k * r[j]

    def pick_pivot(t):
        best = None
        for i in range(t, rows):
            for j in range(t, cols):
                if S[i][j] != 0:
                    if best is None or abs(S[i][j]) < abs(S[best[0]][best[1]]):
                        best = (i, j)
        return best

    limit = min(rows, cols)
    t = 0
    while t < limit:
        pos = pick_pivot(t)
        if pos is None:
            break
        i, j = pos
        if i != t:
            row_swap(t, i)
        if j != t:
            col_swap(t, j)
        dirty = True
        while dirty:
            dirty = False
            for i in range(t + 1, rows):
                if S[i][t] != 0:
                    k = S[i][t] // S[t][t]
                    row_addmul(i, t, -k)
                    if S[i][t] != 0:
                        row_swap(t, i)  # strictly smaller remainder becomes pivot
                        dirty = True
            for j in range(t + 1, cols):
                if S[t][j] != 0:
                    k = S[t][j] // S[t][t]
                    col_addmul(j, t, -k)
                    if S[t][j] != 0:
                        col_swap(t, j)
                        dirty = True
        t += 1

    rank = t
    for i in range(rank):
        if S[i][i] < 0:
            row_negate(i)

    # Repair divisibility: if d_i does not divide d_{i+1}, fold the next
    # column in and re-clear; the pivot gcd strictly drops, so this ends.
    i = 0
    while i + 1 < rank:
        if S[i + 1][i + 1] % S[i][i] != 0:
            col_addmul(i, i + 1, 1)
            t = i
            while t < rank:
                dirty = True
                while dirty:
                    dirty = False
                    for r in range(t + 1, rows):
                        if S[r][t] != 0:
                            k = S[r][t] // S[t][t]
                            row_addmul(r, t, -k)
                            if S[r][t] != 0:
                                row_swap(t, r)
                                dirty = True
                    for c in range(t + 1, cols):
                        if S[t][c] != 0:
                            k = S[t][c] // S[t][t]
                            col_addmul(c, t, -k)
                            if S[t][c] != 0:
                                col_swap(t, c)
                                dirty = True
                if S[t][t] < 0:
                    row_negate(t)
                t += 1
            i = 0  # re-check the chain from the start
        else:
            i += 1

    return SmithDecomposition(
        U=tuple(tuple(r) for r in U),
        S=tuple(tuple(r) for r in S),
        V=tuple(tuple(r) for r in V),
        u_inv=tuple(tuple(r) for r in Uinv),
    )


@dataclass(frozen=True)
class JacobianPresentation:
    """Jac(G) as a product of cyclic groups Z/n_1 x ... x Z/n_s.

    invariant_factors lists the n_i > 1 in divisibility order; generators
    are degree-zero divisors whose classes generate the factors.  The group
    order (product of the n_i) equals the number of spanning trees.  n is
    the vertex count, kept so element() is well-defined for trivial groups.
    """

    q: int
    n: int
    invariant_factors: tuple
    generators: tuple

    @property
    def order(self):
        out = 1
        for f in self.invariant_factors:
            out *= f
        return out

    def element(self, exponents):
        """The divisor sum(a_i * g_i) for exponents (a_1, ..., a_s).

        Plain integer combination; reduce it to get the canonical class
        representative.
        """
        if len(exponents) != len(self.generators):
            raise ValueError("wrong number of exponents")
        acc = Divisor([0] * self.n)
        for a, g in zip(exponents, self.generators):
            acc = acc + int(a) * g
        return acc


def jacobian(G, q):
    """Presentation of Jac(G) from the Smith form of the reduced Laplacian."""
    if not (0 <= q < G.n):
        raise ValueError("base vertex out of range")
    keep = [v for v in G.vertices if v != q]
    if not keep:
        return JacobianPresentation(q=q, n=G.n, invariant_factors=(), generators=())
    M = reduced_laplacian(G, q).tolist()
    dec = smith_normal_form(M)
    gens = []
    factors = []
    for i, s in enumerate(dec.diagonal):
        if s <= 1:
            continue
        factors.append(int(s))
        coeffs = [0] * G.n
        for a, v in enumerate(keep):
            coeffs[v] = dec.u_inv[a][i]
        coeffs[q] = -sum(coeffs)
        gens.append(Divisor(coeffs))
    return JacobianPresentation(
        q=q, n=G.n, invariant_factors=tuple(factors), generators=tuple(gens)
    )


def count_spanning_trees(G):
    """Matrix-tree count: |det| of the Laplacian with one row/col deleted."""
    if G.n == 1:
        return 1
    d = exact.det(reduced_laplacian(G, 0).tolist())
    if d.denominator != 1:
        raise AssertionError("tree count must be an integer")
    return abs(int(d))


def _uniform_below(gen, bound):
    """Uniform integer in [0, bound) via 64-bit rejection; bound may be big."""
    if bound <= 0:
        raise ValueError("bound must be positive")
    bits = max(1, bound.bit_length())
    words = (bits + 63) // 64
    span = 1 << (64 * words)
    limit = span - span % bound
    while True:
        x = 0
        for w in gen.integers(0, 2**64 - 1, dtype=np.uint64, endpoint=True, size=words):
            x = (x << 64) | int(w)
        if x < limit:
            return x % bound


def sample_spanning_tree(G, q, seed, count=1, backend=None):
    """count uniform spanning trees, bit-reproducible from the seed.

    Sample i draws from a Philox stream with key=seed and counter
    [0, 0, i, 0], so sample i is the same for every count >= i+1.  The
    group element sum(a_i g_i) with uniform exponents is uniform on Jac(G),
    and reducing then burning carries it to a uniform tree.
    """
    pres = jacobian(G, q)
    out = []
    for i in range(count):
        gen = np.random.Generator(np.random.Philox(key=seed, counter=[0, 0, i, 0]))
        exps = [_uniform_below(gen, f) for f in pres.invariant_factors]
        red = reduce(G, q, pres.element(exps), backend=backend).result
        out.append(divisor_to_tree(G, q, red, backend=backend))
    return out


def group_add(G, q, D1, D2, backend=None):
    """Group law on q-reduced degree-zero representatives."""
    for D in (D1, D2):
        if D.degree != 0:
            raise ValueError("group elements are degree-zero divisors")
        if not dhar(G, q, D, backend=backend).reduced:
            raise ValueError("operand is not q-reduced")
    return reduce(G, q, D1 + D2, backend=backend).result


def winnable(G, D, q=0, backend=None):
    """A script whose firing makes D effective, or None.

    Winnability does not depend on q: it holds iff the q-reduced
    representative is effective at q too.
    """
    if len(D) != G.n:
        raise ValueError("divisor size does not match graph")
    if D.is_effective():
        return FiringScript([0] * G.n, q)
    if D.degree < 0:
        return None
    rep = reduce(G, q, D, backend=backend)
    if rep.result.is_effective():
        return rep.script
    return None


def _effective_divisors(n, degree):
    """All effective divisors of the given degree, lexicographically."""
    def rec(prefix, remaining, slots):
        if slots == 1:
            yield prefix + [remaining]
            return
        for c in range(remaining + 1):
            yield from rec(prefix + [c], remaining - c, slots - 1)
    for coeffs in rec([], degree, n):
        yield Divisor(coeffs)


def rank_at_least(G, D, c, backend=None):
    """True iff D - E is winnable for every effective E of degree c.

    Short-circuits on the first failing E in lexicographic order.
    """
    if c < 0:
        raise ValueError("rank threshold must be >= 0")
    if D.degree < c:
        return False
    for E in _effective_divisors(G.n, c):
        if winnable(G, D - E, 0, backend=backend) is None:
            return False
    return True


def rank(G, D, backend=None):
    """Divisor rank: largest r with rank_at_least(G, D, r); -1 if unwinnable."""
    if winnable(G, D, 0, backend=backend) is None:
        return -1
    r = 0
    while rank_at_least(G, D, r + 1, backend=backend):
        r += 1
    return r


def to_critical(G, q, D, backend=None):
    """Duality with the critical configurations: D -> K+ - D.

    Input must be q-reduced; the image is critical (superstable dual) and
    applying the map twice arithmetically returns D.
    """
    from .graph import canonical_plus

    if not dhar(G, q, D, backend=backend).reduced:
        raise ValueError("divisor is not q-reduced")
    return canonical_plus(G) - D
