"""Potential theory on graphs: generalized inverses of the Laplacian,
the j-function, effective resistance, and the energy pairings E_q and b_q.

All values are exact rationals.  Potential tables keep an integer numerator
matrix over a common denominator so the inner loops of b_q / E_q stay in
integer arithmetic.
"""

from __future__ import annotations

from fractions import Fraction

from . import exact
from .graph import (
    apply_laplacian,
    canonical_plus,
    laplacian,
    reduced_laplacian,
)


class GeneralizedInverse:
    """A matrix L with Q L Q = Q, tagged with how it was built.

    kind is one of 'reduced' (q-reduced inverse L_(q)), 'moore_penrose',
    or 'weighted' (L_mu, optionally shifted to G_mu with G_mu mu = 0).
    """

    __slots__ = ("kind", "L", "q", "mu")

    def __init__(self, kind, L, q=None, mu=None):
        self.kind = kind
        self.L = tuple(tuple(Fraction(x) for x in row) for row in L)
        self.q = q
        self.mu = None if mu is None else tuple(Fraction(x) for x in mu)

    @property
    def n(self):
        return len(self.L)

    def apply(self, vec):
        """L @ vec as a list of Fractions."""
        return exact.mat_vec(self.L, list(vec))

    def __repr__(self):
        tag = f", q={self.q}" if self.q is not None else ""
        return f"GeneralizedInverse({self.kind!r}, n={self.n}{tag})"


def reduced_inverse(G, q):
    """L_(q): invert Q with row/col q deleted, pad the q row/col with zeros."""
    n = G.n
    if not (0 <= q < n):
        raise ValueError("base vertex out of range")
    keep = [v for v in range(n) if v != q]
    if keep:
        inv = exact.invert(reduced_laplacian(G, q).tolist())
    else:
        inv = []
    L = [[Fraction(0)] * n for _ in range(n)]
    for a, p in enumerate(keep):
        for b, v in enumerate(keep):
            L[p][v] = inv[a][b]
    return GeneralizedInverse("reduced", L, q=q)


def moore_penrose(G):
    """Q+ = (Q + J/n)^(-1) - J/n."""
    n = G.n
    Q = laplacian(G).tolist()
    shifted = [
        [Fraction(Q[i][j]) + Fraction(1, n) for j in range(n)] for i in range(n)
    ]
    inv = exact.invert(shifted)
    L = [[inv[i][j] - Fraction(1, n) for j in range(n)] for i in range(n)]
    return GeneralizedInverse("moore_penrose", L)


def weighted_inverse(G, mu, shifted=False):
    """L_mu = sum_i mu_i L_(i) for rational weights mu summing to 1.

    L_mu mu is a constant vector c_mu 1; with shifted=True returns
    G_mu = L_mu - c_mu J, which satisfies G_mu mu = 0.
    """
    n = G.n
    mu = [Fraction(x) for x in mu]
    if len(mu) != n:
        raise ValueError("weight vector size does not match graph")
    if sum(mu) != 1:
        raise ValueError("weights must sum to 1")
    L = [[Fraction(0)] * n for _ in range(n)]
    for i in range(n):
        if mu[i] == 0:
            continue
        Li = reduced_inverse(G, i).L
        for p in range(n):
            row = Li[p]
            for v in range(n):
                L[p][v] += mu[i] * row[v]
    if not shifted:
        return GeneralizedInverse("weighted", L, mu=mu)
    prods = [sum(L[p][v] * mu[v] for v in range(n)) for p in range(n)]
    c = prods[0]
    if any(x != c for x in prods):
        raise AssertionError("L_mu mu is not constant")
    Ls = [[L[p][v] - c for v in range(n)] for p in range(n)]
    return GeneralizedInverse("weighted", Ls, mu=mu)


class PotentialTable:
    """The j-function table for a base vertex q.

    J[p][v] = j_q(p, v) is the potential at v when one unit of current
    enters at p and exits at q, grounded at q.  Stored as an integer
    numerator matrix over a common denominator (the spanning tree count).
    """

    __slots__ = ("q", "n", "num", "den")

    def __init__(self, q, num, den):
        self.q = q
        self.n = len(num)
        self.num = tuple(tuple(int(x) for x in row) for row in num)
        self.den = int(den)

    def j(self, p, v):
        return Fraction(self.num[p][v], self.den)

    def resistance(self, p):
        """Effective resistance r(p, q) = j_q(p, p)."""
        return Fraction(self.num[p][p], self.den)

    def g(self, v):
        """g_q(v) = sum_p j_q(p, v); satisfies Delta(g_q) = sum_v (v) - n (q)."""
        return Fraction(sum(row[v] for row in self.num), self.den)

    def b(self, D, h=None):
        """b_q(D) = <1, D>_q, or the h-weighted variant sum j_q(p,v) h(p) D(v).

        h, when given, must be positive off q; its value at q is irrelevant
        since j_q(q, .) = 0.
        """
        if h is None:
            total = 0
            for v, c in enumerate(D):
                if c:
                    total += c * sum(row[v] for row in self.num)
            return Fraction(total, self.den)
        h = [Fraction(x) for x in h]
        if any(h[p] <= 0 for p in range(self.n) if p != self.q):
            raise ValueError("weights must be positive off the base vertex")
        total = Fraction(0)
        for v, c in enumerate(D):
            if c:
                total += c * sum(h[p] * self.num[p][v] for p in range(self.n))
        return total / self.den

    def energy(self, D):
        """E_q(D) = <D - deg(D) (q), D - deg(D) (q)> = v^T L_(q) v."""
        vec = list(D)
        vec[self.q] -= sum(vec)
        support = [v for v, c in enumerate(vec) if c]
        total = 0
        for p in support:
            row = self.num[p]
            total += vec[p] * sum(row[v] * vec[v] for v in support)
        return Fraction(total, self.den)


def j_function(G, q):
    """PotentialTable of j_q values; entries are cofactors over tree count."""
    n = G.n
    keep = [v for v in range(n) if v != q]
    num = [[0] * n for _ in range(n)]
    if not keep:
        return PotentialTable(q, num, 1)
    Qq = reduced_laplacian(G, q).tolist()
    den = exact.det(Qq)
    inv = exact.invert(Qq)
    den_int = int(den)
    for a, p in enumerate(keep):
        for b, v in enumerate(keep):
            entry = inv[a][b] * den_int
            if entry.denominator != 1:
                raise AssertionError("j-function numerators must be integral")
            num[p][v] = int(entry)
    return PotentialTable(q, num, den_int)


def effective_resistance(G, p, q):
    """r(p, q), exact."""
    if p == q:
        return Fraction(0)
    return j_function(G, q).resistance(p)


def energy_pairing(G, D1, D2, inverse=None):
    """<D1, D2> = [D1]^T L [D2] for degree-zero divisors.

    Independent of the generalized inverse used; defaults to L_(0).
    """
    if D1.degree != 0 or D2.degree != 0:
        raise ValueError("energy pairing requires degree-zero divisors")
    if inverse is None:
        inverse = reduced_inverse(G, 0)
    Lv = inverse.apply(list(D2))
    return sum(Fraction(D1[p]) * Lv[p] for p in range(G.n))


def q_energy(G, q, D, table=None):
    """E_q(D), the q-energy <D - deg(D)(q), D - deg(D)(q)>."""
    if table is None:
        table = j_function(G, q)
    return table.energy(D)


def b_q(G, q, D, h=None, table=None):
    """b_q(D) = sum_v g_q(v) D(v), or the positive-weighted variant."""
    if table is None:
        table = j_function(G, q)
    return table.b(D, h=h)


def total_energy(G, D):
    """script-E(D) = sum over base vertices q of E_q(D)."""
    return sum(q_energy(G, q, D) for q in G.vertices)


def pentagon_move(G, D, v):
    """Borrowing move of the sign game: requires D(v) < 0.

    Replaces D by D + (-D(v)) Delta(chi_v); on a cycle this sends the
    pattern (x, y, z) around v to (x + y, -y, z + y).
    """
    y = D[v]
    if y >= 0:
        raise ValueError("move requires a negative coefficient")
    chi = [0] * G.n
    chi[v] = -y
    return D + apply_laplacian(G, chi)


def k_plus(G):
    """Alias for the all-(deg-1) divisor used in the move bounds."""
    return canonical_plus(G)


__all__ = [
    "GeneralizedInverse",
    "PotentialTable",
    "reduced_inverse",
    "moore_penrose",
    "weighted_inverse",
    "j_function",
    "effective_resistance",
    "energy_pairing",
    "q_energy",
    "b_q",
    "total_energy",
    "pentagon_move",
]
