"""Exact rational / integer linear algebra used by the combinatorial modules."""
from __future__ import annotations

from fractions import Fraction
from math import gcd
from itertools import permutations


def frac(x) -> Fraction:
    """Parse ints, Fractions and strings like '3/4' or '-2' exactly."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x.strip())
    if isinstance(x, float):
        raise TypeError("floats are not accepted in exact code paths")
    return Fraction(x)


def fmt(x: Fraction) -> str:
    x = Fraction(x)
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def lcm(a: int, b: int) -> int:
    return a // gcd(a, b) * b


def primitive(vec) -> tuple[int, ...]:
    """Scale a rational vector to coprime integers (sign kept)."""
    vec = [frac(v) for v in vec]
    den = 1
    for v in vec:
        den = lcm(den, v.denominator)
    ints = [int(v * den) for v in vec]
    g = 0
    for v in ints:
        g = gcd(g, v)
    if g == 0:
        return tuple(ints)
    return tuple(v // g for v in ints)


def rref(rows):
    """Reduced row echelon form over Q. Returns (rows, pivot columns)."""
    m = [[frac(x) for x in r] for r in rows]
    if not m:
        return [], []
    ncol = len(m[0])
    pivots = []
    r = 0
    for c in range(ncol):
        p = None
        for i in range(r, len(m)):
            if m[i][c] != 0:
                p = i
                break
        if p is None:
            continue
        m[r], m[p] = m[p], m[r]
        inv = 1 / m[r][c]
        m[r] = [x * inv for x in m[r]]
        for i in range(len(m)):
            if i != r and m[i][c] != 0:
                f = m[i][c]
                m[i] = [a - f * b for a, b in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
        if r == len(m):
            break
    return m[:r], pivots


def rank(rows) -> int:
    return len(rref(rows)[1])


def int_rank(rows) -> int:
    """Rank of an integer matrix by fraction-free elimination."""
    m = [list(r) for r in rows]
    if not m:
        return 0
    ncol = len(m[0])
    r = 0
    for c in range(ncol):
        p = next((i for i in range(r, len(m)) if m[i][c] != 0), None)
        if p is None:
            continue
        m[r], m[p] = m[p], m[r]
        pr = m[r]
        for i in range(r + 1, len(m)):
            f = m[i][c]
            if f:
                m[i] = [pr[c] * a - f * b for a, b in zip(m[i], pr)]
        r += 1
        if r == len(m):
            break
    return r


def nullspace(rows, ncol=None):
    """Basis of {x : rows x = 0} over Q."""
    red, piv = rref(rows)
    if ncol is None:
        ncol = len(rows[0])
    free = [c for c in range(ncol) if c not in piv]
    basis = []
    for f in free:
        v = [Fraction(0)] * ncol
        v[f] = Fraction(1)
        for r, p in zip(red, piv):
            v[p] = -r[f]
        basis.append(v)
    return basis


def det(mat) -> Fraction | int:
    """Bareiss determinant; exact for int or Fraction entries."""
    n = len(mat)
    if n == 0:
        return 1
    m = [list(r) for r in mat]
    sign = 1
    prev = 1
    for k in range(n - 1):
        if m[k][k] == 0:
            sw = next((i for i in range(k + 1, n) if m[i][k] != 0), None)
            if sw is None:
                return 0
            m[k], m[sw] = m[sw], m[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                val = m[i][j] * m[k][k] - m[i][k] * m[k][j]
                m[i][j] = val // prev if isinstance(val, int) and isinstance(prev, int) else val / prev
        prev = m[k][k]
    return sign * m[n - 1][n - 1]


def det_small(mat):
    """Leibniz expansion, fine for k <= 4 and any ring-like entries."""
    n = len(mat)
    total = 0
    for perm in permutations(range(n)):
        inv = sum(1 for i in range(n) for j in range(i + 1, n) if perm[i] > perm[j])
        term = -1 if inv % 2 else 1
        for i, p in enumerate(perm):
            term = term * mat[i][p]
            if term == 0:
                break
        total = total + term
    return total


def solve(A, b):
    """Unique solution of A x = b over Q, or None if singular / inconsistent."""
    n = len(A)
    aug = [list(map(frac, row)) + [frac(bi)] for row, bi in zip(A, b)]
    red, piv = rref(aug)
    if len(piv) != len(A[0]) or (piv and piv[-1] == len(A[0])):
        return None
    x = [Fraction(0)] * len(A[0])
    for r, p in zip(red, piv):
        x[p] = r[-1]
    return x


def cofactor_normal(cols):
    """Given k-1 vectors in Q^k, the vector n with n.v = det[v, cols...]."""
    k = len(cols) + 1
    n = []
    for i in range(k):
        minor = [[cols[j][r] for j in range(k - 1)] for r in range(k) if r != i]
        s = -1 if i % 2 else 1
        n.append(s * det_small(minor) if k - 1 <= 4 else s * det(minor))
    return n
