"""Point counts of X(3,m) over F_q and a brute-force enumeration oracle."""
from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from itertools import combinations, permutations, product

import numpy as np

BRUTE_BUDGET = 10**8


def is_prime(q):
    if q < 2:
        return False
    i = 2
    while i * i <= q:
        if q % i == 0:
            return False
        i += 1
    return True


def _check_q(q):
    if not is_prime(q):
        raise ValueError(f"q={q}: only prime fields are supported")
    if q <= 3:
        raise ValueError("characteristic 2 and 3 are not supported")


_QUAD = {"b": (1, 1), "d": (1, -1), "e": (0, 1)}  # x^2 + s x + c


def quad_roots(which, q):
    _check_q(q)
    s, c = _QUAD[which]
    return sum(1 for x in range(q) if (x * x + s * x + c) % q == 0)


def _poly(coeffs, q):
    acc = 0
    for c in coeffs:
        acc = acc * q + c
    return acc


def _count(m, q, b, d, e):
    if m == 6:
        return (q - 2) * (q - 3) * _poly([1, -9, 21], q)
    if m == 7:
        return (q - 3) * (q - 5) * _poly([1, -20, 148, -468, 498], q)
    if m == 8:
        return (q - 5) * _poly([1, -43, 788, -7937, 47097, -162834, 299280, -222960], q) + 840 * b
    if m == 9:
        main = _poly([1, -75, 2530, -50466, 657739, -5835825, 35563770, -146288034,
                      386490120, -588513120, 389442480], q)
        return main + 840 * _poly([9, -243, 1684], q) * b + 30240 * (9 * d + 2 * e)
    raise ValueError("closed forms exist for m = 6..9 only")


def count_formula(m, q):
    _check_q(q)
    return _count(m, q, quad_roots("b", q), quad_roots("d", q), quad_roots("e", q))


def euler_from_count(m):
    """Plug b = d = e = 2, then q = 1."""
    return _count(m, 1, 2, 2, 2)


def factorize(n):
    n = abs(n)
    out = []
    p = 2
    while p * p <= n:
        while n % p == 0:
            out.append(p)
            n //= p
        p += 1
    if n > 1:
        out.append(n)
    return out


# ------------------------------------------------------------ brute force

def _fixed_columns(k, q):
    """Columns 1..k+1 of the normal form, reduced mod q."""
    cols = []
    for j in range(1, k + 1):
        v = [0] * k
        v[k - j] = (-1) ** j % q
        cols.append(v)
    cols.append([1] * k)
    return cols


def _det_mod(cols, q):
    """Vectorised k x k determinant; cols is a list of k arrays of shape (N, k)."""
    k = len(cols)
    N = cols[0].shape[0]
    total = np.zeros(N, dtype=np.int64)
    for perm in permutations(range(k)):
        inv = sum(1 for i in range(k) for j in range(i + 1, k) if perm[i] > perm[j])
        term = np.ones(N, dtype=np.int64)
        for r in range(k):
            term = term * cols[perm[r]][:, r] % q
        total = (total - term) % q if inv % 2 else (total + term) % q
    return total


def _extend(k, m, q, fixed, prefix):
    """Count completions of a partial assignment (array (N, t, k)) of the free
    columns, column by column, pruning at the first vanishing minor."""
    free_vals = np.array([[1] + list(t) for t in product(range(q), repeat=k - 1)], dtype=np.int64)
    cur = prefix
    nfree = m - k - 1
    nfix = len(fixed)
    while cur.shape[1] < nfree:
        N, t = cur.shape[0], cur.shape[1]
        V = free_vals.shape[0]
        new = np.concatenate([np.repeat(cur, V, axis=0),
                              np.tile(free_vals, (N, 1))[:, None, :]], axis=1)
        keep = np.ones(new.shape[0], dtype=bool)
        last = nfix + t  # 0-based index of the new column
        for I in combinations(range(last), k - 1):
            cols = []
            for j in I + (last,):
                if j < nfix:
                    cols.append(np.broadcast_to(np.array(fixed[j], dtype=np.int64), (new.shape[0], k)))
                else:
                    cols.append(new[:, j - nfix, :])
            keep &= _det_mod(cols, q) != 0
        cur = new[keep]
    return cur.shape[0]


def brute_count(k, m, q, workers=1, budget=BRUTE_BUDGET):
    _check_q(q)
    if not 2 <= k < m:
        raise ValueError("need 2 <= k < m")
    nvars = (k - 1) * (m - k - 1)
    if q ** nvars > budget:
        raise ValueError(f"brute force needs {q ** nvars} tuples, budget is {budget}")
    fixed = _fixed_columns(k, q)
    if m - k - 1 == 0:
        return 1
    # partition on the first free column and reduce the disjoint counts
    firsts = [np.array([[[1] + list(t)]], dtype=np.int64) for t in product(range(q), repeat=k - 1)]
    seeds = []
    for f in firsts:
        ok = True
        for I in combinations(range(len(fixed)), k - 1):
            cols = [np.array([fixed[j]], dtype=np.int64) for j in I] + [f[:, 0, :]]
            if _det_mod(cols, q)[0] == 0:
                ok = False
                break
        if ok:
            seeds.append(f)
    if workers > 1:
        with ThreadPoolExecutor(workers) as ex:
            parts = list(ex.map(lambda s: _extend(k, m, q, fixed, s), seeds))
    else:
        parts = [_extend(k, m, q, fixed, s) for s in seeds]
    return sum(parts)
