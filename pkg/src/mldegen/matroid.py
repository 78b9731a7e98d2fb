"""Small matroids: realized by rational vectors, or given by circuits only."""
from __future__ import annotations

from fractions import Fraction
from itertools import combinations

from .linalg import frac, int_rank, nullspace, primitive, rref


def _bits(mask):
    i = 0
    while mask:
        if mask & 1:
            yield i
        mask >>= 1
        i += 1


def mask_of(items):
    m = 0
    for i in items:
        m |= 1 << i
    return m


class Matroid:
    """Ground set {0..n-1}. Either `vectors` (one rational vector per element)
    or an explicit `circuits` list must be given; the latter supports only the
    circuit based operations (membership tests)."""

    def __init__(self, vectors=None, circuits=None, size=None):
        self._rank = {}
        if vectors is not None:
            self.vectors = [tuple(frac(x) for x in v) for v in vectors]
            self.n = len(self.vectors)
            self._ints = [primitive(v) if any(v) else tuple(0 for _ in v) for v in self.vectors]
            loops = [i for i, v in enumerate(self.vectors) if not any(v)]
            if loops:
                raise ValueError(f"element {loops[0]} is a loop; only loopless matroids are handled")
            self._circuits = None
        else:
            if circuits is None or size is None:
                raise ValueError("give vectors, or circuits together with the ground set size")
            self.vectors = None
            self.n = size
            cs = sorted({frozenset(c) for c in circuits}, key=lambda c: (len(c), sorted(c)))
            for a in cs:
                for b in cs:
                    if a != b and a <= b:
                        raise ValueError(f"circuit {sorted(a)} is contained in {sorted(b)}")
            self._circuits = cs

    # -- rank
    def rank(self, S=None):
        if self.vectors is None:
            raise TypeError("rank needs a realization")
        mask = (1 << self.n) - 1 if S is None else (S if isinstance(S, int) else mask_of(S))
        r = self._rank.get(mask)
        if r is None:
            r = int_rank([self._ints[i] for i in _bits(mask)])
            self._rank[mask] = r
        return r

    @property
    def full_rank(self):
        return self.rank()

    # -- circuits
    def circuits(self):
        if self._circuits is not None:
            return self._circuits
        out = []
        r = self.full_rank
        for size in range(1, r + 2):
            for S in combinations(range(self.n), size):
                m = mask_of(S)
                if any(c <= frozenset(S) for c in out):
                    continue
                if self.rank(m) < size:
                    out.append(frozenset(S))
        self._circuits = out
        return out

    # -- flats
    def closure(self, mask):
        r = self.rank(mask)
        out = mask
        for e in range(self.n):
            if not mask >> e & 1 and self.rank(mask | 1 << e) == r:
                out |= 1 << e
        return out

    def flats_by_rank(self):
        if hasattr(self, "_flats"):
            return self._flats
        levels = [[self.closure(0)]]
        r = self.full_rank
        for k in range(1, r + 1):
            seen = {}
            for F in levels[-1]:
                for e in range(self.n):
                    if not F >> e & 1:
                        G = self.closure(F | 1 << e)
                        seen.setdefault(G, None)
            levels.append(sorted(seen))
        self._flats = levels
        return levels

    def flags(self, length):
        """Chains F_1 < ... < F_length of flats with rank(F_i) = i."""
        levels = self.flats_by_rank()
        if length == 0:
            return [()]
        out = []

        def rec(chain):
            if len(chain) == length:
                out.append(tuple(chain))
                return
            prev = chain[-1] if chain else 0
            for G in levels[len(chain) + 1]:
                if G & prev == prev:
                    chain.append(G)
                    rec(chain)
                    chain.pop()
        rec([])
        return out

    def is_connected_set(self, mask):
        """Is the restriction to `mask` a connected matroid?"""
        elems = list(_bits(mask))
        if len(elems) <= 1:
            return True
        parent = {e: e for e in elems}

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x
        fm = frozenset(elems)
        for c in self.circuits():
            if c <= fm:
                c = list(c)
                for x in c[1:]:
                    parent[find(x)] = find(c[0])
        return len({find(e) for e in elems}) == 1

    # -- derived matroids
    def dual(self):
        rows = [list(col) for col in zip(*self.vectors)]
        ker = nullspace(rows, self.n)
        return Matroid([tuple(b[i] for b in ker) for i in range(self.n)])

    def contract(self, e):
        """Contract element e; the remaining elements keep their order."""
        ve = self.vectors[e]
        p = next(i for i, x in enumerate(ve) if x != 0)
        out = []
        for i, v in enumerate(self.vectors):
            if i == e:
                continue
            f = v[p] / ve[p]
            out.append(tuple(a - f * b for j, (a, b) in enumerate(zip(v, ve)) if j != p))
        return Matroid(out)


def graphic(vertices, edges):
    """Graphic matroid realized by incidence vectors e_u - e_v."""
    idx = {v: i for i, v in enumerate(vertices)}
    vecs = []
    for u, v in edges:
        x = [0] * len(vertices)
        x[idx[u]] += 1
        x[idx[v]] -= 1
        vecs.append(x)
    return Matroid(vecs)


def bergman_member(M: Matroid, v) -> bool:
    """Minimum over every circuit attained at least twice."""
    if len(v) != M.n:
        raise ValueError(f"vector has length {len(v)}, ground set has {M.n} elements")
    for c in M.circuits():
        vals = [v[i] for i in c]
        lo = min(vals)
        if vals.count(lo) < 2:
            return False
    return True
