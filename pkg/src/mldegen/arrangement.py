"""Hyperplane arrangements over Q: intersection posets, Moebius numbers,
characteristic polynomials and region counts."""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from math import gcd

from .linalg import frac, fmt, primitive, rank

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class Hyperplane:
    normal: tuple
    offset: Fraction

    @staticmethod
    def make(normal, offset=0) -> "Hyperplane":
        normal = tuple(frac(a) for a in normal)
        offset = frac(offset)
        lead = next((a for a in normal if a != 0), None)
        if lead is None:
            raise ValueError("hyperplane normal is the zero vector")
        return Hyperplane(tuple(a / lead for a in normal), offset / lead)

    @property
    def dim(self):
        return len(self.normal)

    def value(self, x):
        return sum(a * xi for a, xi in zip(self.normal, x)) - self.offset

    def row(self):
        return list(self.normal) + [self.offset]


class Arrangement:
    """Ordered, duplicate-free list of affine hyperplanes a.x = b in Q^d."""

    def __init__(self, dim, hyperplanes=()):
        self.dim = int(dim)
        seen = {}
        hs = []
        for h in hyperplanes:
            if not isinstance(h, Hyperplane):
                h = Hyperplane.make(h[:-1], h[-1])
            if h.dim != self.dim:
                raise ValueError(f"hyperplane of dimension {h.dim} in R^{self.dim}")
            if h in seen:
                log.info("merged duplicate hyperplane %s", h)
                continue
            seen[h] = len(hs)
            hs.append(h)
        self.hyperplanes = tuple(hs)

    @classmethod
    def from_rows(cls, dim, rows):
        return cls(dim, [Hyperplane.make(r[:-1], r[-1]) for r in rows])

    @property
    def central(self):
        return all(h.offset == 0 for h in self.hyperplanes)

    def __len__(self):
        return len(self.hyperplanes)

    def __iter__(self):
        return iter(self.hyperplanes)

    def __repr__(self):
        kind = "central" if self.central else "affine"
        return f"Arrangement(dim={self.dim}, n={len(self)}, {kind})"

    def without(self, i):
        return Arrangement(self.dim, [h for j, h in enumerate(self.hyperplanes) if j != i])

    def rank(self):
        return rank([h.normal for h in self.hyperplanes]) if self.hyperplanes else 0

    # file format: "d n central|affine" then one "a_1 .. a_d b" line per hyperplane
    def dumps(self):
        lines = [f"{self.dim} {len(self)} {'central' if self.central else 'affine'}"]
        for h in self.hyperplanes:
            lines.append(" ".join(fmt(x) for x in h.row()))
        return "\n".join(lines) + "\n"

    @classmethod
    def loads(cls, text):
        lines = [ln.split("#")[0].strip() for ln in text.splitlines()]
        lines = [ln for ln in lines if ln]
        if not lines:
            raise ValueError("empty arrangement file")
        head = lines[0].split()
        if len(head) != 3 or head[2] not in ("central", "affine"):
            raise ValueError("header must read 'd n central|affine'")
        d, n = int(head[0]), int(head[1])
        rows = [ln.split() for ln in lines[1:]]
        if len(rows) != n:
            raise ValueError(f"header announces {n} hyperplanes, found {len(rows)}")
        for r in rows:
            if len(r) != d + 1:
                raise ValueError(f"expected {d + 1} entries per line, got {len(r)}")
        arr = cls.from_rows(d, [[frac(x) for x in r] for r in rows])
        if head[2] == "central" and not arr.central:
            raise ValueError("file says central but some offset is nonzero")
        return arr


def restrict_to(arr: Arrangement, normal, offset) -> Arrangement:
    """Traces of arr on the hyperplane normal.x = offset, written in the
    coordinates left after eliminating its first nonzero coordinate."""
    H = Hyperplane.make(normal, offset)
    a, b = H.normal, H.offset
    p = next(i for i, x in enumerate(a) if x != 0)  # a[p] == 1
    keep = [j for j in range(arr.dim) if j != p]
    out = []
    for h in arr.hyperplanes:
        c, e = h.normal, h.offset
        new = [c[j] - c[p] * a[j] for j in keep]
        rhs = e - c[p] * b
        if all(x == 0 for x in new):
            continue  # parallel to H (disjoint) or equal to H
        out.append(Hyperplane.make(new, rhs))
    return Arrangement(arr.dim - 1, out)


def delete_restrict(arr: Arrangement, i: int):
    h = arr.hyperplanes[i]
    deleted = arr.without(i)
    return deleted, restrict_to(deleted, h.normal, h.offset)


# ---------------------------------------------------------------- poset

def _int_rows(arr):
    return [primitive(h.row()) for h in arr.hyperplanes]


class _Flat:
    __slots__ = ("rows", "pivots", "den", "support", "codim", "parents", "key")

    def __init__(self, rows, pivots, den, support, codim):
        self.rows = rows
        self.pivots = pivots
        self.den = den
        self.support = support
        self.codim = codim
        self.parents = []
        self.key = (tuple(pivots), tuple(x for r in rows for x in r))

    def reduce(self, v):
        """den*v minus its projection on the row space; zero iff v is in it."""
        D = self.den
        out = [D * x for x in v]
        for r, p in zip(self.rows, self.pivots):
            f = v[p]
            if f:
                out = [o - f * y for o, y in zip(out, r)]
        return out

    def contains(self, v):
        D = self.den
        rows, piv = self.rows, self.pivots
        for c in range(len(v)):
            if c in piv:
                continue
            s = D * v[c]
            for r, p in zip(rows, piv):
                if v[p]:
                    s -= v[p] * r[c]
            if s:
                return False
        return True


def _meet(flat, v, d):
    """Intersect a flat with hyperplane v (integer augmented row).
    Returns None if contained, 'empty' if disjoint, else (rows, pivots, den)."""
    r = flat.reduce(v)
    c = next((i for i, x in enumerate(r) if x), None)
    if c is None:
        return None
    if c == d:
        return "empty"
    rc = r[c]
    D = flat.den
    new_rows = []
    for row in flat.rows:
        f = row[c]
        new_rows.append([rc * x - f * y for x, y in zip(row, r)])
    r = [D * x for x in r]
    piv = list(flat.pivots)
    pos = 0
    while pos < len(piv) and piv[pos] < c:
        pos += 1
    new_rows.insert(pos, r)
    piv.insert(pos, c)
    den = rc * D
    if den < 0:
        den = -den
        new_rows = [[-x for x in row] for row in new_rows]
    g = den
    for row in new_rows:
        for x in row:
            if x:
                g = gcd(g, x)
                if g == 1:
                    break
        if g == 1:
            break
    if g > 1:
        new_rows = [[x // g for x in row] for row in new_rows]
        den //= g
    return [tuple(row) for row in new_rows], piv, den


@dataclass
class Flat:
    support: frozenset
    subspace: tuple
    codim: int


@dataclass
class IntersectionPoset:
    dim: int
    n: int
    flats: list                      # list[Flat], graded by codim, index 0 = ambient
    covers: list                     # covers[i] = indices of flats one codim lower
    mobius: list                     # mu(ambient, F) per flat
    stats: dict = field(default_factory=dict)

    def by_codim(self):
        out = {}
        for f in self.flats:
            out.setdefault(f.codim, []).append(f)
        return out

    def check_mobius(self):
        """sum_{G <= F} mu(G) == 0 for every F above the ambient."""
        down = [set() for _ in self.flats]
        for i in range(1, len(self.flats)):
            s = set()
            for p in self.covers[i]:
                s.add(p)
                s |= down[p]
            down[i] = s
            if self.mobius[i] + sum(self.mobius[j] for j in s) != 0:
                return False
        return self.mobius[0] == 1


def build_poset(arr: Arrangement) -> IntersectionPoset:
    d = arr.dim
    H = _int_rows(arr)
    n = len(H)
    full = (1 << n) - 1
    top = _Flat([], [], 1, 0, 0)
    level = [top]
    every = [top]
    index = {top.key: 0}
    while level and level[0].codim < d:
        nxt = []
        for g in level:
            gi = index[g.key]
            remaining = full & ~g.support
            while remaining:
                low = remaining & -remaining
                h = low.bit_length() - 1
                res = _meet(g, H[h], d)
                if res is None or res == "empty":
                    remaining &= ~low
                    continue
                rows, piv, den = res
                key = (tuple(piv), tuple(x for r in rows for x in r))
                j = index.get(key)
                if j is None:
                    f = _Flat(rows, piv, den, g.support | low, g.codim + 1)
                    supp = f.support
                    rest = full & ~supp
                    while rest:
                        lb = rest & -rest
                        if f.contains(H[lb.bit_length() - 1]):
                            supp |= lb
                        rest &= ~lb
                    f.support = supp
                    j = len(every)
                    index[key] = j
                    every.append(f)
                    nxt.append(f)
                f = every[j]
                f.parents.append(gi)
                remaining &= ~f.support
        level = nxt

    mobius = [0] * len(every)
    mobius[0] = 1
    down = [None] * len(every)
    down[0] = frozenset()
    for i in range(1, len(every)):
        s = set()
        for p in every[i].parents:
            s.add(p)
            s |= down[p]
        down[i] = s
        mobius[i] = -sum(mobius[j] for j in s)
    flats = []
    for f in every:
        supp = frozenset(i for i in range(n) if f.support >> i & 1)
        flats.append(Flat(supp, f.key, f.codim))
    covers = [list(f.parents) for f in every]
    return IntersectionPoset(d, n, flats, covers, mobius, {"flats": len(every)})


# ---------------------------------------------------------------- char poly

@dataclass(frozen=True)
class CharPoly:
    """coeffs[i] is the coefficient of t^(d-i)."""
    coeffs: tuple

    @property
    def degree(self):
        return len(self.coeffs) - 1

    @property
    def betti(self):
        return tuple((-1) ** i * c for i, c in enumerate(self.coeffs))

    def __call__(self, t):
        acc = 0
        for c in self.coeffs:
            acc = acc * t + c
        return acc

    def derivative(self):
        d = self.degree
        if d == 0:
            return CharPoly((0,))
        return CharPoly(tuple(c * (d - i) for i, c in enumerate(self.coeffs[:-1])))

    def __str__(self):
        d = self.degree
        parts = []
        for i, c in enumerate(self.coeffs):
            if c == 0:
                continue
            e = d - i
            mon = "" if e == 0 else ("t" if e == 1 else f"t^{e}")
            mag = abs(c)
            body = (str(mag) if (mag != 1 or e == 0) else "") + mon
            sign = "-" if c < 0 else "+"
            parts.append((sign, body))
        if not parts:
            return "0"
        s = ("-" if parts[0][0] == "-" else "") + parts[0][1]
        for sign, body in parts[1:]:
            s += f" {sign} {body}"
        return s


def char_poly(poset: IntersectionPoset) -> CharPoly:
    d = poset.dim
    c = [0] * (d + 1)
    for f, mu in zip(poset.flats, poset.mobius):
        c[f.codim] += mu
    return CharPoly(tuple(c))


def char_poly_of(arr: Arrangement) -> CharPoly:
    return char_poly(build_poset(arr))


def whitney_char_poly(arr: Arrangement, limit=12) -> CharPoly:
    """Subset expansion sum over subsets I with nonempty intersection of
    (-1)^|I| t^(d - rank I). Exponential; kept as an independent check."""
    n = len(arr)
    if n > limit:
        raise ValueError(f"Whitney expansion limited to {limit} hyperplanes")
    d = arr.dim
    c = [0] * (d + 1)
    hs = arr.hyperplanes
    for size in range(n + 1):
        for I in combinations(range(n), size):
            normals = [hs[i].normal for i in I]
            aug = [hs[i].row() for i in I]
            r = rank(normals) if I else 0
            if I and rank(aug) != r:
                continue  # empty intersection
            c[r] += (-1) ** size
    return CharPoly(tuple(c))


def regions(cp: CharPoly):
    """(total, bounded) by Zaslavsky. A non-essential arrangement has
    t | chi(t) and no bounded region."""
    total = abs(cp(-1))
    if cp.degree > 0 and cp(0) == 0:
        return total, 0
    return total, abs(cp(1))


def _div_t_minus_1(coeffs):
    out = []
    acc = 0
    for c in coeffs:
        acc = acc + c
        out.append(acc)
    rem = out.pop()
    return out, rem


def decone(central_cp: CharPoly):
    """(chi / (t-1), (chi - chi(0)) / t) for a central characteristic polynomial."""
    q, rem = _div_t_minus_1(list(central_cp.coeffs))
    if rem != 0:
        raise ValueError("(t-1) does not divide the polynomial: input is not central")
    return CharPoly(tuple(q)), CharPoly(tuple(central_cp.coeffs[:-1]))


def generic_section(arr: Arrangement, seed=0, bound=10**6) -> Arrangement:
    """Restriction of a central arrangement to a random affine hyperplane c.x = 1.
    Rejects c until no flat of dimension >= 1 is parallel to it, which is
    checked by comparing flat counts."""
    import random
    rng = random.Random(seed)
    poset = build_poset(arr)
    want = sum(1 for f in poset.flats if f.codim < arr.dim)
    for _ in range(100):
        c = [Fraction(rng.randint(-bound, bound), rng.randint(1, 97)) for _ in range(arr.dim)]
        if all(x == 0 for x in c):
            continue
        sec = restrict_to(arr, c, 1)
        if len(sec) == len(arr) and len(build_poset(sec).flats) == want:
            return sec
    raise RuntimeError("could not find a generic affine section")


def decone_at(arr: Arrangement, i: int) -> Arrangement:
    """Restrict a central arrangement to H_i = 1 (H_i goes to infinity)."""
    h = arr.hyperplanes[i]
    return restrict_to(arr, h.normal, 1)
