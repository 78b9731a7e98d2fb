"""Brute-force region enumeration for small real arrangements.

Independent of the poset code: regions are found as sign vectors of explicit
witness points, one per local cone at every vertex, and boundedness is read
off the recession cone. Everything is exact.
"""
from __future__ import annotations

from fractions import Fraction
from itertools import combinations

from .arrangement import Arrangement, Hyperplane
from .linalg import cofactor_normal, rref, solve

MAX_DIM = 3
MAX_HYPERPLANES = 20


class OracleLimit(ValueError):
    pass


def _dot(a, x):
    return sum(p * q for p, q in zip(a, x))


def _canon(a, b):
    h = Hyperplane.make(a, b)
    return h.normal, h.offset


def _vertices(H, d):
    seen = set()
    out = []
    for I in combinations(range(len(H)), d):
        x = solve([H[i][0] for i in I], [H[i][1] for i in I])
        if x is None:
            continue
        t = tuple(x)
        if t not in seen:
            seen.add(t)
            out.append(t)
    return out


def _affine_witnesses(H, d):
    """One point in every open region of an essential affine arrangement H
    (list of (normal, offset)) in Q^d, possibly with repeats."""
    if d == 0:
        return [()]
    pts = []
    for v in _vertices(H, d):
        local = [a for a, b in H if _dot(a, v) == b]
        for w in _central_witnesses(local, d):
            eps = Fraction(1)
            for a, b in H:
                aw = _dot(a, w)
                gap = _dot(a, v) - b
                if gap != 0 and aw != 0:
                    eps = min(eps, abs(gap / aw) / 2)
            pts.append(tuple(vi + eps * wi for vi, wi in zip(v, w)))
    return pts


def _central_witnesses(normals, d):
    """A direction inside every open cone of an essential central arrangement."""
    if d == 1:
        return [(Fraction(1),), (Fraction(-1),)]
    out = []
    for s in (1, -1):
        sl = {}
        for a in normals:
            rest = a[1:]
            if all(x == 0 for x in rest):
                continue
            sl[_canon(rest, -a[0] * s)] = None
        for y in _affine_witnesses(list(sl), d - 1):
            out.append((Fraction(s),) + tuple(y))
    return out


def _essentialize(arr):
    """Restrict to the coordinate subspace spanned by pivot columns of the
    normal matrix; regions correspond one to one."""
    normals = [h.normal for h in arr]
    _, piv = rref(normals)
    H = [(tuple(h.normal[p] for p in piv), h.offset) for h in arr]
    return H, len(piv)


def _cone_is_zero(cons, d):
    """Is {w : c.w >= 0 for all c in cons} = {0}? The arrangement is
    essential, so the cone is pointed and is nonzero iff it has an extreme
    ray cut out by d-1 independent constraints."""
    uniq = {}
    for c in cons:
        uniq[_canon(c, 0)[0]] = c
    cs = list(uniq.values())
    if d == 1:
        rays = [(Fraction(1),), (Fraction(-1),)]
    else:
        rays = []
        for I in combinations(cs, d - 1):
            r = cofactor_normal([list(c) for c in I])
            if any(x != 0 for x in r):
                rays.append(tuple(r))
                rays.append(tuple(-x for x in r))
    for r in rays:
        if all(_dot(c, r) >= 0 for c in cons):
            return False
    return True


def sign_vectors(arr: Arrangement):
    if arr.dim > MAX_DIM or len(arr) > MAX_HYPERPLANES:
        raise OracleLimit(
            f"brute-force oracle handles d <= {MAX_DIM} and <= {MAX_HYPERPLANES} "
            f"hyperplanes, got d={arr.dim}, n={len(arr)}")
    H, r = _essentialize(arr)
    if r == 0:
        return {()}, r
    pts = _affine_witnesses(H, r)
    signs = set()
    for x in pts:
        sv = []
        for a, b in H:
            v = _dot(a, x) - b
            assert v != 0, "witness landed on a hyperplane"
            sv.append(1 if v > 0 else -1)
        signs.add(tuple(sv))
    return signs, r


def bounded_sign_vectors(arr: Arrangement):
    """Sign vectors of the bounded regions of an essential arrangement."""
    signs, r = sign_vectors(arr)
    if r < arr.dim:
        raise ValueError("arrangement is not essential")
    H, _ = _essentialize(arr)
    out = set()
    for sv in signs:
        cons = [tuple(s * x for x in a) for s, (a, b) in zip(sv, H)]
        if r == 0 or _cone_is_zero(cons, r):
            out.add(sv)
    return out


def brute_force_regions(arr: Arrangement):
    """(total, bounded) from explicit cells."""
    signs, r = sign_vectors(arr)
    total = len(signs)
    if r < arr.dim:
        # a line of the lineality space runs through every region
        return total, (1 if arr.dim == 0 else 0)
    return total, len(bounded_sign_vectors(arr))


def region_witnesses(arr: Arrangement):
    """Map sign vector -> one witness point (in the essential coordinates
    when arr is essential, which is the only case used downstream)."""
    H, r = _essentialize(arr)
    if r != arr.dim:
        raise ValueError("witness points are only returned for essential arrangements")
    out = {}
    for x in _affine_witnesses(H, r):
        sv = tuple(1 if _dot(a, x) - b > 0 else -1 for a, b in H)
        out.setdefault(sv, x)
    return out
