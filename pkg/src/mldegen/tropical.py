"""Tropical maximum likelihood for linear models.

A model is stored projectively: n+2 vectors in Q^(d+1), one per coordinate
p_0..p_n and a last one for the hyperplane at infinity. Tropical critical
points are the points of trop(X) meeting w - trop(X^perp); both fans are
swept by flags of flats and each cone pair is one square linear system.
"""
from __future__ import annotations

import random
from fractions import Fraction
from itertools import combinations

import numpy as np

from .linalg import det, frac, lcm, nullspace, rref, solve
from .matroid import Matroid, _bits, bergman_member, graphic, mask_of


class TropicalDegeneracy(ValueError):
    pass


class LinearModel:
    def __init__(self, vectors, labels=None):
        self.vectors = [tuple(frac(x) for x in v) for v in vectors]
        self.n = len(self.vectors) - 2          # coordinates are 0..n
        self.labels = list(labels) if labels else [str(i) for i in range(self.n + 1)]
        self.matroid = Matroid(self.vectors)
        self.d = self.matroid.full_rank - 1
        self._perp = None

    @classmethod
    def from_constraints(cls, C, labels=None):
        """X = {p : C p = 0, sum p = 1}. Element n+1 is the sum functional."""
        ncoord = len(C[0])
        B = nullspace(C, ncoord)  # basis of the linear span of X, as rows
        cols = [tuple(b[i] for b in B) for i in range(ncoord)]
        total = tuple(sum(b) for b in B)
        return cls(cols + [total], labels)

    @classmethod
    def from_forms(cls, forms, dim, labels=None):
        """p_i = a_i . x - b_i on affine d-space; infinity is the homogenising x_0."""
        vecs = [tuple([-frac(b)] + [frac(a) for a in A]) for A, b in forms]
        inf = tuple([Fraction(1)] + [Fraction(0)] * dim)
        return cls(vecs + [inf], labels)

    @property
    def perp_matroid(self):
        """Matroid of X^perp: dual of the contraction by the infinity element."""
        if self._perp is None:
            try:
                self._perp = self.matroid.contract(self.n + 1).dual()
            except ValueError as exc:
                raise ValueError("X^perp lies in a coordinate hyperplane (a coordinate is a "
                                 "coloop after contracting infinity); " + str(exc)) from None
        return self._perp

    def arrangement(self):
        """The affine arrangement of the coordinate hyperplanes, in the chart
        where the infinity functional equals 1."""
        from .arrangement import Arrangement, restrict_to
        d1 = self.d + 1
        rows = [list(v) + [0] for v in self.vectors[:-1]]
        # drop duplicates (parallel coordinates give the same hyperplane)
        central = Arrangement.from_rows(d1, rows)
        return restrict_to(central, list(self.vectors[-1]), 1)


def _bareiss_batch(S, rhs):
    """Fraction-free Gauss-Jordan on a batch of integer systems S k = rhs.
    Returns (det, det * k, nonsingular mask); every division is exact."""
    B, r, _ = S.shape
    M = np.concatenate([S, rhs[:, :, None]], axis=2)
    ok = np.ones(B, dtype=bool)
    idx = np.arange(B)
    prev = np.ones(B, dtype=M.dtype)
    for k in range(r):
        nz = M[:, k:, k] != 0
        ok &= nz.any(axis=1)
        piv = nz.argmax(axis=1) + k
        row = M[idx, k].copy()
        M[idx, k] = M[idx, piv]
        M[idx, piv] = row
        pk = M[:, k, k].copy()
        f = M[:, :, k].copy()
        f[:, k] = 0
        new = pk[:, None, None] * M - f[:, :, None] * M[:, k, None, :]
        new //= prev[:, None, None]
        new[:, k, :] = M[:, k, :]
        M = new
        prev = np.where(ok & (pk != 0), pk, 1)
    D = M[:, r - 1, r - 1] if r else np.ones(B, dtype=M.dtype)
    return D, M[:, :, r], ok


def _left_annihilator(U):
    """Integer rows K with K U = 0, spanning the left null space of U."""
    N = len(U)
    cols = [[U[i][j] for i in range(N)] for j in range(len(U[0]))]
    ker = nullspace(cols, N) if cols else [[Fraction(int(i == j)) for i in range(N)] for j in range(N)]
    out = []
    for v in ker:
        den = 1
        for x in v:
            den = lcm(den, x.denominator)
        out.append([int(x * den) for x in v])
    return out


def _ray(F, n):
    """Flat of the rank d+1 matroid on n+2 elements -> vector in Z^(n+1)
    (chart where the infinity coordinate is zero)."""
    inf = F >> (n + 1) & 1
    return [(F >> i & 1) - inf for i in range(n + 1)]


def trop_critical_points(model: LinearModel, w, return_cones=False):
    n, d = model.n, model.d
    w = [frac(x) for x in w]
    if len(w) != n + 1:
        raise ValueError(f"w must have {n + 1} entries")
    den = 1
    for x in w:
        den = lcm(den, x.denominator)
    W = [int(x * den) for x in w]
    M, Nm = model.matroid, model.perp_matroid
    fx = M.flags(d)
    fn = Nm.flags(n - d)
    N = n + 1
    r = n - d
    P_cols = np.array([[[(G >> i & 1) for i in range(N)] for G in flag] for flag in fn],
                      dtype=np.int64).reshape(len(fn), r, N)
    P_mat = np.transpose(P_cols, (0, 2, 1))  # (B, N, r)
    found = {}
    for flag in fx:
        U = [list(col) for col in zip(*([_ray(F, n) for F in flag] + [[1] * N]))]
        if len(rref([[U[i][j] for i in range(N)] for j in range(d + 1)])[1]) < d + 1:
            continue  # cone plus the lineality of the other side is not full rank
        K = np.array(_left_annihilator(U), dtype=np.int64).reshape(r, N)
        S = np.einsum("rn,bnk->brk", K, P_mat)
        rhs = np.repeat((K @ np.array(W, dtype=object)).astype(np.int64)[None], len(fn), axis=0)
        # Bareiss intermediates are minors of [S | rhs]; their products must fit in int64
        cS = float(np.abs(S).max(initial=1)) * r ** 0.5
        cR = float(np.abs(rhs).max(initial=1)) * r ** 0.5
        minor = cS ** max(r - 1, 0) * max(cS, cR, 1.0)
        if minor * minor > 2.0 ** 62:
            S, rhs = S.astype(object), rhs.astype(object)
        D, Dk, ok = _bareiss_batch(S, rhs)
        cand = np.nonzero(ok & (D != 0) & ((Dk * D[:, None]) >= 0).all(axis=1))[0]
        for b in cand:
            cols = [_ray(F, n) for F in flag] + [[G >> i & 1 for i in range(N)] for G in fn[b]] + [[1] * N]
            Ab = [[cols[j][i] for j in range(N)] for i in range(N)]
            x = solve(Ab, W)
            if x is None:
                continue
            lam = x[: N - 1]
            if any(v < 0 for v in lam):
                continue
            if any(v == 0 for v in lam) and not _survives_perturbation(Ab, lam, N, n):
                continue
            q = [Fraction(0)] * N
            for i in range(d):
                ray = cols[i]
                for j in range(N):
                    q[j] += lam[i] * ray[j]
            q = tuple(v / den for v in q)
            if q in found:
                F0, G0 = found[q]
                raise TropicalDegeneracy(
                    f"w is not generic: {[str(v) for v in q]} is the limit of two perturbed "
                    f"intersection points (flats {sorted(_bits(F0[-1]))} and {sorted(_bits(flag[-1]))} of X)")
            found[q] = (flag, fn[b])
    pts = sorted(found)
    for q in pts:
        assert bergman_member(M, list(q) + [0])
        assert bergman_member(Nm, [a - b for a, b in zip(w, q)])
    if return_cones:
        return pts, found
    return pts


_PERTURB = None


def _perturbations(N):
    global _PERTURB
    if _PERTURB is None or len(_PERTURB[0]) < N:
        rng = random.Random(20240611)
        _PERTURB = [[rng.randint(1, 10**6) for _ in range(64)] for _ in range(3)]
    return [r[:N] for r in _PERTURB]


def _survives_perturbation(A, lam, N, n):
    """A cone pair whose solution has zero coefficients still counts if it
    carries the intersection point for w + eps*r1 + eps^2*r2 + ..., eps -> 0+.
    This separates walls of the flag subdivision (harmless) from collisions."""
    cols = [lam]
    for r in _perturbations(N):
        x = solve(A, r)
        cols.append(x[: N - 1])
    for i, v in enumerate(lam):
        if v != 0:
            continue
        for c in cols[1:]:
            if c[i] > 0:
                break
            if c[i] < 0:
                return False
        else:
            raise TropicalDegeneracy("perturbation did not resolve a zero coefficient")
    return True


def corollary_points(n, d, w):
    """Closed form for a general model: shift so the minimum is 0, then
    sum_{i in I} (w_i - w_min) e_i over d-subsets I of the other coordinates."""
    w = [frac(x) for x in w]
    if len(w) != n + 1:
        raise ValueError(f"w must have {n + 1} entries")
    lo = min(w)
    if w.count(lo) > 1:
        raise TropicalDegeneracy("several coordinates tie for the minimum of w")
    j0 = w.index(lo)
    others = [i for i in range(n + 1) if i != j0]
    out = []
    for I in combinations(others, d):
        q = [Fraction(0)] * (n + 1)
        for i in I:
            q[i] = w[i] - lo
        out.append(tuple(q))
    return sorted(out)


def flag_determinant(model: LinearModel, flagF, flagP):
    """Determinant of [e_F1 .. e_Fd | e_G1 .. e_G(n-d) | 1] for a flag of flats
    of X avoiding infinity and a flag of flats of X^perp."""
    n, d = model.n, model.d
    M, Nm = model.matroid, model.perp_matroid
    if len(flagF) != d or len(flagP) != n - d:
        raise ValueError("flag lengths must be d and n-d")
    for i, F in enumerate(flagF):
        F = F if isinstance(F, int) else mask_of(F)
        if M.closure(F) != F or M.rank(F) != i + 1:
            raise ValueError(f"F_{i + 1} is not a flat of rank {i + 1}")
        if F >> (n + 1) & 1:
            raise ValueError("flats of X must avoid the infinity element")
    for i, G in enumerate(flagP):
        G = G if isinstance(G, int) else mask_of(G)
        if Nm.closure(G) != G or Nm.rank(G) != i + 1:
            raise ValueError(f"G_{i + 1} is not a flat of rank {i + 1}")
    masks = [F if isinstance(F, int) else mask_of(F) for F in flagF]
    pmask = [G if isinstance(G, int) else mask_of(G) for G in flagP]
    for chain in (masks, pmask):
        for a, b in zip(chain, chain[1:]):
            if a & b != a:
                raise ValueError("flags must be nested")
    cols = [[F >> i & 1 for i in range(n + 1)] for F in masks + pmask] + [[1] * (n + 1)]
    mat = [[cols[j][i] for j in range(n + 1)] for i in range(n + 1)]
    val = det(mat)
    assert val in (-1, 0, 1), f"flag determinant {val}"
    return val


def flags_avoiding_infinity(model: LinearModel):
    inf = 1 << (model.n + 1)
    return [f for f in model.matroid.flags(model.d) if not any(F & inf for F in f)]


# ------------------------------------------------------------ CHY / X(2,m)

def chy_model(m):
    """X(2,m) as a linear model. Vertices 2..m of K_(m-1); p_ij = x_j - x_i
    with x_2 = 0 and x_3 = 1, so the edge {2,3} is the hyperplane at infinity.
    Coordinates are the remaining edges in lexicographic order."""
    if m < 5:
        raise ValueError("need m >= 5")
    verts = list(range(2, m + 1))
    edges = [e for e in combinations(verts, 2) if e != (2, 3)]
    free = list(range(4, m + 1))        # x_4..x_m, homogenised by x_0
    dim = len(free)

    def vec(u, v):
        out = [Fraction(0)] * (dim + 1)
        for node, s in ((v, 1), (u, -1)):
            if node == 3:
                out[0] += s
            elif node >= 4:
                out[1 + free.index(node)] += s
        return tuple(out)
    vecs = [vec(u, v) for u, v in edges] + [vec(2, 3)]
    labels = [f"{u}{v}" for u, v in edges]
    return LinearModel(vecs, labels)


def connected_flats(M: Matroid):
    """Proper nonempty flats whose restriction is connected: the rays of the
    coarsest fan structure on the Bergman fan."""
    full = (1 << M.n) - 1
    out = []
    for level in M.flats_by_rank()[1:]:
        for F in level:
            if F != full and M.is_connected_set(F):
                out.append(F)
    return out


def ray_graph(M: Matroid):
    """Rays = connected flats; edges = nested pairs (comparable, or with a
    disconnected join)."""
    import networkx as nx
    rays = connected_flats(M)
    conn = set(rays) | {(1 << M.n) - 1} if M.is_connected_set((1 << M.n) - 1) else set(rays)
    G = nx.Graph()
    G.add_nodes_from(rays)
    for a, b in combinations(rays, 2):
        if a & b in (a, b):
            G.add_edge(a, b)
        elif M.closure(a | b) not in conn:
            G.add_edge(a, b)
    return G


def random_linear_model(n, d, seed=0, bound=5, general=False):
    """Affine arrangement of n+1 hyperplanes in Q^d with small integer data.
    With general=True coefficients are large, which makes the matroid uniform."""
    rng = random.Random(seed)
    big = 10**6 if general else bound
    for _ in range(1000):
        forms = []
        for _ in range(n + 1):
            a = [rng.randint(-big, big) for _ in range(d)]
            forms.append((a, rng.randint(-big, big)))
        if any(not any(a) for a, _ in forms):
            continue
        model = LinearModel.from_forms(forms, d)
        if model.d != d:
            continue
        vecs = model.vectors
        if len({tuple(v) for v in vecs}) < len(vecs):
            continue
        # no parallel elements: distinct hyperplanes, none at infinity
        if any(model.matroid.rank(1 << i | 1 << j) < 2 for i in range(n + 2) for j in range(i)):
            continue
        if general and not is_uniform(model.matroid):
            continue
        try:
            model.perp_matroid
        except ValueError:
            continue
        return model
    raise RuntimeError("could not draw a linear model")


def is_uniform(M: Matroid):
    r = M.full_rank
    return all(M.rank(mask_of(S)) == r for S in combinations(range(M.n), r))


def random_w(n, seed=0, bound=50):
    rng = random.Random(seed)
    vals = rng.sample(range(bound), n + 1)
    return [Fraction(v) for v in vals]


def perturb_w(w, seed=0, den=10**6):
    """w plus distinct offsets o/den^2 with 0 < o < den: a small rational
    nudge to retry after a TropicalDegeneracy."""
    rng = random.Random(seed)
    offs = rng.sample(range(1, den), len(w))
    return [frac(x) + Fraction(o, den * den) for x, o in zip(w, offs)]
