"""Critical points of log-likelihood functions sum_a u_a log p_a(x).

Systems are built symbolically (sympy), compiled to exponent/coefficient
arrays, solved by batched multistart Newton in numpy and polished in mpmath.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations

import mpmath
import numpy as np
import sympy as sp

from .arrangement import Arrangement
from .linalg import nullspace

log = logging.getLogger(__name__)


class _Compiled:
    """A polynomial as exponent rows and coefficients, for batch evaluation."""

    def __init__(self, poly: sp.Poly):
        terms = poly.terms()
        nv = len(poly.gens)
        if not terms:
            terms = [((0,) * nv, 0)]
        self.exps = np.array([e for e, _ in terms], dtype=np.int64).reshape(len(terms), nv)
        self.exact = [(e, Fraction(int(c.p), int(c.q))) for e, c in terms]
        self.coefs = np.array([complex(float(c)) for _, c in self.exact])

    def __call__(self, X):
        mono = np.prod(X[:, None, :] ** self.exps[None, :, :], axis=2)
        return mono @ self.coefs

    def mp(self, x):
        total = mpmath.mpc(0)
        for e, c in self.exact:
            term = mpmath.mpf(c.numerator) / c.denominator
            for xi, ei in zip(x, e):
                if ei:
                    term *= xi ** ei
            total += term
        return total


class LikelihoodSystem:
    """Coordinates p_a(x) in `nvars` unknowns. The critical equations are
    sum_a u_a grad p_a / p_a = 0."""

    def __init__(self, symbols, coords, labels=None):
        self.symbols = tuple(symbols)
        self.nvars = len(self.symbols)
        polys = [sp.Poly(sp.expand(c), *self.symbols) for c in coords]
        for i, p in enumerate(polys):
            if p.is_zero:
                raise ValueError(f"coordinate {i} is identically zero")
        self.coords = polys
        self.labels = list(labels) if labels else [str(i) for i in range(len(polys))]
        self._p = [_Compiled(p) for p in polys]
        self._dp = [[_Compiled(p.diff(v)) for v in self.symbols] for p in polys]
        self._ddp = [[[_Compiled(p.diff(v).diff(w)) for w in self.symbols] for v in self.symbols]
                     for p in polys]
        # one shared monomial basis; values and derivatives become matrix products
        nv, na = self.nvars, len(polys)
        flat = [self._p] + [[self._dp[a][i] for a in range(na)] for i in range(nv)] + \
               [[self._ddp[a][i][j] for a in range(na)] for i in range(nv) for j in range(nv)]
        mons = {}
        for group in flat:
            for c in group:
                for e in map(tuple, c.exps):
                    mons.setdefault(e, len(mons))
        self._mons = np.array(list(mons), dtype=np.int64).reshape(len(mons), nv)
        C = np.zeros((len(flat), len(mons), na), dtype=complex)
        for g, group in enumerate(flat):
            for a, c in enumerate(group):
                for e, co in zip(map(tuple, c.exps), c.coefs):
                    C[g, mons[e], a] += co
        self._C = C
        self._maxdeg = int(self._mons.max(initial=0))

    def __len__(self):
        return len(self.coords)

    def _monomials(self, X):
        B, nv = X.shape
        powers = np.ones((self._maxdeg + 1, B, nv), dtype=complex)
        for e in range(1, self._maxdeg + 1):
            powers[e] = powers[e - 1] * X
        out = np.ones((B, len(self._mons)), dtype=complex)
        for v in range(nv):
            out *= powers[self._mons[:, v], :, v].T
        return out

    def _eval_all(self, X):
        """(P, dP, ddP) with shapes (B, a), (B, i, a), (B, i, j, a)."""
        B, nv = X.shape
        vals = np.einsum("bm,gma->gba", self._monomials(X), self._C)
        P = vals[0]
        dP = np.transpose(vals[1:1 + nv], (1, 0, 2))
        ddP = np.transpose(vals[1 + nv:].reshape(nv, nv, B, -1), (2, 0, 1, 3))
        return P, dP, ddP

    # -- batch evaluation, X has shape (B, nvars)
    def values(self, X):
        return self._eval_all(X)[0]

    def grad_and_jac(self, X, u):
        P, dP, ddP = self._eval_all(X)
        q = np.atleast_2d(u) / P                            # u_a / p_a, weights may vary per row
        G = np.einsum("bia,ba->bi", dP, q)
        J = np.einsum("bija,ba->bij", ddP, q) - np.einsum("bia,bja,ba->bij", dP, dP, q / P)
        return G, J, P

    def d_weights(self, X, du):
        """Derivative of the gradient along a change du of the weights."""
        P, dP, _ = self._eval_all(X)
        return np.einsum("bia,ba->bi", dP, np.atleast_2d(du) / P)

    # -- high precision
    def _mp_tables(self):
        """Sparse (monomial, coefficient) lists per polynomial, coefficients
        converted at the current mpmath precision."""
        key = mpmath.mp.prec
        cache = self.__dict__.setdefault("_mp_cache", {})
        if key not in cache:
            mons = {tuple(e): i for i, e in enumerate(self._mons)}

            def table(c):
                return [(mons[tuple(e)], mpmath.mpf(q.numerator) / q.denominator)
                        for e, q in c.exact if q != 0]
            P = [table(c) for c in self._p]
            dP = [[table(self._dp[a][i]) for a in range(len(self))] for i in range(self.nvars)]
            ddP = [[[table(self._ddp[a][i][j]) for a in range(len(self))] for j in range(self.nvars)]
                   for i in range(self.nvars)]
            cache[key] = (P, dP, ddP)
        return cache[key]

    def mp_eval(self, x):
        """(P, dP, ddP) at one point, in mpmath."""
        P_t, dP_t, ddP_t = self._mp_tables()
        mono = []
        for e in self._mons:
            v = mpmath.mpc(1)
            for xi, ei in zip(x, e):
                if ei:
                    v *= xi ** int(ei)
            mono.append(v)

        def ev(tab):
            return mpmath.fsum(c * mono[m] for m, c in tab) if tab else mpmath.mpc(0)
        P = [ev(t) for t in P_t]
        dP = [[ev(t) for t in row] for row in dP_t]
        ddP = [[[ev(t) for t in row] for row in block] for block in ddP_t]
        return P, dP, ddP

    def mp_combine(self, ev, u, jac=True):
        P, dP, ddP = ev
        nv = self.nvars
        q = [ua / pa for ua, pa in zip(u, P)]
        G = [mpmath.fsum(dP[i][a] * q[a] for a in range(len(P))) for i in range(nv)]
        if not jac:
            return G, None
        J = [[mpmath.fsum(ddP[i][j][a] * q[a] - dP[i][a] * dP[j][a] * q[a] / P[a] for a in range(len(P)))
              for j in range(nv)] for i in range(nv)]
        return G, J

    def mp_grad_and_jac(self, x, u):
        ev = self.mp_eval(x)
        G, J = self.mp_combine(ev, u)
        return G, J, ev[0]


# ------------------------------------------------------------ constructors

def _symbolic_template(k, m, xs):
    E = [[sp.Integer(0)] * m for _ in range(k)]
    for j in range(1, k + 1):
        E[k - j][j - 1] = sp.Integer((-1) ** j)
    for r in range(k):
        E[r][k] = sp.Integer(1)
    for j in range(m - k - 1):
        E[0][k + 1 + j] = sp.Integer(1)
        for i in range(k - 1):
            E[i + 1][k + 1 + j] = xs[i][j]
    return sp.Matrix(E)


def from_config(k, m) -> LikelihoodSystem:
    """Maximal minors of the normal-form k x m matrix in the unknowns x_ij;
    constant minors are dropped."""
    if not 2 <= k < m:
        raise ValueError("need 2 <= k < m")
    xs = [[sp.Symbol(f"x{i + 1}_{j + 1}") for j in range(m - k - 1)] for i in range(k - 1)]
    syms = [s for row in xs for s in row]
    E = _symbolic_template(k, m, xs)
    coords, labels = [], []
    for I in combinations(range(m), k):
        p = sp.expand(E.extract(list(range(k)), list(I)).det())
        if p.free_symbols:
            coords.append(p)
            labels.append("".join(str(i + 1) for i in I) if m < 10 else "-".join(str(i + 1) for i in I))
    return LikelihoodSystem(syms, coords, labels)


def from_linear_model(model) -> LikelihoodSystem:
    """Affine forms of an Arrangement, or of a tropical LinearModel in the
    chart where its infinity functional equals 1 (coordinates keep their order)."""
    if isinstance(model, Arrangement):
        syms = sp.symbols(f"x1:{model.dim + 1}")
        coords = [sum(sp.Rational(a.numerator, a.denominator) * s for a, s in zip(h.normal, syms))
                  - sp.Rational(h.offset.numerator, h.offset.denominator) for h in model]
        return LikelihoodSystem(syms, coords)
    inf = model.vectors[-1]
    d1 = len(inf)
    piv = next(i for i, a in enumerate(inf) if a != 0)
    y0 = [Fraction(0)] * d1
    y0[piv] = 1 / inf[piv]
    basis = nullspace([list(inf)], d1)
    syms = sp.symbols(f"z1:{len(basis) + 1}")
    coords = []
    for v in model.vectors[:-1]:
        const = sum(a * b for a, b in zip(v, y0))
        lin = [sum(a * b for a, b in zip(v, vec)) for vec in basis]
        coords.append(sp.Rational(const.numerator, const.denominator)
                      + sum(sp.Rational(c.numerator, c.denominator) * s for c, s in zip(lin, syms)))
    return LikelihoodSystem(syms, coords, model.labels)


def pappus_system() -> LikelihoodSystem:
    x, y = sp.symbols("x y")
    coords = [x, y, 1 - x, 1 - y, 1 - x - y, 1 - x * y, x * y - x - y]
    return LikelihoodSystem((x, y), coords, ["x", "y", "1-x", "1-y", "1-x-y", "1-xy", "xy-x-y"])


def random_weights(n, seed=0, real=False):
    rng = np.random.default_rng(seed)
    if real:
        return rng.uniform(0.5, 2.0, n)
    return rng.uniform(0.5, 2.0, n) * np.exp(2j * np.pi * rng.uniform(0, 1, n))


# ------------------------------------------------------------ multistart Newton

@dataclass
class CriticalSolutionSet:
    points: list
    residuals: list
    saturated: bool
    discovered_at: list = field(default_factory=list)
    discarded: dict = field(default_factory=dict)
    budget: int = 0

    @property
    def count(self):
        return len(self.points)

    @property
    def separation(self):
        best = float("inf")
        for a, b in combinations(self.points, 2):
            best = min(best, max(abs(complex(x) - complex(y)) for x, y in zip(a, b)))
        return best

    def as_arrays(self):
        return np.array([[complex(v) for v in p] for p in self.points], dtype=complex)


def _annulus_starts(rng, n, nv, rmin=0.1, rmax=10.0):
    """Log-uniform modulus in [rmin, rmax], uniform argument, per coordinate."""
    r = np.exp(rng.uniform(np.log(rmin), np.log(rmax), (n, nv)))
    return r * np.exp(2j * np.pi * rng.uniform(0, 1, (n, nv)))


def start_pairs(sys, u, X):
    """For each point x, the weights closest to u for which x is critical.
    The critical equations are linear in the weights, so this is a projection
    onto the kernel of the matrix (d p_a / p_a)(x)."""
    P, dP, _ = sys._eval_all(X)
    Gm = dP / P[:, None, :]
    pinv = np.linalg.pinv(Gm)
    return u[None, :] - np.einsum("bai,bi->ba", pinv, np.einsum("bia,a->bi", Gm, u))


def _newton_correct(sys, x, u, iters=3):
    nv = x.shape[1]
    first = None
    for _ in range(iters):
        G, J, _ = sys.grad_and_jac(x, u)
        bad = ~np.isfinite(J).all(axis=(1, 2)) | ~np.isfinite(G).all(axis=1)
        J[bad] = np.eye(nv)
        bad |= np.abs(np.linalg.det(J)) < 1e-300
        J[bad] = np.eye(nv)
        G[bad] = np.nan
        dx = np.linalg.solve(J, G[:, :, None])[:, :, 0]
        x = x - dx
        nrm = np.abs(dx).max(axis=1) / (1 + np.abs(x).max(axis=1))
        if first is None:
            first = nrm
    return x, first, nrm


def track_weights(sys, X, U0, U1, gamma, h0=0.02, hmax=0.1, max_steps=5000):
    """Follow the critical points X of the weights gamma*U0 (one row per path)
    along u(s) = (1-s) gamma U0 + s U1 to s = 1. RK4 predictor, three Newton
    corrector steps, step halving on rejection. Returns (X, finished mask)."""
    B, nv = X.shape
    X = X.astype(complex).copy()
    s = np.zeros(B)
    h = np.full(B, h0)
    alive = np.ones(B, dtype=bool)
    done = np.zeros(B, dtype=bool)
    dU = U1[None, :] - gamma * U0

    def weights(idx, sv):
        return (1 - sv)[:, None] * gamma * U0[idx] + sv[:, None] * U1[None, :]

    def velocity(x, sv, idx):
        _, J, _ = sys.grad_and_jac(x, weights(idx, sv))
        b = sys.d_weights(x, dU[idx])
        return -np.linalg.solve(J, b[:, :, None])[:, :, 0]

    for _ in range(max_steps):
        idx = np.nonzero(alive & ~done)[0]
        if not len(idx):
            break
        x, sv = X[idx], s[idx]
        hv = np.minimum(h[idx], 1 - sv)
        with np.errstate(all="ignore"):
            try:
                k1 = velocity(x, sv, idx)
                k2 = velocity(x + hv[:, None] / 2 * k1, sv + hv / 2, idx)
                k3 = velocity(x + hv[:, None] / 2 * k2, sv + hv / 2, idx)
                k4 = velocity(x + hv[:, None] * k3, sv + hv, idx)
                xp = x + hv[:, None] / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
            except np.linalg.LinAlgError:
                xp = np.full_like(x, np.nan)
            s1 = sv + hv
            xp, first, last = _newton_correct(sys, xp, weights(idx, s1))
            acc = np.isfinite(last) & (last < 1e-9) & (first < 1e-3)
        ai, ri = idx[acc], idx[~acc]
        X[ai] = xp[acc]
        s[ai] = s1[acc]
        h[ai] = np.minimum(hv[acc] * 1.6, hmax)
        done[ai] = s[ai] >= 1
        h[ri] = hv[~acc] / 2
        alive[ri[h[ri] < 1e-9]] = False
        alive &= ~(np.abs(X).max(axis=1) > 1e8)
    return X, done & alive


def polish(sys, x, u, dps=32, max_iter=20):
    """Newton at `dps` digits. Returns (point as mpc list, residual sup-norm, min |p_a|)."""
    with mpmath.workdps(dps):
        xm = [mpmath.mpc(complex(v)) for v in x]
        um = [mpmath.mpc(complex(v)) for v in u]
        for _ in range(max_iter):
            G, J, P = sys.mp_grad_and_jac(xm, um)
            res = max(abs(g) for g in G)
            if res < mpmath.mpf(10) ** (-(dps - 6)):
                break
            try:
                step = mpmath.lu_solve(mpmath.matrix(J), mpmath.matrix(G))
            except ZeroDivisionError:
                return None, float("inf"), 0.0
            xm = [a - b for a, b in zip(xm, step)]
        G, _, P = sys.mp_grad_and_jac(xm, um)
        return xm, float(max(abs(g) for g in G)), float(min(abs(p) for p in P))


def solve_multistart(sys: LikelihoodSystem, weights=None, seed=0, budget=1000, chunk=500,
                     guard=1e-8, tol=1e-10, dedup=1e-6, dps=32) -> CriticalSolutionSet:
    """Critical points for `weights` from `budget` random starts. Each start is
    a random point of the annulus made exactly critical for projected weights,
    then carried to the target weights by track_weights."""
    rng = np.random.default_rng(seed)
    u = np.asarray(random_weights(len(sys), seed) if weights is None else weights, dtype=complex)
    if len(u) != len(sys):
        raise ValueError(f"{len(u)} weights for {len(sys)} coordinates")
    keep = np.nonzero(u != 0)[0]
    if len(keep) < len(u):
        sys = LikelihoodSystem(sys.symbols, [sys.coords[i].as_expr() for i in keep],
                               [sys.labels[i] for i in keep])
        u = u[keep]
    gamma = np.exp(2j * np.pi * rng.uniform())
    starts = _annulus_starts(rng, budget, sys.nvars)
    pts, arrs, res, found_at = [], [], [], []
    discarded = {"failed_path": 0, "near_boundary": 0, "residual": 0, "duplicate": 0}

    def known(x):
        return any(np.abs(x - p).max() < dedup for p in arrs)

    for lo in range(0, budget, chunk):
        X0 = starts[lo:lo + chunk]
        with np.errstate(all="ignore"):
            U0 = start_pairs(sys, u, X0)
        X, fin = track_weights(sys, X0, U0, u, gamma)
        discarded["failed_path"] += int((~fin).sum())
        for off in np.nonzero(fin)[0]:
            if known(X[off]):
                discarded["duplicate"] += 1
                continue
            xm, r, pmin = polish(sys, X[off], u, dps)
            if xm is None or pmin < guard:
                discarded["near_boundary"] += 1
                log.info("discarded start %d: a coordinate is within %.1e of zero", lo + off, pmin)
                continue
            if r >= tol:
                discarded["residual"] += 1
                log.info("discarded start %d: residual %.2e after polish", lo + off, r)
                continue
            xc = np.array([complex(v) for v in xm])
            if known(xc):
                discarded["duplicate"] += 1
                continue
            pts.append(xm)
            arrs.append(xc)
            res.append(r)
            found_at.append(int(lo + off))
    order = sorted(range(len(pts)), key=lambda i: [(round(float(v.real), 9), round(float(v.imag), 9))
                                                   for v in pts[i]])
    saturated = bool(budget) and all(i < 0.75 * budget for i in found_at)
    return CriticalSolutionSet([pts[i] for i in order], [res[i] for i in order], saturated,
                               [found_at[i] for i in order], discarded, budget)


def real_points(sol: CriticalSolutionSet, tol=1e-8):
    return [[float(v.real) for v in p] for p in sol.points if all(abs(v.imag) < tol for v in p)]


def region_signs(arr: Arrangement, pts):
    """Sign vector of each point with respect to the hyperplanes of arr."""
    out = []
    for x in pts:
        out.append(tuple(1 if sum(float(a) * xi for a, xi in zip(h.normal, x)) - float(h.offset) > 0 else -1
                         for h in arr))
    return out
