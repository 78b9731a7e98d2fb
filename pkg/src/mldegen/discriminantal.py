"""Discriminantal arrangements A(k,m), B(k,m), B~(k,m) built from the
normal-form configuration matrix, plus degenerate (special-position) configs."""
from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations

from .arrangement import Arrangement, Hyperplane, generic_section, restrict_to
from .linalg import cofactor_normal, det_small, det


@dataclass(frozen=True)
class ConfigMatrix:
    k: int
    m: int
    entries: tuple  # k rows of m Fractions

    def column(self, j):
        return [self.entries[r][j] for r in range(self.k)]

    @property
    def unknowns(self):
        """x_{i,j} as a (k-1) x (m-k-1) nested tuple."""
        return tuple(tuple(self.entries[i + 1][self.k + 1 + j] for j in range(self.m - self.k - 1))
                     for i in range(self.k - 1))

    def minors(self):
        out = {}
        for I in combinations(range(self.m), self.k):
            M = [[self.entries[r][c] for c in I] for r in range(self.k)]
            out[tuple(i + 1 for i in I)] = det_small(M) if self.k <= 4 else det(M)
        return out

    @property
    def generic(self):
        return all(v != 0 for v in self.minors().values())


def template(k, m, xs) -> ConfigMatrix:
    """Normal form: signed antidiagonal k x k block, a column of ones, then
    columns (1, x_{1,j}, ..., x_{k-1,j})."""
    if not 2 <= k < m:
        raise ValueError("need 2 <= k < m")
    if len(xs) != k - 1 or any(len(r) != m - k - 1 for r in xs):
        raise ValueError(f"expected a {k - 1} x {m - k - 1} array of unknowns")
    E = [[Fraction(0)] * m for _ in range(k)]
    for j in range(1, k + 1):           # column j (1-based) has (-1)^j in row k+1-j
        E[k - j][j - 1] = Fraction((-1) ** j)
    for r in range(k):
        E[r][k] = Fraction(1)
    for j in range(m - k - 1):
        E[0][k + 1 + j] = Fraction(1)
        for i in range(k - 1):
            E[i + 1][k + 1 + j] = Fraction(xs[i][j])
    return ConfigMatrix(k, m, tuple(tuple(r) for r in E))


def random_generic_config(k, m, seed=0, num_bound=10**6, den_bound=97, tries=1000) -> ConfigMatrix:
    rng = random.Random(seed)
    for _ in range(tries):
        xs = [[Fraction(rng.randint(-num_bound, num_bound), rng.randint(1, den_bound))
               for _ in range(m - k - 1)] for _ in range(k - 1)]
        cfg = template(k, m, xs)
        if cfg.generic:
            return cfg
    raise RuntimeError("rejection budget exhausted; raise the coefficient bound")


def hyperplane_normals(cfg: ConfigMatrix):
    """[(subset, normal, is_zero)] for every (k-1)-subset of columns (1-based)."""
    out = []
    for I in combinations(range(cfg.m), cfg.k - 1):
        n = cofactor_normal([cfg.column(j) for j in I])
        out.append((tuple(i + 1 for i in I), n, all(x == 0 for x in n)))
    return out


class DegenerateConfig(ValueError):
    pass


def build_Btilde(cfg: ConfigMatrix, generic=True) -> Arrangement:
    normals = hyperplane_normals(cfg)
    zero = [I for I, _, z in normals if z]
    if zero and generic:
        raise DegenerateConfig(f"columns {zero[0]} are linearly dependent")
    return Arrangement(cfg.k, [Hyperplane.make(n, 0) for _, n, z in normals if not z])


def build_B(cfg: ConfigMatrix, generic=True) -> Arrangement:
    e1 = [1] + [0] * (cfg.k - 1)
    return restrict_to(build_Btilde(cfg, generic), e1, 1)


def build_A(cfg: ConfigMatrix, seed=0, generic=True) -> Arrangement:
    return generic_section(build_Btilde(cfg, generic), seed=seed)


# ------------------------------------------------------------ degenerate configs

def parse_degenerate(spec: str, k: int):
    """'12,34,56' or '1-2,3-4,5-6': the hyperplanes spanned by these (k-1)-subsets
    share a point. Several conditions are separated by ';'."""
    conds = []
    for part in spec.split(";"):
        part = part.strip()
        if not part:
            continue
        subsets = []
        for tok in part.split(","):
            tok = tok.strip()
            idx = [int(x) for x in tok.split("-")] if "-" in tok else [int(c) for c in tok]
            if len(idx) != k - 1 or len(set(idx)) != k - 1:
                raise ValueError(f"'{tok}' is not a {k - 1}-subset of column labels")
            subsets.append(tuple(sorted(idx)))
        if len(subsets) != k:
            raise ValueError(f"a concurrency condition needs {k} subsets, got {len(subsets)}")
        conds.append(subsets)
    if not conds:
        raise ValueError("empty degeneracy spec")
    return conds


def _condition(k, m, xs, subsets):
    cfg = template(k, m, xs)
    rows = [cofactor_normal([cfg.column(j - 1) for j in I]) for I in subsets]
    return det_small(rows) if k <= 4 else det(rows)


def _univariate(k, m, xs, subsets, i, j):
    """Coefficients (low to high) of the condition as a polynomial in x_{i,j}."""
    pts = list(range(k + 2))
    vals = []
    for t in pts:
        ys = [list(r) for r in xs]
        ys[i][j] = Fraction(t)
        vals.append(_condition(k, m, ys, subsets))
    # Newton divided differences, then expand
    n = len(pts)
    coef = list(vals)
    for lvl in range(1, n):
        for a in range(n - 1, lvl - 1, -1):
            coef[a] = (coef[a] - coef[a - 1]) / (pts[a] - pts[a - lvl])
    poly = [Fraction(0)] * n
    for a in range(n - 1, -1, -1):
        # poly = poly * (x - pts[a]) + coef[a]
        new = [Fraction(0)] * n
        for e in range(n - 1):
            new[e + 1] += poly[e]
            new[e] -= pts[a] * poly[e]
        new[0] += coef[a]
        poly = new
    while len(poly) > 1 and poly[-1] == 0:
        poly.pop()
    return poly


def degenerate_config(k, m, spec, seed=0, num_bound=10**6, den_bound=97, tries=200) -> ConfigMatrix:
    """Random configuration satisfying the concurrency conditions in spec,
    obtained by solving each condition exactly for one unknown."""
    conds = parse_degenerate(spec, k) if isinstance(spec, str) else spec
    for sub in conds:
        for I in sub:
            if max(I) > m:
                raise ValueError(f"column label {max(I)} exceeds m={m}")
    rng = random.Random(seed)
    nv = m - k - 1
    for _ in range(tries):
        xs = [[Fraction(rng.randint(-num_bound, num_bound), rng.randint(1, den_bound))
               for _ in range(nv)] for _ in range(k - 1)]
        used = set()
        ok = True
        for sub in conds:
            done = False
            for i in range(k - 1):
                for j in range(nv):
                    if (i, j) in used:
                        continue
                    poly = _univariate(k, m, xs, sub, i, j)
                    if len(poly) == 2:
                        xs[i][j] = -poly[0] / poly[1]
                        used.add((i, j))
                        done = True
                        break
                if done:
                    break
            if not done:
                ok = False
                break
        if not ok:
            continue
        if any(_condition(k, m, xs, sub) != 0 for sub in conds):
            continue
        cfg = template(k, m, xs)
        if cfg.generic:
            return cfg
    raise DegenerateConfig(f"could not realize '{spec}' inside X({k},{m})")


# ------------------------------------------------------------ soft polynomials

_SOFT = {
    # value at m equals the bounded-region count of B(k, m-1)
    3: (Fraction(1, 2 ** 3), [1, -6, 11, -14], 4),
    4: (Fraction(1, 6 ** 4), [1, -13, -5, 1019, -7934, 29198, -57510, 57276, -20736], 5),
}


def soft_poly_eval(k, m) -> Fraction:
    if k not in _SOFT:
        raise ValueError("only k = 3 and k = 4 are transcribed")
    if m < k + 1:
        raise ValueError(f"need m >= {k + 1}")
    scale, coeffs, shift = _SOFT[k]
    acc = 0
    for c in coeffs:
        acc = acc * m + c
    return scale * (m - shift) * acc
