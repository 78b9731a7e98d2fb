"""Euler characteristic bookkeeping for stratified fibrations."""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from importlib import resources
from itertools import permutations, product
from math import comb, factorial, prod


class MobiusError(ValueError):
    pass


@dataclass
class StratPoset:
    """Strata of a base Y. `above[s]` lists the strata whose closure contains s
    (cover relations suffice; the order is closed transitively). The unique
    maximal element is the open dense stratum Y itself."""
    chi: dict
    fiber_chi: dict
    above: dict
    _up: dict = field(default=None, repr=False)
    _mu: dict = field(default=None, repr=False)

    def __post_init__(self):
        up = {}

        def upset(s, stack=()):
            if s in up:
                return up[s]
            if s in stack:
                raise MobiusError(f"cycle through {s}")
            res = {s}
            for t in self.above.get(s, ()):
                res |= upset(t, stack + (s,))
            up[s] = res
            return res
        for s in self.chi:
            upset(s)
        self._up = up
        tops = [s for s in self.chi if up[s] == {s}]
        if len(tops) != 1:
            raise MobiusError(f"expected a unique top stratum, found {tops}")
        self.top = tops[0]
        self._mu = {}

    def leq(self, s, t):
        return t in self._up[s]

    def mu(self, s, t):
        """Moebius function of the interval [s, t] (s in the closure of t)."""
        key = (s, t)
        if key in self._mu:
            return self._mu[key]
        if s == t:
            val = 1
        elif not self.leq(s, t):
            val = 0
        else:
            val = -sum(self.mu(s, u) for u in self._up[s] if u != t and self.leq(u, t))
        self._mu[key] = val
        return val

    def check(self):
        for s in self.chi:
            for t in self._up[s]:
                if t != s and sum(self.mu(s, u) for u in self._up[s] if self.leq(u, t)) != 0:
                    raise MobiusError(f"Moebius identity fails on [{s}, {t}]")
        return True

    def rho(self, s):
        """sum over strata S' containing s of mu(s,S') (chi(F_Y) - chi(F_S'))."""
        fy = self.fiber_chi[self.top]
        return sum(self.mu(s, t) * (fy - self.fiber_chi[t]) for t in self._up[s])


def chi_total(p: StratPoset):
    """Euler characteristic of the total space, computed two ways."""
    p.check()
    first = sum(p.chi[s] * sum(p.mu(s, t) * p.fiber_chi[t] for t in p._up[s]) for s in p.chi)
    fy = p.fiber_chi[p.top]
    second = p.chi[p.top] * fy + sum(
        p.chi[s] * sum(p.mu(s, t) * (p.fiber_chi[t] - fy) for t in p._up[s])
        for s in p.chi if s != p.top)
    if first != second:
        raise MobiusError(f"the two expansions disagree: {first} != {second}")
    return first


# ------------------------------------------------------------ rho and sigma

def _profile(n):
    """Normalize {h: n_h} (or a multiset of multiplicities) to a sorted tuple
    of point multiplicities."""
    if isinstance(n, dict):
        pts = []
        for h, c in n.items():
            if h < 3 or c < 0:
                raise ValueError("profiles count points with h >= 3 lines, n_h >= 0")
            pts += [h] * c
        return tuple(sorted(pts))
    return tuple(sorted(n))


def sigma(profile) -> int:
    return sum(comb(h - 1, 2) for h in _profile(profile))


def rho(profile) -> int:
    pts = _profile(profile)
    if len(pts) == 1:
        return (-1) ** (pts[0] - 1)
    return 0


@lru_cache(maxsize=None)
def _rho_rec(pts):
    if not pts:
        return 0
    # each special point of multiplicity h either disappears or keeps j >= 3 of
    # its lines, in comb(h, j) ways; the full choice is the stratum itself
    options = [[(0, 1)] + [(j, comb(h, j)) for j in range(3, h + 1)] for h in pts]
    total = 0
    for choice in product(*options):
        sub = tuple(sorted(j for j, _ in choice if j))
        if sub == pts and all(j == h for (j, _), h in zip(choice, pts)):
            continue
        weight = prod(w for _, w in choice)
        total += weight * _rho_rec(sub)
    return sigma(pts) - total


def rho_recursive(profile) -> int:
    return _rho_rec(_profile(profile))


def profiles_up_to(total):
    """All profiles with sum of h * n_h <= total."""
    out = []

    def rec(rest, smallest, acc):
        out.append(tuple(acc))
        for h in range(smallest, rest + 1):
            rec(rest - h, h, acc + [h])
    rec(total, 3, [])
    return out


# ------------------------------------------------------------ X(3,m) recursion

def stratum_count(m, h) -> int:
    if m < 2 * h:
        return 0
    num = prod(comb(m - 2 * i, 2) for i in range(h))
    q, r = divmod(num, factorial(h))
    assert r == 0
    return q


def chi_X3_recursion(chi_prev, fiber_chi, strata_chis, m):
    """chi(X(3,m+1)) from chi(X(3,m)), the generic fiber chi and the constants
    chi(3,m;h) of the strata where h disjoint pairs of lines meet in one point."""
    total = Fraction(chi_prev) * fiber_chi
    for h, c in strata_chis.items():
        num = prod(comb(m - 2 * i, 2) for i in range(h))
        if num % factorial(h):
            raise ValueError(f"binomial product for h={h} not divisible by {h}!")
        total += (-1) ** h * (num // factorial(h)) * c
    return int(total)


def load_constants(path=None):
    if path is None:
        text = resources.files("mldegen").joinpath("data/strata_constants.json").read_text()
    else:
        with open(path) as fh:
            text = fh.read()
    raw = json.loads(text)
    out = {}
    for key, rec in raw["constants"].items():
        m, h = (int(x) for x in key.split(","))
        out[(m, h)] = int(rec["chi"])
    return out


def chi_X3_table(m_max, fibers, constants):
    """chi(X(3,m)) for m = 4..m_max. fibers[m] = bounded regions of B(3,m)."""
    chi = {4: 1}
    for m in range(4, m_max):
        strata = {h: constants[(m, h)] for h in range(3, m // 2 + 1) if stratum_count(m, h)}
        missing = [h for h in range(3, m // 2 + 1) if stratum_count(m, h) and (m, h) not in constants]
        if missing:
            raise KeyError(f"no constant for chi(3,{m};{missing[0]})")
        chi[m + 1] = chi_X3_recursion(chi[m], fibers[m], strata, m)
    return chi


# ------------------------------------------------------------ S7 orbits / X(4,8)

def _canon_quads(quads, perm):
    return frozenset(tuple(sorted(perm[i] for i in q[:3])) for q in quads)


def orbit_size(rep) -> int:
    quads = [tuple(q) for q in rep]
    for q in quads:
        if len(q) != 4 or q[-1] != 8 or len(set(q[:3])) != 3 or not all(1 <= i <= 7 for i in q[:3]):
            raise ValueError(f"malformed quadruple {q}")
    seen = set()
    for p in permutations(range(1, 8)):
        perm = dict(zip(range(1, 8), p))
        seen.add(_canon_quads(quads, perm))
    return len(seen)


def decomp_48(regular, pairs):
    return regular + sum(a * b for a, b in pairs)


def load_soft48(path=None):
    if path is None:
        text = resources.files("mldegen").joinpath("data/soft48.json").read_text()
    else:
        with open(path) as fh:
            text = fh.read()
    return json.loads(text)


def decomp48_report(table):
    regular = table["regular"]["chi_x47"] * table["regular"]["bounded_b48"]
    rows = []
    for t in table["types"]:
        a = orbit_size(t["rep"])
        rows.append({"label": t["label"], "orbit": a, "orbit_listed": t.get("A"), "B": t["B"], "AB": a * t["B"]})
    total = decomp_48(regular, [(r["orbit"], r["B"]) for r in rows])
    target = table["target"]
    resid = target - total
    hints = []
    if resid:
        for r in rows:
            if resid % r["orbit"] == 0:
                hints.append({"label": r["label"], "B_needed": r["B"] + resid // r["orbit"]})
    return {
        "regular": regular,
        "regular_expected": table["regular"].get("expected"),
        "types": rows,
        "orbit_sum": sum(r["orbit"] for r in rows),
        "total": total,
        "target": target,
        "residual": resid,
        "single_value_fixes": hints,
    }
