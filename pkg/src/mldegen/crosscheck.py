"""Agreement suites that compare independent routes to the same numbers.

Every suite returns a report dict with a list of checks; a check records the
values it compared so a failing run can be diffed by hand.
"""
from __future__ import annotations

import random
import time
from fractions import Fraction

from . import arrangement as ar
from . import discriminantal as disc
from . import finite_field as ff
from . import strata
from .linalg import fmt

# Published values used as targets.
BOUNDED_B = {(3, 4): 2, (3, 5): 13, (3, 6): 42, (3, 7): 101, (3, 8): 205,
             (4, 6): 192, (4, 7): 1858, (5, 7): 5388}
STRETCH_B = {(4, 8): 10644, (5, 8): 204117}
CHI_X3 = {6: 26, 7: 1272, 8: 188112, 9: 74570400}
CHY6_W = (12, 6, 9, 12, 5, 1, 10, 11, 3)
CHY6_POINTS = {(0, 0, 8, 4, 2, 0, 2, 0, 0), (0, 5, 2, 2, 0, 0, 0, 0, 2), (1, 0, 8, 0, 2, 0, 0, 1, 0),
               (2, 5, 2, 0, 0, 0, 2, 3, 2), (7, 5, 2, 0, 0, 0, 5, 2, 2), (9, 0, 8, 0, 2, 0, 0, 8, 0)}


def _check(name, got, expected):
    return {"name": name, "got": got, "expected": expected, "ok": got == expected}


def _report(name, checks, status=None, **extra):
    ok = all(c["ok"] for c in checks)
    rep = {"suite": name, "status": status or ("agree" if ok else "disagree"), "ok": ok, "checks": checks}
    rep.update(extra)
    return rep


def _cp(p):
    return [int(c) for c in p.coeffs]


# ------------------------------------------------------------ suites

def decone_identities(central):
    """Decone identities for one central arrangement and its two sections."""
    cp = ar.char_poly_of(central)
    affine, restriction = ar.decone(cp)
    # restriction*t - restriction(1) must equal affine*(t-1)
    lhs = list(restriction.coeffs) + [0]
    lhs[-1] -= restriction(1)
    rhs = list(affine.coeffs) + [0]
    for i, c in enumerate(affine.coeffs):
        rhs[i + 1] -= c
    bounded = affine(1) == restriction.derivative()(1) + restriction(1)
    return affine, restriction, lhs == rhs, bounded


def lemma34(builds=None, seed=0, random_count=50):
    """Decone against direct computation on discriminantal builds, plus the
    identities on seeded random central arrangements."""
    builds = sorted(BOUNDED_B) if builds is None else builds
    checks = []
    for k, m in builds:
        cfg = disc.random_generic_config(k, m, seed=seed)
        bt = disc.build_Btilde(cfg)
        affine, restriction, ident, cor = decone_identities(bt)
        direct_B = ar.char_poly_of(disc.build_B(cfg))
        direct_A = ar.char_poly_of(disc.build_A(cfg, seed=seed))
        checks.append(_check(f"B({k},{m}) decone", _cp(affine), _cp(direct_B)))
        checks.append(_check(f"A({k},{m}) decone", _cp(restriction), _cp(direct_A)))
        checks.append(_check(f"B~({k},{m}) identities", [ident, cor], [True, True]))
    for i in range(random_count):
        arr = random_central(seed * 1000 + i)
        _, _, ident, cor = decone_identities(arr)
        checks.append(_check(f"random central #{i} ({len(arr)} in R^{arr.dim})", [ident, cor], [True, True]))
    return _report("lemma34", checks)


def random_central(seed, max_n=10, max_d=3, bound=3):
    rng = random.Random(seed)
    d = rng.randint(2, max_d)
    n = rng.randint(d, max_n)
    rows = []
    while len(rows) < n:
        v = [rng.randint(-bound, bound) for _ in range(d)]
        if any(v):
            rows.append(v + [0])
    return ar.Arrangement.from_rows(d, rows)


def table1(seed=0, stretch=False):
    """Bounded regions of B(k,m) from the intersection poset, against the
    published table and the soft polynomials evaluated at m+1."""
    entries = dict(BOUNDED_B)
    if stretch:
        entries.update(STRETCH_B)
    checks = []
    for (k, m), want in sorted(entries.items()):
        cfg = disc.random_generic_config(k, m, seed=seed)
        _, bounded = ar.regions(ar.char_poly_of(disc.build_B(cfg)))
        checks.append(_check(f"B({k},{m}) bounded regions", bounded, want))
        if k in (3, 4):
            soft = disc.soft_poly_eval(k, m + 1)
            checks.append(_check(f"soft polynomial k={k} at m={m + 1}", fmt(soft), str(want)))
    return _report("table1", checks)


def bounded_fibers(m_max, seed=0):
    return {m: ar.regions(ar.char_poly_of(disc.build_B(disc.random_generic_config(3, m, seed=seed))))[1]
            for m in range(4, m_max)}


def theorem51(seed=0):
    """chi(X(3,m)) by the stratified recursion with computed fibers, against the
    finite-field formula specialized at q = 1."""
    consts = strata.load_constants()
    fibers = bounded_fibers(9, seed)
    chi = strata.chi_X3_table(9, fibers, consts)
    checks = [_check(f"fiber B(3,{m})", fibers[m], BOUNDED_B[(3, m)]) for m in range(4, 9)]
    for m in range(6, 10):
        checks.append(_check(f"chi X(3,{m}) recursion", chi[m], CHI_X3[m]))
        checks.append(_check(f"chi X(3,{m}) point count at q=1", ff.euler_from_count(m), CHI_X3[m]))
    side = strata.decomp_48(CHI_X3[8] * 15, [(45, -consts[(8, 3)]), (15, consts[(8, 4)])])
    checks.append(_check("9-point stratum decomposition", side, 6750000))
    return _report("theorem51", checks, chi={str(m): v for m, v in chi.items()})


def fforacle(ms=(6, 7), qs=(5, 7, 11, 13), workers=1, budget=ff.BRUTE_BUDGET):
    checks = []
    for m in ms:
        for q in qs:
            checks.append(_check(f"X(3,{m}) over F_{q}", ff.brute_count(3, m, q, workers, budget),
                                 ff.count_formula(m, q)))
    for m, want in CHI_X3.items():
        checks.append(_check(f"euler_from_count({m})", ff.euler_from_count(m), want))
    return _report("fforacle", checks)


def x36_triple(seed=0, budget=1000):
    """chi(X(3,6)) = 26 three ways: point count, recursion, critical points."""
    from .critical import from_config, solve_multistart
    rec = strata.chi_X3_table(6, bounded_fibers(6, seed), strata.load_constants())[6]
    sol = solve_multistart(from_config(3, 6), seed=seed, budget=budget)
    checks = [_check("finite field", ff.euler_from_count(6), 26),
              _check("stratified recursion", rec, 26),
              _check("critical points", sol.count, 26),
              _check("multistart saturated", sol.saturated, True)]
    return _report("x36-triple", checks)


def tropmle_chy6(seed=0, budget=300, learner=True):
    """The CHY m=6 tropical critical points by flag enumeration and by
    tracking numerical critical points down the degeneration."""
    from .tropical import chy_model, trop_critical_points
    model = chy_model(6)
    exact = {tuple(int(x) for x in p) for p in trop_critical_points(model, CHY6_W)}
    checks = [_check("enumeration", sorted(exact), sorted(CHY6_POINTS))]
    extra = {}
    if learner:
        res = learn_chy6(model, seed, budget)
        learned = sorted(tuple(int(x) if Fraction(x).denominator == 1 else str(x) for x in c.q)
                         for c in res.clusters)
        checks.append(_check("learned valuations", learned, sorted(CHY6_POINTS)))
        checks.append(_check("multiplicities", sorted(c.multiplicity for c in res.clusters), [1] * 6))
        rho = max((c.max_rho for c in res.clusters), default=0.0)
        checks.append(_check("max regression error below 0.2", rho < 0.2, True))
        extra = {"max_rho": rho, "failed_paths": res.failed}
    return _report("tropmle-chy6", checks, **extra)


def learn_chy6(model=None, seed=0, budget=300, weight_seed=4):
    from .critical import from_linear_model, random_weights, solve_multistart
    from .tropical import chy_model
    from .valuations import ParametricWeights, learn, schedule_to
    sys = from_linear_model(model or chy_model(6))
    c = random_weights(len(sys), weight_seed)
    starts = solve_multistart(sys, weights=c, seed=seed, budget=budget).points
    return learn(sys, ParametricWeights(list(c), list(CHY6_W)), starts, schedule=schedule_to(1e-6))


def decomp48():
    """Orbit sizes by enumeration, the regular part, and the full sum with its
    residual against the published total. A nonzero residual is reported as a
    known discrepancy in the transcribed multiplicities, not as a failure."""
    rep = strata.decomp48_report(strata.load_soft48())
    checks = [_check(f"orbit {r['label']}", r["orbit"], r["orbit_listed"]) for r in rep["types"]]
    checks.append(_check("orbit sum", rep["orbit_sum"], 3150))
    checks.append(_check("regular part", rep["regular"], 1272 * 1858))
    status = None
    if all(c["ok"] for c in checks) and rep["residual"]:
        status = "documented-discrepancy"
    return _report("decomp48", checks, status=status, total=rep["total"], target=rep["target"],
                   residual=rep["residual"], single_value_fixes=rep["single_value_fixes"])


SUITES = {
    "x36-triple": x36_triple,
    "table1": table1,
    "theorem51": theorem51,
    "fforacle": fforacle,
    "tropmle-chy6": tropmle_chy6,
    "lemma34": lemma34,
    "decomp48": decomp48,
}


def run(name, **kw):
    if name not in SUITES:
        raise KeyError(f"unknown suite {name!r}; choose from {', '.join(SUITES)}")
    t = time.time()
    rep = SUITES[name](**kw)
    rep["seconds"] = round(time.time() - t, 3)
    return rep
