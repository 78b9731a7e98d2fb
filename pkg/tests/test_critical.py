from itertools import combinations

import numpy as np
import pytest
import sympy as sp

from mldegen.arrangement import Arrangement
from mldegen.cells import bounded_sign_vectors
from mldegen.critical import (from_config, from_linear_model, pappus_system, random_weights, real_points,
                              region_signs, solve_multistart)
from mldegen.discriminantal import build_B, random_generic_config


def curve_complement_euler(curves, chis):
    """Euler characteristic of C^2 minus a union of plane curves meeting in
    finitely many points: chi(C^2) - (sum chi(C_i) - sum_p (n_p - 1))."""
    x, y = sp.symbols("x y")
    through = {}
    for i, j in combinations(range(len(curves)), 2):
        for sol in sp.solve([curves[i], curves[j]], [x, y], dict=True):
            p = (sp.nsimplify(sol[x]), sp.nsimplify(sol[y]))
            through.setdefault(p, set()).update({i, j})
    return 1 - (sum(chis) - sum(len(s) - 1 for s in through.values()))


def pappus_curves():
    x, y = sp.symbols("x y")
    return [x, y, 1 - x, 1 - y, 1 - x - y, 1 - x * y, x * y - x - y], [1, 1, 1, 1, 1, 0, 0]


# -- systems ------------------------------------------------------------------

def test_from_config_shapes():
    s = from_config(2, 5)
    assert s.nvars == 2 and len(s) == 5
    assert from_config(2, 6).nvars == 3
    s36 = from_config(3, 6)
    assert s36.nvars == 4 and len(s36) == 14
    with pytest.raises(ValueError):
        from_config(3, 3)


def test_gradient_matches_sympy():
    s = pappus_system()
    u = random_weights(len(s), 3)
    x0 = np.array([[0.3 + 0.2j, -0.7 + 0.1j]])
    G, J, _ = s.grad_and_jac(x0, u)
    X, Y = s.symbols
    L = sum(complex(ua) * sp.log(p.as_expr()) for ua, p in zip(u, s.coords))
    sub = {X: x0[0, 0], Y: x0[0, 1]}
    for i, v in enumerate((X, Y)):
        assert abs(complex(sp.diff(L, v).evalf(subs=sub)) - G[0, i]) < 1e-10
        for j, w in enumerate((X, Y)):
            assert abs(complex(sp.diff(L, v, w).evalf(subs=sub)) - J[0, i, j]) < 1e-9


# -- counts -------------------------------------------------------------------

@pytest.mark.parametrize("k,m,budget,count", [(2, 5, 200, 2), (2, 6, 400, 6), (3, 6, 1000, 26)])
def test_config_counts(k, m, budget, count):
    sol = solve_multistart(from_config(k, m), seed=0, budget=budget)
    assert sol.count == count and sol.saturated
    assert max(sol.residuals) < 1e-10
    assert sol.separation > 1e-6


def test_pappus_euler_oracle():
    curves, chis = pappus_curves()
    assert curve_complement_euler(curves, chis) == 8
    assert curve_complement_euler(curves[:6], chis[:6]) == 5


@pytest.mark.parametrize("seed", range(3))
def test_pappus_count_across_weights(seed):
    sol = solve_multistart(pappus_system(), seed=seed, budget=400)
    assert sol.count == 8 and sol.saturated


def test_pappus_perturbed_ones():
    rng = np.random.default_rng(5)
    u = 1 + 1e-3 * rng.standard_normal(7)
    assert solve_multistart(pappus_system(), weights=u, seed=1, budget=400).count == 8


def test_pappus_dropped_term():
    curves, chis = pappus_curves()
    want = curve_complement_euler(curves[:6], chis[:6])
    u = random_weights(7, 2)
    u[6] = 0
    sol = solve_multistart(pappus_system(), weights=u, seed=2, budget=400)
    assert sol.count == want and sol.saturated


def test_scaling_equivariance():
    s = pappus_system()
    u = random_weights(len(s), 0)
    a = solve_multistart(s, weights=u, seed=0, budget=400).as_arrays()
    b = solve_multistart(s, weights=u * (2 - 3j), seed=1, budget=400).as_arrays()
    assert len(a) == len(b) == 8
    for p in a:
        assert np.abs(b - p).max(axis=1).min() < 1e-8


def test_single_hyperplane_has_no_critical_point():
    sol = solve_multistart(from_linear_model(Arrangement.from_rows(1, [[1, 0]])), seed=0, budget=50)
    assert sol.count == 0


@pytest.mark.parametrize("m,count", [(4, 2), (5, 13)])
@pytest.mark.parametrize("seed", range(2))
def test_real_and_bounded(m, count, seed):
    arr = build_B(random_generic_config(3, m, seed=seed, num_bound=9, den_bound=3))
    sys_ = from_linear_model(arr)
    sol = solve_multistart(sys_, weights=random_weights(len(sys_), seed, real=True), seed=seed, budget=1000)
    assert sol.count == count and sol.saturated
    pts = real_points(sol)
    assert len(pts) == count
    signs = region_signs(arr, pts)
    assert sorted(signs) == sorted(bounded_sign_vectors(arr))


def test_weight_length_checked():
    with pytest.raises(ValueError):
        solve_multistart(pappus_system(), weights=[1, 2], budget=10)


def test_deterministic_for_seed():
    a = solve_multistart(from_config(2, 5), seed=4, budget=100)
    b = solve_multistart(from_config(2, 5), seed=4, budget=100)
    assert np.array_equal(a.as_arrays(), b.as_arrays())
