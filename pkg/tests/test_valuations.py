import math
from fractions import Fraction

import pytest

from mldegen.arrangement import Arrangement
from mldegen.critical import from_config, from_linear_model, random_weights, solve_multistart
from mldegen.discriminantal import build_B, random_generic_config
from mldegen.tropical import random_linear_model, random_w, trop_critical_points
from mldegen.valuations import (MIN_SAMPLES, ParametricWeights, PathSample, convergent, default_schedule,
                                fit_valuations, learn, schedule_to, track)


def synthetic(f, schedule=None):
    ts = default_schedule() if schedule is None else schedule
    return PathSample(list(ts), [[0j] for _ in ts], [[math.log(abs(f(t)))] for t in ts])


# -- rounding and regression -------------------------------------------------

def test_convergent_rule():
    assert convergent(1.9987, 32) == 2
    assert convergent(0.5, 2) == Fraction(1, 2)
    assert convergent(math.pi, 7) == Fraction(22, 7)
    assert convergent(math.pi, 6) == 3
    assert convergent(-0.3334, 32) == Fraction(-1, 3)
    with pytest.raises(ValueError):
        convergent(float("nan"), 8)


def test_schedules():
    s = default_schedule()
    assert len(s) == 25 and s[0] == 0.1 and abs(s[1] / s[0] - 0.8) < 1e-15
    assert schedule_to(1e-6)[-1] >= 1e-6 > schedule_to(1e-6)[-1] * 0.8
    assert len(schedule_to(0.09)) == MIN_SAMPLES


def test_exact_monomial():
    res = fit_valuations(synthetic(lambda t: 3 * t ** 2))
    assert res.q == (2,) and not res.untrusted
    assert abs(res.intercepts[0] - math.log(3)) < 1e-9
    assert res.rho < 1e-20


def test_half_power_with_correction():
    res = fit_valuations(synthetic(lambda t: t ** 0.5 * (1 + t)), denom_cap=2)
    assert res.q == (Fraction(1, 2),)


@pytest.mark.parametrize("p,q", [(1, 3), (-5, 4), (7, 2), (0, 1)])
def test_recovery_for_any_cap_above_denominator(p, q):
    for cap in (q, q + 1, 32):
        res = fit_valuations(synthetic(lambda t: 2.5 * t ** (p / q)), denom_cap=cap)
        assert res.q == (Fraction(p, q),)


def test_untrusted_is_flagged_not_dropped():
    res = fit_valuations(synthetic(lambda t: t ** 0.41), denom_cap=2)
    assert res.untrusted and res.reasons and res.q == (Fraction(1, 2),)


def test_fit_preconditions():
    with pytest.raises(ValueError):
        fit_valuations(synthetic(lambda t: t, default_schedule(5)))
    with pytest.raises(ValueError):
        fit_valuations(synthetic(lambda t: t), denom_cap=0)


def test_weights_validation():
    with pytest.raises(ValueError):
        ParametricWeights([1, 2], [0])
    with pytest.raises(ValueError):
        ParametricWeights([1, 0], [0, 1])
    u, du = ParametricWeights([2, 3], ["1/2", 0]).at(math.log(0.25))
    assert abs(complex(u[0]) - 1) < 1e-15 and abs(complex(du[0]) - 0.5) < 1e-15


# -- tracking ---------------------------------------------------------------

def b34():
    arr = build_B(random_generic_config(3, 4, seed=0, num_bound=9, den_bound=3))
    return arr, from_linear_model(arr)


def test_constant_weights_give_zero_slopes():
    _, sys_ = b34()
    c = random_weights(len(sys_), 1)
    starts = solve_multistart(sys_, weights=c, seed=1, budget=200).points
    res = learn(sys_, ParametricWeights(list(c), [0] * len(sys_)), starts)
    assert [(cl.q, cl.multiplicity) for cl in res.clusters] == [((0,) * len(sys_), 2)]
    sample = track(sys_, ParametricWeights(list(c), [0] * len(sys_)), starts[0], default_schedule(10))
    first = sample.points[0]
    assert all(max(abs(a - b) for a, b in zip(p, first)) < 1e-12 for p in sample.points)


def test_one_marked_form():
    _, sys_ = b34()
    c = random_weights(len(sys_), 2)
    w = [0] * (len(sys_) - 1) + [1]
    starts = solve_multistart(sys_, weights=c, seed=2, budget=200).points
    res = learn(sys_, ParametricWeights(list(c), w), starts, schedule=schedule_to(1e-4))
    assert sum(cl.multiplicity for cl in res.clusters) + res.failed == len(starts) == 2
    assert res.failed == 0


def test_track_rejects_bad_input():
    _, sys_ = b34()
    weights = ParametricWeights([1.0] * len(sys_), [0] * len(sys_))
    with pytest.raises(ValueError):
        track(sys_, weights, [0.3, 0.4], [0.1, 0.2])
    with pytest.raises(ValueError):
        track(sys_, weights, [0.123, 0.456], default_schedule(10))


def test_schedule_robustness():
    model = random_linear_model(4, 2, seed=1, bound=4)
    sys_ = from_linear_model(model)
    w = random_w(model.n, seed=1, bound=8)
    c = random_weights(len(sys_), 1)
    start = solve_multistart(sys_, weights=c, seed=1, budget=200).points[0]
    pw = ParametricWeights(list(c), w)
    a = fit_valuations(track(sys_, pw, start, schedule_to(1e-5)))
    b = fit_valuations(track(sys_, pw, start, schedule_to(5e-6)))
    assert a.q == b.q


def test_learned_points_match_enumeration():
    model = random_linear_model(4, 2, seed=2, bound=4)
    w = random_w(model.n, seed=2, bound=8)
    sys_ = from_linear_model(model)
    c = random_weights(len(sys_), 2)
    starts = solve_multistart(sys_, weights=c, seed=2, budget=300).points
    res = learn(sys_, ParametricWeights(list(c), w), starts, schedule=schedule_to(1e-6))
    assert sorted(cl.q for cl in res.clusters) == sorted(tuple(p) for p in trop_critical_points(model, w))
    assert all(cl.multiplicity == 1 for cl in res.clusters)
    assert max(cl.max_rho for cl in res.clusters) < 0.2


def test_soft_limit_x36():
    sys_ = from_config(3, 6)
    c = random_weights(len(sys_), 7)
    w = [1 if "6" in lab else 0 for lab in sys_.labels]
    sol = solve_multistart(sys_, weights=c, seed=7, budget=800)
    assert sol.count == 26
    res = learn(sys_, ParametricWeights(list(c), w), sol.points, schedule=schedule_to(1e-7, t0=1e-2))
    assert res.failed == 0
    top = res.clusters[0]
    assert top.q == (0,) * len(sys_) and top.multiplicity == 26
    assert top.max_rho < 0.2
