import random
from fractions import Fraction
from itertools import product

import networkx as nx
import pytest

from mldegen.arrangement import char_poly_of, regions
from mldegen.crosscheck import CHY6_POINTS, CHY6_W
from mldegen.matroid import Matroid, bergman_member, graphic
from mldegen.tropical import (LinearModel, TropicalDegeneracy, chy_model, corollary_points, flag_determinant,
                              flags_avoiding_infinity, perturb_w, random_linear_model, random_w, ray_graph,
                              trop_critical_points)


def complete_graph(k):
    return graphic(range(k), [(a, b) for a in range(k) for b in range(a + 1, k)])


def as_ints(points):
    return {tuple(int(x) for x in p) for p in points}


# -- matroid basics -------------------------------------------------------------

def test_circuit_counts():
    assert len(complete_graph(4).circuits()) == 7
    circ = complete_graph(5).circuits()
    assert sorted({len(c) for c in circ}) == [3, 4, 5]
    assert [sum(1 for c in circ if len(c) == s) for s in (3, 4, 5)] == [10, 15, 12]
    assert Matroid([[1, 0], [0, 1], [1, 1]]).circuits() == [frozenset({0, 1, 2})]


def test_loops_rejected():
    with pytest.raises(ValueError):
        Matroid([[1, 0], [0, 0]])


def test_bergman_membership():
    U23 = Matroid([[1, 0], [0, 1], [1, 1]])
    assert bergman_member(U23, [0, 0, 0])
    assert bergman_member(U23, [1, 0, 0])
    assert not bergman_member(U23, [2, 1, 0])
    with pytest.raises(ValueError):
        bergman_member(U23, [0, 0])


def test_worked_decomposition():
    model = chy_model(6)
    q = [7, 5, 2, 0, 0, 0, 5, 2, 2]
    rest = [5, 1, 7, 12, 5, 1, 5, 9, 1]
    assert [a + b for a, b in zip(q, rest)] == list(CHY6_W)
    assert bergman_member(model.matroid, q + [0])      # the special edge has weight 0
    assert bergman_member(model.perp_matroid, rest)


# -- enumeration --------------------------------------------------------------

def test_chy6_points():
    assert as_ints(trop_critical_points(chy_model(6), CHY6_W)) == CHY6_POINTS


def test_chy6_decomposition_law():
    model = chy_model(6)
    for q in trop_critical_points(model, CHY6_W):
        assert bergman_member(model.matroid, list(q) + [0])
        assert bergman_member(model.perp_matroid, [w - x for w, x in zip(CHY6_W, q)])


def test_translation_invariance():
    model = chy_model(6)
    shifted = [w + 17 for w in CHY6_W]
    assert as_ints(trop_critical_points(model, shifted)) == CHY6_POINTS


@pytest.mark.parametrize("m,count", [(5, 2), (6, 6)])
def test_chy_factorial_count(m, count):
    model = chy_model(m)
    for seed in range(3):
        w = random_w(model.n, seed=seed, bound=200)
        assert len(trop_critical_points(model, w)) == count


def test_chy5_petersen():
    G = ray_graph(chy_model(5).matroid)
    assert G.number_of_nodes() == 10
    assert nx.is_isomorphic(G, nx.petersen_graph())


def test_chy_errors():
    with pytest.raises(ValueError):
        chy_model(4)


def test_closed_form_examples():
    a, b, c = 3, 5, 9
    got = corollary_points(3, 2, [0, a, b, c])
    assert got == sorted([(0, a, b, 0), (0, a, 0, c), (0, 0, b, c)])
    assert corollary_points(4, 0, [3, 1, 4, 5, 9]) == [(0,) * 5]
    with pytest.raises(TropicalDegeneracy):
        corollary_points(3, 2, [0, 0, 1, 2])


def test_general_small_model_matches_three_vectors():
    model = random_linear_model(3, 2, seed=4, general=True)
    w = [0, 4, 7, 11]
    assert sorted(trop_critical_points(model, w)) == corollary_points(3, 2, w)


@pytest.mark.parametrize("seed", range(20))
def test_closed_form_vs_enumeration(seed):
    rng = random.Random(seed)
    n = rng.randint(3, 7)
    d = rng.randint(1, min(3, n - 1))
    model = random_linear_model(n, d, seed=seed, general=True)
    w = random_w(n, seed=seed, bound=1000)
    assert sorted(trop_critical_points(model, w)) == corollary_points(n, d, w)


@pytest.mark.parametrize("seed", range(10))
def test_count_law(seed):
    rng = random.Random(100 + seed)
    n = rng.randint(3, 7)
    d = rng.randint(1, min(3, n - 1))
    model = random_linear_model(n, d, seed=seed, bound=4)
    w = random_w(n, seed=seed, bound=1000)
    assert len(trop_critical_points(model, w)) == regions(char_poly_of(model.arrangement()))[1]


@pytest.mark.parametrize("seed", range(6))
def test_flag_determinants_exhaustive(seed):
    rng = random.Random(seed)
    n = rng.randint(3, 5)
    d = rng.randint(1, n - 1)
    model = random_linear_model(n, d, seed=seed, bound=4)
    flags = flags_avoiding_infinity(model)
    perp = model.perp_matroid.flags(n - d)
    vals = {flag_determinant(model, F, G) for F, G in product(flags, perp)}
    assert vals <= {-1, 0, 1} and vals & {-1, 1}


def test_flag_determinant_cases():
    model = random_linear_model(4, 2, seed=1, general=True)
    F = ({0}, {0, 1})
    assert abs(flag_determinant(model, F, ({2}, {2, 3}))) == 1
    assert flag_determinant(model, F, ({0}, {0, 1})) == 0
    with pytest.raises(ValueError):
        flag_determinant(model, ({0, 1},), ({2}, {2, 3}))
    with pytest.raises(ValueError):
        flag_determinant(model, ({0}, {1, 2}), ({2}, {2, 3}))


def test_non_generic_w_is_reported():
    model = chy_model(5)
    with pytest.raises(TropicalDegeneracy):
        trop_critical_points(model, [0, 0, 0, 0, 0])
    w = perturb_w([0, 0, 0, 0, 0], seed=1)
    assert len(trop_critical_points(model, w)) == 2


def test_w_length_checked():
    with pytest.raises(ValueError):
        trop_critical_points(chy_model(5), [1, 2])


def test_from_constraints_simplex():
    # X = {p : p0 - p1 = 0, sum p = 1} in R^3 has one tropical critical point
    model = LinearModel.from_constraints([[1, -1, 0]])
    assert model.n == 2 and model.d == 1
    pts = trop_critical_points(model, [Fraction(0), Fraction(3), Fraction(5)])
    assert len(pts) == 1
