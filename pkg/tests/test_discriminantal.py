from fractions import Fraction

import pytest

from mldegen.arrangement import char_poly_of, regions
from mldegen.crosscheck import BOUNDED_B, decone_identities
from mldegen.discriminantal import (DegenerateConfig, build_A, build_B, build_Btilde, degenerate_config,
                                    hyperplane_normals, parse_degenerate, random_generic_config,
                                    soft_poly_eval, template)


def bounded(k, m, seed=0):
    return regions(char_poly_of(build_B(random_generic_config(k, m, seed=seed))))[1]


def test_template_shape():
    cfg = template(3, 6, [[2, 3], [5, 7]])
    assert [cfg.column(j) for j in range(4)] == [[0, 0, -1], [0, 1, 0], [-1, 0, 0], [1, 1, 1]]
    assert cfg.column(4) == [1, 2, 5]
    assert cfg.unknowns == ((2, 3), (5, 7))
    with pytest.raises(ValueError):
        template(3, 6, [[1], [2]])


def test_normals_k2_are_columns():
    cfg = random_generic_config(2, 3, seed=1)
    normals = hyperplane_normals(cfg)
    assert len(normals) == 3
    for (i,), n, zero in normals:
        col = cfg.column(i - 1)
        # 1x1 minors: the normal is the column turned by a right angle
        assert n[0] * col[0] + n[1] * col[1] == 0 and not zero


def test_six_lines_for_four_points():
    assert len(build_Btilde(random_generic_config(3, 4, seed=5))) == 6


def test_collinear_points_merge_lines():
    cfg = template(3, 5, [[1], [1]])      # last point on the line through points 2 and 4
    assert not cfg.generic
    with pytest.raises(DegenerateConfig):
        build_Btilde(cfg)
    arr = build_Btilde(cfg, generic=False)
    assert len(arr) < 10


@pytest.mark.parametrize("m", range(3, 9))
def test_k2_points_on_a_line(m):
    arr = build_B(random_generic_config(2, m, seed=m))
    assert arr.dim == 1 and len(arr) == m - 1
    assert regions(char_poly_of(arr))[1] == m - 2


@pytest.mark.parametrize("km", sorted(BOUNDED_B))
def test_bounded_region_counts(km):
    assert bounded(*km) == BOUNDED_B[km]


@pytest.mark.parametrize("k,m", [(3, 5), (3, 6), (4, 6)])
def test_seed_independence(k, m):
    assert {bounded(k, m, s) for s in range(10)} == {BOUNDED_B[(k, m)]}


@pytest.mark.parametrize("k,m", [(3, 7), (4, 8)])
def test_soft_polynomial_index_shift(k, m):
    assert soft_poly_eval(k, m) == BOUNDED_B[(k, m - 1)]


def test_soft_polynomial_more_values():
    assert soft_poly_eval(3, 10) == 372
    assert soft_poly_eval(3, 10) == bounded(3, 9)
    for (k, m), v in BOUNDED_B.items():
        if k in (3, 4):
            assert soft_poly_eval(k, m + 1) == v
    with pytest.raises(ValueError):
        soft_poly_eval(5, 8)
    with pytest.raises(ValueError):
        soft_poly_eval(3, 3)


def test_soft_denominators():
    assert soft_poly_eval(3, 5) * 8 == (5 - 4) * (125 - 150 + 55 - 14)
    assert isinstance(soft_poly_eval(4, 9), Fraction)


def test_degree_of_bounded_count_in_m():
    # degree (k-1)^2 = 4 in m, so fifth differences vanish
    vals = [bounded(3, m) for m in range(4, 10)]
    diffs = vals
    for _ in range(5):
        diffs = [b - a for a, b in zip(diffs, diffs[1:])]
    assert diffs == [0]


def test_concurrent_pairs_fiber():
    cfg = degenerate_config(3, 6, "12,34,56", seed=3)
    assert cfg.generic          # all minors nonzero; only a 3-point line is added
    arr = build_B(cfg, generic=False)
    assert regions(char_poly_of(arr))[1] == 41


def test_parse_degenerate():
    assert parse_degenerate("12,34,56", 3) == [[(1, 2), (3, 4), (5, 6)]]
    assert parse_degenerate("1-2,3-4,5-6", 3) == [[(1, 2), (3, 4), (5, 6)]]
    for bad in ("", "12,34", "11,34,56", "123,45,67"):
        with pytest.raises(ValueError):
            parse_degenerate(bad, 3)


@pytest.mark.parametrize("km", sorted(BOUNDED_B))
def test_decone_end_to_end(km):
    cfg = random_generic_config(*km, seed=0)
    affine, restriction, ident, cor = decone_identities(build_Btilde(cfg))
    assert affine == char_poly_of(build_B(cfg))
    assert restriction == char_poly_of(build_A(cfg))
    assert ident and cor


def test_random_config_deterministic():
    assert random_generic_config(4, 7, seed=11) == random_generic_config(4, 7, seed=11)
    assert random_generic_config(4, 7, seed=11).generic


@pytest.mark.slow
@pytest.mark.parametrize("km,want", [((4, 8), 10644), ((5, 8), 204117)])
def test_bounded_region_counts_stretch(km, want):
    assert bounded(*km) == want
