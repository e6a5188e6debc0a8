import math

import numpy as np
import pytest

from sector_count.counting import (CATALAN, BudgetError, GroupConfig, automorphic_sum, ball_count, ball_elements,
                                   count_sector, count_sweep, oracle_count, picard_config, sector_orbit)
from sector_count.gaussian import GaussInt, complete_row
from sector_count.geometry import Point, moebius_act, pp_invariant, sec_v
from sector_count.transforms import Indicator, SmoothingProfile, smoothing_pair

NON_GENERIC = [Point(0, 0, 1), Point(0.5, 0.5, math.sqrt(0.5)), Point(0.3, 0, 1.1), Point(0.5, 0, 1.2)]


def test_catalan_constant():
    import mpmath
    assert CATALAN == pytest.approx(float(mpmath.catalan), rel=1e-15)
    cfg = picard_config()
    assert cfg.ratio == pytest.approx(math.pi / (2 * float(mpmath.catalan)), rel=1e-14)


def test_group_config_validation():
    with pytest.raises(ValueError):
        GroupConfig(covolume=0, area_HP=1)
    with pytest.raises(ValueError):
        GroupConfig(covolume=1, area_HP=1, exceptional=((2.5, 1.0),))
    cfg = GroupConfig(covolume=1, area_HP=2, exceptional=((1.5, 3.0),))
    assert cfg.main_term(4.0) == pytest.approx(2 * 16 + 3 * 2 ** 0.5 / 1.5 * 8)


def test_count_result_invariants(generic_point):
    r = count_sector(generic_point, 10.0)
    assert r.n == r.cosets_kept >= 0
    assert r.err == r.n - r.main
    assert r.bound_B == pytest.approx(2 * 10 * 1.3 / math.sqrt(3))


def test_oracle_example(generic_point):
    res = oracle_count(generic_point, 2.0, 5)
    assert res.stable
    assert count_sector(generic_point, 2.0).n == res.count == 7


def test_oracle_monotone_in_depth(generic_point):
    counts = [oracle_count(generic_point, 2.5, d).count for d in range(1, 7)]
    assert counts == sorted(counts)


@pytest.mark.parametrize("p", NON_GENERIC)
def test_non_generic_points_match_oracle(p):
    for X in (1.0, 1.7, 2.6):
        assert count_sector(p, X).n == oracle_count(p, X, 10).count


def test_points_on_plane_count_identity_coset():
    p = Point(0.3, 0.0, 1.1)
    orb = sector_orbit(p, 1.0)
    assert orb.count(1.0) >= 1
    assert np.all(orb.secs == pytest.approx(1.0))


def test_reduced_and_full_modes_agree(rng):
    for _ in range(5):
        p = Point(*rng.uniform(-0.5, 0.5, 2), rng.uniform(0.6, 1.5))
        X = rng.uniform(5, 30)
        a, b = sector_orbit(p, X), sector_orbit(p, X, mode="full")
        assert b.hits > a.hits
        assert len(a.secs) == len(b.secs)
        assert np.allclose(a.secs, b.secs, rtol=1e-12, atol=0)


def test_monotone_and_right_continuous(generic_point):
    orb = sector_orbit(generic_point, 40.0)
    Xs = np.linspace(1, 40, 200)
    counts = [orb.count(X) for X in Xs]
    assert counts == sorted(counts)
    s = orb.secs[10]
    assert orb.count(s) == orb.count(np.nextafter(s, 0)) + 1


def test_thread_count_does_not_change_result(generic_point):
    a = sector_orbit(generic_point, 60.0, threads=1)
    b = sector_orbit(generic_point, 60.0, threads=3)
    assert np.array_equal(a.secs, b.secs)


def test_orbit_secs_are_real_sec_values(generic_point):
    orb = sector_orbit(generic_point, 15.0)
    for row, s in zip(orb.reps[:50], orb.secs[:50]):
        g = complete_row(GaussInt(int(row[4]), int(row[5])), GaussInt(int(row[6]), int(row[7])))
        g = type(g)(GaussInt(int(row[0]), int(row[1])), GaussInt(int(row[2]), int(row[3])), g.c, g.d)
        assert sec_v(moebius_act(g, generic_point)) == pytest.approx(s, rel=1e-12)


def test_sweep_matches_single_counts(generic_point):
    Xs = [3.0, 7.5, 12.0]
    assert [r.n for r in count_sweep(generic_point, Xs)] == [count_sector(generic_point, X).n for X in Xs]


def test_budget_overflow_reports_bound(generic_point):
    with pytest.raises(BudgetError, match="B="):
        count_sector(generic_point, 50.0, max_candidates=100)


def test_x_below_one_rejected(generic_point):
    with pytest.raises(ValueError):
        count_sector(generic_point, 0.5)


def test_indicator_sum_reproduces_count(generic_point):
    for X in (2.0, 9.0, 33.0):
        assert automorphic_sum(generic_point, Indicator.from_X(X)) == count_sector(generic_point, X).n


def test_sandwich_small(rng):
    for _ in range(10):
        p = Point(*rng.uniform(-0.5, 0.5, 2), rng.uniform(0.7, 1.4))
        X = rng.uniform(2, 30)
        lo, hi = smoothing_pair(X, X ** -0.5)
        n = count_sector(p, X).n
        assert automorphic_sum(p, lo) <= n <= automorphic_sum(p, hi)


def test_zero_support_profile(generic_point):
    f = SmoothingProfile(0.1, 0.3, "minus")
    assert automorphic_sum(generic_point, f) == 0.0


def test_ball_trivial_radius(generic_point):
    assert ball_count(generic_point, generic_point, 1.0) == 1


def test_ball_elements_satisfy_inequality(generic_point):
    q = Point(0.3, -0.1, 0.8)
    mats = ball_elements(generic_point, q, 6.0)
    for row in mats:
        g = complete_row(GaussInt(int(row[4]), int(row[5])), GaussInt(int(row[6]), int(row[7])))
        g = type(g)(GaussInt(int(row[0]), int(row[1])), GaussInt(int(row[2]), int(row[3])), g.c, g.d)
        assert pp_invariant(generic_point, moebius_act(g, q)) <= 6.0 + 1e-9


def test_ball_count_orbit_invariant(generic_point):
    g = complete_row(GaussInt(1, 1), GaussInt(2, -1))
    q = Point(0.3, -0.1, 0.8)
    gp = moebius_act(g, generic_point)
    assert ball_count(gp, q, 12.0) == ball_count(generic_point, q, 12.0)


def test_ball_count_brute_force(generic_point):
    from sector_count.counting import _act_arrays, _small_matrices
    q = Point(0.3, -0.1, 0.8)
    M = _small_matrices(10)
    x1, x2, y = _act_arrays(M, q)
    delta = ((x1 - generic_point.x1) ** 2 + (x2 - generic_point.x2) ** 2 + y ** 2 + generic_point.y ** 2) / (
        2 * y * generic_point.y)
    assert ball_count(generic_point, q, 2.5) == int(np.sum(delta <= 2.5))


def test_ball_growth_matches_volume(generic_point):
    # hyperbolic ball volume ~ 2 pi x^2, divided by the covolume
    ratio = ball_count(generic_point, generic_point, 60.0) / 60.0 ** 2
    assert ratio == pytest.approx(2 * math.pi / picard_config().covolume, rel=0.03)
