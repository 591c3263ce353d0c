import pytest

from fdrelay.lift import min_sinr, relay_power, zfc_residual, zfc_threshold
from fdrelay.maxmin import solve_maxmin
from fdrelay.oracle import CHUNK, brute_force

from conftest import instance


def test_validation():
    _, _, lp = instance()
    with pytest.raises(ValueError):
        brute_force(lp, 0)


def test_returned_point_is_feasible(mode):
    _, _, lp = instance(n=3, mode=mode, trial=2)
    r = brute_force(lp, 2000, seed=1)
    assert not r.all_discarded
    assert relay_power(r.w_bf, lp) == pytest.approx(lp.P_R, rel=1e-9)
    assert zfc_residual(r.w_bf, lp) <= zfc_threshold(r.w_bf, lp)


def test_prefix_monotone():
    _, _, lp = instance(n=2, trial=1)
    a = brute_force(lp, CHUNK + 100, seed=4)
    b = brute_force(lp, 3 * CHUNK, seed=4)
    assert b.j_bf >= a.j_bf


def test_never_above_relaxation(mode):
    for t in range(3):
        cfg, ch, lp = instance(n=2, mode=mode, trial=t)
        res = solve_maxmin(cfg, ch)
        r = brute_force(lp, 20000, seed=t)
        assert r.j_bf <= res.j_max + 1e-6
        if res.j_max > 0:
            assert r.j_bf >= 0.9 * res.j_max


def test_zero_rate_instance():
    _, _, lp = instance(n=2, trial=0)
    r = brute_force(lp, 500)
    assert r.j_bf <= 1e-6


def test_single_sample_deterministic():
    _, _, lp = instance(n=2, trial=1)
    a, b = brute_force(lp, 1, seed=3), brute_force(lp, 1, seed=3)
    assert a.j_bf == b.j_bf and a.samples_used == 1


def test_reported_value_recomputes():
    _, _, lp = instance(n=3, trial=1)
    r = brute_force(lp, 3000, seed=2)
    assert r.j_bf == pytest.approx(min_sinr(r.w_bf, lp), rel=1e-10)
