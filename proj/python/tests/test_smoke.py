import math

import pytest

import treeosc


def test_small_costs():
    assert treeosc.mean_cost(2) == pytest.approx(5.0, rel=1e-14)
    assert treeosc.solve_recurrence_exact(3)[3] == ("23", "3")
    assert treeosc.solve_recurrence(10)[10] == pytest.approx(2041284323 / 73287255, rel=1e-13)


def test_methods_agree():
    for method in ("series", "integral", "recurrence"):
        assert treeosc.mean_cost(500, method) == pytest.approx(treeosc.mean_cost(500, "series"), rel=1e-10)
    with pytest.raises(ValueError):
        treeosc.mean_cost(10, "mellin")


def test_periodic_function():
    assert treeosc.periodic_f_mean() == pytest.approx(2 / math.log(2))
    assert treeosc.periodic_f(1.25) == treeosc.periodic_f(0.25)
    assert treeosc.dyadic_sum("u_exp", 10.0) == pytest.approx(treeosc.dyadic_sum_representation("u_exp", 10.0), abs=1e-9)


def test_backoff():
    first, probs = treeosc.chain_distribution(0.5, 1)
    assert first == 1
    assert probs == [0.5, 0.5]
    fence = treeosc.h_fence(0.5)
    assert treeosc.h_density(0.5, 1.0) == pytest.approx(0.42073042153167206911, rel=1e-8)
    with pytest.raises(treeosc.PrecisionLoss):
        treeosc.h_density(0.5, fence / 2)
    assert treeosc.h_survival(0.5, 0.0) == pytest.approx(1.0)


def test_monte_carlo_is_reproducible():
    a = treeosc.estimate_mean_cost(3, 1000, seed=5)
    b = treeosc.estimate_mean_cost(3, 1000, seed=5)
    assert a == b
    assert abs(a["mean"] - 23 / 3) < 5 * a["stderr"]
