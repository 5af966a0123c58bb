import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from fogsched.utility import utility, utility_prime, utility_prime_inverse


def bisect_inverse_derivative(kind, y, alpha=0.5, hi=1e9):
    """Solve U'(x) = y for x >= 0 by bisection on the decreasing U'."""
    if utility_prime(kind, 0.0, alpha) <= y:
        return 0.0
    lo = 0.0
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if utility_prime(kind, mid, alpha) > y:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def test_log_utility_at_zero():
    assert utility("log1p", 0.0) == 0.0


def test_inverse_derivative_half():
    oracle = bisect_inverse_derivative("log1p", 0.5)
    assert oracle == pytest.approx(1.0, rel=1e-12)
    assert utility_prime_inverse("log1p", 0.5) == pytest.approx(oracle, rel=1e-12)


@pytest.mark.parametrize("y", [1.0, 1.5, 10.0])
def test_inverse_clamps_at_zero(y):
    assert utility_prime_inverse("log1p", y) == 0.0


def test_inverse_at_zero_is_unbounded():
    assert utility_prime_inverse("log1p", 0.0) == math.inf


@pytest.mark.parametrize("bad", [math.nan, math.inf, -1.0])
def test_inverse_rejects_bad_input(bad):
    with pytest.raises(ValueError):
        utility_prime_inverse("log1p", bad)


def test_utility_rejects_negative():
    with pytest.raises(ValueError):
        utility("log1p", -1.0)


@pytest.mark.parametrize("kind,alpha", [("log1p", 0.5), ("alpha_fair", 0.3), ("alpha_fair", 0.8)])
def test_increasing_and_concave_on_grid(kind, alpha):
    x = np.linspace(0.0, 4000.0, 4001)
    u = utility(kind, x, alpha)
    assert np.all(np.diff(u) > 0)
    second = u[2:] - 2 * u[1:-1] + u[:-2]
    assert np.all(second <= 1e-12)


@pytest.mark.parametrize("kind,alpha", [("log1p", 0.5), ("alpha_fair", 0.4)])
@given(x=st.floats(min_value=1e-3, max_value=4000.0))
def test_inverse_composed_with_derivative_is_identity(kind, alpha, x):
    y = utility_prime(kind, x, alpha)
    assert utility_prime_inverse(kind, y, alpha) == pytest.approx(x, rel=1e-9)


def test_alpha_fair_matches_bisection():
    for y in (0.01, 0.2, 3.0):
        assert utility_prime_inverse("alpha_fair", y, 0.4) == pytest.approx(
            bisect_inverse_derivative("alpha_fair", y, 0.4), rel=1e-9
        )


def test_unknown_kind():
    with pytest.raises(ValueError):
        utility("sqrt", 1.0)
