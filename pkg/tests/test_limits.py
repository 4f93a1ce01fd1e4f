import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from torickgk.limits import path_limit, richardson_table

S = 0.25 * 0.5 ** np.arange(10)


@settings(max_examples=60, deadline=None)
@given(a=st.floats(-10, 10), b=st.floats(-5, 5), c=st.floats(-5, 5))
def test_smooth_sequences_converge(a, b, c):
    est = path_limit(a + b * S + c * S**2)
    assert est.converged
    assert est.value == pytest.approx(a, abs=1e-9 + 1e-9 * abs(a))


def test_exact_polynomial_removed_by_table():
    v = 3.0 + 2.0 * S - S**2 + 0.5 * S**3
    assert richardson_table(v)[3][-1] == pytest.approx(3.0, abs=1e-13)


@pytest.mark.parametrize("values", [np.log(S), 1.0 / S, np.sqrt(S)], ids=["log", "pole", "sqrt"])
def test_non_smooth_sequences_rejected(values):
    assert not path_limit(values).converged


def test_short_or_nonfinite():
    assert not path_limit([1.0, 1.0, 1.0]).converged
    assert not path_limit([1.0, np.nan, 1.0, 1.0, 1.0]).converged


def test_sqrt_with_matching_ratio():
    # sqrt(s) sampled at s_0 r^k is smooth in sqrt(s), i.e. at ratio sqrt(r).
    est = path_limit(1.0 + np.sqrt(S), np.sqrt(0.5), max_level=6)
    assert est.converged and est.value == pytest.approx(1.0, abs=1e-8)
