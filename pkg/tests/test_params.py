import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from relay_rates.params import (
    FIG3,
    NegativeGain,
    NonPositivePower,
    SystemParams,
    UnstableGain,
    ZeroDelay,
    check_stable,
    db_to_linear,
    validate,
)


def test_fig3_params_accepted():
    p = SystemParams(0.2, 0.8, 0.8, 0.2, 0.1, 10.0, 100.0, 1.0, 1.0, 1)
    assert validate(p) is p


@pytest.mark.parametrize(
    "change, exc, field",
    [
        ({"power_mt": 0.0}, NonPositivePower, "power_mt"),
        ({"power_rt": -1.0}, NonPositivePower, "power_rt"),
        ({"var_w": 0.0}, NonPositivePower, "var_w"),
        ({"alpha": -0.1}, NegativeGain, "alpha"),
        ({"mu": -1e-9}, NegativeGain, "mu"),
        ({"lam": 0}, ZeroDelay, "lam"),
    ],
)
def test_validate_rejects(change, exc, field):
    with pytest.raises(exc) as info:
        validate(FIG3.replace(**change))
    assert info.value.field == field
    assert field in str(info.value)


def test_gains_above_one_allowed():
    validate(FIG3.replace(beta=1.7, gamma=2.5))


gains = st.floats(0, 5)
powers = st.floats(1e-3, 1e3)


@given(st.builds(SystemParams, gains, gains, gains, gains, gains,
                 powers, powers, powers, powers, st.integers(1, 10)))
def test_validate_idempotent(p):
    assert validate(validate(p)) == validate(p)


@pytest.mark.parametrize("db, lin", [(0, 1.0), (10, 10.0), (20, 100.0)])
def test_db_to_linear(db, lin):
    assert db_to_linear(db) == pytest.approx(lin, rel=1e-15)


@given(st.floats(-100, 100), st.floats(-100, 100))
def test_db_to_linear_is_a_homomorphism(a, b):
    assert db_to_linear(a + b) == pytest.approx(db_to_linear(a) * db_to_linear(b), rel=1e-12)


@given(st.floats(-100, 100), st.floats(1e-6, 10))
def test_db_to_linear_increasing(a, d):
    assert db_to_linear(a + d) > db_to_linear(a)


def test_stability_edge_is_unstable():
    p = FIG3.replace(mu=0.25)
    check_stable(p, math.nextafter(2.0, 0))
    with pytest.raises(UnstableGain):
        check_stable(p, 2.0)
    check_stable(p.replace(mu=0.0), 1e9)
