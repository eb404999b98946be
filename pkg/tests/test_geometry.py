import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from s3kepler.geometry import (
    SystemParams,
    chart_radius,
    conformal_factor,
    polar_angle,
    stereographic_embed,
)

coords = st.floats(-10, 10, allow_nan=False)
lams = st.floats(0.1, 5.0)


def test_embed_examples():
    np.testing.assert_array_equal(stereographic_embed([0, 0, 0]), [0, 0, 0, -1])
    np.testing.assert_allclose(stereographic_embed([1, 0, 0]), [1, 0, 0, 0], atol=1e-15)
    assert abs(stereographic_embed([1e6, 0, 0])[3] - 1.0) < 1e-11


def test_polar_angle_examples():
    p = SystemParams(lam=1.7)
    assert polar_angle([0, 0, 0], p) == 0.0
    assert polar_angle([0, 1.7, 0], p) == pytest.approx(np.pi / 2, abs=1e-15)
    assert polar_angle([1.7 * np.tan(0.5), 0, 0], p) == pytest.approx(1.0, abs=1e-12)
    assert chart_radius(1.0, p) == pytest.approx(1.7 * np.tan(0.5))


def test_conformal_factor_examples():
    assert conformal_factor([0, 0, 0]) == 1.0
    assert conformal_factor([1, 0, 0]) == 0.25
    assert conformal_factor([1, 1, 1], SystemParams(lam=2.0)) == pytest.approx(1 / 49, rel=1e-15)


def test_unit_norm_on_random_points(rng):
    for x in rng.uniform(-10, 10, size=(1000, 3)):
        assert abs(np.linalg.norm(stereographic_embed(x)) - 1.0) < 1e-12


@settings(max_examples=200, deadline=None)
@given(st.tuples(coords, coords, coords), lams)
def test_polar_angle_matches_embedding(x, lam):
    p = SystemParams(lam=lam)
    X = stereographic_embed(x, p)
    assert abs(X[3] + np.cos(polar_angle(x, p))) < 1e-12
    assert abs(np.linalg.norm(X) - 1.0) < 1e-12


def test_polar_angle_monotone():
    r = np.linspace(0, 50, 500)
    chi = [polar_angle([v, 0, 0]) for v in r]
    assert np.all(np.diff(chi) > 0)


@pytest.mark.parametrize("kwargs", [{"m": 0.0}, {"lam": -1.0}])
def test_params_validation(kwargs):
    with pytest.raises(ValueError):
        SystemParams(**kwargs)
