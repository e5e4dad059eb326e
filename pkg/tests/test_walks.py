import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.stats import chi2

from walktrace import (CapacityError, ParameterError, generate_walk,
                       sample_killing_time, sample_killing_times)


def test_zero_steps_is_single_point_at_origin():
    w = generate_walk(4, 0, seed=123)
    assert w.points.shape == (1, 4)
    assert not w.points.any()
    assert w.n_steps == 0


def test_walk_length_and_start():
    w = generate_walk(4, 50, seed=9)
    assert len(w) == 51
    assert not w.points[0].any()


def test_steps_are_unit_nearest_neighbor():
    w = generate_walk(4, 5000, seed=2)
    diffs = np.diff(w.points, axis=0)
    assert (np.abs(diffs).sum(axis=1) == 1).all()


def test_determinism_and_seed_sensitivity():
    a = generate_walk(4, 1000, seed=77)
    b = generate_walk(4, 1000, seed=77)
    c = generate_walk(4, 1000, seed=78)
    assert np.array_equal(a.points, b.points)
    assert not np.array_equal(a.points, c.points)


def test_direction_frequencies_chi_square():
    # chi-square against uniform over the 8 directions at significance 1e-6
    w = generate_walk(4, 10**6, seed=1)
    diffs = np.diff(w.points, axis=0)
    axis = np.abs(diffs).argmax(axis=1)
    sign = diffs[np.arange(diffs.shape[0]), axis]
    direction = 2 * axis + (sign < 0)
    observed = np.bincount(direction, minlength=8)
    expected = 10**6 / 8.0
    stat = ((observed - expected) ** 2 / expected).sum()
    assert stat < chi2.ppf(1 - 1e-6, df=7)


def test_one_dimensional_parity():
    for seed in range(20):
        for n in (2, 7, 16):
            w = generate_walk(1, n, seed=seed)
            assert (int(w.points[-1, 0]) - n) % 2 == 0


def test_one_dimensional_up_down_returns_to_origin():
    # find a seed whose two steps are +1, -1; the walk must be back at 0
    for seed in range(5000):
        w = generate_walk(1, 2, seed=seed)
        if w.points[1, 0] == 1 and w.points[2, 0] == 0:
            break
    else:
        pytest.fail("no +1,-1 seed found in range")
    assert w.points[2, 0] == 0


@given(st.integers(1, 4), st.integers(0, 64), st.integers(0, 2**63 - 1))
@settings(max_examples=40, deadline=None)
def test_walk_properties(d, n, seed):
    w = generate_walk(d, n, seed)
    assert w.points.shape == (n + 1, d)
    if n:
        diffs = np.diff(w.points, axis=0)
        assert (np.abs(diffs).sum(axis=1) == 1).all()


def test_mean_square_displacement():
    # E|S(n)|^2 = n exactly; the Monte Carlo mean over 1000 seeds stays within 20%
    n = 10**4
    vals = []
    for seed in range(1000):
        w = generate_walk(4, n, seed=seed)
        vals.append(float((w.points[-1].astype(np.int64) ** 2).sum()) / n)
    mean = np.mean(vals)
    assert 0.8 < mean < 1.2


def test_capacity_budget():
    with pytest.raises(CapacityError):
        generate_walk(4, 1001, seed=0, max_steps=1000)


def test_parameter_validation():
    with pytest.raises(ParameterError):
        generate_walk(0, 10, seed=0)
    with pytest.raises(ParameterError):
        generate_walk(4, -1, seed=0)


def test_killing_immediate_at_lambda_zero():
    for seed in range(10):
        assert sample_killing_time(0.0, seed).value == 0


def test_killing_mean_matches_geometric():
    # closed-form mean lam/(1-lam) = 1 at lam = 0.5
    t = sample_killing_times(0.5, seed=5, size=10**6)
    mean = t.mean()
    stderr = t.std(ddof=1) / np.sqrt(t.size)
    assert abs(mean - 1.0) <= 3 * stderr


def test_killing_mass_at_zero():
    # P(T = 0) = 1 - lam = 0.01 at lam = 0.99
    t = sample_killing_times(0.99, seed=6, size=10**6)
    p0 = (t == 0).mean()
    stderr = np.sqrt(p0 * (1 - p0) / t.size)
    assert abs(p0 - 0.01) <= 3 * stderr


def test_killing_rejects_bad_lambda():
    with pytest.raises(ParameterError):
        sample_killing_time(1.0, seed=0)
    with pytest.raises(ParameterError):
        sample_killing_time(-0.1, seed=0)
