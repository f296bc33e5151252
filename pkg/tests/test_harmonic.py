# -*- coding: utf-8 -*-
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from harmonic import (FrequencyGrid, GridValidationError, ParameterTrajectory, REGRESSOR_NORM_TOL,
                      TrajectoryValidationError, constant_trajectory, eval_regressor,
                      regressor_norm_error, spaced_grid, step_change, synthesize_signal)


def test_regressor_at_zero_and_one():
    grid = FrequencyGrid(frequencies=(math.pi / 2,))
    np.testing.assert_allclose(eval_regressor(grid, 0), [1.0, 0.0], atol=1e-15)
    np.testing.assert_allclose(eval_regressor(grid, 1), [0.0, 1.0], atol=1e-15)


def test_regressor_layout_and_read_only():
    grid = FrequencyGrid(frequencies=(0.3, 1.1))
    phi = eval_regressor(grid, 5)
    assert phi[0] == pytest.approx(math.cos(1.5))
    assert phi[1] == pytest.approx(math.sin(1.5))
    assert phi[2] == pytest.approx(math.cos(5.5))
    assert phi[3] == pytest.approx(math.sin(5.5))
    with pytest.raises(ValueError):
        phi[0] = 2.0


def test_regressor_norm_three_frequencies():
    grid = FrequencyGrid(frequencies=(0.1, 0.2, 0.3))
    for k in (0, 1, 7, 1000):
        phi = eval_regressor(grid, k)
        assert float(phi @ phi) == pytest.approx(3.0, abs=1e-12)


def test_negative_step_rejected():
    with pytest.raises(ValueError):
        eval_regressor(FrequencyGrid(frequencies=(1.0,)), -1)


@pytest.mark.parametrize("freqs", [(), (0.0,), (math.pi,), (-0.5,), (1.0, 1.0), (float('nan'),)])
def test_invalid_grid(freqs):
    with pytest.raises(GridValidationError):
        FrequencyGrid(frequencies=freqs)


def test_regressor_norm_constant_on_seeded_grids():
    rng = np.random.default_rng(2024)
    for _ in range(100):
        count = int(rng.integers(1, 9))
        grid = FrequencyGrid(frequencies=tuple(rng.uniform(0.01, math.pi - 0.01, size=count)))
        for k in range(100):
            assert regressor_norm_error(eval_regressor(grid, k)) <= REGRESSOR_NORM_TOL


@settings(max_examples=200, deadline=None)
@given(st.lists(st.floats(min_value=1e-3, max_value=math.pi - 1e-3), min_size=1, max_size=8, unique=True),
       st.integers(min_value=0, max_value=10**6))
def test_regressor_norm_property(freqs, k):
    phi = eval_regressor(FrequencyGrid(frequencies=tuple(freqs)), k)
    assert abs(float(phi @ phi) - len(freqs)) <= 1e-12 * max(1, len(freqs))


def test_synthesize_noise_free_values():
    grid = FrequencyGrid(frequencies=(math.pi / 2,))
    samples = synthesize_signal(grid, constant_trajectory([1.0, 0.0]), 2)
    assert [s.k for s in samples] == [1, 2]
    assert samples[0].y == pytest.approx(0.0, abs=1e-15)
    assert samples[1].y == pytest.approx(-1.0, abs=1e-15)


def test_synthesize_deterministic(grid2):
    traj = constant_trajectory([1.0, 2.0, 3.0, 4.0])
    a = synthesize_signal(grid2, traj, 50, noise_std=0.1, seed=3)
    b = synthesize_signal(grid2, traj, 50, noise_std=0.1, seed=3)
    c = synthesize_signal(grid2, traj, 50, noise_std=0.1, seed=4)
    assert [s.y for s in a] == [s.y for s in b]
    assert [s.y for s in a] != [s.y for s in c]
    for sa, sb in zip(a, b):
        assert np.array_equal(sa.phi, sb.phi)


def test_synthesize_rejects_bad_arguments(grid2):
    traj = constant_trajectory([1.0, 2.0, 3.0, 4.0])
    with pytest.raises(ValueError):
        synthesize_signal(grid2, traj, 0)
    with pytest.raises(ValueError):
        synthesize_signal(grid2, traj, 10, noise_std=-1.0)
    with pytest.raises(TrajectoryValidationError):
        synthesize_signal(grid2, constant_trajectory([1.0, 2.0]), 10)


def test_step_change_trajectory():
    traj = step_change([1.0, 0.0], [0.0, 1.0], 10)
    assert traj.change_steps == [10]
    np.testing.assert_array_equal(traj.theta_at(9), [1.0, 0.0])
    np.testing.assert_array_equal(traj.theta_at(10), [0.0, 1.0])
    np.testing.assert_array_equal(traj.theta_at(500), [0.0, 1.0])


@pytest.mark.parametrize("segments", [
    ((2, (1.0, 0.0)),),
    ((1, (1.0, 0.0)), (1, (0.0, 1.0))),
    ((1, (1.0, 0.0, 2.0)),),
    ((1, (1.0, 0.0)), (5, (0.0, 1.0, 2.0, 3.0))),
])
def test_invalid_trajectory(segments):
    with pytest.raises(TrajectoryValidationError):
        ParameterTrajectory(segments=segments)


def test_spaced_grid_is_valid():
    for count in range(1, 9):
        grid = spaced_grid(count, np.random.default_rng(count))
        assert grid.count == count
        assert all(0.0 < q < math.pi for q in grid.frequencies)
    assert spaced_grid(2).frequencies == pytest.approx((math.pi / 4, 3 * math.pi / 4))
