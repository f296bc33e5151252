# -*- coding: utf-8 -*-
import math

import numpy as np
import pytest

from harmonic import FrequencyGrid, constant_trajectory, synthesize_signal
from numerics import SingularError
from oracle import (batch_gain, full_history_gain, full_history_information, mismatch_report,
                    orthogonality_report)
from window import SampleWindow, UpdatePair, direct_information_matrix
from tests.conftest import make_sample


def _full_window(samples, w):
    window = SampleWindow(w)
    for s in samples[-w:]:
        window.push(s)
    return window


def test_batch_gain_identity_window():
    window = _full_window([make_sample(1, [1.0, 0.0], 0.0), make_sample(2, [0.0, 1.0], 0.0)], 2)
    np.testing.assert_allclose(batch_gain(window, 1.0), np.eye(2))
    np.testing.assert_allclose(batch_gain(window, 0.5), np.diag([2.0, 1.0]))


def test_batch_gain_three_frequencies(grid3):
    samples = synthesize_signal(grid3, constant_trajectory([0.0] * 6), 30)
    window = _full_window(samples, 12)
    gain = batch_gain(window, 0.95)
    assert np.max(np.abs(direct_information_matrix(window, 0.95) @ gain - np.eye(6))) <= 1e-9


def test_batch_gain_needs_full_window():
    window = SampleWindow(3)
    window.push(make_sample(1, [1.0, 0.0], 0.0))
    with pytest.raises(ValueError):
        batch_gain(window, 0.9)


def test_full_history_one_period():
    # Một chu kỳ đầy đủ của q = 2 pi / 8: tổng phi phi^T = (8/2) I
    grid = FrequencyGrid(frequencies=(2 * math.pi / 8,))
    samples = synthesize_signal(grid, constant_trajectory([0.0, 0.0]), 8)
    info = full_history_information(samples, 1.0)
    np.testing.assert_allclose(info, 4.0 * np.eye(2), atol=1e-12)
    gain = full_history_gain(samples, 1.0)
    assert np.max(np.abs(info @ gain - np.eye(2))) <= 1e-9


def test_full_history_repeated_regressor_is_singular():
    samples = [make_sample(k, [1.0, 0.0], 1.0) for k in range(1, 6)]
    with pytest.raises(SingularError):
        full_history_gain(samples, 0.9)


def test_full_history_too_few_samples():
    with pytest.raises(ValueError):
        full_history_gain([make_sample(1, [1.0, 0.0, 0.0, 1.0], 1.0)], 0.9)


def test_full_history_geometric_truncation():
    grid = FrequencyGrid(frequencies=(math.pi / 2,))
    samples = synthesize_signal(grid, constant_trajectory([0.0, 0.0]), 60)
    long_gain = full_history_gain(samples, 0.5)
    short_gain = full_history_gain(samples[-40:], 0.5)
    assert np.max(np.abs(long_gain - short_gain)) <= 1e-9


def _pair(q_new, q_old, y_tilde):
    return UpdatePair(step=5, q_new=np.array(q_new), q_old=np.array(q_old),
                      y_tilde=np.array(y_tilde), downdate_weight=1.0)


def test_orthogonality_report_exact():
    pair = _pair([1.0, 0.0], [0.0, 1.0], [2.0, 3.0])
    report = orthogonality_report(pair, np.array([2.0, 3.0]))
    assert (report.residual_new, report.residual_old) == (0.0, 0.0)


def test_orthogonality_report_zero_theta():
    pair = _pair([1.0, 0.0], [0.0, 1.0], [1.0, 0.5])
    report = orthogonality_report(pair, np.zeros(2))
    assert report.residual_new == 1.0
    assert report.residual_old == 0.5
    assert report.worst == 1.0
    assert report.step == 5


def test_orthogonality_report_shape_mismatch():
    with pytest.raises(ValueError):
        orthogonality_report(_pair([1.0, 0.0], [0.0, 1.0], [1.0, 0.5]), np.zeros(3))


def test_mismatch_report():
    pair = _pair([1.0, 0.0], [0.0, 2.0], [0.0, 0.0])
    np.testing.assert_allclose(mismatch_report(pair, np.array([1.0, 1.0]), np.array([0.5, 0.0])), [0.5, 2.0])
