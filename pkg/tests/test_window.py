# -*- coding: utf-8 -*-
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from harmonic import constant_trajectory, synthesize_signal
from numerics import rank_two_downdate_apply, rel_frobenius_error
from window import (NonConsecutiveStep, SampleWindow, WindowMisaligned, direct_information_matrix,
                    make_update_pair)
from tests.conftest import make_sample


def test_push_and_evict():
    window = SampleWindow(2)
    assert window.push(make_sample(1, [1.0, 0.0], 1.0)) is None
    assert window.push(make_sample(2, [0.0, 1.0], 2.0)) is None
    assert window.is_full
    evicted = window.push(make_sample(3, [1.0, 0.0], 3.0))
    assert evicted.k == 1
    assert [s.k for s in window] == [2, 3]
    assert window.samples[-1].k == 3


def test_push_non_consecutive():
    window = SampleWindow(2)
    window.push(make_sample(1, [1.0, 0.0], 1.0))
    window.push(make_sample(2, [0.0, 1.0], 2.0))
    with pytest.raises(NonConsecutiveStep):
        window.push(make_sample(5, [1.0, 0.0], 0.0))
    assert len(window) == 2


def test_capacity_must_be_at_least_two():
    with pytest.raises(ValueError):
        SampleWindow(1)


def test_update_pair_unit_lambda():
    pair = make_update_pair(make_sample(4, [0.0, 1.0], 5.0), make_sample(1, [1.0, 0.0], 7.0), 1.0, 3)
    np.testing.assert_array_equal(pair.q_old, [1.0, 0.0])
    assert pair.y_tilde[1] == 7.0
    assert pair.downdate_weight == 1.0
    np.testing.assert_array_equal(pair.q, [[0.0, 1.0], [1.0, 0.0]])


def test_update_pair_scaled():
    pair = make_update_pair(make_sample(3, [0.0, 1.0], 1.0), make_sample(1, [1.0, 0.0], 4.0), 0.5, 2)
    np.testing.assert_allclose(pair.q_old, [0.5, 0.0])
    assert pair.y_tilde[1] == pytest.approx(2.0)
    assert pair.y_tilde[0] == 1.0


def test_update_pair_long_window_negligible():
    old = make_sample(1, [0.6, 0.8], 1.0)
    pair = make_update_pair(make_sample(41, [1.0, 0.0], 1.0), old, 0.5, 40)
    assert np.linalg.norm(pair.q_old) <= 1e-6 * np.linalg.norm(old.phi)


def test_update_pair_misaligned():
    with pytest.raises(WindowMisaligned):
        make_update_pair(make_sample(5, [1.0, 0.0], 1.0), make_sample(1, [1.0, 0.0], 1.0), 0.9, 3)


def test_direct_information_single_sample():
    window = SampleWindow(3)
    window.push(make_sample(1, [1.0, 0.0], 0.0))
    np.testing.assert_array_equal(direct_information_matrix(window, 0.3), [[1.0, 0.0], [0.0, 0.0]])


def test_direct_information_weighting():
    window = SampleWindow(2)
    window.push(make_sample(1, [1.0, 0.0], 0.0))
    window.push(make_sample(2, [0.0, 1.0], 0.0))
    np.testing.assert_allclose(direct_information_matrix(window, 0.5), [[0.5, 0.0], [0.0, 1.0]])
    np.testing.assert_allclose(direct_information_matrix(window, 1.0), np.eye(2))


def test_direct_information_matches_recursion(grid3):
    lam, w = 0.9, 10
    samples = synthesize_signal(grid3, constant_trajectory([1.0] * 6), 40)
    window = SampleWindow(w)
    previous = None
    for sample in samples:
        evicted = window.push(sample)
        current = direct_information_matrix(window, lam)
        if evicted is not None:
            pair = make_update_pair(sample, evicted, lam, w)
            recursive = rank_two_downdate_apply(previous, pair.q_new, pair.q_old, lam)
            assert rel_frobenius_error(recursive, current) <= 1e-10
        previous = current


def test_direct_information_empty_window():
    with pytest.raises(ValueError):
        direct_information_matrix(SampleWindow(2), 0.9)


@settings(max_examples=200, deadline=None)
@given(st.integers(min_value=2, max_value=12),
       st.lists(st.integers(min_value=-3, max_value=3), min_size=1, max_size=40))
def test_window_keeps_consecutive_steps(capacity, jumps):
    window = SampleWindow(capacity)
    k = 1
    window.push(make_sample(k, [1.0, 0.0], 0.0))
    for jump in jumps:
        candidate = k + 1 + jump
        if jump == 0:
            evicted = window.push(make_sample(candidate, [1.0, 0.0], 0.0))
            k = candidate
            if evicted is not None:
                assert evicted.k == k - capacity
        else:
            with pytest.raises(NonConsecutiveStep):
                window.push(make_sample(candidate, [1.0, 0.0], 0.0))
        steps = [s.k for s in window]
        assert steps == list(range(steps[0], steps[0] + len(steps)))
        assert len(window) <= capacity
        assert steps[-1] == k
