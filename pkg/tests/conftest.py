# -*- coding: utf-8 -*-
"""
Fixture dùng chung cho các bài test.
"""

import json

import numpy as np
import pytest

from harmonic import FrequencyGrid, SignalSample, constant_trajectory, synthesize_signal


def make_sample(k, phi, y):
    return SignalSample(k=k, phi=np.asarray(phi, dtype=float), y=float(y))


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def grid2():
    return FrequencyGrid(frequencies=(0.9, 2.1))


@pytest.fixture
def grid3():
    return FrequencyGrid(frequencies=(0.5, 1.3, 2.2))


@pytest.fixture
def noise_free_samples(grid2):
    theta_star = [1.0, -0.5, 0.25, 2.0]
    return theta_star, synthesize_signal(grid2, constant_trajectory(theta_star), 300)


@pytest.fixture
def run_config_dict(tmp_path):
    """Cấu hình kịch bản tối thiểu hợp lệ, ghi CSV vào tmp_path."""
    return {
        "frequencies": [0.9, 2.1],
        "segments": [
            {"start_step": 1, "theta_star": [1.0, -0.5, 0.25, 2.0]},
            {"start_step": 200, "theta_star": [-1.0, 0.5, 1.5, -0.75]},
        ],
        "steps": 400,
        "noise_std": 0.0,
        "seed": 7,
        "estimators": [
            {"label": "rank2-fast", "variant": "RankTwo", "lambda": 0.9, "w": 20},
            {"label": "rank2-slow", "variant": "RankTwo", "lambda": 0.95, "w": 16},
        ],
        "output": str(tmp_path / "run.csv"),
    }


@pytest.fixture
def write_config(tmp_path):
    def _write(data, name="run.json"):
        path = tmp_path / name
        path.write_text(json.dumps(data), encoding='utf-8')
        return path
    return _write
