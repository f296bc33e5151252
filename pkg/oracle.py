#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
Các phép tính tham chiếu "vét cạn" dùng để đối chiếu với các phép đệ quy:
nghịch đảo trực tiếp ma trận thông tin, tổng có trọng số trên toàn bộ lịch sử
và các chỉ số phần dư trực giao.

Chỉ dùng tổng trực tiếp và nghịch đảo đặc, không dùng lại đường đi đệ quy.
"""

import logging
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from harmonic import SignalSample
from numerics import invert_sym, symmetrize
from window import SampleWindow, UpdatePair, direct_information_matrix

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class OrthogonalityReport:
    """
    residual_new = |phi_k^T theta_k - y_k|
    residual_old = |q_old^T theta_k - y~[1]|
    """
    step: int
    residual_new: float
    residual_old: float

    @property
    def worst(self) -> float:
        return max(self.residual_new, self.residual_old)


def batch_gain(window: SampleWindow, lam: float) -> np.ndarray:
    """
    Nghịch đảo trực tiếp ma trận thông tin của cửa sổ đầy.

    Raises:
        SingularError: Khi cửa sổ không đủ kích thích (ma trận suy biến)
    """
    if not window.is_full:
        raise ValueError(f"Cửa sổ chưa đầy ({len(window)}/{window.capacity})")
    return invert_sym(direct_information_matrix(window, lam))


def full_history_information(samples: Sequence[SignalSample], lam: float) -> np.ndarray:
    """sum_{j<=k} lam^(k-j) phi_j phi_j^T trên toàn bộ lịch sử, k = bước cuối."""
    if not samples:
        raise ValueError("Danh sách mẫu rỗng")
    k = samples[-1].k
    total = np.zeros((len(samples[0].phi), len(samples[0].phi)))
    for sample in samples:
        total += (lam ** (k - sample.k)) * np.outer(sample.phi, sample.phi)
    return symmetrize(total)


def full_history_gain(samples: Sequence[SignalSample], lam: float) -> np.ndarray:
    """
    Nghịch đảo của tổng có trọng số mũ trên toàn bộ lịch sử
    (ma trận thông tin ngầm của phép đệ quy hạng một).

    Raises:
        ValueError: Khi số mẫu ít hơn số tham số
        SingularError: Khi tổng suy biến
    """
    if not samples:
        raise ValueError("Danh sách mẫu rỗng")
    n = len(samples[0].phi)
    if len(samples) < n:
        raise ValueError(f"Cần ít nhất {n} mẫu, nhận được {len(samples)}")
    return invert_sym(full_history_information(samples, lam))


def orthogonality_report(pair: UpdatePair, theta: np.ndarray) -> OrthogonalityReport:
    """
    Phần dư của hai phương trình Q_k^T theta_k = y~_k.
    """
    theta = np.asarray(theta, dtype=float)
    if theta.shape != pair.q_new.shape:
        raise ValueError(f"Kích thước theta {theta.shape} khác {pair.q_new.shape}")
    return OrthogonalityReport(
        step=pair.step,
        residual_new=abs(float(pair.q_new @ theta) - float(pair.y_tilde[0])),
        residual_old=abs(float(pair.q_old @ theta) - float(pair.y_tilde[1])),
    )


def mismatch_report(pair: UpdatePair, theta: np.ndarray, theta_star: np.ndarray) -> np.ndarray:
    """
    |Q_k^T (theta_k - theta*)| theo từng cột: tính trực giao mở rộng của sai lệch tham số.
    """
    mismatch = np.asarray(theta, dtype=float) - np.asarray(theta_star, dtype=float)
    return np.abs(pair.q.T @ mismatch)
