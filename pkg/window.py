#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
Cửa sổ trượt w mẫu gần nhất (ring buffer).
Cung cấp cặp cập nhật (Q_k, y~_k) cho bước hạng hai và ma trận thông tin
tính trực tiếp (không đệ quy) để đối chiếu.
"""

import logging
import math
from collections import deque
from dataclasses import dataclass
from typing import Deque, List, Optional

import numpy as np

from harmonic import SignalSample
from numerics import symmetrize

logger = logging.getLogger(__name__)


class NonConsecutiveStep(ValueError):
    """Mẫu mới không nối tiếp bước cuối cùng trong cửa sổ."""


class WindowMisaligned(ValueError):
    """Khoảng cách giữa mẫu hiện tại và mẫu bị loại khác w."""


@dataclass(frozen=True, eq=False)
class UpdatePair:
    """
    Cặp cập nhật hạng hai tại bước k.

    q_new: phi_k (trọng số 1)
    q_old: sqrt(lambda^w) * phi_{k-w}
    y_tilde: [y_k, sqrt(lambda^w) * y_{k-w}] (đầu ra tổng hợp)
    downdate_weight: lambda^w
    """
    step: int
    q_new: np.ndarray
    q_old: np.ndarray
    y_tilde: np.ndarray
    downdate_weight: float

    @property
    def q(self) -> np.ndarray:
        """Ma trận n x 2 [q_new, q_old] (cột mới trước, cột cũ sau)."""
        return np.column_stack([self.q_new, self.q_old])


class SampleWindow:
    """
    Bộ đệm vòng chứa tối đa w mẫu liên tiếp, cũ nhất đứng đầu.
    Chỉ lưu mẫu thô; trọng số lambda được tính khi cần.
    """

    def __init__(self, capacity: int):
        if capacity < 2:
            raise ValueError(f"w phải >= 2, nhận được {capacity}")
        self.capacity = int(capacity)
        self._buffer: Deque[SignalSample] = deque()

    def __len__(self) -> int:
        return len(self._buffer)

    def __iter__(self):
        return iter(self._buffer)

    @property
    def is_full(self) -> bool:
        return len(self._buffer) == self.capacity

    @property
    def samples(self) -> List[SignalSample]:
        return list(self._buffer)

    def push(self, sample: SignalSample) -> Optional[SignalSample]:
        """
        Thêm mẫu mới; khi cửa sổ đã đầy thì loại mẫu cũ nhất.

        Returns:
            SignalSample bị loại, hoặc None nếu cửa sổ chưa đầy

        Raises:
            NonConsecutiveStep: Nếu sample.k khác bước cuối + 1
        """
        if self._buffer and sample.k != self._buffer[-1].k + 1:
            raise NonConsecutiveStep(
                f"Bước {sample.k} không nối tiếp bước cuối {self._buffer[-1].k}")
        evicted = None
        if len(self._buffer) == self.capacity:
            evicted = self._buffer.popleft()
        self._buffer.append(sample)
        return evicted


def make_update_pair(current: SignalSample, evicted: SignalSample, lam: float,
                     w: int) -> UpdatePair:
    """
    Tạo cặp cập nhật Q_k = [phi_k, sqrt(lam^w) phi_{k-w}] và y~_k.

    Raises:
        WindowMisaligned: Khi evicted.k != current.k - w
    """
    if not (0.0 < lam <= 1.0):
        raise ValueError(f"lambda phải thuộc (0, 1], nhận được {lam}")
    if current.k - evicted.k != w:
        raise WindowMisaligned(
            f"Mẫu bị loại k={evicted.k} không cách mẫu hiện tại k={current.k} đúng w={w} bước")
    weight = lam ** w
    scale = math.sqrt(weight)
    return UpdatePair(
        step=current.k,
        q_new=np.asarray(current.phi, dtype=float),
        q_old=scale * np.asarray(evicted.phi, dtype=float),
        y_tilde=np.array([current.y, scale * evicted.y]),
        downdate_weight=weight,
    )


def direct_information_matrix(window: SampleWindow, lam: float) -> np.ndarray:
    """
    A_k = sum_j lam^(k-j) phi_j phi_j^T trên các mẫu trong cửa sổ, k = bước mới nhất.
    Tổng trực tiếp, không đệ quy.
    """
    if len(window) == 0:
        raise ValueError("Cửa sổ rỗng")
    if not (0.0 < lam <= 1.0):
        raise ValueError(f"lambda phải thuộc (0, 1], nhận được {lam}")
    samples = window.samples
    k = samples[-1].k
    phis = np.vstack([s.phi for s in samples])
    weights = np.array([lam ** (k - s.k) for s in samples])
    return symmetrize((phis * weights[:, None]).T @ phis)
