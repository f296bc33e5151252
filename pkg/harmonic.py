#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
Tạo bộ hồi quy điều hòa (harmonic regressor) và tổng hợp tín hiệu dao động
với tham số thật có thể thay đổi theo thời gian (từng đoạn hằng).
"""

import logging
import math
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import numpy as np

logger = logging.getLogger(__name__)

# Sai số cho phép của |phi^T phi - (h+1)|
REGRESSOR_NORM_TOL = 1e-12


class GridValidationError(ValueError):
    """Lưới tần số không hợp lệ."""


class TrajectoryValidationError(ValueError):
    """Quỹ đạo tham số thật không hợp lệ."""


@dataclass(frozen=True)
class FrequencyGrid:
    """
    Các tần số q_0..q_h (radian / mẫu) của bộ hồi quy điều hòa.
    Tần số phải nằm trong khoảng mở (0, pi) và khác nhau từng đôi.
    """
    frequencies: Tuple[float, ...]

    def __post_init__(self):
        freqs = tuple(float(q) for q in self.frequencies)
        if len(freqs) < 1:
            raise GridValidationError("frequencies: cần ít nhất một tần số")
        for i, q in enumerate(freqs):
            if not math.isfinite(q) or not (0.0 < q < math.pi):
                raise GridValidationError(
                    f"frequencies[{i}]: tần số {q} phải nằm trong khoảng (0, pi)")
        if len(set(freqs)) != len(freqs):
            raise GridValidationError(f"frequencies: có tần số bị lặp {list(freqs)}")
        object.__setattr__(self, 'frequencies', freqs)

    @property
    def count(self) -> int:
        """Số tần số h+1."""
        return len(self.frequencies)

    @property
    def n_params(self) -> int:
        """Số tham số 2(h+1)."""
        return 2 * len(self.frequencies)


@dataclass(frozen=True)
class ParameterTrajectory:
    """
    Tham số thật theta* dạng từng đoạn hằng.
    segments: các cặp (start_step, theta_star), start_step tăng ngặt, đoạn đầu bắt đầu ở k=1.
    """
    segments: Tuple[Tuple[int, Tuple[float, ...]], ...]

    def __post_init__(self):
        if not self.segments:
            raise TrajectoryValidationError("segments: cần ít nhất một đoạn")
        normalized = []
        previous = None
        for i, (start, theta) in enumerate(self.segments):
            start = int(start)
            theta = tuple(float(v) for v in theta)
            if previous is None and start != 1:
                raise TrajectoryValidationError(
                    f"segments[0].start_step: đoạn đầu tiên phải bắt đầu ở 1, nhận được {start}")
            if previous is not None and start <= previous:
                raise TrajectoryValidationError(
                    f"segments[{i}].start_step: phải tăng ngặt ({start} <= {previous})")
            if len(theta) == 0 or len(theta) % 2 != 0:
                raise TrajectoryValidationError(
                    f"segments[{i}].theta_star: độ dài {len(theta)} phải chẵn và dương")
            if normalized and len(theta) != len(normalized[0][1]):
                raise TrajectoryValidationError(
                    f"segments[{i}].theta_star: độ dài {len(theta)} khác đoạn đầu {len(normalized[0][1])}")
            normalized.append((start, theta))
            previous = start
        object.__setattr__(self, 'segments', tuple(normalized))
        # Cache mảng numpy cho từng đoạn
        object.__setattr__(self, '_arrays', tuple(np.asarray(t, dtype=float) for _, t in normalized))
        object.__setattr__(self, '_starts', np.asarray([s for s, _ in normalized], dtype=int))

    @property
    def n_params(self) -> int:
        return len(self.segments[0][1])

    @property
    def change_steps(self) -> List[int]:
        """Các bước mà theta* thay đổi (không tính đoạn đầu)."""
        return [start for start, _ in self.segments[1:]]

    def check_grid(self, grid: FrequencyGrid) -> None:
        """
        Kiểm tra độ dài theta* khớp với lưới tần số.

        Raises:
            TrajectoryValidationError: Khi 2(h+1) khác độ dài theta*
        """
        if self.n_params != grid.n_params:
            raise TrajectoryValidationError(
                f"segments.theta_star: độ dài {self.n_params} khác 2*(số tần số) = {grid.n_params}")

    def theta_at(self, k: int) -> np.ndarray:
        """
        Trả về theta*(k) của đoạn chứa bước k.

        Args:
            k: Bước rời rạc (k >= 1; k = 0 dùng đoạn đầu)
        """
        idx = int(np.searchsorted(self._starts, max(int(k), 1), side='right')) - 1
        return self._arrays[max(idx, 0)]


@dataclass(frozen=True, eq=False)
class SignalSample:
    """Một mẫu đo: bước k, bộ hồi quy phi_k và đầu ra y_k."""
    k: int
    phi: np.ndarray
    y: float


def eval_regressor(grid: FrequencyGrid, k: int) -> np.ndarray:
    """
    Tính bộ hồi quy điều hòa tại bước k.

    Args:
        grid: Lưới tần số
        k: Bước rời rạc (k >= 0)

    Returns:
        np.ndarray: [cos(q0 k), sin(q0 k), ..., cos(qh k), sin(qh k)], chỉ đọc
    """
    if k < 0:
        raise ValueError(f"k phải >= 0, nhận được {k}")
    angles = np.asarray(grid.frequencies, dtype=float) * float(k)
    phi = np.empty(2 * grid.count, dtype=float)
    phi[0::2] = np.cos(angles)
    phi[1::2] = np.sin(angles)
    phi.setflags(write=False)
    return phi


def regressor_norm_error(phi: np.ndarray) -> float:
    """|phi^T phi - (h+1)|, với h+1 = len(phi)/2."""
    return abs(float(phi @ phi) - len(phi) / 2)


def synthesize_signal(grid: FrequencyGrid, traj: ParameterTrajectory, steps: int,
                      noise_std: float = 0.0, seed: int = 0) -> List[SignalSample]:
    """
    Tổng hợp tín hiệu y_k = phi_k^T theta*(k) + e_k cho k = 1..steps.

    Args:
        grid: Lưới tần số
        traj: Quỹ đạo tham số thật
        steps: Số mẫu (>= 1)
        noise_std: Độ lệch chuẩn nhiễu Gauss cộng (>= 0)
        seed: Hạt giống cho bộ sinh số ngẫu nhiên

    Returns:
        List[SignalSample]: Dãy mẫu, tất định theo seed
    """
    if steps < 1:
        raise ValueError(f"steps phải >= 1, nhận được {steps}")
    if not (noise_std >= 0.0):
        raise ValueError(f"noise_std phải >= 0, nhận được {noise_std}")
    traj.check_grid(grid)

    rng = np.random.default_rng(seed)
    noise = rng.normal(0.0, noise_std, size=steps) if noise_std > 0 else np.zeros(steps)

    samples = []
    for k in range(1, steps + 1):
        phi = eval_regressor(grid, k)
        y = float(phi @ traj.theta_at(k))
        if noise_std > 0:
            y += float(noise[k - 1])
        samples.append(SignalSample(k=k, phi=phi, y=y))

    logger.debug(f"Đã tổng hợp {steps} mẫu, {grid.count} tần số, noise_std={noise_std}, seed={seed}")
    return samples


def step_change(theta_before: Sequence[float], theta_after: Sequence[float],
                change_step: int) -> ParameterTrajectory:
    """
    Quỹ đạo hai đoạn: theta* nhảy từ theta_before sang theta_after tại change_step.
    """
    return ParameterTrajectory(segments=((1, tuple(theta_before)),
                                         (int(change_step), tuple(theta_after))))


def constant_trajectory(theta_star: Sequence[float]) -> ParameterTrajectory:
    return ParameterTrajectory(segments=((1, tuple(theta_star)),))


def spaced_grid(count: int, rng: Optional[np.random.Generator] = None,
                jitter: float = 0.15) -> FrequencyGrid:
    """
    Lưới tần số cách đều q_i = pi(2i+1)/(2*count), có thể lệch ngẫu nhiên nhỏ.
    Các tần số này cho ma trận thông tin điều kiện tốt ngay với cửa sổ ngắn.

    Args:
        count: Số tần số
        rng: Bộ sinh ngẫu nhiên; None = không lệch
        jitter: Độ lệch tối đa theo tỉ lệ khoảng cách giữa hai tần số
    """
    spacing = math.pi / count
    base = np.array([spacing * (i + 0.5) for i in range(count)])
    if rng is not None and jitter > 0:
        base = base + rng.uniform(-jitter, jitter, size=count) * spacing
    return FrequencyGrid(frequencies=tuple(float(q) for q in base))
