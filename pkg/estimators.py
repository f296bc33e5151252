#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
Ba luật cập nhật tham số Kaczmarz sau một giao diện bước chung:

- Classical: chiếu theta lên siêu phẳng phi_k^T theta = y_k
- RankOne: ma trận khuếch đại cập nhật hạng một với hệ số quên lambda
- RankTwo: ma trận khuếch đại cập nhật hạng hai trong cửa sổ trượt có trọng số

Trạng thái EstimatorState là giá trị bất biến; mỗi hàm bước trả về trạng thái mới.
Các tình huống suy biến không làm dừng lần chạy: bước cập nhật tương ứng bị bỏ qua
và được đếm trong skipped_steps / guard_triggers.
"""

import logging
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Optional, Sequence, Tuple

import numpy as np

from config import settings
from harmonic import FrequencyGrid, SignalSample
from numerics import D_SIGNS, SingularError, solve2, symmetrize
from window import SampleWindow, UpdatePair, make_update_pair
import oracle

logger = logging.getLogger(__name__)


class ConfigError(ValueError):
    """Cấu hình bộ ước lượng không hợp lệ."""


class DegenerateGain(SingularError):
    """phi^T Gamma phi quá nhỏ: bỏ qua cập nhật tham số hạng một."""


class SingularPairMatrix(SingularError):
    """Q^T Gamma Q suy biến: bỏ qua cập nhật tham số hạng hai."""


class SingularS(SingularError):
    """S = lambda D + Q^T Gamma Q suy biến: bỏ qua cập nhật ma trận khuếch đại."""


class Variant(str, Enum):
    CLASSICAL = "Classical"
    RANK_ONE = "RankOne"
    RANK_TWO = "RankTwo"


class GammaInit(str, Enum):
    IDENTITY = "identity"  # Gamma_0 = gamma0 * I
    ORACLE = "oracle"      # Neo Gamma vào nghịch đảo ma trận thông tin khi cửa sổ vừa đầy


class UpdateLaw(str, Enum):
    CLASSICAL = "classical"
    RANK_ONE = "rank_one"
    RANK_TWO = "rank_two"
    RANK_TWO_LIMIT = "rank_two_limit"  # lambda^w không đáng kể: Q_k = [phi_k, 0]


@dataclass(frozen=True)
class EstimatorConfig:
    variant: Variant = Variant.RANK_TWO
    lam: float = 0.95
    w: int = 16
    gamma0: float = field(default_factory=lambda: settings.DEFAULT_GAMMA0)
    sing_rel_tol: float = field(default_factory=lambda: settings.DEFAULT_SING_REL_TOL)
    resync_period: int = 0
    gamma_init: GammaInit = GammaInit.IDENTITY
    theta0: Optional[Tuple[float, ...]] = None

    def __post_init__(self):
        object.__setattr__(self, 'variant', Variant(self.variant))
        object.__setattr__(self, 'gamma_init', GammaInit(self.gamma_init))
        if not (0.0 < self.lam <= 1.0):
            raise ConfigError(f"lambda: phải thuộc (0, 1], nhận được {self.lam}")
        if int(self.w) != self.w or self.w < 2:
            raise ConfigError(f"w: phải là số nguyên >= 2, nhận được {self.w}")
        if not self.gamma0 > 0:
            raise ConfigError(f"gamma0: phải > 0, nhận được {self.gamma0}")
        if not self.sing_rel_tol > 0:
            raise ConfigError(f"sing_rel_tol: phải > 0, nhận được {self.sing_rel_tol}")
        if int(self.resync_period) != self.resync_period or self.resync_period < 0:
            raise ConfigError(f"resync_period: phải là số nguyên >= 0, nhận được {self.resync_period}")
        if self.theta0 is not None:
            object.__setattr__(self, 'theta0', tuple(float(v) for v in self.theta0))


@dataclass(frozen=True, eq=False)
class EstimatorState:
    """
    theta: tham số điều chỉnh theta_k
    gamma: ma trận khuếch đại Gamma_k (đối xứng)
    step: bước k của mẫu cuối cùng đã xử lý
    skipped_steps: số bước có ít nhất một lần bỏ qua do suy biến
    guard_triggers: tổng số lần kiểm tra suy biến bị kích hoạt
    skips: tên các tín hiệu bỏ qua ở bước cuối
    last_law: luật cập nhật đã dùng ở bước cuối
    last_pair: cặp cập nhật hạng hai ở bước cuối (nếu có)
    """
    theta: np.ndarray
    gamma: np.ndarray
    step: int = 0
    skipped_steps: int = 0
    guard_triggers: int = 0
    skips: Tuple[str, ...] = ()
    last_law: Optional[UpdateLaw] = None
    last_pair: Optional[UpdatePair] = None


def effective_window(lam: float, w: int) -> float:
    """
    Độ dài "cửa sổ ảo" do hệ số quên tạo ra bên trong cửa sổ trượt: min(w, 1/(1-lam)).
    """
    if lam >= 1.0:
        return float(w)
    return min(float(w), 1.0 / (1.0 - lam))


def init_state(grid: FrequencyGrid, config: EstimatorConfig) -> EstimatorState:
    """
    Trạng thái ban đầu: theta = 0 (hoặc theta0), Gamma = gamma0 * I.
    """
    n = grid.n_params
    if config.theta0 is not None:
        if len(config.theta0) != n:
            raise ConfigError(f"theta0: độ dài {len(config.theta0)} khác số tham số {n}")
        theta = np.array(config.theta0, dtype=float)
    else:
        theta = np.zeros(n)
    return EstimatorState(theta=theta, gamma=config.gamma0 * np.eye(n))


def _degenerate_threshold(gamma: np.ndarray, phi: np.ndarray, sing_rel_tol: float) -> float:
    return sing_rel_tol * float(np.trace(gamma)) * float(phi @ phi)


def _advance(state: EstimatorState, theta: np.ndarray, gamma: np.ndarray, law: UpdateLaw,
             skips: Sequence[str], pair: Optional[UpdatePair] = None) -> EstimatorState:
    skips = tuple(skips)
    return replace(
        state,
        theta=theta,
        gamma=gamma,
        step=state.step + 1,
        skipped_steps=state.skipped_steps + (1 if skips else 0),
        guard_triggers=state.guard_triggers + len(skips),
        skips=skips,
        last_law=law,
        last_pair=pair,
    )


def classical_kaczmarz_step(theta: np.ndarray, phi: np.ndarray, y: float) -> np.ndarray:
    """
    theta_k = theta_{k-1} - phi / (phi^T phi) * [phi^T theta_{k-1} - y_k]

    Sau bước này phi^T theta_k = y_k (tính trực giao).
    """
    phi = np.asarray(phi, dtype=float)
    residual = float(phi @ theta) - y
    return theta - phi * (residual / float(phi @ phi))


def rank_one_gain_step(state: EstimatorState, phi: np.ndarray, y: float, lam: float,
                       sing_rel_tol: float = 1e-12) -> EstimatorState:
    """
    Luật Kaczmarz với cập nhật hạng một và hệ số quên:

        Gamma_k = (1/lam) [Gamma - Gamma phi phi^T Gamma / (lam + phi^T Gamma phi)]
        theta_k = theta - Gamma phi / (phi^T Gamma phi) [phi^T theta - y]

    Khi phi^T Gamma phi <= sing_rel_tol * trace(Gamma) * ||phi||^2 thì bỏ qua cập nhật
    tham số (DegenerateGain), Gamma vẫn được cập nhật.
    """
    phi = np.asarray(phi, dtype=float)
    gamma = state.gamma
    g_phi = gamma @ phi
    a = float(phi @ g_phi)
    skips = []

    theta = state.theta
    try:
        if not a > _degenerate_threshold(gamma, phi, sing_rel_tol):
            raise DegenerateGain(f"phi^T Gamma phi = {a:.3e} quá nhỏ tại bước {state.step + 1}")
        residual = float(phi @ theta) - y
        theta = theta - g_phi * (residual / a)
    except DegenerateGain as e:
        logger.warning(f"Bỏ qua cập nhật tham số: {e}")
        skips.append(DegenerateGain.__name__)

    new_gamma = symmetrize((gamma - np.outer(g_phi, g_phi) / (lam + a)) / lam)
    return _advance(state, theta, new_gamma, UpdateLaw.RANK_ONE, skips)


def rank_two_gain_step(state: EstimatorState, pair: UpdatePair, lam: float,
                       sing_rel_tol: float = 1e-12) -> EstimatorState:
    """
    Luật Kaczmarz với cập nhật hạng hai trong cửa sổ trượt:

        S = lam D + Q^T Gamma Q
        Gamma_k = (1/lam) [Gamma - Gamma Q S^-1 Q^T Gamma]
        theta_k = theta - Gamma Q [Q^T Gamma Q]^-1 [Q^T theta - y~]

    Sau bước này Q^T theta_k = y~_k (tính trực giao mở rộng: mô hình khớp cả hai đầu cửa sổ).
    Khi lambda^w <= sing_rel_tol thì cột dữ liệu cũ coi như bằng 0 và luật tham số
    trở về luật hạng một trên mẫu mới nhất.
    """
    gamma = state.gamma
    q = pair.q
    g_q = gamma @ q
    pair_matrix = symmetrize(q.T @ g_q)
    skips = []

    theta = state.theta
    negligible = pair.downdate_weight <= sing_rel_tol
    law = UpdateLaw.RANK_TWO_LIMIT if negligible else UpdateLaw.RANK_TWO
    try:
        if negligible:
            a = pair_matrix[0, 0]
            if not a > _degenerate_threshold(gamma, pair.q_new, sing_rel_tol):
                raise DegenerateGain(f"phi^T Gamma phi = {a:.3e} quá nhỏ tại bước {pair.step}")
            residual = float(pair.q_new @ theta) - pair.y_tilde[0]
            theta = theta - g_q[:, 0] * (residual / a)
        else:
            try:
                x = solve2(pair_matrix, q.T @ theta - pair.y_tilde, sing_rel_tol)
            except SingularError as e:
                raise SingularPairMatrix(f"Q^T Gamma Q suy biến tại bước {pair.step}: {e}") from e
            theta = theta - g_q @ x
    except (DegenerateGain, SingularPairMatrix) as e:
        logger.warning(f"Bỏ qua cập nhật tham số: {e}")
        skips.append(type(e).__name__)

    new_gamma = gamma
    try:
        s = lam * np.diag(D_SIGNS) + pair_matrix
        try:
            z = solve2(s, g_q.T, sing_rel_tol)
        except SingularError as e:
            raise SingularS(f"S suy biến tại bước {pair.step}: {e}") from e
        new_gamma = symmetrize((gamma - g_q @ z) / lam)
    except SingularS as e:
        logger.warning(f"Bỏ qua cập nhật ma trận khuếch đại: {e}")
        skips.append(SingularS.__name__)

    return _advance(state, theta, new_gamma, law, skips, pair)


def _anchor_gamma(state: EstimatorState, window: SampleWindow, lam: float,
                  reason: str) -> EstimatorState:
    """Thay Gamma bằng nghịch đảo ma trận thông tin của cửa sổ (nếu khả nghịch)."""
    try:
        gamma = oracle.batch_gain(window, lam)
    except SingularError as e:
        logger.warning(f"Không thể {reason} Gamma tại bước {state.step}: {e}")
        return state
    logger.debug(f"Đã {reason} Gamma theo cửa sổ tại bước {state.step}")
    return replace(state, gamma=gamma)


def step(config: EstimatorConfig, state: EstimatorState, window: SampleWindow,
         sample: SignalSample) -> EstimatorState:
    """
    Xử lý một mẫu theo biến thể của cấu hình.

    - Classical: classical_kaczmarz_step, Gamma giữ nguyên
    - RankOne: rank_one_gain_step
    - RankTwo: luật hạng một khi cửa sổ chưa đầy (khởi động), luật hạng hai sau đó

    Cửa sổ được cập nhật tại chỗ (mỗi lần chạy sở hữu cửa sổ riêng).
    """
    if sample.phi.shape != state.theta.shape:
        raise ValueError(
            f"Kích thước phi {sample.phi.shape} khác kích thước theta {state.theta.shape}")
    if window.capacity != config.w:
        raise ValueError(f"Kích thước cửa sổ {window.capacity} khác w={config.w}")

    # Neo lại Gamma theo chu kỳ, trước khi thêm mẫu k
    if (config.variant == Variant.RANK_TWO and config.resync_period > 0
            and sample.k % config.resync_period == 0 and window.is_full):
        state = _anchor_gamma(state, window, config.lam, "đồng bộ lại")

    evicted = window.push(sample)

    if config.variant == Variant.CLASSICAL:
        theta = classical_kaczmarz_step(state.theta, sample.phi, sample.y)
        return _advance(state, theta, state.gamma, UpdateLaw.CLASSICAL, ())

    if config.variant == Variant.RANK_ONE or evicted is None:
        state = rank_one_gain_step(state, sample.phi, sample.y, config.lam, config.sing_rel_tol)
        if (config.variant == Variant.RANK_TWO and config.gamma_init == GammaInit.ORACLE
                and evicted is None and window.is_full):
            state = _anchor_gamma(state, window, config.lam, "neo")
        return state

    pair = make_update_pair(sample, evicted, config.lam, config.w)
    return rank_two_gain_step(state, pair, config.lam, config.sing_rel_tol)


def run(config: EstimatorConfig, grid: FrequencyGrid, samples: Sequence[SignalSample],
        state: Optional[EstimatorState] = None):
    """
    Chạy tuần tự một bộ ước lượng qua dãy mẫu.

    Yields:
        EstimatorState sau từng mẫu
    """
    window = SampleWindow(config.w)
    state = state if state is not None else init_state(grid, config)
    for sample in samples:
        state = step(config, state, window, sample)
        yield state


def relative_distance(a: np.ndarray, b: np.ndarray) -> float:
    """||a - b|| / ||b|| (tuyệt đối khi b = 0)."""
    ref = float(np.linalg.norm(b))
    diff = float(np.linalg.norm(np.asarray(a) - np.asarray(b)))
    return diff / ref if ref > 0 else diff

