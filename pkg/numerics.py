#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
Đại số tuyến tính tối thiểu cho các bộ ước lượng:
giải hệ 2x2 có kiểm tra suy biến, nghịch đảo ma trận đối xứng (Gauss-Jordan,
chọn phần tử trụ từng phần), đối xứng hóa và cập nhật hạng hai.
"""

import logging

import numpy as np

logger = logging.getLogger(__name__)

# Ngưỡng trụ tương đối cho invert_sym
PIVOT_REL_TOL = 1e-12

# D = diag[1, -1]: cột dữ liệu mới (cập nhật) và cột dữ liệu cũ (loại bỏ)
D_SIGNS = np.array([1.0, -1.0])


class SingularError(ArithmeticError):
    """Ma trận suy biến (hoặc gần suy biến) theo ngưỡng tương đối."""


def symmetrize(m: np.ndarray) -> np.ndarray:
    """
    Trả về (m + m^T) / 2.
    """
    m = np.asarray(m, dtype=float)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError(f"Ma trận phải vuông, nhận được shape {m.shape}")
    return 0.5 * (m + m.T)


def solve2(m: np.ndarray, rhs: np.ndarray, rel_tol: float = 1e-12) -> np.ndarray:
    """
    Giải hệ 2x2 m x = rhs bằng công thức Cramer.

    Args:
        m: Ma trận 2x2 [[a, b], [c, d]]
        rhs: Vector (2,) hoặc ma trận (2, p) nhiều vế phải
        rel_tol: Ngưỡng tương đối cho định thức

    Returns:
        np.ndarray: Nghiệm cùng shape với rhs

    Raises:
        SingularError: Khi |det m| <= rel_tol * max|m_ij|^2 hoặc có phần tử không hữu hạn
    """
    if not rel_tol > 0:
        raise ValueError(f"rel_tol phải > 0, nhận được {rel_tol}")
    m = np.asarray(m, dtype=float)
    rhs = np.asarray(rhs, dtype=float)
    if m.shape != (2, 2) or rhs.shape[0] != 2:
        raise ValueError(f"Kích thước không hợp lệ: m {m.shape}, rhs {rhs.shape}")
    if not np.all(np.isfinite(m)):
        raise SingularError("Ma trận 2x2 có phần tử không hữu hạn")

    a, b = m[0, 0], m[0, 1]
    c, d = m[1, 0], m[1, 1]
    det = a * d - b * c
    scale = float(np.max(np.abs(m)))
    if not abs(det) > rel_tol * scale * scale:
        raise SingularError(f"Ma trận 2x2 suy biến: det={det:.3e}, max|m|={scale:.3e}")

    x0 = (d * rhs[0] - b * rhs[1]) / det
    x1 = (a * rhs[1] - c * rhs[0]) / det
    return np.stack([x0, x1])


def invert_sym(m: np.ndarray) -> np.ndarray:
    """
    Nghịch đảo ma trận đối xứng bằng khử Gauss-Jordan với chọn trụ từng phần,
    kết quả được đối xứng hóa.

    Raises:
        SingularError: Khi trụ nhỏ hơn PIVOT_REL_TOL * max|m_ij|
    """
    m = np.asarray(m, dtype=float)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError(f"Ma trận phải vuông, nhận được shape {m.shape}")
    n = m.shape[0]
    scale = float(np.max(np.abs(m))) if n else 0.0
    if not scale > 0 or not np.isfinite(scale):
        raise SingularError("Ma trận bằng 0 hoặc không hữu hạn")

    aug = np.hstack([m.copy(), np.eye(n)])
    threshold = PIVOT_REL_TOL * scale
    for col in range(n):
        # Chọn trụ có trị tuyệt đối lớn nhất trong cột
        p = col + int(np.argmax(np.abs(aug[col:, col])))
        pivot = aug[p, col]
        if abs(pivot) < threshold:
            raise SingularError(
                f"Trụ {abs(pivot):.3e} tại cột {col} nhỏ hơn ngưỡng {threshold:.3e}")
        if p != col:
            aug[[col, p]] = aug[[p, col]]
        aug[col] /= aug[col, col]
        factors = aug[:, col].copy()
        factors[col] = 0.0
        aug -= np.outer(factors, aug[col])

    return symmetrize(aug[:, n:])


def rank_two_downdate_apply(a: np.ndarray, q_new: np.ndarray, q_old: np.ndarray,
                            lam: float) -> np.ndarray:
    """
    Cập nhật hạng hai ma trận thông tin: lam * a + Q D Q^T với Q = [q_new, q_old],
    D = diag[1, -1], kết quả được đối xứng hóa.
    """
    if not (0.0 < lam <= 1.0):
        raise ValueError(f"lambda phải thuộc (0, 1], nhận được {lam}")
    q_new = np.asarray(q_new, dtype=float)
    q_old = np.asarray(q_old, dtype=float)
    a = np.asarray(a, dtype=float)
    if q_new.shape != (a.shape[0],) or q_old.shape != (a.shape[0],):
        raise ValueError(f"Cột Q phải có độ dài {a.shape[0]}")
    q = np.column_stack([q_new, q_old])
    return symmetrize(lam * a + (q * D_SIGNS) @ q.T)


def max_abs(m: np.ndarray) -> float:
    return float(np.max(np.abs(m))) if np.size(m) else 0.0


def rel_frobenius_error(actual: np.ndarray, expected: np.ndarray) -> float:
    """
    ||actual - expected||_F / ||expected||_F (sai số tuyệt đối khi expected = 0).
    """
    diff = float(np.linalg.norm(np.asarray(actual) - np.asarray(expected)))
    ref = float(np.linalg.norm(expected))
    return diff / ref if ref > 0 else diff
