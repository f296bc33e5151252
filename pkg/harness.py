#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
Định nghĩa và chạy kịch bản: chạy một hoặc nhiều bộ ước lượng trên tín hiệu tổng hợp,
tính chỉ số theo từng bước và tóm tắt khả năng bám theo quanh các lần thay đổi tham số.
"""

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd

import estimators
from estimators import EstimatorConfig, UpdateLaw, effective_window
from harmonic import FrequencyGrid, ParameterTrajectory, SignalSample, synthesize_signal
from oracle import orthogonality_report

logger = logging.getLogger(__name__)

# Cột CSV theo thứ tự cố định
RECORD_COLUMNS = ['step', 'label', 'param_error', 'output_residual', 'extended_residual', 'skipped']


class ScenarioError(ValueError):
    """Kịch bản không hợp lệ."""


class UnknownLabel(KeyError):
    """Nhãn bộ ước lượng không có trong các bản ghi."""


@dataclass(frozen=True)
class Scenario:
    grid: FrequencyGrid
    trajectory: ParameterTrajectory
    steps: int
    noise_std: float
    seed: int
    estimators: Tuple[Tuple[str, EstimatorConfig], ...]

    def __post_init__(self):
        object.__setattr__(self, 'estimators', tuple((str(l), c) for l, c in self.estimators))
        if not self.estimators:
            raise ScenarioError("estimators: cần ít nhất một bộ ước lượng")
        labels = [label for label, _ in self.estimators]
        duplicates = sorted({l for l in labels if labels.count(l) > 1})
        if duplicates:
            raise ScenarioError(f"estimators.label: nhãn bị lặp {duplicates}")
        max_w = max(config.w for _, config in self.estimators)
        if self.steps <= max_w + 1:
            raise ScenarioError(f"steps: phải > max(w) + 1 = {max_w + 1}, nhận được {self.steps}")
        if self.noise_std < 0:
            raise ScenarioError(f"noise_std: phải >= 0, nhận được {self.noise_std}")
        try:
            self.trajectory.check_grid(self.grid)
        except ValueError as e:
            raise ScenarioError(str(e)) from e
        for label, config in self.estimators:
            if config.theta0 is not None and len(config.theta0) != self.grid.n_params:
                raise ScenarioError(
                    f"estimators[{label}].theta0: độ dài {len(config.theta0)} khác {self.grid.n_params}")

    @property
    def labels(self) -> List[str]:
        return [label for label, _ in self.estimators]


@dataclass(frozen=True, eq=False)
class MetricsRecord:
    step: int
    label: str
    theta: np.ndarray
    param_error: float
    output_residual: float
    extended_residual: Optional[float]
    skipped: bool


@dataclass(frozen=True)
class LabelSummary:
    label: str
    reconvergence_time: Optional[int]
    final_error: float
    mean_extended_residual: float
    skip_count: int
    steps: int
    memory: Optional[float] = None


def _run_one(label: str, config: EstimatorConfig, grid: FrequencyGrid,
             trajectory: ParameterTrajectory, samples: Sequence[SignalSample]) -> List[MetricsRecord]:
    """Chạy một bộ ước lượng và tính chỉ số cho từng bước."""
    records = []
    state = None
    for sample, state in zip(samples, estimators.run(config, grid, samples)):
        theta = state.theta
        extended = None
        if state.last_law in (UpdateLaw.RANK_TWO, UpdateLaw.RANK_TWO_LIMIT) and state.last_pair is not None:
            extended = orthogonality_report(state.last_pair, theta).worst
        records.append(MetricsRecord(
            step=sample.k,
            label=label,
            theta=theta,
            param_error=float(np.linalg.norm(theta - trajectory.theta_at(sample.k))),
            output_residual=abs(float(sample.phi @ theta) - sample.y),
            extended_residual=extended,
            skipped=bool(state.skips),
        ))
    if state is not None:
        logger.info(f"[{label}] {config.variant.value}: {len(records)} bước, "
                    f"bỏ qua {state.skipped_steps} bước ({state.guard_triggers} lần kích hoạt), "
                    f"sai số cuối {records[-1].param_error:.3e}")
    return records


def run_scenario(s: Scenario, max_workers: int = 1) -> List[MetricsRecord]:
    """
    Chạy tất cả bộ ước lượng của kịch bản trên cùng một tín hiệu.

    Args:
        s: Kịch bản
        max_workers: Số luồng; các bộ ước lượng độc lập nên có thể chạy song song

    Returns:
        List[MetricsRecord]: Một bản ghi cho mỗi (bước, bộ ước lượng), sắp theo (label, step)
    """
    samples = synthesize_signal(s.grid, s.trajectory, s.steps, s.noise_std, s.seed)
    logger.info(f"Bắt đầu kịch bản: {s.steps} bước, {len(s.estimators)} bộ ước lượng, seed={s.seed}")

    jobs = [(label, config) for label, config in s.estimators]
    if max_workers > 1 and len(jobs) > 1:
        with ThreadPoolExecutor(max_workers=max_workers) as pool:
            futures = [pool.submit(_run_one, label, config, s.grid, s.trajectory, samples)
                       for label, config in jobs]
            results = [f.result() for f in futures]
    else:
        results = [_run_one(label, config, s.grid, s.trajectory, samples) for label, config in jobs]

    records = [record for batch in results for record in batch]
    records.sort(key=lambda r: (r.label, r.step))
    return records


def records_to_frame(records: Sequence[MetricsRecord], with_theta: bool = False) -> pd.DataFrame:
    """
    Chuyển bản ghi thành DataFrame với các cột RECORD_COLUMNS
    (thêm theta_0..theta_{n-1} khi with_theta).
    """
    rows = []
    for r in records:
        row = {
            'step': r.step,
            'label': r.label,
            'param_error': r.param_error,
            'output_residual': r.output_residual,
            'extended_residual': r.extended_residual if r.extended_residual is not None else np.nan,
            'skipped': int(r.skipped),
        }
        if with_theta:
            for i, value in enumerate(r.theta):
                row[f'theta_{i}'] = float(value)
        rows.append(row)
    frame = pd.DataFrame(rows)
    if frame.empty:
        frame = pd.DataFrame(columns=RECORD_COLUMNS)
    frame['extended_residual'] = frame['extended_residual'].astype(float)
    return frame


def _label_records(records: Sequence[MetricsRecord], label: str) -> List[MetricsRecord]:
    selected = [r for r in records if r.label == label]
    if not selected:
        raise UnknownLabel(label)
    return sorted(selected, key=lambda r: r.step)


def reconvergence_time(records: Sequence[MetricsRecord], label: str, change_step: int,
                       tol: float) -> Optional[int]:
    """
    Khoảng d nhỏ nhất sao cho param_error <= tol với mọi bước trong [change_step + d, cuối].

    Returns:
        int, hoặc None nếu không hội tụ lại trước khi kết thúc

    Raises:
        UnknownLabel: Khi nhãn không có trong bản ghi
    """
    if not tol > 0:
        raise ValueError(f"tol phải > 0, nhận được {tol}")
    selected = _label_records(records, label)
    last_step = selected[-1].step
    if not (selected[0].step <= change_step <= last_step):
        raise ValueError(f"change_step {change_step} nằm ngoài lần chạy [{selected[0].step}, {last_step}]")

    # Bước cuối cùng còn vượt ngưỡng
    last_bad = None
    for r in reversed(selected):
        if r.step < change_step:
            break
        if not r.param_error <= tol:
            last_bad = r.step
            break
    if last_bad is None:
        return 0
    if last_bad == last_step:
        return None
    return last_bad + 1 - change_step


def compare_summary(records: Sequence[MetricsRecord], change_step: int, tol: float,
                    configs: Optional[Dict[str, EstimatorConfig]] = None) -> List[LabelSummary]:
    """
    Tóm tắt theo nhãn: thời gian hội tụ lại, sai số cuối, phần dư mở rộng trung bình,
    số bước bị bỏ qua (và độ dài cửa sổ ảo nếu có cấu hình).
    """
    frame = records_to_frame(records)
    summaries = []
    for label, group in frame.groupby('label', sort=True):
        group = group.sort_values('step')
        extended = group['extended_residual'].dropna()
        memory = None
        if configs and label in configs:
            memory = effective_window(configs[label].lam, configs[label].w)
        summaries.append(LabelSummary(
            label=str(label),
            reconvergence_time=reconvergence_time(records, label, change_step, tol),
            final_error=float(group['param_error'].iloc[-1]),
            mean_extended_residual=float(extended.mean()) if len(extended) else math.nan,
            skip_count=int(group['skipped'].sum()),
            steps=int(len(group)),
            memory=memory,
        ))
    return summaries
