#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
Models cho file cấu hình kịch bản (JSON).
Các lớp này kiểm tra dữ liệu đầu vào bằng pydantic và chuyển thành Scenario.
"""

import json
import logging
import math
from pathlib import Path
from typing import List, Optional, Union

from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator, model_validator

from config import settings
from estimators import EstimatorConfig, GammaInit, Variant
from harmonic import FrequencyGrid, ParameterTrajectory
from harness import Scenario

logger = logging.getLogger(__name__)


class ConfigValidationError(ValueError):
    """
    File cấu hình không hợp lệ. errors chứa từng thông báo theo trường (hoặc dòng/cột).
    """

    def __init__(self, errors: List[str]):
        self.errors = list(errors)
        super().__init__("; ".join(self.errors))


class SegmentModel(BaseModel):
    """Một đoạn của quỹ đạo tham số thật."""
    model_config = ConfigDict(extra="forbid")

    start_step: int = Field(..., ge=1)
    theta_star: List[float] = Field(..., min_length=2)


class EstimatorModel(BaseModel):
    """Cấu hình một bộ ước lượng trong file JSON."""
    model_config = ConfigDict(extra="forbid", populate_by_name=True)

    label: str = Field(..., min_length=1, max_length=64, pattern=r'^[^,"\r\n]+$')
    variant: Variant
    lam: float = Field(..., alias="lambda", gt=0, le=1)
    w: int = Field(..., ge=2)
    gamma0: float = Field(default_factory=lambda: settings.DEFAULT_GAMMA0, gt=0)
    sing_rel_tol: float = Field(default_factory=lambda: settings.DEFAULT_SING_REL_TOL, gt=0)
    resync_period: int = Field(0, ge=0)
    gamma_init: GammaInit = GammaInit.IDENTITY
    theta0: Optional[List[float]] = None

    def to_config(self) -> EstimatorConfig:
        return EstimatorConfig(
            variant=self.variant,
            lam=self.lam,
            w=self.w,
            gamma0=self.gamma0,
            sing_rel_tol=self.sing_rel_tol,
            resync_period=self.resync_period,
            gamma_init=self.gamma_init,
            theta0=tuple(self.theta0) if self.theta0 is not None else None,
        )


class RunConfigFile(BaseModel):
    """
    File cấu hình kịch bản: lưới tần số, quỹ đạo tham số, tín hiệu, các bộ ước lượng và đường dẫn CSV.
    """
    model_config = ConfigDict(extra="forbid")

    frequencies: List[float] = Field(..., min_length=1)
    segments: List[SegmentModel] = Field(..., min_length=1)
    steps: int = Field(..., ge=1)
    noise_std: float = Field(0.0, ge=0)
    seed: int = 0
    estimators: List[EstimatorModel] = Field(..., min_length=1)
    output: str = Field(..., min_length=1)

    @field_validator("frequencies")
    @classmethod
    def check_frequencies(cls, value: List[float]) -> List[float]:
        for q in value:
            if not (math.isfinite(q) and 0.0 < q < math.pi):
                raise ValueError(f"tần số {q} phải nằm trong khoảng (0, pi)")
        if len(set(value)) != len(value):
            raise ValueError("các tần số phải khác nhau")
        return value

    @model_validator(mode="after")
    def check_consistency(self) -> "RunConfigFile":
        n_params = 2 * len(self.frequencies)
        if self.segments[0].start_step != 1:
            raise ValueError("segments.0.start_step: đoạn đầu tiên phải bắt đầu ở 1")
        for i in range(1, len(self.segments)):
            if self.segments[i].start_step <= self.segments[i - 1].start_step:
                raise ValueError(f"segments.{i}.start_step: phải tăng ngặt")
        for i, segment in enumerate(self.segments):
            if len(segment.theta_star) != n_params:
                raise ValueError(
                    f"segments.{i}.theta_star: độ dài {len(segment.theta_star)} khác 2*len(frequencies) = {n_params}")
        labels = [e.label for e in self.estimators]
        for i, label in enumerate(labels):
            if labels.index(label) != i:
                raise ValueError(f"estimators.{i}.label: nhãn '{label}' bị lặp")
        for i, estimator in enumerate(self.estimators):
            if estimator.theta0 is not None and len(estimator.theta0) != n_params:
                raise ValueError(f"estimators.{i}.theta0: độ dài {len(estimator.theta0)} khác {n_params}")
        max_w = max(e.w for e in self.estimators)
        if self.steps <= max_w + 1:
            raise ValueError(f"steps: phải > max(w) + 1 = {max_w + 1}")
        return self

    def to_scenario(self) -> Scenario:
        return Scenario(
            grid=FrequencyGrid(frequencies=tuple(self.frequencies)),
            trajectory=ParameterTrajectory(
                segments=tuple((s.start_step, tuple(s.theta_star)) for s in self.segments)),
            steps=self.steps,
            noise_std=self.noise_std,
            seed=self.seed,
            estimators=tuple((e.label, e.to_config()) for e in self.estimators),
        )

    def estimator_configs(self):
        return {e.label: e.to_config() for e in self.estimators}


def format_validation_error(error: ValidationError) -> List[str]:
    """
    Chuyển lỗi pydantic thành thông báo dạng "estimators.0.lambda: ...".
    """
    messages = []
    for item in error.errors():
        loc = ".".join(str(part) for part in item.get('loc', ()))
        msg = item.get('msg', '')
        messages.append(f"{loc}: {msg}" if loc else msg)
    return messages


def parse_run_config(text: str) -> RunConfigFile:
    """
    Đọc cấu hình từ chuỗi JSON.

    Raises:
        ConfigValidationError: JSON sai cú pháp (kèm dòng/cột) hoặc trường không hợp lệ
    """
    try:
        data = json.loads(text)
    except json.JSONDecodeError as e:
        raise ConfigValidationError([f"dòng {e.lineno}, cột {e.colno}: {e.msg}"]) from e
    if not isinstance(data, dict):
        raise ConfigValidationError(["gốc của file cấu hình phải là một object JSON"])
    try:
        return RunConfigFile.model_validate(data)
    except ValidationError as e:
        raise ConfigValidationError(format_validation_error(e)) from e


def load_run_config(path: Union[str, Path]) -> RunConfigFile:
    """
    Đọc file cấu hình kịch bản.

    Raises:
        OSError: Không đọc được file
        ConfigValidationError: Nội dung không hợp lệ
    """
    path = Path(path)
    text = path.read_text(encoding='utf-8')
    run_config = parse_run_config(text)
    logger.info(f"Đã đọc cấu hình {path}: {len(run_config.frequencies)} tần số, "
                f"{len(run_config.estimators)} bộ ước lượng, {run_config.steps} bước")
    return run_config
