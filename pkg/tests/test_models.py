# -*- coding: utf-8 -*-
import copy
import json

import pytest

from estimators import GammaInit, Variant
from models import ConfigValidationError, RunConfigFile, load_run_config, parse_run_config


def test_valid_config_to_scenario(run_config_dict):
    run_config = RunConfigFile.model_validate(run_config_dict)
    scenario = run_config.to_scenario()
    assert scenario.steps == 400
    assert scenario.labels == ["rank2-fast", "rank2-slow"]
    config = dict(scenario.estimators)["rank2-fast"]
    assert config.variant is Variant.RANK_TWO
    assert config.lam == 0.9
    assert config.gamma_init is GammaInit.IDENTITY
    assert scenario.trajectory.change_steps == [200]


def test_optional_estimator_fields(run_config_dict):
    data = copy.deepcopy(run_config_dict)
    data["estimators"][0].update({"gamma0": 10.0, "resync_period": 50, "gamma_init": "oracle",
                                  "theta0": [0.0, 0.0, 1.0, 1.0]})
    config = RunConfigFile.model_validate(data).estimator_configs()["rank2-fast"]
    assert config.gamma0 == 10.0
    assert config.resync_period == 50
    assert config.gamma_init is GammaInit.ORACLE
    assert config.theta0 == (0.0, 0.0, 1.0, 1.0)


@pytest.mark.parametrize("mutate, field", [
    (lambda d: d["estimators"][0].update({"lambda": 1.5}), "estimators.0.lambda"),
    (lambda d: d["estimators"][1].update({"w": 1}), "estimators.1.w"),
    (lambda d: d["estimators"][0].update({"variant": "RankThree"}), "estimators.0.variant"),
    (lambda d: d["estimators"][0].update({"label": "a,b"}), "estimators.0.label"),
    (lambda d: d["estimators"][1].update({"label": "rank2-fast"}), "estimators.1.label"),
    (lambda d: d.update({"frequencies": [0.9, 4.0]}), "frequencies"),
    (lambda d: d.update({"steps": 20}), "steps"),
    (lambda d: d["segments"][1].update({"theta_star": [1.0, 2.0]}), "segments.1.theta_star"),
    (lambda d: d["segments"][0].update({"start_step": 3}), "segments.0.start_step"),
    (lambda d: d.update({"unexpected": 1}), "unexpected"),
    (lambda d: d.pop("output"), "output"),
])
def test_invalid_fields_are_named(run_config_dict, mutate, field):
    data = copy.deepcopy(run_config_dict)
    mutate(data)
    with pytest.raises(ConfigValidationError) as info:
        parse_run_config(json.dumps(data))
    assert any(field in message for message in info.value.errors)


def test_malformed_json_reports_position():
    with pytest.raises(ConfigValidationError) as info:
        parse_run_config('{\n  "steps": 10,\n  oops\n}')
    assert "dòng 3" in info.value.errors[0]


def test_non_object_root():
    with pytest.raises(ConfigValidationError):
        parse_run_config("[1, 2, 3]")


def test_load_from_file(run_config_dict, write_config):
    path = write_config(run_config_dict)
    assert load_run_config(path).steps == 400


def test_load_missing_file(tmp_path):
    with pytest.raises(OSError):
        load_run_config(tmp_path / "missing.json")
