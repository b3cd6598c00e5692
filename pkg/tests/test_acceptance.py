"""
Bundled experiments at full scale. Run with: pytest -m slow
"""

from pathlib import Path

import pytest

from config.experiment_kinds import Verdict
from src.harness import runner
from src.harness.calibration import CALIBRATION, calibrate
from src.harness.experiment_config import load_experiment_config

EXPERIMENTS = Path(__file__).resolve().parent.parent / 'config' / 'experiments'

pytestmark = pytest.mark.slow

@pytest.fixture(scope='module')
def pilot_caps(tmp_path_factory):
    path = tmp_path_factory.mktemp('calibration') / 'calibration.yaml'
    return calibrate(path=path)

@pytest.fixture
def frozen(monkeypatch, pilot_caps):
    monkeypatch.setattr(runner, 'load_calibration', lambda: pilot_caps)
    return pilot_caps

def binding(report, statistic):
    return next(v for v in report.verdicts if v.statistic == statistic)

def test_pilot_protocol(pilot_caps):
    assert pilot_caps['source'] == 'pilot'
    assert pilot_caps['seed'] == 0xC0FFEE == CALIBRATION['seed']
    assert pilot_caps['replications'] == 200

@pytest.mark.parametrize('name', ['dyadic-ratio', 'dyadic-ratio-d2'])
def test_dyadic_ratio_within_frozen_cap(frozen, name):
    report = runner.run(load_experiment_config(EXPERIMENTS / f"{name}.yaml"))
    verdict = binding(report, 'max_ratio')
    assert verdict.verdict == Verdict.PASS.value
    assert verdict.value <= frozen['dyadic_ratio_cap'][f"d{report.d}"]
    assert report.exit_code == 0

@pytest.mark.parametrize('name', ['maximal-estimate', 'maximal-estimate-d2'])
def test_growth_within_frozen_cap(frozen, name):
    report = runner.run(load_experiment_config(EXPERIMENTS / f"{name}.yaml"))
    verdict = binding(report, 'final_growth')
    assert verdict.verdict == Verdict.PASS.value
    assert verdict.value <= frozen['growth_ratio_cap'][f"d{report.d}"]
    assert report.exit_code == 0

def test_deviation_at_full_scale():
    config = load_experiment_config(EXPERIMENTS / 'check-deviation.yaml')
    assert (config.options['n'], config.replications) == (32, 100000)
    report = runner.run(config)
    assert len(report.verdicts) == 2 * 6 * 4
    assert {v.statistic.split(':')[0] for v in report.verdicts} == {'rademacher', 'gaussian'}
    assert all(v.verdict == Verdict.PASS.value for v in report.verdicts)
    assert report.exit_code == 0
