import numpy as np
import pytest
from structlog.testing import CapturingLogger

from core.errors import InvalidInputError
from core.models import SourceFamily, ValidationReport
from validate import CORE_VALIDATORS, VALIDATORS, ValidationRunner
from validate.concentration import (
    run_chunked,
    validate_cov_tail,
    validate_max_inequality,
    validate_opnorm_tail,
    validate_selfcov_norm_tail,
    validate_subgamma_mgf,
    validate_subgamma_tail,
    validate_sum_tail,
)


@pytest.mark.slow
def test_core_validators_pass_at_ten_thousand_trials():
    reports = ValidationRunner(trials=10_000, seed=20240601).run(CORE_VALIDATORS)
    assert [r.name for r in reports] == CORE_VALIDATORS
    for report in reports:
        assert report.passed, report.model_dump()
        assert report.trials == 10_000


def test_runner_rejects_unknown_names():
    with pytest.raises(InvalidInputError):
        ValidationRunner(trials=1000, seed=1).run(["cov_tail", "no_such_check"])


def test_validators_need_enough_trials():
    with pytest.raises(InvalidInputError):
        validate_cov_tail(trials=999)
    with pytest.raises(InvalidInputError):
        ValidationRunner(trials=10, seed=1).run(["sum_tail"])


def test_runner_defaults_to_every_validator(monkeypatch):
    calls = []

    def fake(name):
        def run(trials, seed, chunk_size):
            calls.append((name, trials, seed, chunk_size))
            return ValidationReport(name=name, grid=[0.0], empirical=[0.0], stderr=[0.0],
                                    bound=[1.0], raw_bound=[1.0], passed=True, trials=trials, seed=seed)
        return run

    monkeypatch.setattr("validate.registry.VALIDATORS", {name: fake(name) for name in VALIDATORS})
    reports = ValidationRunner(trials=1000, seed=5, chunk_size=250).run()
    assert [r.name for r in reports] == list(VALIDATORS)
    assert calls[0] == ("cov_tail", 1000, 5, 250)


def test_chunks_are_seeded_independently():
    def draw(rng, batch):
        return rng.standard_normal(batch)

    full = run_chunked(2500, 9, draw, chunk_size=1000)
    assert full.shape == (2500,)
    np.testing.assert_array_equal(full[:2000], run_chunked(2000, 9, draw, chunk_size=1000))
    np.testing.assert_array_equal(full, run_chunked(2500, 9, draw, chunk_size=1000))
    with pytest.raises(InvalidInputError):
        run_chunked(0, 9, draw)


def test_cov_tail_report_clamps_probability_bounds():
    report = validate_cov_tail(trials=1000, seed=2, t_grid=(0.01, 1.0))
    assert report.grid == [0.01, 1.0]
    assert report.raw_bound[0] > 1
    assert report.bound[0] == 1.0
    assert report.bound[1] == pytest.approx(9 ** 4 * np.exp(-100))
    assert report.parameters["source"] == "gaussian"
    assert report.passed


def test_opnorm_tail_reports_three_quantities():
    report = validate_opnorm_tail(d=3, n=5, trials=1000, seed=4,
                                  source=SourceFamily.SCALED_RADEMACHER)
    assert report.labels == ["tail", "mean", "second_moment"]
    assert report.bound[1] == pytest.approx(9 * np.sqrt(8))
    assert report.bound[2] == pytest.approx(36 * 8)
    assert report.empirical[0] == 0.0
    assert report.passed


def test_zero_sigma_is_a_degenerate_pass():
    report = validate_opnorm_tail(sigma=0.0, trials=1000, seed=1)
    assert report.empirical == [0.0, 0.0, 0.0]
    assert report.passed


def test_subgamma_mgf_rejects_large_lambda():
    with pytest.raises(InvalidInputError):
        validate_subgamma_mgf(lambda_grid=(0.4,), trials=1000)
    report = validate_subgamma_mgf(trials=1000, seed=3)
    assert report.empirical[2] == pytest.approx(1.0)
    assert report.bound[2] == pytest.approx(1.0)


def test_extended_validators_pass():
    assert validate_selfcov_norm_tail(trials=1000, seed=6).passed
    assert validate_subgamma_tail(trials=1000, seed=7).passed


def test_max_inequality_gaussian_variant():
    report = validate_max_inequality(sigma=1.0, alpha=0.0, n_grid=(16, 256), trials=1000, seed=8)
    assert report.bound == pytest.approx([np.sqrt(2 * np.log(16)), np.sqrt(2 * np.log(256))])
    assert report.passed
    with pytest.raises(InvalidInputError):
        validate_max_inequality(sigma=-1.0, trials=1000)


def test_sum_tail_half_mass_at_zero():
    report = validate_sum_tail(m=20, trials=2000, seed=9)
    assert report.raw_bound[0] == 1.0
    assert report.empirical[0] == pytest.approx(0.5, abs=0.06)
    assert report.raw_bound[-1] == pytest.approx(np.exp(-20 * 0.25))
    assert report.passed


def test_runner_logs_key_value_events(monkeypatch):
    captured = CapturingLogger()
    monkeypatch.setattr("validate.registry.logger", captured)
    ValidationRunner(trials=1000, seed=5).run(["sum_tail"])
    assert [call.args[0] for call in captured.calls] == ["validator_started", "validators_passed"]
    assert captured.calls[0].kwargs == {"validator": "sum_tail", "trials": 1000, "seed": 5}
    assert captured.calls[1].kwargs == {"count": 1}
