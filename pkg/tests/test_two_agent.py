import numpy as np
import pytest

from core.covariance import (
    SampleMatrix,
    build_block_covariance,
    frobenius_norm,
    operator_norm,
    psd_project,
    random_contraction,
    sample,
)
from core.errors import InsufficientBudgetError
from core.models import NormKind
from core.seeding import derive_seed, make_rng
from protocol.messages import AgentMessage, deserialize_payload, serialize_payload
from protocol.params import two_agent_params
from protocol.two_agent import plug_in_estimate, run_two_agent, split_budget, two_agent_decode, two_agent_encode
from quantize.matrix_codec import MatrixGrid, decode_on_grid


def _params(d1=2, d2=2, m=64, budget=20_000, n=64, norm=NormKind.OP, eps=1.0):
    return two_agent_params(1.0, eps, d1, d2, norm, m=m, budgets=(budget, budget), n=n)


def test_split_budget():
    assert split_budget(101, high_distortion=False) == (50, 50)
    assert split_budget(101, high_distortion=True) == (101, 0)


def test_inflated_column_trips_error(rng):
    X = rng.standard_normal((2, 64))
    X[:, 0] *= 100
    message = two_agent_encode(X, _params(), 20_000, rng, agent_id=1)
    assert message.is_error
    assert message.bits_used == 0
    assert len(serialize_payload(message)) == 6


def test_zero_samples_encode_to_exact_zeros():
    params = _params()
    message = two_agent_encode(np.zeros((2, 64)), params, 20_000, agent_id=1)
    assert not message.is_error
    estimate = two_agent_decode(message, message, params)
    np.testing.assert_array_equal(estimate.c_hat, 0.0)
    assert not estimate.error_triggered


def test_payload_within_budget_and_codec_bounds(rng):
    params = _params()
    X = rng.standard_normal((2, 64))
    message = two_agent_encode(X, params, 20_000, rng, agent_id=1)
    assert not message.is_error
    assert message.bits_used <= 20_000
    assert len(message.sections) == 2

    selfcov_bits, data_bits = split_budget(20_000, high_distortion=False)
    grid = MatrixGrid.from_budget(2, 2, params.selfcov_radius, selfcov_bits)
    error = frobenius_norm(decode_on_grid(message.sections[0], grid) - X @ X.T / 64)
    assert error <= message.reports[0].op_error_bound + 1e-12

    grid = MatrixGrid.from_budget(2, 64, params.data_radius(2), data_bits)
    error = frobenius_norm(decode_on_grid(message.sections[1], grid) - X)
    assert error <= message.reports[1].op_error_bound + 1e-12

    assert deserialize_payload(serialize_payload(message)) == message


def test_tiny_budget_is_an_explicit_error(rng):
    with pytest.raises(InsufficientBudgetError):
        two_agent_encode(rng.standard_normal((2, 64)), _params(budget=100), 100, rng)


def test_error_message_gives_zero_estimate(rng):
    params = _params()
    payload = two_agent_encode(rng.standard_normal((2, 64)), params, 20_000, agent_id=2)
    estimate = two_agent_decode(AgentMessage.error(1), payload, params)
    assert estimate.error_triggered
    np.testing.assert_array_equal(estimate.c_hat, np.zeros((4, 4)))
    np.testing.assert_array_equal(estimate.c12_hat, np.zeros((2, 2)))
    assert estimate.bits == (0, payload.bits_used)


def test_lossless_limit_matches_projected_plug_in():
    model = build_block_covariance(4, 4, 1.0, 0.5, random_contraction(4, 4, make_rng(3)))
    budget = 10 ** 6
    params = two_agent_params(1.0, 1.0, 4, 4, m=512, budgets=(budget, budget))
    assert params.n == 512

    for trial in range(50):
        X = sample(model, 512, derive_seed(17, trial))
        x1, x2 = X.split([4, 4])
        estimate, (msg1, msg2) = run_two_agent(x1, x2, params, make_rng(trial))
        assert not estimate.error_triggered
        assert msg1.bits_used <= budget and msg2.bits_used <= budget
        assert msg1.reports[0].op_error_bound < 1e-6
        assert msg2.reports[0].op_error_bound < 1e-6
        # data quantization reaches the cross block through x1 x2^T / n
        reach = 2 * max(operator_norm(x1.head(params.n)), operator_norm(x2.head(params.n))) / params.n
        assert max(msg1.reports[1].op_error_bound, msg2.reports[1].op_error_bound) * reach < 1e-6
        oracle = psd_project(plug_in_estimate(x1, x2, params.n))
        assert operator_norm(estimate.c_hat - oracle) <= 1e-5
        np.testing.assert_allclose(estimate.c12_hat, estimate.c_hat[:4, 4:])


def test_estimate_is_psd(rng):
    model = build_block_covariance(3, 2, 1.0, 0.9, random_contraction(2, 3, rng))
    params = two_agent_params(1.0, 1.0, 3, 2, m=128, budgets=(3000, 3000))
    X = sample(model, 128, 4)
    estimate, _ = run_two_agent(*X.split([3, 2]), params, rng)
    assert np.linalg.eigvalsh(estimate.c_hat).min() >= -1e-12
    np.testing.assert_allclose(estimate.c_hat, estimate.c_hat.T)


def test_block_diagonal_regime():
    d1 = d2 = 2
    model = build_block_covariance(d1, d2, 1.0, 0.8, random_contraction(d2, d1, make_rng(5)))
    params = two_agent_params(1.0, 725.0, d1, d2, NormKind.FR, m=256, budgets=(64, 64))
    assert params.high_distortion

    c12_term = np.sqrt(2) * frobenius_norm(model.c12)
    distortions, bounds = [], []
    for trial in range(100):
        X = sample(model, 256, derive_seed(23, trial))
        x1, x2 = X.split([d1, d2])
        estimate, (msg1, msg2) = run_two_agent(x1, x2, params, make_rng(trial))
        assert not estimate.error_triggered
        assert len(msg1.sections) == 1 and len(msg2.sections) == 1
        assert np.all(estimate.c_hat[:d1, d1:] == 0.0)
        assert np.all(estimate.c12_hat == 0.0)

        codec = msg1.reports[0].op_error_bound + msg2.reports[0].op_error_bound
        sampling = (frobenius_norm(x1.empirical_covariance() - model.c11)
                    + frobenius_norm(x2.empirical_covariance() - model.c22))
        distortion = frobenius_norm(estimate.c_hat - model.cov)
        assert distortion <= c12_term + sampling + codec + 1e-12
        distortions.append(distortion)
        bounds.append(c12_term + sampling + codec)
    assert np.mean(distortions) <= np.mean(bounds)


def test_sample_matrix_inputs_are_accepted(rng):
    params = _params()
    X = SampleMatrix(rng.standard_normal((2, 64)))
    assert not two_agent_encode(X, params, 20_000, rng).is_error


def _mean_op_distortion(m, budget, n=None, trials=200):
    model = build_block_covariance(2, 2, 1.0, 0.5, random_contraction(2, 2, make_rng(3)))
    params = two_agent_params(1.0, 1.0, 2, 2, m=m, budgets=(budget, budget), n=n)
    distortions = []
    for trial in range(trials):
        X = sample(model, m, derive_seed(31, trial))
        estimate, _ = run_two_agent(*X.split([2, 2]), params, make_rng(trial))
        distortions.append(operator_norm(estimate.c_hat - model.cov))
    return np.mean(distortions)


def test_distortion_falls_with_budget():
    # n grows with the budget: 7 samples at B = 400, 31 at B = 1600
    assert _mean_op_distortion(256, 1600) < _mean_op_distortion(256, 400)


def test_distortion_falls_with_samples():
    assert _mean_op_distortion(256, 20_000, n=256) < _mean_op_distortion(64, 20_000, n=64)


def test_same_inputs_give_identical_messages(rng):
    model = build_block_covariance(2, 3, 1.0, 0.7, random_contraction(3, 2, rng))
    params = two_agent_params(1.0, 1.0, 2, 3, m=128, budgets=(5000, 5000))
    x1, x2 = sample(model, 128, 8).split([2, 3])

    first, messages = run_two_agent(x1, x2, params, make_rng(8))
    again, messages_again = run_two_agent(x1, x2, params, make_rng(8))
    assert [serialize_payload(m) for m in messages] == [serialize_payload(m) for m in messages_again]
    np.testing.assert_array_equal(first.c_hat, again.c_hat)
    np.testing.assert_array_equal(first.c12_hat, again.c12_hat)
    assert first.bits == again.bits
