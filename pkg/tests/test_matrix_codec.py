import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from core.covariance import frobenius_norm, operator_norm
from core.errors import InsufficientBudgetError, InvalidInputError
from core.models import NormKind
from quantize.bounds import net_bits_theoretical, net_eps_for_budget, packing_log_lower
from quantize.matrix_codec import (
    MatrixGrid,
    QuantizedMatrix,
    encode_on_grid,
    encode_within_budget,
    matrix_uniform_decode,
    matrix_uniform_encode,
    symbol_bits,
)


def _roundtrip(M, r, eps):
    q, report = matrix_uniform_encode(M, r, eps)
    grid = MatrixGrid.from_target(q.rows, q.cols, r, eps)
    return q, report, matrix_uniform_decode(q, grid)


def test_zero_matrix_is_exact():
    q, report, M_hat = _roundtrip(np.zeros((3, 2)), 1.0, 0.1)
    np.testing.assert_array_equal(M_hat, np.zeros((3, 2)))
    assert report.max_entry_error == 0.0


def test_scalar_bit_formula():
    q, report = matrix_uniform_encode([[0.37]], 1.0, 0.1)
    grid = MatrixGrid.from_target(1, 1, 1.0, 0.1)
    assert grid.delta == pytest.approx(0.2)
    assert q.alphabet == 12
    assert q.bits_used == 4
    assert report.bits_used == 4


def test_random_matrix_within_target(rng):
    for _ in range(50):
        A = rng.standard_normal((4, 4))
        M = 2 * A / operator_norm(A) * rng.uniform()
        _, report, M_hat = _roundtrip(M, 2.0, 0.05)
        assert operator_norm(M_hat - M) <= 0.05
        assert frobenius_norm(M_hat - M) <= report.op_error_bound + 1e-12


def test_encode_rejects_matrices_outside_ball():
    with pytest.raises(InvalidInputError):
        matrix_uniform_encode(np.eye(2) * 1.5, 1.0, 0.1)
    with pytest.raises(InvalidInputError):
        matrix_uniform_encode(np.eye(2), 1.0, 0.0)


def test_decode_checks_metadata():
    q, _ = matrix_uniform_encode(np.eye(2) * 0.5, 1.0, 0.1)
    with pytest.raises(InvalidInputError):
        matrix_uniform_decode(q, MatrixGrid.from_target(2, 2, 1.0, 0.05))
    with pytest.raises(InvalidInputError):
        matrix_uniform_decode(q, MatrixGrid.from_target(1, 4, 1.0, 0.1))


def test_quantized_matrix_validation():
    with pytest.raises(InvalidInputError):
        QuantizedMatrix(2, 2, 4, np.array([0, 1, 2]))
    with pytest.raises(InvalidInputError):
        QuantizedMatrix(1, 2, 4, np.array([0, 4]))
    q = QuantizedMatrix(1, 2, 4, np.array([0, 3]))
    assert q == QuantizedMatrix(1, 2, 4, [0, 3])
    assert q != QuantizedMatrix(1, 2, 5, [0, 3])
    assert q.bits_used == 4
    with pytest.raises(ValueError):
        q.codes[0] = 1


def test_symbol_bits():
    assert symbol_bits(2) == 1
    assert symbol_bits(3) == 2
    assert symbol_bits(12) == 4
    assert symbol_bits(2 ** 31) == 31


def test_budget_grid_fits_and_uses_finest_step():
    for bits in (16, 17, 40, 64, 1000):
        grid = MatrixGrid.from_budget(2, 2, 3.0, bits)
        assert grid.bits <= bits
        b = min(bits // 4, 31)
        assert grid.bits_per_symbol == b


def test_one_bit_grid_rounds_ball_to_zero():
    grid = MatrixGrid.from_budget(2, 2, 1.0, 4)
    assert grid.alphabet == 2
    M = np.array([[0.9, -0.1], [0.2, 0.5]]) / 1.2
    q, report = encode_on_grid(M, grid)
    assert q.bits_used == 4
    np.testing.assert_array_equal(matrix_uniform_decode(q, grid), 0.0)


def test_budget_below_one_bit_per_entry():
    with pytest.raises(InsufficientBudgetError) as info:
        encode_within_budget(np.zeros((3, 3)), 1.0, 8)
    assert info.value.entries == 9
    assert info.value.budget == 8


def test_encode_within_budget_reports_both_errors(rng):
    A = rng.standard_normal((3, 5))
    M = A / operator_norm(A)
    q, report, grid = encode_within_budget(M, 1.0, 150)
    assert q.bits_used <= 150
    assert frobenius_norm(matrix_uniform_decode(q, grid) - M) <= grid.eps + 1e-12
    assert report.net_eps == pytest.approx(net_eps_for_budget(3, 5, 1.0, q.bits_used))
    # the constructive grid pays a log factor over the net
    assert report.net_eps <= grid.eps


@st.composite
def matrices_in_ball(draw):
    rows = draw(st.integers(1, 5))
    cols = draw(st.integers(1, 5))
    entries = draw(st.lists(st.floats(-1, 1, allow_nan=False), min_size=rows * cols, max_size=rows * cols))
    M = np.array(entries).reshape(rows, cols)
    norm = operator_norm(M)
    r = draw(st.floats(0.5, 20.0))
    return M * (r / norm) if norm > 0 else M, r


@settings(max_examples=150, deadline=None)
@given(matrices_in_ball(), st.floats(1e-4, 1.0))
def test_roundtrip_error_bound(case, eps):
    M, r = case
    q, report, M_hat = _roundtrip(M, r, eps)
    assert frobenius_norm(M_hat - M) <= eps * (1 + 1e-9)
    assert int(q.codes.max(initial=0)) < q.alphabet


def test_net_bits_examples():
    assert net_bits_theoretical(1, 1, 1.0, 1.0) == pytest.approx(math.log2(3))
    assert net_bits_theoretical(2, 3, 1.0, 0.3) == pytest.approx(6 * math.log2(10))
    assert 0 < net_bits_theoretical(1, 1, 1.0, 3.0 - 1e-9) < 1e-8
    with pytest.raises(InvalidInputError):
        net_bits_theoretical(1, 1, 1.0, 3.0)


def test_net_eps_inverts_net_bits():
    bits = net_bits_theoretical(3, 4, 2.0, 0.01)
    assert net_eps_for_budget(3, 4, 2.0, bits) == pytest.approx(0.01)
    # 11 sigma^2 self-covariance ball: eps' = 33 sigma^2 2^(-B / d^2)
    assert net_eps_for_budget(2, 2, 11.0, 8) == pytest.approx(33.0 / 4)


def test_packing_examples():
    assert packing_log_lower(2, 2, 1.0, 0.25, NormKind.OP) == pytest.approx(8.0)
    assert packing_log_lower(3, 3, 14.0, math.sqrt(3), NormKind.FR) == pytest.approx(0.0, abs=1e-12)
    assert packing_log_lower(1, 1, 0.7, 0.7, "op") == 0.0
    with pytest.raises(InvalidInputError):
        packing_log_lower(1, 1, 1.0, 0.0)
