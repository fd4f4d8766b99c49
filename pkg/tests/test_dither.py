import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from pydantic import ValidationError

from core.errors import InvalidInputError
from core.seeding import make_rng
from quantize.dither import (
    ScalarDitherConfig,
    dither_decode,
    dither_decode_array,
    dither_encode,
    dither_encode_array,
)

DRAWS = 100_000


@pytest.fixture
def cfg() -> ScalarDitherConfig:
    return ScalarDitherConfig(L=4.0, step=0.25, N=16)


def test_config_properties(cfg):
    assert cfg.alphabet == 33
    assert cfg.bits_per_symbol == 6
    assert ScalarDitherConfig.from_levels(8.0, 1).alphabet == 3
    assert ScalarDitherConfig.from_levels(8.0, 1).bits_per_symbol == 2
    with pytest.raises(ValidationError):
        ScalarDitherConfig(L=4.0, step=0.3, N=16)


def test_from_radius_inflates_to_whole_steps():
    cfg = ScalarDitherConfig.from_radius(1.0, 0.3)
    assert cfg.N == 4
    assert cfg.L == pytest.approx(1.2)
    assert ScalarDitherConfig.from_radius(1.0, 0.25).N == 4
    with pytest.raises(InvalidInputError):
        ScalarDitherConfig.from_radius(0.0, 0.1)


def test_grid_points_are_deterministic(cfg, rng):
    for _ in range(100):
        assert dither_encode(0.0, cfg, rng) == cfg.N
        assert dither_encode(cfg.L, cfg, rng) == 2 * cfg.N
        assert dither_encode(-cfg.L, cfg, rng) == 0
        assert dither_encode(3 * cfg.step, cfg, rng) == cfg.N + 3


def test_decode_endpoints(cfg):
    assert dither_decode(cfg.N, cfg) == 0.0
    assert dither_decode(0, cfg) == -cfg.L
    assert dither_decode(2 * cfg.N, cfg) == cfg.L
    with pytest.raises(InvalidInputError):
        dither_decode(2 * cfg.N + 1, cfg)


def test_rejects_values_outside_clip(cfg, rng):
    with pytest.raises(InvalidInputError):
        dither_encode(cfg.L * 1.01, cfg, rng)
    with pytest.raises(InvalidInputError):
        dither_encode_array(np.array([0.0, np.nan]), cfg, rng)


def test_round_up_frequency(cfg):
    x = 0.25 * cfg.step
    codes = dither_encode_array(np.full(DRAWS, x), cfg, make_rng(11))
    assert set(np.unique(codes)) <= {cfg.N, cfg.N + 1}
    frequency = float(np.mean(codes == cfg.N + 1))
    assert abs(frequency - 0.25) <= 3 * math.sqrt(0.25 * 0.75 / DRAWS)


def test_unbiased_at_off_grid_values(cfg):
    gen = make_rng(2024)
    values = gen.uniform(-cfg.L, cfg.L, size=20)
    tolerance = 4 * cfg.step * math.sqrt(0.25 / DRAWS)
    for index, x in enumerate(values):
        decoded = dither_decode_array(dither_encode_array(np.full(DRAWS, x), cfg, make_rng(index)), cfg)
        assert np.all(np.abs(decoded - x) < cfg.step)
        assert abs(decoded.mean() - x) <= tolerance


@settings(max_examples=200, deadline=None)
@given(
    x=st.floats(min_value=-4.0, max_value=4.0, allow_nan=False),
    seed=st.integers(min_value=0, max_value=2 ** 32),
)
def test_codes_stay_in_alphabet_and_neighbour_x(x, seed):
    cfg = ScalarDitherConfig(L=4.0, step=0.25, N=16)
    code = dither_encode(x, cfg, make_rng(seed))
    assert 0 <= code <= 2 * cfg.N
    assert abs(dither_decode(code, cfg) - x) < cfg.step + 1e-12
