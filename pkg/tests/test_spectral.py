import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from chbesov.counterexample import build_profile, mode_packet
from chbesov.spectral import (Field, Grid, MultiplierSymbol, apply_multiplier, derivative,
                              from_spectrum, inverse_helmholtz_symbol, l2_from_spectrum,
                              lp_norm, p_symbol, product, random_bandlimited, to_spectrum)

from . import oracles


@pytest.fixture
def grid64():
    return Grid(1, 64)


def cosine(grid, k=1, shift=0.0):
    return Field.from_function(grid, lambda x: np.cos(k * x + shift))


def test_grid_rejects_bad_sizes():
    with pytest.raises(ValueError):
        Grid(1, 100)
    with pytest.raises(ValueError):
        Grid(0, 64)


def test_grid_geometry(grid64):
    assert grid64.x[0] == pytest.approx(-np.pi)
    assert grid64.dx == pytest.approx(2 * np.pi / 64)
    assert grid64.dealias_k == 21
    assert grid64.metadata()["grid_N"] == 64


def test_cos_spectrum_is_two_spikes(grid64):
    c = to_spectrum(cosine(grid64))
    xi = grid64.xi_full
    assert c[xi == 1][0] == pytest.approx(32)
    assert c[xi == -1][0] == pytest.approx(32)
    others = np.abs(c[np.abs(xi) != 1])
    assert others.max() < 1e-12


def test_zero_spectrum(grid64):
    assert not np.any(to_spectrum(Field.zeros(grid64)))


def test_round_trip_random(grid64):
    f = random_bandlimited(grid64, np.random.default_rng(3))
    back = from_spectrum(to_spectrum(f), grid64)
    assert np.abs(back.samples - f.samples).max() <= 1e-12 * np.abs(f.samples).max()


def test_delta_at_zero_is_constant(grid64):
    c = np.zeros(64, dtype=complex)
    c[0] = 64
    assert np.allclose(from_spectrum(c, grid64).samples, 1.0, atol=1e-14)


def test_hermitian_pair_gives_cosine():
    grid = Grid(2, 64)
    c = np.zeros(64, dtype=complex)
    idx = np.nonzero(np.isclose(np.abs(grid.xi_full), 2 / grid.L))[0]
    c[idx] = 32
    f = from_spectrum(c, grid)
    assert np.abs(f.samples - np.cos(2 * grid.x / grid.L)).max() < 1e-13


def test_non_hermitian_rejected(grid64):
    c = np.zeros(64, dtype=complex)
    c[1] = 1.0
    with pytest.raises(ValueError, match="Hermitian"):
        from_spectrum(c, grid64)


def test_derivative_of_sine(grid64):
    f = Field.from_function(grid64, lambda x: np.sin(3 * x))
    assert np.abs(derivative(f).samples - 3 * np.cos(3 * grid64.x)).max() <= 1e-11


def test_derivative_of_constant(grid64):
    f = Field(grid64, np.full(64, 2.5))
    assert np.abs(derivative(f).samples).max() < 1e-13


def test_derivative_of_mode_packet_matches_product_rule():
    grid = Grid(192, 2**15)
    f = mode_packet(5, grid)
    omega = 17 / 12 * 2**5
    x = grid.x[grid.N // 2 - 200: grid.N // 2 + 200: 7]
    expected = (oracles.profile_derivative(x) * np.cos(omega * x)
                - omega * oracles.profile(x) * np.sin(omega * x))
    got = derivative(f).samples[grid.N // 2 - 200: grid.N // 2 + 200: 7]
    assert np.abs(got - expected).max() <= 1e-9


def test_second_derivative_is_minus_xi_squared():
    grid = Grid(3, 256)
    f = random_bandlimited(grid, np.random.default_rng(5))
    sym = MultiplierSymbol.from_function(grid, lambda xi: -xi**2)
    diff = derivative(derivative(f)).samples - apply_multiplier(f, sym).samples
    assert np.abs(diff).max() <= 1e-11 * np.abs(derivative(derivative(f)).samples).max()


def test_inverse_helmholtz_on_cosine(grid64):
    out = apply_multiplier(cosine(grid64), inverse_helmholtz_symbol(grid64))
    assert np.abs(out.samples - 0.5 * np.cos(grid64.x)).max() < 1e-14


def test_p_operator_on_cos2x(grid64):
    out = apply_multiplier(cosine(grid64, 2), p_symbol(grid64))
    assert np.abs(out.samples - 0.4 * np.sin(2 * grid64.x)).max() < 1e-14


def test_p_operator_kills_constants(grid64):
    out = apply_multiplier(Field(grid64, np.full(64, 3.0)), p_symbol(grid64))
    assert np.abs(out.samples).max() == 0.0


def test_multiplier_lattice_mismatch(grid64):
    with pytest.raises(ValueError, match="lattice"):
        apply_multiplier(cosine(grid64), p_symbol(Grid(1, 128)))


def test_non_hermitian_full_symbol_rejected():
    vals = np.zeros(8, dtype=complex)
    vals[1] = 1j
    with pytest.raises(ValueError):
        MultiplierSymbol.from_full(vals)


def test_lp_norms_of_cosine(grid64):
    f = cosine(grid64)
    assert lp_norm(f, 2) == pytest.approx(math.sqrt(math.pi), abs=1e-10)
    assert lp_norm(f, math.inf) == pytest.approx(1.0, abs=1e-12)
    with pytest.raises(ValueError):
        lp_norm(f, 0.5)


def test_parseval(grid64):
    f = random_bandlimited(grid64, np.random.default_rng(11))
    assert l2_from_spectrum(f.rspec, grid64) == pytest.approx(lp_norm(f, 2), rel=1e-12)


def test_profile_value_at_origin():
    f = build_profile(Grid(12, 4096)).field
    assert f.samples[2048] == pytest.approx(oracles.profile_at_zero(), abs=1e-10)
    assert f.samples[2048] > 0


@pytest.mark.slow
def test_profile_l1_norm_against_quadrature():
    # the slow exp(-c sqrt|x|) tail needs a wide box; |phi| has kinks, so dx must be small too
    f = build_profile(Grid(384, 2**20)).field
    assert lp_norm(f, 1) == pytest.approx(oracles.profile_l1_norm(), abs=1e-8)


def test_product_matches_pointwise_for_low_bands():
    grid = Grid(1, 64)
    rng = np.random.default_rng(0)
    u = random_bandlimited(grid, rng, kmax=5)
    v = random_bandlimited(grid, rng, kmax=5)
    assert np.abs(product(u, v).samples - u.samples * v.samples).max() < 1e-13


def test_product_is_galerkin_projection():
    grid = Grid(1, 64)
    u = cosine(grid, 15)
    # cos^2(15x) = 1/2 + cos(30x)/2 and 30 lies above the cutoff 21
    assert np.abs(product(u, u).samples - 0.5).max() < 1e-14


def test_random_fields_agree_across_refinement():
    coarse = random_bandlimited(Grid(2, 128), np.random.default_rng(4), kmax=20)
    fine = random_bandlimited(Grid(2, 256), np.random.default_rng(4), kmax=20)
    assert np.abs(fine.samples[::2] - coarse.samples).max() < 1e-12


def test_spectral_arithmetic_keeps_spectrum(grid64):
    f = Field(grid64, rspec=cosine(grid64).rspec)
    g = f - f * 0.5
    assert g.has_spectrum
    assert np.abs(g.samples - 0.5 * np.cos(grid64.x)).max() < 1e-15


@settings(max_examples=25, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), c=st.one_of(st.just(0.0), st.floats(1e-6, 1e3), st.floats(-1e3, -1e-6)),
       p=st.sampled_from([1.0, 2.0, 3.5, math.inf]))
def test_lp_norm_homogeneous(seed, c, p):
    f = random_bandlimited(Grid(1, 32), np.random.default_rng(seed))
    assert lp_norm(f * c, p) == pytest.approx(abs(c) * lp_norm(f, p), rel=1e-12, abs=1e-300)


@settings(max_examples=25, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), n=st.sampled_from([8, 32, 128]))
def test_round_trip_property(seed, n):
    grid = Grid(1, n)
    rng = np.random.default_rng(seed)
    c = rng.standard_normal(n) + 1j * rng.standard_normal(n)
    c = 0.5 * (c + np.conj(c[(-np.arange(n)) % n]))
    back = to_spectrum(from_spectrum(c, grid))
    assert np.abs(back - c).max() <= 1e-12 * np.abs(c).max()
