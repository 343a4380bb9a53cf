import math

import numpy as np
import pytest

from chbesov.besov import BesovParams, besov_norm, block_lp_norms
from chbesov.counterexample import (CounterexampleConfig, block_localization_error,
                                    build_initial_data, build_profile, data_coefficient,
                                    first_order_drift, holder_quotient, inverse_square_lr,
                                    lower_bound_ratio, mode_packet, mode_wavenumber,
                                    profile_symbol, remainder_field, t_schedule)
from chbesov.evolution import ModelKind, ch_rhs, evolve
from chbesov.experiments import fit_power_law
from chbesov.littlewood_paley import block, build_cutoffs
from chbesov.spectral import Field, Grid, l2_from_spectrum, lp_norm

from . import oracles

S2 = BesovParams(2.0, 2.0, 2.0)
CH = ModelKind("ch")


@pytest.fixture(scope="module")
def grid():
    return Grid(12, 2**14)


@pytest.fixture(scope="module")
def cut(grid):
    return build_cutoffs(grid)


@pytest.fixture(scope="module")
def u0(grid):
    return build_initial_data(CounterexampleConfig(S2, 8), grid)


def test_profile_symbol_values():
    assert profile_symbol(0.2) == 1.0
    assert profile_symbol(-0.25) == 1.0
    assert profile_symbol(0.6) == 0.0
    assert 0 < profile_symbol(0.4) < 1


def test_profile_norms_are_reported(grid):
    norms = build_profile(grid).lp_norms()
    assert set(norms) == {"1.0", "2.0", "4.0", "inf"}
    assert norms["inf"] == pytest.approx(oracles.profile_at_zero(), rel=1e-10)


def test_mode_lattice_checks():
    with pytest.raises(ValueError, match="lattice"):
        mode_wavenumber(3, Grid(1, 64))
    assert mode_wavenumber(3, Grid(12, 64)) == 17 * 8
    with pytest.raises(ValueError, match="dealias"):
        mode_packet(12, Grid(12, 2**14))


def test_config_validation():
    with pytest.raises(ValueError):
        CounterexampleConfig(S2, 8, n_min=2)
    with pytest.raises(ValueError):
        CounterexampleConfig(S2, 8, alpha=1.0)
    with pytest.raises(ValueError):
        CounterexampleConfig(BesovParams(1.2, 2.0, 2.0), 8)
    with pytest.raises(ValueError):
        build_initial_data(CounterexampleConfig(S2, 11), Grid(12, 2**14))


def test_blocks_of_initial_data(grid, cut, u0):
    for j in cut.js:
        expected = (mode_packet(j, grid) * data_coefficient(j, 2.0)) if 3 <= j <= 8 else Field.zeros(grid)
        err = l2_from_spectrum(block(u0, j, cut).rspec - expected.rspec, grid)
        assert err <= 1e-12 * l2_from_spectrum(u0.rspec, grid)


def test_block_norms_of_initial_data(grid, cut, u0):
    norms = block_lp_norms(u0, 2.0, cut)
    for n in range(3, 9):
        weighted = 2.0 ** (n * 2.0) * norms[n + 1]
        assert weighted == pytest.approx(n**-2 * lp_norm(mode_packet(n, grid), 2.0), rel=1e-12)


def test_besov_bound_on_initial_data(grid, cut, u0):
    phi = build_profile(grid).field
    for r in (1.0, 2.0, math.inf):
        bp = S2.with_r(r)
        bound = inverse_square_lr(3, r) * lp_norm(phi, 2.0)
        assert besov_norm(u0, bp, cut) <= bound * (1 + 1e-10)


def test_single_term_data(grid, cut):
    single = build_initial_data(CounterexampleConfig(S2, 5, n_min=5), grid)
    assert besov_norm(single, S2, cut) == pytest.approx(5**-2 * lp_norm(mode_packet(5, grid), 2), rel=1e-12)
    assert block_localization_error(mode_packet(7, grid), 7, cut) <= 1e-12


def test_inverse_square_sums():
    assert inverse_square_lr(3, 2.0) == pytest.approx(math.sqrt(math.pi**4 / 90 - 1 - 1 / 16), rel=1e-14)
    assert inverse_square_lr(3, 1.0) == pytest.approx(math.pi**2 / 6 - 1.25, rel=1e-14)
    assert inverse_square_lr(3, math.inf) == pytest.approx(1 / 9)
    assert inverse_square_lr(3, 1.0, 4) == pytest.approx(1 / 9 + 1 / 16)


def test_time_schedule():
    assert t_schedule(12, 0.0) == 0.421875
    assert t_schedule(12, 0.5) == 0.177978515625
    assert all(t_schedule(n + 1, 0.9) < t_schedule(n, 0.9) for n in range(5, 20))
    with pytest.raises(ValueError):
        t_schedule(12, 1.0)
    with pytest.raises(ValueError):
        t_schedule(0, 0.5)


def test_drift_basics(grid, u0):
    assert lp_norm(first_order_drift(Field.zeros(grid), CH), np.inf) == 0
    assert np.array_equal(first_order_drift(u0, CH).rspec, ch_rhs(u0).rspec)


def test_drift_is_time_derivative(grid, u0):
    drift = first_order_drift(u0, CH)
    pts = []
    for t in (1e-4, 1e-3, 1e-2):
        res = evolve(u0, t, CH)
        pts.append((t, lp_norm(res.deviation * (1 / t) - drift, 2)))
    slope, _, _ = fit_power_law(pts)
    assert slope == pytest.approx(1.0, abs=0.1)


def test_remainder_field_identities(grid, u0):
    assert lp_norm(remainder_field(u0, u0, 0.0, CH), 2) == 0
    t = 0.01
    shifted = u0 + first_order_drift(u0, CH) * t
    assert lp_norm(remainder_field(shifted, u0, t, CH), 2) <= 1e-15 * lp_norm(u0, 2)
    with pytest.raises(ValueError):
        remainder_field(Field.zeros(Grid(12, 2**13)), u0, t, CH)
    with pytest.raises(ValueError):
        remainder_field(u0, u0, -1.0, CH)


def test_lower_bound_ratio_validation(grid, cut, u0):
    assert lower_bound_ratio(Field.zeros(grid), 5, 1, 2.0, 2.0, cut) == 0.0
    with pytest.raises(ValueError):
        lower_bound_ratio(u0, 5, 3, 2.0, 2.0, cut)
    with pytest.raises(ValueError):
        lower_bound_ratio(u0, cut.j_max + 1, 1, 2.0, 2.0, cut)


@pytest.mark.slow
def test_lower_bound_ratio_against_product_rule():
    # wide box so the real-line profile and its periodization agree
    grid = Grid(192, 2**16)
    cut = build_cutoffs(grid)
    n_max = 6
    u0 = build_initial_data(CounterexampleConfig(S2, n_max), grid)
    x = grid.x
    phi, dphi = oracles.profile(x), oracles.profile_derivative(x)
    omega = lambda n: 17 / 12 * 2.0**n
    u0_ref = sum(n**-2 * 2.0 ** (-2 * n) * phi * np.cos(omega(n) * x) for n in range(3, n_max + 1))
    inner_half = np.abs(x) < grid.length / 4  # near the box edge the periodic images still reach 1e-9
    assert np.abs(u0.samples - u0_ref)[inner_half].max() <= 1e-12
    n = n_max
    for k in (1, 2):
        inner = 2.0**-n * dphi * np.cos(omega(n) * x) - 17 / 12 * phi * np.sin(omega(n) * x)
        expected = math.sqrt(np.sum((u0_ref**k * inner) ** 2) * grid.dx)
        assert lower_bound_ratio(u0, n, k, 2.0, 2.0, cut) == pytest.approx(expected, rel=1e-9)


def test_holder_record_and_chain():
    grid = Grid(12, 2**18)
    cut = build_cutoffs(grid)
    n, alpha = 12, 0.9
    u0 = build_initial_data(CounterexampleConfig(S2, n), grid)
    t = t_schedule(n, alpha)
    rec = holder_quotient(u0, t, alpha, S2, CH, cut=cut, n=n)
    assert rec.quotient == pytest.approx(t**-alpha * rec.besov_distance, rel=1e-15)
    assert rec.grid_N == 2**18 and rec.steps >= 1
    assert rec.main_term > rec.commutator_term + rec.nonlocal_term + rec.remainder_term
    assert rec.quotient >= rec.chain_lower_bound > 0
    assert set(rec.as_dict()) >= {"n", "t", "quotient", "besov_distance", "remainder_norm"}
    with pytest.raises(ValueError):
        holder_quotient(u0, 0.0, alpha, S2, CH)


def test_quotient_vanishes_for_fixed_data_as_t_shrinks(grid, u0):
    # fixed data: q ~ t^(1-alpha) ||drift||, so the schedule must move the data with n
    qs = [holder_quotient(u0, t, 0.9, S2, CH).quotient for t in (1e-2, 1e-4, 1e-6)]
    assert qs[0] > qs[1] > qs[2]
