import math

import numpy as np
import pytest

from chbesov.besov import BesovParams, besov_norm
from chbesov.counterexample import CounterexampleConfig, build_initial_data, first_order_drift
from chbesov.evolution import (EvolveConfig, ModelKind, SolverError, bfamily_rhs, ch_rhs, evolve,
                               h1_invariant, model_rhs, nonlocal_P, novikov_rhs, step_rk4)
from chbesov.experiments import measure_rk4_order
from chbesov.littlewood_paley import build_cutoffs
from chbesov.spectral import Field, Grid, lp_norm, random_bandlimited

CH = ModelKind("ch")
NOVIKOV = ModelKind("novikov")


@pytest.fixture(scope="module")
def grid():
    return Grid(1, 64)


def wave(grid, f):
    return Field.from_function(grid, f)


def sup_err(a: Field, b) -> float:
    return float(np.abs(a.samples - b).max())


def test_model_parsing():
    assert ModelKind.parse("CH") == CH
    assert ModelKind.parse("bfamily:3") == ModelKind("bfamily", 3.0)
    assert str(ModelKind.parse("bfamily:2.5")) == "bfamily:2.5"
    assert ModelKind.parse("novikov").k_power == 2
    with pytest.raises(ValueError):
        ModelKind.parse("kdv")
    assert not NOVIKOV.conserves_mass
    assert not ModelKind("bfamily", 3.0).conserves_h1


@pytest.mark.parametrize("k", [1, 2, 3])
def test_nonlocal_term_on_cosines(grid, k):
    u = wave(grid, lambda x: np.cos(k * x))
    amp = (0.5 - k * k / 4) * (2 * k / (1 + 4 * k * k))
    assert sup_err(nonlocal_P(u), amp * np.sin(2 * k * grid.x)) < 1e-13


def test_nonlocal_term_trivial(grid):
    assert sup_err(nonlocal_P(Field.zeros(grid)), 0) == 0
    assert sup_err(nonlocal_P(Field(grid, np.full(64, 1.3))), 0) < 1e-14


def test_ch_rhs_on_cosine(grid):
    # -u u_x = sin(2x)/2 and P(u) = sin(2x)/10
    assert sup_err(ch_rhs(wave(grid, np.cos)), 0.6 * np.sin(2 * grid.x)) < 1e-13


def test_bfamily_b2_is_ch(grid):
    u = random_bandlimited(grid, np.random.default_rng(0))
    diff = bfamily_rhs(u, 2.0).samples - ch_rhs(u).samples
    assert np.abs(diff).max() <= 1e-12 * np.abs(ch_rhs(u).samples).max()


def test_degasperis_procesi_on_cosine(grid):
    # b=3: -u u_x + P(D)(3/2 u^2) = sin(2x)/2 + 0.75 * (2/5) sin(2x)
    assert sup_err(bfamily_rhs(wave(grid, np.cos), 3.0), 0.8 * np.sin(2 * grid.x)) < 1e-13
    assert sup_err(bfamily_rhs(Field(grid, np.full(64, 0.4)), 3.0), 0) < 1e-14


def _novikov_oracle(v_func, n=128):
    # each term evaluated separately with numpy's FFT on a finer grid
    x = -np.pi + 2 * np.pi * np.arange(n) / n
    k = np.fft.fftfreq(n, 1.0 / n)
    dx_ = lambda f: np.real(np.fft.ifft(1j * k * np.fft.fft(f)))
    helm = lambda f: np.real(np.fft.ifft(np.fft.fft(f) / (1 + k * k)))
    v = v_func(x)
    vx = dx_(v)
    return x, -v * v * vx - helm(0.5 * vx**3 + dx_(1.5 * v * vx * vx + v**3))


def test_novikov_rhs_against_term_oracle(grid):
    x, ref = _novikov_oracle(np.cos)
    got = novikov_rhs(wave(grid, np.cos)).samples
    assert np.abs(got - ref[::2]).max() < 1e-10


def test_novikov_trivial(grid):
    assert sup_err(novikov_rhs(Field.zeros(grid)), 0) == 0
    assert sup_err(novikov_rhs(Field(grid, np.full(64, 0.7))), 0) < 1e-14


def test_ch_rhs_has_zero_mean(grid):
    u = random_bandlimited(grid, np.random.default_rng(1))
    assert abs(ch_rhs(u).integral()) <= 1e-12


def test_step_keeps_constants(grid):
    u = Field(grid, np.full(64, 0.3))
    assert sup_err(step_rk4(u, 0.1, CH), 0.3) < 1e-15
    with pytest.raises(ValueError):
        step_rk4(u, 0.0, CH)


def test_local_error_order(grid):
    u = wave(grid, lambda x: 0.4 * np.cos(x) + 0.2 * np.sin(2 * x))

    def local_err(dt):
        ref = u
        for _ in range(16):
            ref = step_rk4(ref, dt / 16, CH)
        return lp_norm(step_rk4(u, dt, CH) - ref, 2)

    exponent = math.log2(local_err(0.2) / local_err(0.1))
    assert exponent == pytest.approx(5.0, abs=0.2)


@pytest.mark.parametrize("model", [CH, NOVIKOV, ModelKind("bfamily", 3.0)])
def test_global_order(model):
    assert measure_rk4_order(model) == pytest.approx(4.0, abs=0.2)


def test_taylor_single_step(grid):
    u = wave(grid, np.cos)
    ratios = []
    for dt in (1e-3, 5e-4):
        w = step_rk4(u, dt, CH) - u - ch_rhs(u) * dt
        ratios.append(lp_norm(w, 2) / dt**2)
    assert ratios[0] == pytest.approx(ratios[1], rel=1e-2)


def test_evolve_zero_time(grid):
    u0 = random_bandlimited(grid, np.random.default_rng(2))
    res = evolve(u0, 0.0, CH)
    assert res.steps == 0
    assert np.array_equal(res.u.rspec, u0.rspec)


def test_evolve_errors(grid):
    u0 = wave(grid, np.cos)
    with pytest.raises(ValueError):
        evolve(u0, -1.0, CH)
    with pytest.raises(SolverError, match="max_steps"):
        evolve(u0, 10.0, CH, EvolveConfig(max_steps=3))
    with pytest.raises(ValueError, match="dealias"):
        evolve(wave(grid, lambda x: np.cos(30 * x)), 0.1, CH)


def test_evolve_matches_plain_rk4(grid):
    u0 = wave(grid, lambda x: 0.4 * np.cos(x) + 0.2 * np.sin(2 * x))
    for model in (CH, NOVIKOV):
        res = evolve(u0, 0.3, model, EvolveConfig(dt_max=0.3 / 8))
        u = u0
        for _ in range(8):
            u = step_rk4(u, 0.3 / 8, model)
        assert res.steps == 8
        assert lp_norm(res.u - u, 2) < 1e-14


def test_evolve_temporal_self_consistency(grid):
    u0 = wave(grid, lambda x: 0.1 * np.cos(x) + 0.05 * np.sin(3 * x))
    a = evolve(u0, 0.1, CH).u
    b = evolve(u0, 0.1, CH, EvolveConfig(dt_safety=0.5)).u
    assert lp_norm(a - b, 2) <= 1e-9


def test_first_order_expansion_on_counterexample_data():
    grid = Grid(12, 2**13)
    bp = BesovParams(2.0, 2.0, 2.0)
    u0 = build_initial_data(CounterexampleConfig(bp, 6), grid)
    cut = build_cutoffs(grid)
    drift = first_order_drift(u0, CH)
    consts = []
    for t in (1e-6, 2e-6):
        res = evolve(u0, t, CH)
        w_direct = res.u - u0 - drift * t
        consts.append(besov_norm(res.remainder, bp.with_s(0.0), cut) / t**2)
        # the subtraction form agrees up to rounding at the size of u0
        assert lp_norm(w_direct - res.remainder, 2) < 1e-15 * lp_norm(u0, 2) * 10
    assert consts[0] == pytest.approx(consts[1], rel=1e-4)


def test_h1_invariant_values(grid):
    assert h1_invariant(wave(grid, np.cos)) == pytest.approx(2 * math.pi, abs=1e-10)
    assert h1_invariant(Field.zeros(grid)) == 0.0


def test_conservation_along_ch_trajectory(grid):
    u0 = wave(grid, lambda x: 0.5 * np.cos(x) + 0.25 * np.sin(2 * x) + 0.1)
    res = evolve(u0, 0.01, CH)
    assert res.h1_drift <= 1e-6
    assert res.mass_drift <= 1e-10
    assert res.u.integral() == pytest.approx(u0.integral(), rel=1e-12)


def test_novikov_mass_is_not_invariant(grid):
    v0 = wave(grid, lambda x: 0.5 * np.cos(x) + 0.25 * np.sin(2 * x))
    res = evolve(v0, 0.3, NOVIKOV)
    assert res.h1_drift <= 1e-6
    assert res.mass_drift > 1e-4


def test_model_rhs_dispatch(grid):
    u = random_bandlimited(grid, np.random.default_rng(3))
    assert np.array_equal(model_rhs(u, CH).rspec, ch_rhs(u).rspec)
