"""Pathological initial data and the quantities of the Hoelder-failure argument.

The data are u0 = sum_{n=3}^{n_max} n^-2 2^{-ns} phi(x) cos((17/12) 2^n x),
where phi has Fourier transform equal to 1 on |xi| <= 1/4 and supported in
|xi| <= 1/2.  Each term sits in exactly one dyadic block, which on the box
holds exactly because (17/12) 2^n is a lattice frequency when 12 | L.
"""
from __future__ import annotations

import functools
import math
from dataclasses import asdict, dataclass, field as dc_field

import numpy as np
import scipy.special

from .besov import BesovParams, besov_norm, combine_blocks
from .evolution import EvolveConfig, ModelKind, evolve, model_rhs
from .littlewood_paley import DyadicCutoffs, block, build_cutoffs, smooth_transition
from .spectral import Field, Grid, derivative, l2_from_spectrum, lp_norm, product

__all__ = [
    "DATA_N_MIN",
    "profile_symbol",
    "Profile",
    "build_profile",
    "mode_wavenumber",
    "mode_packet",
    "CounterexampleConfig",
    "build_initial_data",
    "first_order_drift",
    "remainder_field",
    "lower_bound_ratio",
    "t_schedule",
    "inverse_square_lr",
    "HolderRecord",
    "holder_quotient",
]

DATA_N_MIN = 3
MODE_NUM, MODE_DEN = 17, 12
PROFILE_INNER, PROFILE_OUTER = 0.25, 0.5


def profile_symbol(xi):
    """Even C-infinity bump: 1 on |xi| <= 1/4, 0 on |xi| >= 1/2."""
    return smooth_transition(np.abs(np.asarray(xi, dtype=float)), PROFILE_INNER, PROFILE_OUTER)


@dataclass(frozen=True, eq=False)
class Profile:
    field: Field
    fourier_support_radius: float = PROFILE_OUTER

    @staticmethod
    def symbol(xi):
        return profile_symbol(xi)

    def lp_norms(self, ps=(1.0, 2.0, 4.0, math.inf)) -> dict:
        return {str(p): lp_norm(self.field, p) for p in ps}


@functools.lru_cache(maxsize=8)
def build_profile(grid: Grid) -> Profile:
    if grid.xi_cut <= PROFILE_OUTER:
        raise ValueError(f"grid cannot resolve |xi| <= 1/2 (cutoff {grid.xi_cut:.3g})")
    return Profile(Field.from_transform(grid, profile_symbol(grid.xi)))


def mode_wavenumber(n: int, grid: Grid) -> int:
    """Integer wavenumber k with k/L = (17/12) 2^n; error if off-lattice."""
    num = MODE_NUM * grid.L * 2**n
    if num % MODE_DEN:
        raise ValueError(f"(17/12)2^{n} is not on the lattice of L={grid.L}; use L divisible by 12")
    return num // MODE_DEN


def mode_packet(n: int, grid: Grid) -> Field:
    """f_n = phi(x) cos((17/12) 2^n x), built by shifting the profile's spectrum."""
    if n < 0:
        raise ValueError(f"n must be non-negative, got {n}")
    kw = mode_wavenumber(n, grid)
    if (kw + grid.L * PROFILE_OUTER) > grid.dealias_k:
        raise ValueError(f"mode n={n} lies above the dealias cutoff {grid.xi_cut:.6g}")
    k = grid.k
    fhat = 0.5 * profile_symbol((k - kw) / grid.L) + 0.5 * profile_symbol((k + kw) / grid.L)
    return Field.from_transform(grid, fhat)


@dataclass(frozen=True)
class CounterexampleConfig:
    bp: BesovParams
    n_max: int
    alpha: float = 0.9
    model: ModelKind = dc_field(default_factory=ModelKind)
    n_min: int = DATA_N_MIN

    def __post_init__(self):
        if self.n_min < DATA_N_MIN:
            raise ValueError(f"n_min must be >= {DATA_N_MIN} for exact block localization")
        if self.n_max < self.n_min:
            raise ValueError(f"n_max={self.n_max} < n_min={self.n_min}")
        if not 0.0 <= self.alpha < 1.0:
            raise ValueError(f"alpha must lie in [0, 1), got {self.alpha}")
        if not self.bp.admissible:
            raise ValueError(f"{self.bp} is outside the well-posedness range")

    @property
    def k_power(self) -> int:
        return self.model.k_power

    def check_grid(self, grid: Grid):
        """Every mode on-lattice and below the dealias cutoff."""
        for n in (self.n_min, self.n_max):
            mode_wavenumber(n, grid)
        if mode_wavenumber(self.n_max, grid) + grid.L * PROFILE_OUTER > grid.dealias_k:
            raise ValueError(f"n_max={self.n_max} lies above the dealias cutoff of {grid}")


def data_coefficient(n: int, s: float) -> float:
    return n ** -2.0 * 2.0 ** (-n * s)


def build_initial_data(cfg: CounterexampleConfig, grid: Grid, profile: Profile | None = None) -> Field:
    """Truncated sum over n = n_min..n_max of n^-2 2^{-ns} f_n."""
    cfg.check_grid(grid)
    if profile is not None and profile.field.grid != grid:
        raise ValueError("profile lives on a different grid")
    acc = np.zeros(grid.nhalf, dtype=complex)
    for n in range(cfg.n_min, cfg.n_max + 1):
        acc += data_coefficient(n, cfg.bp.s) * mode_packet(n, grid).rspec
    return Field(grid, rspec=acc)


def first_order_drift(u0: Field, model: ModelKind) -> Field:
    """u~0 = F(u0): P(u0) - u0 u0_x for CH, Q(v0) - v0^2 v0_x for Novikov."""
    return model_rhs(u0, model)


def remainder_field(u_t: Field, u0: Field, t: float, model: ModelKind,
                    drift: Field | None = None) -> Field:
    """w = u(t) - u0 - t u~0.

    Formed by subtraction, so for very small t it is limited by rounding at
    the size of u0; ``evolve`` returns the same quantity accumulated directly.
    """
    if u_t.grid != u0.grid:
        raise ValueError(f"grid mismatch: {u_t.grid} vs {u0.grid}")
    if t < 0:
        raise ValueError(f"t must be >= 0, got {t}")
    drift = first_order_drift(u0, model) if drift is None else drift
    return u_t - u0 - t * drift


def _power_product(u0: Field, k: int, g: Field) -> Field:
    return product(*([u0] * k), g)


def lower_bound_ratio(u0: Field, n: int, k: int, s: float, p: float, cut: DyadicCutoffs) -> float:
    """r_n = n^2 2^{n(s-1)} ||u0^k d_x Delta_n u0||_{L^p} (pointwise product)."""
    if k not in (1, 2):
        raise ValueError(f"k must be 1 or 2, got {k}")
    if not 0 <= n <= cut.j_max:
        raise ValueError(f"n={n} outside 0..j_max={cut.j_max}")
    g = derivative(block(u0, n, cut)).samples * u0.samples ** k
    return n * n * 2.0 ** (n * (s - 1.0)) * lp_norm(Field(u0.grid, g), p)


def t_schedule(n: int, alpha: float) -> float:
    """t_n with t_n^{1-alpha} = n^3 2^-n."""
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    if not 0.0 <= alpha < 1.0:
        raise ValueError(f"alpha must lie in [0, 1), got {alpha}")
    return (n**3 * 2.0**-n) ** (1.0 / (1.0 - alpha))


def inverse_square_lr(start: int, r: float, stop: int | None = None) -> float:
    """|| (j^-2)_{start <= j <= stop} ||_{l^r}; stop=None sums to infinity."""
    if math.isinf(r):
        return float(start) ** -2
    if stop is None:
        return float(scipy.special.zeta(2.0 * r, start)) ** (1.0 / r)
    j = np.arange(start, stop + 1, dtype=float)
    return float(np.sum(j ** (-2.0 * r)) ** (1.0 / r))


@dataclass
class HolderRecord:
    n: int | None
    t: float
    quotient: float
    besov_distance: float
    remainder_norm: float
    grid_L: int
    grid_N: int
    steps: int
    h1_drift: float
    mass_drift: float
    # pieces of the lower-bound chain, all in quotient units (multiplied by t^-alpha)
    main_term: float = math.nan
    commutator_term: float = math.nan
    nonlocal_term: float = math.nan
    remainder_term: float = math.nan

    @property
    def chain_lower_bound(self) -> float:
        return self.main_term - self.commutator_term - self.nonlocal_term - self.remainder_term

    def as_dict(self) -> dict:
        return asdict(self)


def remainder_params(bp: BesovParams) -> BesovParams:
    """Norm in which w is O(t^2) (high regularity) or O(t^s) (low regularity)."""
    return bp.with_s(bp.s - 2.0) if bp.high_regularity else bp.with_s(0.0)


def chain_terms(u0: Field, drift: Field, w: Field, n: int, t: float, alpha: float,
                bp: BesovParams, model: ModelKind, cut: DyadicCutoffs) -> dict:
    """Measured pieces of ||S_t u0 - u0||_{B^s} >= t 2^{ns}||u0^k d_x Delta_n u0|| - ...

    Every inequality used is a triangle inequality or a single term of a
    Besov sum, so the chain holds exactly on the grid.
    """
    k = model.k_power
    s, p = bp.s, bp.p
    u0x = derivative(u0)
    transport = _power_product(u0, k, u0x)
    nonlocal_part = drift + transport
    main = 2.0 ** (n * s) * lp_norm(_power_product(u0, k, block(u0x, n, cut)), p)
    comm = np.array([lp_norm(block(transport, j, cut) - _power_product(u0, k, block(u0x, j, cut)), p)
                     for j in cut.js])
    commutator = combine_blocks(comm, s, math.inf)
    nonlocal_norm = besov_norm(nonlocal_part, bp.with_r(math.inf), cut)
    if bp.high_regularity:
        w_term = 2.0 ** (2 * n) * besov_norm(w, bp.with_s(s - 2.0).with_r(math.inf), cut)
    else:
        w_term = 2.0 ** (n * s) * besov_norm(w, bp.with_s(0.0).with_r(math.inf), cut)
    scale = t ** (1.0 - alpha)
    return {
        "main_term": scale * main,
        "commutator_term": scale * commutator,
        "nonlocal_term": scale * nonlocal_norm,
        "remainder_term": t ** -alpha * w_term,
    }


def holder_quotient(u0: Field, t: float, alpha: float, bp: BesovParams, model: ModelKind,
                    cfg: EvolveConfig | None = None, cut: DyadicCutoffs | None = None,
                    n: int | None = None) -> HolderRecord:
    """Evolve to t and measure q = t^-alpha ||S_t(u0) - u0||_{B^s_{p,r}}.

    With ``n`` given, the lower-bound chain for block n is measured too.
    """
    if not t > 0:
        raise ValueError(f"t must be positive, got {t}")
    cut = cut or build_cutoffs(u0.grid)
    res = evolve(u0, t, model, cfg)
    drift = first_order_drift(u0, model)
    dist = besov_norm(res.deviation, bp, cut)
    w = res.remainder
    rec = HolderRecord(
        n=n, t=t, quotient=t ** -alpha * dist, besov_distance=dist,
        remainder_norm=besov_norm(w, remainder_params(bp), cut),
        grid_L=u0.grid.L, grid_N=u0.grid.N, steps=res.steps,
        h1_drift=res.h1_drift, mass_drift=res.mass_drift,
    )
    if n is not None:
        for key, val in chain_terms(u0, drift, w, n, t, alpha, bp, model, cut).items():
            setattr(rec, key, val)
    return rec


def block_localization_error(f: Field, n: int, cut: DyadicCutoffs) -> float:
    """max_j ||Delta_j f - delta_{jn} f||_{L^2} / ||f||_{L^2}."""
    if f.grid != cut.grid:
        raise ValueError(f"grid mismatch: field on {f.grid}, cutoffs on {cut.grid}")
    c = f.rspec
    total = l2_from_spectrum(c, f.grid)
    worst = 0.0
    for j in cut.js:
        cj = c * cut.symbol(j)
        err = l2_from_spectrum(cj - c if j == n else cj, f.grid)
        worst = max(worst, err / total)
    return worst
