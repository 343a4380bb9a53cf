"""Nonlocal transport right-hand sides and a dealiased RK4 integrator.

Models are written as u_t = F(u):

* CH:        F(u) = -u u_x + P(D)(u^2 + u_x^2/2),   P(D) = -d_x (1 - d_xx)^{-1}
* b-family:  F(u) = -u u_x + P(D)((b/2) u^2 + ((3-b)/2) u_x^2)
* Novikov:   F(v) = -v^2 v_x - (1 - d_xx)^{-1}(v_x^3/2 + d_x(3/2 v v_x^2 + v^3))

The state is kept as a half spectrum truncated at the 2/3-rule cutoff.
Quadratic products are alias-free on the native grid; cubic products are
formed on a padded grid (3N/2 points) so Novikov keeps the same band.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.fft as sfft

from .spectral import (Field, Grid, derivative_symbol, from_padded, inverse_helmholtz_symbol,
                       lp_norm, p_symbol, pad_size, product, to_padded, derivative,
                       apply_multiplier)

__all__ = [
    "ModelKind",
    "EvolveConfig",
    "EvolveResult",
    "SolverError",
    "nonlocal_P",
    "ch_rhs",
    "bfamily_rhs",
    "novikov_rhs",
    "model_rhs",
    "step_rk4",
    "evolve",
    "h1_invariant",
]


class SolverError(RuntimeError):
    """Raised when a trajectory blows up or exhausts its step budget."""

    def __init__(self, message: str, t: float):
        super().__init__(f"{message} (t reached = {t!r})")
        self.t = t


@dataclass(frozen=True)
class ModelKind:
    tag: str = "ch"
    b: float = 2.0

    def __post_init__(self):
        if self.tag not in ("ch", "bfamily", "novikov"):
            raise ValueError(f"unknown model {self.tag!r}")

    @classmethod
    def parse(cls, text: str) -> "ModelKind":
        text = text.strip().lower()
        if text == "ch":
            return cls("ch")
        if text == "novikov":
            return cls("novikov")
        if text.startswith("bfamily"):
            _, _, b = text.partition(":")
            return cls("bfamily", float(b) if b else 2.0)
        raise ValueError(f"unknown model {text!r}; expected ch, bfamily:<b> or novikov")

    def __str__(self):
        return f"bfamily:{self.b:g}" if self.tag == "bfamily" else self.tag

    @property
    def degree(self) -> int:
        return 3 if self.tag == "novikov" else 2

    @property
    def k_power(self) -> int:
        """Power of u0 in the lower-bound quantity u0^k d_x Delta_n u0."""
        return 2 if self.tag == "novikov" else 1

    @property
    def conserves_mass(self) -> bool:
        # CH/b-family right-hand sides are exact x-derivatives; Novikov's is not
        return self.tag != "novikov"

    @property
    def conserves_h1(self) -> bool:
        return self.tag in ("ch", "novikov") or self.b == 2.0


@dataclass(frozen=True)
class EvolveConfig:
    dt_safety: float = 1.0
    max_steps: int = 1_000_000
    integrator: str = "rk4"
    dt_max: float | None = None

    def __post_init__(self):
        if not 0.0 < self.dt_safety <= 1.0:
            raise ValueError(f"dt_safety must lie in (0, 1], got {self.dt_safety}")
        if self.dt_max is not None and not self.dt_max > 0:
            raise ValueError(f"dt_max must be positive, got {self.dt_max}")
        if self.integrator != "rk4":
            raise ValueError(f"only the rk4 integrator is provided, got {self.integrator!r}")


@dataclass(frozen=True)
class EvolveResult:
    u: Field
    t: float
    steps: int
    h1_drift: float
    mass_drift: float
    deviation: Field  # u - u0, accumulated without forming u first
    remainder: Field  # u - u0 - t F(u0)


def _truncated(uh: np.ndarray, grid: Grid) -> np.ndarray:
    c = np.array(uh, dtype=complex)
    c[grid.dealias_k + 1:] = 0.0
    return c


def _quadratic_rhs(uh: np.ndarray, grid: Grid, a: float, c: float):
    """-(1/2) d_x u^2 + P(D)(a u^2 + c u_x^2); returns (rhs, max|u|)."""
    n, kc = grid.N, grid.dealias_k
    ik = derivative_symbol(grid).values
    u = sfft.irfft(uh, n)
    ux = sfft.irfft(ik * uh, n)
    u2 = sfft.rfft(u * u)
    u2[kc + 1:] = 0.0
    ux2 = sfft.rfft(ux * ux)
    ux2[kc + 1:] = 0.0
    rhs = -0.5 * ik * u2 + p_symbol(grid).values * (a * u2 + c * ux2)
    return rhs, float(np.abs(u).max())


def _novikov_rhs(vh: np.ndarray, grid: Grid):
    kc = grid.dealias_k
    m = pad_size(grid, 3)
    ik = derivative_symbol(grid).values
    helm = inverse_helmholtz_symbol(grid).values
    v = to_padded(vh, grid, m)
    vx = to_padded(ik * vh, grid, m)
    vx2 = vx * vx
    v3 = from_padded(v * v * v, grid, kc)
    v_vx2 = from_padded(v * vx2, grid, kc)
    vx3 = from_padded(vx2 * vx, grid, kc)
    rhs = -ik * v3 / 3.0 - helm * (0.5 * vx3 + ik * (1.5 * v_vx2 + v3))
    return rhs, float(np.abs(v).max())


def _rhs_fn(model: ModelKind):
    if model.tag == "ch":
        return lambda uh, grid: _quadratic_rhs(uh, grid, 1.0, 0.5)
    if model.tag == "bfamily":
        a, c = model.b / 2.0, (3.0 - model.b) / 2.0
        return lambda uh, grid: _quadratic_rhs(uh, grid, a, c)
    return _novikov_rhs


def model_rhs(u: Field, model: ModelKind) -> Field:
    """F(u) for the given model, products dealiased."""
    rhs, _ = _rhs_fn(model)(_truncated(u.rspec, u.grid), u.grid)
    return Field(u.grid, rspec=rhs)


def nonlocal_P(u: Field) -> Field:
    """P(u) = P(D)(u^2 + (d_x u)^2 / 2)."""
    ux = derivative(u)
    return apply_multiplier(product(u, u) + 0.5 * product(ux, ux), p_symbol(u.grid))


def ch_rhs(u: Field) -> Field:
    return model_rhs(u, ModelKind("ch"))


def bfamily_rhs(u: Field, b: float) -> Field:
    return model_rhs(u, ModelKind("bfamily", float(b)))


def novikov_rhs(v: Field) -> Field:
    return model_rhs(v, ModelKind("novikov"))


def _rk4(uh, dt, grid, f, k1):
    k2, _ = f(uh + 0.5 * dt * k1, grid)
    k3, _ = f(uh + 0.5 * dt * k2, grid)
    k4, _ = f(uh + dt * k3, grid)
    return uh + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def step_rk4(u: Field, dt: float, model: ModelKind) -> Field:
    """One classical RK4 step of u_t = F(u)."""
    if not dt > 0:
        raise ValueError(f"dt must be positive, got {dt}")
    f = _rhs_fn(model)
    uh = _truncated(u.rspec, u.grid)
    k1, _ = f(uh, u.grid)
    new = _rk4(uh, dt, u.grid, f, k1)
    if not np.all(np.isfinite(new)):
        raise SolverError("non-finite values after RK4 step; shrink dt", dt)
    return Field(u.grid, rspec=new)


def _h1_from_spectrum(uh: np.ndarray, grid: Grid) -> float:
    w = (1.0 + grid.xi**2) * np.abs(uh) ** 2
    total = 2.0 * w.sum() - w[0] - w[-1]
    return float(total * grid.dx / grid.N)


def h1_invariant(u: Field) -> float:
    """int (u^2 + u_x^2) dx over the box."""
    return _h1_from_spectrum(u.rspec, u.grid)


class _IncrementRHS:
    """G(eta) = F(u0 + eta) - F(u0) for a fixed base state u0.

    Every product is written in difference form (a^2 - b^2 = (a-b)(a+b) and
    so on), so G carries rounding relative to its own size rather than to
    the size of u0.  This keeps u(t) - u0 - t F(u0) accurate for t tiny.
    """

    def __init__(self, u0h: np.ndarray, grid: Grid, model: ModelKind):
        self.grid = grid
        self.model = model
        self.ik = derivative_symbol(grid).values
        if model.degree == 2:
            self.m = grid.N
            self.a, self.c = (1.0, 0.5) if model.tag == "ch" else (model.b / 2.0, (3.0 - model.b) / 2.0)
            self.p = p_symbol(grid).values
            self.base = sfft.irfft(u0h, self.m)
            self.base_x = sfft.irfft(self.ik * u0h, self.m)
        else:
            self.m = pad_size(grid, 3)
            self.helm = inverse_helmholtz_symbol(grid).values
            self.base = to_padded(u0h, grid, self.m)
            self.base_x = to_padded(self.ik * u0h, grid, self.m)

    def _samples(self, eta_h):
        if self.model.degree == 2:
            return sfft.irfft(eta_h, self.m), sfft.irfft(self.ik * eta_h, self.m)
        return to_padded(eta_h, self.grid, self.m), to_padded(self.ik * eta_h, self.grid, self.m)

    def __call__(self, eta_h: np.ndarray):
        grid, kc, ik = self.grid, self.grid.dealias_k, self.ik
        e, ex = self._samples(eta_h)
        v0, v0x = self.base, self.base_x
        v = v0 + e
        umax = float(np.abs(v).max())
        if self.model.degree == 2:
            d2 = sfft.rfft(e * (v + v0))
            d2[kc + 1:] = 0.0
            dx2 = sfft.rfft(ex * (v0x + ex + v0x))
            dx2[kc + 1:] = 0.0
            return -0.5 * ik * d2 + self.p * (self.a * d2 + self.c * dx2), umax
        vx = v0x + ex
        d3 = from_padded(e * (v * v + v * v0 + v0 * v0), grid, kc)
        d_vvx2 = from_padded(e * vx * vx + v0 * ex * (vx + v0x), grid, kc)
        dx3 = from_padded(ex * (vx * vx + vx * v0x + v0x * v0x), grid, kc)
        return -ik * d3 / 3.0 - self.helm * (0.5 * dx3 + ik * (1.5 * d_vvx2 + d3)), umax


def evolve(u0: Field, t_end: float, model: ModelKind, cfg: EvolveConfig | None = None) -> EvolveResult:
    """Integrate to ``t_end`` with dt = dt_safety*dx/max(1, |u|_inf + |u|_inf^2).

    The unknown actually advanced is rho = u - u0 - t F(u0), through
    rho' = F(u0 + t F(u0) + rho) - F(u0); classical RK4 on this system is
    the same scheme as RK4 on u, but the small quantities never pass
    through a sum with u0.  The last step is shortened so t_end is hit
    exactly.  ``h1_drift`` is the largest relative change of
    int(u^2+u_x^2) along the way; ``mass_drift`` is |int u(t) - int u0|
    relative to ||u0||_{L^1}.
    """
    cfg = cfg or EvolveConfig()
    if t_end < 0:
        raise ValueError(f"t_end must be >= 0, got {t_end}")
    grid = u0.grid
    if not u0.is_resolved():
        raise ValueError("initial data has content above the dealias cutoff")
    uh0 = _truncated(u0.rspec, grid)
    f0, _ = _rhs_fn(model)(uh0, grid)
    g = _IncrementRHS(uh0, grid, model)
    h1_0 = _h1_from_spectrum(uh0, grid)
    h1_drift = 0.0
    rho = np.zeros_like(uh0)
    t, steps = 0.0, 0
    while t < t_end:
        k1, umax = g(t * f0 + rho)
        dt = cfg.dt_safety * grid.dx / max(1.0, umax + umax * umax)
        if cfg.dt_max is not None:
            dt = min(dt, cfg.dt_max)
        last = t + dt >= t_end
        if last:
            dt = t_end - t
        half = t + 0.5 * dt
        k2, _ = g(half * f0 + rho + 0.5 * dt * k1)
        k3, _ = g(half * f0 + rho + 0.5 * dt * k2)
        k4, _ = g((t + dt) * f0 + rho + dt * k3)
        rho = rho + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        steps += 1
        t = t_end if last else t + dt
        if not np.all(np.isfinite(rho)):
            raise SolverError("non-finite values; the trajectory is unstable", t)
        if steps >= cfg.max_steps and t < t_end:
            raise SolverError(f"max_steps={cfg.max_steps} exceeded", t)
        if h1_0 > 0:
            h1_drift = max(h1_drift, abs(_h1_from_spectrum(uh0 + t * f0 + rho, grid) - h1_0) / h1_0)
    dev = t * f0 + rho
    u = Field(grid, rspec=uh0 + dev)
    l1 = lp_norm(u0, 1.0)
    mass = abs(Field(grid, rspec=dev).integral())
    mass_drift = mass / l1 if l1 > 0 else mass
    return EvolveResult(u, float(t), steps, h1_drift, mass_drift,
                        deviation=Field(grid, rspec=dev), remainder=Field(grid, rspec=rho))
