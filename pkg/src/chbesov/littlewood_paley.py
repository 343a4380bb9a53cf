"""Dyadic cutoffs, Littlewood-Paley blocks, Bony paraproducts and commutators."""
from __future__ import annotations

import functools
from dataclasses import dataclass

import numpy as np
import scipy.fft as sfft

from .spectral import Field, Grid, MultiplierSymbol, derivative, product

__all__ = [
    "smooth_transition",
    "theta_symbol",
    "phi_symbol",
    "DyadicCutoffs",
    "build_cutoffs",
    "block",
    "blocks",
    "low_freq",
    "paraproduct",
    "remainder_bony",
    "commutator_block",
]

THETA_INNER = 3.0 / 4.0
THETA_OUTER = 4.0 / 3.0


def _psi(t):
    t = np.asarray(t, dtype=float)
    out = np.zeros_like(t)
    pos = t > 0
    out[pos] = np.exp(-1.0 / t[pos])
    return out


def smooth_transition(t, a: float, b: float):
    """C-infinity step: 1 for t <= a, 0 for t >= b, built from exp(-1/t)."""
    t = np.asarray(t, dtype=float)
    up = _psi(b - t)
    down = _psi(t - a)
    return up / (up + down)


def theta_symbol(xi):
    """Low-pass cutoff: 1 on |xi| <= 3/4, 0 on |xi| >= 4/3."""
    return smooth_transition(np.abs(xi), THETA_INNER, THETA_OUTER)


def phi_symbol(xi):
    """Annulus cutoff phi(xi) = theta(xi/2) - theta(xi)."""
    xi = np.asarray(xi, dtype=float)
    return theta_symbol(xi / 2.0) - theta_symbol(xi)


@dataclass(frozen=True, eq=False)
class DyadicCutoffs:
    """Tabulated theta and phi(2^-j .) for j = 0..j_max on a grid.

    j_max is the last block whose annulus starts below the dealias cutoff,
    so theta + sum_{j<=j_max} phi_j = 1 on every resolved frequency.
    """

    grid: Grid
    theta: MultiplierSymbol
    phi_per_j: tuple
    j_max: int

    def symbol(self, j: int) -> np.ndarray:
        if j == -1:
            return self.theta.values
        return self.phi_per_j[j].values

    def annulus(self, j: int) -> tuple[float, float]:
        if j == -1:
            return 0.0, THETA_OUTER
        return THETA_INNER * 2.0**j, (8.0 / 3.0) * 2.0**j

    @property
    def js(self) -> range:
        return range(-1, self.j_max + 1)


@functools.lru_cache(maxsize=8)
def build_cutoffs(grid: Grid) -> DyadicCutoffs:
    xi_cut = grid.xi_cut
    if xi_cut <= THETA_INNER:
        raise ValueError(f"grid too small: dealias cutoff {xi_cut:.3g} cannot hold block j=0")
    j_max = 0
    while THETA_INNER * 2.0 ** (j_max + 1) < xi_cut:
        j_max += 1
    xi = grid.xi
    theta = MultiplierSymbol(theta_symbol(xi), "theta")
    phis = tuple(MultiplierSymbol(phi_symbol(xi / 2.0**j), f"phi_{j}") for j in range(j_max + 1))
    return DyadicCutoffs(grid, theta, phis, j_max)


def _check_grid(f: Field, cut: DyadicCutoffs):
    if f.grid != cut.grid:
        raise ValueError(f"grid mismatch: field on {f.grid}, cutoffs on {cut.grid}")


def block(f: Field, j: int, cut: DyadicCutoffs) -> Field:
    """Littlewood-Paley block Delta_j f."""
    _check_grid(f, cut)
    if j > cut.j_max:
        raise ValueError(f"block exceeds resolved band: j={j} > j_max={cut.j_max}")
    if j <= -2:
        return Field.zeros(f.grid)
    return Field(f.grid, rspec=f.rspec * cut.symbol(j))


def blocks(f: Field, cut: DyadicCutoffs) -> list[Field]:
    """[Delta_{-1} f, Delta_0 f, ..., Delta_{j_max} f]."""
    return [block(f, j, cut) for j in cut.js]


def _low_symbol(j: int, cut: DyadicCutoffs) -> np.ndarray:
    # summed blockwise (not theta(2^-j xi)) so that sum_j Delta_j telescopes exactly
    acc = np.zeros(cut.grid.nhalf)
    for q in range(-1, j):
        acc = acc + cut.symbol(q)
    return acc


def low_freq(f: Field, j: int, cut: DyadicCutoffs) -> Field:
    """S_j f = sum_{q=-1}^{j-1} Delta_q f."""
    _check_grid(f, cut)
    if j - 1 > cut.j_max:
        raise ValueError(f"block exceeds resolved band: S_{j} needs Delta_{j - 1}, j_max={cut.j_max}")
    if j <= -1:
        return Field.zeros(f.grid)
    return Field(f.grid, rspec=f.rspec * _low_symbol(j, cut))


def _block_samples(f: Field, cut: DyadicCutoffs) -> list[np.ndarray]:
    n = cut.grid.N
    return [sfft.irfft(f.rspec * cut.symbol(j), n) for j in cut.js]


def _project(samples: np.ndarray, grid: Grid) -> Field:
    """Dealias a sum of products formed pointwise on the N-grid."""
    c = sfft.rfft(samples)
    c[grid.dealias_k + 1:] = 0.0
    return Field(grid, rspec=c)


def _check_pair(u: Field, v: Field, cut: DyadicCutoffs):
    _check_grid(u, cut)
    _check_grid(v, cut)


def paraproduct(u: Field, v: Field, cut: DyadicCutoffs) -> Field:
    """T_u v = sum_j S_{j-1}u Delta_j v (products dealiased)."""
    _check_pair(u, v, cut)
    vb = _block_samples(v, cut)
    ub = _block_samples(u, cut)
    acc = np.zeros(cut.grid.N)
    low = np.zeros(cut.grid.N)
    # index i <-> j = i - 1; S_{j-1}u accumulates Delta_{-1}..Delta_{j-2}
    for i in range(2, len(vb)):
        low += ub[i - 2]
        acc += low * vb[i]
    return _project(acc, cut.grid)


def remainder_bony(u: Field, v: Field, cut: DyadicCutoffs) -> Field:
    """R(u, v) = sum_{|j-k|<=1} Delta_j u Delta_k v (products dealiased)."""
    _check_pair(u, v, cut)
    ub = _block_samples(u, cut)
    vb = _block_samples(v, cut)
    acc = np.zeros(cut.grid.N)
    for i in range(len(ub)):
        near = vb[i].copy()
        if i > 0:
            near += vb[i - 1]
        if i + 1 < len(vb):
            near += vb[i + 1]
        acc += ub[i] * near
    return _project(acc, cut.grid)


def commutator_block(j: int, v: Field, f: Field, cut: DyadicCutoffs) -> Field:
    """[Delta_j, v] d_x f = Delta_j(v d_x f) - v Delta_j d_x f."""
    _check_pair(v, f, cut)
    fx = derivative(f)
    return block(product(v, fx), j, cut) - product(v, block(fx, j, cut))


def commutator_blocks(v: Field, f: Field, cut: DyadicCutoffs) -> list[Field]:
    """All commutators j = -1..j_max, sharing the product v d_x f."""
    _check_pair(v, f, cut)
    fx = derivative(f)
    vfx = product(v, fx)
    return [block(vfx, j, cut) - product(v, block(fx, j, cut)) for j in cut.js]
