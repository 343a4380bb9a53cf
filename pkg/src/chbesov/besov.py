"""Discrete Besov norms and the functional inequalities checked on them.

Inequalities with an unnamed constant are exposed as ratios LHS/RHS;
callers study how the sample maximum behaves under grid refinement
rather than asserting a fixed constant.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np
import scipy.fft as sfft

from .littlewood_paley import DyadicCutoffs, commutator_blocks, paraproduct, remainder_bony
from .spectral import Field, derivative, l2_from_spectrum, lp_norm, product

__all__ = [
    "BesovParams",
    "block_lp_norms",
    "combine_blocks",
    "besov_norm",
    "interpolation_ratio",
    "product_ratio_lemma22",
    "algebra_ratio",
    "p_operator_lipschitz_ratio",
    "commutator_ratio",
    "paraproduct_linf_ratio",
    "paraproduct_negative_ratio",
    "remainder_ratio",
]


@dataclass(frozen=True)
class BesovParams:
    s: float
    p: float = 2.0
    r: float = 2.0

    def __post_init__(self):
        for name in ("p", "r"):
            val = float(getattr(self, name))
            if not val >= 1.0:
                raise ValueError(f"{name} must lie in [1, inf], got {val}")
            object.__setattr__(self, name, val)
        object.__setattr__(self, "s", float(self.s))

    @property
    def critical(self) -> float:
        return 1.0 + 1.0 / self.p

    @property
    def admissible(self) -> bool:
        """Well-posedness range: s > 1+1/p with r < inf, or s = 1+1/p, p < inf, r = 1."""
        if self.s > self.critical and not math.isinf(self.r):
            return True
        return self.s == self.critical and not math.isinf(self.p) and self.r == 1.0

    @property
    def high_regularity(self) -> bool:
        """s > max(1+1/p, 3/2): the range of the t^2 remainder estimate."""
        return self.s > max(self.critical, 1.5)

    def with_s(self, s: float) -> "BesovParams":
        return replace(self, s=s)

    def with_r(self, r: float) -> "BesovParams":
        return replace(self, r=r)


def block_lp_norms(f: Field, p: float, cut: DyadicCutoffs) -> np.ndarray:
    """||Delta_j f||_{L^p} for j = -1..j_max."""
    if f.grid != cut.grid:
        raise ValueError(f"grid mismatch: field on {f.grid}, cutoffs on {cut.grid}")
    c = f.rspec
    out = np.empty(cut.j_max + 2)
    for i, j in enumerate(cut.js):
        cj = c * cut.symbol(j)
        if p == 2.0:
            out[i] = l2_from_spectrum(cj, f.grid)
        else:
            out[i] = lp_norm(Field(f.grid, sfft.irfft(cj, f.grid.N)), p)
    return out


def combine_blocks(norms: np.ndarray, s: float, r: float) -> float:
    """(sum_j (2^{js} a_j)^r)^{1/r}, or the sup for r = inf."""
    j = np.arange(-1, norms.size - 1)
    w = np.exp2(s * j) * norms
    if math.isinf(r):
        return float(w.max(initial=0.0))
    top = w.max(initial=0.0)
    if top == 0.0:
        return 0.0
    return float(top * np.sum((w / top) ** r) ** (1.0 / r))


def besov_norm(f: Field, bp: BesovParams, cut: DyadicCutoffs) -> float:
    return combine_blocks(block_lp_norms(f, bp.p, cut), bp.s, bp.r)


def _nonzero(f: Field, name: str):
    if not np.any(f.rspec):
        raise ValueError(f"{name} is the zero field; ratio undefined")


def interpolation_ratio(f: Field, s1: float, s2: float, theta: float, p: float, r: float,
                        cut: DyadicCutoffs) -> float:
    """||f||_{B^{theta s1 + (1-theta) s2}} / (||f||_{B^s1}^theta ||f||_{B^s2}^{1-theta}); <= 1."""
    if s1 == s2:
        raise ValueError("interpolation needs s1 != s2")
    if not 0.0 < theta < 1.0:
        raise ValueError(f"theta must lie in (0, 1), got {theta}")
    _nonzero(f, "f")
    a = block_lp_norms(f, p, cut)
    mid = combine_blocks(a, theta * s1 + (1 - theta) * s2, r)
    return mid / (combine_blocks(a, s1, r) ** theta * combine_blocks(a, s2, r) ** (1 - theta))


def product_ratio_lemma22(u: Field, v: Field, bp: BesovParams, cut: DyadicCutoffs) -> float:
    """||uv||_{B^{s-2}} / (||u||_{B^{s-2}} ||v||_{B^{s-1}}), for s > max(1+1/p, 3/2)."""
    if not bp.high_regularity:
        raise ValueError(f"need s > max(1+1/p, 3/2), got {bp}")
    _nonzero(u, "u")
    _nonzero(v, "v")
    lo = bp.with_s(bp.s - 2)
    return besov_norm(product(u, v), lo, cut) / (
        besov_norm(u, lo, cut) * besov_norm(v, bp.with_s(bp.s - 1), cut))


def algebra_ratio(u: Field, v: Field, bp: BesovParams, cut: DyadicCutoffs) -> float:
    """||uv||_{B^{s-1}} / (||u||_{B^{s-1}} ||v||_{B^{s-1}})."""
    if not (bp.s > bp.critical or (bp.s == bp.critical and bp.r == 1.0)):
        raise ValueError(f"B^(s-1) is an algebra only for s > 1+1/p (or = with r = 1), got {bp}")
    _nonzero(u, "u")
    _nonzero(v, "v")
    b = bp.with_s(bp.s - 1)
    return besov_norm(product(u, v), b, cut) / (besov_norm(u, b, cut) * besov_norm(v, b, cut))


def p_operator_lipschitz_ratio(u: Field, v: Field, bp: BesovParams, cut: DyadicCutoffs) -> float:
    """||P(u)-P(v)||_{B^{s-1}} / (||u-v||_{B^{s-1}} (||u||_{B^s} + ||v||_{B^s}))."""
    from .evolution import nonlocal_P

    if not bp.high_regularity:
        raise ValueError(f"need s > max(1+1/p, 3/2), got {bp}")
    diff = u - v
    if not np.any(diff.rspec):
        raise ValueError("u == v; ratio undefined")
    b1 = bp.with_s(bp.s - 1)
    num = besov_norm(nonlocal_P(u) - nonlocal_P(v), b1, cut)
    return num / (besov_norm(diff, b1, cut) * (besov_norm(u, bp, cut) + besov_norm(v, bp, cut)))


def commutator_sup(v: Field, f: Field, s: float, p: float, cut: DyadicCutoffs) -> float:
    """sup_j 2^{js} ||[Delta_j, v] d_x f||_{L^p}."""
    norms = np.array([lp_norm(c, p) for c in commutator_blocks(v, f, cut)])
    return combine_blocks(norms, s, math.inf)


def commutator_ratio(v: Field, f: Field, s: float, p: float, cut: DyadicCutoffs) -> float:
    """Commutator estimate ratio; s > 0."""
    if s <= 0:
        raise ValueError(f"commutator estimate needs s > 0, got {s}")
    vx = derivative(v)
    fx = derivative(f)
    rhs = (lp_norm(vx, math.inf) * besov_norm(f, BesovParams(s, p, math.inf), cut)
           + lp_norm(fx, math.inf) * besov_norm(vx, BesovParams(s - 1, p, math.inf), cut))
    if rhs == 0.0:
        raise ValueError("right-hand side vanishes; ratio undefined")
    return commutator_sup(v, f, s, p, cut) / rhs


def paraproduct_linf_ratio(u: Field, v: Field, bp: BesovParams, cut: DyadicCutoffs) -> float:
    """||T_u v||_{B^s_{p,r}} / (||u||_{L^inf} ||v||_{B^s_{p,r}})."""
    _nonzero(u, "u")
    _nonzero(v, "v")
    return besov_norm(paraproduct(u, v, cut), bp, cut) / (
        lp_norm(u, math.inf) * besov_norm(v, bp, cut))


def paraproduct_negative_ratio(u: Field, v: Field, bp: BesovParams, t: float,
                               cut: DyadicCutoffs) -> float:
    """||T_u v||_{B^{s+t}_{p,r}} / (||u||_{B^t_{inf,inf}} ||v||_{B^s_{p,r}}), t < 0."""
    if t >= 0:
        raise ValueError(f"negative-index paraproduct estimate needs t < 0, got {t}")
    _nonzero(u, "u")
    _nonzero(v, "v")
    return besov_norm(paraproduct(u, v, cut), bp.with_s(bp.s + t), cut) / (
        besov_norm(u, BesovParams(t, math.inf, math.inf), cut) * besov_norm(v, bp, cut))


def remainder_ratio(u: Field, v: Field, s1: float, s2: float, p: float, r: float,
                    cut: DyadicCutoffs) -> float:
    """||R(u,v)||_{B^{s1+s2}_{p,r}} / (||u||_{B^{s1}_{inf,inf}} ||v||_{B^{s2}_{p,r}}), s1+s2 > 0."""
    if s1 + s2 <= 0:
        raise ValueError(f"remainder estimate needs s1 + s2 > 0, got {s1 + s2}")
    _nonzero(u, "u")
    _nonzero(v, "v")
    return besov_norm(remainder_bony(u, v, cut), BesovParams(s1 + s2, p, r), cut) / (
        besov_norm(u, BesovParams(s1, math.inf, math.inf), cut)
        * besov_norm(v, BesovParams(s2, p, r), cut))
