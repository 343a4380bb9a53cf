"""Periodic grid, Fourier transforms, multipliers and quadrature norms.

The real line is replaced by the box [-pi*L, pi*L) sampled at N points.
Lattice frequencies are xi_k = k/L.  Internally a Field keeps the
half-spectrum ``rspec = rfft(samples)``; the public spectrum returned by
:func:`to_spectrum` is the full length-N array in ``numpy.fft`` order with
the phase of the shifted origin removed, i.e. the discrete analogue of
``int exp(-i x xi) f(x) dx`` divided by ``dx``.
"""
from __future__ import annotations

import functools
from dataclasses import dataclass

import numpy as np
import scipy.fft as sfft

__all__ = [
    "Grid",
    "Field",
    "MultiplierSymbol",
    "to_spectrum",
    "from_spectrum",
    "derivative",
    "apply_multiplier",
    "lp_norm",
    "l2_from_spectrum",
    "truncate",
    "product",
    "random_bandlimited",
    "inverse_helmholtz_symbol",
    "p_symbol",
    "derivative_symbol",
]


def _is_power_of_two(n: int) -> bool:
    return n > 0 and (n & (n - 1)) == 0


@dataclass(frozen=True)
class Grid:
    """Uniform periodic grid on [-pi*L, pi*L) with N points."""

    L: int
    N: int

    def __post_init__(self):
        if int(self.L) != self.L or self.L < 1:
            raise ValueError(f"box scale L must be a positive integer, got {self.L}")
        if int(self.N) != self.N or not _is_power_of_two(int(self.N)) or self.N < 4:
            raise ValueError(f"N must be a power of two >= 4, got {self.N}")
        object.__setattr__(self, "L", int(self.L))
        object.__setattr__(self, "N", int(self.N))

    @property
    def length(self) -> float:
        return 2 * np.pi * self.L

    @property
    def dx(self) -> float:
        return self.length / self.N

    @property
    def nhalf(self) -> int:
        """Length of the half spectrum."""
        return self.N // 2 + 1

    @property
    def x(self) -> np.ndarray:
        return -np.pi * self.L + self.dx * np.arange(self.N)

    @property
    def k(self) -> np.ndarray:
        """Non-negative integer wavenumbers of the half spectrum."""
        return np.arange(self.nhalf)

    @property
    def xi(self) -> np.ndarray:
        """Non-negative lattice frequencies k/L."""
        return self.k / self.L

    @property
    def xi_full(self) -> np.ndarray:
        """All lattice frequencies in ``numpy.fft`` order."""
        return np.fft.fftfreq(self.N, d=1.0 / self.N) / self.L

    @property
    def dealias_k(self) -> int:
        """Largest retained wavenumber (2/3 rule: 3*K < N)."""
        return (self.N - 1) // 3

    @property
    def xi_cut(self) -> float:
        """Dealias cutoff frequency."""
        return self.dealias_k / self.L

    def metadata(self) -> dict:
        return {"grid_L": self.L, "grid_N": self.N, "dx": self.dx,
                "dealias_k": self.dealias_k, "xi_cut": self.xi_cut}


@functools.lru_cache(maxsize=16)
def _phase(grid: Grid) -> np.ndarray:
    # exp(-i xi_k x_0) with x_0 = -pi L is (-1)^k
    return np.where(grid.k % 2 == 0, 1.0, -1.0)


class Field:
    """A real periodic function held as samples and/or half spectrum.

    Exactly one of ``samples`` or ``rspec`` is given at construction; the
    other is computed on first access and cached.  Arrays are read-only.
    Arithmetic is carried out on the spectrum whenever both operands have
    one, so that small differences of large fields keep per-coefficient
    relative accuracy.
    """

    __slots__ = ("grid", "_samples", "_rspec")

    def __init__(self, grid: Grid, samples=None, *, rspec=None):
        if (samples is None) == (rspec is None):
            raise ValueError("give exactly one of samples or rspec")
        self.grid = grid
        self._samples = None
        self._rspec = None
        if samples is not None:
            samples = np.asarray(samples, dtype=float)
            if samples.shape != (grid.N,):
                raise ValueError(f"expected {grid.N} samples, got shape {samples.shape}")
            samples.flags.writeable = False
            self._samples = samples
        else:
            rspec = np.asarray(rspec, dtype=complex)
            if rspec.shape != (grid.nhalf,):
                raise ValueError(f"expected {grid.nhalf} coefficients, got shape {rspec.shape}")
            rspec.flags.writeable = False
            self._rspec = rspec

    @classmethod
    def from_function(cls, grid: Grid, func) -> "Field":
        return cls(grid, func(grid.x))

    @classmethod
    def from_transform(cls, grid: Grid, fhat) -> "Field":
        """Field whose continuous Fourier transform at xi_k >= 0 is ``fhat``.

        The sampled function is the periodization of the real-line inverse
        transform; its discrete coefficients are fhat/dx.
        """
        fhat = np.asarray(fhat)
        return cls(grid, rspec=fhat * _phase(grid) / grid.dx)

    @classmethod
    def zeros(cls, grid: Grid) -> "Field":
        return cls(grid, rspec=np.zeros(grid.nhalf, dtype=complex))

    @property
    def samples(self) -> np.ndarray:
        if self._samples is None:
            s = sfft.irfft(self._rspec, self.grid.N)
            s.flags.writeable = False
            self._samples = s
        return self._samples

    @property
    def rspec(self) -> np.ndarray:
        if self._rspec is None:
            c = sfft.rfft(self._samples)
            if self.grid.N % 2 == 0:
                c[-1] = c[-1].real
            c.flags.writeable = False
            self._rspec = c
        return self._rspec

    @property
    def has_spectrum(self) -> bool:
        return self._rspec is not None

    def _check(self, other: "Field"):
        if other.grid != self.grid:
            raise ValueError(f"grid mismatch: {self.grid} vs {other.grid}")

    def __add__(self, other):
        if not isinstance(other, Field):
            return NotImplemented
        self._check(other)
        if self.has_spectrum and other.has_spectrum:
            return Field(self.grid, rspec=self._rspec + other._rspec)
        return Field(self.grid, self.samples + other.samples)

    def __sub__(self, other):
        if not isinstance(other, Field):
            return NotImplemented
        self._check(other)
        if self.has_spectrum and other.has_spectrum:
            return Field(self.grid, rspec=self._rspec - other._rspec)
        return Field(self.grid, self.samples - other.samples)

    def __neg__(self):
        return self * -1.0

    def __mul__(self, c):
        if isinstance(c, Field):
            return NotImplemented
        c = float(c)
        if self.has_spectrum:
            return Field(self.grid, rspec=c * self._rspec)
        return Field(self.grid, c * self._samples)

    __rmul__ = __mul__

    def __truediv__(self, c):
        return self * (1.0 / float(c))

    def integral(self) -> float:
        """Integral over the box (rectangle rule, equal to dx * rspec[0])."""
        return float(self.rspec[0].real * self.grid.dx)

    def is_resolved(self, rtol: float = 1e-14) -> bool:
        """True when no content sits above the dealias cutoff."""
        c = np.abs(self.rspec)
        top = c.max(initial=0.0)
        if top == 0.0:
            return True
        return bool(c[self.grid.dealias_k + 1:].max(initial=0.0) <= rtol * top)

    def __repr__(self):
        return f"Field(L={self.grid.L}, N={self.grid.N})"


class MultiplierSymbol:
    """Fourier multiplier tabulated on the non-negative lattice frequencies.

    Only real-output multipliers (m(-xi) = conj m(xi)) are representable,
    so the half lattice determines the symbol.
    """

    __slots__ = ("values", "name")

    def __init__(self, values, name: str = ""):
        values = np.asarray(values)
        values.flags.writeable = False
        self.values = values
        self.name = name

    @classmethod
    def from_function(cls, grid: Grid, func, name: str = "") -> "MultiplierSymbol":
        return cls(func(grid.xi), name)

    @classmethod
    def from_full(cls, values, name: str = "", atol: float = 1e-12) -> "MultiplierSymbol":
        """Build from a length-N array in ``numpy.fft`` order."""
        values = np.asarray(values)
        n = values.size
        mirrored = np.conj(values[(-np.arange(n)) % n])
        if not np.allclose(values, mirrored, rtol=0, atol=atol * max(1.0, np.abs(values).max())):
            raise ValueError(f"multiplier {name!r} is not Hermitian; output would not be real")
        return cls(values[: n // 2 + 1].copy(), name)

    def full(self) -> np.ndarray:
        half = self.values
        n = 2 * (half.size - 1)
        out = np.empty(n, dtype=np.result_type(half, complex))
        out[: half.size] = half
        out[half.size:] = np.conj(half[1:-1][::-1])
        return out

    def __len__(self):
        return self.values.size

    def __repr__(self):
        return f"MultiplierSymbol({self.name!r}, size={self.values.size})"


@functools.lru_cache(maxsize=16)
def inverse_helmholtz_symbol(grid: Grid) -> MultiplierSymbol:
    """Lambda^{-2} = (1 - d_xx)^{-1}, symbol 1/(1+xi^2)."""
    return MultiplierSymbol.from_function(grid, lambda xi: 1.0 / (1.0 + xi * xi), "Lambda^-2")


@functools.lru_cache(maxsize=16)
def p_symbol(grid: Grid) -> MultiplierSymbol:
    """P(D) = -d_x Lambda^{-2}, symbol -i xi/(1+xi^2); Nyquist zeroed."""
    xi = grid.xi
    m = -1j * xi / (1.0 + xi * xi)
    m[-1] = 0.0
    return MultiplierSymbol(m, "P(D)")


@functools.lru_cache(maxsize=16)
def derivative_symbol(grid: Grid) -> MultiplierSymbol:
    m = 1j * grid.xi
    m[-1] = 0.0
    return MultiplierSymbol(m, "d/dx")


def to_spectrum(f: Field) -> np.ndarray:
    """Full discrete spectrum of f, indexed like ``numpy.fft.fftfreq``.

    Unnormalized: cos(x) on L=1 has value N/2 at xi = +-1.
    """
    half = f.rspec * _phase(f.grid)
    return MultiplierSymbol(half).full()


def from_spectrum(c, grid: Grid, atol: float = 1e-12) -> Field:
    """Inverse of :func:`to_spectrum`; rejects non-Hermitian input."""
    c = np.asarray(c, dtype=complex)
    if c.shape != (grid.N,):
        raise ValueError(f"expected {grid.N} coefficients, got shape {c.shape}")
    scale = max(1.0, float(np.abs(c).max(initial=0.0)))
    mirrored = np.conj(c[(-np.arange(grid.N)) % grid.N])
    if np.abs(c - mirrored).max() > atol * scale:
        raise ValueError("spectrum is not Hermitian-symmetric (corrupted or complex field)")
    half = c[: grid.nhalf] * _phase(grid)
    half[0] = half[0].real
    half[-1] = half[-1].real
    return Field(grid, rspec=half)


def apply_multiplier(f: Field, m: MultiplierSymbol) -> Field:
    if len(m) != f.grid.nhalf:
        raise ValueError(f"multiplier {m.name!r} has {len(m)} entries, lattice needs {f.grid.nhalf}")
    return Field(f.grid, rspec=f.rspec * m.values)


def derivative(f: Field) -> Field:
    return apply_multiplier(f, derivative_symbol(f.grid))


def lp_norm(f: Field, p: float) -> float:
    """L^p norm over the box by the rectangle rule; p = inf is the max."""
    p = float(p)
    if p < 1:
        raise ValueError(f"p must lie in [1, inf], got {p}")
    a = np.abs(f.samples)
    if np.isinf(p):
        return float(a.max(initial=0.0))
    if p == 1.0:
        return float(a.sum() * f.grid.dx)
    if p == 2.0:
        return float(np.sqrt(np.dot(a, a) * f.grid.dx))
    top = a.max(initial=0.0)
    if top == 0.0:
        return 0.0
    # scaled to avoid underflow of tiny blocks raised to the power p
    return float(top * (np.sum((a / top) ** p) * f.grid.dx) ** (1.0 / p))


def l2_from_spectrum(rspec: np.ndarray, grid: Grid) -> float:
    """Parseval form of the rectangle-rule L^2 norm (no transform needed)."""
    w = np.abs(rspec) ** 2
    total = 2.0 * w.sum() - w[0]
    if grid.N % 2 == 0:
        total -= w[-1]
    return float(np.sqrt(max(total, 0.0) * grid.dx / grid.N))


def truncate(f: Field, kmax: int | None = None) -> Field:
    """Zero every wavenumber above ``kmax`` (default: the dealias cutoff)."""
    kmax = f.grid.dealias_k if kmax is None else kmax
    c = np.array(f.rspec)
    c[kmax + 1:] = 0.0
    return Field(f.grid, rspec=c)


def _pad_factor(grid: Grid, degree: int, kmax: int) -> int:
    """Smallest padded size M (multiple of N/2) keeping a degree-d product alias free."""
    m = grid.N
    while (degree + 1) * kmax >= m:
        m += grid.N // 2
    return m


def pad_size(grid: Grid, degree: int) -> int:
    return _pad_factor(grid, degree, grid.dealias_k)


def to_padded(rspec: np.ndarray, grid: Grid, m: int) -> np.ndarray:
    """Samples on an M-point grid of the band-limited function with half spectrum ``rspec``."""
    if m == grid.N:
        return sfft.irfft(rspec, grid.N)
    c = np.zeros(m // 2 + 1, dtype=complex)
    c[: grid.nhalf - 1] = rspec[:-1] * (m / grid.N)
    return sfft.irfft(c, m)


def from_padded(samples: np.ndarray, grid: Grid, kmax: int) -> np.ndarray:
    """Half spectrum on the N-grid of padded samples, truncated at ``kmax``."""
    m = samples.size
    c = sfft.rfft(samples)
    out = np.zeros(grid.nhalf, dtype=complex)
    out[: kmax + 1] = c[: kmax + 1] * (grid.N / m)
    return out


def product(*fields: Field, kmax: int | None = None) -> Field:
    """Dealiased product: exact Galerkin projection onto |k| <= kmax.

    Inputs are first truncated to ``kmax``; the pointwise product is formed
    on a grid large enough that no aliased mode lands below ``kmax``.
    """
    if not fields:
        raise ValueError("product of no fields")
    grid = fields[0].grid
    for f in fields[1:]:
        if f.grid != grid:
            raise ValueError(f"grid mismatch: {grid} vs {f.grid}")
    kmax = grid.dealias_k if kmax is None else kmax
    m = _pad_factor(grid, len(fields), kmax)
    acc = None
    for f in fields:
        c = np.array(f.rspec)
        c[kmax + 1:] = 0.0
        s = to_padded(c, grid, m)
        acc = s if acc is None else acc * s
    return Field(grid, rspec=from_padded(acc, grid, kmax))


def random_bandlimited(grid: Grid, rng: np.random.Generator, kmax: int | None = None,
                       decay: float = 1.0, amplitude: float = 1.0) -> Field:
    """Seeded random real field with wavenumbers |k| <= kmax.

    kmax defaults to half the dealias cutoff.  Fourier-series coefficients
    are Gaussian times (1+|xi|)^-decay and do not depend on N, so the same
    rng state yields the same function on every grid that resolves it.
    """
    kmax = grid.dealias_k // 2 if kmax is None else int(kmax)
    if kmax > grid.dealias_k:
        raise ValueError(f"kmax={kmax} exceeds dealias cutoff {grid.dealias_k}")
    k = np.arange(kmax + 1)
    coef = rng.standard_normal(kmax + 1) + 1j * rng.standard_normal(kmax + 1)
    coef *= amplitude * (1.0 + k / grid.L) ** (-decay)
    coef[0] = coef[0].real
    c = np.zeros(grid.nhalf, dtype=complex)
    c[: kmax + 1] = coef * grid.N / 2
    c[0] = coef[0].real * grid.N
    return Field(grid, rspec=c)
