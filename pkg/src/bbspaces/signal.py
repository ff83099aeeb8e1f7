"""Sampled signals on a symmetric uniform grid.

The grid has N points x_j = -T + j*dx with dx = 2T/N. The Fourier transform
uses the convention fhat(xi) = int f(x) exp(-2 pi i x xi) dx and lands on the
dual grid with half-width N/(4T), so applying it twice returns to the
original grid (as the reflection f(-x)).
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import AlignmentError, ValidationError

ALIGN_RTOL = 1e-9
MAX_HERMITE = 64
MAX_GS_ORDER = 12


@dataclass(frozen=True)
class GridSpec:
    T: float
    N: int

    def __post_init__(self):
        if not (self.T > 0 and math.isfinite(self.T)):
            raise ValidationError(f"grid half-width must be positive, got {self.T}")
        N = int(self.N)
        if N != self.N or N < 4 or N & (N - 1):
            raise ValidationError(f"grid size must be a power of two >= 4, got {self.N}")
        object.__setattr__(self, "N", N)
        object.__setattr__(self, "T", float(self.T))

    @property
    def step(self) -> float:
        return 2.0 * self.T / self.N

    @property
    def x(self) -> np.ndarray:
        return -self.T + self.step * np.arange(self.N)

    def dual(self) -> "GridSpec":
        """Frequency grid: spacing 1/(2T), covering [-N/(4T), N/(4T))."""
        return GridSpec(self.N / (4.0 * self.T), self.N)

    @property
    def nyquist(self) -> float:
        return self.N / (4.0 * self.T)

    def steps(self, length: float) -> int:
        """length / dx as an integer; AlignmentError if it is not one."""
        q = length / self.step
        k = round(q)
        if abs(q - k) > ALIGN_RTOL * max(1.0, abs(q)):
            raise AlignmentError(
                f"{length!r} is not a multiple of the grid step {self.step!r}; "
                f"nearest multiple is {k * self.step!r}", nearest=k * self.step)
        return int(k)

    def is_aligned(self, length: float) -> bool:
        q = length / self.step
        return abs(q - round(q)) <= ALIGN_RTOL * max(1.0, abs(q))

    def check_lattice(self, a: float, b: float):
        """Require a, b, 1/a, 1/b and 1/2 to be multiples of the step."""
        for v in (a, b, 1.0 / a, 1.0 / b, 0.5):
            self.steps(v)

    def to_dict(self):
        return {"T": self.T, "N": self.N}


@dataclass(frozen=True, eq=False)
class SampledSignal:
    grid: GridSpec
    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values, dtype=complex)
        if v.shape != (self.grid.N,):
            raise ValidationError(f"expected {self.grid.N} samples, got shape {v.shape}")
        v = v.copy()
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    @property
    def x(self):
        return self.grid.x

    def _same(self, other):
        if not isinstance(other, SampledSignal) or other.grid != self.grid:
            raise ValidationError("signals live on different grids")

    def __add__(self, other):
        self._same(other)
        return SampledSignal(self.grid, self.values + other.values)

    def __sub__(self, other):
        self._same(other)
        return SampledSignal(self.grid, self.values - other.values)

    def __mul__(self, c):
        return SampledSignal(self.grid, self.values * c)

    __rmul__ = __mul__

    def __neg__(self):
        return SampledSignal(self.grid, -self.values)

    def inner(self, other) -> complex:
        """(f, g) = int f conj(g), as dx * sum."""
        self._same(other)
        return complex(self.grid.step * np.vdot(other.values, self.values))

    def norm(self) -> float:
        return float(math.sqrt(self.grid.step) * np.linalg.norm(self.values))

    def reflect(self):
        """f(-x); index j maps to (N - j) mod N."""
        return SampledSignal(self.grid, np.roll(self.values[::-1], 1))

    def conj(self):
        return SampledSignal(self.grid, self.values.conj())

    def boundary_magnitude(self) -> float:
        """Largest |f| over the outer 1/16 of the grid on either side."""
        m = max(1, self.grid.N // 16)
        return float(max(np.abs(self.values[:m]).max(), np.abs(self.values[-m:]).max()))


def from_function(grid: GridSpec, fn) -> SampledSignal:
    return SampledSignal(grid, fn(grid.x))


def gaussian(grid: GridSpec) -> SampledSignal:
    """L2-normalized Gaussian 2**(1/4) exp(-pi x^2)."""
    return SampledSignal(grid, 2 ** 0.25 * np.exp(-np.pi * grid.x ** 2))


def box(grid: GridSpec, start: float = 0.0, width: float = 1.0) -> SampledSignal:
    """Normalized indicator of [start, start + width) sampled on the grid."""
    x = grid.x
    tol = 1e-9 * grid.step
    v = ((x >= start - tol) & (x < start + width - tol)).astype(float)
    return SampledSignal(grid, v / math.sqrt(width))


def _sign(N):
    s = np.ones(N)
    s[1::2] = -1.0
    return s


def fourier(f: SampledSignal) -> SampledSignal:
    """Discrete version of int f(x) exp(-2 pi i x xi) dx on the dual grid."""
    g = f.grid
    N = g.N
    sgn = _sign(N)
    # x_j xi_m = -(m - N/2)/2 + j (m - N/2) / N
    out = g.step * sgn * ((-1) ** (N // 2)) * np.fft.fft(sgn * f.values)
    return SampledSignal(g.dual(), out)


def inverse_fourier(F: SampledSignal) -> SampledSignal:
    return fourier(F).reflect()


def translate(f: SampledSignal, x: float) -> SampledSignal:
    """(T_x f)(t) = f(t - x) for lattice-aligned x, by a circular index shift."""
    k = f.grid.steps(x)
    if k == 0:
        return f
    return SampledSignal(f.grid, np.roll(f.values, k))


def shift(f: SampledSignal, x: float) -> SampledSignal:
    """f(t - x) for arbitrary real x via the trigonometric interpolant."""
    g = f.grid
    if g.is_aligned(x):
        return translate(f, g.steps(x) * g.step)
    freq = np.fft.fftfreq(g.N, d=g.step)
    phase = np.exp(-2j * np.pi * freq * x)
    # split the Nyquist bin so that real input stays real
    phase[g.N // 2] = np.cos(np.pi * freq[g.N // 2] * 2 * x)
    return SampledSignal(g, np.fft.ifft(np.fft.fft(f.values) * phase))


def modulate(f: SampledSignal, xi: float) -> SampledSignal:
    """(M_xi f)(t) = exp(2 pi i xi t) f(t)."""
    if xi == 0:
        return f
    return SampledSignal(f.grid, f.values * np.exp(2j * np.pi * xi * f.grid.x))


def weighted_sup_norm(f: SampledSignal, w, h: float) -> float:
    """max_j |f(x_j)| exp(h w(|x_j|)), evaluated in the log domain; inf on overflow."""
    mag = np.abs(f.values)
    if h == 0:
        return float(mag.max())
    nz = mag > 0
    if not nz.any():
        return 0.0
    logs = np.log(mag[nz]) + h * np.asarray(w(np.abs(f.grid.x[nz])))
    top = float(logs.max())
    if top > 709.0:
        return math.inf
    return math.exp(top)


def derivative(f: SampledSignal, p: int) -> SampledSignal:
    """p-th derivative by multiplying with (2 pi i xi)^p in frequency."""
    if p == 0:
        return f
    g = f.grid
    freq = np.fft.fftfreq(g.N, d=g.step)
    mult = (2j * np.pi * freq) ** p
    if p % 2:
        mult[g.N // 2] = 0.0
    return SampledSignal(g, np.fft.ifft(np.fft.fft(f.values) * mult))


def gelfand_shilov_seminorm(f: SampledSignal, mu: float, tau: float, k: float,
                            P: int) -> float:
    """max_{p,q <= P} sup_x |f^(p)(x) x^q| / (k^(p+q) p!^mu q!^tau)."""
    if P > MAX_GS_ORDER or P < 0:
        raise ValidationError(f"derivative order {P} outside the accurate range 0..{MAX_GS_ORDER}")
    if mu <= 0 or tau <= 0 or k <= 0:
        raise ValidationError("mu, tau and k must be positive")
    x = np.abs(f.grid.x)
    best = 0.0
    for p in range(P + 1):
        dp = np.abs(derivative(f, p).values)
        for q in range(P + 1):
            val = float((dp * x ** q).max())
            val /= k ** (p + q) * math.factorial(p) ** mu * math.factorial(q) ** tau
            best = max(best, val)
    return best


def hermite_values(m_max: int, x: np.ndarray) -> np.ndarray:
    """Rows h_0..h_{m_max} at x, h_m(x) = (2 pi)^(1/4) phi_m(sqrt(2 pi) x)."""
    y = math.sqrt(2 * math.pi) * np.asarray(x, dtype=float)
    out = np.empty((m_max + 1, y.size))
    out[0] = math.pi ** -0.25 * np.exp(-0.5 * y ** 2)
    if m_max >= 1:
        out[1] = math.sqrt(2.0) * y * out[0]
    for m in range(1, m_max):
        out[m + 1] = (math.sqrt(2.0 / (m + 1)) * y * out[m]
                      - math.sqrt(m / (m + 1.0)) * out[m - 1])
    return out * (2 * math.pi) ** 0.25


def hermite(m: int, grid: GridSpec) -> SampledSignal:
    """L2-normalized Hermite function; fourier(h_m) = (-i)^m h_m."""
    if not 0 <= m <= MAX_HERMITE:
        raise ValidationError(f"Hermite index must be in 0..{MAX_HERMITE}")
    return SampledSignal(grid, hermite_values(m, grid.x)[m])


def hermite_corpus(grid: GridSpec, m_max: int = 9) -> list:
    if not 0 <= m_max <= MAX_HERMITE:
        raise ValidationError(f"Hermite index must be in 0..{MAX_HERMITE}")
    rows = hermite_values(m_max, grid.x)
    return [SampledSignal(grid, r) for r in rows]


def box_grid() -> GridSpec:
    """A grid on which the unit box and unit lattice give an orthonormal
    Gabor basis: dx = 1/63 puts an odd number of samples in each unit cell,
    and x = 0 is a grid point."""
    return GridSpec(1024 / 63, 2048)
