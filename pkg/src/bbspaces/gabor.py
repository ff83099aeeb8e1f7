"""Gabor analysis and synthesis on the lattice a Z x b Z.

Atoms are T_{ak} M_{bn} psi (x) = exp(2 pi i b n (x - a k)) psi(x - a k) for
|k| <= K, |n| <= M.

Two evaluation routes share one interface. When a is a multiple of the grid
step and 1/(b dx) is an integer number of channels, each row k is a single
FFT of the folded product f * conj(T_{ak} psi). Otherwise the window is
shifted spectrally and the rows are formed with an explicit (2M+1) x N
exponential matrix, which is still cheap for the box sizes used here.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import signal as sg
from .errors import ConvergenceError, NotAFrameError, ValidationError
from .linalg import conjugate_gradient, power_iteration

TF_REACH = 12.0       # default half-width of the time-frequency box
WINDOW_REACH = 4.0    # distance kept between the last translate and the grid edge
NOT_A_FRAME_RATIO = 1e-2


@dataclass(frozen=True)
class LatticeSpec:
    a: float
    b: float
    K: int
    M: int

    def __post_init__(self):
        if not (self.a > 0 and self.b > 0 and math.isfinite(self.a) and math.isfinite(self.b)):
            raise ValidationError(f"lattice constants must be positive, got a={self.a}, b={self.b}")
        if int(self.K) != self.K or int(self.M) != self.M or self.K < 0 or self.M < 0:
            raise ValidationError("truncations K and M must be non-negative integers")
        object.__setattr__(self, "K", int(self.K))
        object.__setattr__(self, "M", int(self.M))

    @classmethod
    def for_grid(cls, grid: sg.GridSpec, a: float, b: float, reach: float = TF_REACH):
        """Symmetric box covering roughly [-reach, reach]^2 in the time-frequency plane."""
        K = int(math.floor(min(reach, grid.T - WINDOW_REACH) / a + 1e-9))
        M = int(math.floor(min(reach, grid.nyquist - WINDOW_REACH) / b + 1e-9))
        return cls(a, b, max(K, 0), max(M, 0))

    def adjoint(self, box: int) -> "LatticeSpec":
        return LatticeSpec(1.0 / self.b, 1.0 / self.a, box, box)

    @property
    def shape(self):
        return (2 * self.K + 1, 2 * self.M + 1)

    @property
    def ks(self):
        return np.arange(-self.K, self.K + 1)

    @property
    def ns(self):
        return np.arange(-self.M, self.M + 1)

    def to_dict(self):
        return {"a": self.a, "b": self.b, "K": self.K, "M": self.M}


@dataclass(frozen=True, eq=False)
class GaborCoefficients:
    lattice: LatticeSpec
    entries: np.ndarray

    def __post_init__(self):
        e = np.asarray(self.entries, dtype=complex)
        if e.shape != self.lattice.shape:
            raise ValidationError(f"coefficient box {e.shape} does not match lattice {self.lattice.shape}")
        object.__setattr__(self, "entries", e)

    def __getitem__(self, kn):
        k, n = kn
        if abs(k) > self.lattice.K or abs(n) > self.lattice.M:
            raise IndexError(f"({k}, {n}) outside the box")
        return self.entries[k + self.lattice.K, n + self.lattice.M]

    @classmethod
    def zeros(cls, lattice):
        return cls(lattice, np.zeros(lattice.shape, dtype=complex))

    @classmethod
    def delta(cls, lattice, k, n):
        c = np.zeros(lattice.shape, dtype=complex)
        c[k + lattice.K, n + lattice.M] = 1.0
        return cls(lattice, c)

    def norm2(self) -> float:
        return float(np.linalg.norm(self.entries))


class GaborSystem:
    """Precomputed translates of one window on one lattice."""

    def __init__(self, psi: sg.SampledSignal, lat: LatticeSpec):
        g = psi.grid
        if lat.b * lat.M > g.nyquist * (1 + 1e-12):
            raise ValidationError(
                f"b*M = {lat.b * lat.M} exceeds the grid Nyquist frequency {g.nyquist}")
        self.psi, self.lat, self.grid = psi, lat, g
        ks, ns = lat.ks, lat.ns
        channels = 1.0 / (lat.b * g.step)
        m_ch = round(channels)
        self.fft_route = (g.is_aligned(lat.a)
                          and abs(channels - m_ch) <= sg.ALIGN_RTOL * channels
                          and 2 * lat.M + 1 <= m_ch)
        if self.fft_route:
            step = g.steps(lat.a)
            idx = (np.arange(g.N)[None, :] - step * ks[:, None]) % g.N
            self.windows = psi.values[idx]
            self.m_ch = m_ch
            self.pad = -g.N % m_ch
            # phase exp(2 pi i b n (T + a k)), reduced mod 1 before exponentiating
            t = np.mod(lat.b * ns[None, :] * (g.T + lat.a * ks[:, None]), 1.0)
        else:
            freq = np.fft.fftfreq(g.N, d=g.step)
            spec = np.fft.fft(psi.values)
            shifts = lat.a * ks[:, None]
            ph = np.exp(-2j * np.pi * freq[None, :] * shifts)
            ph[:, g.N // 2] = np.cos(2 * np.pi * freq[g.N // 2] * shifts[:, 0])
            self.windows = np.fft.ifft(spec[None, :] * ph, axis=1)
            self.expo = np.exp(-2j * np.pi * np.mod(lat.b * ns[:, None] * g.x[None, :], 1.0))
            t = np.mod(lat.b * ns[None, :] * lat.a * ks[:, None], 1.0)
        self.phase = np.exp(2j * np.pi * t)

    def analyze(self, f: sg.SampledSignal) -> GaborCoefficients:
        if f.grid != self.grid:
            raise ValidationError("signal and window live on different grids")
        prod = f.values[None, :] * self.windows.conj()
        if self.fft_route:
            if self.pad:
                prod = np.concatenate([prod, np.zeros((prod.shape[0], self.pad))], axis=1)
            folded = prod.reshape(prod.shape[0], -1, self.m_ch).sum(axis=1)
            rows = np.fft.fft(folded, axis=1)[:, self.lat.ns % self.m_ch]
        else:
            rows = prod @ self.expo.T
        return GaborCoefficients(self.lat, self.grid.step * rows * self.phase)

    def synthesize(self, c: GaborCoefficients) -> sg.SampledSignal:
        if c.lattice != self.lat:
            raise ValidationError("coefficient lattice does not match the system")
        d = c.entries * self.phase.conj()
        N = self.grid.N
        if self.fft_route:
            spread = np.zeros((d.shape[0], self.m_ch), dtype=complex)
            spread[:, self.lat.ns % self.m_ch] = d
            inner = self.m_ch * np.fft.ifft(spread, axis=1)
            inner = inner[:, np.arange(N) % self.m_ch]
        else:
            inner = d @ self.expo.conj()
        return sg.SampledSignal(self.grid, np.einsum("kj,kj->j", self.windows, inner))

    def frame_operator(self, f: sg.SampledSignal) -> sg.SampledSignal:
        return self.synthesize(self.analyze(f))

    def atom(self, k: int, n: int) -> sg.SampledSignal:
        return self.synthesize(GaborCoefficients.delta(self.lat, k, n))


def analyze(psi, lat, f) -> GaborCoefficients:
    return GaborSystem(psi, lat).analyze(f)


def synthesize(psi, lat, c) -> sg.SampledSignal:
    return GaborSystem(psi, lat).synthesize(c)


def frame_operator(psi, lat, f) -> sg.SampledSignal:
    return GaborSystem(psi, lat).frame_operator(f)


def atom(psi, lat, k, n) -> sg.SampledSignal:
    """T_{ak} M_{bn} psi evaluated pointwise (no truncation involved)."""
    return sg.modulate(sg.shift(psi, lat.a * k), lat.b * n) * np.exp(-2j * np.pi * lat.a * lat.b * k * n)


def frame_bounds(psi, lat, iters: int = 65):
    """(A, B) estimates: extreme eigenvalues of S compressed to the span of the
    Hermite functions h_0..h_{iters-1}, a subspace concentrated in the middle
    of the time-frequency box where truncation does not bite."""
    if not 1 <= iters <= sg.MAX_HERMITE + 1:
        raise ValidationError(f"iters must be in 1..{sg.MAX_HERMITE + 1}")
    system = psi if isinstance(psi, GaborSystem) else GaborSystem(psi, lat)
    g = system.grid
    H = sg.hermite_values(iters - 1, g.x)
    SH = np.array([system.frame_operator(sg.SampledSignal(g, h)).values for h in H])
    G = g.step * (H @ SH.conj().T).conj()
    ev = np.linalg.eigvalsh(0.5 * (G + G.conj().T))
    return float(ev[0]), float(ev[-1])


@dataclass
class DualInfo:
    iterations: int
    residual: float
    frame_bounds: tuple
    ritz: tuple = ()
    history: list = field(default_factory=list)

    def to_dict(self):
        return {"iterations": self.iterations, "residual": self.residual,
                "frame_bounds": list(self.frame_bounds), "ritz": list(self.ritz)}


def _frame_check(system, frame_tol):
    A, B = frame_bounds(system, system.lat)
    if not (A > frame_tol * B and A > 0):
        raise NotAFrameError(
            f"frame bound ratio A/B = {A / B:.3e} below {frame_tol:g}; "
            "the truncated system does not look like a frame",
            diagnostics={"A": A, "B": B, "lattice": system.lat.to_dict()})
    return A, B


def canonical_dual(psi, lat, tol: float = 1e-10, max_iter: int = 500,
                   frame_tol: float = NOT_A_FRAME_RATIO, return_info: bool = False):
    """gamma = S^{-1} psi by conjugate gradient."""
    system = GaborSystem(psi, lat)
    A, B = _frame_check(system, frame_tol)
    g = psi.grid

    def op(v):
        return system.frame_operator(sg.SampledSignal(g, v)).values

    res = conjugate_gradient(op, psi.values, tol=tol, max_iter=max_iter)
    info = DualInfo(res.iterations, res.residual, (A, B), tuple(res.ritz), res.history)
    if not res.converged:
        raise NotAFrameError(
            f"conjugate gradient stalled at relative residual {res.residual:.3e} "
            f"after {res.iterations} iterations",
            diagnostics=info.to_dict())
    vals = res.x
    if np.all(psi.values.imag == 0):
        vals = vals.real
    gamma = sg.SampledSignal(g, vals)
    return (gamma, info) if return_info else gamma


def _symmetrize(vals, real, even):
    if real:
        vals = vals.real.astype(complex)
    if even:
        vals = 0.5 * (vals + np.roll(vals[::-1], 1))
    return vals


def tight_window(psi, lat, tol: float = 1e-8, max_iter: int = 60,
                 frame_tol: float = NOT_A_FRAME_RATIO, return_info: bool = False):
    """S^{-1/2} psi by the Newton-Schulz iteration on windows.

    If X is a function of S_psi, the frame operator of X psi is X^2 S_psi, so
    phi <- (3 phi - S_phi phi) / 2 is the inverse-square-root iteration
    X <- X (3 - S X^2) / 2 written without ever forming X. Starting from
    psi / sqrt(lambda_max) keeps the scaled spectrum inside (0, 1].
    """
    g = psi.grid
    system = GaborSystem(psi, lat)
    A, B = _frame_check(system, frame_tol)
    lam = power_iteration(lambda v: system.frame_operator(sg.SampledSignal(g, v)).values,
                          psi.values, iters=30)
    lam = max(lam, B) * 1.01
    real = bool(np.all(psi.values.imag == 0))
    even = bool(np.allclose(psi.values, np.roll(psi.values[::-1], 1), rtol=0, atol=1e-14))
    phi = _symmetrize(psi.values / math.sqrt(lam), real, even)
    history = []
    best_r, best = math.inf, phi
    for _ in range(max_iter):
        cur = sg.SampledSignal(g, phi)
        s_phi = GaborSystem(cur, lat).frame_operator(cur).values
        r = float(np.linalg.norm(s_phi - phi) / np.linalg.norm(phi))
        history.append(r)
        if r < best_r:
            best_r, best = r, phi
        if r <= tol:
            break
        # the exact iteration decreases the residual monotonically; once it
        # stops, truncation of the box is the floor and the iterates drift
        if len(history) > 1 and r >= history[-2]:
            break
        phi = _symmetrize(0.5 * (3.0 * phi - s_phi), real, even)
    if best_r > tol:
        raise ConvergenceError(
            f"tight-window iteration reached only {best_r:.3e} (tol {tol:g})",
            diagnostics={"history": history})
    phi = best
    if real:
        phi = phi.real
    out = sg.SampledSignal(g, phi)
    info = DualInfo(len(history), best_r, (A, B), (), history)
    return (out, info) if return_info else out


def wexler_raz_defect(psi, gamma, lat, box: int = 8) -> float:
    """max |(1/ab) (psi, T_{k/b} M_{n/a} gamma) - delta| over |k|, |n| <= box.

    By covariance of the inner product under joint time-frequency shifts,
    only the relative offsets (k - k', n - n') matter, so one analysis of psi
    against gamma on the adjoint lattice covers every pair.
    """
    adj = lat.adjoint(box)
    c = analyze(gamma, adj, psi).entries / (lat.a * lat.b)
    c[box, box] -= 1.0
    return float(np.abs(c).max())


def adjoint_identity_defect(psi, gamma, lat, box: int = 4) -> float:
    """max entry of |(1/ab) C_psi D_gamma - I| on the adjoint-lattice box."""
    adj = lat.adjoint(box)
    gs = GaborSystem(gamma, adj)
    ps = GaborSystem(psi, adj)
    worst = 0.0
    for k in adj.ks:
        for n in adj.ns:
            col = ps.analyze(gs.atom(int(k), int(n))).entries / (lat.a * lat.b)
            col[k + box, n + box] -= 1.0
            worst = max(worst, float(np.abs(col).max()))
    return worst


def duality_defect(psi, gamma, lat, corpus) -> float:
    """max over the corpus of ||D_gamma C_psi f - f|| / ||f||."""
    ps, gs = GaborSystem(psi, lat), GaborSystem(gamma, lat)
    worst = 0.0
    for f in corpus:
        r = gs.synthesize(ps.analyze(f)) - f
        worst = max(worst, r.norm() / f.norm())
    return worst


def tightness_defect(phi, lat, corpus, A: float) -> float:
    system = GaborSystem(phi, lat)
    return max((system.frame_operator(f) - A * f).norm() / f.norm() for f in corpus)
