"""Wilson bases and the sequence-space representation built on them.

Wilson atoms for a window psi are

    psi_{k,0} = T_k psi
    psi_{k,n} = (T_{k/2} (M_n + (-1)^(k+n) M_{-n}) psi) / sqrt(2),   n >= 1

so every atom is a combination of at most two Gabor atoms on the lattice
(1/2) Z x Z. Analysis and synthesis are therefore a Gabor transform followed
(or preceded) by a re-indexing: phi1 maps Gabor coefficients on Z^2 to Wilson
coefficients on Z x N, phi2 goes the other way, and phi interleaves Z x N
onto N^2.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import gabor as gb
from . import signal as sg
from .errors import ValidationError

SQRT_HALF = 1.0 / math.sqrt(2.0)
WILSON_A, WILSON_B = 0.5, 1.0


@dataclass(frozen=True, eq=False)
class WilsonCoefficients:
    """Entries c[k + K, n] for |k| <= K, 0 <= n <= M."""

    K: int
    M: int
    entries: np.ndarray

    def __post_init__(self):
        e = np.asarray(self.entries, dtype=complex)
        if e.shape != (2 * self.K + 1, self.M + 1):
            raise ValidationError(f"Wilson box {e.shape} does not match K={self.K}, M={self.M}")
        object.__setattr__(self, "entries", e)

    def __getitem__(self, kn):
        k, n = kn
        if abs(k) > self.K or not 0 <= n <= self.M:
            raise IndexError(f"({k}, {n}) outside the box")
        return self.entries[k + self.K, n]

    @classmethod
    def delta(cls, K, M, k, n):
        e = np.zeros((2 * K + 1, M + 1), dtype=complex)
        e[k + K, n] = 1.0
        return cls(K, M, e)

    def shells(self, omega, eta, k_scale=1.0, n_scale=1.0):
        """eta(|k|) + omega(n) for every entry."""
        k = np.abs(np.arange(-self.K, self.K + 1)) * k_scale
        n = np.arange(self.M + 1) * n_scale
        return np.asarray(eta(k))[:, None] + np.asarray(omega(n))[None, :]


@dataclass(frozen=True, eq=False)
class GridCoefficients2D:
    """Entries d[k, n] for 0 <= k <= 2K, 0 <= n <= M (the image of phi)."""

    K: int
    M: int
    entries: np.ndarray

    def __post_init__(self):
        e = np.asarray(self.entries, dtype=complex)
        if e.shape != (2 * self.K + 1, self.M + 1):
            raise ValidationError(f"grid box {e.shape} does not match K={self.K}, M={self.M}")
        object.__setattr__(self, "entries", e)


def wilson_lattice(K: int, M: int) -> gb.LatticeSpec:
    """Gabor box carrying a Wilson box: the n = 0 row needs translates up to 2K."""
    return gb.LatticeSpec(WILSON_A, WILSON_B, 2 * K, M)


def _sign(k, n):
    return 1.0 - 2.0 * ((np.asarray(k) + np.asarray(n)) % 2)


def phi1(c: gb.GaborCoefficients, K: int, M: int) -> WilsonCoefficients:
    lat = c.lattice
    if lat.K < 2 * K or lat.M < M:
        raise ValidationError(f"Gabor box (K={lat.K}, M={lat.M}) too small for Wilson box "
                              f"(K={K}, M={M}); need K >= {2 * K}, M >= {M}")
    e = c.entries
    ks = np.arange(-K, K + 1)
    out = np.zeros((2 * K + 1, M + 1), dtype=complex)
    out[:, 0] = e[2 * ks + lat.K, lat.M]
    if M:
        n = np.arange(1, M + 1)
        pos = e[ks[:, None] + lat.K, n[None, :] + lat.M]
        neg = e[ks[:, None] + lat.K, -n[None, :] + lat.M]
        out[:, 1:] = SQRT_HALF * (pos + _sign(ks[:, None], n[None, :]) * neg)
    return WilsonCoefficients(K, M, out)


def phi2(c: WilsonCoefficients) -> gb.GaborCoefficients:
    K, M = c.K, c.M
    lat = wilson_lattice(K, M)
    out = np.zeros(lat.shape, dtype=complex)
    ks = np.arange(-K, K + 1)
    # n = 0: even Gabor translates carry c_{k/2, 0}, odd ones vanish
    out[2 * ks + lat.K, lat.M] = c.entries[:, 0]
    if M:
        n = np.arange(1, M + 1)
        rows = ks[:, None] + lat.K
        out[rows, n[None, :] + lat.M] = SQRT_HALF * c.entries[:, 1:]
        out[rows, -n[None, :] + lat.M] = SQRT_HALF * _sign(ks[:, None], -n[None, :]) * c.entries[:, 1:]
    return gb.GaborCoefficients(lat, out)


def _phi_rows(K):
    """Row of the Wilson array feeding each row k' = 0..2K of the N^2 array."""
    kp = np.arange(2 * K + 1)
    k = np.where(kp % 2 == 0, -kp // 2, (kp + 1) // 2)
    return k + K


def phi(c: WilsonCoefficients) -> GridCoefficients2D:
    return GridCoefficients2D(c.K, c.M, c.entries[_phi_rows(c.K)])


def phi_inverse(d: GridCoefficients2D) -> WilsonCoefficients:
    out = np.empty_like(d.entries)
    out[_phi_rows(d.K)] = d.entries
    return WilsonCoefficients(d.K, d.M, out)


def wilson_atom(psi: sg.SampledSignal, k: int, n: int) -> sg.SampledSignal:
    if n < 0:
        raise ValidationError("Wilson atoms are indexed by n >= 0")
    if n == 0:
        return sg.translate(psi, float(k))
    s = float(_sign(k, n))
    v = sg.modulate(psi, n) + s * sg.modulate(psi, -n)
    return sg.translate(v, 0.5 * k) * SQRT_HALF


def wilson_analyze(psi, f, K: int, M: int) -> WilsonCoefficients:
    return phi1(gb.analyze(psi, wilson_lattice(K, M), f), K, M)


def wilson_synthesize(psi, c: WilsonCoefficients) -> sg.SampledSignal:
    return gb.synthesize(psi, wilson_lattice(c.K, c.M), phi2(c))


def wilson_window_lattice(grid: sg.GridSpec) -> gb.LatticeSpec:
    """Widest symmetric (1/2, 1) box the grid supports for the window build."""
    K = int(math.floor((grid.T - 2.0) / WILSON_A + 1e-9))
    channels = round(1.0 / (WILSON_B * grid.step))
    M = min((channels - 1) // 2, int(math.floor(grid.nyquist / WILSON_B + 1e-9)))
    return gb.LatticeSpec(WILSON_A, WILSON_B, K, M)


def build_wilson_window(grid: sg.GridSpec, tol: float = 1e-9,
                        return_info: bool = False):
    """Orthonormal-basis window: S^{-1/2} of the Gaussian at (1/2, 1), scaled
    to frame bound 2 (and hence unit norm). Real and even."""
    grid.steps(WILSON_A)
    g = sg.gaussian(grid)
    phi_, info = gb.tight_window(g, wilson_window_lattice(grid), tol=tol, return_info=True)
    psi = sg.SampledSignal(grid, math.sqrt(2.0) * phi_.values.real)
    return (psi, info) if return_info else psi


def gram_defect(psi, K: int = 12, M: int = 24) -> float:
    """max |G - I| over Wilson atoms with |k| <= K, 0 <= n <= M."""
    atoms = np.array([wilson_atom(psi, k, n).values
                      for k in range(-K, K + 1) for n in range(M + 1)])
    G = psi.grid.step * (atoms.conj() @ atoms.T)
    return float(np.abs(G - np.eye(G.shape[0])).max())


def sequence_rep(psi, f, K: int, M: int) -> GridCoefficients2D:
    return phi(wilson_analyze(psi, f, K, M))


def sequence_rep_inverse(psi, d: GridCoefficients2D) -> sg.SampledSignal:
    return wilson_synthesize(psi, phi_inverse(d))
