"""Matrix-free Krylov helpers for Hermitian positive (semi)definite operators."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


@dataclass
class CGResult:
    x: np.ndarray
    converged: bool
    iterations: int
    residual: float
    history: list = field(default_factory=list)
    ritz: np.ndarray = field(default_factory=lambda: np.zeros(0))


def _ritz(alphas, betas):
    """Eigenvalues of the Lanczos tridiagonal implied by the CG coefficients."""
    m = len(alphas)
    if m == 0:
        return np.zeros(0)
    diag = np.empty(m)
    off = np.empty(max(m - 1, 0))
    for i in range(m):
        diag[i] = 1.0 / alphas[i]
        if i > 0:
            diag[i] += betas[i - 1] / alphas[i - 1]
            off[i - 1] = np.sqrt(betas[i - 1]) / alphas[i - 1]
    T = np.diag(diag) + np.diag(off, 1) + np.diag(off, -1)
    return np.linalg.eigvalsh(T)


def conjugate_gradient(op, rhs, x0=None, tol=1e-10, max_iter=500):
    """Solve op(x) = rhs for Hermitian positive definite op.

    Stops when ||op(x) - rhs|| <= tol ||rhs||. The residual is recomputed
    from scratch at the end so the reported value is the true one.
    """
    b = np.asarray(rhs, dtype=complex)
    bnorm = np.linalg.norm(b)
    x = np.zeros_like(b) if x0 is None else np.array(x0, dtype=complex)
    if bnorm == 0:
        return CGResult(np.zeros_like(b), True, 0, 0.0)
    r = b - op(x) if x0 is not None else b.copy()
    p = r.copy()
    rr = np.vdot(r, r).real
    history = [np.sqrt(rr) / bnorm]
    alphas, betas = [], []
    converged = history[-1] <= tol
    it = 0
    while not converged and it < max_iter:
        it += 1
        Ap = op(p)
        pAp = np.vdot(p, Ap).real
        if pAp <= 0:
            break
        alpha = rr / pAp
        x += alpha * p
        r -= alpha * Ap
        rr_new = np.vdot(r, r).real
        beta = rr_new / rr
        alphas.append(alpha)
        betas.append(beta)
        rr = rr_new
        history.append(np.sqrt(rr) / bnorm)
        if history[-1] <= tol:
            # confirm with the true residual before stopping
            true_r = b - op(x)
            history[-1] = np.linalg.norm(true_r) / bnorm
            if history[-1] <= tol:
                converged = True
                break
            r = true_r
            rr = np.vdot(r, r).real
        p = r + beta * p
    final = float(np.linalg.norm(b - op(x)) / bnorm)
    return CGResult(x, final <= tol, it, final, history, _ritz(alphas, betas[:-1]))


def power_iteration(op, x0, iters=30):
    """Largest eigenvalue estimate of a Hermitian positive semidefinite operator."""
    v = np.asarray(x0, dtype=complex)
    v = v / np.linalg.norm(v)
    lam = 0.0
    for _ in range(iters):
        w = op(v)
        lam = float(np.vdot(v, w).real)
        nrm = np.linalg.norm(w)
        if nrm == 0:
            return 0.0
        v = w / nrm
    return lam
