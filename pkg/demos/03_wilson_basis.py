"""An orthonormal Wilson basis and the sequence-space representation.

The window is S^(-1/2) applied to the Gaussian at (1/2, 1), scaled so the
Gabor frame bound is 2. Its Wilson system is then orthonormal, and the
coefficients of a function, re-indexed onto N x N, decay like the function.
"""
import numpy as np

from bbspaces import classify as cl
from bbspaces import signal as sg
from bbspaces import weights as wm
from bbspaces import wilson as wl

grid = sg.GridSpec(32, 4096)
psi, info = wl.build_wilson_window(grid, return_info=True)
print(f"window: norm {psi.norm():.12f}, boundary |psi| {psi.boundary_magnitude():.1e}, "
      f"{info.iterations} Newton-Schulz steps")
print(f"Gram deviation on |k| <= 12, n <= 24: {wl.gram_defect(psi, 12, 24):.2e}")

sp = cl.SpaceDescriptor(wm.PowerLog(1, 0), wm.PowerLog(1, 0))
print("\n m   Parseval error   round trip     r_star")
for m, h in enumerate(sg.hermite_corpus(grid, 6)):
    c = wl.wilson_analyze(psi, h, 24, 24)
    pars = abs(np.sum(np.abs(c.entries) ** 2) - 1.0)
    back = wl.sequence_rep_inverse(psi, wl.sequence_rep(psi, h, 24, 24))
    fit = cl.decay_envelope(c, sp)
    print(f"{m:2d}   {pars:.2e}         {(back - h).norm():.2e}     {fit.r_star:.3f}")

# polynomial decay has no exponential envelope; the rate shrinks with the box
for K in (50, 200, 1000):
    k, n = np.arange(-K, K + 1)[:, None], np.arange(K + 1)[None, :]
    c = wl.WilsonCoefficients(K, K, 1.0 / (1 + k ** 2 + n ** 2))
    print(f"1/(1+k^2+n^2) on box {K}: r_star = {cl.decay_envelope(c, sp).r_star:.4f}")
