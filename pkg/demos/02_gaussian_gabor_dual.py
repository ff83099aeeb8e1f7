"""Canonical dual of the Gaussian on the lattice a = b = 1/sqrt(2).

Computes the dual window by conjugate gradients on the frame operator, checks
the Wexler-Raz relations and reconstruction on Hermite functions, then sweeps
the lattice density to watch the frame bounds degrade as ab approaches 1.
"""
import math
import time

from bbspaces import gabor as gb
from bbspaces import signal as sg

grid = sg.GridSpec(16, 2048)
psi = sg.gaussian(grid)
lat = gb.LatticeSpec.for_grid(grid, 1 / math.sqrt(2), 1 / math.sqrt(2))
print(f"grid T={grid.T}, N={grid.N}; lattice K={lat.K}, M={lat.M}")

t0 = time.perf_counter()
gamma, info = gb.canonical_dual(psi, lat, tol=1e-10, return_info=True)
print(f"CG: {info.iterations} iterations, residual {info.residual:.1e}, "
      f"{time.perf_counter() - t0:.2f} s")

corpus = sg.hermite_corpus(grid, 9)
print(f"Wexler-Raz defect (box 8):      {gb.wexler_raz_defect(psi, gamma, lat, 8):.2e}")
print(f"reconstruction defect (m <= 9): {gb.duality_defect(psi, gamma, lat, corpus):.2e}")

# a 1% error in the dual is visible in the biorthogonality relations
bad = gamma + 0.01 * sg.hermite(3, grid)
print(f"perturbed dual, Wexler-Raz:     {gb.wexler_raz_defect(psi, bad, lat, 8):.2e}")

print("\nframe bound ratio B/A as a = b grows")
for ab in (0.71, 0.8, 0.9, 0.95, 0.99):
    A, B = gb.frame_bounds(psi, gb.LatticeSpec.for_grid(grid, ab, ab))
    print(f"  a = b = {ab:.2f}:  A = {A:.4f}, B = {B:.4f}, B/A = {B / A:7.3f}")
