"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

Run alone with ``python3 tests/test_acceptance.py`` or through pytest (the
lines are repeated in the terminal summary).
"""
import math
import time

import numpy as np
import pytest

from bbspaces import classify as cl
from bbspaces import expseq as es
from bbspaces import gabor as gb
from bbspaces import signal as sg
from bbspaces import weights as wm
from bbspaces import wilson as wl

from oracles import ISO_TABLE, brute_count, brute_sharp, random_sequence, space

RESULTS = []
RT2 = 1 / math.sqrt(2)


def record(n, name, ok, detail):
    line = f"[{'PASS' if ok else 'FAIL'}] criterion {n:2d} {name}: {detail}"
    RESULTS.append(line)
    print(line)
    assert ok, line


@pytest.fixture(scope="module")
def gauss16():
    grid = sg.GridSpec(16, 2048)
    lat = gb.LatticeSpec.for_grid(grid, RT2, RT2)
    psi = sg.gaussian(grid)
    t0 = time.perf_counter()
    gamma = gb.canonical_dual(psi, lat, tol=1e-10)
    return grid, lat, psi, gamma, time.perf_counter() - t0


@pytest.fixture(scope="module")
def wilson32():
    grid = sg.GridSpec(32, 4096)
    t0 = time.perf_counter()
    psi = wl.build_wilson_window(grid)
    return grid, psi, time.perf_counter() - t0


def test_c01_sharp_oracle():
    rng = np.random.default_rng(20240101)
    pairs = [(random_sequence(rng, 1000), random_sequence(rng, 1000)) for _ in range(100)]
    t0 = time.perf_counter()
    bad = 0
    for a, b in pairs:
        # product prefixes up to 10^4 terms (of the ~5e5 the inputs determine)
        ref = brute_sharp(a, b)[:10_000]
        got = es.sharp(es.Explicit(a), es.Explicit(b)).prefix(ref.size)
        bad += not np.array_equal(got, ref)
    dt = time.perf_counter() - t0
    record(1, "sharp = brute force", bad == 0 and dt < 5.0,
           f"{100 - bad}/100 exact on 1e4-term prefixes, {dt:.2f} s (limit 5 s)")


def test_c02_fundamental_lemma():
    rng = np.random.default_rng(7)
    n_ok = 0
    for _ in range(50):
        a, b = random_sequence(rng, 1000, 3), random_sequence(rng, 1000, 3)
        A, B = es.Explicit(a), es.Explicit(b)
        top = min(a[-1], b[-1], es.sharp(A, B).determined_below()) - 1
        p = np.sort(rng.uniform(0, top, 50))
        ref = brute_sharp(a, b)
        ok = es.check_fundamental(A, B, p) and all(
            brute_count(a, s / 2) * brute_count(b, s / 2) <= es.sharp(A, B).counting(s)
            <= brute_count(a, s) * brute_count(b, s) and es.sharp(A, B).counting(s) == brute_count(ref, s)
            for s in p)
        n_ok += ok
    record(2, "nu bounds on sharp", n_ok == 50, f"{n_ok}/50 pairs x 50 probes hold exactly")


def test_c03_explicit_lemma():
    p = np.geomspace(1, 1e4, 60)
    Ls = []
    for mu, tau in [(1, 1), (1, 2), (2, 3)]:
        prod = es.sharp(es.FromWeight(wm.PowerLog(mu, 0)), es.FromWeight(wm.PowerLog(tau, 0)))
        r = es.equivalent(prod, es.FromWeight(wm.PowerLog(mu + tau, 0)), p)
        Ls.append(r.L if r.holds else math.inf)
    record(3, "alpha sharp alpha ~ alpha(mu+tau)", max(Ls) <= 8,
           "L = " + ", ".join(f"{L:g}" for L in Ls) + " (limit 8) on s in [1, 1e4]")


def test_c04_gaussian_dual(gauss16):
    grid, lat, psi, gamma, dt = gauss16
    t0 = time.perf_counter()
    wr = gb.wexler_raz_defect(psi, gamma, lat, 8)
    rec = gb.duality_defect(psi, gamma, lat, sg.hermite_corpus(grid, 9))
    dt += time.perf_counter() - t0
    record(4, "Gaussian dual", wr < 1e-8 and rec < 1e-8 and dt < 30.0,
           f"WR {wr:.2e}, reconstruction {rec:.2e} (limit 1e-8), {dt:.2f} s (limit 30 s)")


def test_c05_wexler_raz_discrimination(gauss16):
    grid, lat, psi, gamma, _ = gauss16
    bad = gamma + 0.01 * sg.hermite(3, grid)
    d = gb.wexler_raz_defect(psi, bad, lat, 8)
    record(5, "WR detects perturbed dual", d > 1e-3, f"defect {d:.2e} (must exceed 1e-3)")


def test_c06_wilson_onb(wilson32):
    grid, psi, dt = wilson32
    t0 = time.perf_counter()
    gram = wl.gram_defect(psi, 12, 24)
    pars = max(abs(np.sum(np.abs(wl.wilson_analyze(psi, f, 24, 24).entries) ** 2) - f.norm() ** 2)
               for f in sg.hermite_corpus(grid, 9))
    dt += time.perf_counter() - t0
    record(6, "Wilson ONB", gram < 1e-6 and pars < 1e-7 and dt < 60.0,
           f"Gram {gram:.2e} (limit 1e-6), Parseval {pars:.2e} (limit 1e-7), {dt:.2f} s")


def test_c07_sequence_rep_round_trip(wilson32):
    grid, psi, _ = wilson32
    err = max((wl.sequence_rep_inverse(psi, wl.sequence_rep(psi, f, 24, 24)) - f).norm() / f.norm()
              for f in sg.hermite_corpus(grid, 9))
    rng = np.random.default_rng(11)
    exact, ulp = True, 0.0
    for _ in range(20):
        K, M = rng.integers(0, 12, 2)
        c = wl.WilsonCoefficients(K, M, rng.standard_normal((2 * K + 1, M + 1))
                                  + 1j * rng.standard_normal((2 * K + 1, M + 1)))
        back = wl.phi1(wl.phi2(c), K, M).entries
        exact &= np.array_equal(wl.phi_inverse(wl.phi(c)).entries, c.entries)
        exact &= np.array_equal(back[:, 0], c.entries[:, 0])
        ulp = max(ulp, float(np.max(np.abs(back - c.entries) / np.abs(c.entries))))
    ok = err < 1e-8 and exact and ulp <= 4 * np.finfo(float).eps
    record(7, "sequence representation round trip", ok,
           f"relative L2 {err:.2e} (limit 1e-8); Phi1 Phi2 = id up to {ulp:.1e} relative")


def test_c08_decay(wilson32):
    grid, psi, _ = wilson32
    sp = cl.SpaceDescriptor(wm.PowerLog(1, 0), wm.PowerLog(1, 0))
    rates = [cl.decay_envelope(wl.wilson_analyze(psi, sg.hermite(m, grid), 24, 24), sp).r_star
             for m in range(7)]
    K = 1000
    k, n = np.arange(-K, K + 1)[:, None], np.arange(K + 1)[None, :]
    poly = cl.decay_envelope(wl.WilsonCoefficients(K, K, 1.0 / (1 + k ** 2 + n ** 2)), sp).r_star
    record(8, "coefficient decay envelope", min(rates) > 0.1 and poly < 0.01,
           f"Hermite min r_star {min(rates):.3f} (> 0.1), polynomial array {poly:.4f} (< 0.01)")


def test_c09_classification():
    agree = 0
    for p1, p2, truth in ISO_TABLE:
        a = cl.decide_isomorphic(space(p1), space(p2))
        b = cl.decide_isomorphic(space(p1), space(p2), method="numeric")
        agree += ((a.relation == "isomorphic") == truth == (b.relation == "isomorphic")
                  and a.witness["equal"] == b.witness["equal"] == (p1 == p2))
    record(9, "classification truth table", agree == len(ISO_TABLE),
           f"{agree}/{len(ISO_TABLE)} tuples, closed form and numeric agree")


def test_c10_fourier_self_dual():
    g = sg.gaussian(sg.GridSpec(16, 2048))
    G = sg.fourier(g)
    # compare with the same Gaussian sampled on the dual grid
    err = float(np.abs(G.values - sg.gaussian(G.grid).values).max())
    record(10, "Gaussian Fourier self-duality", err < 1e-10, f"max error {err:.2e} (limit 1e-10)")


def test_c11_frame_bound_sweep():
    grid = sg.GridSpec(16, 2048)
    psi = sg.gaussian(grid)
    ratios = []
    for ab in (0.71, 0.8, 0.9, 0.95, 0.99):
        A, B = gb.frame_bounds(psi, gb.LatticeSpec.for_grid(grid, ab, ab))
        ratios.append(B / A)
    ok = all(r2 > r1 for r1, r2 in zip(ratios, ratios[1:]))
    record(11, "B/A sweep increasing", ok, "B/A = " + ", ".join(f"{r:.3f}" for r in ratios))


if __name__ == "__main__":
    import sys
    sys.exit(pytest.main([__file__, "-q"]))
