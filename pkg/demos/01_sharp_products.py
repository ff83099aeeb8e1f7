"""Sharp products of exponent sequences and their counting functions.

The sharp product of two sequences is the sorted list of all pairwise sums.
For power weights t^(1/mu) and t^(1/tau) it behaves like the sequence of the
single weight t^(1/(mu+tau)), which is what this script shows numerically.
"""
import numpy as np

from bbspaces import expseq as es
from bbspaces import weights as wm


def seq(mu):
    return es.FromWeight(wm.PowerLog(mu, 0.0))


ab = es.sharp(seq(1), seq(1))
print("first terms of id # id:", ab.prefix(12).tolist())

# counting function: nu(s) = (s+1)(s+2)/2 for id # id
for s in (0, 3, 10, 30):
    print(f"  nu({s:2d}) = {ab.counting(s):4d}   formula {(s + 1) * (s + 2) // 2}")

probes = np.geomspace(1, 1e4, 40)
print("\nnu_a(s/2) nu_b(s/2) <= nu_(a#b)(s) <= nu_a(s) nu_b(s) on [1, 1e4]:",
      es.check_fundamental(seq(1), seq(2), probes))

print("\nequivalence with the merged power sequence")
for mu, tau in [(1, 1), (1, 2), (2, 3)]:
    rep = es.equivalent(es.sharp(seq(mu), seq(tau)), seq(mu + tau), probes)
    print(f"  mu={mu}, tau={tau}: holds={rep.holds}, L={rep.L:g}")
