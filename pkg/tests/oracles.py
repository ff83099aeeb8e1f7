"""Independent reference implementations used by the tests."""
import numpy as np


def brute_sharp(a, b):
    """Sorted pairwise sums of two finite prefixes, cut where the prefixes
    stop determining the rearrangement."""
    a, b = np.asarray(a, float), np.asarray(b, float)
    cut = min(a[-1] + b[0], a[0] + b[-1])
    sums = np.sort(np.add.outer(a, b).ravel())
    return sums[sums < cut]


def brute_count(terms, s):
    return int(np.count_nonzero(np.asarray(terms) <= s))


def random_sequence(rng, n, step_max=5):
    """Non-decreasing non-negative integer sequence."""
    return np.cumsum(rng.integers(0, step_max + 1, n)) + rng.integers(0, 3)


# (mu1, tau1, u1, v1), (mu2, tau2, u2, v2), isomorphic?
# Truth from the PowerLog criterion: mu1 + tau1 = mu2 + tau2 and
# u1 mu1 + v1 tau1 = u2 mu2 + v2 tau2; equal only for identical parameters.
ISO_TABLE = [
    ((1, 2, 0, 0), (2, 1, 0, 0), True),
    ((1, 2, 0, 0), (2, 2, 0, 0), False),
    ((1, 1, 0, 0), (1, 1, 0, 0), True),
    ((1, 2, 0, 0), (1.5, 1.5, 0, 0), True),
    ((1, 2, 1, 0), (2, 1, 1, 0), False),
    ((1, 2, 1, 0), (2, 1, 0, 1), True),
    ((1, 1, 1, 1), (0.75, 1.25, 1, 1), True),
    ((1, 1, 0, 0), (1, 1, 1, 0), False),
    ((2, 3, 0, 0), (3, 2, 0, 0), True),
    ((2, 3, 0, 0), (2, 3.5, 0, 0), False),
    ((0.75, 0.75, 0, 0), (0.6, 0.9, 0, 0), True),
    ((1, 3, 0.5, 0), (3, 1, 0, 0.5), True),
    ((1, 3, 0.5, 0), (3, 1, 0.5, 0), False),
    ((1, 1, -1, 0), (1, 1, 0, -1), True),
    ((1, 1, -1, 0), (1, 1, 0, 0), False),
    ((2, 2, 1, -1), (2, 2, 0, 0), True),
    ((4, 1, 0, 0), (2.5, 2.5, 0, 0), True),
    ((4, 1, 0, 0), (2.5, 2.6, 0, 0), False),
    ((1, 2, 2, 0), (2, 1, 0, 2), True),
    ((2, 2, 1, -1), (2, 2, 1, -1), True),
]


def space(p, case="beurling"):
    from bbspaces.classify import SpaceDescriptor
    from bbspaces.weights import PowerLog
    mu, tau, u, v = p
    return SpaceDescriptor(PowerLog(mu, u), PowerLog(tau, v), case)
