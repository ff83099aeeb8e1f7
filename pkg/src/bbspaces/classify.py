"""Coefficient-space norms, decay envelopes and the classification of
Beurling-Bjorck spaces S^[omega]_[eta].

Two spaces (Gabor accessible) are isomorphic iff the exponent sequences
alpha(omega_i, eta_i) are equivalent, i.e. iff for some L and s0

    Q2(s / L) <= Q1(s) <= Q2(L s),  s >= s0,  Q_i = omega_i^{-1} * eta_i^{-1}.

For PowerLog weights this reduces to exponent bookkeeping and is decided in
closed form. Anything else goes through a numeric probe in log space, which
is a finite-range heuristic and says so in its output.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import weights as wm
from .errors import ValidationError

RELATIONS = ("isomorphic", "not_isomorphic", "included", "not_included", "equal",
             "inconclusive")
CASES = ("beurling", "roumieu")
DEFAULT_PROBES = np.geomspace(1e2, 1e100, 160)
# PowerLog weights evaluate exactly in log space, so they are probed much
# further out: log s up to 1e12, where the log-factor corrections have died down
POWERLOG_LOG_PROBES = np.geomspace(math.log(1e2), 1e12, 160)
L_MAX_LOG = math.log(2.0 ** 10)
TREND_SLOPE = 0.1
TREND_SLOPE_FAR = 1e-3  # on the PowerLog range, where corrections are ~ log y / y


@dataclass(frozen=True)
class SpaceDescriptor:
    omega: wm.WeightFunction
    eta: wm.WeightFunction
    case: str = "beurling"
    validate: bool = field(default=True, compare=False, repr=False)

    def __post_init__(self):
        case = self.case.lower()
        if case not in CASES:
            raise ValidationError(f"case must be one of {CASES}, got {self.case!r}")
        object.__setattr__(self, "case", case)
        if self.validate:
            for name, w in (("omega", self.omega), ("eta", self.eta)):
                rep = wm.check_conditions(w)
                ok = rep.alpha_ok and (rep.gamma_strict_ok if case == "roumieu" else rep.gamma_ok)
                if not ok:
                    cond = "{gamma}" if case == "roumieu" else "(gamma)"
                    raise ValidationError(
                        f"{name} = {w.to_dict()} is not a {case} weight: needs (alpha) and {cond}")

    def to_dict(self):
        return {"omega": self.omega.to_dict(), "eta": self.eta.to_dict(), "case": self.case}


@dataclass(frozen=True)
class ClassificationVerdict:
    relation: str
    method: str
    witness: dict
    probe_range: tuple | None = None

    def __post_init__(self):
        if self.relation not in RELATIONS:
            raise ValueError(f"unknown relation {self.relation!r}")

    def to_dict(self):
        return {"relation": self.relation, "method": self.method, "witness": self.witness,
                "probe_range": list(self.probe_range) if self.probe_range else None}


# --------------------------------------------------------------------------
# coefficient norms and envelopes


def _index_grid(c):
    """(|k|, |n|, entries) for Gabor or Wilson coefficients."""
    if hasattr(c, "lattice"):
        lat = c.lattice
        k = np.abs(lat.ks)[:, None] * np.ones(lat.shape[1])
        n = np.abs(lat.ns)[None, :] * np.ones((lat.shape[0], 1))
        return k, n, c.entries, (lat.a, lat.b)
    K, M = c.K, c.M
    k = np.abs(np.arange(-K, K + 1))[:, None] * np.ones(M + 1)
    n = np.arange(M + 1)[None, :] * np.ones((2 * K + 1, 1))
    return k, n, c.entries, (0.5, 1.0)


def shell_values(c, sp: SpaceDescriptor, lattice_scaled: bool = False):
    k, n, e, (a, b) = _index_grid(c)
    if lattice_scaled:
        k, n = a * k, b * n
    return np.asarray(sp.eta(k)) + np.asarray(sp.omega(n)), e


def coeff_norm(c, sp: SpaceDescriptor, r: float, lattice_scaled: bool = False) -> float:
    """max |c_{k,n}| exp(r (eta(|k|) + omega(|n|))); inf on overflow."""
    s, e = shell_values(c, sp, lattice_scaled)
    mag = np.abs(e)
    nz = mag > 0
    if not nz.any():
        return 0.0
    if r == 0:
        return float(mag.max())
    top = float((np.log(mag[nz]) + r * s[nz]).max())
    return math.inf if top > 709.0 else math.exp(top)


@dataclass(frozen=True)
class EnvelopeFit:
    r_star: float
    residual: float
    slope: float
    n_shells: int
    inconclusive: bool = False
    shells: tuple = field(default=(), repr=False)
    maxima: tuple = field(default=(), repr=False)

    def to_dict(self):
        return {"r_star": self.r_star, "residual": self.residual, "slope": self.slope,
                "n_shells": self.n_shells, "inconclusive": self.inconclusive}


def shell_maxima(c, sp: SpaceDescriptor, lattice_scaled: bool = False, floor: float = 1e-300):
    """Distinct shell values and the largest |c| on each."""
    s, e = shell_values(c, sp, lattice_scaled)
    mag = np.abs(e).ravel()
    s = s.ravel()
    keep = mag > floor
    s, mag = s[keep], mag[keep]
    if s.size == 0:
        return np.zeros(0), np.zeros(0)
    key = np.round(s, 9)
    uniq, inv = np.unique(key, return_inverse=True)
    best = np.zeros(uniq.size)
    np.maximum.at(best, inv, mag)
    return uniq, best


def decay_envelope(c, sp: SpaceDescriptor, lattice_scaled: bool = False) -> EnvelopeFit:
    """Largest r such that log|c| <= log C - r s on every shell s beyond the
    peak, with C fixed by the peak shell. Also reports the least-squares slope
    of log max|c| against s and its rms residual."""
    s, m = shell_maxima(c, sp, lattice_scaled)
    if s.size == 0:
        return EnvelopeFit(math.nan, math.nan, math.nan, 0, inconclusive=True)
    if s.size == 1:
        return EnvelopeFit(math.inf, 0.0, math.nan, 1, shells=tuple(s), maxima=tuple(m))
    logm = np.log(m)
    if np.ptp(logm) == 0:
        return EnvelopeFit(math.nan, math.nan, 0.0, s.size, inconclusive=True,
                           shells=tuple(s), maxima=tuple(m))
    p = int(np.argmax(logm))
    after = s > s[p]
    if after.any():
        rates = (logm[p] - logm[after]) / (s[after] - s[p])
        r_star = float(rates.min())
    else:
        r_star = math.inf
    A = np.vstack([np.ones_like(s), s]).T
    coef, *_ = np.linalg.lstsq(A, logm, rcond=None)
    resid = float(np.sqrt(np.mean((A @ coef - logm) ** 2)))
    return EnvelopeFit(r_star, resid, float(-coef[1]), s.size, shells=tuple(s), maxima=tuple(m))


# --------------------------------------------------------------------------
# weight comparisons


def _gate(w: wm.WeightFunction, case: str):
    """Sufficient condition for Gabor accessibility: o(t^2) (Beurling) or
    O(t^2) (Roumieu). Returns True/False, or None when undecided."""
    if isinstance(w, wm.Log):
        return True
    if isinstance(w, wm.PowerLog):
        if w.mu != 0.5:
            return w.mu > 0.5
        return w.u < 0 if case == "beurling" else w.u <= 0
    if isinstance(w, wm.Tabulated):
        return True  # linear beyond the last knot
    return None


def _log_weight(w, y):
    y = np.asarray(y, dtype=float)
    with np.errstate(divide="ignore", over="ignore"):
        return w._log_eval(y)


def _trend_bounded(g, y):
    """Heuristic: g(y) bounded above as y -> inf? Compares the slope of g
    against log y on the upper half of the probes."""
    half = y.size // 2
    ly = np.log(y[half:])
    slope = np.polyfit(ly, g[half:], 1)[0]
    return bool(slope <= _slope_limit(y)), float(slope)


def _slope_limit(y):
    return TREND_SLOPE_FAR if y[-1] > 1e6 else TREND_SLOPE


def _log_probes(ws, probes=None):
    """Probe points as y = log s."""
    if probes is not None:
        return np.log(np.asarray(probes, dtype=float))
    if all(isinstance(w, wm.PowerLog) for w in ws):
        return POWERLOG_LOG_PROBES
    return np.log(DEFAULT_PROBES)


def big_o(w2, w1, probes=None):
    """Numeric probe of w2 = O(w1) over t = probes."""
    y = _log_probes((w2, w1), probes)
    g = _log_weight(w2, y) - _log_weight(w1, y)
    return _trend_bounded(g, y)


def _closed_o(w2, w1):
    k2, k1 = wm.growth_exponents(w2), wm.growth_exponents(w1)
    if k2 is None or k1 is None:
        return None
    return k2 <= k1


def _relation_o(w2, w1, probes, method):
    if method != "numeric":
        r = _closed_o(w2, w1)
        if r is not None:
            return r, "closed_form"
        if method == "closed_form":
            raise ValidationError("closed form needs PowerLog or Log weights")
    return big_o(w2, w1, probes)[0], "numeric_probe"


def _probe_range(ws, probes):
    """(log s_lo, log s_hi) actually probed."""
    y = _log_probes(ws, probes)
    return (float(y[0]), float(y[-1]))


def decide_inclusion(sp1: SpaceDescriptor, sp2: SpaceDescriptor, probes=None,
                     method: str = "auto") -> ClassificationVerdict:
    """Is S1 contained in S2? Holds iff omega2 = O(omega1) and eta2 = O(eta1)."""
    if sp1.case != sp2.case:
        raise ValidationError("inclusion needs both spaces in the same case")
    o21, m1 = _relation_o(sp2.omega, sp1.omega, probes, method)
    e21, m2 = _relation_o(sp2.eta, sp1.eta, probes, method)
    o12, m3 = _relation_o(sp1.omega, sp2.omega, probes, method)
    e12, m4 = _relation_o(sp1.eta, sp2.eta, probes, method)
    used = "closed_form" if {m1, m2, m3, m4} == {"closed_form"} else "numeric_probe"
    witness = {"omega2_O_omega1": o21, "eta2_O_eta1": e21,
               "omega1_O_omega2": o12, "eta1_O_eta2": e12}
    if o21 and e21:
        rel = "equal" if (o12 and e12) else "included"
    else:
        rel = "not_included"
    ws = (sp1.omega, sp1.eta, sp2.omega, sp2.eta)
    rng = None if used == "closed_form" else _probe_range(ws, probes)
    return ClassificationVerdict(rel, used, witness, rng)


def _iso_closed_form(sp1, sp2):
    ws = (sp1.omega, sp1.eta, sp2.omega, sp2.eta)
    if not all(isinstance(w, wm.PowerLog) for w in ws):
        return None
    m1, t1, m2, t2 = (w.mu for w in ws)
    u1, v1, u2, v2 = (w.u for w in ws)
    s1, s2 = m1 + t1, m2 + t2
    l1, l2 = u1 * m1 + v1 * t1, u2 * m2 + v2 * t2
    iso = math.isclose(s1, s2, rel_tol=1e-12, abs_tol=1e-12) and \
        math.isclose(l1, l2, rel_tol=1e-12, abs_tol=1e-12)
    equal = (m1, t1, u1, v1) == (m2, t2, u2, v2)
    witness = {"mu_plus_tau": [s1, s2], "u_mu_plus_v_tau": [l1, l2], "equal": equal}
    return ClassificationVerdict("isomorphic" if iso else "not_isomorphic", "closed_form",
                                 witness)


def _needed_log_L(lq1, lq2, y):
    """Smallest l >= 0 with lq2(y - l) <= lq1(y) <= lq2(y + l), per probe
    (bisection on l; capped at 60)."""
    target = lq1(y)

    def ok(l):
        return (lq2(y - l) <= target) & (target <= lq2(y + l))

    lo = np.zeros_like(y)
    hi = np.full_like(y, 60.0)
    good = ok(hi)
    done0 = ok(lo)
    for _ in range(60):
        mid = 0.5 * (lo + hi)
        m = ok(mid)
        hi = np.where(m, mid, hi)
        lo = np.where(m, lo, mid)
    out = np.where(done0, 0.0, hi)
    return np.where(good, out, np.inf)


def iso_probe(sp1, sp2, probes=None):
    """Numeric probe of the isomorphism condition in log space."""
    y = _log_probes((sp1.omega, sp1.eta, sp2.omega, sp2.eta), probes)

    def lq(sp):
        return lambda yy: np.asarray(wm.log_product_inverse(sp.omega, sp.eta, yy))

    need = _needed_log_L(lq(sp1), lq(sp2), y)
    half = y.size // 2
    finite = np.all(np.isfinite(need[half:]))
    if finite:
        slope = float(np.polyfit(np.log(y[half:]), need[half:], 1)[0])
    else:
        slope = math.inf
    tail_max = float(np.max(need[half:])) if finite else math.inf
    holds = finite and tail_max <= L_MAX_LOG and slope <= _slope_limit(y)
    return holds, {"L": math.exp(tail_max) if finite else None, "log_s0": float(y[half]),
                   "log_L_slope": slope}


def decide_isomorphic(sp1: SpaceDescriptor, sp2: SpaceDescriptor, probes=None,
                      method: str = "auto") -> ClassificationVerdict:
    if sp1.case != sp2.case:
        return ClassificationVerdict("inconclusive", "closed_form",
                                     {"equal": False, "reason": "spaces are in different cases"})
    gates = [_gate(w, sp.case) for sp in (sp1, sp2) for w in (sp.omega, sp.eta)]
    if not all(gates):
        return ClassificationVerdict(
            "inconclusive", "closed_form",
            {"equal": False,
             "reason": "Gabor accessibility not established: weights must be "
                       + ("o(t^2)" if sp1.case == "beurling" else "O(t^2)")})
    if method != "numeric":
        v = _iso_closed_form(sp1, sp2)
        if v is not None:
            return v
        if method == "closed_form":
            raise ValidationError("closed form needs four PowerLog weights")
    holds, wit = iso_probe(sp1, sp2, probes)
    eq = decide_inclusion(sp1, sp2, probes, method="numeric").relation == "equal"
    wit["equal"] = bool(eq and holds)
    return ClassificationVerdict("isomorphic" if holds else "not_isomorphic", "numeric_probe",
                                 wit, _probe_range((sp1.omega, sp1.eta, sp2.omega, sp2.eta), probes))


def _table_probes(w, reach, probes):
    """Probe points t for a numeric check needing omega up to reach(t)."""
    if probes is not None:
        return np.asarray(probes, dtype=float)
    hi = 1e6
    if isinstance(w, wm.Tabulated):
        # stay on the table: beyond the last knot the weight is linear by fiat
        hi = reach(w.knots[-1][0])
        if hi <= 100.0:
            raise ValidationError("tabulated weight too short for an asymptotic check")
    return np.geomspace(10.0, hi, 60)


def check_collapse(w: wm.WeightFunction, probes=None) -> bool:
    """omega(t^2) = O(omega(t))?"""
    if isinstance(w, wm.Log):
        return True
    if isinstance(w, wm.PowerLog):
        return False
    t = _table_probes(w, math.sqrt, probes)
    ratio = np.asarray(w(t ** 2)) / np.maximum(np.asarray(w(t)), 1e-300)
    for L in (2.0 ** j for j in range(11)):
        if np.all(ratio <= L):
            bounded, _ = _trend_bounded(np.log(ratio), np.log(t))
            return bounded
    return False


def check_liminf_growth(w: wm.WeightFunction, probes=None) -> bool:
    """liminf omega(H t) / omega(t) > 1 for some H in {2, 4, 8}?"""
    if isinstance(w, wm.PowerLog):
        return True
    if isinstance(w, wm.Log):
        return False
    t = _table_probes(w, lambda x: x / 8.0, probes)
    base = np.maximum(np.asarray(w(t)), 1e-300)
    half = t.size // 2
    lly = np.log(np.log(t[half:]))
    for H in (2.0, 4.0, 8.0):
        excess = np.asarray(w(H * t))[half:] / base[half:] - 1.0
        if excess.min() <= 0:
            continue
        # power-like weights keep a constant excess; log-like ones lose it
        # like 1 / log t, i.e. slope -1 against log log t
        slope = np.polyfit(lly, np.log(excess), 1)[0]
        if slope > -0.5:
            return True
    return False
