"""Weight functions on [0, inf): evaluation, generalized inverses, growth conditions.

Three kinds are supported:

* ``PowerLog(mu, u)``: t**(1/mu) * log(1+t)**u
* ``Log(u)``: log(1+t)**u, u >= 1
* ``Tabulated(knots, slope)``: piecewise linear through the knots, linear
  extrapolation with ``slope`` beyond the last knot.

Everything here is vectorized over numpy arrays; scalar inputs give scalar
outputs.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import trapezoid
from scipy.optimize import brentq

from .errors import ValidationError

_Y_FLOOR = -740.0  # log(t) below which e**y underflows
_BISECT_YTOL = 1e-13


def _as_array(x):
    arr = np.asarray(x, dtype=float)
    return arr, arr.ndim == 0


def _ret(arr, scalar):
    return float(arr) if scalar else arr


def _bisect_log(fun, target, y_lo, y_hi=None):
    """Smallest y with fun(y) >= target, for fun non-decreasing.

    Works elementwise on arrays. The bracket is expanded upwards until it
    holds the root; the result is the upper end of the final bracket.
    """
    target = np.asarray(target, dtype=float)
    lo = np.full(target.shape, float(y_lo))
    hi = np.full(target.shape, 1.0 if y_hi is None else float(y_hi))
    hi = np.maximum(hi, lo + 1.0)
    step = np.ones(target.shape)
    for _ in range(64):
        short = fun(hi) < target
        if not short.any():
            break
        lo[short] = hi[short]
        hi[short] = hi[short] + step[short]
        step[short] *= 2.0
    else:
        raise ValidationError("inverse bracket expansion failed; value out of range")
    for _ in range(200):
        if np.all(hi - lo <= _BISECT_YTOL * np.maximum(1.0, np.abs(hi))):
            break
        mid = 0.5 * (lo + hi)
        up = fun(mid) >= target
        hi = np.where(up, mid, hi)
        lo = np.where(up, lo, mid)
    return hi


class WeightFunction:
    """Common interface. Subclasses are frozen dataclasses."""

    kind = "abstract"

    def __call__(self, t):
        arr, scalar = _as_array(t)
        if np.any(arr < 0) or not np.all(np.isfinite(arr)):
            raise ValidationError("weight functions are defined for finite t >= 0")
        return _ret(self._eval(arr), scalar)

    @property
    def value_at_zero(self) -> float:
        return float(self._eval(np.zeros(())))

    def _eval(self, t):
        raise NotImplementedError

    def _log_eval(self, y):
        """log(omega(exp(y))); only used inside inverse searches."""
        with np.errstate(divide="ignore"):
            return np.log(self._eval(np.exp(y)))

    def _inverse(self, s):
        """inf{t >= 0 : omega(t) >= s}; 0 whenever s <= omega(0)."""
        s = np.asarray(s, dtype=float)
        out = np.zeros(s.shape)
        above = s > self.value_at_zero
        if above.any():
            with np.errstate(divide="ignore"):
                y = _bisect_log(self._log_eval, np.log(s[above]), self._y_floor())
            out[above] = np.exp(y)
        return out

    def _y_floor(self):
        return _Y_FLOOR

    def log_inverse(self, log_s):
        """log(omega^{-1}(exp(log_s))) without forming exp(log_s) when it would overflow."""
        log_s, scalar = _as_array(log_s)
        out = np.full(log_s.shape, -np.inf)
        z = self.value_at_zero
        above = log_s > (math.log(z) if z > 0 else -np.inf)
        if above.any():
            out[above] = _bisect_log(self._log_eval, log_s[above], self._y_floor())
        return _ret(out, scalar)

    def inverse(self, s):
        arr, scalar = _as_array(s)
        if np.any(arr < self.value_at_zero) or np.any(np.isnan(arr)):
            raise ValidationError(
                f"inverse needs s >= omega(0) = {self.value_at_zero!r}")
        return _ret(self._inverse(arr), scalar)

    def to_dict(self) -> dict:
        raise NotImplementedError


@dataclass(frozen=True)
class PowerLog(WeightFunction):
    """omega_{mu,u}(t) = t**(1/mu) * log(1+t)**u.

    For u < 0 the raw expression can decrease near 0; values below the
    monotonicity threshold ``t_min`` are clamped to omega(t_min).
    """

    mu: float
    u: float = 0.0
    t_min: float = field(init=False, repr=False, compare=False)
    kind = "powerlog"

    def __post_init__(self):
        if not (self.mu > 0 and math.isfinite(self.mu)) or not math.isfinite(self.u):
            raise ValidationError(f"PowerLog needs mu > 0 and finite u, got {self.mu}, {self.u}")
        object.__setattr__(self, "t_min", self._monotone_threshold())

    @property
    def p(self) -> float:
        return 1.0 / self.mu

    def _monotone_threshold(self) -> float:
        p, u = self.p, self.u
        if u >= 0 or p + u >= 0:
            return 0.0
        # derivative sign is that of g(t) = p log(1+t) + u t/(1+t);
        # g falls until t = -u/p - 1 and then rises without bound
        g = lambda t: p * math.log1p(t) + u * t / (1.0 + t)
        lo = -u / p - 1.0
        hi = 2.0 * lo + 1.0
        while g(hi) <= 0:
            hi *= 2.0
        return brentq(g, lo, hi, xtol=1e-15, rtol=4 * np.finfo(float).eps)

    def _raw(self, t):
        p, u = self.p, self.u
        if u == 0:
            if p == 1.0:
                return t.astype(float, copy=True)
            if p == 0.5:
                return np.sqrt(t)
            return np.power(t, p)
        with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
            out = np.power(t, p) * np.power(np.log1p(t), u)
        zero = t == 0
        if np.any(zero):
            out = np.where(zero, 1.0 if p + u == 0 else 0.0, out)
        return out

    def _eval(self, t):
        t = np.asarray(t, dtype=float)
        if self.t_min > 0:
            t = np.maximum(t, self.t_min)
        return self._raw(t)

    def _log_eval(self, y):
        y = np.asarray(y, dtype=float)
        if self.t_min > 0:
            y = np.maximum(y, math.log(self.t_min))
        if self.u == 0:
            return self.p * y
        with np.errstate(divide="ignore"):
            return self.p * y + self.u * np.log(np.logaddexp(0.0, y))

    def _y_floor(self):
        return math.log(self.t_min) if self.t_min > 0 else _Y_FLOOR

    def _inverse(self, s):
        s = np.asarray(s, dtype=float)
        if self.u == 0:
            return np.power(np.maximum(s, 0.0), self.mu)
        return super()._inverse(s)

    def log_inverse(self, log_s):
        if self.u == 0:
            arr, scalar = _as_array(log_s)
            return _ret(self.mu * arr, scalar)
        return super().log_inverse(log_s)

    def to_dict(self):
        return {"kind": "powerlog", "mu": float(self.mu), "u": float(self.u)}


@dataclass(frozen=True)
class Log(WeightFunction):
    """omega_u(t) = log(1+t)**u with u >= 1."""

    u: float = 1.0
    kind = "log"

    def __post_init__(self):
        if not (self.u >= 1 and math.isfinite(self.u)):
            raise ValidationError(f"Log weight needs u >= 1, got {self.u}")

    def _eval(self, t):
        return np.power(np.log1p(np.asarray(t, dtype=float)), self.u)

    def _inverse(self, s):
        s = np.maximum(np.asarray(s, dtype=float), 0.0)
        return np.expm1(np.power(s, 1.0 / self.u))

    def log_inverse(self, log_s):
        arr, scalar = _as_array(log_s)
        z = np.exp(arr / self.u)
        with np.errstate(divide="ignore", over="ignore"):
            out = np.where(z > 30.0, z + np.log1p(-np.exp(-np.minimum(z, 700.0))),
                           np.log(np.expm1(np.minimum(z, 30.0))))
        return _ret(out, scalar)

    def to_dict(self):
        return {"kind": "log", "u": float(self.u)}


@dataclass(frozen=True, eq=False)
class Tabulated(WeightFunction):
    """Piecewise-linear weight through ``knots`` = [(t, omega(t)), ...]."""

    knots: tuple
    slope: float | None = None
    kind = "tabulated"

    def __post_init__(self):
        arr = np.asarray(self.knots, dtype=float)
        if arr.ndim != 2 or arr.shape[1] != 2 or arr.shape[0] < 2:
            raise ValidationError("tabulated weight needs at least two (t, w) knots")
        t, w = arr[:, 0], arr[:, 1]
        if t[0] < 0 or np.any(np.diff(t) <= 0):
            raise ValidationError("knot abscissae must be >= 0 and strictly increasing")
        if w[0] < 0 or np.any(np.diff(w) < 0):
            raise ValidationError("knot values must be >= 0 and non-decreasing")
        slope = self.slope
        if slope is None:
            slope = (w[-1] - w[-2]) / (t[-1] - t[-2])
        if not slope > 0:
            raise ValidationError("extrapolation slope must be positive so that omega -> inf")
        object.__setattr__(self, "knots", tuple(map(tuple, arr.tolist())))
        object.__setattr__(self, "slope", float(slope))
        object.__setattr__(self, "_t", t)
        object.__setattr__(self, "_w", w)

    def __eq__(self, other):
        return (isinstance(other, Tabulated) and self.knots == other.knots
                and self.slope == other.slope)

    def __hash__(self):
        return hash((self.knots, self.slope))

    def _eval(self, t):
        t = np.asarray(t, dtype=float)
        out = np.interp(t, self._t, self._w)
        beyond = t > self._t[-1]
        if np.any(beyond):
            out = np.where(beyond, self._w[-1] + self.slope * (t - self._t[-1]), out)
        return out

    def _inverse(self, s):
        s = np.asarray(s, dtype=float)
        t, w = self._t, self._w
        out = np.zeros(s.shape)
        beyond = s > w[-1]
        out[beyond] = t[-1] + (s[beyond] - w[-1]) / self.slope
        inside = (s > w[0]) & ~beyond
        if inside.any():
            si = s[inside]
            i = np.searchsorted(w, si, side="left")
            out[inside] = t[i - 1] + (si - w[i - 1]) * (t[i] - t[i - 1]) / (w[i] - w[i - 1])
        return out

    def log_inverse(self, log_s):
        arr, scalar = _as_array(log_s)
        with np.errstate(divide="ignore", over="ignore"):
            out = np.log(self._inverse(np.exp(arr)))
        return _ret(out, scalar)

    def to_dict(self):
        d = {"kind": "tabulated", "knots": [list(k) for k in self.knots]}
        d["slope"] = self.slope
        return d


def weight_from_dict(d: dict) -> WeightFunction:
    try:
        kind = d["kind"].lower()
        if kind == "powerlog":
            return PowerLog(float(d["mu"]), float(d.get("u", 0.0)))
        if kind == "log":
            return Log(float(d.get("u", 1.0)))
        if kind == "tabulated":
            return Tabulated(tuple(map(tuple, d["knots"])), d.get("slope"))
    except (KeyError, TypeError, AttributeError) as exc:
        raise ValidationError(f"malformed weight descriptor {d!r}") from exc
    raise ValidationError(f"unknown weight kind {d.get('kind')!r}")


def evaluate(w: WeightFunction, t):
    return w(t)


def inverse(w: WeightFunction, s):
    """Generalized inverse inf{t : omega(t) >= s}."""
    return w.inverse(s)


def _product_of_inverses(w, h, s):
    return w._inverse(s) * h._inverse(s)


def inverse_product_inverse(w: WeightFunction, h: WeightFunction, s):
    """Generalized inverse of t -> omega^{-1}(t) * eta^{-1}(t).

    Returns 0 for s below the product at the left end of the common domain.
    """
    arr, scalar = _as_array(s)
    if isinstance(w, PowerLog) and isinstance(h, PowerLog) and w.u == 0 and h.u == 0:
        return _ret(np.power(np.maximum(arr, 0.0), 1.0 / (w.mu + h.mu)), scalar)
    t0 = max(w.value_at_zero, h.value_at_zero)
    q0 = float(_product_of_inverses(w, h, np.asarray(t0)))
    out = np.zeros(arr.shape)
    out[arr == q0] = t0
    above = arr > q0
    if above.any():
        def logq(y):
            return log_product_inverse(w, h, y)
        y_lo = math.log(t0) if t0 > 0 else _Y_FLOOR
        with np.errstate(divide="ignore"):
            out[above] = np.exp(_bisect_log(logq, np.log(arr[above]), y_lo))
    return _ret(out, scalar)


def log_product_inverse(w: WeightFunction, h: WeightFunction, log_s):
    """log(omega^{-1}(s) * eta^{-1}(s)) for s = exp(log_s)."""
    return w.log_inverse(log_s) + h.log_inverse(log_s)


# --------------------------------------------------------------------------
# growth conditions


@dataclass(frozen=True)
class ConditionReport:
    alpha_ok: bool
    alpha_constants: tuple | None
    gamma_ok: bool
    gamma_strict_ok: bool
    nonquasianalytic: bool
    evidence_range: tuple
    method: str = "closed_form"

    def __post_init__(self):
        if self.gamma_strict_ok and not self.gamma_ok:
            raise ValueError("{gamma} implies (gamma)")

    def to_dict(self):
        return {
            "alpha_ok": self.alpha_ok,
            "alpha_constants": list(self.alpha_constants) if self.alpha_constants else None,
            "gamma_ok": self.gamma_ok,
            "gamma_strict_ok": self.gamma_strict_ok,
            "nonquasianalytic": self.nonquasianalytic,
            "evidence_range": list(self.evidence_range),
            "method": self.method,
        }


def alpha_grid(t_hi: float) -> np.ndarray:
    """The 200 sample points per axis used for the (alpha) constant search."""
    half = 0.5 * t_hi
    pts = np.concatenate([np.linspace(0.0, half, 100), np.geomspace(1e-3, half, 100)])
    return np.unique(pts)


def _alpha_log_c(w, pts, K):
    t1 = pts[:, None]
    t2 = pts[None, :]
    excess = w._eval(t1 + t2) - K * (w._eval(t1) + w._eval(t2))
    return max(0.0, float(excess.max()))


def fit_alpha_constants(w: WeightFunction, t_hi: float, k_cap: float = 64.0):
    """Smallest K on a geometric ladder (ratio 2**(1/4)) with a fitted C such that
    omega(t1+t2) <= K(omega(t1)+omega(t2)) + log C on the sample grid.

    A candidate K is accepted only if the required log C does not grow when the
    range is doubled, so that bounded constants on the grid are evidence for
    the asymptotic condition. Returns (K, C) or None.
    """
    pts = alpha_grid(t_hi)
    half_pts = pts[pts <= 0.25 * t_hi]
    K = 1.0
    while K <= k_cap * (1 + 1e-12):
        full = _alpha_log_c(w, pts, K)
        half = _alpha_log_c(w, half_pts, K)
        if full <= half + 1e-9 * (1.0 + abs(half)) and full < 700.0:
            log_c = full * (1 + 1e-12) + 1e-12
            return (K, math.exp(log_c))
        K *= 2 ** 0.25
    return None


def _tabulated_gamma(w, t_hi):
    ts = np.geomspace(10.0, t_hi, 64)
    with np.errstate(divide="ignore"):
        r = np.log1p(ts) / w._eval(ts)
    if not np.all(np.isfinite(r)):
        return False, False
    lower, upper = r[:32], r[32:]
    gamma = bool(upper.max() <= lower.max() * (1 + 1e-9))
    strict = gamma and bool(r[-1] <= 0.9 * r[32])
    return gamma, strict


def _tabulated_nonquasianalytic(w, t_hi):
    def octave(lo, hi):
        ts = np.geomspace(lo, hi, 257)
        return trapezoid(w._eval(ts) / (1.0 + ts ** 2), ts)

    last = octave(t_hi / 2, t_hi)
    prev = octave(t_hi / 4, t_hi / 2)
    if prev <= 0:
        return True
    return bool(last / prev <= 0.95)


def check_conditions(w: WeightFunction, t_hi: float = 1e4) -> ConditionReport:
    if t_hi < 10:
        raise ValidationError("check_conditions needs t_hi >= 10")
    if isinstance(w, PowerLog):
        cap = max(64.0, 2.0 ** (math.ceil(w.p) + abs(w.u) + 4))
        return ConditionReport(
            alpha_ok=True,
            alpha_constants=fit_alpha_constants(w, t_hi, cap),
            gamma_ok=True,
            gamma_strict_ok=True,
            nonquasianalytic=w.mu > 1 or (w.mu == 1 and w.u < -1),
            evidence_range=(0.0, float(t_hi)),
        )
    if isinstance(w, Log):
        return ConditionReport(
            alpha_ok=True,
            alpha_constants=fit_alpha_constants(w, t_hi, 64.0),
            gamma_ok=True,
            gamma_strict_ok=w.u > 1,
            nonquasianalytic=True,
            evidence_range=(0.0, float(t_hi)),
        )
    consts = fit_alpha_constants(w, t_hi, 64.0)
    gamma, strict = _tabulated_gamma(w, t_hi)
    return ConditionReport(
        alpha_ok=consts is not None,
        alpha_constants=consts,
        gamma_ok=gamma,
        gamma_strict_ok=strict,
        nonquasianalytic=_tabulated_nonquasianalytic(w, t_hi),
        evidence_range=(0.0, float(t_hi)),
        method="heuristic",
    )


def growth_exponents(w: WeightFunction):
    """(power, log power) pair ordering PowerLog/Log weights by growth, or None."""
    if isinstance(w, PowerLog):
        return (w.p, w.u)
    if isinstance(w, Log):
        return (0.0, w.u)
    return None
