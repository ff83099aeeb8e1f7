"""Exponent sequences: lazy terms, counting functions and the sharp product.

A sequence is non-decreasing and non-negative. Four sources are supported:

* ``FromWeight(w)``: alpha_n = w(n)
* ``FromWeightPair(w, h)``: alpha_n = (w^{-1} h^{-1})^{-1}(n)
* ``Explicit(terms)``: a finite prefix; anything beyond it is unknown
* ``SharpProduct(left, right)``: non-decreasing rearrangement of all sums
  left_k + right_n, produced lazily by a heap merge

Indices start at 0. Counting functions nu(s) = #{n : alpha_n <= s} are exact
integers where that is affordable; ``count_bounds`` gives a guaranteed
bracket for counts far beyond the materialization cap.
"""
from __future__ import annotations

import heapq
import math
import threading
from dataclasses import dataclass, field

import numpy as np

from . import weights as wmod
from .errors import PrefixExhaustedError, ResourceCapError, ValidationError

TERM_CAP = 10**8          # hard cap on materialized / summed terms
EXACT_LIMIT = 2**53        # beyond this, float-derived counts are not exact
_CHUNK = 2**22
_BLOCKS = 2**16
L_LADDER = tuple(2.0**j for j in range(11))
L_LADDER_SMALL = tuple(2.0**-j for j in range(11))


class ExponentSequence:
    kind = "abstract"

    # subclasses fill these in
    def term(self, n: int) -> float:
        raise NotImplementedError

    def term_array(self, idx) -> np.ndarray:
        return np.array([self.term(int(i)) for i in np.asarray(idx).ravel()])

    def prefix(self, n: int) -> np.ndarray:
        return self.term_array(np.arange(n))

    def counting(self, s: float) -> int:
        raise NotImplementedError

    def count_array(self, s) -> np.ndarray:
        """Approximate (float) counts for an array of levels."""
        s = np.asarray(s, dtype=float)
        return np.array([float(self.counting(float(v))) for v in s.ravel()]).reshape(s.shape)

    def count_bounds(self, s: float):
        c = self.counting(s)
        return c, c

    @property
    def length(self):
        """Number of known terms, or None for an infinite sequence."""
        return None

    def to_dict(self) -> dict:
        raise NotImplementedError

    def __repr__(self):
        return f"{type(self).__name__}({self.to_dict()})"


def _check_level(s):
    s = float(s)
    if not s >= 0 or not math.isfinite(s):
        raise ValidationError(f"counting level must be finite and >= 0, got {s}")
    return s


class FromWeight(ExponentSequence):
    """alpha(w)_n = w(n)."""

    kind = "fromweight"

    def __init__(self, w: wmod.WeightFunction):
        self.w = w

    def term(self, n):
        if n < 0:
            raise ValidationError("index must be >= 0")
        return float(self.w._eval(np.asarray(float(n))))

    def term_array(self, idx):
        return self.w._eval(np.asarray(idx, dtype=float))

    def count_array(self, s):
        s = np.asarray(s, dtype=float)
        out = np.zeros(s.shape)
        ok = s >= self.w.value_at_zero
        if not ok.any():
            return out
        sv = s[ok]
        with np.errstate(over="ignore", invalid="ignore"):
            n = np.floor(self.w._inverse(sv))
        small = n < EXACT_LIMIT / 4
        # the inverse is a float; fix the boundary against the forward map
        for _ in range(4):
            up = small & (self.w._eval(n + 1) <= sv)
            down = small & (n >= 0) & (self.w._eval(np.maximum(n, 0)) > sv)
            if not (up.any() or down.any()):
                break
            n = n + up - down
        out[ok] = n + 1
        return out

    def counting(self, s):
        s = _check_level(s)
        c = float(self.count_array(np.array([s]))[0])
        if c > EXACT_LIMIT:
            raise ResourceCapError(f"count {c:.3e} at s={s} exceeds exact integer range")
        return int(c)

    def count_bounds(self, s):
        s = _check_level(s)
        c = float(self.count_array(np.array([s]))[0])
        if c <= EXACT_LIMIT / 4:
            return int(c), int(c)
        return c * (1 - 1e-12) - 1, c * (1 + 1e-12) + 1

    def to_dict(self):
        return self.w.to_dict()


class FromWeightPair(ExponentSequence):
    """alpha(w, h)_n = (w^{-1} h^{-1})^{-1}(n)."""

    kind = "pair"

    def __init__(self, w: wmod.WeightFunction, h: wmod.WeightFunction):
        self.w, self.h = w, h

    def term(self, n):
        if n < 0:
            raise ValidationError("index must be >= 0")
        return float(wmod.inverse_product_inverse(self.w, self.h, float(n)))

    def term_array(self, idx):
        return np.asarray(wmod.inverse_product_inverse(self.w, self.h,
                                                       np.asarray(idx, dtype=float)))

    def _q(self, s):
        with np.errstate(over="ignore"):
            return wmod._product_of_inverses(self.w, self.h, s)

    def count_array(self, s):
        s = np.asarray(s, dtype=float)
        n = np.floor(self._q(np.maximum(s, 0.0)))
        n[s < 0] = -1
        small = (n < EXACT_LIMIT / 4) & (s >= 0)
        if small.any():
            idx = np.flatnonzero(small)
            ns, ss = n[idx], s[idx]
            for _ in range(4):
                up = self.term_array(ns + 1) <= ss
                down = (ns >= 0) & (self.term_array(np.maximum(ns, 0)) > ss)
                if not (up.any() or down.any()):
                    break
                ns = ns + up - down
            n[idx] = ns
        return n + 1

    def counting(self, s):
        s = _check_level(s)
        c = float(self.count_array(np.array([s]))[0])
        if c > EXACT_LIMIT:
            raise ResourceCapError(f"count {c:.3e} at s={s} exceeds exact integer range")
        return int(c)

    def count_bounds(self, s):
        s = _check_level(s)
        c = float(self.count_array(np.array([s]))[0])
        if c <= EXACT_LIMIT / 4:
            return int(c), int(c)
        return c * (1 - 1e-12) - 1, c * (1 + 1e-12) + 1

    def to_dict(self):
        return {"kind": "pair", "omega": self.w.to_dict(), "eta": self.h.to_dict()}


class Explicit(ExponentSequence):
    """A finite non-decreasing prefix. Counting at or above the last term is
    refused because the continuation is unknown."""

    kind = "explicit"

    def __init__(self, terms):
        arr = np.asarray(terms, dtype=float).ravel()
        if arr.size == 0:
            raise ValidationError("explicit sequence needs at least one term")
        if np.any(~np.isfinite(arr)) or arr[0] < 0 or np.any(np.diff(arr) < 0):
            raise ValidationError("terms must be finite, non-negative and non-decreasing")
        arr.setflags(write=False)
        self.terms = arr

    @property
    def length(self):
        return self.terms.size

    def term(self, n):
        if n < 0:
            raise ValidationError("index must be >= 0")
        if n >= self.terms.size:
            raise PrefixExhaustedError(f"explicit sequence has only {self.terms.size} terms")
        return float(self.terms[n])

    def term_array(self, idx):
        idx = np.asarray(idx)
        if idx.size and idx.max() >= self.terms.size:
            raise PrefixExhaustedError(f"explicit sequence has only {self.terms.size} terms")
        return self.terms[idx]

    def count_array(self, s):
        s = np.asarray(s, dtype=float)
        if np.any(s >= self.terms[-1]):
            raise PrefixExhaustedError(
                f"level reaches the last known term {self.terms[-1]}; count undetermined")
        return np.searchsorted(self.terms, s, side="right").astype(float)

    def counting(self, s):
        s = _check_level(s)
        return int(self.count_array(np.array([s]))[0])

    def to_dict(self):
        return {"kind": "explicit", "terms": self.terms.tolist()}


class SharpProduct(ExponentSequence):
    """Non-decreasing rearrangement of {left_k + right_n}.

    Terms are produced by a heap merge over the rows k (each row is
    left_k + right_n, non-decreasing in n). Popping (k, n) pushes (k, n+1),
    and row k+1 is opened when its first entry (k, 0) is popped, so the
    heap never holds more than one entry per opened row. Ties are popped in
    (value, k, n) order.

    With a finite child the rearrangement is only determined up to the
    smallest sum involving an unknown term; beyond that ``term`` raises
    PrefixExhaustedError.
    """

    kind = "sharp"

    def __init__(self, left: ExponentSequence, right: ExponentSequence):
        self.left, self.right = left, right
        self._values: list[float] = []
        self._heap = [(left.term(0) + right.term(0), 0, 0)]
        self._frontier = self.determined_below()
        self._lcache: list[float] = []
        self._rcache: list[float] = []
        self._lock = threading.Lock()
        self._count_cache: dict = {}

    def _side(self, seq, cache, i):
        while len(cache) <= i:
            start = len(cache)
            stop = max(2 * start, start + 64)
            if seq.length is not None:
                stop = min(stop, seq.length)
                if start >= stop:
                    return None
            cache.extend(seq.term_array(np.arange(start, stop)).tolist())
        return cache[i]

    def _extend(self, n_total):
        heap, values = self._heap, self._values
        if n_total > TERM_CAP:
            raise ResourceCapError(f"sharp product prefix beyond {TERM_CAP} terms")
        lc, rc = self._lcache, self._rcache
        while len(values) < n_total:
            if not heap:
                raise PrefixExhaustedError("all known pairwise sums consumed")
            v, k, n = heap[0]
            if v > self._frontier:
                raise PrefixExhaustedError(
                    f"term {len(values)} lies beyond the determined range "
                    f"(<= {self._frontier}) of the finite inputs")
            heapq.heappop(heap)
            values.append(v)
            lk = lc[k] if k < len(lc) else self._side(self.left, lc, k)
            r = rc[n + 1] if n + 1 < len(rc) else self._side(self.right, rc, n + 1)
            if r is not None:
                heapq.heappush(heap, (lk + r, k, n + 1))
            if n == 0:
                l2 = lc[k + 1] if k + 1 < len(lc) else self._side(self.left, lc, k + 1)
                if l2 is not None:
                    heapq.heappush(heap, (l2 + rc[0], k + 1, 0))

    def prefix(self, n):
        with self._lock:
            if len(self._values) < n:
                self._extend(n)
            return np.array(self._values[:n])

    def term(self, n):
        if n < 0:
            raise ValidationError("index must be >= 0")
        with self._lock:
            if len(self._values) <= n:
                self._extend(n + 1)
            return self._values[n]

    def term_array(self, idx):
        idx = np.asarray(idx, dtype=np.int64)
        if idx.size == 0:
            return np.zeros(0)
        return self.prefix(int(idx.max()) + 1)[idx]

    @property
    def length(self):
        return None

    def determined_below(self) -> float:
        """Every value strictly below this level is fully determined by the inputs."""
        lo = math.inf
        if self.left.length is not None:
            lo = min(lo, self.left.term(self.left.length - 1) + self.right.term(0))
        if self.right.length is not None:
            lo = min(lo, self.left.term(0) + self.right.term(self.right.length - 1))
        return lo

    # nu_{a#b}(s) = sum over the cheaper side of nu_other(s - side_k)
    def _plan(self, s):
        if s >= self.determined_below():
            raise PrefixExhaustedError(
                f"level {s} reaches the undetermined range of the finite inputs")
        # number of summands on each side: terms that leave room for the
        # other side's smallest term
        na = float(self.left.count_array(np.array([s - self.right.term(0)]))[0])
        nb = float(self.right.count_array(np.array([s - self.left.term(0)]))[0])
        if na <= nb:
            return self.left, self.right, na
        return self.right, self.left, nb

    @staticmethod
    def _fix_counts(other, sk, s, vals):
        """s - sk is not bit-identical to the summand that produced a term, so
        settle the boundary with the forward sum sk + other_n <= s."""
        if isinstance(other, SharpProduct):
            return vals
        c = vals.astype(np.int64)
        cap = other.length
        nxt = c if cap is None else np.minimum(c, cap - 1)
        up = (c == nxt) & (sk + other.term_array(nxt) <= s)
        down = (c > 0) & (sk + other.term_array(np.maximum(c - 1, 0)) > s)
        return (c + up - down).astype(float)

    def counting(self, s):
        s = _check_level(s)
        if s in self._count_cache:
            lo, hi = self._count_cache[s]
            if lo == hi:
                return int(lo)
        side, other, n_side = self._plan(s)
        if n_side > TERM_CAP:
            raise ResourceCapError(
                f"exact count at s={s} would sum {n_side:.3e} terms (cap {TERM_CAP})")
        total = 0
        n_side = int(n_side)
        for start in range(0, n_side, _CHUNK):
            stop = min(n_side, start + _CHUNK)
            sk = side.term_array(np.arange(start, stop))
            vals = self._fix_counts(other, sk, s, other.count_array(s - sk))
            if total + float(vals.sum()) > EXACT_LIMIT:
                raise ResourceCapError(f"count at s={s} exceeds exact integer range")
            total += int(vals.astype(np.int64).sum())
        self._count_cache[s] = (total, total)
        return total

    def count_bounds(self, s):
        s = _check_level(s)
        if s in self._count_cache:
            return self._count_cache[s]
        side, other, n_side = self._plan(s)
        if n_side <= _BLOCKS * 8:
            c = self.counting(s)
            return c, c
        if side.length is None and isinstance(side, SharpProduct):
            raise ResourceCapError("nested sharp products cannot be block-bounded")
        # side terms are non-decreasing, so within a block [k0, k1) the summand
        # nu_other(s - side_k) is non-increasing: bound it by its end values
        edges = np.unique(np.floor(np.linspace(0, n_side, _BLOCKS + 1)))
        k0, k1 = edges[:-1], edges[1:]
        size = k1 - k0
        first = side.term_array(k0)
        last = side.term_array(k1 - 1)
        hi = float(np.sum(size * other.count_array(s - first)))
        lo = float(np.sum(size * other.count_array(np.maximum(s - last, 0.0))
                          * (s - last >= 0)))
        # float rounding in the inverses and in the sums
        out = (lo * (1 - 1e-12) - 1, hi * (1 + 1e-12) + 1)
        self._count_cache[s] = out
        return out

    def count_array(self, s):
        s = np.asarray(s, dtype=float)
        out = np.empty(s.shape)
        for i, v in np.ndenumerate(s):
            lo, hi = self.count_bounds(float(v))
            out[i] = 0.5 * (lo + hi)
        return out

    def to_dict(self):
        return {"kind": "sharp", "left": self.left.to_dict(), "right": self.right.to_dict()}


def sharp(a: ExponentSequence, b: ExponentSequence) -> SharpProduct:
    return SharpProduct(a, b)


def term(a: ExponentSequence, n: int) -> float:
    return a.term(n)


def counting(a: ExponentSequence, s: float) -> int:
    return a.counting(s)


def sequence_from_dict(d: dict) -> ExponentSequence:
    if not isinstance(d, dict) or "kind" not in d:
        raise ValidationError(f"malformed sequence descriptor {d!r}")
    kind = str(d["kind"]).lower()
    if kind == "explicit":
        return Explicit(d["terms"])
    if kind == "sharp":
        return SharpProduct(sequence_from_dict(d["left"]), sequence_from_dict(d["right"]))
    if kind == "pair":
        return FromWeightPair(wmod.weight_from_dict(d["omega"]), wmod.weight_from_dict(d["eta"]))
    if kind == "id":
        return FromWeight(wmod.PowerLog(1.0, 0.0))
    return FromWeight(wmod.weight_from_dict(d))


# --------------------------------------------------------------------------
# finite-range certificates


@dataclass(frozen=True)
class DominationReport:
    holds: bool
    witness_L: float | None
    mode: str
    probe_range: tuple
    certificate: str = "finite_probe_range"

    def to_dict(self):
        return {"holds": self.holds, "witness_L": self.witness_L, "mode": self.mode,
                "probe_range": list(self.probe_range), "certificate": self.certificate}


@dataclass(frozen=True)
class StabilityReport:
    holds: bool
    witness_L: float | None
    probe_range: tuple
    certificate: str = "finite_probe_range"

    def to_dict(self):
        return {"holds": self.holds, "witness_L": self.witness_L,
                "probe_range": list(self.probe_range), "certificate": self.certificate}


@dataclass(frozen=True)
class EquivalenceReport:
    holds: bool
    L: float | None
    forward: DominationReport = field(repr=False)
    backward: DominationReport = field(repr=False)
    probe_range: tuple = ()
    certificate: str = "finite_probe_range"

    def to_dict(self):
        return {"holds": self.holds, "L": self.L, "probe_range": list(self.probe_range),
                "forward": self.forward.to_dict(), "backward": self.backward.to_dict(),
                "certificate": self.certificate}


def _probes(probes):
    p = np.asarray(probes, dtype=float).ravel()
    if p.size == 0:
        raise ValidationError("probes must be non-empty")
    if np.any(np.diff(p) <= 0) or p[0] < 0:
        raise ValidationError("probes must be non-negative and strictly increasing")
    return p


def _le(small: ExponentSequence, s1: float, big: ExponentSequence, s2: float,
        factor: int = 1):
    """Certified factor * nu_small(s1) <= nu_big(s2); None if undecidable."""
    try:
        _, hi = small.count_bounds(s1)
        lo, _ = big.count_bounds(s2)
    except ResourceCapError:
        return None
    return factor * hi <= lo


def _holds_all(small, big, p, L, factor=1):
    for s in p:
        if not _le(small, s, big, L * s, factor):
            return False
    return True


def _holds_tail(small, big, p, L):
    """Length of the longest probe tail on which the inequality holds."""
    tail = 0
    for s in p[::-1]:
        if not _le(small, s, big, L * s):
            break
        tail += 1
    return tail


def dominates(a: ExponentSequence, b: ExponentSequence, mode: str = "bigO",
              probes=None) -> DominationReport:
    """Certificate that a = O(b) (or o(b)) through nu_b(s) <= nu_a(L s)."""
    p = _probes(probes)
    rng = (float(p[0]), float(p[-1]))
    if mode == "bigO":
        for L in L_LADDER:
            if _holds_all(b, a, p, L):
                return DominationReport(True, L, mode, rng)
        return DominationReport(False, None, mode, rng)
    if mode == "littleO":
        need = max(1, p.size // 4)
        for L in L_LADDER_SMALL:
            if _holds_tail(b, a, p, L) < need:
                return DominationReport(False, None, mode, rng)
        return DominationReport(True, L_LADDER_SMALL[-1], mode, rng)
    raise ValidationError(f"mode must be bigO or littleO, got {mode!r}")


def equivalent(a: ExponentSequence, b: ExponentSequence, probes) -> EquivalenceReport:
    fwd = dominates(a, b, "bigO", probes)
    bwd = dominates(b, a, "bigO", probes)
    ok = fwd.holds and bwd.holds
    L = max(fwd.witness_L, bwd.witness_L) if ok else None
    return EquivalenceReport(ok, L, fwd, bwd, fwd.probe_range)


def is_stable(a: ExponentSequence, probes) -> StabilityReport:
    """2 nu(s) <= nu(L s) on all probes for some L in the ladder."""
    p = _probes(probes)
    rng = (float(p[0]), float(p[-1]))
    for L in L_LADDER:
        try:
            if _holds_all(a, a, p, L, factor=2):
                return StabilityReport(True, L, rng)
        except PrefixExhaustedError:
            break
    return StabilityReport(False, None, rng)


def check_fundamental(a: ExponentSequence, b: ExponentSequence, probes) -> bool:
    """nu_a(s/2) nu_b(s/2) <= nu_{a#b}(s) <= nu_a(s) nu_b(s), as exact integers."""
    p = _probes(probes)
    ab = SharpProduct(a, b)
    for s in p:
        lower = a.counting(s / 2) * b.counting(s / 2)
        upper = a.counting(s) * b.counting(s)
        mid = ab.counting(s)
        if not lower <= mid <= upper:
            return False
    return True


def check_explicit_lemma(w: wmod.WeightFunction, h: wmod.WeightFunction,
                         probes) -> EquivalenceReport:
    """alpha(w) # alpha(h) against alpha(w, h), both directions."""
    return equivalent(SharpProduct(FromWeight(w), FromWeight(h)), FromWeightPair(w, h), probes)


def nuclearity_rate(a: ExponentSequence, n_terms: int = 2000):
    """Smallest r on a dyadic ladder with log n <= r alpha_n for 1 <= n < n_terms,
    or None. A finite-prefix probe for the nuclearity condition."""
    n = np.arange(1, n_terms)
    vals = a.term_array(n)
    logs = np.log(n)
    for r in (2.0**j for j in range(-10, 11)):
        if np.all(logs <= r * vals):
            return r
    return None


def check_sharp_properties(a: ExponentSequence, b: ExponentSequence, probes,
                           n_terms: int = 2000) -> dict:
    """Stability and nuclearity are inherited by the sharp product (probe range)."""
    ab = SharpProduct(a, b)
    out = {}
    sa, sb, sab = is_stable(a, probes), is_stable(b, probes), is_stable(ab, probes)
    out["stable"] = {"left": sa.holds, "right": sb.holds, "product": sab.holds,
                     "consistent": not (sa.holds or sb.holds) or sab.holds}
    na, nb, nab = (nuclearity_rate(x, n_terms) for x in (a, b, ab))
    out["nuclear"] = {"left": na, "right": nb, "product": nab,
                      "consistent": not (na is not None and nb is not None) or nab is not None}
    return out
