"""Coefficient sequences (a_n) and certified enclosures of their series sums.

A kernel is a finite prefix a_1..a_N plus an analytic tail model
``a_n = c * q**n / (n**alpha * (n+1)**beta)`` for n > N.  That family is rich
enough to hold every sequence this library ships with while still admitting
closed-form or bracketed tail sums, which is what the stability certificates
need: an interval that provably contains the true series value, or a proof of
divergence, never a bare floating-point estimate.
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "TailModel",
    "KernelSpec",
    "SumEnclosure",
    "KernelFormatError",
    "term",
    "terms",
    "series_sum",
    "tail_abs_sum",
    "power_series_value",
    "radius_of_convergence",
    "support_gcd",
    "kernel_from_dict",
    "kernel_to_dict",
    "load_kernel",
    "loads_kernel",
    "dumps_kernel",
    "kernel_id",
]

_EPS = 2.0 ** -52
# hard cap on explicitly summed tail terms before giving up with Unknown
_TERM_BUDGET = 6_000_000
_CHUNK = 65_536


class KernelFormatError(ValueError):
    """Raised when a kernel description violates the JSON schema."""


@dataclass(frozen=True)
class TailModel:
    """Tail law for indices past the prefix: zero, or c*q^n/(n^alpha*(n+1)^beta)."""

    kind: str  # "zero" | "parametric"
    c: float = 0.0
    q: float = 0.0
    alpha: float = 0.0
    beta: float = 0.0

    @staticmethod
    def zero() -> "TailModel":
        return TailModel("zero")

    @staticmethod
    def parametric(c: float, q: float, alpha: float = 0.0, beta: float = 0.0) -> "TailModel":
        for name, v in (("c", c), ("q", q), ("alpha", alpha), ("beta", beta)):
            if not math.isfinite(v):
                raise KernelFormatError(f"tail.{name} must be finite, got {v!r}")
        if alpha < 0:
            raise KernelFormatError(f"tail.alpha must be >= 0, got {alpha!r}")
        if beta < 0:
            raise KernelFormatError(f"tail.beta must be >= 0, got {beta!r}")
        if c == 0.0:
            return TailModel.zero()
        return TailModel("parametric", float(c), float(q), float(alpha), float(beta))

    @property
    def is_zero(self) -> bool:
        return self.kind == "zero"


@dataclass(frozen=True)
class KernelSpec:
    """The sequence (a_n): prefix[k-1] is a_k for k <= N, the tail rules n > N."""

    prefix: tuple[float, ...]
    tail: TailModel

    def __post_init__(self):
        for i, v in enumerate(self.prefix):
            if not math.isfinite(v):
                raise KernelFormatError(f"prefix[{i}] must be finite, got {v!r}")
        object.__setattr__(self, "prefix", tuple(float(v) for v in self.prefix))

    @property
    def prefix_len(self) -> int:
        return len(self.prefix)

    def term(self, n: int) -> float:
        return term(self, n)


@dataclass(frozen=True)
class SumEnclosure:
    """Certified interval [lo, hi] for a series value, or a divergence/unknown marker."""

    status: str  # "finite" | "divergent" | "unknown"
    lo: float = math.nan
    hi: float = math.nan

    @staticmethod
    def finite(lo: float, hi: float) -> "SumEnclosure":
        if not (lo <= hi):
            raise ValueError(f"invalid enclosure [{lo}, {hi}]")
        return SumEnclosure("finite", lo, hi)

    @staticmethod
    def divergent() -> "SumEnclosure":
        return SumEnclosure("divergent")

    @staticmethod
    def unknown() -> "SumEnclosure":
        return SumEnclosure("unknown")

    @property
    def is_finite(self) -> bool:
        return self.status == "finite"

    @property
    def is_divergent(self) -> bool:
        return self.status == "divergent"

    @property
    def width(self) -> float:
        return self.hi - self.lo

    def contains(self, value: float) -> bool:
        return self.is_finite and self.lo <= value <= self.hi

    def shift(self, offset: float) -> "SumEnclosure":
        """Translate a finite enclosure by an exactly-known offset (1 ulp padding)."""
        if not self.is_finite:
            return self
        lo = self.lo + offset
        hi = self.hi + offset
        if offset != 0.0:
            lo = np.nextafter(lo, -math.inf)
            hi = np.nextafter(hi, math.inf)
        return SumEnclosure.finite(float(lo), float(hi))


# ---------------------------------------------------------------------------
# term evaluation


def term(kernel: KernelSpec, n: int) -> float:
    """a_n, with the prefix authoritative for n <= N and the tail beyond."""
    if n < 1:
        raise ValueError(f"term index must be >= 1, got {n}")
    if n <= len(kernel.prefix):
        return kernel.prefix[n - 1]
    t = kernel.tail
    if t.is_zero:
        return 0.0
    return t.c * t.q ** n / (n ** t.alpha * (n + 1) ** t.beta)


def terms(kernel: KernelSpec, count: int) -> np.ndarray:
    """Vector of a_0..a_count with a_0 = 0 (index k holds a_k)."""
    out = np.zeros(count + 1)
    npre = min(len(kernel.prefix), count)
    if npre:
        out[1 : npre + 1] = kernel.prefix[:npre]
    t = kernel.tail
    if not t.is_zero and count > len(kernel.prefix):
        n = np.arange(len(kernel.prefix) + 1, count + 1, dtype=np.int64)
        with np.errstate(over="ignore"):
            vals = t.c * np.power(float(t.q), n)
            if t.alpha:
                vals /= np.power(n.astype(float), t.alpha)
            if t.beta:
                vals /= np.power(n.astype(float) + 1.0, t.beta)
        out[n] = vals
    return out


# ---------------------------------------------------------------------------
# tail series enclosures
#
# All routines below bound Sum_{i>=start} i^w * c * q^i / (i^alpha (i+1)^beta).
# "absolute" replaces every term by its absolute value first.


def _pad(lo: float, hi: float, dirt: float) -> SumEnclosure:
    """Outward-round an interval by a bound on accumulated float error.

    The absolute floor covers subnormal quantization, where relative padding
    underflows to nothing.
    """
    slack = dirt + 4.0 * _EPS * max(abs(lo), abs(hi)) + 1e-305
    return SumEnclosure.finite(lo - slack, hi + slack)


def _geom_zeroth(q: float, m: int) -> float:
    # Sum_{i>=m} q^i, |q| < 1
    return q ** m / (1.0 - q)


def _geom_first(q: float, m: int) -> float:
    # Sum_{i>=m} i q^i, |q| < 1
    return q ** m * (m - (m - 1) * q) / (1.0 - q) ** 2


def _poly_factor(i: np.ndarray, alpha: float, beta: float) -> np.ndarray:
    f = np.ones_like(i, dtype=float)
    if alpha:
        f *= np.power(i.astype(float), alpha)
    if beta:
        f *= np.power(i.astype(float) + 1.0, beta)
    return f


def _tail_enclosure(
    c: float,
    q: float,
    alpha: float,
    beta: float,
    start: int,
    weight: int,
    absolute: bool,
    precision: float,
) -> SumEnclosure:
    if absolute:
        c, q = abs(c), abs(q)
    if c == 0.0 or q == 0.0:
        return SumEnclosure.finite(0.0, 0.0)
    aq = abs(q)
    s_eff = alpha + beta - weight

    if aq > 1.0:
        # |terms| -> infinity: divergent in every mode
        return SumEnclosure.divergent()

    if aq == 1.0:
        if q > 0.0:
            if s_eff <= 1.0:
                return SumEnclosure.divergent()
            if alpha == 1.0 and beta == 1.0 and weight == 0:
                # telescoping: Sum_{i>=m} 1/(i(i+1)) = 1/m, exact
                v = c / start
                return SumEnclosure.finite(v, v)
            enc = _positive_integral(abs(c), alpha, beta, start, weight, precision)
            return _apply_sign(enc, c)
        # q == -1, signed alternating
        if s_eff > 1.0:
            return _alternating_abs_convergent(c, alpha, beta, start, weight, precision)
        if s_eff <= 0.0:
            # |terms| do not tend to zero
            return SumEnclosure.divergent()
        return _alternating_conditional(c, alpha, beta, start, weight, precision)

    # 0 < |q| < 1: geometric domination
    if alpha == 0.0 and beta == 0.0:
        closed = _geom_zeroth(q, start) if weight == 0 else _geom_first(q, start)
        v = c * closed
        return _pad(v, v, 0.0)
    if q > 0.0:
        enc = _geom_dominated(abs(c), q, alpha, beta, start, weight, precision, signed=False)
        return _apply_sign(enc, c)
    return _geom_dominated(c, q, alpha, beta, start, weight, precision, signed=True)


def _apply_sign(enc: SumEnclosure, c: float) -> SumEnclosure:
    if not enc.is_finite or c > 0:
        return enc
    return SumEnclosure.finite(-enc.hi, -enc.lo)


def _positive_integral(
    c: float, alpha: float, beta: float, start: int, weight: int, precision: float
) -> SumEnclosure:
    """Positive series at |q| = 1: explicit terms plus an integral-test remainder.

    term_i <= i^(weight - alpha - beta), so the tail past M is at most
    c * M^(1-s) / (s-1) with s = alpha + beta - weight > 1.
    """
    s = alpha + beta - weight
    # leave headroom for the outward float padding
    m_stop = (c / (0.75 * precision * (s - 1.0))) ** (1.0 / (s - 1.0))
    if not math.isfinite(m_stop) or m_stop > _TERM_BUDGET:
        return SumEnclosure.unknown()
    m_stop = max(start, int(math.ceil(m_stop)))
    partial = 0.0
    abs_accum = 0.0
    i0 = start
    while i0 <= m_stop:
        i1 = min(m_stop, i0 + _CHUNK - 1)
        i = np.arange(i0, i1 + 1, dtype=np.int64)
        t = c * np.power(i.astype(float), float(weight)) / _poly_factor(i, alpha, beta)
        partial += float(np.sum(t))
        abs_accum += float(np.sum(np.abs(t)))
        i0 = i1 + 1
    rem = c * m_stop ** (1.0 - s) / (s - 1.0)
    dirt = _EPS * abs_accum * 4.0
    return _pad(partial, partial + rem, dirt)


def _alternating_abs_convergent(
    c: float, alpha: float, beta: float, start: int, weight: int, precision: float
) -> SumEnclosure:
    """q = -1 with alpha+beta-weight > 1: bound the remainder by the absolute tail."""
    s = alpha + beta - weight
    half = 0.375 * precision
    m_stop = (abs(c) / (half * (s - 1.0))) ** (1.0 / (s - 1.0))
    if not math.isfinite(m_stop) or m_stop > _TERM_BUDGET:
        return SumEnclosure.unknown()
    m_stop = max(start, int(math.ceil(m_stop)))
    partial = 0.0
    abs_accum = 0.0
    i0 = start
    while i0 <= m_stop:
        i1 = min(m_stop, i0 + _CHUNK - 1)
        i = np.arange(i0, i1 + 1, dtype=np.int64)
        sign = np.where(i % 2 == 0, 1.0, -1.0)
        t = c * sign * np.power(i.astype(float), float(weight)) / _poly_factor(i, alpha, beta)
        partial += float(np.sum(t))
        abs_accum += float(np.sum(np.abs(t)))
        i0 = i1 + 1
    rem = abs(c) * m_stop ** (1.0 - s) / (s - 1.0)
    dirt = _EPS * abs_accum * 4.0
    return _pad(partial - rem, partial + rem, dirt)


def _alternating_conditional(
    c: float, alpha: float, beta: float, start: int, weight: int, precision: float
) -> SumEnclosure:
    """q = -1, 0 < alpha+beta-weight <= 1: alternating-series remainder bound.

    Valid once |terms| decrease monotonically; the remainder after M is at most
    the first omitted |term|.  Falls back to Unknown when the budget cannot push
    that bound below the requested precision.
    """
    s = alpha + beta - weight
    half = 0.375 * precision
    m_stop = (abs(c) / half) ** (1.0 / s)
    if not math.isfinite(m_stop) or m_stop > _TERM_BUDGET:
        return SumEnclosure.unknown()
    m_stop = max(start + 2, int(math.ceil(m_stop)))
    partial = 0.0
    abs_accum = 0.0
    monotone_from = start
    prev = math.inf
    i0 = start
    while i0 <= m_stop + 1:
        i1 = min(m_stop + 1, i0 + _CHUNK - 1)
        i = np.arange(i0, i1 + 1, dtype=np.int64)
        mag = abs(c) * np.power(i.astype(float), float(weight)) / _poly_factor(i, alpha, beta)
        rises = np.nonzero(np.diff(np.concatenate(([prev], mag))) > 0)[0]
        if rises.size:
            monotone_from = int(i[rises[-1]])
        prev = float(mag[-1])
        sign = np.where(i % 2 == 0, 1.0, -1.0) * math.copysign(1.0, c)
        keep = i <= m_stop
        partial += float(np.sum(sign[keep] * mag[keep]))
        abs_accum += float(np.sum(mag[keep]))
        i0 = i1 + 1
    if monotone_from > m_stop - 1:
        # could not confirm monotone decrease before the cutoff
        return SumEnclosure.unknown()
    bound_i = m_stop + 1
    rem = abs(c) * bound_i ** weight / (bound_i ** alpha * (bound_i + 1) ** beta)
    dirt = _EPS * abs_accum * 4.0
    return _pad(partial - rem, partial + rem, dirt)


def _geom_dominated(
    c: float,
    q: float,
    alpha: float,
    beta: float,
    start: int,
    weight: int,
    precision: float,
    signed: bool,
) -> SumEnclosure:
    """|q| < 1 with polynomial factors: explicit terms + geometric dominator tail.

    After summing through M, the rest is bounded by the pure geometric series
    with the polynomial factor frozen at its largest remaining value.
    """
    aq = abs(q)
    ac = abs(c)
    partial = 0.0
    abs_accum = 0.0
    i0 = start
    target = 0.75 * precision / (2.0 if signed else 1.0)
    chunk = 512
    while True:
        i1 = i0 + chunk - 1
        i = np.arange(i0, i1 + 1, dtype=np.int64)
        with np.errstate(under="ignore"):
            t = c * np.power(q, i.astype(float)) / _poly_factor(i, alpha, beta)
            if weight:
                t *= i.astype(float)
        partial += float(np.sum(t))
        abs_accum += float(np.sum(np.abs(t)))
        m = i1
        poly_floor = (m + 1) ** alpha * (m + 2) ** beta
        if weight == 0:
            rem = ac * aq ** (m + 1) / (1.0 - aq) / poly_floor
        else:
            rem = ac * _geom_first(aq, m + 1) / poly_floor
        if rem <= target:
            break
        if m - start > _TERM_BUDGET:
            return SumEnclosure.unknown()
        i0 = i1 + 1
        chunk = min(chunk * 4, _CHUNK)
    dirt = _EPS * abs_accum * 4.0
    if signed:
        return _pad(partial - rem, partial + rem, dirt)
    # positive series: partial is a certified lower bound
    return _pad(partial, partial + rem, dirt)


# ---------------------------------------------------------------------------
# public series operations

_MODES = {"plain": (0, False), "absolute": (0, True), "first_moment": (1, False), "first_moment_abs": (1, True)}


def series_sum(kernel: KernelSpec, mode: str = "plain", precision: float = 1e-12) -> SumEnclosure:
    """Certified enclosure of Sum_n w(a_n) for w in {a, |a|, n*a, n*|a|}.

    Returns Divergent only on a proof (|q| > 1, or |q| = 1 with too little
    polynomial decay for the requested moment), Unknown when neither a bracket
    nor a divergence proof is available at this precision.
    """
    if mode not in _MODES:
        raise ValueError(f"unknown mode {mode!r}")
    if not precision > 0:
        raise ValueError("precision must be positive")
    weight, absolute = _MODES[mode]
    vals = [v for v in kernel.prefix]
    if absolute:
        pref = math.fsum(abs(v) * (i + 1) ** weight for i, v in enumerate(vals))
    else:
        pref = math.fsum(v * (i + 1) ** weight for i, v in enumerate(vals))
    t = kernel.tail
    if t.is_zero:
        return SumEnclosure.finite(pref, pref)
    enc = _tail_enclosure(t.c, t.q, t.alpha, t.beta, len(vals) + 1, weight, absolute, precision)
    return enc.shift(pref)


def tail_abs_sum(kernel: KernelSpec, n: int, precision: float = 1e-12) -> SumEnclosure:
    """Certified enclosure of L_n = Sum_{i>n} |a_i|."""
    if n < 0:
        raise ValueError("n must be >= 0")
    npre = len(kernel.prefix)
    pref = math.fsum(abs(v) for v in kernel.prefix[n:]) if n < npre else 0.0
    t = kernel.tail
    if t.is_zero:
        return SumEnclosure.finite(pref, pref)
    start = max(n, npre) + 1
    enc = _tail_enclosure(t.c, t.q, t.alpha, t.beta, start, 0, True, precision)
    return enc.shift(pref)


def power_series_value(kernel: KernelSpec, t: float, precision: float = 1e-10) -> SumEnclosure:
    """Certified enclosure of a(t) = Sum a_n t^n at a real point inside the disk.

    The tail of a(t) is the tail family again with ratio q*t, so the same
    bracketing machinery applies; |t| must stay strictly below the radius of
    convergence.
    """
    if not precision > 0:
        raise ValueError("precision must be positive")
    if abs(t) >= radius_of_convergence(kernel):
        return SumEnclosure.unknown()
    powers = [t ** (i + 1) for i in range(len(kernel.prefix))]
    pref = math.fsum(v * p for v, p in zip(kernel.prefix, powers))
    dirt = 4.0 * _EPS * math.fsum(abs(v * p) for v, p in zip(kernel.prefix, powers))
    tm = kernel.tail
    if tm.is_zero:
        return SumEnclosure.finite(pref - dirt, pref + dirt)
    enc = _tail_enclosure(tm.c, tm.q * t, tm.alpha, tm.beta, len(kernel.prefix) + 1, 0, False, precision)
    if not enc.is_finite:
        return enc
    return SumEnclosure.finite(enc.lo + pref - dirt, enc.hi + pref + dirt)


def radius_of_convergence(kernel: KernelSpec) -> float:
    """Radius of convergence of Sum a_n z^n; the prefix never affects it."""
    t = kernel.tail
    if t.is_zero or t.q == 0.0:
        return math.inf
    return 1.0 / abs(t.q)


def support_gcd(kernel: KernelSpec) -> int | None:
    """gcd of {n : a_n > 0}; None when no term is positive."""
    g = 0
    for i, v in enumerate(kernel.prefix):
        if v > 0.0:
            g = math.gcd(g, i + 1)
    t = kernel.tail
    if not t.is_zero and t.q != 0.0:
        npre = len(kernel.prefix)
        if t.c > 0.0 and t.q > 0.0:
            # every index past the prefix is in the support
            g = math.gcd(g, math.gcd(npre + 1, npre + 2))
        elif t.q < 0.0:
            if t.c > 0.0:
                # positive at even indices only
                g = math.gcd(g, 2)
            else:
                # positive at odd indices: two consecutive odd numbers are coprime
                g = math.gcd(g, 1)
    return g if g > 0 else None


# ---------------------------------------------------------------------------
# JSON schema


def kernel_from_dict(data: dict) -> KernelSpec:
    """Parse {"prefix": [...], "tail": {...}}; prefix[0] is a_1."""
    if not isinstance(data, dict):
        raise KernelFormatError("kernel spec must be a JSON object")
    if "prefix" not in data:
        raise KernelFormatError("missing field: prefix")
    if "tail" not in data:
        raise KernelFormatError("missing field: tail")
    prefix = data["prefix"]
    if not isinstance(prefix, list) or not all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in prefix):
        raise KernelFormatError("prefix must be an array of numbers")
    for i, v in enumerate(prefix):
        if not math.isfinite(v):
            raise KernelFormatError(f"prefix[{i}] must be finite, got {v!r}")
    tail = data["tail"]
    if not isinstance(tail, dict) or "kind" not in tail:
        raise KernelFormatError("tail must be an object with a 'kind' field")
    kind = tail["kind"]
    if kind == "zero":
        tm = TailModel.zero()
    elif kind == "parametric":
        for f in ("c", "q", "alpha", "beta"):
            if f not in tail:
                raise KernelFormatError(f"missing field: tail.{f}")
            v = tail[f]
            if not isinstance(v, (int, float)) or isinstance(v, bool) or not math.isfinite(v):
                raise KernelFormatError(f"tail.{f} must be a finite number, got {v!r}")
        tm = TailModel.parametric(tail["c"], tail["q"], tail["alpha"], tail["beta"])
    else:
        raise KernelFormatError(f"tail.kind must be 'zero' or 'parametric', got {kind!r}")
    return KernelSpec(tuple(float(v) for v in prefix), tm)


def kernel_to_dict(kernel: KernelSpec) -> dict:
    if kernel.tail.is_zero:
        tail = {"kind": "zero"}
    else:
        t = kernel.tail
        tail = {"kind": "parametric", "c": t.c, "q": t.q, "alpha": t.alpha, "beta": t.beta}
    return {"prefix": list(kernel.prefix), "tail": tail}


def loads_kernel(text: str) -> KernelSpec:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as e:
        raise KernelFormatError(f"invalid JSON: {e}") from e
    return kernel_from_dict(data)


def load_kernel(path) -> KernelSpec:
    with open(path, "r", encoding="utf-8") as f:
        return loads_kernel(f.read())


def dumps_kernel(kernel: KernelSpec) -> str:
    return json.dumps(kernel_to_dict(kernel), sort_keys=True)


def kernel_id(kernel: KernelSpec) -> str:
    """Content hash identifying the exact coefficient sequence."""
    return hashlib.sha256(dumps_kernel(kernel).encode("utf-8")).hexdigest()
