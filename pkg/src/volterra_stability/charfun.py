"""Truncated characteristic objects: s_n, the reversed polynomials, and bounds.

For the first n coefficients, ``s_n(z) = 1 - sum_{k<=n} a_k z^k`` and the
monic reversal ``p_n(z) = z^n - a_1 z^{n-1} - ... - a_n`` satisfy
``s_n(z) = z^n p_n(1/z)``.  The largest root modulus r_n of p_n, the product
profile delta_n(rho) = prod |1 - rho |z_i||, and its closed-form lower bounds
E1/E2/E3 are the raw material of the finite-approximation certificates.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .kernel import KernelSpec, terms

__all__ = [
    "RootSet",
    "DeltaMax",
    "EBound",
    "NonConvergence",
    "DomainError",
    "sn_coefficients",
    "pn_coefficients",
    "partial_sum_eval",
    "pn_roots",
    "maximize_delta",
    "e_bounds",
    "circle_min_modulus",
]

_RESIDUAL_LIMIT = 1e-8
_GOLDEN_TOL = 1e-12
_UNIT_TOL = 1e-9  # |z| counts as on the unit circle within this


class NonConvergence(RuntimeError):
    """Root finding failed to reach the residual bound; treat results as unusable."""


class DomainError(ValueError):
    """Operation invoked outside its domain (r_n on the wrong side of 1)."""


@dataclass(frozen=True)
class RootSet:
    """All n roots of p_n with a residual-based quality bound."""

    degree: int
    roots: tuple[complex, ...]
    residual_bound: float
    r_n: float

    @property
    def moduli(self) -> np.ndarray:
        return np.abs(np.asarray(self.roots))

    def margin(self) -> float:
        """Conservative root-location slack: residual_bound^(1/n)."""
        if self.residual_bound == 0.0:
            return 0.0
        return self.residual_bound ** (1.0 / self.degree)


@dataclass(frozen=True)
class DeltaMax:
    """Maximum of delta_n over [1/r_n, 1] and where it is attained."""

    rho0: float
    value: float
    profile_kinks: tuple[float, ...]


@dataclass(frozen=True)
class EBound:
    kind: str  # "E1" | "E2" | "E3" | "not_applicable"
    value: float
    rho: float


def sn_coefficients(kernel: KernelSpec, n: int) -> np.ndarray:
    """np.polyval-ready coefficients of s_n(z), highest power first."""
    a = terms(kernel, n)
    coeffs = np.empty(n + 1)
    coeffs[:n] = -a[1:][::-1]
    coeffs[n] = 1.0
    return coeffs


def pn_coefficients(kernel: KernelSpec, n: int) -> np.ndarray:
    """Monic coefficients of p_n(z) = z^n - a_1 z^{n-1} - ... - a_n."""
    return sn_coefficients(kernel, n)[::-1].copy()


def partial_sum_eval(kernel: KernelSpec, n: int, z: complex) -> complex:
    """Horner evaluation of s_n(z) = 1 - sum_{k=1..n} a_k z^k."""
    if n < 1:
        raise ValueError("n must be >= 1")
    return complex(np.polyval(sn_coefficients(kernel, n), z))


def _polish_roots(coeffs: np.ndarray, roots: np.ndarray) -> np.ndarray:
    """Guarded Newton steps in extended precision; a step never grows |p(z)|."""
    work = np.clongdouble
    cs = coeffs.astype(work)
    deriv = np.polyder(cs)
    out = roots.copy()
    for i, z0 in enumerate(roots):
        z = work(z0)
        fz = np.polyval(cs, z)
        for _ in range(8):
            if fz == 0:
                break
            dz = np.polyval(deriv, z)
            if dz == 0 or not np.isfinite(complex(dz)):
                break
            step = fz / dz
            if not np.isfinite(complex(step)):
                break
            z_new = z - step
            f_new = np.polyval(cs, z_new)
            if abs(f_new) >= abs(fz):
                break
            z, fz = z_new, f_new
        out[i] = complex(z)
    return out


def pn_roots(kernel: KernelSpec, n: int) -> RootSet:
    """All n roots of p_n via companion-matrix eigenvalues plus polishing.

    Raises NonConvergence when the polished residual exceeds the contract
    bound; callers must treat that as certificate-not-applicable.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    coeffs = pn_coefficients(kernel, n)
    if not np.all(np.isfinite(coeffs)):
        raise NonConvergence(f"p_{n} coefficients exceed float range")
    try:
        raw = np.roots(coeffs)
    except np.linalg.LinAlgError as e:
        raise NonConvergence(f"eigenvalue iteration failed for p_{n}") from e
    if raw.shape[0] < n:
        # np.roots strips leading zeros only; a monic polynomial keeps degree n
        raise NonConvergence(f"expected {n} roots, got {raw.shape[0]}")
    roots = _polish_roots(coeffs.astype(complex), raw.astype(complex))
    scale = max(1.0, float(np.max(np.abs(coeffs))))
    residual = float(np.max(np.abs(np.polyval(coeffs, roots)))) / scale
    if not math.isfinite(residual) or residual > _RESIDUAL_LIMIT:
        raise NonConvergence(f"residual {residual:.3e} above {_RESIDUAL_LIMIT:.0e} for p_{n}")
    r_n = float(np.max(np.abs(roots)))
    return RootSet(n, tuple(complex(z) for z in roots), residual, r_n)


def _delta_profile(moduli: np.ndarray):
    def delta(rho: float) -> float:
        return float(np.prod(np.abs(1.0 - rho * moduli)))

    return delta


def _golden_max(f, a: float, b: float, tol: float = _GOLDEN_TOL):
    invphi = (math.sqrt(5.0) - 1.0) / 2.0
    invphi2 = (3.0 - math.sqrt(5.0)) / 2.0
    h = b - a
    if h <= tol:
        mid = 0.5 * (a + b)
        return mid, f(mid)
    c = a + invphi2 * h
    d = a + invphi * h
    yc, yd = f(c), f(d)
    for _ in range(int(math.ceil(math.log(tol / h) / math.log(invphi)))):
        if yc > yd:
            b, d, yd = d, c, yc
            h *= invphi
            c = a + invphi2 * h
            yc = f(c)
        else:
            a, c, yc = c, d, yd
            h *= invphi
            d = a + invphi * h
            yd = f(d)
    mid = 0.5 * (a + b)
    return mid, f(mid)


def maximize_delta(roots: RootSet) -> DeltaMax:
    """Global maximum of delta_n(rho) = prod |1 - rho|z_i|| over [1/r_n, 1].

    The profile is log-concave between consecutive kinks 1/|z_i|, so a
    golden-section pass per smooth piece plus the kink and endpoint values
    finds the global maximum.
    """
    if roots.r_n <= 1.0:
        raise DomainError(f"delta maximization needs r_n > 1, got {roots.r_n}")
    moduli = roots.moduli
    lo = 1.0 / roots.r_n
    hi = 1.0
    kinks = sorted({1.0 / m for m in moduli if m > 1.0 and lo < 1.0 / m < hi})
    delta = _delta_profile(moduli)
    best_rho, best_val = lo, delta(lo)
    for rho in kinks + [hi]:
        v = delta(rho)
        if v > best_val:
            best_rho, best_val = rho, v
    bounds = [lo] + kinks + [hi]
    for a, b in zip(bounds[:-1], bounds[1:]):
        rho, v = _golden_max(delta, a, b)
        if v > best_val:
            best_rho, best_val = rho, v
    return DeltaMax(best_rho, best_val, tuple(kinks))


def e_bounds(roots: RootSet) -> EBound:
    """Closed-form lower bounds for the delta maximum, moduli sorted descending."""
    if roots.r_n <= 1.0:
        raise DomainError(f"E-bounds need r_n > 1, got {roots.r_n}")
    n = roots.degree
    m = np.sort(roots.moduli)[::-1]
    outside = int(np.sum(m > 1.0))
    if outside == 0:
        return EBound("not_applicable", math.nan, math.nan)
    if outside == n:
        return EBound("E1", float(abs(1.0 - m[-1]) ** n), 1.0)
    nxt = float(m[outside])
    if abs(nxt - 1.0) <= _UNIT_TOL:
        rho1 = 2.0 / (float(m[outside - 1]) + 1.0)
        return EBound("E3", float(abs(1.0 - rho1 * m[outside - 1]) ** n), rho1)
    return EBound("E2", float(min(abs(1.0 - m[outside - 1]), abs(1.0 - nxt)) ** n), 1.0)


def circle_min_modulus(kernel: KernelSpec, n: int, grid_points: int) -> tuple[float, complex]:
    """Minimum of |s_n| over a uniform grid on the unit circle, with argmin."""
    if grid_points < 16:
        raise ValueError("grid_points must be >= 16")
    if n < 1:
        raise ValueError("n must be >= 1")
    theta = np.linspace(0.0, 2.0 * math.pi, grid_points, endpoint=False)
    z = np.exp(1j * theta)
    vals = np.abs(np.polyval(sn_coefficients(kernel, n), z))
    i = int(np.argmin(vals))
    return float(vals[i]), complex(z[i])
