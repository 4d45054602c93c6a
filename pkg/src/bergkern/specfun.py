"""Floating-point special functions: log-gamma, Pochhammer symbols, the Gauss
series 2F1, the Appell series F1 and Jacobi polynomials.

All series are summed directly inside their disks of convergence; there is
no analytic continuation.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from fractions import Fraction

import mpmath

from .errors import ConvergenceError, DomainError, PoleError


@dataclass(frozen=True)
class SeriesConfig:
    rel_tail_tol: float = 1e-14
    max_terms: int = 2000

    def __post_init__(self):
        if not 0 < self.rel_tail_tol < 1:
            raise ValueError("rel_tail_tol must lie in (0, 1)")
        if self.max_terms < 1:
            raise ValueError("max_terms must be >= 1")


DEFAULT_SERIES = SeriesConfig()


def log_gamma(x: float) -> float:
    """Natural log of Gamma(x) for x > 0."""
    if not x > 0:
        raise DomainError(f"log_gamma requires x > 0, got {x}")
    return math.lgamma(x)


def pochhammer(a: complex | float, n: int):
    """Rising factorial (a)_n = a (a+1) ... (a+n-1)."""
    if n < 0:
        raise ValueError("pochhammer index must be nonnegative")
    out = 1.0 if not isinstance(a, complex) else 1 + 0j
    for j in range(n):
        out *= a + j
    return out


def _nonpositive_int(v: float) -> bool:
    return v <= 0 and float(v).is_integer()


def _cancellation_digits(acc_abs, total) -> int:
    """Decimal digits lost to cancellation when summing terms of size acc_abs to total."""
    if total == 0:
        return 0
    ratio = float(acc_abs / abs(total))
    return max(0, int(math.ceil(math.log10(ratio)))) if ratio > 1 else 0


def _rerun_digits(lost: int) -> int | None:
    """Working precision for a re-summation, or None if double precision suffices."""
    return None if lost <= _LOSS_BUDGET else 17 + lost + 4


_LOSS_BUDGET = 3


def tail_is_small(last_abs, prev_abs, total, tol: float) -> bool:
    """Geometric tail estimate of a series against its running sum.

    The ratio of the last two block magnitudes stands in for the decay rate;
    the series is done when last * rho / (1 - rho) <= tol * |total|.
    """
    if last_abs == 0:
        return True
    if not prev_abs or last_abs >= prev_abs:
        return False
    rho = last_abs / prev_abs
    return last_abs * rho / (1 - rho) <= tol * abs(total)


def resum_digits(acc_abs, total) -> int | None:
    """Working precision for a high-precision re-summation, or None if double suffices."""
    return _rerun_digits(_cancellation_digits(acc_abs, total))


def _sum_2f1(a, b, c, z, cfg: SeriesConfig, stop):
    term = z ** 0
    total = term
    acc_abs = abs(term)
    for k in range(cfg.max_terms):
        if stop is not None and k >= stop:
            return total, acc_abs
        ratio = (a + k) * (b + k) / ((c + k) * (k + 1)) * z
        term *= ratio
        total += term
        acc_abs += abs(term)
        if term == 0:
            return total, acc_abs
        if stop is None:
            rho = abs(ratio)
            if rho < 1 and abs(term) * rho / (1 - rho) <= cfg.rel_tail_tol * abs(total):
                return total, acc_abs
    if stop is not None and stop <= cfg.max_terms:
        return total, acc_abs
    raise ConvergenceError(f"2F1({a}, {b}; {c}; {z}) did not converge in {cfg.max_terms} terms")


def gauss_2f1(a: float, b: float, c: float, z: complex, cfg: SeriesConfig = DEFAULT_SERIES) -> complex:
    """Power series of 2F1(a, b; c; z) for |z| < 1 (any z if it terminates).

    Summed in double precision; if the terms cancel by more than three
    digits the same series is re-summed with mpmath at a working precision
    that covers the loss.
    """
    terminating = _nonpositive_int(a) or _nonpositive_int(b)
    if not terminating and abs(z) >= 1:
        raise DomainError(f"2F1 series needs |z| < 1, got |z| = {abs(z)}")
    stop = None
    if terminating:
        stop = int(-max(v for v in (a, b) if _nonpositive_int(v)))
    if _nonpositive_int(c) and (stop is None or stop > -c):
        raise PoleError(f"2F1 lower parameter c = {c} is a nonpositive integer")
    total, acc_abs = _sum_2f1(a, b, c, complex(z), cfg, stop)
    dps = _rerun_digits(_cancellation_digits(acc_abs, total))
    if dps is None:
        return total
    with mpmath.workdps(dps):
        mp = mpmath.mpf
        total, _ = _sum_2f1(mp(a), mp(b), mp(c), mpmath.mpc(z), cfg, stop)
        return complex(total)


def _sum_f1(a, b, b2, c, x, y, cfg: SeriesConfig):
    one = x ** 0
    u = [one]  # (b)_n x^n / n!
    v = [one]  # (b2)_m y^m / m!
    coupled = abs(one)  # (a)_s / (c)_s
    total = one
    acc_abs = abs(one)
    prev_diag = None
    for s in range(1, cfg.max_terms + 1):
        u.append(u[-1] * (b + s - 1) / s * x)
        v.append(v[-1] * (b2 + s - 1) / s * y)
        coupled *= (a + s - 1) / (c + s - 1)
        diag = coupled * sum(u[k] * v[s - k] for k in range(s + 1))
        diag_abs = abs(coupled) * sum(abs(u[k] * v[s - k]) for k in range(s + 1))
        total += diag
        acc_abs += diag_abs
        if tail_is_small(diag_abs, prev_diag, total, cfg.rel_tail_tol):
            return total, acc_abs
        prev_diag = diag_abs
    raise ConvergenceError(f"F1 series did not converge in {cfg.max_terms} anti-diagonals")


def appell_f1(a, b, b2, c, x: complex, y: complex, cfg: SeriesConfig = DEFAULT_SERIES) -> complex:
    """Double series of Appell F1(a; b, b2; c; x, y) for |x|, |y| < 1.

    Summed along anti-diagonals s = m + n so the coupled factor
    (a)_s / (c)_s is carried by a single running product. Cancellation is
    handled as in :func:`gauss_2f1`.
    """
    if abs(x) >= 1 or abs(y) >= 1:
        raise DomainError(f"F1 series needs |x|, |y| < 1, got {abs(x)}, {abs(y)}")
    if _nonpositive_int(c):
        raise PoleError(f"F1 lower parameter c = {c} is a nonpositive integer")
    total, acc_abs = _sum_f1(a, b, b2, c, complex(x), complex(y), cfg)
    dps = _rerun_digits(_cancellation_digits(acc_abs, total))
    if dps is None:
        return total
    with mpmath.workdps(dps):
        mp = mpmath.mpf
        total, _ = _sum_f1(mp(a), mp(b), mp(b2), mp(c), mpmath.mpc(x), mpmath.mpc(y), cfg)
        return complex(total)


def jacobi_p(d: int, k: float, l: float, z: complex) -> complex:
    """Jacobi polynomial P_d^{(k,l)}(z) from its terminating hypergeometric form.

    P_d = (k+1)_d / d! * 2F1(-d, 1+k+l+d; k+1; (1-z)/2), summed as a
    polynomial in w = (1-z)/2 by Horner's rule. The sum alternates and
    cancels badly near z = -1, so it is carried out exactly on the binary
    values of the inputs and rounded once.
    """
    if d < 0:
        raise ValueError("degree must be nonnegative")
    if d == 0:
        return 1 + 0j
    k, l = Fraction(k), Fraction(l)
    z = complex(z)
    wr, wi = (1 - Fraction(z.real)) / 2, -Fraction(z.imag) / 2
    # coefficients of w^j in 2F1(-d, 1+k+l+d; k+1; w), times (k+1)_d / d!
    lead = Fraction(1)
    for j in range(d):
        lead *= (k + 1 + j) / (j + 1)
    coeffs = [lead]
    for j in range(d):
        coeffs.append(coeffs[-1] * (-d + j) * (1 + k + l + d + j) / ((k + 1 + j) * (j + 1)))
    vr, vi = Fraction(0), Fraction(0)
    for cj in reversed(coeffs):
        vr, vi = vr * wr - vi * wi + cj, vr * wi + vi * wr
    return complex(float(vr), float(vi))


def jacobi_p_recurrence(d: int, k: float, l: float, z: complex) -> complex:
    """P_d^{(k,l)}(z) by the standard three-term recurrence in the degree."""
    z = complex(z)
    p_prev = 1 + 0j
    if d == 0:
        return p_prev
    p = (k + 1) + (k + l + 2) * (z - 1) / 2
    for n in range(2, d + 1):
        s = 2 * n + k + l
        a1 = 2 * n * (n + k + l) * (s - 2)
        a2 = (s - 1) * (s * (s - 2) * z + k * k - l * l)
        a3 = 2 * (n + k - 1) * (n + l - 1) * s
        p_prev, p = p, (a2 * p - a3 * p_prev) / a1
    return p


def principal_power(base: complex, exponent: float) -> complex:
    """base**exponent on the principal branch (cut along the negative axis)."""
    base = complex(base)
    if base == 0:
        return 0j if exponent > 0 else complex(math.inf)
    return cmath.exp(exponent * cmath.log(base))
