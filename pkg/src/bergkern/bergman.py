"""Bergman kernels of the ellipsoid intersections

    D_n^{q,r}   = {(z, w1, w2) in C^n x C x C : |z|^2 + |w1|^q < 1, |z|^2 + |w2|^r < 1}
    D_{1/n}^{q,r} = {(z, w1, w2) in C^3 : |z|^{2/n} + |w1|^q < 1, |z|^{2/n} + |w2|^r < 1}

Both are complete Reinhardt domains, so the kernel is the sum of
|monomial|^2 / norm^2 over all monomials. Summing out the z-block leaves the
rational function L_n^{q,r}, built exactly here by recursion from L_1.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import mpmath

from .errors import ConvergenceError, DomainError
from .exactpoly import BiPoly, RatLike, StructuredRatFun, as_rat, ratfun_apply_recursion, ratfun_eval
from .specfun import DEFAULT_SERIES, SeriesConfig, log_gamma, principal_power, resum_digits, tail_is_small


@dataclass(frozen=True)
class KernelParams:
    n: int
    q: Fraction
    r: Fraction

    def __post_init__(self):
        object.__setattr__(self, "q", as_rat(self.q))
        object.__setattr__(self, "r", as_rat(self.r))
        if self.n < 1:
            raise ValueError(f"n must be >= 1, got {self.n}")
        if self.q <= 0 or self.r <= 0:
            raise ValueError(f"q and r must be positive, got q={self.q}, r={self.r}")

    @property
    def kernel_exponent(self) -> float:
        """2/q + 2/r + n + 1, the power of (1 - <z, eta>) in the kernel.

        Summing the monomial series over the z-block gives
        Gamma(A + n + 1) (1 - tau)^{-(A + n + 1)}, so the dimension n enters
        the exponent.
        """
        return float(2 / self.q + 2 / self.r + self.n + 1)


@dataclass(frozen=True)
class MultiIndex:
    alpha: tuple[int, ...]
    gamma1: int = 0
    gamma2: int = 0

    def __post_init__(self):
        alpha = (self.alpha,) if isinstance(self.alpha, int) else tuple(self.alpha)
        object.__setattr__(self, "alpha", alpha)
        if any(a < 0 for a in alpha) or self.gamma1 < 0 or self.gamma2 < 0:
            raise ValueError("multi-index entries must be nonnegative")

    @property
    def abs_alpha(self) -> int:
        return sum(self.alpha)

    @classmethod
    def zero(cls, n: int) -> MultiIndex:
        return cls((0,) * n, 0, 0)


@dataclass(frozen=True)
class DomainPoint:
    z: tuple[complex, ...]
    w1: complex = 0j
    w2: complex = 0j

    def __post_init__(self):
        object.__setattr__(self, "z", tuple(complex(v) for v in self.z))
        object.__setattr__(self, "w1", complex(self.w1))
        object.__setattr__(self, "w2", complex(self.w2))

    @classmethod
    def origin(cls, n: int) -> DomainPoint:
        return cls((0j,) * n)

    def z_norm_sq(self) -> float:
        return sum(abs(v) ** 2 for v in self.z)

    def in_domain(self, params: KernelParams) -> bool:
        """Strict membership in D_n^{q,r}."""
        if len(self.z) != params.n:
            return False
        s = self.z_norm_sq()
        return s + abs(self.w1) ** float(params.q) < 1 and s + abs(self.w2) ** float(params.r) < 1


@dataclass(frozen=True)
class KernelArguments:
    tau: complex
    nu1: complex
    nu2: complex
    a: complex
    b: complex

    @classmethod
    def from_points(cls, params: KernelParams, p: DomainPoint, p2: DomainPoint) -> KernelArguments:
        tau = sum((zi * eta.conjugate() for zi, eta in zip(p.z, p2.z)), 0j)
        nu1 = p.w1 * p2.w1.conjugate()
        nu2 = p.w2 * p2.w2.conjugate()
        one_minus_tau = 1 - tau
        a = nu1 / principal_power(one_minus_tau, float(2 / params.q))
        b = nu2 / principal_power(one_minus_tau, float(2 / params.r))
        return cls(tau, nu1, nu2, a, b)


def _A(q: Fraction, r: Fraction, g1: int, g2: int) -> Fraction:
    return Fraction(2 * g1 + 2) / q + Fraction(2 * g2 + 2) / r


def monomial_norm_D(params: KernelParams, idx: MultiIndex) -> float:
    """Squared L^2 norm of z^alpha w1^gamma1 w2^gamma2 over D_n^{q,r}."""
    if len(idx.alpha) != params.n:
        raise ValueError(f"alpha has length {len(idx.alpha)}, expected n = {params.n}")
    A = float(_A(params.q, params.r, idx.gamma1, idx.gamma2))
    n = params.n
    log_val = (
        (n + 2) * math.log(math.pi)
        + log_gamma(A + 1)
        + sum(log_gamma(a + 1) for a in idx.alpha)
        - math.log((idx.gamma1 + 1) * (idx.gamma2 + 1))
        - log_gamma(A + idx.abs_alpha + n + 1)
    )
    return math.exp(log_val)


def monomial_norm_Dinv(n: int, q: RatLike, r: RatLike, idx: MultiIndex) -> float:
    """Squared L^2 norm of z^alpha w1^gamma1 w2^gamma2 over D_{1/n}^{q,r}."""
    if len(idx.alpha) != 1:
        raise ValueError("D_{1/n} monomials carry a single z exponent")
    if n < 1:
        raise ValueError("n must be >= 1")
    q, r = as_rat(q), as_rat(r)
    A = float(_A(q, r, idx.gamma1, idx.gamma2))
    alpha = idx.alpha[0]
    log_val = (
        math.log(n)
        + 3 * math.log(math.pi)
        + log_gamma(A + 1)
        + log_gamma(n * alpha + n)
        - math.log((idx.gamma1 + 1) * (idx.gamma2 + 1))
        - log_gamma(A + n * alpha + n + 1)
    )
    return math.exp(log_val)


def base_L(q: RatLike, r: RatLike) -> StructuredRatFun:
    """L_1^{q,r} = [2q(1-x)(1+y) + 2r(1+x)(1-y) + qr(1-x)(1-y)] / (qr (1-x)^3 (1-y)^3)."""
    q, r = as_rat(q), as_rat(r)
    x, y = BiPoly.x(), BiPoly.y()
    num = (1 - x) * (1 + y) * (2 * q) + (1 + x) * (1 - y) * (2 * r) + (1 - x) * (1 - y) * (q * r)
    return StructuredRatFun(num, q * r, 3, 3)


@lru_cache(maxsize=None)
def _build_L_cached(n: int, q: Fraction, r: Fraction) -> StructuredRatFun:
    if n == 1:
        return base_L(q, r)
    return ratfun_apply_recursion(_build_L_cached(n - 1, q, r), n - 1, q, r)


def build_L(n: int, q: RatLike, r: RatLike) -> StructuredRatFun:
    """Exact L_n^{q,r}, whose Taylor coefficient at x^g1 y^g2 is
    (g1+1)(g2+1) Gamma(A+n+1)/Gamma(A+1), A = (2g1+2)/q + (2g2+2)/r.
    """
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    q, r = as_rat(q), as_rat(r)
    if q <= 0 or r <= 0:
        raise ValueError("q and r must be positive")
    for k in range(1, n):
        _build_L_cached(k, q, r)  # warm iteratively; keeps recursion depth flat
    return _build_L_cached(n, q, r)


def _l_series_sum(n, qf, rf, x, y, cfg: SeriesConfig, lgamma, exp):
    def coeff(g1: int, g2: int):
        A = (2 * g1 + 2) / qf + (2 * g2 + 2) / rf
        return (g1 + 1) * (g2 + 1) * exp(lgamma(A + n + 1) - lgamma(A + 1))

    total = x * 0
    acc_abs = abs(total)
    prev = None
    for s in range(cfg.max_terms):
        diag = x * 0
        diag_abs = abs(diag)
        for g1 in range(s + 1):
            t = coeff(g1, s - g1) * x**g1 * y ** (s - g1)
            diag += t
            diag_abs += abs(t)
        total += diag
        acc_abs += diag_abs
        if s > 0 and tail_is_small(diag_abs, prev, total, cfg.rel_tail_tol):
            return total, acc_abs
        prev = diag_abs
    raise ConvergenceError(f"L_n series did not converge in {cfg.max_terms} anti-diagonals")


def l_series(n: int, q: RatLike, r: RatLike, x: complex, y: complex,
             cfg: SeriesConfig = DEFAULT_SERIES) -> complex:
    """L_n^{q,r}(x, y) from its defining power series (independent of build_L).

    Coefficients use log_gamma. Terms that cancel by more than three digits
    trigger a re-summation with mpmath at a precision covering the loss.
    """
    if abs(x) >= 1 or abs(y) >= 1:
        raise DomainError(f"series needs |x|, |y| < 1, got {abs(x)}, {abs(y)}")
    q, r = as_rat(q), as_rat(r)
    total, acc_abs = _l_series_sum(n, float(q), float(r), complex(x), complex(y), cfg, log_gamma, math.exp)
    dps = resum_digits(acc_abs, total)
    if dps is None:
        return total
    with mpmath.workdps(dps):
        qm = mpmath.mpf(q.numerator) / q.denominator
        rm = mpmath.mpf(r.numerator) / r.denominator
        total, _ = _l_series_sum(n, qm, rm, mpmath.mpc(x), mpmath.mpc(y), cfg, mpmath.loggamma, mpmath.exp)
        return complex(total)


def kernel_D(params: KernelParams, p: DomainPoint, p2: DomainPoint, exact: bool = False) -> complex:
    """K_{D_n^{q,r}}(p, p2) = L_n(a, b) / (pi^{n+2} (1 - <z, eta>)^{2/q + 2/r + n + 1})."""
    for pt in (p, p2):
        if not pt.in_domain(params):
            raise DomainError(f"point {pt} is not in D_{params.n}^({params.q},{params.r})")
    args = KernelArguments.from_points(params, p, p2)
    L = build_L(params.n, params.q, params.r)
    val = ratfun_eval(L, args.a, args.b, exact=exact)
    return val / (math.pi ** (params.n + 2) * principal_power(1 - args.tau, params.kernel_exponent))


def kernel_Dinv_origin(n: int, q: RatLike, r: RatLike, nu1: complex, nu2: complex, exact: bool = False) -> complex:
    """K_{D_{1/n}^{q,r}}((0, w1, w2), (0, xi1, xi2)) with nu_k = w_k conj(xi_k)."""
    if abs(nu1) >= 1 or abs(nu2) >= 1:
        raise DomainError(f"need |nu1|, |nu2| < 1, got {abs(nu1)}, {abs(nu2)}")
    L = build_L(n, q, r)
    return ratfun_eval(L, nu1, nu2, exact=exact) / (math.pi**3 * math.factorial(n))


def slice_points(n: int, nu1: complex, nu2: complex) -> tuple[DomainPoint, DomainPoint]:
    """Points (0, w1, w2), (0, xi1, xi2) of D_n with w_k conj(xi_k) = nu_k.

    Uses w_k = sqrt|nu_k| e^{i arg nu_k}, xi_k = sqrt|nu_k|, so every
    coordinate has modulus sqrt|nu_k| < 1.
    """
    def split(nu: complex) -> tuple[complex, complex]:
        m = math.sqrt(abs(nu))
        return m * cmath.exp(1j * cmath.phase(nu)), complex(m)

    (w1, xi1), (w2, xi2) = split(complex(nu1)), split(complex(nu2))
    zero = (0j,) * n
    return DomainPoint(zero, w1, w2), DomainPoint(zero, xi1, xi2)


def deflation_sides(n: int, q: RatLike, r: RatLike, nu1: complex, nu2: complex) -> tuple[complex, complex]:
    """(n!/pi^{n-1} K_{D_{1/n}} on the slice, K_{D_n} on the matching slice)."""
    if abs(nu1) >= 1 or abs(nu2) >= 1:
        raise DomainError(f"need |nu1|, |nu2| < 1, got {abs(nu1)}, {abs(nu2)}")
    lhs = math.factorial(n) / math.pi ** (n - 1) * kernel_Dinv_origin(n, q, r, nu1, nu2)
    p, p2 = slice_points(n, nu1, nu2)
    rhs = kernel_D(KernelParams(n, q, r), p, p2)
    return lhs, rhs


def deflation_residual(n: int, q: RatLike, r: RatLike, nu1: complex, nu2: complex) -> float:
    """|LHS - RHS| of the deflation identity between D_{1/n} and D_n."""
    lhs, rhs = deflation_sides(n, q, r, nu1, nu2)
    return abs(lhs - rhs)


__all__ = [
    "DomainPoint",
    "KernelArguments",
    "KernelParams",
    "MultiIndex",
    "base_L",
    "build_L",
    "deflation_residual",
    "deflation_sides",
    "kernel_D",
    "kernel_Dinv_origin",
    "l_series",
    "monomial_norm_D",
    "monomial_norm_Dinv",
    "slice_points",
]
