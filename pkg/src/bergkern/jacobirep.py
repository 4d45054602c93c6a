"""Closed-form representations of the kernel of D_n^{2,2} on the slice
{0} x D x D, each an independent evaluator of the same function of
(nu1, nu2) = (w1 conj(xi1), w2 conj(xi2)):

* ``rep_finite_sum``   finite double sum of powers of 1/(1-nu_k)
* ``rep_odd``          Jacobi-polynomial form for n = 2m + 1
* ``rep_even``         Jacobi-polynomial form for n = 2m
* ``rep_diagonal``     nu1 = nu2
* ``rep_appell``       Gamma(3+n)/(2 pi^{n+2}) F1(3+n; 2, 2; 3; nu1, nu2)
"""
from __future__ import annotations

import math
from dataclasses import dataclass

from .bergman import build_L
from .errors import DomainError, SingularArgument
from .exactpoly import ratfun_eval
from .specfun import DEFAULT_SERIES, SeriesConfig, appell_f1, gauss_2f1, jacobi_p, pochhammer


def _check_bidisk(*nus: complex) -> None:
    for nu in nus:
        if abs(nu) >= 1:
            raise DomainError(f"need |nu| < 1, got |nu| = {abs(nu)}")


@dataclass(frozen=True)
class DiagArg:
    """Derived arguments of the Jacobi representations."""

    nu1: complex
    nu2: complex
    cm_index: int = 0

    @property
    def xprime(self) -> complex:
        return ((self.nu1 - self.nu2) / (2 - self.nu1 - self.nu2)) ** 2

    @property
    def jacobi_arg(self) -> complex:
        xp = self.xprime
        if xp == 1:
            raise SingularArgument("x' = 1: Jacobi argument (x'+1)/(1-x') is undefined")
        return (xp + 1) / (1 - xp)

    @property
    def c_m(self) -> float:
        m = self.cm_index
        return math.gamma(4 + 2 * m) * math.factorial(m) / (6 * pochhammer(2.5, m))

    @property
    def denominator_base(self) -> complex:
        # (1 - nu1)(1 - nu2); the factor produced by the Pfaff step
        return (1 - self.nu1) * (1 - self.nu2)


def rep_finite_sum(n: int, nu1: complex, nu2: complex) -> complex:
    """Gamma(3+n)/(2 pi^{n+2}) sum_{i<=n} sum_{k<=n-i} C(n,i) C(n-i,k) (2)_i (2)_k
    nu1^i nu2^k / ((3)_{i+k} (1-nu1)^{2+i} (1-nu2)^{2+k})."""
    if n < 1:
        raise ValueError("n must be >= 1")
    _check_bidisk(nu1, nu2)
    nu1, nu2 = complex(nu1), complex(nu2)
    total = 0j
    for i in range(n + 1):
        for k in range(n - i + 1):
            coef = math.comb(n, i) * math.comb(n - i, k) * pochhammer(2, i) * pochhammer(2, k) / pochhammer(3, i + k)
            total += coef * nu1**i * nu2**k / ((1 - nu1) ** (2 + i) * (1 - nu2) ** (2 + k))
    return math.gamma(3 + n) / (2 * math.pi ** (n + 2)) * total


def rep_odd(m: int, nu1: complex, nu2: complex) -> complex:
    """Kernel of D_{2m+1}^{2,2} on the slice via P_m^{(3/2, +-1/2)}."""
    if m < 0:
        raise ValueError("m must be >= 0")
    _check_bidisk(nu1, nu2)
    arg = DiagArg(complex(nu1), complex(nu2), m)
    X = arg.jacobi_arg
    D = arg.denominator_base
    cm = arg.c_m
    first = cm * (2 + m) * (2 - arg.nu1 - arg.nu2) * jacobi_p(m, 1.5, 0.5, X) / D ** (m + 3)
    second = cm * (2 * m + 1) * jacobi_p(m, 1.5, -0.5, X) / D ** (m + 2)
    return (first - second) / math.pi ** (2 * m + 3)


def rep_even(m: int, nu1: complex, nu2: complex) -> complex:
    """Kernel of D_{2m}^{2,2} on the slice via P_m^{(3/2,-1/2)} and P_{m-1}^{(3/2,1/2)}."""
    if m < 1:
        raise ValueError("m must be >= 1")
    _check_bidisk(nu1, nu2)
    arg = DiagArg(complex(nu1), complex(nu2), m)
    X = arg.jacobi_arg
    D = arg.denominator_base
    bracket = 2 * jacobi_p(m, 1.5, -0.5, X) - (2 - arg.nu1 - arg.nu2) * jacobi_p(m - 1, 1.5, 0.5, X)
    pref = math.gamma(3 + 2 * m) * math.factorial(m) / (6 * pochhammer(2.5, m - 1))
    return pref * bracket / (math.pi ** (2 * m + 2) * D ** (m + 2))


def rep_parity(n: int, nu1: complex, nu2: complex) -> complex:
    """``rep_odd`` or ``rep_even`` according to the parity of n."""
    if n % 2:
        return rep_odd((n - 1) // 2, nu1, nu2)
    return rep_even(n // 2, nu1, nu2)


def rep_diagonal(n: int, nu: complex) -> complex:
    """Gamma(3+n) (3 + n nu) / (6 pi^{n+2} (1-nu)^{4+n})."""
    if n < 1:
        raise ValueError("n must be >= 1")
    _check_bidisk(nu)
    nu = complex(nu)
    return math.gamma(3 + n) * (3 + n * nu) / (6 * math.pi ** (n + 2) * (1 - nu) ** (4 + n))


def rep_appell(n: int, nu1: complex, nu2: complex, cfg: SeriesConfig = DEFAULT_SERIES) -> complex:
    """Gamma(3+n)/(2 pi^{n+2}) F1(3+n; 2, 2; 3; nu1, nu2)."""
    _check_bidisk(nu1, nu2)
    return math.gamma(3 + n) / (2 * math.pi ** (n + 2)) * appell_f1(3 + n, 2, 2, 3, nu1, nu2, cfg)


def f1_identity_residual(n: int, x: complex, y: complex, cfg: SeriesConfig = DEFAULT_SERIES) -> float:
    """Relative gap between Gamma(3+n)/2 F1(3+n;2,2;3;x,y) and L_n^{2,2}(x,y)."""
    _check_bidisk(x, y)
    lhs = math.gamma(3 + n) / 2 * appell_f1(3 + n, 2, 2, 3, x, y, cfg)
    rhs = ratfun_eval(build_L(n, 2, 2), x, y)
    scale = max(abs(lhs), abs(rhs))
    return abs(lhs - rhs) / scale if scale else 0.0


def f1_diagonal_residual(n: int, x: complex, cfg: SeriesConfig = DEFAULT_SERIES) -> float:
    """On x = y: relative gap between Gamma(3+n)/2 2F1(3+n, 4; 3; x) and L_n^{2,2}(x, x)."""
    _check_bidisk(x)
    lhs = math.gamma(3 + n) / 2 * gauss_2f1(3 + n, 4, 3, x, cfg)
    rhs = ratfun_eval(build_L(n, 2, 2), x, x)
    scale = max(abs(lhs), abs(rhs))
    return abs(lhs - rhs) / scale if scale else 0.0
