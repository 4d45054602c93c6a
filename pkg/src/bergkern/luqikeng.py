"""Zero detection for the kernels of D_3^{r,r} and D_n^{2,2}.

The polynomial G(x, y) = r^3 (1-x)^5 (1-y)^5 L_3^{r,r}(x, y) / 2 is restricted
to the circle family x = e^{i eta}; d(z) = z^3 G(e^{i eta}, 1/z) is a cubic
whose Schur-Cohn matrix M(e^{i eta}) has a determinant that must become
negative for some eta. The sign change rules out the stability of
G(eps x, eps y) and forces a zero of the kernel.

``det_M`` evaluates the 3x3 determinant in double precision and escalates to
mpmath when a rounding bound says the double result cannot be trusted; near
eta = 0 the determinant carries a sin^12(eta/2) factor and cancels heavily.
"""
from __future__ import annotations

import cmath
import math
import os
import random
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import mpmath

from .bergman import DomainPoint, KernelParams, build_L
from .errors import DomainError, NumericalError
from .exactpoly import BiPoly, RatLike, as_rat, poly_eval
from .specfun import principal_power

DEGREE = 3
CLOSED_FORM_CONSTANT = 130459631616


# G(x, y)

def build_G(r: RatLike) -> BiPoly:
    """G from the exact L_3^{r,r}: r^3 (1-x)^5 (1-y)^5 L_3 / 2."""
    r = as_rat(r)
    if r <= 0:
        raise ValueError("r must be positive")
    L3 = build_L(3, r, r)
    if (L3.pow_x, L3.pow_y) != (5, 5):
        raise NumericalError(f"L_3 has denominator powers {(L3.pow_x, L3.pow_y)}, expected (5, 5)")
    return L3.numerator * (r**3 / (2 * L3.scale))


def G_expansion(r: RatLike) -> BiPoly:
    """G assembled from its expanded four-part form."""
    r = as_rat(r)
    x, y = BiPoly.x(), BiPoly.y()
    omx, omy, omxy = 1 - x, 1 - y, 1 - x * y
    return (
        omx**3 * omy**3 * (3 * r**3)
        + omx**2 * omy**2 * omxy * (22 * r**2)
        + omx * omy * (x * (2 * x + 1) * y**2 + (x - 8) * x * y + x + y + 2) * (24 * r)
        + omxy * (x**2 * y * (4 * y + 7) + x**2 + y**2 + x * y * (7 * y - 38) + 7 * x + 7 * y + 4) * 8
    )


# d(z) = z^3 G(e^{i eta}, 1/z)

def _d_values(r, t):
    """(d0, d1, d2, d3) as polynomials in t = e^{i eta}; works for complex or mpc."""
    tm1 = t - 1
    d0 = 3 * r**3 * tm1**3 - 22 * r**2 * tm1**2 * t + 24 * r * t * (-1 - t + 2 * t**2) - 8 * t * (1 + 7 * t + 4 * t**2)
    d1 = (8 - 9 * r**3 * tm1**3 + 336 * t**2 - 56 * t**3 + 22 * r**2 * tm1**2 * (1 + 2 * t)
          - 24 * r * (1 - 10 * t + 8 * t**2 + t**3))
    d2 = (9 * r**3 * tm1**3 - 22 * r**2 * (2 - 3 * t + t**3) - 8 * (-7 + 42 * t + t**3)
          - 24 * r * (1 + 8 * t - 10 * t**2 + t**3))
    d3 = 22 * r**2 * tm1**2 - 3 * r**3 * tm1**3 - 24 * r * (-2 + t + t**2) + 8 * (4 + 7 * t + t**2)
    return d0, d1, d2, d3


@dataclass(frozen=True)
class DCoeffs:
    d0: complex
    d1: complex
    d2: complex
    d3: complex
    r: float
    eta: float

    @property
    def coeffs(self) -> tuple:
        return (self.d0, self.d1, self.d2, self.d3)

    def __call__(self, z: complex) -> complex:
        return ((self.d3 * z + self.d2) * z + self.d1) * z + self.d0

    def verify(self, rtol: float = 1e-10, seed: int = 0) -> float:
        """Compare d(z) with z^3 G(e^{i eta}, 1/z) at 3 random z; returns worst relative gap."""
        G = build_G(as_rat(self.r))
        t = cmath.exp(1j * self.eta)
        rng = random.Random(seed)
        worst = 0.0
        for _ in range(3):
            z = cmath.rect(rng.uniform(0.5, 2.0), rng.uniform(0, 2 * math.pi))
            ref = z**3 * poly_eval(G, t, 1 / z)
            got = self(z)
            worst = max(worst, abs(got - ref) / max(abs(ref), 1e-300))
        if worst > rtol:
            raise NumericalError(f"d(z) disagrees with z^3 G(e^(i eta), 1/z): rel gap {worst:.3e}")
        return worst


def d_coefficients(r: float, eta: float, verify: bool = False) -> DCoeffs:
    """Coefficients of d(z) = d3 z^3 + d2 z^2 + d1 z + d0 at t = e^{i eta}."""
    if not r > 0:
        raise ValueError("r must be positive")
    out = DCoeffs(*_d_values(float(r), cmath.exp(1j * eta)), r=float(r), eta=float(eta))
    if verify:
        out.verify()
    return out


def d_from_G(G: BiPoly, eta: float) -> tuple[complex, complex, complex, complex]:
    """(d0, .., d3) read off z^3 G(t, 1/z): d_i is the coefficient of y^{3-i} at x = t."""
    if G.degree_y > DEGREE:
        raise ValueError("G has degree > 3 in y")
    t = cmath.exp(1j * eta)
    cols = [0j] * (DEGREE + 1)
    for (i, j), c in G.terms:
        cols[j] += float(c) * t**i
    return tuple(cols[DEGREE - k] for k in range(DEGREE + 1))


# Schur-Cohn matrix

@dataclass(frozen=True)
class SchurCohnMatrix:
    entries: tuple[tuple, ...]

    def is_hermitian(self, rtol: float = 1e-10) -> bool:
        m = len(self.entries)
        scale = max(abs(v) for row in self.entries for v in row) or 1.0
        return all(
            abs(self.entries[j][k] - self.entries[k][j].conjugate()) <= rtol * scale
            for j in range(m) for k in range(m)
        )

    def det(self):
        return _det3(self.entries)


def _schur_cohn_entries(d: Sequence, with_bound: bool = False):
    """d_{jk} = sum_{l=1}^{j} (d_{m-j+l} conj(d_{m-k+l}) - conj(d_{j-l}) d_{k-l}), j <= k."""
    m = len(d) - 1
    M = [[None] * m for _ in range(m)]
    B = [[0.0] * m for _ in range(m)]
    for j in range(1, m + 1):
        for k in range(j, m + 1):
            s = 0
            bound = 0.0
            for l in range(1, j + 1):
                u = d[m - j + l] * d[m - k + l].conjugate()
                v = d[j - l].conjugate() * d[k - l]
                s += u - v
                if with_bound:
                    bound += abs(u) + abs(v)
            M[j - 1][k - 1] = s
            M[k - 1][j - 1] = s.conjugate()
            B[j - 1][k - 1] = B[k - 1][j - 1] = bound
    return M, B


def schur_cohn(d: DCoeffs | Sequence) -> SchurCohnMatrix:
    coeffs = d.coeffs if isinstance(d, DCoeffs) else tuple(complex(v) for v in d)
    M, _ = _schur_cohn_entries(coeffs)
    return SchurCohnMatrix(tuple(tuple(row) for row in M))


def _det3(a):
    return (
        a[0][0] * (a[1][1] * a[2][2] - a[1][2] * a[2][1])
        - a[0][1] * (a[1][0] * a[2][2] - a[1][2] * a[2][0])
        + a[0][2] * (a[1][0] * a[2][1] - a[1][1] * a[2][0])
    )


def _perm3(a) -> float:
    return (
        a[0][0] * (a[1][1] * a[2][2] + a[1][2] * a[2][1])
        + a[0][1] * (a[1][0] * a[2][2] + a[1][2] * a[2][0])
        + a[0][2] * (a[1][0] * a[2][1] + a[1][1] * a[2][0])
    )


_SAFETY = 1e6
_MP_PRECISIONS = (128, 256, 512, 1024, 2048, 4096)


def _det_double(r: float, eta: float):
    d = _d_values(r, cmath.exp(1j * eta))
    M, B = _schur_cohn_entries(d, with_bound=True)
    det = _det3(M)
    return det, _SAFETY * 2.0**-53 * _perm3(B)


def _det_mp(r: float, eta: float, prec: int):
    with mpmath.workprec(prec):
        t = mpmath.expj(mpmath.mpf(eta))
        d = _d_values(mpmath.mpf(r), t)
        M, _ = _schur_cohn_entries(d)
        det = _det3(M)
        return complex(det.real, det.imag) if det != 0 else 0j


def _real_part_checked(det: complex) -> float:
    if abs(det.imag) > 1e-8 * abs(det):
        raise NumericalError(f"Schur-Cohn determinant not real: {det}")
    return det.real


def det_M(r: float, eta: float) -> float:
    """det of the Schur-Cohn matrix of d(z) at t = e^{i eta}.

    The double-precision result is returned when it clears a rounding bound
    (safety factor times unit roundoff times the permanent of the entry
    magnitude matrix); otherwise precision doubles until two consecutive
    mpmath results agree to 1e-12.
    """
    if not r > 0:
        raise ValueError("r must be positive")
    r, eta = float(r), float(eta)
    det, bound = _det_double(r, eta)
    if abs(det) > bound:
        return _real_part_checked(det)
    prev = _det_mp(r, eta, _MP_PRECISIONS[0])
    for prec in _MP_PRECISIONS[1:]:
        cur = _det_mp(r, eta, prec)
        if cur == prev or abs(cur - prev) <= 1e-12 * abs(cur):
            return _real_part_checked(cur)
        prev = cur
    raise NumericalError(f"det M did not stabilise up to {_MP_PRECISIONS[-1]} bits (r={r}, eta={eta})")


@dataclass(frozen=True)
class GnCoefficients:
    """g_0..g_3 as coefficient tuples indexed by the power of r."""

    g0: tuple[Fraction, ...]
    g1: tuple[Fraction, ...]
    g2: tuple[Fraction, ...]
    g3: tuple[Fraction, ...]

    @classmethod
    def closed_form(cls) -> GnCoefficients:
        F = Fraction
        return cls(
            (F(26624), F(0), F(-24672), F(0), F(15724), F(0), F(-2430)),
            (F(12288), F(0), F(22496), F(0), F(-20822), F(0), F(3645)),
            (F(-512), F(0), F(2208), F(0), F(5012), F(0), F(-1458)),
            (F(0), F(0), F(-32), F(0), F(86), F(0), F(243)),
        )

    @property
    def polys(self):
        return (self.g0, self.g1, self.g2, self.g3)

    def sum(self) -> tuple[Fraction, ...]:
        """Exact coefficient-wise sum, trailing zeros trimmed."""
        width = max(len(p) for p in self.polys)
        out = [sum((p[k] for p in self.polys if k < len(p)), Fraction(0)) for k in range(width)]
        while len(out) > 1 and out[-1] == 0:
            out.pop()
        return tuple(out)

    def evaluate(self, index: int, r):
        return sum(c * r**k for k, c in enumerate(self.polys[index]))


def gn_sum_check(gn: GnCoefficients | None = None) -> Fraction:
    """The constant g0 + g1 + g2 + g3; raises if the sum depends on r."""
    total = (gn or GnCoefficients.closed_form()).sum()
    if len(total) != 1:
        raise NumericalError(f"g_0+g_1+g_2+g_3 is not constant: coefficients {total}")
    return total[0]


def det_M_closed(r: float, eta: float, gn: GnCoefficients | None = None) -> float:
    """-130459631616 r^3 sin^12(eta/2) sum_n g_n(r) cos(n eta), in 128-bit arithmetic."""
    gn = gn or GnCoefficients.closed_form()
    with mpmath.workprec(128):
        R, E = mpmath.mpf(r), mpmath.mpf(eta)
        s = sum(gn.evaluate(k, R) * mpmath.cos(k * E) for k in range(4))
        return float(-CLOSED_FORM_CONSTANT * R**3 * mpmath.sin(E / 2) ** 12 * s)


# scans

@dataclass(frozen=True)
class ScanReport:
    r: float
    grid_size: int
    min_det: float
    argmin_eta: float
    witness_found: bool


def resolve_workers(workers: int | None = None) -> int:
    """Worker count: explicit argument, else BERGKERN_THREADS (0/unset = auto)."""
    if workers is None:
        raw = os.environ.get("BERGKERN_THREADS", "").strip()
        workers = int(raw) if raw else 0
    if workers < 0:
        raise ValueError("worker count must be >= 0")
    return workers or (os.cpu_count() or 1)


def _det_row(args):
    r, etas = args
    return [det_M(r, e) for e in etas]


def eta_grid(grid_size: int) -> list[float]:
    return [2 * math.pi * k / grid_size for k in range(grid_size)]


def det_scan(r: float, grid_size: int, workers: int | None = None) -> tuple[list[float], list[float]]:
    """(etas, dets) on the uniform grid of [0, 2 pi); order matches the grid."""
    etas = eta_grid(grid_size)
    workers = min(resolve_workers(workers), max(1, grid_size // 256))
    if workers <= 1:
        return etas, [det_M(r, e) for e in etas]
    size = -(-grid_size // workers)
    chunks = [(r, etas[i:i + size]) for i in range(0, grid_size, size)]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        rows = list(pool.map(_det_row, chunks))
    return etas, [v for row in rows for v in row]


def lqk_scan(r: float, grid_size: int = 4096, workers: int | None = None) -> ScanReport:
    """Minimum of det M over the eta grid; a negative minimum is a witness."""
    if grid_size < 16:
        raise ValueError("grid_size must be >= 16")
    if not r > 0:
        raise ValueError("r must be positive")
    etas, dets = det_scan(r, grid_size, workers)
    k = min(range(grid_size), key=lambda i: (dets[i], i))
    return ScanReport(float(r), grid_size, dets[k], etas[k], dets[k] < 0)


# interior witnesses and the slice reduction

def diagonal_zero_witness(n: int) -> tuple[DomainPoint, DomainPoint]:
    """(0, i sqrt(3/n), i sqrt(3/n)) and (0, -i sqrt(3/n), -i sqrt(3/n)) in D_n^{2,2}."""
    if n < 4:
        raise DomainError(f"the witness lies in the open domain only for n >= 4, got n = {n}")
    s = math.sqrt(3 / n)
    zero = (0j,) * n
    p, p2 = DomainPoint(zero, 1j * s, 1j * s), DomainPoint(zero, -1j * s, -1j * s)
    params = KernelParams(n, 2, 2)
    if not (p.in_domain(params) and p2.in_domain(params)):
        raise DomainError("witness points fail membership")
    return p, p2


def _inner(z: Sequence[complex], a: Sequence[complex]) -> complex:
    return sum((zi * ai.conjugate() for zi, ai in zip(z, a)), 0j)


def psi(a: Sequence[complex], z: Sequence[complex]) -> tuple[complex, ...]:
    """Ball automorphism exchanging a and 0 (up to sign)."""
    a = tuple(complex(v) for v in a)
    z = tuple(complex(v) for v in z)
    na = _inner(a, a).real
    if na >= 1:
        raise DomainError("a must lie in the open unit ball")
    c = math.sqrt(1 - na)
    za = _inner(z, a)
    lead = za / (1 + c) - 1
    den = 1 - za
    return tuple((lead * ai + zi * c) / den for ai, zi in zip(a, z))


def automorphism(params: KernelParams, a: Sequence[complex], p: DomainPoint) -> DomainPoint:
    """The automorphism of D_n^{q,r} built on psi_a."""
    if len(a) != params.n:
        raise ValueError("a must have n components")
    if not p.in_domain(params):
        raise DomainError(f"point {p} is not in the domain")
    na = _inner(a, a).real
    za = _inner(p.z, a)
    q, r = float(params.q), float(params.r)
    w1 = (1 - na) ** (1 / q) / principal_power(1 - za, 2 / q) * p.w1
    w2 = (1 - na) ** (1 / r) / principal_power(1 - za, 2 / r) * p.w2
    return DomainPoint(psi(a, p.z), w1, w2)


def reduce_to_slice(params: KernelParams, p: DomainPoint) -> DomainPoint:
    """Map p to a point of the form (0, w1', w2') by the automorphism at a = p.z."""
    out = automorphism(params, p.z, p)
    # psi_a(a) = 0 analytically; clear rounding residue
    return DomainPoint((0j,) * params.n, out.w1, out.w2)
