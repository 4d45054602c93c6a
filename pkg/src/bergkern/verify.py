"""Self-check suites run by ``bergkern verify``.

Each suite returns a list of :class:`Check`; sizes are kept small so that
``verify --suite all`` finishes in seconds. The pytest suite carries the
full-size versions.
"""
from __future__ import annotations

import math
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable

from . import bergman, jacobirep, luqikeng, omega, oracle, specfun


@dataclass(frozen=True)
class Check:
    name: str
    passed: bool
    detail: str = ""


def _rel(a, b) -> float:
    scale = max(abs(a), abs(b))
    return abs(a - b) / scale if scale else 0.0


def _disk(rng: random.Random, radius: float) -> complex:
    rho = radius * math.sqrt(rng.random())
    theta = 2 * math.pi * rng.random()
    return rho * complex(math.cos(theta), math.sin(theta))


def taylor_oracle(n: int, q, r, g1: int, g2: int) -> Fraction:
    """(g1+1)(g2+1) prod_{k=1}^n (A+k), A = (2g1+2)/q + (2g2+2)/r."""
    A = Fraction(2 * g1 + 2) / Fraction(q) + Fraction(2 * g2 + 2) / Fraction(r)
    out = Fraction((g1 + 1) * (g2 + 1))
    for k in range(1, n + 1):
        out *= A + k
    return out


def suite_series() -> list[Check]:
    out = []
    for n in (1, 2, 3, 4):
        for q, r in ((2, 2), (2, 4), (3, 3), (1, 2)):
            coeffs = bergman.build_L(n, q, r).taylor_coefficients(6)
            bad = [(i, j) for i in range(7) for j in range(7 - i)
                   if coeffs.get((i, j), 0) != taylor_oracle(n, q, r, i, j)]
            out.append(Check(f"taylor n={n} q={q} r={r}", not bad, f"mismatches: {bad[:3]}"))
    worst = 0.0
    for n in range(1, 5):
        for x, y in ((0.3, -0.4j), (-0.25 + 0.1j, 0.45)):
            worst = max(worst, _rel(bergman.l_series(n, 3, Fraction(7, 2), x, y),
                                    bergman.build_L(n, 3, Fraction(7, 2))(x, y)))
    out.append(Check("l_series vs build_L", worst <= 1e-10, f"worst rel {worst:.2e}"))
    rng = random.Random(7)
    worst = 0.0
    for _ in range(10):
        a, b, b2 = rng.uniform(0.5, 3), rng.uniform(0.5, 2), rng.uniform(0.5, 2)
        x, y = _disk(rng, 0.4), _disk(rng, 0.4)
        lhs = specfun.appell_f1(a, b, b2, b + b2, x, y)
        rhs = (1 - y) ** (-a) * specfun.gauss_2f1(a, b, b + b2, (x - y) / (1 - y))
        worst = max(worst, _rel(lhs, rhs))
    out.append(Check("F1 reduction to 2F1 (c = b + b')", worst <= 1e-12, f"worst rel {worst:.2e}"))
    worst = 0.0
    for _ in range(10):
        a, b, b2, c = rng.uniform(0.5, 5), rng.uniform(0.5, 3), rng.uniform(0.5, 3), rng.uniform(0.5, 4)
        x, y = _disk(rng, 0.5), _disk(rng, 0.5)
        worst = max(worst, _rel(specfun.appell_f1(a, b, b2, c, x, y), specfun.appell_f1(a, b2, b, c, y, x)))
    out.append(Check("F1 symmetry", worst <= 1e-12, f"worst rel {worst:.2e}"))
    worst = 0.0
    for _ in range(10):
        b, c, z = rng.uniform(-3, 3), rng.uniform(0.5, 4), complex(rng.uniform(-2, 2), rng.uniform(-2, 2))
        direct = 1 - 2 * b * z / c + b * (b + 1) * z * z / (c * (c + 1))
        worst = max(worst, abs(specfun.gauss_2f1(-2, b, c, z) - direct) / max(1.0, abs(direct)))
    out.append(Check("2F1 terminating case", worst <= 1e-14, f"worst {worst:.2e}"))
    return out


def suite_norms() -> list[Check]:
    out = []
    worst = 0.0
    for n in range(1, 5):
        for q in (2, 3, Fraction(7, 2)):
            for r in (2, 3, Fraction(7, 2)):
                p = bergman.KernelParams(n, q, r)
                o = bergman.DomainPoint.origin(n)
                prod = bergman.kernel_D(p, o, o) * bergman.monomial_norm_D(p, bergman.MultiIndex.zero(n))
                worst = max(worst, abs(prod - 1))
    out.append(Check("volume reciprocity D_n", worst <= 1e-12, f"worst {worst:.2e}"))
    worst = 0.0
    idxs = [bergman.MultiIndex((0,), 0, 0), bergman.MultiIndex((1, 2), 3, 0), bergman.MultiIndex((2, 0, 1), 1, 2)]
    for idx in idxs:
        p = bergman.KernelParams(len(idx.alpha), 3, Fraction(7, 2))
        worst = max(worst, _rel(oracle.radial_norm_quadrature(p, idx), bergman.monomial_norm_D(p, idx)))
    out.append(Check("radial quadrature", worst <= 1e-10, f"worst rel {worst:.2e}"))
    p = bergman.KernelParams(1, 2, 2)
    idx = bergman.MultiIndex.zero(1)
    est = oracle.mc_norm(oracle.DnQR(p), idx, oracle.McConfig(200_000, seed=11))
    ref = bergman.monomial_norm_D(p, idx)
    out.append(Check("monte carlo D_1^{2,2} volume", est.within(ref),
                     f"{est.mean:.6g} +- {est.std_error:.2g} vs {ref:.6g}"))
    return out


def suite_jacobi() -> list[Check]:
    out = []
    rng = random.Random(3)
    worst = 0.0
    for _ in range(8):
        nu1, nu2 = _disk(rng, 0.6), _disk(rng, 0.6)
        for n in range(1, 7):
            ref = jacobirep.rep_appell(n, nu1, nu2)
            for val in (jacobirep.rep_finite_sum(n, nu1, nu2), jacobirep.rep_parity(n, nu1, nu2)):
                worst = max(worst, _rel(val, ref))
    out.append(Check("representation concordance", worst <= 1e-9, f"worst rel {worst:.2e}"))
    worst = 0.0
    for d in range(11):
        z = rng.uniform(-1, 1)
        lhs = specfun.jacobi_p(d, 1.5, -0.5, -z)
        rhs = (-1) ** d * specfun.jacobi_p(d, -0.5, 1.5, z)
        worst = max(worst, abs(lhs - rhs) / max(1.0, abs(lhs)))
    out.append(Check("jacobi reflection", worst <= 1e-12, f"worst {worst:.2e}"))
    worst = 0.0
    for d in range(11):
        z = complex(rng.uniform(-1, 1), rng.uniform(-0.3, 0.3))
        a, b = specfun.jacobi_p(d, 1.5, 0.5, z), specfun.jacobi_p_recurrence(d, 1.5, 0.5, z)
        worst = max(worst, abs(a - b) / max(1.0, abs(a)))
    out.append(Check("jacobi sum vs recurrence", worst <= 1e-11, f"worst {worst:.2e}"))
    bad = [n for n in (4, 5, 10) if abs(jacobirep.rep_diagonal(n, -3 / n)) > 1e-14 * abs(jacobirep.rep_diagonal(n, 0))]
    out.append(Check("diagonal zero at nu = -3/n", not bad, f"failing n: {bad}"))
    return out


def _interior(rng: random.Random, params: bergman.KernelParams, shrink: float) -> bergman.DomainPoint:
    s = shrink * rng.random()
    z = [_disk(rng, 1.0) for _ in range(params.n)]
    norm = math.sqrt(sum(abs(v) ** 2 for v in z)) or 1.0
    z = [v * math.sqrt(s) / norm for v in z]
    w1 = shrink * (1 - s) ** (1 / float(params.q)) * _disk(rng, 1.0)
    w2 = shrink * (1 - s) ** (1 / float(params.r)) * _disk(rng, 1.0)
    return bergman.DomainPoint(z, w1, w2)


def suite_deflation() -> list[Check]:
    rng = random.Random(5)
    worst = 0.0
    for _ in range(6):
        nu1, nu2 = _disk(rng, 0.6), _disk(rng, 0.6)
        for n in range(1, 6):
            for q, r in ((2, 2), (2, 4), (3, 5)):
                lhs, rhs = bergman.deflation_sides(n, q, r, nu1, nu2)
                worst = max(worst, abs(lhs - rhs) / (abs(lhs) + abs(rhs)))
    out = [Check("deflation identity", worst <= 1e-12, f"worst rel {worst:.2e}")]
    herm = pos = 0.0
    for n, q, r in ((1, 2, 2), (2, 3, Fraction(7, 2)), (3, Fraction(1, 2), 5)):
        params = bergman.KernelParams(n, q, r)
        for _ in range(5):
            p, p2 = _interior(rng, params, 0.95), _interior(rng, params, 0.95)
            herm = max(herm, _rel(bergman.kernel_D(params, p, p2), bergman.kernel_D(params, p2, p).conjugate()))
            kd = bergman.kernel_D(params, p, p)
            pos = max(pos, abs(kd.imag) / kd.real if kd.real > 0 else math.inf)
    out.append(Check("kernel Hermitian symmetry", herm <= 1e-12, f"worst rel {herm:.2e}"))
    out.append(Check("kernel diagonal positivity", pos <= 1e-12, f"worst imag/real {pos:.2e}"))
    # z-direction against the monomial series: sum_k tau^k / ||z^k||^2
    params = bergman.KernelParams(1, 3, Fraction(7, 2))
    p, p2 = bergman.DomainPoint((0.4 + 0.1j,)), bergman.DomainPoint((0.3 - 0.2j,))
    tau = p.z[0] * p2.z[0].conjugate()
    series = sum(tau**k / bergman.monomial_norm_D(params, bergman.MultiIndex((k,), 0, 0)) for k in range(120))
    err = _rel(bergman.kernel_D(params, p, p2), series)
    out.append(Check("kernel vs monomial series in z", err <= 1e-12, f"rel {err:.2e}"))
    return out


def suite_schur() -> list[Check]:
    out = [Check("g_n sum is 38400", luqikeng.gn_sum_check() == 38400)]
    bad = [r for r in (Fraction(1, 2), 1, 2, Fraction(7, 3)) if luqikeng.build_G(r) != luqikeng.G_expansion(r)]
    out.append(Check("G from L_3 equals expanded G", not bad, f"failing r: {bad}"))
    worst = 0.0
    for r in (0.5, 2, 7):
        for eta in luqikeng.eta_grid(64):
            a, b = luqikeng.det_M(r, eta), luqikeng.det_M_closed(r, eta)
            worst = max(worst, _rel(a, b))
    out.append(Check("det M matrix vs closed form", worst <= 1e-6, f"worst rel {worst:.2e}"))
    try:
        luqikeng.d_coefficients(2.0, 1.1, verify=True)
        out.append(Check("d(z) reconstruction", True))
    except Exception as exc:  # reported, not raised
        out.append(Check("d(z) reconstruction", False, str(exc)))
    bad = [r for r in (0.1, 2, 10) if not luqikeng.lqk_scan(r, 1024, workers=1).witness_found]
    out.append(Check("negative det M found", not bad, f"failing r: {bad}"))
    rng = random.Random(13)
    params = bergman.KernelParams(2, 3, Fraction(7, 2))
    bad = 0
    for _ in range(500):
        red = luqikeng.reduce_to_slice(params, _interior(rng, params, 0.999))
        bad += not red.in_domain(params)
    out.append(Check("slice reduction keeps membership", bad == 0, f"{bad} of 500 left the domain"))
    return out


def suite_omega() -> list[Check]:
    out = []
    rng = random.Random(9)
    worst = 0.0
    for n in (1, 2, 3):
        for r in (1.0, 2.0, 3.5):
            p = omega.OmegaParams(n, r)
            nu = [_disk(rng, 0.5) for _ in range(n)]
            worst = max(worst, _rel(omega.kernel_omega(p, nu), omega.omega_series(p, nu)))
    out.append(Check("closed form vs series", worst <= 1e-10, f"worst rel {worst:.2e}"))
    worst = 0.0
    for n in range(1, 5):
        for r in (1.0, 2.0, 3.5):
            p = omega.OmegaParams(n, r)
            worst = max(worst, abs(omega.kernel_omega(p, [0] * n) * omega.norm_omega(p, omega.OmegaMultiIndex.zero(n)) - 1))
    out.append(Check("volume reciprocity", worst <= 1e-12, f"worst {worst:.2e}"))
    reports = [omega.omega_zero_free_check(omega.OmegaParams(n, r), 10_000, seed=n) for n in (1, 3, 6) for r in (0.5, 4.0)]
    out.append(Check("zero-free sampled minimum", all(rep.passed for rep in reports),
                     f"min value {min(rep.min_value for rep in reports):.4g}"))
    return out


SUITES: dict[str, Callable[[], list[Check]]] = {
    "series": suite_series,
    "norms": suite_norms,
    "jacobi": suite_jacobi,
    "deflation": suite_deflation,
    "schur": suite_schur,
    "omega": suite_omega,
}


def run_suites(names: list[str]) -> dict[str, list[Check]]:
    return {name: SUITES[name]() for name in names}
