import cmath
import itertools
import math
import random
from concurrent.futures import ThreadPoolExecutor
from fractions import Fraction

import mpmath
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bergkern import bergman
from bergkern.bergman import DomainPoint, KernelArguments, KernelParams, MultiIndex
from bergkern.errors import DomainError
from bergkern.oracle import radial_norm_quadrature


def rel(a, b):
    scale = max(abs(a), abs(b))
    return abs(a - b) / scale if scale else 0.0


def disk(rng, radius):
    return cmath.rect(radius * math.sqrt(rng.random()), 2 * math.pi * rng.random())


def interior_point(rng, params: KernelParams, shrink=0.95) -> DomainPoint:
    n = params.n
    z = [complex(rng.gauss(0, 1), rng.gauss(0, 1)) for _ in range(n)]
    norm = math.sqrt(sum(abs(v) ** 2 for v in z))
    s = shrink * rng.random()
    z = [v * math.sqrt(s) / norm for v in z]
    room = 1 - s
    w1 = cmath.rect(shrink * rng.random() * room ** (1 / float(params.q)), rng.uniform(0, 2 * math.pi))
    w2 = cmath.rect(shrink * rng.random() * room ** (1 / float(params.r)), rng.uniform(0, 2 * math.pi))
    p = DomainPoint(z, w1, w2)
    assert p.in_domain(params)
    return p


def mp_norm_D(n, q, r, alpha, g1, g2):
    q, r = mpmath.mpf(Fraction(q).numerator) / Fraction(q).denominator, mpmath.mpf(Fraction(r).numerator) / Fraction(r).denominator
    A = (2 * g1 + 2) / q + (2 * g2 + 2) / r
    num = mpmath.pi ** (n + 2) * mpmath.gamma(A + 1) * mpmath.fprod(mpmath.gamma(a + 1) for a in alpha)
    return num / ((g1 + 1) * (g2 + 1) * mpmath.gamma(A + sum(alpha) + n + 1))


class TestTypes:
    def test_params_validation(self):
        with pytest.raises(ValueError):
            KernelParams(0, 2, 2)
        with pytest.raises(ValueError):
            KernelParams(1, 0, 2)
        assert KernelParams(1, "7/2", 2.0).q == Fraction(7, 2)
        assert KernelParams(2, 2, 4).kernel_exponent == 4.5

    def test_multi_index(self):
        with pytest.raises(ValueError):
            MultiIndex((1, -1), 0, 0)
        assert MultiIndex((1, 2, 3), 1, 0).abs_alpha == 6
        assert MultiIndex(4).alpha == (4,)

    def test_membership_is_strict(self):
        p = KernelParams(1, 2, 2)
        assert DomainPoint((0.6,), 0.8, 0).in_domain(p) is False
        assert DomainPoint((0.6,), 0.79, 0.79).in_domain(p)
        assert not DomainPoint((0, 0), 0, 0).in_domain(p)

    def test_kernel_arguments(self):
        params = KernelParams(1, 2, 4)
        p, p2 = DomainPoint((0.3j,), 0.2, 0.1j), DomainPoint((0.1,), 0.5j, 0.4)
        args = KernelArguments.from_points(params, p, p2)
        tau = 0.3j * 0.1
        assert args.tau == pytest.approx(tau)
        assert args.a == pytest.approx(0.2 * -0.5j / (1 - tau))
        assert args.b == pytest.approx(0.1j * 0.4 / (1 - tau) ** 0.5)


class TestNorms:
    def test_examples(self):
        one = KernelParams(1, 2, 2)
        assert bergman.monomial_norm_D(one, MultiIndex.zero(1)) == pytest.approx(math.pi**3 / 3, rel=1e-14)
        assert bergman.monomial_norm_D(one, MultiIndex((1,), 0, 0)) == pytest.approx(math.pi**3 / 12, rel=1e-14)

    def test_dinv_zero_index_value(self):
        # 2 pi^3 Gamma(3) Gamma(2) / Gamma(5) = pi^3 / 6
        val = bergman.monomial_norm_Dinv(2, 2, 2, MultiIndex((0,), 0, 0))
        assert val == pytest.approx(math.pi**3 / 6, rel=1e-14)

    def test_dinv_reduces_for_n1(self):
        for idx in [MultiIndex((2,), 1, 0), MultiIndex((0,), 3, 2)]:
            a = bergman.monomial_norm_Dinv(1, 3, Fraction(7, 2), idx)
            b = bergman.monomial_norm_D(KernelParams(1, 3, Fraction(7, 2)), idx)
            assert rel(a, b) <= 1e-14

    def test_dinv_against_mpmath(self):
        for n, q, r, a, g1, g2 in [(2, 2, 3, 1, 0, 2), (3, Fraction(7, 2), 1, 2, 1, 1), (4, 2, 2, 0, 3, 0)]:
            qm, rm = mpmath.mpf(float(q)), mpmath.mpf(float(r))
            A = (2 * g1 + 2) / qm + (2 * g2 + 2) / rm
            ref = n * mpmath.pi**3 * mpmath.gamma(A + 1) * mpmath.gamma(n * a + n) / (
                (g1 + 1) * (g2 + 1) * mpmath.gamma(A + n * a + n + 1))
            assert rel(bergman.monomial_norm_Dinv(n, q, r, MultiIndex((a,), g1, g2)), float(ref)) <= 1e-13

    def test_swap_symmetry(self):
        idx, sw = MultiIndex((1, 2), 3, 1), MultiIndex((1, 2), 1, 3)
        a = bergman.monomial_norm_D(KernelParams(2, 3, Fraction(7, 2)), idx)
        b = bergman.monomial_norm_D(KernelParams(2, Fraction(7, 2), 3), sw)
        assert rel(a, b) <= 1e-14

    def test_dinv_decreasing_in_gamma1(self):
        for n in (1, 2, 3):
            vals = [bergman.monomial_norm_Dinv(n, 2, 3, MultiIndex((1,), g, 0)) for g in range(12)]
            assert all(a > b for a, b in zip(vals, vals[1:]))

    @settings(max_examples=60, deadline=None)
    @given(st.integers(1, 4), st.sampled_from([1, 2, 3, Fraction(7, 2)]), st.sampled_from([1, 2, 4, Fraction(5, 3)]),
           st.lists(st.integers(0, 6), min_size=4, max_size=4), st.integers(0, 6), st.integers(0, 6))
    def test_against_mpmath_and_quadrature(self, n, q, r, alpha, g1, g2):
        idx = MultiIndex(tuple(alpha[:n]), g1, g2)
        params = KernelParams(n, q, r)
        val = bergman.monomial_norm_D(params, idx)
        assert rel(val, float(mp_norm_D(n, q, r, idx.alpha, g1, g2))) <= 1e-12
        assert rel(val, radial_norm_quadrature(params, idx)) <= 1e-10

    def test_large_index_no_overflow(self):
        # Gamma(10001) alone overflows a double; the log-space ratio does not
        val = bergman.monomial_norm_D(KernelParams(1, 2, 2), MultiIndex((10000,), 3, 3))
        assert 0 < val < 1
        assert rel(val, float(mp_norm_D(1, 2, 2, (10000,), 3, 3))) <= 1e-10


class TestBuildL:
    @pytest.mark.parametrize("n", range(1, 7))
    def test_origin_value(self, n):
        assert bergman.build_L(n, 2, 2)(0, 0) == pytest.approx(math.gamma(n + 3) / 2, rel=1e-14)

    def test_cache_shares_results(self):
        assert bergman.build_L(3, 2, 3) is bergman.build_L(3, "2", 3.0)

    def test_cache_thread_safety(self):
        keys = [(n, q, r) for n in range(1, 6) for q in (1, 2, 5) for r in (2, 3)] * 4
        with ThreadPoolExecutor(8) as pool:
            got = list(pool.map(lambda k: bergman.build_L(*k), keys))
        for k, f in zip(keys, got):
            assert f == bergman.build_L(*k)

    def test_rejects_bad_n(self):
        with pytest.raises(ValueError):
            bergman.build_L(0, 2, 2)


class TestLSeries:
    def test_examples(self):
        assert bergman.l_series(1, 2, 2, 0, 0) == pytest.approx(3)
        assert bergman.l_series(1, 2, 4, 0, 0) == pytest.approx(2.5)
        assert rel(bergman.l_series(3, 2, 2, 0.3, -0.4j), bergman.build_L(3, 2, 2)(0.3, -0.4j)) <= 1e-10

    @pytest.mark.parametrize("n", range(1, 6))
    def test_grid(self, n):
        pts = [complex(a, b) for a in (-0.35, 0, 0.35) for b in (-0.35, 0.35)][:5]
        for x, y in itertools.product(pts, repeat=2):
            for q, r in ((2, 2), (3, Fraction(7, 2)), (1, 2)):
                assert rel(bergman.l_series(n, q, r, x, y), bergman.build_L(n, q, r)(x, y)) <= 1e-10

    def test_domain(self):
        with pytest.raises(DomainError):
            bergman.l_series(1, 2, 2, 1.0, 0)


def series_kernel(params: KernelParams, p: DomainPoint, p2: DomainPoint, order=60):
    """Truncated sum of z^k conj(zeta^k) / ||z^k||^2 over monomials; independent of build_L."""
    n = params.n
    tz = [a * b.conjugate() for a, b in zip(p.z, p2.z)]
    nu1, nu2 = p.w1 * p2.w1.conjugate(), p.w2 * p2.w2.conjugate()
    total = 0j
    for alpha in itertools.product(range(order), repeat=n):
        if sum(alpha) >= order:
            continue
        mono_z = math.prod((t**a for t, a in zip(tz, alpha)), start=1 + 0j)
        for g1 in range(order - sum(alpha)):
            for g2 in range(order - sum(alpha) - g1):
                norm = bergman.monomial_norm_D(params, MultiIndex(alpha, g1, g2))
                total += mono_z * nu1**g1 * nu2**g2 / norm
    return total


class TestKernel:
    def test_origin_examples(self):
        for n, val in ((1, 3 / math.pi**3), (2, 12 / math.pi**4)):
            o = DomainPoint.origin(n)
            assert bergman.kernel_D(KernelParams(n, 2, 2), o, o) == pytest.approx(val, rel=1e-14)

    def test_z_block_only(self):
        params = KernelParams(2, 3, Fraction(7, 2))
        p, p2 = DomainPoint((0.3, 0.1j)), DomainPoint((0.2j, -0.4))
        tau = 0.3 * -0.2j + 0.1j * -0.4
        ref = bergman.build_L(2, 3, Fraction(7, 2))(0, 0) * (1 - tau) ** -params.kernel_exponent / math.pi**4
        assert rel(bergman.kernel_D(params, p, p2), ref) <= 1e-14

    @pytest.mark.parametrize("n,q,r", [(1, 2, 2), (1, 3, Fraction(7, 2)), (2, 2, 4), (2, 1, 3)])
    def test_against_monomial_series(self, n, q, r):
        params = KernelParams(n, q, r)
        rng = random.Random(n * 100 + int(q) + int(r))
        for _ in range(3):
            p, p2 = interior_point(rng, params, 0.3), interior_point(rng, params, 0.3)
            assert rel(bergman.kernel_D(params, p, p2), series_kernel(params, p, p2, 40 if n == 2 else 60)) <= 1e-10

    @pytest.mark.parametrize("n,q,r", [(1, 2, 2), (2, 3, Fraction(7, 2)), (3, Fraction(1, 2), 5), (4, 2, 3)])
    def test_hermitian_and_positive(self, n, q, r):
        params = KernelParams(n, q, r)
        rng = random.Random(7 * n)
        for _ in range(20):
            p, p2 = interior_point(rng, params), interior_point(rng, params)
            k12, k21 = bergman.kernel_D(params, p, p2), bergman.kernel_D(params, p2, p)
            assert rel(k12, k21.conjugate()) <= 1e-12
            kd = bergman.kernel_D(params, p, p)
            assert kd.real > 0 and abs(kd.imag) <= 1e-12 * kd.real

    def test_exact_path_agrees(self):
        params = KernelParams(3, 2, 3)
        rng = random.Random(3)
        p, p2 = interior_point(rng, params), interior_point(rng, params)
        assert rel(bergman.kernel_D(params, p, p2), bergman.kernel_D(params, p, p2, exact=True)) <= 1e-11

    def test_rejects_exterior(self):
        params = KernelParams(1, 2, 2)
        with pytest.raises(DomainError):
            bergman.kernel_D(params, DomainPoint((0.9,), 0.5, 0), DomainPoint.origin(1))

    def test_dinv_examples(self):
        assert bergman.kernel_Dinv_origin(2, 2, 2, 0, 0) == pytest.approx(6 / math.pi**3, rel=1e-14)
        assert bergman.kernel_Dinv_origin(3, 2, 2, 0, 0) == pytest.approx(10 / math.pi**3, rel=1e-14)
        with pytest.raises(DomainError):
            bergman.kernel_Dinv_origin(2, 2, 2, 1.0, 0)

    def test_dinv_n1_is_D1(self):
        for nu1, nu2 in [(0.3 + 0.2j, -0.5), (0.1j, 0.6 - 0.1j)]:
            p, p2 = bergman.slice_points(1, nu1, nu2)
            assert rel(bergman.kernel_Dinv_origin(1, 3, 2, nu1, nu2), bergman.kernel_D(KernelParams(1, 3, 2), p, p2)) <= 1e-14


class TestDeflation:
    def test_origin_n4(self):
        lhs, rhs = bergman.deflation_sides(4, 2, 2, 0, 0)
        assert rhs == pytest.approx(math.gamma(7) / 2 / math.pi**6, rel=1e-14)
        assert bergman.deflation_residual(4, 2, 2, 0, 0) <= 1e-14 * abs(rhs)

    def test_n1_exact(self):
        assert bergman.deflation_residual(1, 2, 3, 0.3 - 0.4j, 0.5j) <= 1e-15 * abs(bergman.deflation_sides(1, 2, 3, 0.3 - 0.4j, 0.5j)[0])

    def test_slice_points_reproduce_products(self):
        rng = random.Random(11)
        for _ in range(20):
            nu1, nu2 = disk(rng, 0.9), disk(rng, 0.9)
            p, p2 = bergman.slice_points(3, nu1, nu2)
            assert p.w1 * p2.w1.conjugate() == pytest.approx(nu1, abs=1e-15)
            assert p.w2 * p2.w2.conjugate() == pytest.approx(nu2, abs=1e-15)
            params = KernelParams(3, 2, 2)
            assert p.in_domain(params) and p2.in_domain(params)

    def test_domain(self):
        with pytest.raises(DomainError):
            bergman.deflation_residual(2, 2, 2, 0, 1.5)
