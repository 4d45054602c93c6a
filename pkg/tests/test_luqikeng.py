import cmath
import math
import random
from fractions import Fraction

import mpmath
import numpy as np
import pytest
import sympy as sp

from bergkern import bergman, luqikeng
from bergkern.bergman import DomainPoint, KernelParams
from bergkern.errors import DomainError, NumericalError
from bergkern.exactpoly import BiPoly, poly_eval

from test_bergman import interior_point, rel


class TestG:
    def test_constant_term(self):
        for r in (Fraction(1, 3), 2, Fraction(7, 2)):
            G = luqikeng.build_G(r)
            r = Fraction(r)
            assert G.coeff(0, 0) == 3 * r**3 + 22 * r**2 + 48 * r + 32
        assert luqikeng.build_G(2).coeff(0, 0) == 240

    @pytest.mark.parametrize("r", [Fraction(1, 2), 1, 3, Fraction(11, 7)])
    def test_symmetric(self, r):
        G = luqikeng.build_G(r)
        assert G == G.swap()
        assert (G.degree_x, G.degree_y) == (3, 3)

    def test_against_sympy_symbolic_r(self):
        # the construction and the expansion agree as polynomials in r too
        rs, xs, ys = sp.symbols("r x y")
        for r in (Fraction(1, 2), 2, 5):
            G = luqikeng.build_G(r)
            expanded = (
                3 * rs**3 * (1 - xs) ** 3 * (1 - ys) ** 3
                + 22 * rs**2 * (1 - xs) ** 2 * (1 - ys) ** 2 * (1 - xs * ys)
                + 24 * rs * (1 - xs) * (1 - ys) * (xs * (2 * xs + 1) * ys**2 + (xs - 8) * xs * ys + xs + ys + 2)
                + 8 * (1 - xs * ys) * (xs**2 * ys * (4 * ys + 7) + xs**2 + ys**2 + xs * ys * (7 * ys - 38) + 7 * xs + 7 * ys + 4)
            ).subs(rs, sp.Rational(Fraction(r).numerator, Fraction(r).denominator))
            mine = sum(sp.Rational(c.numerator, c.denominator) * xs**i * ys**j for (i, j), c in G.terms)
            assert sp.expand(mine - expanded) == 0

    def test_rejects_nonpositive(self):
        with pytest.raises(ValueError):
            luqikeng.build_G(0)


class TestDCoefficients:
    def test_eta_zero(self):
        for r in (0.5, 2.0, 7.0):
            d = luqikeng.d_coefficients(r, 0.0)
            assert d.d0 == pytest.approx(-96) and d.d3 == pytest.approx(96)

    def test_reconstruction_example(self):
        d = luqikeng.d_coefficients(2.0, 1.1)
        G = luqikeng.build_G(2)
        z = 2.0
        assert rel(d(z), z**3 * poly_eval(G, cmath.exp(1.1j), 1 / z)) <= 1e-10
        assert d.verify() <= 1e-10

    def test_matches_coefficients_read_from_G(self):
        rng = random.Random(1)
        for _ in range(20):
            r, eta = rng.choice([Fraction(1, 3), 1, 2, Fraction(9, 2)]), rng.uniform(0, 2 * math.pi)
            mine = luqikeng.d_coefficients(float(r), eta).coeffs
            ref = luqikeng.d_from_G(luqikeng.build_G(r), eta)
            for a, b in zip(mine, ref):
                assert abs(a - b) <= 1e-11 * max(abs(v) for v in ref)

    def test_verify_mode_flags_wrong_coefficients(self):
        d = luqikeng.d_coefficients(2.0, 0.7)
        bad = luqikeng.DCoeffs(d.d0 * 1.001, d.d1, d.d2, d.d3, r=2.0, eta=0.7)
        with pytest.raises(NumericalError):
            bad.verify()

    def test_rejects_nonpositive(self):
        with pytest.raises(ValueError):
            luqikeng.d_coefficients(0, 1.0)


class TestSchurCohn:
    def test_monomial_cube(self):
        M = luqikeng.schur_cohn((0, 0, 0, 1))
        assert M.entries[0][0] == 1
        assert np.allclose(np.array(M.entries), np.eye(3))

    def test_against_direct_formula(self):
        rng = random.Random(2)
        for _ in range(10):
            d = [complex(rng.gauss(0, 1), rng.gauss(0, 1)) for _ in range(4)]
            M = np.array(luqikeng.schur_cohn(d).entries)
            m = 3
            for j in range(1, 4):
                for k in range(j, 4):
                    ref = sum(d[m - j + l] * d[m - k + l].conjugate() - d[j - l].conjugate() * d[k - l] for l in range(1, j + 1))
                    assert M[j - 1, k - 1] == pytest.approx(ref, rel=1e-14, abs=1e-14)

    def test_hermitian_and_real_det(self):
        rng = random.Random(3)
        for _ in range(30):
            M = luqikeng.schur_cohn(luqikeng.d_coefficients(rng.uniform(0.1, 10), rng.uniform(0, 2 * math.pi)))
            assert M.is_hermitian()
            det = M.det()
            assert abs(det.imag) <= 1e-10 * max(abs(det), 1e-300) or abs(det) == 0
            assert rel(det, np.linalg.det(np.array(M.entries))) <= 1e-8

    def test_stable_cubic_is_positive_definite(self):
        # roots 0.1, 0.2j, -0.3 inside the disk: z^3 reversed-coefficient convention
        roots = [0.1, 0.2j, -0.3]
        coeffs = np.poly(roots)[::-1]  # d0..d3
        M = np.array(luqikeng.schur_cohn(list(coeffs)).entries)
        assert np.all(np.linalg.eigvalsh(M) > 0)


class TestDet:
    @pytest.mark.parametrize("r", [0.1, 0.5, 1, 2, 3, 7, 10])
    def test_zero_at_eta_zero(self, r):
        assert luqikeng.det_M(r, 0.0) == 0
        assert luqikeng.det_M_closed(r, 0.0) == 0

    def test_negative_for_small_eta(self):
        for r in (0.1, 1, 2.5, 10):
            for eta in (1e-3, 1e-2, 0.05):
                assert luqikeng.det_M(r, eta) < 0

    def test_against_mpmath_matrix(self):
        rng = random.Random(4)
        for _ in range(10):
            r, eta = rng.uniform(0.1, 10), rng.uniform(1e-3, 2 * math.pi)
            with mpmath.workdps(60):
                t = mpmath.exp(1j * mpmath.mpf(eta))
                d = luqikeng._d_values(mpmath.mpf(r), t)
                M = mpmath.matrix(3, 3)
                for j in range(1, 4):
                    for k in range(1, 4):
                        jj, kk = min(j, k), max(j, k)
                        v = sum(d[3 - jj + l] * mpmath.conj(d[3 - kk + l]) - mpmath.conj(d[jj - l]) * d[kk - l]
                                for l in range(1, jj + 1))
                        M[j - 1, k - 1] = v if j <= k else mpmath.conj(v)
                ref = float(mpmath.re(mpmath.det(M)))
            assert rel(luqikeng.det_M(r, eta), ref) <= 1e-10

    def test_small_eta_escalates(self):
        # sin^12(eta/2) cancellation: the float cofactor alone is unreliable here
        r, eta = 2.0, 1e-4
        assert rel(luqikeng.det_M(r, eta), luqikeng.det_M_closed(r, eta)) <= 1e-6


class TestGn:
    def test_sum(self):
        assert luqikeng.gn_sum_check() == 38400
        assert luqikeng.GnCoefficients.closed_form().sum() == (Fraction(38400),)

    def test_g3_at_zero(self):
        assert luqikeng.GnCoefficients.closed_form().evaluate(3, 0) == 0

    def test_g0_value(self):
        g = luqikeng.GnCoefficients.closed_form()
        r = Fraction(3, 2)
        assert g.evaluate(0, r) == 26624 - 24672 * r**2 + 15724 * r**4 - 2430 * r**6


class TestScan:
    def test_min_det_nonpositive(self):
        rep = luqikeng.lqk_scan(2.5, 64, workers=1)
        assert rep.min_det <= 0 and rep.witness_found == (rep.min_det < 0)

    def test_deterministic_across_workers(self):
        a = luqikeng.det_scan(1.5, 1024, workers=1)
        b = luqikeng.det_scan(1.5, 1024, workers=4)
        assert a == b
        assert luqikeng.lqk_scan(1.5, 1024, workers=1) == luqikeng.lqk_scan(1.5, 1024, workers=4)

    def test_grid_validation(self):
        with pytest.raises(ValueError):
            luqikeng.lqk_scan(2, 8)
        with pytest.raises(ValueError):
            luqikeng.lqk_scan(-1, 64)

    def test_worker_env(self, monkeypatch):
        monkeypatch.setenv("BERGKERN_THREADS", "3")
        assert luqikeng.resolve_workers() == 3
        monkeypatch.setenv("BERGKERN_THREADS", "0")
        assert luqikeng.resolve_workers() >= 1
        monkeypatch.delenv("BERGKERN_THREADS")
        assert luqikeng.resolve_workers() >= 1
        assert luqikeng.resolve_workers(2) == 2


class TestWitness:
    @pytest.mark.parametrize("n", [4, 5, 10])
    def test_points(self, n):
        p, p2 = luqikeng.diagonal_zero_witness(n)
        params = KernelParams(n, 2, 2)
        assert p.in_domain(params) and p2.in_domain(params)
        assert p.w1 * p2.w1.conjugate() == pytest.approx(-3 / n)

    @pytest.mark.parametrize("n", [1, 2, 3])
    def test_small_n(self, n):
        with pytest.raises(DomainError):
            luqikeng.diagonal_zero_witness(n)


def jacobian_det(params, a, p, h=1e-6):
    """det of the complex Jacobian of the automorphism at p by central differences."""
    def chart(v):
        n = params.n
        out = luqikeng.automorphism(params, a, DomainPoint(v[:n], v[n], v[n + 1]))
        return np.array([*out.z, out.w1, out.w2])

    v0 = np.array([*p.z, p.w1, p.w2])
    J = np.empty((len(v0), len(v0)), dtype=complex)
    for k in range(len(v0)):
        e = np.zeros(len(v0), dtype=complex)
        e[k] = h
        J[:, k] = (chart(v0 + e) - chart(v0 - e)) / (2 * h)
    return np.linalg.det(J)


class TestAutomorphism:
    def test_identity_at_zero(self):
        params = KernelParams(2, 3, 2)
        p = DomainPoint((0.2 + 0.1j, -0.3j), 0.4, 0.5j)
        out = luqikeng.automorphism(params, (0, 0), p)
        assert np.allclose(out.z, p.z) and out.w1 == pytest.approx(p.w1) and out.w2 == pytest.approx(p.w2)

    def test_psi_swaps_a_and_zero(self):
        a = (0.3 + 0.2j, -0.1j, 0.25)
        assert np.allclose(luqikeng.psi(a, a), 0)
        assert np.allclose(luqikeng.psi(a, (0, 0, 0)), [-v for v in a])

    @pytest.mark.parametrize("n,q,r", [(1, 2, 2), (2, 3, Fraction(7, 2)), (3, Fraction(3, 2), 4)])
    def test_membership_preserved(self, n, q, r):
        params = KernelParams(n, q, r)
        rng = random.Random(n)
        for _ in range(10**4 // 3):
            p = interior_point(rng, params, 0.999)
            out = luqikeng.reduce_to_slice(params, p)
            assert out.z == (0j,) * n
            assert out.in_domain(params)

    @pytest.mark.parametrize("n,q,r", [(1, 2, 2), (2, 3, Fraction(7, 2)), (3, 2, 4)])
    def test_kernel_transformation_law(self, n, q, r):
        params = KernelParams(n, q, r)
        rng = random.Random(10 + n)
        for _ in range(3):
            p, p2 = interior_point(rng, params, 0.5), interior_point(rng, params, 0.5)
            a = interior_point(rng, params, 0.5).z
            fp, fp2 = luqikeng.automorphism(params, a, p), luqikeng.automorphism(params, a, p2)
            lhs = bergman.kernel_D(params, p, p2)
            rhs = jacobian_det(params, a, p) * bergman.kernel_D(params, fp, fp2) * jacobian_det(params, a, p2).conjugate()
            assert rel(lhs, rhs) <= 1e-7

    def test_reduction_keeps_kernel_modulus_ratio(self):
        # K(p, p) / |J|^2 equals the kernel at the reduced slice point
        params = KernelParams(2, 2, 3)
        rng = random.Random(5)
        p = interior_point(rng, params, 0.6)
        red = luqikeng.reduce_to_slice(params, p)
        lhs = bergman.kernel_D(params, p, p).real
        rhs = abs(jacobian_det(params, p.z, p)) ** 2 * bergman.kernel_D(params, red, red).real
        assert rel(lhs, rhs) <= 1e-7

    def test_rejects_exterior(self):
        params = KernelParams(1, 2, 2)
        with pytest.raises(DomainError):
            luqikeng.reduce_to_slice(params, DomainPoint((0.9,), 0.9, 0))
