import math

import numpy as np
import pytest
from numpy.testing import assert_allclose
from scipy import integrate, special

from shellhyper.errors import DomainError
from shellhyper.orthopoly import (
    JacobiBasis,
    gamma_norm,
    gauss_jacobi_rule,
    jacobi_eval,
    jacobi_table,
    map_from_reference,
    map_to_reference,
    radial_basis_eval,
    radial_series,
    radial_table,
)

CHEB = JacobiBasis()
PARAMS = [(-0.5, -0.5), (0.0, 0.0), (0.5, -0.5), (1.5, 0.25), (-0.3, 2.0)]


class TestJacobiBasis:
    def test_defaults(self):
        assert (CHEB.alpha, CHEB.beta, CHEB.r_in, CHEB.r_out) == (-0.5, -0.5, 1.0, 1.001)
        assert CHEB.is_chebyshev
        assert CHEB.admissible

    @pytest.mark.parametrize("alpha, beta", [(-1.0, 0.0), (0.0, -1.2)])
    def test_rejects_parameters(self, alpha, beta):
        with pytest.raises(DomainError):
            JacobiBasis(alpha, beta)

    @pytest.mark.parametrize("r_in, r_out", [(1.0, 1.0), (1.1, 1.2), (0.0, 1.5), (0.5, 0.9)])
    def test_rejects_interval(self, r_in, r_out):
        with pytest.raises(DomainError):
            JacobiBasis(r_in=r_in, r_out=r_out)

    def test_flags_inadmissible(self):
        with pytest.warns(UserWarning, match="below -1/2"):
            b = JacobiBasis(-0.7, 0.0)
        assert not b.admissible

    def test_measure_total_chebyshev(self):
        assert_allclose(CHEB.measure_total(), math.pi, rtol=1e-15)


class TestJacobiEval:
    def test_degree_zero(self):
        for a, b in PARAMS:
            assert jacobi_eval(JacobiBasis(a, b), 0, 0.3) == 1.0

    def test_degree_one_chebyshev(self):
        assert_allclose(jacobi_eval(CHEB, 1, 0.8), 0.4, atol=1e-15)

    def test_p2_at_zero(self):
        # binom(4, 2) / 4**2 * T_2(0) = -3/8
        assert_allclose(jacobi_eval(CHEB, 2, 0.0), -0.375, atol=1e-15)

    def test_chebyshev_ratio_at_cos_pi_over_10(self):
        x0 = math.cos(math.pi / 10)
        assert_allclose(jacobi_eval(CHEB, 5, x0), 63 / 256 * math.cos(5 * math.acos(x0)), atol=1e-15)

    @pytest.mark.parametrize("alpha, beta", PARAMS)
    def test_against_scipy(self, alpha, beta):
        x = np.linspace(-1, 1, 41)
        table = jacobi_table(JacobiBasis(alpha, beta), 25, x)
        for k in range(26):
            ref = special.eval_jacobi(k, alpha, beta, x)
            assert_allclose(table[:, k], ref, rtol=1e-12, atol=1e-12 * np.max(np.abs(ref)))

    @pytest.mark.parametrize("alpha, beta", PARAMS)
    def test_explicit_low_degree(self, alpha, beta):
        x = np.random.default_rng(1).uniform(-1, 1, 100)
        ab = alpha + beta
        p1 = (alpha + 1) + (ab + 2) * (x - 1) / 2
        p2 = (
            special.binom(2 + alpha, 2)
            + (2 + alpha) * (ab + 3) / 2 * (x - 1) * 1
            + (ab + 3) * (ab + 4) / 8 * (x - 1) ** 2
        )
        # P_n(x) = sum_m binom(n+a, n-m) binom(n+a+b+m, m) ((x-1)/2)^m
        p3 = sum(
            special.binom(3 + alpha, 3 - m) * special.binom(3 + ab + m, m) * ((x - 1) / 2) ** m
            for m in range(4)
        )
        table = jacobi_table(JacobiBasis(alpha, beta), 3, x)
        assert_allclose(table[:, 1], p1, rtol=1e-13, atol=1e-13)
        assert_allclose(table[:, 2], p2, rtol=1e-13, atol=1e-13)
        assert_allclose(table[:, 3], p3, rtol=1e-13, atol=1e-13)

    def test_chebyshev_specialization(self):
        x = np.linspace(-1, 1, 201)
        table = jacobi_table(CHEB, 40, x)
        for k in range(41):
            scale = 4.0 ** k / special.comb(2 * k, k, exact=True)
            assert_allclose(table[:, k] * scale, np.cos(k * np.arccos(x)), atol=1e-11)

    def test_endpoint_normalization(self):
        b = JacobiBasis(0.7, 0.2)
        for k in range(10):
            assert_allclose(jacobi_eval(b, k, 1.0), special.binom(k + 0.7, k), rtol=1e-14)

    def test_domain(self):
        jacobi_eval(CHEB, 3, 1.0 + 5e-13)
        with pytest.raises(DomainError):
            jacobi_eval(CHEB, 3, 1.0 + 1e-9)
        with pytest.raises(DomainError):
            jacobi_eval(CHEB, -1, 0.0)


class TestGammaNorm:
    @pytest.mark.parametrize(
        "alpha, beta, k, expected",
        [
            (-0.5, -0.5, 0, math.sqrt(math.pi)),
            (-0.5, -0.5, 1, math.sqrt(math.pi / 8)),
            (0.0, 0.0, 1, math.sqrt(2 / 3)),
        ],
    )
    def test_examples(self, alpha, beta, k, expected):
        assert_allclose(gamma_norm(JacobiBasis(alpha, beta), k), expected, rtol=1e-14)

    @pytest.mark.parametrize("alpha, beta", PARAMS)
    @pytest.mark.parametrize("k", [0, 1, 2, 5, 9])
    def test_against_quadrature(self, alpha, beta, k):
        def integrand(x):
            return special.eval_jacobi(k, alpha, beta, x) ** 2

        ref, _ = integrate.quad(integrand, -1, 1, weight="alg", wvar=(beta, alpha), limit=200)
        assert_allclose(gamma_norm(JacobiBasis(alpha, beta), k) ** 2, ref, rtol=1e-10)

    def test_positive_and_consistent(self):
        b = JacobiBasis(1.0, 3.0)
        g = b.gammas(30)
        assert np.all(g > 0)
        assert_allclose(g, [gamma_norm(b, k) for k in range(31)], rtol=0)


class TestMaps:
    def test_examples(self):
        assert map_to_reference(CHEB, 1.0) == -1.0
        assert_allclose(map_to_reference(CHEB, 1.0005), 0.0, atol=1e-12)
        assert map_to_reference(JacobiBasis(r_in=0.5, r_out=1.5), 1.25) == 0.5

    def test_round_trip(self):
        r = np.linspace(1.0, 1.001, 17)
        assert_allclose(map_from_reference(CHEB, map_to_reference(CHEB, r)), r, rtol=1e-15)

    def test_off_interval(self):
        with pytest.raises(DomainError):
            map_to_reference(CHEB, 1.002)
        with pytest.raises(DomainError):
            map_to_reference(CHEB, 0.999)

    def test_radial_basis_eval(self):
        assert radial_basis_eval(CHEB, 0, 1.0003) == 1.0
        assert_allclose(radial_basis_eval(CHEB, 1, CHEB.r_out), 0.5, rtol=1e-14)
        assert_allclose(radial_basis_eval(CHEB, 2, CHEB.midpoint), -0.375, atol=1e-12)

    def test_radial_table_matches_eval(self):
        r = np.linspace(1.0, 1.001, 9)
        t = radial_table(CHEB, 6, r)
        for k in range(7):
            assert_allclose(t[:, k], radial_basis_eval(CHEB, k, r), rtol=0, atol=0)

    def test_radial_series(self):
        b = JacobiBasis(0.5, 1.0)
        coeffs = np.random.default_rng(2).standard_normal(12)
        r = np.linspace(1.0, 1.001, 23)
        assert_allclose(radial_series(b, coeffs, r), radial_table(b, 11, r) @ coeffs, rtol=1e-13, atol=1e-13)


class TestGaussJacobiRule:
    def test_single_point(self):
        rule = gauss_jacobi_rule(CHEB, 1)
        assert_allclose(rule.nodes, [CHEB.midpoint], rtol=1e-15)
        assert_allclose(rule.weights, [math.pi], rtol=1e-15)

    def test_four_points(self):
        rule = gauss_jacobi_rule(CHEB, 4)
        x = np.sort(np.cos((2 * np.arange(4) + 1) * np.pi / 8))
        assert_allclose(rule.ref_nodes, x, atol=1e-15)
        assert_allclose(rule.nodes, CHEB.midpoint + 0.5 * CHEB.width * x, rtol=1e-15)
        assert_allclose(rule.weights, np.full(4, math.pi / 4), rtol=1e-15)
        assert rule.precision == 7

    @pytest.mark.parametrize("alpha, beta", PARAMS)
    def test_against_scipy_roots(self, alpha, beta):
        rule = gauss_jacobi_rule(JacobiBasis(alpha, beta), 15)
        x, w = special.roots_jacobi(15, alpha, beta)
        assert_allclose(rule.ref_nodes, x, atol=1e-14)
        assert_allclose(rule.weights, w, rtol=1e-12)

    @pytest.mark.parametrize("alpha, beta", PARAMS)
    def test_orthogonality_six_points(self, alpha, beta):
        b = JacobiBasis(alpha, beta)
        rule = gauss_jacobi_rule(b, 6)
        J = jacobi_table(b, 11, rule.ref_nodes)
        gram = (J * rule.weights[:, None]).T @ J
        g2 = b.gammas(11) ** 2
        for j in range(12):
            for k in range(12 - j):
                expected = g2[k] if j == k else 0.0
                assert abs(gram[j, k] - expected) <= 1e-10 * max(1.0, g2[k])

    @pytest.mark.parametrize("n", [1, 2, 7, 40, 120])
    def test_positivity_and_confinement(self, n):
        rule = gauss_jacobi_rule(JacobiBasis(0.3, -0.4), n)
        assert np.all(rule.weights > 0)
        assert np.all(np.diff(rule.nodes) > 0)
        assert rule.nodes[0] >= 1.0 and rule.nodes[-1] <= 1.001
        assert_allclose(rule.weights.sum(), JacobiBasis(0.3, -0.4).measure_total(), rtol=1e-13)

    def test_rejects_zero_points(self):
        with pytest.raises(DomainError):
            gauss_jacobi_rule(CHEB, 0)
