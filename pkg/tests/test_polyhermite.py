from math import comb, sqrt

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from grasscurv.errors import DegreeOverflow, NotHermitian, PoleAtPoint, ZeroPolynomial
from grasscurv.polyhermite import (
    BiPoly,
    HermitianPoly,
    HermitianRational,
    HoloPoly,
    abs2,
    binomial_match,
    evaluate,
    laplacian,
    mul_conj,
    partial_z,
    partial_zbar,
    rational_log_laplacian,
)

coef = st.complex_numbers(max_magnitude=3, allow_nan=False, allow_infinity=False)
holo = st.lists(coef, min_size=1, max_size=5).map(HoloPoly)
point = st.complex_numbers(max_magnitude=1.5, allow_nan=False, allow_infinity=False)


def random_hermitian(rng, k=3, deg=3):
    out = HermitianPoly(np.ones((1, 1)))
    for _ in range(k):
        q = HoloPoly(rng.normal(size=deg + 1) + 1j * rng.normal(size=deg + 1))
        out = out + abs2(q)
    return out


class TestHoloPoly:
    def test_trims_trailing_zeros(self):
        assert HoloPoly([1, 2, 0, 0]).degree == 1
        assert HoloPoly([0, 0]).degree == -1
        assert HoloPoly([]).is_zero()

    def test_monomial_and_eval(self):
        p = HoloPoly.monomial(2.0, 3)
        assert p(1j) == pytest.approx(-2j)

    def test_derivative(self):
        assert HoloPoly([1, 2, 3]).derivative() == HoloPoly([2, 6])
        assert HoloPoly([5]).derivative().is_zero()

    def test_arithmetic(self):
        p, q = HoloPoly([1, 1]), HoloPoly([1, -1])
        assert p * q == HoloPoly([1, 0, -1])
        assert p + q == HoloPoly([2])
        assert (p - p).is_zero()
        assert 2 * p == HoloPoly([2, 2])

    def test_degree_cap(self):
        with pytest.raises(DegreeOverflow):
            HoloPoly.monomial(1, 40) * HoloPoly.monomial(1, 40)

    @given(holo, holo, point)
    def test_product_evaluates_pointwise(self, p, q, x):
        assert (p * q)(x) == pytest.approx(p(x) * q(x), rel=1e-9, abs=1e-9)


class TestMulConj:
    def test_one_plus_x(self):
        h = mul_conj(HoloPoly([1, 1]), HoloPoly([1, 1]))
        assert isinstance(h, HermitianPoly)
        assert h.terms() == {(0, 0): 1, (1, 0): 1, (0, 1): 1, (1, 1): 1}

    def test_veronese_head(self):
        p = HoloPoly([1, sqrt(3)])
        h = abs2(p)
        assert h.coeff(0, 0) == pytest.approx(1)
        assert h.coeff(1, 1) == pytest.approx(3)

    def test_not_hermitian_when_different(self):
        h = mul_conj(HoloPoly([0, 1]), HoloPoly([1]))
        assert not isinstance(h, HermitianPoly)
        assert h.terms() == {(1, 0): 1}
        assert not h.is_hermitian()

    @given(holo, holo, point)
    def test_evaluates_to_product_with_conjugate(self, p, q, x):
        assert mul_conj(p, q)(x) == pytest.approx(p(x) * np.conj(q(x)), rel=1e-9, abs=1e-9)


class TestHermitian:
    def test_rejects_asymmetric(self):
        with pytest.raises(NotHermitian):
            HermitianPoly([[1, 1], [0, 1]])

    def test_eval_and_evaluate(self):
        h = HermitianPoly.one_plus_abs2_pow(3)
        assert evaluate(h, 1) == pytest.approx(8)
        assert h(0.3 + 0.4j) == pytest.approx(1.25 ** 3)

    @settings(max_examples=40)
    @given(st.integers(0, 2**32 - 1), point)
    def test_closure_is_real(self, seed, x):
        rng = np.random.default_rng(seed)
        a, b = random_hermitian(rng, 2, 2), random_hermitian(rng, 2, 2)
        for h in (a + b, a * b, laplacian(a), a - b):
            v = BiPoly.__call__(h, x)
            assert abs(v.imag) <= 1e-12 * max(1.0, h.scale(x))

    def test_g24_r3_gram_det_at_zero(self):
        pv = [HoloPoly([1]), HoloPoly([0, -sqrt(8 / 3)]), HoloPoly([0, 1 / sqrt(3)]),
              HoloPoly([0, 0, -sqrt(3)]), HoloPoly.zero(), HoloPoly([0, 0, 0, -1])]
        det = sum((abs2(p) for p in pv[1:]), abs2(pv[0]))
        assert evaluate(det, 0) == pytest.approx(1)


class TestDerivatives:
    def test_one_plus_abs2(self):
        h = HermitianPoly.one_plus_abs2_pow(1)
        assert partial_z(h).terms() == {(0, 1): 1}
        assert partial_zbar(h).terms() == {(1, 0): 1}

    def test_square(self):
        h = HermitianPoly.one_plus_abs2_pow(2)
        assert laplacian(h).terms() == {(0, 0): 2, (1, 1): 4}

    def test_constant(self):
        h = HermitianPoly([[3.0]])
        assert partial_z(h).is_zero() and partial_zbar(h).is_zero()

    def test_finite_difference_oracle(self):
        rng = np.random.default_rng(7)
        step = 1e-5
        for _ in range(50):
            h = random_hermitian(rng)
            dz = partial_z(h)
            for x in rng.uniform(-1, 1, 10) + 1j * rng.uniform(-1, 1, 10):
                fx = (h(x + step) - h(x - step)) / (2 * step)
                fy = (h(x + 1j * step) - h(x - 1j * step)) / (2 * step)
                fd = 0.5 * (fx - 1j * fy)
                assert dz(x) == pytest.approx(fd, rel=1e-6, abs=1e-6 * h.scale(x))


class TestLogLaplacian:
    @pytest.mark.parametrize("r", [1, 2, 5])
    def test_binomial_power(self, r):
        q = rational_log_laplacian(HermitianPoly.one_plus_abs2_pow(r))
        rng = np.random.default_rng(r)
        for x in rng.uniform(-2, 2, 10) + 1j * rng.uniform(-2, 2, 10):
            assert q(x) == pytest.approx(r / (1 + abs(x) ** 2) ** 2, rel=1e-12)

    def test_quartic(self):
        q = rational_log_laplacian(HermitianPoly.radial([1, 0, 1]))
        for x in (0.3, 0.5 + 0.5j, -1.2j):
            a2 = abs(x) ** 2
            assert q(x) == pytest.approx(4 * a2 / (1 + a2 ** 2) ** 2, rel=1e-12)
        step = 1e-4
        x = 0.4 + 0.3j
        ln = lambda z: np.log(1 + abs(z) ** 4)  # noqa: E731
        fd = (ln(x + step) + ln(x - step) + ln(x + 1j * step) + ln(x - 1j * step) - 4 * ln(x)) / (4 * step ** 2)
        assert q(x) == pytest.approx(fd, rel=1e-6)

    def test_constant_is_zero(self):
        assert rational_log_laplacian(HermitianPoly([[1.0]]))(0.7) == 0

    def test_zero_polynomial(self):
        with pytest.raises(ZeroPolynomial):
            rational_log_laplacian(HermitianPoly([[0.0]]))

    def test_log_additivity(self):
        rng = np.random.default_rng(11)
        for _ in range(10):
            a, b = random_hermitian(rng, 2, 2), random_hermitian(rng, 2, 2)
            x = complex(*rng.uniform(-1, 1, 2))
            lhs = rational_log_laplacian(a * b)(x)
            rhs = rational_log_laplacian(a)(x) + rational_log_laplacian(b)(x)
            assert lhs == pytest.approx(rhs, rel=1e-9)

    def test_pole(self):
        q = HermitianRational(HermitianPoly([[1.0]]), HermitianPoly.radial([-1, 1]))
        with pytest.raises(PoleAtPoint):
            q(1.0)


class TestBinomialMatch:
    def test_row_1331(self):
        assert binomial_match(HermitianPoly.radial([1, 3, 3, 1])) == (3, 1.0)

    def test_no_match(self):
        assert binomial_match(HermitianPoly.radial([1, 2])) is None
        assert binomial_match(HermitianPoly.radial([1, 1, 1])) is None

    def test_off_diagonal_breaks_match(self):
        c = np.diag([1.0, 2.0, 1.0]).astype(complex)
        c[0, 1] = c[1, 0] = 1e-6
        assert binomial_match(HermitianPoly(c)) is None

    @given(st.integers(0, 12), st.floats(0.01, 100))
    def test_scaling(self, r, c):
        h = HermitianPoly.radial([c * comb(r, k) for k in range(r + 1)])
        m = binomial_match(h)
        assert m is not None and m.r == r and m.c == pytest.approx(c)
