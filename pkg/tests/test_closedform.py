from fractions import Fraction

import pytest

from momentgap.closedform import (
    brickwork3_lambda,
    depth_threshold,
    lambda_C,
    lambda_Cprime,
)


class TestLambdaC:
    def test_large_n_limit_value(self):
        # tends to 1/25 at q = 2
        assert abs(lambda_C(40, 2) - 0.04) < 1e-18

    def test_n5_rational_oracle(self):
        expect = (Fraction(2**10 - 2**4, 2**10 - 2**2) / 5) ** 2
        assert lambda_C(5, 2) == pytest.approx(float(expect), abs=1e-15)
        assert f"{lambda_C(5, 2):.9f}" == "0.039064360"

    def test_equals_squared_brickwork(self):
        assert lambda_C(5, 2) == pytest.approx(
            brickwork3_lambda(2, 2, 8) ** 2, abs=1e-15
        )

    def test_limit_monotone_with_bounded_deviation(self):
        prev = lambda_C(4, 2)
        for n in range(5, 30):
            cur = lambda_C(n, 2)
            assert cur > prev
            assert abs(cur - 0.04) <= 4.0 * 2**4 / 2.0 ** (2 * n)
            prev = cur


class TestLambdaCprime:
    def test_n5_rational_oracle(self):
        expect = (Fraction(3) / (Fraction(32) - Fraction(1, 8))) ** 2
        assert lambda_Cprime(5, 2) == pytest.approx(float(expect), abs=1e-15)
        assert f"{lambda_Cprime(5, 2):.9f}" == "0.008858131"

    def test_vanishes_at_large_n(self):
        assert lambda_Cprime(60, 2) < 1e-30

    def test_equals_brickwork_with_big_middle(self):
        assert lambda_Cprime(5, 2) == pytest.approx(
            brickwork3_lambda(2, 8, 2), abs=1e-15
        )


class TestBrickwork3:
    def test_uniform_qubits(self):
        assert brickwork3_lambda(2, 2, 2) == pytest.approx(36 / 225, abs=1e-15)

    def test_heterogeneous(self):
        assert brickwork3_lambda(2, 2, 8) == pytest.approx(756 / 3825, abs=1e-15)

    def test_symmetric_in_outer_dims(self):
        for q1, q2, q3 in [(2, 3, 5), (4, 2, 7), (3, 3, 2)]:
            assert brickwork3_lambda(q1, q2, q3) == brickwork3_lambda(q3, q2, q1)

    def test_dimension_guard(self):
        with pytest.raises(ValueError):
            brickwork3_lambda(1, 2, 2)


class TestDepthThreshold:
    def test_n5_both_formulas_give_ten(self):
        dt = depth_threshold(5, 2, 2, lambda_C(5, 2), lambda_Cprime(5, 2))
        assert dt.depth == 10
        assert dt.depth_specialized == 10

    def test_eps_bound_value(self):
        dt = depth_threshold(5, 2, 2, lambda_C(5, 2), lambda_Cprime(5, 2))
        # exact rational: 2^20 * (8/85)^20 = (16/85)^20
        expect = float(Fraction(16, 85) ** 20)
        assert dt.eps_additive == pytest.approx(expect, rel=1e-9)
        assert dt.eps_additive == pytest.approx(3.1e-15, rel=0.02)
        assert dt.eps_multiplicative == dt.eps_additive / 2

    def test_no_crossover_guard(self):
        with pytest.raises(ValueError, match="no crossover"):
            depth_threshold(5, 2, 2, 0.01, 0.01)
        # at N = 4 the two closed forms coincide exactly
        with pytest.raises(ValueError, match="no crossover"):
            depth_threshold(4, 2, 2, lambda_C(4, 2), lambda_Cprime(4, 2))

    def test_general_and_specialized_agree_where_defined(self):
        for n in range(5, 21):
            dt = depth_threshold(n, 2, 2, lambda_C(n, 2), lambda_Cprime(n, 2))
            assert dt.depth == dt.depth_specialized, n


def test_lambda_order_flips_below_n5():
    # lambda' > lambda at N = 3, exact tie at N = 4, lambda > lambda' beyond
    assert lambda_Cprime(3, 2) > lambda_C(3, 2)
    assert lambda_Cprime(4, 2) == lambda_C(4, 2)
    for n in range(5, 15):
        assert lambda_C(n, 2) > lambda_Cprime(n, 2)
