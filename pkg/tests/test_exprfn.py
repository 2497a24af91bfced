"""Expression functions: parsing, evaluation, symbolic Jacobian."""

import math

import pytest

from stratcalc import ExprFunction, InputError, NumericError


class TestParsing:
    def test_polynomial(self):
        f = ExprFunction(1, ("x1**2",))
        assert f.evaluate((3.0,)) == (9.0,)

    def test_rational_constant(self):
        f = ExprFunction(1, ("3/4*x1",))
        assert f.evaluate((4.0,)) == (3.0,)

    def test_decimal_literal_becomes_rational(self):
        f = ExprFunction(1, ("0.5*x1",))
        assert f.evaluate((3.0,)) == (1.5,)

    def test_trig_and_exp(self):
        f = ExprFunction(2, ("sin(x1)", "exp(x2)"))
        y = f.evaluate((0.0, 1.0))
        assert y[0] == 0.0
        assert abs(y[1] - math.e) < 1e-15

    def test_unknown_variable_rejected(self):
        with pytest.raises(InputError):
            ExprFunction(1, ("x2 + 1",))

    def test_disallowed_function_rejected(self):
        with pytest.raises(InputError):
            ExprFunction(1, ("tan(x1)",))
        with pytest.raises(InputError):
            ExprFunction(1, ("log(x1)",))

    def test_parse_error_rejected(self):
        with pytest.raises(InputError):
            ExprFunction(1, ("x1 +",))

    def test_irrational_constant_rejected(self):
        with pytest.raises(InputError):
            ExprFunction(1, ("pi*x1",))


class TestJacobian:
    def test_quadratic(self):
        f = ExprFunction(1, ("x1**2",))
        assert f.jacobian((3.0,)) == ((6.0,),)
        assert f.jacobian_apply((3.0,), (2.0,)) == (12.0,)

    def test_multivariate(self):
        f = ExprFunction(2, ("x1**2 + x2", "x1*x2"))
        rows = f.jacobian((2.0, 5.0))
        assert rows == ((4.0, 1.0), (5.0, 2.0))
        assert f.jacobian_apply((2.0, 5.0), (1.0, -1.0)) == (3.0, 3.0)

    def test_sine_at_zero(self):
        f = ExprFunction(1, ("sin(x1)",))
        assert f.jacobian((0.0,)) == ((1.0,),)


class TestEvaluationErrors:
    def test_division_by_zero(self):
        f = ExprFunction(1, ("1/x1",))
        with pytest.raises(NumericError):
            f.evaluate((0.0,))

    def test_complex_result(self):
        f = ExprFunction(1, ("x1**(1/2)",))
        with pytest.raises(NumericError):
            f.evaluate((-1.0,))

    def test_wrong_arity(self):
        f = ExprFunction(2, ("x1", "x2"))
        with pytest.raises(InputError):
            f.evaluate((1.0,))
