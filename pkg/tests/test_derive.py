"""Numeric derivatives of conical maps and their analytic cross-checks."""

from random import Random

import pytest

from stratcalc import (
    CONE_APEX,
    ExprFunction,
    InputError,
    NumericError,
    Piece,
    PiecewiseConeAction,
    StructuralError,
    UnsupportedPrecisionError,
    closed_form_parametric,
    cone_coord,
    conjugate,
    constant_action,
    d_at_point,
    derive,
    discrete_space,
    identity_spec,
    nth_derivative,
    obvious_spec,
    parametric_spec,
    wrap_discrete,
)
from stratcalc.selftest import suite_derive
from stratcalc.spaces import PointMap


def zspace():
    return discrete_space(["z1", "z2"])


def id_action(space):
    return constant_action({p: p for p in space.points})


def square_spec(space=None, rho=None):
    space = space or zspace()
    return parametric_spec(
        ExprFunction(1, ("x1**2",)),
        rho or id_action(space),
        space,
        space,
    )


class TestConjugate:
    def test_identity_is_fixed(self):
        spec = identity_spec(2, zspace())
        cj = conjugate(spec, 0.7, (1.0, -2.0), (3.0, 4.0), cone_coord(0.5, "z1"))
        assert max(abs(a - b) for a, b in zip(cj.w, (1.0, -2.0))) < 1e-12
        assert cj.fx == (3.0, 4.0)
        assert cj.cone == cone_coord(0.5, "z1")

    def test_square_forward_difference(self):
        cj = conjugate(square_spec(), 0.5, (1.0,), (3.0,), CONE_APEX)
        # (k(3.5) - k(3)) / 0.5 with k the squaring map
        assert cj.w == ((3.5**2 - 3.0**2) / 0.5,)
        assert cj.w == (6.5,)
        assert cj.cone.is_apex

    def test_piece_lookup_uses_scaled_radius(self):
        space = zspace()
        rho = PiecewiseConeAction(
            (
                Piece(0.0, 1.0, {"z1": "z1", "z2": "z2"}),
                Piece(1.0, None, {"z1": "z2", "z2": "z1"}),
            )
        )
        spec = square_spec(space, rho)
        cj = conjugate(spec, 0.25, (1.0,), (3.0,), cone_coord(2.0, "z1"))
        # scaled radius 0.5 falls in the first piece
        assert cj.piece == 0
        assert cj.cone == cone_coord(2.0, "z1")
        cj2 = conjugate(spec, 1.0, (1.0,), (3.0,), cone_coord(2.0, "z1"))
        assert cj2.piece == 1
        assert cj2.cone == cone_coord(2.0, "z2")

    def test_center_evaluation_error_propagates(self):
        space = zspace()
        spec = parametric_spec(
            ExprFunction(1, ("1/x1",)), id_action(space), space, space
        )
        with pytest.raises(NumericError):
            conjugate(spec, 1.0, (1.0,), (0.0,), CONE_APEX)


class TestDerive:
    def test_identity_exact(self):
        spec = identity_spec(1, zspace())
        report = derive(spec, (1.25,), (3.0,), cone_coord(0.5, "z1"))
        assert report.derivable
        assert report.residual < 1e-9
        assert abs(report.value.w[0] - 1.25) < 1e-12
        assert report.value.fx == (3.0,)
        assert report.value.cone == cone_coord(0.5, "z1")

    def test_square_matches_symbolic_oracle(self):
        spec = square_spec()
        report = derive(spec, (1.0,), (3.0,), cone_coord(2.0, "z1"), tol=1e-6)
        exact = closed_form_parametric(spec, (1.0,), (3.0,), cone_coord(2.0, "z1"))
        assert exact.w == (6.0,)  # symbolic derivative of squaring at 3
        assert report.derivable
        assert abs(report.value.w[0] - exact.w[0]) < 1e-6
        assert report.value.fx == (9.0,)
        assert report.value.cone == cone_coord(2.0, "z1")

    def test_cone_point_preserved(self):
        report = derive(square_spec(), (1.0,), (3.0,), CONE_APEX, tol=1e-6)
        assert report.derivable
        assert report.value.cone.is_apex
        assert all(e.cone.is_apex for e in report.trace)

    def test_stabilization_index_recorded(self):
        space = zspace()
        rho = PiecewiseConeAction(
            (
                Piece(0.0, 1.0, {"z1": "z1", "z2": "z2"}),
                Piece(1.0, None, {"z1": "z2", "z2": "z1"}),
            )
        )
        spec = square_spec(space, rho)
        report = derive(spec, (1.0,), (3.0,), cone_coord(3.0, "z1"), tol=1e-6)
        assert report.derivable
        # radius 3 needs the scale to drop below 1/3 before piece 0 holds
        assert report.stabilization_index == 2
        assert report.value.cone == cone_coord(3.0, "z1")

    def test_alternating_pieces_never_settle(self):
        # geometric intervals alternating between two tables keep the
        # scaled radius off the limit piece for the whole step budget
        space = zspace()
        flip = {"z1": "z2", "z2": "z1"}
        keep = {"z1": "z1", "z2": "z2"}
        bounds = [2.0 ** (-k) for k in range(43, -1, -1)]  # 2^-43 .. 1
        pieces = [Piece(0.0, bounds[0], keep)]
        for i in range(len(bounds) - 1):
            table = keep if i % 2 == 0 else flip
            pieces.append(Piece(bounds[i], bounds[i + 1], table))
        pieces.append(Piece(bounds[-1], None, keep))
        rho = PiecewiseConeAction(tuple(pieces))
        spec = square_spec(space, rho)
        report = derive(spec, (1.0,), (3.0,), cone_coord(1.0, "z1"), tol=1e-6)
        assert not report.derivable
        assert report.stabilization_index is None
        assert "settle" in report.failure
        pieces_seen = {e.piece for e in report.trace}
        assert 0 not in pieces_seen and len(pieces_seen) > 1

    def test_divergent_vector_part(self):
        space = zspace()
        spec = parametric_spec(
            ExprFunction(1, ("x1**(1/2)",)), id_action(space), space, space
        )
        report = derive(spec, (1.0,), (0.0,), CONE_APEX, tol=1e-6)
        assert not report.derivable

    def test_probe_failure_near_domain_edge(self):
        # the square root is fine at the queried point but probes step
        # across zero where evaluation leaves the reals
        space = zspace()
        spec = parametric_spec(
            ExprFunction(1, ("x1**(1/2)",)), id_action(space), space, space
        )
        report = derive(spec, (1.0,), (5e-6,), CONE_APEX, tol=1e-2)
        assert not report.derivable
        assert any(not p.ok for p in report.probes)
        assert "probes" in report.failure

    def test_input_validation(self):
        spec = square_spec()
        with pytest.raises(InputError):
            derive(spec, (1.0,), (3.0,), CONE_APEX, tol=0.0)
        with pytest.raises(InputError):
            derive(spec, (1.0, 2.0), (3.0,), CONE_APEX)
        with pytest.raises(InputError):
            derive(spec, (1.0,), (3.0,), cone_coord(1.0, "nope"))

    def test_trace_is_audit_ready(self):
        report = derive(square_spec(), (1.0,), (3.0,), CONE_APEX, tol=1e-6)
        assert report.trace[0].a == 1.0
        assert all(
            report.trace[i].a == 2 * report.trace[i + 1].a
            for i in range(len(report.trace) - 1)
        )


class TestClosedForm:
    def test_affine(self):
        space = zspace()
        spec = parametric_spec(
            ExprFunction(1, ("2*x1 + 1",)), id_action(space), space, space
        )
        value = closed_form_parametric(spec, (1.0,), (7.0,), CONE_APEX)
        assert value.w == (2.0,)
        assert value.fx == (15.0,)

    def test_sine_at_zero(self):
        space = zspace()
        spec = parametric_spec(
            ExprFunction(1, ("sin(x1)",)), id_action(space), space, space
        )
        value = closed_form_parametric(spec, (1.0,), (0.0,), CONE_APEX)
        assert value.w == (1.0,)
        assert value.fx == (0.0,)

    def test_apex_stays_apex(self):
        value = closed_form_parametric(square_spec(), (1.0,), (3.0,), CONE_APEX)
        assert value.cone.is_apex

    def test_limit_uses_radius_zero_table(self):
        space = zspace()
        rho = PiecewiseConeAction(
            (
                Piece(0.0, 1.0, {"z1": "z2", "z2": "z2"}),
                Piece(1.0, None, {"z1": "z1", "z2": "z1"}),
            )
        )
        spec = square_spec(space, rho)
        value = closed_form_parametric(spec, (1.0,), (3.0,), cone_coord(5.0, "z1"))
        assert value.cone == cone_coord(5.0, "z2")

    def test_requires_parametric(self):
        with pytest.raises(InputError):
            closed_form_parametric(
                identity_spec(1, zspace()), (1.0,), (3.0,), CONE_APEX
            )


class TestDAtPoint:
    def test_identity(self):
        spec = identity_spec(1, zspace())
        dmap = d_at_point(spec, (3.0,))
        w, cone = dmap((2.0,), cone_coord(0.5, "z1"))
        assert abs(w[0] - 2.0) < 1e-9
        assert cone == cone_coord(0.5, "z1")

    def test_square_scales_directions(self):
        dmap = d_at_point(square_spec(), (3.0,), tol=1e-6)
        for v in (-1.0, 0.5, 2.0):
            w, _ = dmap((v,), CONE_APEX)
            assert abs(w[0] - 6.0 * v) < 1e-5

    def test_zero_direction(self):
        dmap = d_at_point(square_spec(), (3.0,), tol=1e-6)
        w, _ = dmap((0.0,), CONE_APEX)
        assert abs(w[0]) < 1e-12

    def test_failure_propagates(self):
        space = zspace()
        spec = parametric_spec(
            ExprFunction(1, ("x1**(1/2)",)), id_action(space), space, space
        )
        with pytest.raises(StructuralError):
            d_at_point(spec, (0.0,), tol=1e-6)((1.0,), CONE_APEX)


class TestWrapDiscrete:
    def test_wrapper_flags_and_value(self):
        report = derive(identity_spec(1, zspace()), (1.0,), (2.0,), CONE_APEX)
        wrapped = wrap_discrete(report)
        assert wrapped.domain_discrete and wrapped.codomain_discrete
        assert wrapped.value == report.value
        assert wrapped.unwrap() is report

    def test_rejects_non_derivable(self):
        space = zspace()
        spec = parametric_spec(
            ExprFunction(1, ("x1**(1/2)",)), id_action(space), space, space
        )
        report = derive(spec, (1.0,), (0.0,), CONE_APEX, tol=1e-6)
        assert not report.derivable
        with pytest.raises(InputError):
            wrap_discrete(report)


class TestNthDerivative:
    def test_first_order_delegates(self):
        report = nth_derivative(square_spec(), 1, (1.0,), (3.0,), CONE_APEX, tol=1e-6)
        assert report.derivable
        assert abs(report.value.w[0] - 6.0) < 1e-6

    def test_identity_second_derivative(self):
        spec = identity_spec(1, zspace())
        report = nth_derivative(spec, 2, (1.0,), (3.0,), cone_coord(0.5, "z1"))
        assert report.derivable
        assert report.route == "scheme-map"
        assert abs(report.bilinear[0]) < 1e-9
        assert abs(report.base.value.w[0] - 1.0) < 1e-9
        assert report.base.value.cone == cone_coord(0.5, "z1")

    def test_square_second_derivative(self):
        # symbolic second derivative of squaring is the constant 2
        report = nth_derivative(square_spec(), 2, (1.0,), (3.0,), CONE_APEX)
        assert report.derivable
        assert abs(report.bilinear[0] - 2.0) < 1e-3

    def test_affine_second_derivative_vanishes(self):
        space = zspace()
        spec = parametric_spec(
            ExprFunction(1, ("2*x1 + 1",)), id_action(space), space, space
        )
        report = nth_derivative(spec, 2, (1.0,), (3.0,), CONE_APEX)
        assert report.derivable
        assert abs(report.bilinear[0]) < 1e-6

    def test_order_bounds(self):
        spec = square_spec()
        with pytest.raises(UnsupportedPrecisionError):
            nth_derivative(spec, 3, (1.0,), (3.0,), CONE_APEX)
        with pytest.raises(InputError):
            nth_derivative(spec, 0, (1.0,), (3.0,), CONE_APEX)


class TestObviousSpec:
    def test_base_map_drives_cone_slot(self):
        space = zspace()
        other = discrete_space(["w1", "w2"])
        base = PointMap(space, other, {"z1": "w2", "z2": "w1"})
        spec = obvious_spec(2, base)
        report = derive(spec, (1.0, 0.0), (0.5, 0.5), cone_coord(1.5, "z1"))
        assert report.derivable
        assert report.value.cone == cone_coord(1.5, "w2")
        assert max(abs(t) for t in (report.value.w[0] - 1.0, report.value.w[1])) < 1e-12

    def test_rho_tables_validated(self):
        space = zspace()
        with pytest.raises(InputError):
            parametric_spec(
                ExprFunction(1, ("x1",)),
                constant_action({"z1": "z1"}),  # misses z2
                space,
                space,
            )


def test_random_suite():
    assert suite_derive(Random("pytest-derive"), 8) == 8
