import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from bregman_manifold.divergence import check_pythagoras
from bregman_manifold.exceptions import (DegenerateVector, DomainError, NoConvergence,
                                         SingularSystem)
from bregman_manifold.generator import ExtendedKL, ItakuraSaito, Mahalanobis
from bregman_manifold.triangle import (EDGE_TYPES, GeodesicTriangle, angle_sum,
                                       double_right_flats, dual_pythagoras_flats,
                                       dual_pythagoras_report, dual_triangle, interior_angles,
                                       orientation_consistent, right_angle_flat,
                                       search_triple_right, solve_double_right,
                                       solve_dual_pythagoras, solve_dual_pythagoras_is2d,
                                       solve_prescribed_angles)

IS = ItakuraSaito(2)
E2 = Mahalanobis(np.eye(2))

# single right angle at q: the r below was solved for with q's right angle and p's
# published angle, then frozen
SINGLE_P = (1.2885253880864789, 3.4136709176658546)
SINGLE_Q = (4.9336774965526065, 1.656631440605195)
SINGLE_R = (0.8088187804547342, 0.6917954427589103)

# double right angles: Cramer solutions (Newton agrees to ~3e-13), frozen
DOUBLE = [
    ((1.7372662352145616, 1.148396070619242), (1.241571556333764, 1.3768479188317202),
     (0.8355616253777197, 0.29345829149542924), 12.82764159141668),
    ((1.7128340504770114, 1.2510418358297621), (1.446857135939727, 1.7930125176801988),
     (0.2034206443322576, 0.8558668530611174), 6.595093466701163),
]

DUAL_PYTH = [
    ((0.7273955397832663, 0.3279475469672596), (0.46251884248040354, 0.3902872167636309),
     (0.3065847355580658, 0.13822426240588664)),
    ((0.9704854205553236, 1.4760141668100146), (1.141690604206171, 0.43035569351200803),
     (0.2264761824188501, 0.34444830042268043)),
    ((1.3163859900481611, 1.965380252548788), (1.5136826962585432, 1.2440688670072433),
     (0.6359397574807304, 0.9494657726625966)),
    ((0.9511702030611633, 1.291145089053253), (0.3277859642409383, 1.906447912395776),
     (0.1077217190919158, 0.14622448026891943)),
]


class TestTriangle:
    def test_degenerate(self):
        with pytest.raises(DegenerateVector):
            GeodesicTriangle.from_theta(IS, [1, 1], [1, 1], [2, 1])

    def test_edge_types(self):
        assert len(EDGE_TYPES) == 8
        with pytest.raises(ValueError):
            GeodesicTriangle.from_theta(IS, [1, 1], [2, 1], [1, 2], "ppx")

    def test_dict_round_trip(self):
        T = GeodesicTriangle.from_theta(IS, [1, 1], [2, 1], [1, 2], "pdp")
        U = GeodesicTriangle.from_dict(IS, T.to_dict())
        assert U.edges == "pdp" and np.array_equal(U.r.theta, T.r.theta)
        with pytest.raises(ValueError):
            GeodesicTriangle.from_dict(IS, {"p": [1, 1]})

    def test_dual_triangle(self):
        T = GeodesicTriangle.from_theta(IS, [1, 1], [2, 1], [1, 2], "pdp")
        assert dual_triangle(T).edges == "dpd"

    def test_euclidean_sum(self):
        T = GeodesicTriangle.from_theta(E2, [0, 0], [1, 0], [0.3, 2])
        assert angle_sum(T) == pytest.approx(math.pi, abs=1e-12)
        rep = interior_angles(GeodesicTriangle.from_theta(E2, [0, 0], [1, 0], [0, 1]))
        assert rep.alpha_p == pytest.approx(math.pi / 2, abs=1e-15)
        assert rep.as_dict(degrees=True)["alpha_q"] == pytest.approx(45.0)

    def test_mahalanobis_all_types_agree(self):
        g = Mahalanobis(np.array([[2.0, 0.5], [0.5, 1.0]]))
        sums = [angle_sum(GeodesicTriangle.from_theta(g, [0, 0], [1, 0.2], [0.3, 2], e))
                for e in EDGE_TYPES]
        assert np.ptp(sums) < 1e-10
        assert sums[0] == pytest.approx(math.pi, abs=1e-12)

    def test_single_right(self):
        rep = interior_angles(GeodesicTriangle.from_theta(IS, SINGLE_P, SINGLE_Q, SINGLE_R))
        assert rep.alpha_p == pytest.approx(1.8276508176456936, abs=1e-9)
        assert rep.alpha_q == pytest.approx(1.5707963267948966, abs=1e-9)
        assert rep.alpha_r == pytest.approx(1.1542328404967954, abs=1e-9)
        assert rep.total == pytest.approx(4.552679984937385, abs=1e-9)

    def test_two_pi_reference(self):
        T = GeodesicTriangle.from_theta(IS, (0.5, 0.5), (0.75, 0.75), (0.95, 0.25))
        a, b = np.degrees(angle_sum(T)), np.degrees(angle_sum(dual_triangle(T)))
        assert a == pytest.approx(160.19318300825412, abs=1e-6)
        assert b == pytest.approx(199.80681699174588, abs=1e-6)
        assert a + b == pytest.approx(360.0, abs=1e-9)
        assert orientation_consistent(T)


class TestRightAngles:
    def test_flat_contains_q(self):
        f = right_angle_flat(IS, [1, 2], [2, 1])
        assert f.contains([2, 1])

    @pytest.mark.parametrize("p, q, r, third", DOUBLE)
    def test_double_right(self, p, q, r, third):
        got = solve_double_right(IS, p, q)
        assert np.allclose(got, r, rtol=0, atol=1e-12)
        deg = interior_angles(GeodesicTriangle.from_theta(IS, p, q, got)).as_dict(degrees=True)
        assert deg["alpha_p"] == pytest.approx(90, abs=1e-6)
        assert deg["alpha_q"] == pytest.approx(90, abs=1e-6)
        assert deg["alpha_r"] == pytest.approx(third, abs=1e-9)
        fq, fp = double_right_flats(IS, p, q)
        assert fq.contains(got) and fp.contains(got)

    def test_double_right_mahalanobis_singular(self):
        with pytest.raises(SingularSystem):
            solve_double_right(E2, [0, 0], [1, 0])

    def test_double_right_out_of_domain(self):
        # flats meet at negative coordinates for this pair
        with pytest.raises((DomainError, SingularSystem)):
            solve_double_right(IS, [1, 1], [1.1, 1.0])

    @pytest.mark.parametrize("p, q, r, third", DOUBLE)
    def test_prescribed_agrees_with_cramer(self, p, q, r, third):
        got = solve_prescribed_angles(IS, p, q, math.pi / 2, math.pi / 2,
                                      initial=np.asarray(r) * 1.05)
        assert np.allclose(got, r, atol=1e-10)

    def test_prescribed_single_right(self):
        got = solve_prescribed_angles(IS, SINGLE_P, SINGLE_Q, math.pi / 2, 1.8276508176456936,
                                      initial=[1.0, 1.0])
        assert np.allclose(got, SINGLE_R, atol=1e-9)

    def test_prescribed_infeasible(self):
        with pytest.raises(NoConvergence):
            solve_prescribed_angles(E2, [0, 0], [1, 0], math.pi / 2, math.pi / 2, initial=[0.5, 1])

    def test_prescribed_bad_angle(self):
        with pytest.raises(ValueError):
            solve_prescribed_angles(IS, [1, 1], [2, 1], 0.0, 1.0, initial=[1, 2])


class TestDualPythagoras:
    @pytest.mark.parametrize("p, q, r", DUAL_PYTH)
    def test_closed_form(self, p, q, r):
        got = solve_dual_pythagoras_is2d(p, q)
        assert np.allclose(got, r, rtol=0, atol=1e-9)
        rep = check_pythagoras(IS, p, q, got)
        assert abs(rep.primal_residual) < 1e-9 * rep.primal_scale
        assert abs(rep.dual_residual) < 1e-9 * rep.dual_scale

    @pytest.mark.parametrize("p, q, r", DUAL_PYTH)
    def test_generic_solver_agrees(self, p, q, r):
        roots = solve_dual_pythagoras(IS, p, q)
        assert any(np.allclose(x, r, atol=1e-9) for x in roots)

    def test_report(self):
        p, q, r = DUAL_PYTH[0]
        rep = dual_pythagoras_report(IS, p, q, solve_dual_pythagoras_is2d(p, q))
        assert abs(rep["eta_flat"]) < 1e-14 and abs(rep["theta_flat"]) < 1e-14
        assert rep["pythagoras"].holds()

    def test_flats_pass_through_q(self):
        p, q, _ = DUAL_PYTH[1]
        fe, ft = dual_pythagoras_flats(IS, p, q)
        assert fe.contains(IS.gradient(np.asarray(q))) and ft.contains(q)

    def test_degenerate(self):
        with pytest.raises(DegenerateVector):
            solve_dual_pythagoras_is2d([1, 1], [1, 1])


class TestTripleRight:
    def test_small_budget_not_found(self):
        res = search_triple_right(IS, budget=200, seed=3)
        assert not res.found and res.starts_used > 0 and res.best_residual > 1e-9

    def test_euclidean_not_found(self):
        res = search_triple_right(E2, budget=100, seed=0)
        assert not res.found

    def test_needs_2d(self):
        with pytest.raises(ValueError):
            search_triple_right(ExtendedKL(3))


unit = arrays(np.float64, (3, 2), elements=st.floats(0.05, 1.0))


@settings(max_examples=150, deadline=None)
@given(unit)
def test_two_pi_for_consistent_orientation(v):
    try:
        T = GeodesicTriangle.from_theta(IS, *v)
        a, b = v[1] - v[0], v[2] - v[0]
        area = abs(a[0] * b[1] - a[1] * b[0])
        if area < 1e-3:
            return
        if not orientation_consistent(T):
            return
    except DegenerateVector:
        return
    total = angle_sum(T) + angle_sum(dual_triangle(T))
    assert total == pytest.approx(2 * math.pi, abs=1e-9)


@settings(max_examples=150, deadline=None)
@given(unit, st.sampled_from(EDGE_TYPES))
def test_angles_in_range(v, edges):
    try:
        T = GeodesicTriangle.from_theta(IS, *v, edges=edges)
        rep = interior_angles(T)
    except DegenerateVector:
        return
    for a in (rep.alpha_p, rep.alpha_q, rep.alpha_r):
        assert 0.0 <= a <= math.pi
