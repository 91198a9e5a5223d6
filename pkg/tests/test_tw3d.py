"""3D layer: oriented coframes, structure equations, the classical
connection, rotation covariance, and the comparisons with the canonical
construction.
"""

import dataclasses
import statistics

import numpy as np
import pytest

from contactconn.connection import canonical_partial_connection, promote
from contactconn.errors import InconsistentStructureError
from contactconn.expressions import parse_expr
from contactconn.forms import FormField, apply_vector
from contactconn.jets import eval_jet
from contactconn.registry import get_manifold
from contactconn.sampling import sample_box
from contactconn.tw3d import (
    TWCoframe,
    check_rotation_covariance,
    compare_full,
    compare_partial,
    promoted_from_invariants,
    rotate_coframe,
    solve_structure_equations,
    tw_coframe,
    tw_connection,
)

P3 = (0.3, -0.4, 0.2)


def max_coeff(fc):
    vals = [abs(fc.kappa[A][a][C].value) for A in range(3) for a in range(2) for C in range(3)]
    vals += [abs(fc.xi[A][C].value) for A in range(3) for C in range(3)]
    return max(vals)


class TestStructureEquations:
    def test_heisenberg_closed_forms(self, heisenberg):
        # flat model: every invariant vanishes
        for p in [P3, (0.0, 0.0, 0.0), (-0.7, 0.6, 0.1)]:
            cf = tw_coframe(heisenberg, p)
            td = solve_structure_equations(cf)
            assert max(abs(w.value) for w in td.omega) < 1e-12
            assert abs(td.A.value) < 1e-12
            assert abs(td.B.value) < 1e-12
            assert abs(td.R.value) < 1e-12
            assert td.residual < 1e-12

    def test_heisenberg_connection_vanishes(self, heisenberg):
        cf = tw_coframe(heisenberg, P3)
        td = solve_structure_equations(cf)
        assert max_coeff(tw_connection(td, cf)) < 1e-12

    def test_residual_small_on_curved_model(self, perturbed):
        td = solve_structure_equations(tw_coframe(perturbed, P3))
        assert td.residual < 1e-11

    def test_inconsistent_coframe_raises(self, heisenberg):
        cf = tw_coframe(heisenberg, P3)
        frame = cf.frame
        # shifting a Reeb coefficient by a function with nonzero H-gradient
        # knocks the mixed structure values off the solvable locus
        x_jet = eval_jet(parse_expr("x", heisenberg.coords), P3, 2)
        bad = dataclasses.replace(frame, c=(frame.c[0] + x_jet, frame.c[1]))
        with pytest.raises(InconsistentStructureError):
            solve_structure_equations(TWCoframe(bad, cf.coords))

    def test_rejects_higher_dimension(self):
        cs = get_manifold("n2-split").build()
        with pytest.raises(ValueError, match="3-dimensional"):
            tw_coframe(cs, (0.1, -0.3, 0.2, 0.4, 0.0))


class TestRotation:
    def test_zero_angle_is_identity(self, perturbed):
        cf = tw_coframe(perturbed, P3)
        rcf = rotate_coframe(cf, 0.0)
        base = solve_structure_equations(cf)
        rot = solve_structure_equations(rcf)
        for i in range(2):
            assert np.allclose(rcf.X[i].values(), cf.X[i].values(), atol=1e-15)
        assert abs((rot.A - base.A).value) < 1e-14
        assert abs((rot.B - base.B).value) < 1e-14
        assert abs((rot.R - base.R).value) < 1e-12

    def test_flat_model_rotated_by_x(self, heisenberg):
        # with phi = x the rotated connection form is exactly -d(phi)
        cf = tw_coframe(heisenberg, P3)
        rcf = rotate_coframe(cf, "x")
        td = solve_structure_equations(rcf)
        phi = eval_jet(parse_expr("x", heisenberg.coords), P3, 2)
        assert abs(td.omega[0].value) < 1e-13
        for a in range(2):
            want = -apply_vector(rcf.X[a], phi).value
            assert td.omega[a + 1].value == pytest.approx(want, abs=1e-12)
        # explicit values: X1' = cos(x) X1 - sin(x) X2 pairs dx to cos(x)
        assert td.omega[1].value == pytest.approx(-np.cos(0.3), abs=1e-12)
        assert td.omega[2].value == pytest.approx(-np.sin(0.3), abs=1e-12)
        assert abs(td.A.value) < 1e-12
        assert abs(td.B.value) < 1e-12
        assert abs(td.R.value) < 1e-11

    @pytest.mark.parametrize("model", ["heisenberg", "heisenberg-perturbed"])
    def test_random_polynomial_covariance(self, model, rng):
        cs = get_manifold(model).build()
        coords = cs.coords
        for _ in range(6):
            coeff = rng.uniform(-1.0, 1.0, size=7)
            phi = (
                f"({coeff[0]}) + ({coeff[1]})*x + ({coeff[2]})*y + ({coeff[3]})*z"
                f" + ({coeff[4]})*x^2 + ({coeff[5]})*y*z + ({coeff[6]})*z^2"
            )
            p = tuple(rng.uniform(-0.6, 0.6, size=3))
            out = check_rotation_covariance(tw_coframe(cs, p), phi)
            assert out["passed"]
            assert out["omega_residual"] < 1e-9
            assert out["ab_residual"] < 1e-9
            assert out["r_residual"] < 1e-9
        del coords

    def test_classical_action_invariant(self, perturbed):
        # the classical connection does not depend on the coframe choice
        alpha = FormField.one_form(
            [parse_expr(s, perturbed.coords) for s in ("z", "x*y", "1 + y")]
        )
        cf = tw_coframe(perturbed, P3)
        rcf = rotate_coframe(cf, "x - y^2")
        tw1 = tw_connection(solve_structure_equations(cf), cf)
        tw2 = tw_connection(solve_structure_equations(rcf), rcf)
        m1 = tw1.coordinate_action(alpha, P3)
        m2 = tw2.coordinate_action(alpha, P3)
        assert np.max(np.abs(m1 - m2)) < 1e-9


class TestComparisons:
    @pytest.mark.parametrize(
        "model", ["heisenberg", "heisenberg-aniso", "heisenberg-perturbed", "sphere-chart"]
    )
    def test_partial_agreement(self, model):
        spec = get_manifold(model)
        p = tuple(0.4 * lo for lo, _ in spec.box)
        out = compare_partial(spec.build(), p)
        assert out["passed"]
        assert out["e_agreement_residual"] < 1e-9
        assert out["theta_row_difference_residual"] < 1e-9

    @pytest.mark.parametrize(
        "model", ["heisenberg", "heisenberg-aniso", "heisenberg-perturbed", "sphere-chart"]
    )
    def test_full_comparison(self, model):
        spec = get_manifold(model)
        p = tuple(0.4 * hi for _, hi in spec.box)
        out = compare_full(spec.build(), p)
        assert out["passed"]
        assert out["difference_tensor_residual"] < 1e-8
        assert out["torsion_e_rows_residual"] < 1e-8
        assert out["torsion_theta_row_vs_minus_levi"] < 1e-8
        assert out["r_drift"] < 1e-8

    def test_theta_rows_really_differ(self, perturbed):
        # the two torsions cannot both be zero on theta_hat: the promoted
        # one pairs H wedge H to minus the nondegenerate 2-form
        out = compare_full(perturbed, P3)
        assert out["torsion_theta_row_vs_zero"] == pytest.approx(1.0, abs=1e-10)

    @pytest.mark.parametrize(
        "model", ["heisenberg", "heisenberg-aniso", "heisenberg-perturbed", "sphere-chart"]
    )
    def test_promotion_matches_closed_form(self, model):
        spec = get_manifold(model)
        cs = spec.build()
        for frac in (0.3, -0.5):
            p = tuple(frac * hi for _, hi in spec.box)
            cf = tw_coframe(cs, p)
            td = solve_structure_equations(cf)
            fc = promote(canonical_partial_connection(cs, p, frame=cf.frame), cs, p)
            ref = promoted_from_invariants(td, cf)
            diff = max(
                abs((fc.kappa[A][a][C] - ref.kappa[A][a][C]).value)
                for A in range(3)
                for a in range(2)
                for C in range(3)
            )
            diff = max(
                diff,
                max(
                    abs((fc.xi[A][C] - ref.xi[A][C]).value)
                    for A in range(3)
                    for C in range(3)
                ),
            )
            assert diff < 1e-8


class TestSphereRegression:
    def test_constant_curvature(self):
        spec = get_manifold("sphere-chart")
        cs = spec.build()
        rs = []
        for p in sample_box(spec.box, 12, spec.seed):
            td = solve_structure_equations(tw_coframe(cs, p))
            assert abs(td.A.value) < 1e-9
            assert abs(td.B.value) < 1e-9
            # frozen regression value, first measured by this pipeline
            assert abs(td.R.value - (-4.0)) < 1e-7
            rs.append(td.R.value)
        assert statistics.pstdev(rs) < 1e-7
