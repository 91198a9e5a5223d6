"""The classical pseudo-Hermitian connection in dimension 3, and its
comparison with the canonical one.

Pipeline: an oriented adapted coframe (theta_hat, e1, e2) with
d(theta_hat) = e1 ^ e2; a least-squares solve of the six structure
equations

    de1 =  omega ^ e2 + A theta ^ e1 + B theta ^ e2
    de2 = -omega ^ e1 + B theta ^ e1 - A theta ^ e2

for the five unknowns (omega_theta, omega_1, omega_2, A, B); the scalar
curvature R as the top-form coefficient of d(omega) against the contact
form; the connection with nabla theta_hat = 0, nabla e1 = omega x e2,
nabla e2 = -omega x e1; and the two comparison reports against the
canonical partial connection and its promotion.

The normal equations of the 6x5 system decouple, so the least-squares
solution is written in closed form; the single redundancy leaves the
residual |c1 + c5| / sqrt(2), which vanishes for any coframe coming from
an honest contact structure (d squared = 0) and is surfaced as a
diagnostic for upstream bugs.

d(omega) is evaluated on (X1, X2) through the frame bracket expansion
X1(omega(X2)) - X2(omega(X1)) - omega([X1, X2]), with the bracket read
off the structure values; this works entirely from the jets of omega's
frame components and never needs a derivative of the Reeb coefficient,
which the order-2 budget could not supply.
"""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass

from .connection import (
    FullConnection,
    canonical_partial_connection,
    full_torsion,
    promote,
)
from .contact import AdaptedFrame, ContactStructure, adapted_frame
from .errors import DegenerateFrameError, InconsistentStructureError
from .expressions import Expr, parse_expr
from .forms import KFormValue, VectorValue, apply_vector
from .jets import Jet, eval_jet

STRUCTURE_RESIDUAL_TOL = 1e-9


@dataclass(frozen=True)
class TWCoframe:
    """Oriented adapted coframe at a point of a 3-dimensional structure.

    Wraps the adapted frame; the coframe elements are theta_hat and the
    two dual 1-forms e(0), e(1) with d(theta_hat)(X1, X2) = +1.
    """

    frame: AdaptedFrame
    coords: tuple[str, ...]

    @property
    def p(self) -> tuple[float, ...]:
        return self.frame.p

    @property
    def theta_hat(self) -> KFormValue:
        return self.frame.theta_hat

    def e(self, b: int) -> KFormValue:
        return self.frame.e(b)

    @property
    def X(self) -> tuple[VectorValue, ...]:
        return self.frame.X

    @property
    def T(self) -> VectorValue:
        return self.frame.T


@dataclass(frozen=True)
class TWData:
    """Solved structure-equation data at a point.

    omega holds the coframe components (omega_theta, omega_1, omega_2);
    the Reeb component carries jet order 0, the rest order 1, which is
    exactly enough to differentiate omega once for R.
    """

    omega: tuple[Jet, Jet, Jet]
    A: Jet
    B: Jet
    R: Jet
    residual: float


def tw_coframe(cs: ContactStructure, p, order: int = 2) -> TWCoframe:
    """Adapted coframe of a 3-dimensional structure, oriented so that
    d(theta_hat)(X1, X2) = +1."""
    if cs.dim != 3:
        raise ValueError(f"requires a 3-dimensional structure, got dim {cs.dim}")
    frame = adapted_frame(cs, p, order)
    pairing = frame.Omega[0][1].value
    if abs(pairing - 1.0) > 1e-10:
        raise DegenerateFrameError(
            f"oriented coframe pairing d(theta_hat)(X1, X2) = {pairing!r}, expected 1"
        )
    return TWCoframe(frame, tuple(cs.coords))


def solve_structure_equations(cf: TWCoframe, p=None) -> TWData:
    """Least-squares solve for (omega, A, B) and the curvature R.

    The six scalar equations pair de1, de2 against the basis 2-forms;
    their normal equations decouple into the closed form below. The lone
    redundancy |c1 + c5| / sqrt(2) is the least-squares residual and must
    sit at rounding level.
    """
    frame = cf.frame
    de1 = frame.de_values(0)
    de2 = frame.de_values(1)
    c1, c2, c3 = de1[0][1], de1[0][2], de1[1][2]
    c4, c5, c6 = de2[0][1], de2[0][2], de2[1][2]

    A = (c1 - c5) * 0.5
    B = (c2 + c4) * 0.5
    w_theta = (c2 - c4) * 0.5
    w1 = c3
    w2 = c6

    residual = abs((c1 + c5).value) / math.sqrt(2.0)
    if residual > STRUCTURE_RESIDUAL_TOL:
        raise InconsistentStructureError(
            f"structure equations are inconsistent: residual {residual:.3e} "
            f"(the input coframe does not close up)"
        )

    # d(omega)(X1, X2) through the bracket: [X1, X2] has Reeb component
    # -Omega_12 = -1 and H components -D^b_12.
    bracket_omega = -(w_theta * frame.Omega[0][1]) - sum(
        (frame.D[b][0][1] * [w1, w2][b] for b in range(2)),
        start=Jet.constant(0.0, frame.dim, 2),
    )
    R = apply_vector(frame.X[0], w2) - apply_vector(frame.X[1], w1) - bracket_omega
    return TWData(omega=(w_theta, w1, w2), A=A, B=B, R=R, residual=residual)


def tw_connection(td: TWData, cf: TWCoframe) -> FullConnection:
    """Connection with nabla theta_hat = 0, nabla e1 = omega x e2,
    nabla e2 = -omega x e1, as coefficient data over the full coframe."""
    frame = cf.frame
    dim = frame.dim
    zero = Jet.constant(0.0, dim, 2)
    w_theta, w1, w2 = td.omega
    wH = (w1, w2)

    kappa = [[[zero] * 3 for _ in range(2)] for _ in range(3)]
    xi = [[zero] * 3 for _ in range(3)]
    for a in range(2):
        kappa[1][a][2] = wH[a]
        kappa[2][a][1] = -wH[a]
    xi[1][2] = w_theta
    xi[2][1] = -w_theta
    return FullConnection(
        frame=frame,
        kappa=tuple(tuple(tuple(r) for r in rows) for rows in kappa),
        xi=tuple(tuple(r) for r in xi),
        partial=None,
    )


def promoted_from_invariants(td: TWData, cf: TWCoframe) -> FullConnection:
    """The promoted canonical connection assembled directly from
    (omega, A, B, R): the H-coefficients of the classical connection plus
    the Reeb-direction shift by R.

    nabla theta_hat = e1 x e2 - e2 x e1 on H directions,
    nabla e1 = (omega - R theta_hat) x e2, nabla e2 the negative mirror.
    Used to cross-check the general promotion against its closed form.
    """
    frame = cf.frame
    zero = Jet.constant(0.0, frame.dim, 2)
    w_theta, w1, w2 = td.omega
    wH = (w1, w2)

    kappa = [[[zero] * 3 for _ in range(2)] for _ in range(3)]
    xi = [[zero] * 3 for _ in range(3)]
    for a in range(2):
        for c in range(2):
            kappa[0][a][c + 1] = frame.Omega[a][c]
        kappa[1][a][2] = wH[a]
        kappa[2][a][1] = -wH[a]
    xi[1][2] = w_theta - td.R
    xi[2][1] = -(w_theta - td.R)
    return FullConnection(
        frame=frame,
        kappa=tuple(tuple(tuple(r) for r in rows) for rows in kappa),
        xi=tuple(tuple(r) for r in xi),
        partial=None,
    )


def _phi_jet(cf: TWCoframe, phi, order: int = 2) -> Jet:
    if isinstance(phi, Jet):
        return phi
    if isinstance(phi, (int, float)):
        return Jet.constant(float(phi), cf.frame.dim, order)
    e = parse_expr(phi, cf.coords) if isinstance(phi, str) else phi
    return eval_jet(e, cf.p, order)


def rotate_coframe(cf: TWCoframe, phi, p=None) -> TWCoframe:
    """Coframe rotated by the angle function phi:

        e1' = cos(phi) e1 - sin(phi) e2,  e2' = sin(phi) e1 + cos(phi) e2

    and the frame vectors by the same matrix, which keeps duality and the
    orientation pairing d(theta_hat)(X1', X2') = +1 (the matrix has
    determinant one). The structure values are recomputed for the new
    coframe; everything else is untouched.
    """
    frame = cf.frame
    ph = _phi_jet(cf, phi)
    co, si = ph.cos(), ph.sin()

    rot = ((co, -si), (si, co))
    f = tuple(
        frame.f[0].scale(rot[b][0]) + frame.f[1].scale(rot[b][1]) for b in range(2)
    )
    c = tuple(rot[b][0] * frame.c[0] + rot[b][1] * frame.c[1] for b in range(2))
    X = tuple(
        frame.X[0].scale(rot[b][0]) + frame.X[1].scale(rot[b][1]) for b in range(2)
    )

    from .forms import d_from_jets

    df = tuple(d_from_jets(fb) for fb in f)
    D = tuple(
        tuple(
            tuple(
                df[b].evaluate(X[a], X[cc]) + c[b] * frame.Omega[a][cc]
                for cc in range(2)
            )
            for a in range(2)
        )
        for b in range(2)
    )
    new_frame = dataclasses.replace(frame, f=f, c=c, X=X, D=D)
    return TWCoframe(new_frame, cf.coords)


def check_rotation_covariance(cf: TWCoframe, phi, p=None) -> dict:
    """Solve the structure equations in the original and phi-rotated
    coframes and compare against the predicted transformation:

        omega' = omega - d(phi)      (components taken in each coframe's
                                      own frame vectors)
        (A', B') = Rot(2 phi) (A, B)

    Returns residuals plus the curvature drift |R' - R|, which the
    transformation law leaves invariant.
    """
    base = solve_structure_equations(cf)
    rotated_cf = rotate_coframe(cf, phi)
    rot = solve_structure_equations(rotated_cf)

    ph = _phi_jet(cf, phi)
    co, si = ph.cos(), ph.sin()
    frame = cf.frame

    # omega' components against (T, X1', X2'); omega is paired with the
    # rotated frame vectors before subtracting the phi derivative.
    w_theta, w1, w2 = base.omega
    exp_theta = w_theta - apply_vector(frame.T, ph)
    exp_1 = (co * w1 - si * w2) - apply_vector(rotated_cf.X[0], ph)
    exp_2 = (si * w1 + co * w2) - apply_vector(rotated_cf.X[1], ph)
    omega_residual = max(
        abs((rot.omega[0] - exp_theta).value),
        abs((rot.omega[1] - exp_1).value),
        abs((rot.omega[2] - exp_2).value),
    )

    co2 = co * co - si * si
    si2 = (co * si) * 2.0
    exp_A = co2 * base.A - si2 * base.B
    exp_B = si2 * base.A + co2 * base.B
    ab_residual = max(abs((rot.A - exp_A).value), abs((rot.B - exp_B).value))

    r_residual = abs((rot.R - base.R).value)
    passed = omega_residual < 1e-9 and ab_residual < 1e-9
    return {
        "passed": passed,
        "omega_residual": omega_residual,
        "ab_residual": ab_residual,
        "r_residual": r_residual,
        "structure_residuals": (base.residual, rot.residual),
    }


def compare_partial(cs: ContactStructure, p) -> dict:
    """Canonical partial connection against the H-part of the classical
    one, in the shared adapted coframe.

    They must agree on e1, e2 (coefficients omega_1, omega_2); on
    theta_hat the canonical one produces e1 x e2 - e2 x e1 where the
    classical one produces zero, so the difference there is reported
    against that fixed tensor.
    """
    cf = tw_coframe(cs, p)
    frame = cf.frame
    td = solve_structure_equations(cf)
    conn = canonical_partial_connection(cs, p, frame=frame)
    w1, w2 = td.omega[1], td.omega[2]
    wH = (w1, w2)

    e_agreement = 0.0
    for a in range(2):
        kap = conn.kappa(a)
        expected = [[0.0, 0.0], [0.0, 0.0]]
        expected[0][1] = wH[a].value
        expected[1][0] = -wH[a].value
        for b in range(2):
            for c in range(2):
                e_agreement = max(
                    e_agreement, abs(kap[b + 1][c + 1].value - expected[b][c])
                )

    theta_diff = 0.0
    levi = ((0.0, 1.0), (-1.0, 0.0))
    for a in range(2):
        kap = conn.kappa(a)
        for c in range(2):
            theta_diff = max(theta_diff, abs(kap[0][c + 1].value - levi[a][c]))

    passed = e_agreement < 1e-9 and theta_diff < 1e-9
    return {
        "passed": passed,
        "e_agreement_residual": e_agreement,
        "theta_row_difference_residual": theta_diff,
        "structure_residual": td.residual,
    }


def compare_full(cs: ContactStructure, p) -> dict:
    """Promoted canonical connection against the classical one.

    Checks, each componentwise:
      - the difference tensor equals R theta_hat x J(sigma) on the
        coframe H-part and e1 x e2 - e2 x e1 on theta_hat;
      - the promoted connection's torsion has e-rows
        theta_hat ^ [[A, B + R], [B - R, -A]] and no e ^ e part;
      - the torsion's theta_hat row, reported against both candidate
        values 0 and minus the nondegenerate 2-form (the latter is what
        the construction actually produces; the gate uses it).

    Also extracts R from the difference tensor and reports its drift from
    the structure-equation R.
    """
    cf = tw_coframe(cs, p)
    frame = cf.frame
    td = solve_structure_equations(cf)
    conn = canonical_partial_connection(cs, p, frame=frame)
    fc = promote(conn, cs, p)
    tw = tw_connection(td, cf)

    # J on the coframe H-part: J e1 = -e2, J e2 = e1 (matrix of the
    # orientation 2-form).
    R = td.R.value
    diff_residual = 0.0
    for A in range(3):
        for a in range(2):
            for C in range(3):
                d = fc.kappa[A][a][C].value - tw.kappa[A][a][C].value
                expected = 0.0
                if A == 0 and C >= 1:
                    expected = frame.Omega[a][C - 1].value
                diff_residual = max(diff_residual, abs(d - expected))
        for C in range(3):
            d = fc.xi[A][C].value - tw.xi[A][C].value
            expected = 0.0
            if A == 1 and C == 2:
                expected = -R
            if A == 2 and C == 1:
                expected = R
            diff_residual = max(diff_residual, abs(d - expected))

    r_extracted = -(fc.xi[1][2].value - tw.xi[1][2].value)
    r_drift = abs(r_extracted - R)

    ft = full_torsion(fc)
    Av, Bv = td.A.value, td.B.value
    e_rows_expected = (
        ((Av, Bv + R), (0.0,)),
        ((Bv - R, -Av), (0.0,)),
    )
    torsion_e_residual = 0.0
    for b in range(2):
        row = ft.comps[b + 1]
        mixed, hh = e_rows_expected[b]
        torsion_e_residual = max(
            torsion_e_residual,
            abs(row[0][1].value - mixed[0]),
            abs(row[0][2].value - mixed[1]),
            abs(row[1][2].value - hh[0]),
        )

    theta = ft.comps[0]
    theta_vs_zero = max(abs(theta[P][Q].value) for P in range(3) for Q in range(3))
    theta_vs_minus_levi = max(
        abs(theta[0][1].value),
        abs(theta[0][2].value),
        abs(theta[1][2].value + frame.Omega[0][1].value),
    )

    passed = (
        diff_residual < 1e-8
        and torsion_e_residual < 1e-8
        and theta_vs_minus_levi < 1e-8
    )
    return {
        "passed": passed,
        "difference_tensor_residual": diff_residual,
        "torsion_e_rows_residual": torsion_e_residual,
        "torsion_theta_row_vs_zero": theta_vs_zero,
        "torsion_theta_row_vs_minus_levi": theta_vs_minus_levi,
        "r_from_difference_tensor": r_extracted,
        "r_drift": r_drift,
        "structure_residual": td.residual,
    }
