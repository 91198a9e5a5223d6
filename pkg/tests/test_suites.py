"""Suite runner: screening, skip accounting, availability rules, and
report assembly.
"""

import pytest

from contactconn.errors import AllPointsSkippedError, SuiteUnavailableError
from contactconn.registry import ManifoldSpec, get_manifold
from contactconn.report import render_report
from contactconn.suites import run_suites

ALL_3D = ["contact", "canonical", "promotion", "tw-compare", "rotation"]


def half_degenerate_spec():
    # H-metric is x * dx^2 + dy^2: positive definite only for x > 0,
    # so roughly half the box gets screened out
    return ManifoldSpec(
        name="half",
        coords=("x", "y", "z"),
        theta=("-y", "0", "1"),
        g=(("x", "0", "0"), ("0", "1", "0"), ("0", "0", "0")),
        box=((-0.9, 0.9),) * 3,
        points=20,
        seed=42,
    )


class TestRunSuites:
    @pytest.mark.parametrize(
        "name", ["heisenberg", "heisenberg-aniso", "heisenberg-perturbed", "sphere-chart"]
    )
    def test_three_dimensional_builtins_pass(self, name):
        rep = run_suites(get_manifold(name), ALL_3D, points=5)
        assert rep.passed
        assert rep.skipped_points == 0
        assert {s.name for s in rep.suites} == set(ALL_3D)
        assert all(s.points_used == 5 for s in rep.suites)

    def test_five_dimensional_builtin_passes(self):
        rep = run_suites(get_manifold("n2-split"), ["contact", "canonical", "promotion"], points=5)
        assert rep.passed
        assert rep.dim == 5

    def test_report_metadata(self):
        spec = get_manifold("heisenberg")
        rep = run_suites(spec, ["contact"], points=3, seed=11)
        assert rep.manifold == "heisenberg"
        assert rep.seed == 11
        assert rep.requested_points == 3
        assert len(rep.points) == 3
        assert all(not r.skipped for r in rep.points)
        assert all(r.mu == pytest.approx(1.0, abs=1e-12) for r in rep.points)

    def test_defaults_come_from_spec(self):
        spec = half_degenerate_spec()
        rep = run_suites(spec, ["contact"])
        assert rep.requested_points == 20
        assert rep.seed == 42

    def test_param_overrides_flow_through(self):
        rep = run_suites(get_manifold("heisenberg-aniso"), ["contact"], points=2,
                         param_overrides={"b": 3.0})
        assert all(r.mu == pytest.approx(3.0, abs=1e-12) for r in rep.points)

    def test_deterministic(self):
        spec = get_manifold("heisenberg-perturbed")
        a = render_report(run_suites(spec, ALL_3D, points=4))
        b = render_report(run_suites(spec, ALL_3D, points=4))
        assert a == b


class TestScreening:
    def test_skip_accounting(self):
        rep = run_suites(half_degenerate_spec(), ["contact", "canonical"])
        assert rep.requested_points == 20
        assert rep.skipped_points == 12
        reasons = {r.reason for r in rep.points if r.skipped}
        assert reasons == {
            "metric restricted to the contact distribution is not positive definite"
        }
        assert rep.passed
        assert all(s.points_used == 8 for s in rep.suites)

    def test_non_contact_points_report_reason(self):
        # theta = dz + x dx is contact only where d(theta) pairing survives;
        # this one is never contact, so every record says why
        spec = ManifoldSpec(
            name="never",
            coords=("x", "y", "z"),
            theta=("x", "0", "1"),
            g=(("1", "0", "0"), ("0", "1", "0"), ("0", "0", "0")),
            box=((-0.9, 0.9),) * 3,
            points=4,
            seed=1,
        )
        with pytest.raises(AllPointsSkippedError):
            run_suites(spec, ["contact"])

    def test_all_points_skipped(self):
        spec = ManifoldSpec(
            name="nowhere",
            coords=("x", "y", "z"),
            theta=("-y", "0", "1"),
            g=(("x", "0", "0"), ("0", "1", "0"), ("0", "0", "0")),
            box=((-0.9, -0.1), (-0.9, 0.9), (-0.9, 0.9)),
            points=6,
            seed=2,
        )
        with pytest.raises(AllPointsSkippedError, match="all 6 sampled points"):
            run_suites(spec, ["canonical"])


class TestAvailability:
    def test_unknown_suite(self):
        with pytest.raises(SuiteUnavailableError, match="unknown suite 'spectral'"):
            run_suites(get_manifold("heisenberg"), ["spectral"], points=1)

    def test_empty_request(self):
        with pytest.raises(SuiteUnavailableError, match="no suites requested"):
            run_suites(get_manifold("heisenberg"), [], points=1)

    @pytest.mark.parametrize("name", ["tw-compare", "rotation"])
    def test_3d_only_suites_guarded(self, name):
        with pytest.raises(SuiteUnavailableError, match=f"suite {name!r} unavailable for dim 5"):
            run_suites(get_manifold("n2-split"), [name], points=1)

    def test_guard_fires_before_sampling(self):
        # even with an impossible point budget the dim check comes first
        with pytest.raises(SuiteUnavailableError, match="unavailable for dim 5"):
            run_suites(get_manifold("n2-split"), ["contact", "rotation"], points=10**9)

    def test_duplicates_collapse(self):
        rep = run_suites(get_manifold("heisenberg"), ["contact", "contact"], points=2)
        assert [s.name for s in rep.suites] == ["contact"]


class TestFailurePropagation:
    def test_failing_residual_fails_report(self, monkeypatch):
        import contactconn.suites as suites_mod
        from contactconn.report import SuiteResult

        def broken(cs, usable):
            return SuiteResult(
                name="contact", passed=False, residuals={"duality": 1.0}, points_used=len(usable)
            )

        monkeypatch.setattr(suites_mod, "_suite_contact", broken)
        rep = run_suites(get_manifold("heisenberg"), ["contact"], points=2)
        assert rep.passed is False
        assert rep.suites[0].residuals["duality"] == 1.0
