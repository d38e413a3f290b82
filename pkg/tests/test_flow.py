import numpy as np
import pytest
from scipy.optimize import brentq

from milnorvf import corpus
from milnorvf.errors import PreconditionError
from milnorvf.flow import (
    RhoRegularityError,
    StepperOptions,
    Trajectory,
    V1DegeneracyError,
    fiber_tangent_project,
    flow_to_sphere,
    mvf,
    trajectory_csv,
    trajectory_report,
    tube_starts,
)
from milnorvf.germ import PolyMapGerm
from milnorvf.milnor import analyze_point, milnor_residual, omegas, sample_milnor_set
from milnorvf.mixed import realify

from conftest import P


def test_projection_is_idempotent_and_orthogonal():
    rng = np.random.default_rng(0)
    om = rng.normal(size=(2, 5))
    v = rng.normal(size=5)
    w = fiber_tangent_project(om, v)
    assert np.allclose(om @ w, 0.0, atol=1e-12)
    assert np.allclose(fiber_tangent_project(om, w), w, atol=1e-12)
    assert np.allclose(fiber_tangent_project(np.zeros((0, 5)), v), v)


def test_projection_rejects_dependent_normals():
    om = np.array([[1.0, 0.0, 0.0], [2.0, 0.0, 0.0]])
    with pytest.raises(PreconditionError):
        fiber_tangent_project(om, [1.0, 1.0, 1.0])


def test_projection_accepts_analysis_point(xy_xz):
    ap = analyze_point(xy_xz, [1.0, 0.3, 0.2])
    w = fiber_tangent_project(ap, [1.0, 2.0, 3.0])
    assert np.allclose(ap.omegas @ w, 0.0, atol=1e-12)


def test_mvf_at_p(xy_xz):
    s = mvf(xy_xz, P)
    assert np.allclose(s.nu, [2 ** 0.5, 1.0, 1.0], atol=1e-12)
    assert s.c2 == pytest.approx(8.0, abs=1e-10)
    assert s.c3 == pytest.approx(16.0, abs=1e-10)
    assert s.c1_residual < 1e-12
    assert s.v_gram == pytest.approx(0.0, abs=1e-12)


def test_mvf_off_milnor_set(xy_xz):
    x = np.array([1.0, 0.5, 0.2])
    s = mvf(xy_xz, x)
    assert np.linalg.norm(s.nu) > 0
    assert s.c2 > 0 and s.c3 > 0
    assert s.c1_residual < 1e-12
    assert s.v_gram > 1e-6


def test_v_gram_vanishes_exactly_on_milnor_set(xy_xz):
    rng = np.random.default_rng(1)
    for _ in range(20):
        x = rng.normal(size=3)
        resid, _ = milnor_residual(xy_xz, x)
        gram = mvf(xy_xz, x).v_gram
        assert (gram < 1e-10) == (resid < 1e-5)
    assert mvf(xy_xz, P).v_gram < 1e-12


def test_mvf_degenerate_points(xy_xz):
    with pytest.raises(V1DegeneracyError):
        mvf(xy_xz, [0.0, 1.0, 1.0])

    # (xy, x + y^2) on R^2: find where x is parallel to Omega on the circle r = 0.2
    g = PolyMapGerm.from_exprs(["x*y", "x + y**2"], ["x", "y"])

    def cross(t):
        x = 0.2 * np.array([np.cos(t), np.sin(t)])
        om = omegas(g.values(x), g.jacobian(x), 0)[0]
        return x[0] * om[1] - x[1] * om[0]

    t = brentq(cross, 1.0, 1.05, xtol=1e-15)
    with pytest.raises(RhoRegularityError):
        mvf(g, 0.2 * np.array([np.cos(t), np.sin(t)]))


def test_radial_flow_from_milnor_point(xy_xz):
    start = 0.01 * np.array(P) / 2.0
    traj = flow_to_sphere(xy_xz, start, 0.1)
    assert traj.termination == "reached_sphere"
    end = traj.steps[-1].point
    assert np.linalg.norm(end) == pytest.approx(0.1, abs=1e-12)
    assert np.allclose(end, 0.1 * np.array(P) / 2.0, atol=1e-12)


def test_tube_fan_reaches_sphere(xy_xz):
    starts = tube_starts(xy_xz, 1e-4, 0.1, 4, seed=0)
    assert len(starts) == 4
    for x0 in starts:
        assert np.linalg.norm(xy_xz.values(x0)) == pytest.approx(1e-4, rel=1e-10)
        rep = trajectory_report(flow_to_sphere(xy_xz, x0, 0.1))
        assert rep["reached_sphere"] and rep["rho_monotone"] and rep["norm_g_monotone"]
        assert rep["max_psi_drift"] <= 1e-8
        assert rep["max_c1_residual"] <= 1e-8
        assert rep["final_radius"] == pytest.approx(0.1, abs=1e-12)
        assert rep["min_c2"] > 0 and rep["min_c3"] > 0


def test_start_outside_ball_gives_empty_trajectory(xy_xz):
    traj = flow_to_sphere(xy_xz, P, 0.1)
    assert traj.steps == [] and traj.termination == "reached_sphere"
    rep = trajectory_report(traj)
    assert rep["vacuous"] and rep["max_c1_residual"] is None


def test_empty_report():
    rep = trajectory_report(Trajectory(start=np.zeros(3), epsilon=0.1))
    assert rep["steps"] == 0 and rep["vacuous"]


def test_step_failure_when_budget_exhausted(xy_xz):
    opts = StepperOptions(initial_step=1e-8, max_step=1e-8, max_steps=5)
    traj = flow_to_sphere(xy_xz, 0.01 * np.array([1.0, 0.3, 0.2]), 0.1, opts)
    assert traj.termination == "step_failure"
    assert len(traj.steps) == 6


def test_step_failure_on_underflow(xy_xz):
    # an impossible drift bound rejects every step until the step size underflows
    opts = StepperOptions(drift_tol=-1.0, min_step=1e-6)
    traj = flow_to_sphere(xy_xz, 0.01 * np.array([1.0, 0.3, 0.2]), 0.1, opts)
    assert traj.termination == "step_failure"
    assert traj.rejected_steps > 0


def test_start_on_vanishing_set_rejected(xy_xz):
    with pytest.raises(PreconditionError):
        flow_to_sphere(xy_xz, [0.0, 0.01, 0.01], 0.1)


def test_product_flow():
    g = realify(corpus.y_norm_x_sq())
    starts = tube_starts(g, 1e-4, 0.1, 3, seed=0)
    assert starts
    for x0 in starts:
        rep = trajectory_report(flow_to_sphere(g, x0, 0.1))
        assert rep["reached_sphere"] and rep["rho_monotone"] and rep["norm_g_monotone"]


def test_trajectory_csv_layout(xy_xz):
    traj = flow_to_sphere(xy_xz, 0.01 * np.array(P) / 2.0, 0.1)
    lines = trajectory_csv(traj).splitlines()
    assert lines[0] == "t,x1,x2,x3,normG,rho,psi1,psi2,c1_residual,c2,c3"
    assert len(lines) == len(traj.steps) + 1
    assert all(len(row.split(",")) == 11 for row in lines[1:])


def test_c2_c3_positive_on_certified_samples(xy_xz, lmap8):
    for germ in (xy_xz, lmap8):
        for k, r in enumerate((1e-1, 1e-2)):
            for ap in sample_milnor_set(germ, r, 20, seed=k):
                s = mvf(germ, ap.point)
                assert s.c2 > 0 and s.c3 > 0
                assert s.c1_residual <= 1e-10
