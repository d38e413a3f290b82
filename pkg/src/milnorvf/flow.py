"""The Milnor vector field nu and its flow from the tube |G| = eta to the sphere |x| = eps.

    v1 = projection of grad|G|^2 onto the tangent space of the Psi_G-fiber
    v2 = projection of grad rho   onto the same tangent space
    nu = v1/|v1| + v2/|v2|

The fiber of Psi_G = G/|G| through x has normal space spanned by the Omega_k,
so both projections just remove the span of the Omega_k.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq

from .errors import PreconditionError
from .germ import PolyMapGerm, eval_frame
from .milnor import (
    DEFAULT_TOLERANCES,
    AnalysisPoint,
    Tolerances,
    _checked_frame,
    _chart,
    omegas,
    sphere_seeds,
)


class V1DegeneracyError(PreconditionError):
    """v1 vanished: the point is (numerically) on V_G or Sing G."""


class RhoRegularityError(PreconditionError):
    """v2 vanished: grad rho is normal to the Psi_G-fiber, so rho-regularity fails here."""


def fiber_tangent_project(normals, vector) -> np.ndarray:
    """Remove from ``vector`` its component in the span of the normal generators.

    ``normals`` is an AnalysisPoint or an array whose rows are the Omega_k.
    """
    om = normals.omegas if isinstance(normals, AnalysisPoint) else normals
    if om is None:
        raise PreconditionError("no Omega vectors available at this point")
    v = np.asarray(vector, dtype=float)
    om = np.asarray(om, dtype=float).reshape(-1, v.size)
    if len(om) == 0:
        return v.copy()
    q, r = np.linalg.qr(om.T)
    diag = np.abs(np.diag(r))
    if diag.min() <= 1e-13 * max(diag.max(), np.finfo(float).tiny):
        raise PreconditionError("degenerate Omega system: normal generators are dependent")
    return v - q @ (q.T @ v)


@dataclass(frozen=True)
class FieldSample:
    point: np.ndarray
    v1: np.ndarray
    v2: np.ndarray
    nu: np.ndarray
    c1_residual: float
    c2: float
    c3: float
    values: np.ndarray

    @property
    def v_gram(self) -> float:
        """Normalized Gram determinant of (v1, v2); 0 iff they are parallel."""
        a = self.v1 / np.linalg.norm(self.v1)
        b = self.v2 / np.linalg.norm(self.v2)
        return float(1.0 - (a @ b) ** 2)


def mvf(germ: PolyMapGerm, point, tol: Tolerances = DEFAULT_TOLERANCES) -> FieldSample:
    try:
        frame, _, _ = _checked_frame(germ, point, tol)
    except PreconditionError as exc:
        raise V1DegeneracyError(str(exc)) from exc
    radius = float(np.linalg.norm(frame.point))
    c = _chart(frame, None, tol.tol_v(germ, radius))
    om = omegas(frame.values, frame.jacobian, c)
    v1 = fiber_tangent_project(om, frame.grad_norm_sq)
    v2 = fiber_tangent_project(om, frame.grad_rho)
    n1, n2 = float(np.linalg.norm(v1)), float(np.linalg.norm(v2))
    if n1 <= 1e-12 * float(np.linalg.norm(frame.grad_norm_sq)):
        raise V1DegeneracyError("v1 vanishes: tube not transverse to the fiber here")
    if n2 <= 1e-12 * float(np.linalg.norm(frame.grad_rho)):
        raise RhoRegularityError("v2 vanishes: rho-regularity violated here")
    nu = v1 / n1 + v2 / n2
    nnu = float(np.linalg.norm(nu))
    c1 = 0.0
    for w in om:
        nw = float(np.linalg.norm(w))
        if nw > 0 and nnu > 0:
            c1 = max(c1, abs(float(nu @ w)) / (nnu * nw))
    return FieldSample(
        point=frame.point,
        v1=v1,
        v2=v2,
        nu=nu,
        c1_residual=c1,
        c2=float(nu @ frame.grad_rho),
        c3=float(nu @ frame.grad_norm_sq),
        values=frame.values,
    )


# -- integration ------------------------------------------------------------

_C = np.array([0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0, 1.0])
_A = [
    [],
    [1 / 5],
    [3 / 40, 9 / 40],
    [44 / 45, -56 / 15, 32 / 9],
    [19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729],
    [9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656],
    [35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84],
]
_B5 = np.array([35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84, 0.0])
_B4 = np.array([5179 / 57600, 0.0, 7571 / 16695, 393 / 640, -92097 / 339200, 187 / 2100, 1 / 40])


@dataclass(frozen=True)
class StepperOptions:
    initial_step: float = 1e-3
    min_step: float = 1e-14
    max_step: float = 0.05
    rtol: float = 1e-10
    atol: float = 1e-14
    drift_tol: float = 1e-8
    monotonicity_gate: bool = True
    drift_gate: bool = True
    max_steps: int = 100_000


@dataclass(frozen=True)
class TrajectoryStep:
    t: float
    point: np.ndarray
    norm_g: float
    rho: float
    psi: np.ndarray
    c1_residual: float
    c2: float
    c3: float


@dataclass
class Trajectory:
    start: np.ndarray
    epsilon: float
    steps: list = field(default_factory=list)
    termination: str = "reached_sphere"
    rejected_steps: int = 0
    message: str = ""


def _record(t: float, sample: FieldSample) -> TrajectoryStep:
    ng = float(np.linalg.norm(sample.values))
    return TrajectoryStep(
        t=float(t),
        point=sample.point.copy(),
        norm_g=ng,
        rho=float(sample.point @ sample.point),
        psi=sample.values / ng,
        c1_residual=sample.c1_residual,
        c2=sample.c2,
        c3=sample.c3,
    )


def _rk_step(field_fn, x: np.ndarray, h: float, k1: np.ndarray):
    ks = [k1]
    for i in range(1, 7):
        xi = x + h * sum(a * k for a, k in zip(_A[i], ks))
        ks.append(field_fn(xi))
    ks = np.array(ks)
    x5 = x + h * (_B5 @ ks)
    x4 = x + h * (_B4 @ ks)
    return x5, x5 - x4


def flow_to_sphere(
    germ: PolyMapGerm,
    start,
    epsilon: float,
    options: StepperOptions = StepperOptions(),
    tol: Tolerances = DEFAULT_TOLERANCES,
) -> Trajectory:
    """Integrate x' = nu(x) from ``start`` until |x| = epsilon.

    A step is accepted only if the embedded error estimate passes, rho and
    |G| both increased and Psi_G stayed within ``drift_tol`` of its initial
    value.  The final step is bisected to land on the sphere within 1e-12.
    """
    x0 = np.asarray(start, dtype=float)
    traj = Trajectory(start=x0.copy(), epsilon=float(epsilon))
    if np.linalg.norm(x0) >= epsilon:
        return traj
    frame = eval_frame(germ, x0)
    if frame.norm_g < tol.tol_v(germ, float(np.linalg.norm(x0))):
        raise PreconditionError("start is on the V_G proxy")
    first = mvf(germ, x0, tol)  # raises on Sing / degeneracy
    traj.steps.append(_record(0.0, first))
    psi0 = traj.steps[0].psi

    def field_fn(x):
        return mvf(germ, x, tol).nu

    def gates_ok(prev: TrajectoryStep, rec: TrajectoryStep) -> bool:
        if options.monotonicity_gate and not (rec.rho > prev.rho and rec.norm_g > prev.norm_g):
            return False
        if options.drift_gate and float(np.max(np.abs(rec.psi - psi0))) > options.drift_tol:
            return False
        return True

    x, t, k1 = x0, 0.0, first.nu
    h = min(options.initial_step, options.max_step)
    for _ in range(options.max_steps):
        prev = traj.steps[-1]
        try:
            x_new, err_vec = _rk_step(field_fn, x, h, k1)
            scale = options.atol + options.rtol * max(np.max(np.abs(x)), np.max(np.abs(x_new)))
            err = float(np.max(np.abs(err_vec))) / scale
            landing = np.linalg.norm(x_new) >= epsilon
            if err <= 1.0 and landing:
                x_new, h = _land(field_fn, x, h, k1, epsilon)
            sample = mvf(germ, x_new, tol) if err <= 1.0 else None
        except RhoRegularityError as exc:
            traj.termination, traj.message = "rho_regularity_failure", str(exc)
            return traj
        except V1DegeneracyError as exc:
            traj.termination, traj.message = "reached_v1_degeneracy", str(exc)
            return traj
        accepted = False
        if sample is not None:
            rec = _record(t + h, sample)
            if gates_ok(prev, rec):
                accepted = True
        if accepted:
            traj.steps.append(rec)
            x, t, k1 = x_new, t + h, sample.nu
            if landing:
                traj.termination = "reached_sphere"
                return traj
            factor = 5.0 if err == 0 else min(5.0, max(0.2, 0.9 * err ** (-0.2)))
            h = min(h * factor, options.max_step)
        else:
            traj.rejected_steps += 1
            if sample is None:
                h *= max(0.2, 0.9 * err ** (-0.25))
            else:
                h *= 0.5
        if h < options.min_step:
            traj.termination, traj.message = "step_failure", "step size underflow"
            return traj
    traj.termination, traj.message = "step_failure", "step budget exhausted"
    return traj


def _land(field_fn, x: np.ndarray, h: float, k1: np.ndarray, epsilon: float):
    lo, hi = 0.0, h
    x_hi = None
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        x_mid, _ = _rk_step(field_fn, x, mid, k1)
        r = float(np.linalg.norm(x_mid))
        if abs(r - epsilon) <= 1e-12:
            return x_mid, mid
        if r > epsilon:
            hi, x_hi = mid, x_mid
        else:
            lo = mid
        if hi - lo <= 1e-18:
            break
    if x_hi is None:
        x_hi, _ = _rk_step(field_fn, x, hi, k1)
    return x_hi, hi


def trajectory_report(traj: Trajectory) -> dict:
    steps = traj.steps
    report = {
        "termination": traj.termination,
        "message": traj.message,
        "steps": max(len(steps) - 1, 0),
        "rejected_steps": traj.rejected_steps,
        "epsilon": traj.epsilon,
    }
    if len(steps) == 0:
        report.update(
            vacuous=True, reached_sphere=traj.termination == "reached_sphere",
            min_c2=None, max_c2=None, min_c3=None, max_c3=None, max_c1_residual=None,
            max_psi_drift=None, rho_monotone=True, norm_g_monotone=True, final_radius=None,
        )
        return report
    c2 = [s.c2 for s in steps]
    c3 = [s.c3 for s in steps]
    psi0 = steps[0].psi
    rho = [s.rho for s in steps]
    ng = [s.norm_g for s in steps]
    report.update(
        vacuous=False,
        reached_sphere=traj.termination == "reached_sphere",
        min_c2=min(c2), max_c2=max(c2), min_c3=min(c3), max_c3=max(c3),
        max_c1_residual=max(s.c1_residual for s in steps),
        max_psi_drift=max(float(np.max(np.abs(s.psi - psi0))) for s in steps),
        rho_monotone=all(b > a for a, b in zip(rho, rho[1:])),
        norm_g_monotone=all(b > a for a, b in zip(ng, ng[1:])),
        final_radius=float(np.linalg.norm(steps[-1].point)),
    )
    return report


def tube_starts(
    germ: PolyMapGerm,
    eta: float,
    epsilon: float,
    count: int,
    seed: int = 0,
    tol: Tolerances = DEFAULT_TOLERANCES,
) -> list[np.ndarray]:
    """Points on the tube |G| = eta inside the ball of radius epsilon, one per accepted ray."""
    starts = []
    for u in sphere_seeds(germ.m, max(16 * count, 64), seed):
        def excess(t, u=u):
            return float(np.linalg.norm(germ.values(t * u))) - eta

        t_hi = epsilon * (1.0 - 1e-6)
        if excess(t_hi) <= 0.0:
            continue
        t_lo = t_hi * 1e-8
        if excess(t_lo) >= 0.0:
            continue
        t = brentq(excess, t_lo, t_hi, xtol=1e-16, rtol=4 * np.finfo(float).eps)
        x = t * u
        try:
            mvf(germ, x, tol)
        except PreconditionError:
            continue
        starts.append(x)
        if len(starts) == count:
            break
    return starts


def trajectory_csv(traj: Trajectory) -> str:
    """Columns: t, x1..xm, normG, rho, psi1..psip, c1_residual, c2, c3."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    m = traj.start.size
    p = traj.steps[0].psi.size if traj.steps else 0
    writer.writerow(
        ["t"] + [f"x{i + 1}" for i in range(m)] + ["normG", "rho"]
        + [f"psi{k + 1}" for k in range(p)] + ["c1_residual", "c2", "c3"]
    )
    for s in traj.steps:
        writer.writerow(
            [repr(float(v)) for v in (s.t, *s.point, s.norm_g, s.rho, *s.psi, s.c1_residual, s.c2, s.c3)]
        )
    return buf.getvalue()
