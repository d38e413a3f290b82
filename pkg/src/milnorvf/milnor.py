"""Milnor-set detection, the normal generators Omega_k, and the coefficient a(x).

Throughout, rho(x) = |x|^2 and grad rho = 2x.  On the Milnor set M(G) off
V_G and Sing G the distance gradient decomposes as

    grad rho = a(x) * grad|G|^2 + sum_k beta_k * Omega_k,
    Omega_k  = G_c * grad G_k - G_k * grad G_c      (k != c, chart c),

and a(x) > 0 everywhere on M(G) is the criterion for a Milnor vector field.
a(x) is computed here by three independent routes (a Cramer ratio of Gram
determinants, the coefficient vector alpha with x = sum alpha_k grad G_k,
and the normal-equation identity) plus the leading-term approximation that
drops the higher homogeneous parts.

The Gram matrix in the denominator of the Cramer ratio is called ``gram_M``
here so it does not collide with the Milnor set M(G).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy.stats import qmc

from .errors import PreconditionError
from .germ import EvalFrame, PolyMapGerm, eval_frame

ROUTES = ("cramer", "alpha", "matrix_identity", "leading_term")


@dataclass(frozen=True)
class Tolerances:
    """Membership thresholds.

    milnor:    normalized distance of grad rho to the row space of JG (tol_m)
    singular:  smallest singular value of JG relative to the largest (tol_s)
    vanishing: |G| threshold as a multiple of |x|^(min multiplicity) (tol_v)
    """

    milnor: float = 1e-9
    singular: float = 1e-9
    vanishing: float = 1e-12

    def tol_v(self, germ: PolyMapGerm, radius: float) -> float:
        return self.vanishing * radius ** min_multiplicity(germ)

    def to_dict(self) -> dict:
        return {"tol_m": self.milnor, "tol_s": self.singular, "tol_v": self.vanishing}


DEFAULT_TOLERANCES = Tolerances()


def min_multiplicity(germ: PolyMapGerm) -> int:
    degs = [c.lowest_degree() for c in germ.components if not c.is_zero()]
    return min(degs) if degs else 1


def omegas(values: np.ndarray, jacobian: np.ndarray, chart: int) -> np.ndarray:
    """Rows G_c grad G_k - G_k grad G_c for k != c, in increasing k."""
    rows = [values[chart] * jacobian[k] - values[k] * jacobian[chart] for k in range(len(values)) if k != chart]
    return np.array(rows).reshape(len(rows), jacobian.shape[1])


def _svd_gap(jac: np.ndarray) -> tuple[np.ndarray, float, float]:
    _, s, vt = np.linalg.svd(jac, full_matrices=False)
    return vt, float(s[-1]), float(s[0])


def milnor_residual(germ: PolyMapGerm, point) -> tuple[float, float]:
    """(normalized distance of grad rho to rowspace JG, smallest singular value of JG)."""
    x = np.asarray(point, dtype=float)
    if not np.any(x):
        raise PreconditionError("milnor_residual is undefined at the origin")
    jac = germ.jacobian(x)
    return _residual_from_jacobian(x, jac)


def _residual_from_jacobian(x: np.ndarray, jac: np.ndarray) -> tuple[float, float]:
    _, s, vt = np.linalg.svd(jac, full_matrices=False)
    smin, smax = float(s[-1]), float(s[0])
    cutoff = max(jac.shape) * np.finfo(float).eps * max(smax, np.finfo(float).tiny)
    basis = vt[s > cutoff]
    g = 2.0 * x
    resid = g - basis.T @ (basis @ g) if len(basis) else g
    return float(np.linalg.norm(resid) / np.linalg.norm(g)), smin


def _checked_frame(germ: PolyMapGerm, point, tol: Tolerances) -> tuple[EvalFrame, float, float]:
    frame = eval_frame(germ, point)
    radius = float(np.linalg.norm(frame.point))
    if radius == 0.0:
        raise PreconditionError("point is the origin")
    if frame.norm_g < tol.tol_v(germ, radius):
        raise PreconditionError(f"|G| = {frame.norm_g:.3e} is below tol_v: point is on the V_G proxy")
    _, smin, smax = _svd_gap(frame.jacobian)
    if smax == 0.0 or smin < tol.singular * smax:
        raise PreconditionError("JG is rank-deficient: point is on the Sing G proxy")
    return frame, smin, smax


def choose_chart(values: np.ndarray) -> int:
    return int(np.argmax(np.abs(values)))


def _chart(frame: EvalFrame, chart: int | None, tol_v: float) -> int:
    c = choose_chart(frame.values) if chart is None else int(chart)
    if not 0 <= c < len(frame.values):
        raise PreconditionError(f"chart {c} out of range")
    if abs(frame.values[c]) < tol_v:
        raise PreconditionError(f"vanishing chart: |G_{c + 1}| below tol_v")
    return c


def build_D_M(germ: PolyMapGerm, point, chart: int | None = None, tol: Tolerances = DEFAULT_TOLERANCES):
    """Return (D, gram_M, chart) with D = A B and gram_M = A A^t.

    A has rows (grad|G|^2, Omega_k...), B has columns (grad rho, Omega_k...).
    """
    frame, _, _ = _checked_frame(germ, point, tol)
    c = _chart(frame, chart, tol.tol_v(germ, float(np.linalg.norm(frame.point))))
    om = omegas(frame.values, frame.jacobian, c)
    a_rows = np.vstack([frame.grad_norm_sq[None, :], om])
    b_cols = np.vstack([frame.grad_rho[None, :], om]).T
    d = a_rows @ b_cols
    gram = a_rows @ a_rows.T
    if not np.linalg.det(gram) > 0.0:
        raise PreconditionError("det gram_M is not positive; Omega system is degenerate here")
    return d, gram, c


def _alpha_lstsq(frame: EvalFrame) -> tuple[np.ndarray, float]:
    x = frame.point
    alpha, *_ = np.linalg.lstsq(frame.jacobian.T, x, rcond=None)
    resid = float(np.linalg.norm(frame.jacobian.T @ alpha - x) / np.linalg.norm(x))
    return alpha, resid


def higher_order_vector(germ: PolyMapGerm, point) -> np.ndarray:
    """V(x)_i = sum_j j * G^i_{m_i + j}(x): the part of <grad G_i, x> beyond m_i G_i."""
    x = np.asarray(point, dtype=float)
    out = []
    for comp in germ.components:
        parts = comp.homogeneous_parts()
        m0 = parts[0][0]
        out.append(sum((deg - m0) * part.compiled()(x) for deg, part in parts[1:]))
    return np.array(out, dtype=float)


def a_coefficient(
    germ: PolyMapGerm,
    point,
    route: str = "cramer",
    chart: int | None = None,
    tol: Tolerances = DEFAULT_TOLERANCES,
    require_milnor: bool = True,
) -> float:
    if route not in ROUTES:
        raise ValueError(f"unknown route {route!r}; expected one of {ROUTES}")
    frame, _, _ = _checked_frame(germ, point, tol)
    if require_milnor:
        resid, _ = _residual_from_jacobian(frame.point, frame.jacobian)
        if resid >= tol.milnor:
            raise PreconditionError(f"point is not on the Milnor set (residual {resid:.3e} >= tol_m)")
    g = frame.values
    g2 = float(g @ g)
    if route == "cramer":
        d, gram, _ = build_D_M(germ, frame.point, chart, tol)
        return float(np.linalg.det(d) / np.linalg.det(gram))
    if route == "alpha":
        alpha, resid = _alpha_lstsq(frame)
        if require_milnor and resid >= tol.milnor:
            raise PreconditionError(f"least-squares residual {resid:.3e} above tol_m")
        return float(alpha @ g) / g2
    inv_gram = np.linalg.inv(frame.jacobian @ frame.jacobian.T)
    if route == "matrix_identity":
        alpha = frame.point @ frame.jacobian.T @ inv_gram
        return float(alpha @ g) / g2
    mult = np.array(germ.multiplicities(), dtype=float)
    return float((g * mult) @ inv_gram @ g) / g2


def hot_term(germ: PolyMapGerm, point, tol: Tolerances = DEFAULT_TOLERANCES) -> float:
    """<V A, G>/|G|^2: matrix_identity minus leading_term."""
    frame, _, _ = _checked_frame(germ, point, tol)
    inv_gram = np.linalg.inv(frame.jacobian @ frame.jacobian.T)
    g = frame.values
    return float(higher_order_vector(germ, frame.point) @ inv_gram @ g) / float(g @ g)


def two_frame_determinant(germ: PolyMapGerm, point, tol: Tolerances = DEFAULT_TOLERANCES) -> float:
    """|w|^2 <grad rho, grad|G|^2> - <w, grad|G|^2> <w, grad rho> with w = G1 grad G2 - G2 grad G1."""
    if germ.p != 2:
        raise PreconditionError(f"needs p = 2, got p = {germ.p}")
    frame, _, _ = _checked_frame(germ, point, tol)
    w = omegas(frame.values, frame.jacobian, 0)[0]
    n = frame.grad_norm_sq
    r = frame.grad_rho
    return float((w @ w) * (r @ n) - (w @ n) * (w @ r))


@dataclass
class AnalysisPoint:
    frame: EvalFrame
    chart: int | None
    omegas: np.ndarray | None
    milnor_residual: float
    sing_gap: float
    a_values: dict = field(default_factory=dict)
    det_D: float | None = None
    det_M: float | None = None
    radius: float = 0.0
    excluded: str | None = None  # "V_G", "Sing", or None

    @property
    def point(self) -> np.ndarray:
        return self.frame.point

    @property
    def norm_g(self) -> float:
        return self.frame.norm_g

    @property
    def radial_product(self) -> float:
        """<grad|G|^2, grad rho>, positive near the origin off V_G and Sing G."""
        return float(self.frame.grad_norm_sq @ self.frame.grad_rho)


def analyze_point(
    germ: PolyMapGerm,
    point,
    tol: Tolerances = DEFAULT_TOLERANCES,
    chart: int | None = None,
    routes: Sequence[str] = ROUTES,
) -> AnalysisPoint:
    """Evaluate everything computable at a point; a(x) routes only on the Milnor set."""
    frame = eval_frame(germ, point)
    radius = float(np.linalg.norm(frame.point))
    if radius == 0.0:
        raise PreconditionError("point is the origin")
    resid, smin = _residual_from_jacobian(frame.point, frame.jacobian)
    smax = float(np.linalg.norm(frame.jacobian, 2))
    ap = AnalysisPoint(frame, None, None, resid, smin, radius=radius)
    if frame.norm_g < tol.tol_v(germ, radius):
        ap.excluded = "V_G"
        return ap
    if smax == 0.0 or smin < tol.singular * smax:
        ap.excluded = "Sing"
        return ap
    c = _chart(frame, chart, tol.tol_v(germ, radius))
    ap.chart = c
    ap.omegas = omegas(frame.values, frame.jacobian, c)
    d, gram, _ = build_D_M(germ, frame.point, c, tol)
    ap.det_D = float(np.linalg.det(d))
    ap.det_M = float(np.linalg.det(gram))
    if resid < tol.milnor:
        for route in routes:
            try:
                ap.a_values[route] = a_coefficient(germ, frame.point, route, c, tol)
            except PreconditionError:
                ap.a_values[route] = None
    return ap


# -- sampling ------------------------------------------------------------

def sphere_seeds(m: int, count: int, seed: int) -> np.ndarray:
    """Quasi-uniform unit vectors: scrambled Halton points pushed through the normal quantile."""
    if count <= 0:
        return np.zeros((0, m))
    from scipy.special import ndtri

    u = qmc.Halton(d=m, scramble=True, seed=seed).random(count)
    u = np.clip(u, 1e-12, 1 - 1e-12)
    g = ndtri(u)
    norms = np.linalg.norm(g, axis=1)
    norms[norms == 0] = 1.0
    return g / norms[:, None]


def refine_milnor_point(germ: PolyMapGerm, seed_point, radius: float, max_iter: int = 60) -> np.ndarray | None:
    """Damped Gauss-Newton onto {x = JG(x)^t lam, |x| = radius}.

    Unknowns are x/radius and a rescaled multiplier, so the minimum-norm step
    is balanced at every radius.  Returns None when the iteration does not
    converge (typically when drifting toward Sing G, where lam blows up).
    """
    x = np.asarray(seed_point, dtype=float) * (radius / np.linalg.norm(seed_point))
    jac = germ.jacobian(x)
    smax = float(np.linalg.norm(jac, 2))
    if smax == 0.0:
        return None
    scale = radius / smax
    lam, *_ = np.linalg.lstsq(jac.T, x, rcond=None)
    m, p = germ.m, germ.p

    def residual(x_, lam_, jac_):
        return np.concatenate([(x_ - jac_.T @ lam_) / radius, [(x_ @ x_ - radius**2) / radius**2]])

    f = residual(x, lam, jac)
    fnorm = float(np.linalg.norm(f))
    for _ in range(max_iter):
        if fnorm < 1e-14:
            break
        hess = germ.hessians(x)
        jx = (np.eye(m) - np.einsum("k,kij->ij", lam, hess))  # d/d(x/r) of (x - JG^t lam)/r
        jl = -jac.T * (scale / radius)
        top = np.hstack([jx, jl])
        bottom = np.concatenate([2.0 * x / radius, np.zeros(p)])[None, :]
        jmat = np.vstack([top, bottom])
        step, *_ = np.linalg.lstsq(jmat, -f, rcond=None)
        dx, dl = step[:m] * radius, step[m:] * scale
        t = 1.0
        while True:
            x_new = x + t * dx
            lam_new = lam + t * dl
            jac_new = germ.jacobian(x_new)
            f_new = residual(x_new, lam_new, jac_new)
            fn_new = float(np.linalg.norm(f_new))
            if fn_new < (1.0 - 1e-4 * t) * fnorm or t < 1e-6:
                break
            t *= 0.5
        if not np.isfinite(fn_new) or fn_new >= fnorm:
            break
        x, lam, jac, f, fnorm = x_new, lam_new, jac_new, f_new, fn_new
    if not fnorm < 1e-11:
        return None
    return x * (radius / np.linalg.norm(x))


def sample_milnor_set(
    germ: PolyMapGerm,
    radius: float,
    count: int,
    tol: Tolerances = DEFAULT_TOLERANCES,
    seed: int = 0,
    routes: Sequence[str] = ROUTES,
    keep_excluded: bool = False,
) -> list[AnalysisPoint]:
    """Newton-refined Milnor points on the sphere of the given radius.

    Points on the V_G or Sing G proxies are dropped unless ``keep_excluded``
    (then they are returned flagged via ``AnalysisPoint.excluded``).
    """
    if radius <= 0:
        raise ValueError("radius must be positive")
    out = []
    for s in sphere_seeds(germ.m, count, seed):
        x = refine_milnor_point(germ, s * radius, radius)
        if x is None:
            continue
        ap = analyze_point(germ, x, tol, routes=routes)
        if ap.excluded is None and ap.milnor_residual >= tol.milnor:
            continue
        if ap.excluded is not None and not keep_excluded:
            continue
        out.append(ap)
    return out


# -- growth of |G| on the Milnor set ---------------------------------------

def norm_growth_evidence(
    germ: PolyMapGerm,
    radii: Sequence[float],
    count: int,
    seed: int = 0,
    tol: Tolerances = DEFAULT_TOLERANCES,
    samples: dict | None = None,
) -> dict:
    """Growth of min |G| over Milnor samples as r -> 0.

    The closure of M(G) off the discriminant should meet V_G only at 0; a
    stable power law min|G| ~ c r^kappa is consistent with that.  This is
    heuristic evidence, never a proof.  ``samples`` may carry precomputed
    ``{radius: [AnalysisPoint]}`` to avoid resampling.
    """
    if any(r <= 0 for r in radii):
        raise ValueError("radii must be positive")
    rows = []
    for k, r in enumerate(radii):
        pts = samples[r] if samples is not None and r in samples else sample_milnor_set(germ, r, count, tol, seed + k)
        norms = sorted(ap.norm_g for ap in pts if ap.excluded is None)
        rows.append(
            {
                "radius": float(r),
                "samples": len(norms),
                "min_norm_g": norms[0] if norms else None,
                "median_norm_g": float(np.median(norms)) if norms else None,
            }
        )
    usable = [row for row in rows if row["min_norm_g"]]
    record = {"label": "evidence (not proof)", "per_radius": rows, "exponent": None, "local_exponents": []}
    if not usable:
        record["verdict"] = "vacuous: no Milnor samples off V_G, holds trivially"
        return record
    if len(usable) == 1:
        record["verdict"] = "insufficient radii for a growth fit"
        return record
    logs_r = np.log([row["radius"] for row in usable])
    logs_g = np.log([row["min_norm_g"] for row in usable])
    kappa = float(np.polyfit(logs_r, logs_g, 1)[0])
    local = [float((logs_g[i + 1] - logs_g[i]) / (logs_r[i + 1] - logs_r[i])) for i in range(len(usable) - 1)]
    record["exponent"] = kappa
    record["local_exponents"] = local
    stable = all(math.isfinite(s) and abs(s - kappa) <= 0.5 for s in local) and kappa > 0
    record["verdict"] = "supports condition: stable power-law lower bound" if stable else "inconclusive: unstable growth"
    return record
