"""a(x) for separable products F(x, y) = f(x) g(y) versus the a(x) of each factor.

Comparing the block rows of grad rho = a grad|F|^2 + b Omega_F with the
factor decompositions gives a_f(x) = a_F(x, y) |g(y)|^2 and, symmetrically,
a_g(y) = a_F(x, y) |f(x)|^2 whenever the factor is regular at its block.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import PreconditionError
from .milnor import DEFAULT_TOLERANCES, Tolerances, a_coefficient, analyze_point
from .mixed import MixedFunction, complex_to_real, realify, separable_product


@dataclass(frozen=True)
class PropagationRecord:
    a_product: float
    a_first: float | None
    a_second: float | None
    first_residual: float | None
    second_residual: float | None
    first_in_milnor: bool
    second_in_milnor: bool

    def to_dict(self) -> dict:
        return dict(self.__dict__)


def _block_member(ap, tol: Tolerances) -> bool:
    smax = float(np.linalg.norm(ap.frame.jacobian, 2))
    return ap.milnor_residual < tol.milnor or ap.sing_gap < tol.singular * smax


def _block_a(germ, x, tol: Tolerances) -> float | None:
    try:
        return a_coefficient(germ, x, "cramer", tol=tol)
    except PreconditionError:
        return None


def product_propagation_check(
    f: MixedFunction,
    g: MixedFunction,
    point,
    tol: Tolerances = DEFAULT_TOLERANCES,
    realified: tuple | None = None,
) -> PropagationRecord:
    """``point`` is complex, concatenating the f-block and the g-block.

    ``realified`` may pass precomputed ``(realify(F), realify(f), realify(g))``.
    """
    z = np.asarray(point, dtype=complex)
    n, m = f.num_cvars, g.num_cvars
    if z.shape != (n + m,):
        raise PreconditionError(f"block mismatch: point of length {z.size}, expected {n + m}")
    big, rf, rg = realified or (realify(separable_product(f, g)), realify(f), realify(g))
    xf, xg = complex_to_real(z[:n]), complex_to_real(z[n:])
    if not np.any(xf) or not np.any(xg):
        raise PreconditionError("a block of the point is zero")
    if float(np.linalg.norm(rf.values(xf))) < tol.tol_v(rf, float(np.linalg.norm(xf))):
        raise PreconditionError("first block lies on V_f")
    if float(np.linalg.norm(rg.values(xg))) < tol.tol_v(rg, float(np.linalg.norm(xg))):
        raise PreconditionError("second block lies on V_g")
    a_big = a_coefficient(big, complex_to_real(z), "cramer", tol=tol)

    ff, gg = analyze_point(rf, xf, tol), analyze_point(rg, xg, tol)
    nf2 = float(ff.frame.values @ ff.frame.values)
    ng2 = float(gg.frame.values @ gg.frame.values)
    a1, a2 = _block_a(rf, xf, tol), _block_a(rg, xg, tol)
    return PropagationRecord(
        a_product=a_big,
        a_first=a1,
        a_second=a2,
        first_residual=None if a1 is None else abs(a1 - a_big * ng2),
        second_residual=None if a2 is None else abs(a2 - a_big * nf2),
        first_in_milnor=_block_member(ff, tol),
        second_in_milnor=_block_member(gg, tol),
    )
