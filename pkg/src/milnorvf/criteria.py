"""Exact (symbolic) structural criteria for a(x) > 0.

Each check expands a polynomial identity in exact rational arithmetic and
tests it for identical vanishing; a failing check carries a witness term.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .germ import PolyMapGerm
from .polynomial import Polynomial, dot


@dataclass(frozen=True)
class Verdict:
    holds: bool | None
    witness: str | None = None
    detail: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        out = {"holds": self.holds, "witness": self.witness}
        out.update(self.detail)
        return out


@dataclass(frozen=True)
class StructuralVerdicts:
    same_multiplicity: Verdict
    orthogonal_gradients: Verdict
    equal_gradient_norms: Verdict
    simple_l_map: Verdict
    omega_orthogonality: Verdict

    def to_dict(self) -> dict:
        return {
            "same_multiplicity": self.same_multiplicity.to_dict(),
            "orthogonal_gradients": self.orthogonal_gradients.to_dict(),
            "equal_gradient_norms": self.equal_gradient_norms.to_dict(),
            "simple_l_map": self.simple_l_map.to_dict(),
            "omega_orthogonality": self.omega_orthogonality.to_dict(),
        }


def _witness(label: str, poly: Polynomial, names) -> str:
    return f"{label} = {poly.format(names)}"


def gradient_pairings(germ: PolyMapGerm) -> dict[tuple[int, int], Polynomial]:
    """Exact <grad G_i, grad G_j> for i <= j."""
    jac = germ.jacobian_polys()
    return {(i, j): dot(jac[i], jac[j]) for i in range(germ.p) for j in range(i, germ.p)}


def check_same_multiplicity(germ: PolyMapGerm) -> Verdict:
    if any(c.is_zero() for c in germ.components):
        return Verdict(False, "a component vanishes identically", {"multiplicities": None})
    mults = germ.multiplicities()
    return Verdict(len(set(mults)) == 1, None if len(set(mults)) == 1 else f"multiplicities {list(mults)}",
                   {"multiplicities": list(mults)})


def omega_polys(germ: PolyMapGerm, chart: int = 0) -> list[tuple[Polynomial, ...]]:
    jac = germ.jacobian_polys()
    gc = germ.components[chart]
    out = []
    for k in range(germ.p):
        if k == chart:
            continue
        gk = germ.components[k]
        out.append(tuple(gc * a - gk * b for a, b in zip(jac[k], jac[chart])))
    return out


def check_omega_orthogonality(germ: PolyMapGerm) -> Verdict:
    """Every Omega_k orthogonal to grad|G|^2 identically, or every Omega_k orthogonal to x.

    Identities on the chart G_1 != 0 extend to every chart, since
    G_1 * Omega^(j)_k = G_j * Omega^(1)_k - G_k * Omega^(1)_j.
    """
    if germ.p < 2 or germ.m <= germ.p:
        return Verdict(None, "needs m > p >= 2")
    if germ.components[0].is_zero():
        return Verdict(False, "first component vanishes identically")
    m = germ.m
    jac = germ.jacobian_polys()
    grad_norm = [Polynomial.zero(m) for _ in range(m)]
    for g, row in zip(germ.components, jac):
        grad_norm = [acc + g * d * 2 for acc, d in zip(grad_norm, row)]
    position = [Polynomial.variable(m, i) for i in range(m)]
    oms = omega_polys(germ, 0)
    against_norm = [dot(grad_norm, om) for om in oms]
    against_rho = [dot(position, om) for om in oms]
    if all(p.is_zero() for p in against_norm):
        return Verdict(True, None, {"variant": "omega_perp_grad_norm"})
    if all(p.is_zero() for p in against_rho):
        return Verdict(True, None, {"variant": "omega_perp_grad_rho"})
    bad = next(p for p in against_rho if not p.is_zero())
    return Verdict(False, _witness("<x, Omega>", bad.leading_term(), germ.var_names), {"variant": None})


def check_structural_criteria(germ: PolyMapGerm) -> StructuralVerdicts:
    names = germ.var_names
    pairs = gradient_pairings(germ)

    ortho_fail = next(((i, j) for (i, j), q in pairs.items() if i < j and not q.is_zero()), None)
    if ortho_fail is None:
        ortho = Verdict(True)
    else:
        i, j = ortho_fail
        ortho = Verdict(False, _witness(f"<grad G{i + 1}, grad G{j + 1}>", pairs[ortho_fail], names))

    norm_fail = None
    for k in range(1, germ.p):
        diff = pairs[(k, k)] - pairs[(0, 0)]
        if not diff.is_zero():
            norm_fail = (k, diff)
            break
    if norm_fail is None:
        eq = Verdict(True)
    else:
        k, diff = norm_fail
        eq = Verdict(False, _witness(f"|grad G{k + 1}|^2 - |grad G1|^2", diff.leading_term(), names))

    simple = Verdict(bool(ortho.holds and eq.holds), ortho.witness or eq.witness)
    return StructuralVerdicts(check_same_multiplicity(germ), ortho, eq, simple, check_omega_orthogonality(germ))
