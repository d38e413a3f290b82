"""Real polynomial map germs G: (R^m, 0) -> (R^p, 0) and their numeric frames."""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from .errors import GermError
from .polynomial import Polynomial


@dataclass(frozen=True)
class PolyMapGerm:
    num_vars: int
    components: tuple[Polynomial, ...]
    var_names: tuple[str, ...] = ()
    _cache: dict = field(default_factory=dict, init=False, repr=False, compare=False, hash=False)

    def __post_init__(self):
        m, p = self.num_vars, len(self.components)
        if m < 1 or p < 1 or p > m:
            raise GermError(f"p > m or empty (m={m}, p={p})")
        for k, comp in enumerate(self.components):
            if comp.num_vars != m:
                raise GermError(f"component {k + 1} has {comp.num_vars} variables, expected {m}")
            if comp.constant_term() != 0:
                raise GermError(f"component {k + 1} has nonzero constant term; a germ must send 0 to 0")
        if not self.var_names:
            object.__setattr__(self, "var_names", tuple(f"x{i + 1}" for i in range(m)))
        elif len(self.var_names) != m:
            raise GermError("var_names length does not match num_vars")

    @classmethod
    def from_exprs(cls, exprs: Sequence[str], var_names: Sequence[str]) -> "PolyMapGerm":
        comps = tuple(Polynomial.from_expr(e, var_names) for e in exprs)
        return cls(len(var_names), comps, tuple(var_names))

    @property
    def p(self) -> int:
        return len(self.components)

    @property
    def m(self) -> int:
        return self.num_vars

    def multiplicities(self) -> tuple[int, ...]:
        return tuple(c.lowest_degree() for c in self.components)

    def jacobian_polys(self) -> tuple[tuple[Polynomial, ...], ...]:
        cached = self._cache.get("jac")
        if cached is None:
            cached = tuple(c.gradient() for c in self.components)
            self._cache["jac"] = cached
        return cached

    def hessian_polys(self) -> tuple[tuple[tuple[Polynomial, ...], ...], ...]:
        cached = self._cache.get("hess")
        if cached is None:
            cached = tuple(tuple(d.gradient() for d in row) for row in self.jacobian_polys())
            self._cache["hess"] = cached
        return cached

    # numeric evaluation

    def _point(self, point) -> np.ndarray:
        x = np.asarray(point, dtype=float)
        if x.shape != (self.num_vars,):
            raise GermError(f"dimension mismatch: point of shape {x.shape}, germ has m={self.num_vars}")
        return x

    def values(self, point) -> np.ndarray:
        x = self._point(point)
        return np.array([c.compiled()(x) for c in self.components])

    def jacobian(self, point) -> np.ndarray:
        x = self._point(point)
        return np.array([[d.compiled()(x) for d in row] for row in self.jacobian_polys()])

    def hessians(self, point) -> np.ndarray:
        """Array of shape (p, m, m) holding the Hessian of each component."""
        x = self._point(point)
        return np.array(
            [[[h.compiled()(x) for h in hrow] for hrow in comp] for comp in self.hessian_polys()]
        )

    def to_document(self) -> dict:
        return {
            "kind": "real",
            "vars": list(self.var_names),
            "components": [c.to_terms() for c in self.components],
        }

    def content_hash(self) -> str:
        blob = json.dumps(self.to_document(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(blob.encode("utf-8")).hexdigest()

    def format(self) -> str:
        return "(" + ", ".join(c.format(self.var_names) for c in self.components) + ")"


def parse_germ(document: dict | str) -> PolyMapGerm:
    """Build a canonical germ from the JSON germ format (dict or JSON text)."""
    if isinstance(document, str):
        try:
            document = json.loads(document)
        except json.JSONDecodeError as exc:
            raise GermError(f"malformed germ document: {exc}") from exc
    if not isinstance(document, dict):
        raise GermError("germ document must be a JSON object")
    if document.get("kind", "real") != "real":
        raise GermError(f"expected kind 'real', got {document.get('kind')!r}")
    names = document.get("vars")
    comps = document.get("components")
    if not isinstance(names, list) or not isinstance(comps, list):
        raise GermError("germ document needs 'vars' and 'components' lists")
    if not names or not comps or len(comps) > len(names):
        raise GermError(f"p > m or empty (m={len(names)}, p={len(comps)})")
    if len(set(names)) != len(names):
        raise GermError("duplicate variable names")
    m = len(names)
    polys = []
    for k, terms in enumerate(comps):
        if not isinstance(terms, list):
            raise GermError(f"component {k + 1} must be a list of terms")
        try:
            for t in terms:
                if len(t["exps"]) != m:
                    raise GermError(f"component {k + 1}: exponent vector length != {m}")
            poly = Polynomial.from_terms(m, terms)
        except (KeyError, TypeError, ValueError) as exc:
            if isinstance(exc, GermError):
                raise
            raise GermError(f"component {k + 1}: malformed term ({exc})") from exc
        if poly.is_zero():
            raise GermError(f"component {k + 1} is the zero polynomial")
        polys.append(poly)
    return PolyMapGerm(m, tuple(polys), tuple(str(n) for n in names))


def serialize_germ(germ: PolyMapGerm) -> str:
    return json.dumps(germ.to_document(), sort_keys=True, separators=(",", ":"))


@dataclass(frozen=True)
class EvalFrame:
    point: np.ndarray
    values: np.ndarray
    jacobian: np.ndarray
    grad_norm_sq: np.ndarray
    grad_rho: np.ndarray

    @property
    def norm_g(self) -> float:
        return float(np.linalg.norm(self.values))


def eval_frame(germ: PolyMapGerm, point) -> EvalFrame:
    x = germ._point(point)
    vals = germ.values(x)
    jac = germ.jacobian(x)
    return EvalFrame(
        point=x,
        values=vals,
        jacobian=jac,
        grad_norm_sq=2.0 * vals @ jac,
        grad_rho=2.0 * x,
    )


def formal_partial(poly: Polynomial, var_index: int) -> Polynomial:
    return poly.partial(var_index)


def homogeneous_decomposition(poly: Polynomial) -> list[tuple[int, Polynomial]]:
    return poly.homogeneous_parts()


def euler_residual(poly: Polynomial, point: Sequence):
    """<grad p(x), x> minus sum of degree-weighted homogeneous parts.

    Exact (``Fraction``) when ``point`` is rational; the result is identically 0.
    """
    if len(point) != poly.num_vars:
        raise ValueError(f"dimension mismatch: point of length {len(point)}, expected {poly.num_vars}")
    if poly.is_zero():
        return Fraction(0) if all(isinstance(v, (int, Fraction)) for v in point) else 0.0
    radial = sum(d.evaluate(point) * xi for d, xi in zip(poly.gradient(), point))
    weighted = sum(deg * part.evaluate(point) for deg, part in poly.homogeneous_parts())
    return radial - weighted


def fd_jacobian_oracle(germ: PolyMapGerm, point, step: float = 1e-5) -> np.ndarray:
    """Central-difference Jacobian, independent of the formal derivatives."""
    if step <= 0:
        raise ValueError("step must be positive")
    x = germ._point(point)
    jac = np.empty((germ.p, germ.m))
    for i in range(germ.m):
        e = np.zeros(germ.m)
        e[i] = step
        jac[:, i] = (germ.values(x + e) - germ.values(x - e)) / (2.0 * step)
    return jac
