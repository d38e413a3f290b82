"""Exact sparse multivariate polynomials over the rationals.

A :class:`Polynomial` stores its terms as ``(exponent_tuple, Fraction)`` pairs
sorted in decreasing graded-lexicographic order, with no zero coefficients.
Two polynomials are equal iff their term tuples are equal, so structural
equality doubles as an exact zero test.

Numeric evaluation goes through :meth:`Polynomial.compiled`, which packs the
terms into numpy arrays once and evaluates in float64.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, Iterable, Mapping, Sequence, Tuple, Union

import numpy as np

from .errors import GermError

Exponent = Tuple[int, ...]
Scalar = Union[int, Fraction]


def _grlex_key(exps: Exponent) -> tuple:
    return (sum(exps), exps)


@dataclass(frozen=True)
class Polynomial:
    num_vars: int
    terms: Tuple[Tuple[Exponent, Fraction], ...] = ()
    _numeric: dict = field(default_factory=dict, init=False, repr=False, compare=False, hash=False)

    # -- construction -------------------------------------------------------

    @classmethod
    def from_dict(cls, num_vars: int, coeffs: Mapping[Exponent, Scalar]) -> "Polynomial":
        if num_vars < 1:
            raise ValueError("num_vars must be positive")
        terms = []
        for exps, c in coeffs.items():
            exps = tuple(int(e) for e in exps)
            if len(exps) != num_vars:
                raise ValueError(f"exponent vector {exps} has length != {num_vars}")
            if any(e < 0 for e in exps):
                raise ValueError(f"negative exponent in {exps}")
            c = Fraction(c)
            if c != 0:
                terms.append((exps, c))
        terms.sort(key=lambda t: _grlex_key(t[0]), reverse=True)
        return cls(num_vars, tuple(terms))

    @classmethod
    def zero(cls, num_vars: int) -> "Polynomial":
        return cls(num_vars, ())

    @classmethod
    def constant(cls, num_vars: int, value: Scalar) -> "Polynomial":
        return cls.from_dict(num_vars, {(0,) * num_vars: value})

    @classmethod
    def variable(cls, num_vars: int, index: int) -> "Polynomial":
        if not 0 <= index < num_vars:
            raise IndexError(f"variable index {index} out of range for {num_vars} variables")
        exps = [0] * num_vars
        exps[index] = 1
        return cls(num_vars, ((tuple(exps), Fraction(1)),))

    @classmethod
    def from_expr(cls, text: str, var_names: Sequence[str]) -> "Polynomial":
        """Parse a rational polynomial expression such as ``"x*y - 3/2*z**2"``."""
        import sympy

        gens = sympy.symbols(list(var_names))
        local = {name: g for name, g in zip(var_names, gens)}
        try:
            expr = sympy.expand(sympy.sympify(text, locals=local))
            if expr == 0:
                return cls.zero(len(var_names))
            coeffs = {}
            for exps, c in sympy.Poly(expr, *gens).terms():
                if not c.is_Rational:
                    raise GermError(f"coefficient {c} is not rational")
                coeffs[exps] = Fraction(int(c.p), int(c.q))
        except (sympy.SympifyError, sympy.PolynomialError, TypeError) as exc:
            raise GermError(f"not a polynomial in {list(var_names)}: {text!r}") from exc
        return cls.from_dict(len(var_names), coeffs)

    # -- basic queries ------------------------------------------------------

    def as_dict(self) -> Dict[Exponent, Fraction]:
        return dict(self.terms)

    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self) -> bool:
        return bool(self.terms)

    def __len__(self) -> int:
        return len(self.terms)

    def degree(self) -> int:
        """Total degree; -1 for the zero polynomial."""
        return max((sum(e) for e, _ in self.terms), default=-1)

    def lowest_degree(self) -> int:
        """Multiplicity at the origin (degree of the lowest nonzero homogeneous part)."""
        if not self.terms:
            raise ValueError("zero polynomial has no multiplicity")
        return min(sum(e) for e, _ in self.terms)

    def constant_term(self) -> Fraction:
        return self.as_dict().get((0,) * self.num_vars, Fraction(0))

    def is_homogeneous(self) -> bool:
        return len({sum(e) for e, _ in self.terms}) <= 1

    def depends_only_on(self, indices: Iterable[int]) -> bool:
        allowed = set(indices)
        return all(e == 0 for exps, _ in self.terms for i, e in enumerate(exps) if i not in allowed)

    def leading_term(self) -> "Polynomial":
        return Polynomial(self.num_vars, self.terms[:1])

    # -- arithmetic ---------------------------------------------------------

    def _check_compatible(self, other: "Polynomial") -> None:
        if other.num_vars != self.num_vars:
            raise ValueError(f"variable count mismatch: {self.num_vars} vs {other.num_vars}")

    def _coerce(self, other) -> "Polynomial":
        if isinstance(other, Polynomial):
            self._check_compatible(other)
            return other
        if isinstance(other, (int, Fraction)):
            return Polynomial.constant(self.num_vars, other)
        return NotImplemented

    def __add__(self, other) -> "Polynomial":
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        out = self.as_dict()
        for exps, c in other.terms:
            out[exps] = out.get(exps, Fraction(0)) + c
        return Polynomial.from_dict(self.num_vars, out)

    __radd__ = __add__

    def __neg__(self) -> "Polynomial":
        return Polynomial(self.num_vars, tuple((e, -c) for e, c in self.terms))

    def __sub__(self, other) -> "Polynomial":
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other) -> "Polynomial":
        return (-self) + other

    def __mul__(self, other) -> "Polynomial":
        if isinstance(other, (int, Fraction)):
            c = Fraction(other)
            if c == 0:
                return Polynomial.zero(self.num_vars)
            return Polynomial(self.num_vars, tuple((e, k * c) for e, k in self.terms))
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        out: Dict[Exponent, Fraction] = {}
        for ea, ca in self.terms:
            for eb, cb in other.terms:
                e = tuple(a + b for a, b in zip(ea, eb))
                out[e] = out.get(e, Fraction(0)) + ca * cb
        return Polynomial.from_dict(self.num_vars, out)

    __rmul__ = __mul__

    def __pow__(self, k: int) -> "Polynomial":
        if k < 0:
            raise ValueError("negative power")
        result = Polynomial.constant(self.num_vars, 1)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    # -- calculus -----------------------------------------------------------

    def partial(self, var_index: int) -> "Polynomial":
        """Exact partial derivative with respect to variable ``var_index``."""
        if not 0 <= var_index < self.num_vars:
            raise IndexError(f"variable index {var_index} out of range for {self.num_vars} variables")
        out: Dict[Exponent, Fraction] = {}
        for exps, c in self.terms:
            k = exps[var_index]
            if k == 0:
                continue
            e = list(exps)
            e[var_index] = k - 1
            out[tuple(e)] = out.get(tuple(e), Fraction(0)) + c * k
        return Polynomial.from_dict(self.num_vars, out)

    def gradient(self) -> Tuple["Polynomial", ...]:
        return tuple(self.partial(i) for i in range(self.num_vars))

    def homogeneous_parts(self) -> list[tuple[int, "Polynomial"]]:
        """Homogeneous components sorted by ascending degree."""
        if not self.terms:
            raise ValueError("zero polynomial has no homogeneous decomposition")
        groups: Dict[int, Dict[Exponent, Fraction]] = {}
        for exps, c in self.terms:
            groups.setdefault(sum(exps), {})[exps] = c
        return [(d, Polynomial.from_dict(self.num_vars, groups[d])) for d in sorted(groups)]

    def embed(self, num_vars: int, positions: Sequence[int]) -> "Polynomial":
        """Re-index into a larger variable set; variable i goes to ``positions[i]``."""
        if len(positions) != self.num_vars:
            raise ValueError("positions must list one slot per variable")
        out = {}
        for exps, c in self.terms:
            e = [0] * num_vars
            for i, k in zip(positions, exps):
                e[i] += k
            out[tuple(e)] = c
        return Polynomial.from_dict(num_vars, out)

    # -- evaluation ---------------------------------------------------------

    def evaluate(self, point: Sequence):
        """Evaluate with Python arithmetic; exact when the point is rational."""
        if len(point) != self.num_vars:
            raise ValueError(f"point has length {len(point)}, expected {self.num_vars}")
        total = 0
        for exps, c in self.terms:
            mono = c
            for x, k in zip(point, exps):
                if k:
                    mono = mono * x**k
            total = total + mono
        return total

    def compiled(self) -> "NumericPolynomial":
        cached = self._numeric.get("c")
        if cached is None:
            cached = NumericPolynomial.from_polynomial(self)
            self._numeric["c"] = cached
        return cached

    def __call__(self, point) -> float:
        return self.compiled()(point)

    # -- display / serialization -------------------------------------------

    def to_terms(self) -> list[dict]:
        return [{"coef": _fraction_str(c), "exps": list(e)} for e, c in self.terms]

    @classmethod
    def from_terms(cls, num_vars: int, terms: Iterable[Mapping]) -> "Polynomial":
        coeffs: Dict[Exponent, Fraction] = {}
        for t in terms:
            exps = tuple(t["exps"])
            coeffs[exps] = coeffs.get(exps, Fraction(0)) + parse_rational(t["coef"])
        return cls.from_dict(num_vars, coeffs)

    def format(self, var_names: Sequence[str] | None = None) -> str:
        names = list(var_names) if var_names else [f"x{i + 1}" for i in range(self.num_vars)]
        if not self.terms:
            return "0"
        pieces = []
        for exps, c in self.terms:
            mono = "*".join(n if k == 1 else f"{n}^{k}" for n, k in zip(names, exps) if k)
            if not mono:
                body = _fraction_str(abs(c))
            elif abs(c) == 1:
                body = mono
            else:
                body = f"{_fraction_str(abs(c))}*{mono}"
            pieces.append(("-" if c < 0 else "+", body))
        sign, body = pieces[0]
        out = ("-" if sign == "-" else "") + body
        for sign, body in pieces[1:]:
            out += f" {sign} {body}"
        return out

    def __str__(self) -> str:
        return self.format()


def _fraction_str(c: Fraction) -> str:
    return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"


def parse_rational(text) -> Fraction:
    """Parse a decimal-rational string: ``"3"``, ``"-3/2"``, ``"0.25"``."""
    if isinstance(text, bool):
        raise ValueError("boolean is not a rational coefficient")
    if isinstance(text, int):
        return Fraction(text)
    if not isinstance(text, str):
        raise ValueError(f"coefficient must be a string, got {type(text).__name__}")
    try:
        return Fraction(text.strip())
    except (ValueError, ZeroDivisionError) as exc:
        raise ValueError(f"invalid rational coefficient {text!r}") from exc


def dot(a: Sequence[Polynomial], b: Sequence[Polynomial]) -> Polynomial:
    """Exact Euclidean pairing of two polynomial vectors."""
    if len(a) != len(b) or not a:
        raise ValueError("vectors must be nonempty and of equal length")
    total = Polynomial.zero(a[0].num_vars)
    for p, q in zip(a, b):
        total = total + p * q
    return total


@dataclass(frozen=True)
class NumericPolynomial:
    """Float64 evaluator packed from a :class:`Polynomial`."""

    exponents: np.ndarray  # (T, n) int
    coefficients: np.ndarray  # (T,) float
    num_vars: int

    @classmethod
    def from_polynomial(cls, poly: Polynomial) -> "NumericPolynomial":
        if poly.terms:
            exps = np.array([e for e, _ in poly.terms], dtype=np.int64)
            coefs = np.array([float(c) for _, c in poly.terms], dtype=float)
        else:
            exps = np.zeros((0, poly.num_vars), dtype=np.int64)
            coefs = np.zeros(0)
        return cls(exps, coefs, poly.num_vars)

    def __call__(self, point) -> float:
        x = np.asarray(point, dtype=float)
        if x.shape != (self.num_vars,):
            raise ValueError(f"point has shape {x.shape}, expected ({self.num_vars},)")
        if not len(self.coefficients):
            return 0.0
        return float(self.coefficients @ np.prod(x**self.exponents, axis=1))
