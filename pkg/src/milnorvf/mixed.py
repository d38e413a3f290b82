"""Mixed polynomials f(z, z̄) on C^n: Wirtinger calculus, realification, MSL tools.

Conventions
-----------
* Hermitian product: ``<u, v>_C = sum_j u_j * conj(v_j)``.
* Realification uses interleaved coordinates ``(x1, y1, ..., xn, yn)`` with
  ``z_j = x_j + i y_j``; a complex vector ``w`` in C^n is identified with the
  real vector ``(Re w1, Im w1, ..., Re wn, Im wn)``.
* A mixed function is a *mixed simple L-map* (MSL) when its realification
  ``(Re f, Im f)`` has orthogonal gradients of equal norm; this happens exactly
  when the pairing ``<conj(df), dbar f>_C`` vanishes identically.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, Iterable, Mapping, Sequence, Tuple

import numpy as np

from .errors import GermError, PreconditionError
from .germ import PolyMapGerm, eval_frame
from .polynomial import Polynomial, parse_rational, _fraction_str

Monomial = Tuple[Tuple[int, ...], Tuple[int, ...]]


@dataclass(frozen=True)
class QQi:
    """Exact Gaussian rational re + i*im."""

    re: Fraction = Fraction(0)
    im: Fraction = Fraction(0)

    @classmethod
    def of(cls, value) -> "QQi":
        if isinstance(value, QQi):
            return value
        if isinstance(value, complex):
            return cls(Fraction(value.real), Fraction(value.imag))
        return cls(Fraction(value), Fraction(0))

    def __add__(self, other) -> "QQi":
        other = QQi.of(other)
        return QQi(self.re + other.re, self.im + other.im)

    __radd__ = __add__

    def __neg__(self) -> "QQi":
        return QQi(-self.re, -self.im)

    def __sub__(self, other) -> "QQi":
        return self + (-QQi.of(other))

    def __mul__(self, other) -> "QQi":
        other = QQi.of(other)
        return QQi(self.re * other.re - self.im * other.im, self.re * other.im + self.im * other.re)

    __rmul__ = __mul__

    def conjugate(self) -> "QQi":
        return QQi(self.re, -self.im)

    def __bool__(self) -> bool:
        return bool(self.re) or bool(self.im)

    def __complex__(self) -> complex:
        return complex(float(self.re), float(self.im))

    def __str__(self) -> str:
        if not self.im:
            return _fraction_str(self.re)
        if not self.re:
            return f"{_fraction_str(self.im)}*I"
        sign = "-" if self.im < 0 else "+"
        return f"({_fraction_str(self.re)} {sign} {_fraction_str(abs(self.im))}*I)"


I = QQi(Fraction(0), Fraction(1))


def _mono_key(mono: Monomial) -> tuple:
    nu, mu = mono
    return (sum(nu) + sum(mu), nu, mu)


@dataclass(frozen=True)
class MixedFunction:
    num_cvars: int
    terms: Tuple[Tuple[Monomial, QQi], ...] = ()
    cvar_names: Tuple[str, ...] = ()
    _numeric: dict = field(default_factory=dict, init=False, repr=False, compare=False, hash=False)

    def __post_init__(self):
        if self.num_cvars < 1:
            raise GermError("a mixed function needs at least one complex variable")
        if not self.cvar_names:
            names = ("z",) if self.num_cvars == 1 else tuple(f"z{j + 1}" for j in range(self.num_cvars))
            object.__setattr__(self, "cvar_names", names)
        elif len(self.cvar_names) != self.num_cvars:
            raise GermError("cvar_names length does not match num_cvars")

    @classmethod
    def from_dict(cls, n: int, coeffs: Mapping[Monomial, object], names: Sequence[str] = ()) -> "MixedFunction":
        terms = []
        for (nu, mu), c in coeffs.items():
            nu, mu = tuple(int(k) for k in nu), tuple(int(k) for k in mu)
            if len(nu) != n or len(mu) != n:
                raise GermError(f"exponent vectors must have length {n}")
            if any(k < 0 for k in nu + mu):
                raise GermError("negative exponent")
            c = QQi.of(c)
            if c:
                terms.append(((nu, mu), c))
        terms.sort(key=lambda t: _mono_key(t[0]), reverse=True)
        return cls(n, tuple(terms), tuple(names))

    @classmethod
    def zero(cls, n: int, names: Sequence[str] = ()) -> "MixedFunction":
        return cls(n, (), tuple(names))

    @classmethod
    def from_expr(cls, text: str, cvar_names: Sequence[str]) -> "MixedFunction":
        """Parse e.g. ``"z1**2*z2b**2 + I*z3"``; the conjugate of ``name`` is written ``nameb``."""
        import sympy

        n = len(cvar_names)
        zs = sympy.symbols(list(cvar_names))
        zbs = sympy.symbols([f"{c}b" for c in cvar_names])
        local = {str(s): s for s in list(zs) + list(zbs)}
        local["I"] = sympy.I
        coeffs: Dict[Monomial, QQi] = {}
        try:
            expr = sympy.expand(sympy.sympify(text, locals=local))
            terms = sympy.Poly(expr, *zs, *zbs).terms() if expr != 0 else []
            for exps, c in terms:
                re, im = sympy.re(c), sympy.im(c)
                if not (re.is_Rational and im.is_Rational):
                    raise GermError(f"coefficient {c} is not Gaussian rational")
                q = QQi(Fraction(int(re.p), int(re.q)), Fraction(int(im.p), int(im.q)))
                coeffs[(tuple(exps[:n]), tuple(exps[n:]))] = q
        except (sympy.SympifyError, sympy.PolynomialError, TypeError) as exc:
            raise GermError(f"not a mixed polynomial in {list(cvar_names)}: {text!r}") from exc
        return cls.from_dict(n, coeffs, cvar_names)

    def as_dict(self) -> Dict[Monomial, QQi]:
        return dict(self.terms)

    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self) -> bool:
        return bool(self.terms)

    def degree(self) -> int:
        return max((sum(nu) + sum(mu) for (nu, mu), _ in self.terms), default=-1)

    def constant_term(self) -> QQi:
        zero = (0,) * self.num_cvars
        return self.as_dict().get((zero, zero), QQi())

    def is_holomorphic(self) -> bool:
        return all(not any(mu) for (nu, mu), _ in self.terms)

    def depends_only_on(self, indices: Iterable[int]) -> bool:
        allowed = set(indices)
        return all(
            nu[j] == 0 and mu[j] == 0
            for (nu, mu), _ in self.terms
            for j in range(self.num_cvars)
            if j not in allowed
        )

    def leading_term(self) -> "MixedFunction":
        return MixedFunction(self.num_cvars, self.terms[:1], self.cvar_names)

    # arithmetic

    def _same_space(self, other: "MixedFunction") -> None:
        if other.num_cvars != self.num_cvars:
            raise GermError(f"variable count mismatch: {self.num_cvars} vs {other.num_cvars}")

    def __add__(self, other: "MixedFunction") -> "MixedFunction":
        self._same_space(other)
        out = self.as_dict()
        for mono, c in other.terms:
            out[mono] = out.get(mono, QQi()) + c
        return MixedFunction.from_dict(self.num_cvars, out, self.cvar_names)

    def __neg__(self) -> "MixedFunction":
        return MixedFunction(self.num_cvars, tuple((m, -c) for m, c in self.terms), self.cvar_names)

    def __sub__(self, other: "MixedFunction") -> "MixedFunction":
        return self + (-other)

    def scale(self, c) -> "MixedFunction":
        c = QQi.of(c)
        return MixedFunction.from_dict(self.num_cvars, {m: k * c for m, k in self.terms}, self.cvar_names)

    def __mul__(self, other) -> "MixedFunction":
        if not isinstance(other, MixedFunction):
            return self.scale(other)
        self._same_space(other)
        out: Dict[Monomial, QQi] = {}
        for (na, ma), ca in self.terms:
            for (nb, mb), cb in other.terms:
                key = (tuple(a + b for a, b in zip(na, nb)), tuple(a + b for a, b in zip(ma, mb)))
                out[key] = out.get(key, QQi()) + ca * cb
        return MixedFunction.from_dict(self.num_cvars, out, self.cvar_names)

    def conjugate(self) -> "MixedFunction":
        return MixedFunction.from_dict(
            self.num_cvars, {(mu, nu): c.conjugate() for (nu, mu), c in self.terms}, self.cvar_names
        )

    def real_part(self) -> "MixedFunction":
        return (self + self.conjugate()).scale(Fraction(1, 2))

    def imag_part(self) -> "MixedFunction":
        # (P - conj P) / (2i) = -i/2 * (P - conj P)
        return (self - self.conjugate()).scale(QQi(Fraction(0), Fraction(-1, 2)))

    # Wirtinger derivatives

    def d_z(self, j: int) -> "MixedFunction":
        out: Dict[Monomial, QQi] = {}
        for (nu, mu), c in self.terms:
            if nu[j]:
                nn = list(nu)
                nn[j] -= 1
                key = (tuple(nn), mu)
                out[key] = out.get(key, QQi()) + c * nu[j]
        return MixedFunction.from_dict(self.num_cvars, out, self.cvar_names)

    def d_zbar(self, j: int) -> "MixedFunction":
        out: Dict[Monomial, QQi] = {}
        for (nu, mu), c in self.terms:
            if mu[j]:
                mm = list(mu)
                mm[j] -= 1
                key = (nu, tuple(mm))
                out[key] = out.get(key, QQi()) + c * mu[j]
        return MixedFunction.from_dict(self.num_cvars, out, self.cvar_names)

    def holomorphic_gradient(self) -> tuple["MixedFunction", ...]:
        return tuple(self.d_z(j) for j in range(self.num_cvars))

    def antiholomorphic_gradient(self) -> tuple["MixedFunction", ...]:
        return tuple(self.d_zbar(j) for j in range(self.num_cvars))

    def embed(self, n: int, positions: Sequence[int], names: Sequence[str] = ()) -> "MixedFunction":
        out = {}
        for (nu, mu), c in self.terms:
            a, b = [0] * n, [0] * n
            for src, dst in enumerate(positions):
                a[dst] += nu[src]
                b[dst] += mu[src]
            out[(tuple(a), tuple(b))] = c
        return MixedFunction.from_dict(n, out, names)

    # evaluation

    def __call__(self, point) -> complex:
        z = np.asarray(point, dtype=complex)
        if z.shape != (self.num_cvars,):
            raise PreconditionError(f"dimension mismatch: point of shape {z.shape}, expected ({self.num_cvars},)")
        packed = self._numeric.get("c")
        if packed is None:
            if self.terms:
                nus = np.array([nu for (nu, _), _ in self.terms])
                mus = np.array([mu for (_, mu), _ in self.terms])
                cs = np.array([complex(c) for _, c in self.terms])
            else:
                nus = mus = np.zeros((0, self.num_cvars), dtype=int)
                cs = np.zeros(0, dtype=complex)
            packed = (nus, mus, cs)
            self._numeric["c"] = packed
        nus, mus, cs = packed
        if not len(cs):
            return 0j
        return complex(cs @ (np.prod(z**nus, axis=1) * np.prod(np.conj(z) ** mus, axis=1)))

    # serialization

    def to_document(self) -> dict:
        return {
            "kind": "mixed",
            "cvars": list(self.cvar_names),
            "terms": [
                {"coef": [_fraction_str(c.re), _fraction_str(c.im)], "zexp": list(nu), "zbarexp": list(mu)}
                for (nu, mu), c in self.terms
            ],
        }

    def format(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for (nu, mu), c in self.terms:
            factors = [n if k == 1 else f"{n}^{k}" for n, k in zip(self.cvar_names, nu) if k]
            factors += [f"conj({n})" if k == 1 else f"conj({n})^{k}" for n, k in zip(self.cvar_names, mu) if k]
            mono = "*".join(factors)
            if not c.im:
                sign = "-" if c.re < 0 else "+"
                mag = abs(c.re)
                body = mono if mag == 1 and mono else (f"{_fraction_str(mag)}*{mono}" if mono else _fraction_str(mag))
            else:
                sign = "+"
                body = f"{c}*{mono}" if mono else str(c)
            parts.append((sign, body))
        out = ("-" if parts[0][0] == "-" else "") + parts[0][1]
        for sign, body in parts[1:]:
            out += f" {sign} {body}"
        return out

    def __str__(self) -> str:
        return self.format()


def _parse_complex_coef(raw) -> QQi:
    if isinstance(raw, list):
        if len(raw) != 2:
            raise GermError("complex coefficient must be [re, im]")
        return QQi(parse_rational(raw[0]), parse_rational(raw[1]))
    return QQi(parse_rational(raw), Fraction(0))


def parse_mixed(document: dict | str) -> MixedFunction:
    if isinstance(document, str):
        try:
            document = json.loads(document)
        except json.JSONDecodeError as exc:
            raise GermError(f"malformed mixed document: {exc}") from exc
    if not isinstance(document, dict) or document.get("kind") != "mixed":
        raise GermError("mixed document must be an object with kind 'mixed'")
    names = document.get("cvars")
    terms = document.get("terms")
    if not isinstance(names, list) or not names or not isinstance(terms, list):
        raise GermError("mixed document needs nonempty 'cvars' and a 'terms' list")
    n = len(names)
    coeffs: Dict[Monomial, QQi] = {}
    try:
        for t in terms:
            nu, mu = tuple(t["zexp"]), tuple(t["zbarexp"])
            if len(nu) != n or len(mu) != n:
                raise GermError(f"exponent vectors must have length {n}")
            coeffs[(nu, mu)] = coeffs.get((nu, mu), QQi()) + _parse_complex_coef(t["coef"])
    except (KeyError, TypeError, ValueError) as exc:
        if isinstance(exc, GermError):
            raise
        raise GermError(f"malformed mixed term ({exc})") from exc
    f = MixedFunction.from_dict(n, coeffs, [str(s) for s in names])
    if f.is_zero():
        raise GermError("mixed function is identically zero")
    if f.constant_term():
        raise GermError("mixed function has nonzero constant term")
    return f


def serialize_mixed(f: MixedFunction) -> str:
    return json.dumps(f.to_document(), sort_keys=True, separators=(",", ":"))


# -- realification ---------------------------------------------------------

def realify(f: MixedFunction) -> PolyMapGerm:
    """Real pair (Re f, Im f) on R^{2n} with interleaved (x1, y1, ..., xn, yn)."""
    n = f.num_cvars
    m = 2 * n
    zero = Polynomial.zero(m)
    one = Polynomial.constant(m, 1)
    cache: Dict[tuple, tuple[Polynomial, Polynomial]] = {}

    def cmul(a, b):
        return (a[0] * b[0] - a[1] * b[1], a[0] * b[1] + a[1] * b[0])

    def power(j: int, conj: bool, k: int):
        key = (j, conj, k)
        if key not in cache:
            if k == 0:
                cache[key] = (one, zero)
            else:
                x = Polynomial.variable(m, 2 * j)
                y = Polynomial.variable(m, 2 * j + 1)
                base = (x, -y) if conj else (x, y)
                cache[key] = cmul(power(j, conj, k - 1), base)
        return cache[key]

    u, v = zero, zero
    for (nu, mu), c in f.terms:
        acc = (Polynomial.constant(m, c.re), Polynomial.constant(m, c.im))
        for j in range(n):
            if nu[j]:
                acc = cmul(acc, power(j, False, nu[j]))
            if mu[j]:
                acc = cmul(acc, power(j, True, mu[j]))
        u, v = u + acc[0], v + acc[1]
    names = []
    for name in f.cvar_names:
        names += [f"{name}_re", f"{name}_im"]
    return PolyMapGerm(m, (u, v), tuple(names))


def complex_to_real(z) -> np.ndarray:
    z = np.asarray(z, dtype=complex)
    out = np.empty(2 * z.size)
    out[0::2] = z.real
    out[1::2] = z.imag
    return out


def real_to_complex(x) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    return x[0::2] + 1j * x[1::2]


# -- Wirtinger frames ------------------------------------------------------

def hermitian(u, v) -> complex:
    return complex(np.sum(np.asarray(u) * np.conj(np.asarray(v))))


@dataclass(frozen=True)
class WirtingerFrame:
    point: np.ndarray
    value: complex
    dholo: np.ndarray
    dantiholo: np.ndarray
    pairing: complex

    def realified_gradients(self) -> tuple[np.ndarray, np.ndarray]:
        """(grad u, grad v) reconstructed from the Wirtinger gradients."""
        c = np.conj(self.dholo)
        d = self.dantiholo
        return complex_to_real(c + d), complex_to_real(1j * (c - d))


def wirtinger_frame(f: MixedFunction, point) -> WirtingerFrame:
    z = np.asarray(point, dtype=complex)
    if z.shape != (f.num_cvars,):
        raise PreconditionError(f"dimension mismatch: point of shape {z.shape}, expected ({f.num_cvars},)")
    df = np.array([p(z) for p in f.holomorphic_gradient()])
    dbf = np.array([p(z) for p in f.antiholomorphic_gradient()])
    return WirtingerFrame(z, f(z), df, dbf, hermitian(np.conj(df), dbf))


def identification_residuals(f: MixedFunction, point) -> tuple[float, float]:
    """Distances between realified gradients and their Wirtinger reconstructions."""
    frame = wirtinger_frame(f, point)
    gu, gv = frame.realified_gradients()
    jac = realify(f).jacobian(complex_to_real(point))
    return float(np.linalg.norm(jac[0] - gu)), float(np.linalg.norm(jac[1] - gv))


# -- MSL check / generator -------------------------------------------------

def pairing_polynomial(f: MixedFunction) -> MixedFunction:
    """The formal mixed polynomial <conj(df), dbar f>_C = sum_j conj(f_zj) * conj(f_zbar_j)."""
    total = MixedFunction.zero(f.num_cvars, f.cvar_names)
    for j in range(f.num_cvars):
        dbf = f.d_zbar(j)
        if dbf.is_zero():
            continue
        total = total + f.d_z(j).conjugate() * dbf.conjugate()
    return total


@dataclass(frozen=True)
class MslVerdict:
    holds: bool
    mode: str
    witness: MixedFunction | None = None

    def to_dict(self) -> dict:
        return {
            "holds": self.holds,
            "mode": self.mode,
            "witness": None if self.witness is None else self.witness.format(),
        }


def msl_check(f: MixedFunction, mode: str = "full") -> MslVerdict:
    """Exact test that the Wirtinger pairing vanishes (``full``) or has zero imaginary part (``im_only``)."""
    if mode not in ("full", "im_only"):
        raise ValueError(f"unknown mode {mode!r}")
    if f.is_holomorphic():
        return MslVerdict(True, mode)
    pairing = pairing_polynomial(f)
    target = pairing if mode == "full" else pairing.imag_part()
    if target.is_zero():
        return MslVerdict(True, mode)
    return MslVerdict(False, mode, target.leading_term())


@dataclass(frozen=True)
class MslRecipe:
    n: int
    block: tuple[int, ...]
    f: tuple[MixedFunction, ...] = ()
    g: tuple[MixedFunction, ...] = ()
    r: tuple[MixedFunction, ...] = ()
    h: tuple[MixedFunction, ...] = ()

    @property
    def complement(self) -> tuple[int, ...]:
        return tuple(j for j in range(self.n) if j not in self.block)

    def validate(self) -> None:
        if self.n < 2:
            raise GermError("recipe needs n >= 2")
        if not self.block or len(set(self.block)) != len(self.block) or list(self.block) != sorted(self.block):
            raise GermError("block indices must be strictly increasing")
        if not all(0 <= j < self.n for j in self.block) or not 1 <= len(self.block) < self.n:
            raise GermError("block must be a proper nonempty subset of the variables")
        if len(self.f) != len(self.g):
            raise GermError("f and g must have the same number of pieces")
        for label, pieces, allowed in (
            ("f", self.f, self.block),
            ("r", self.r, self.block),
            ("g", self.g, self.complement),
            ("h", self.h, self.complement),
        ):
            for k, piece in enumerate(pieces):
                if piece.num_cvars != self.n:
                    raise GermError(f"{label}[{k}] lives in the wrong number of variables")
                if not piece.is_holomorphic():
                    raise GermError(f"{label}[{k}] is not holomorphic")
                if not piece.depends_only_on(allowed):
                    raise GermError(f"{label}[{k}] depends on a variable outside its block")
                if piece.constant_term():
                    raise GermError(f"{label}[{k}] has a nonzero constant term")


def msl_generate(recipe: MslRecipe) -> MixedFunction:
    """Sum f_a * conj(g_a) + sum r_b + sum conj(h_c)."""
    recipe.validate()
    names = recipe.f[0].cvar_names if recipe.f else ()
    total = MixedFunction.zero(recipe.n, names)
    for fa, ga in zip(recipe.f, recipe.g):
        total = total + fa * ga.conjugate()
    for rb in recipe.r:
        total = total + rb
    for hc in recipe.h:
        total = total + hc.conjugate()
    return total


def _piece_from_terms(terms, n: int, block: Sequence[int], names) -> MixedFunction:
    coeffs: Dict[Monomial, QQi] = {}
    for t in terms:
        exps = list(t["exps"])
        if len(exps) == len(block):
            full = [0] * n
            for local, j in enumerate(block):
                full[j] = exps[local]
        elif len(exps) == n:
            full = exps
        else:
            raise GermError(f"piece exponent vector must have length {len(block)} (block-local) or {n}")
        key = (tuple(int(e) for e in full), (0,) * n)
        coeffs[key] = coeffs.get(key, QQi()) + _parse_complex_coef(t["coef"])
    return MixedFunction.from_dict(n, coeffs, names)


def parse_recipe(document: dict | str) -> MslRecipe:
    """Recipe format: ``{"n": 4, "block": [1, 3], "f": [...], "g": [...], "r": [...], "h": [...]}``.

    Block indices are 1-based. Each piece is a list of ``{"coef", "exps"}`` terms whose
    exponent vectors are either local to the piece's block or span all ``n`` variables.
    """
    if isinstance(document, str):
        try:
            document = json.loads(document)
        except json.JSONDecodeError as exc:
            raise GermError(f"malformed recipe document: {exc}") from exc
    try:
        n = int(document["n"])
        block = tuple(int(j) - 1 for j in document["block"])
        names = tuple(document.get("cvars") or (f"z{j + 1}" for j in range(n)))
        comp = tuple(j for j in range(n) if j not in block)
        pieces = {}
        for label, idx in (("f", block), ("r", block), ("g", comp), ("h", comp)):
            pieces[label] = tuple(_piece_from_terms(p, n, idx, names) for p in document.get(label, []))
    except (KeyError, TypeError, ValueError) as exc:
        if isinstance(exc, GermError):
            raise
        raise GermError(f"malformed recipe ({exc})") from exc
    recipe = MslRecipe(n, block, **pieces)
    recipe.validate()
    return recipe


def _random_holomorphic(rng: np.random.Generator, n: int, support: Sequence[int], max_deg: int) -> MixedFunction:
    coeffs: Dict[Monomial, QQi] = {}
    for _ in range(int(rng.integers(1, 4))):
        deg = int(rng.integers(1, max_deg + 1))
        nu = [0] * n
        for _ in range(deg):
            nu[int(rng.choice(support))] += 1
        re = Fraction(int(rng.integers(-5, 6)), int(rng.integers(1, 4)))
        im = Fraction(int(rng.integers(-5, 6)), int(rng.integers(1, 4)))
        if not re and not im:
            re = Fraction(1)
        key = (tuple(nu), (0,) * n)
        coeffs[key] = coeffs.get(key, QQi()) + QQi(re, im)
    piece = MixedFunction.from_dict(n, coeffs)
    if piece.is_zero():
        nu = [0] * n
        nu[int(support[0])] = 1
        piece = MixedFunction.from_dict(n, {(tuple(nu), (0,) * n): 1})
    return piece


def random_recipe(rng: np.random.Generator, n: int, k: int | None = None, max_deg: int = 4) -> MslRecipe:
    if n < 2:
        raise GermError("recipe needs n >= 2")
    if k is None:
        k = int(rng.integers(1, n))
    if not 1 <= k < n:
        raise GermError("block size k must satisfy 1 <= k < n")
    block = tuple(sorted(int(j) for j in rng.choice(n, size=k, replace=False)))
    comp = tuple(j for j in range(n) if j not in block)
    j = int(rng.integers(1, 3))
    return MslRecipe(
        n,
        block,
        f=tuple(_random_holomorphic(rng, n, block, max_deg) for _ in range(j)),
        g=tuple(_random_holomorphic(rng, n, comp, max_deg) for _ in range(j)),
        r=tuple(_random_holomorphic(rng, n, block, max_deg) for _ in range(int(rng.integers(0, 3)))),
        h=tuple(_random_holomorphic(rng, n, comp, max_deg) for _ in range(int(rng.integers(0, 3)))),
    )


def random_mixed(rng: np.random.Generator, n: int, max_deg: int = 3, num_terms: int = 4) -> MixedFunction:
    """Random mixed polynomial with zero constant term (for property tests)."""
    coeffs: Dict[Monomial, QQi] = {}
    for _ in range(num_terms):
        deg = int(rng.integers(1, max_deg + 1))
        nu, mu = [0] * n, [0] * n
        for _ in range(deg):
            j = int(rng.integers(n))
            if rng.random() < 0.5:
                nu[j] += 1
            else:
                mu[j] += 1
        c = QQi(Fraction(int(rng.integers(-4, 5)), int(rng.integers(1, 3))), Fraction(int(rng.integers(-4, 5))))
        key = (tuple(nu), tuple(mu))
        coeffs[key] = coeffs.get(key, QQi()) + c
    f = MixedFunction.from_dict(n, coeffs)
    if f.is_zero():
        e = tuple(1 if j == 0 else 0 for j in range(n))
        f = MixedFunction.from_dict(n, {(e, (0,) * n): 1})
    return f


def random_holomorphic(rng: np.random.Generator, n: int, max_deg: int = 4) -> MixedFunction:
    return _random_holomorphic(rng, n, list(range(n)), max_deg)


# -- separable products ----------------------------------------------------

def separable_product(f: MixedFunction, g: MixedFunction) -> MixedFunction:
    """F(z, w) = f(z) * g(w) on C^{n+m}; f's variables come first."""
    n, m = f.num_cvars, g.num_cvars
    names = _disjoint_names(f.cvar_names, g.cvar_names)
    fe = f.embed(n + m, range(n), names)
    ge = g.embed(n + m, range(n, n + m), names)
    return fe * ge


def _disjoint_names(a: Sequence[str], b: Sequence[str]) -> tuple[str, ...]:
    if len(set(a) | set(b)) == len(a) + len(b):
        return tuple(a) + tuple(b)
    return tuple(f"z{j + 1}" for j in range(len(a) + len(b)))


def omega_p2(values: np.ndarray, jacobian: np.ndarray) -> np.ndarray:
    """u * grad v - v * grad u for a real pair (u, v)."""
    return values[0] * jacobian[1] - values[1] * jacobian[0]


@dataclass(frozen=True)
class ProductResiduals:
    grad_norm_residual: float
    omega_residual: float
    scale: float

    def within(self, rel: float = 1e-10) -> bool:
        bound = rel * (1.0 + self.scale)
        return self.grad_norm_residual <= bound and self.omega_residual <= bound


def product_identity_residuals(f: MixedFunction, g: MixedFunction, point) -> ProductResiduals:
    """Compare grad|F|^2 and Omega_F of F = f*g with their block-factorized forms."""
    z = np.asarray(point, dtype=complex)
    n, m = f.num_cvars, g.num_cvars
    if z.shape != (n + m,):
        raise PreconditionError(f"block mismatch: point of length {z.size}, expected {n + m}")
    big = eval_frame(realify(separable_product(f, g)), complex_to_real(z))
    ff = eval_frame(realify(f), complex_to_real(z[:n]))
    gf = eval_frame(realify(g), complex_to_real(z[n:]))
    nf2, ng2 = float(ff.values @ ff.values), float(gf.values @ gf.values)
    expected_grad = np.concatenate([ng2 * ff.grad_norm_sq, nf2 * gf.grad_norm_sq])
    expected_omega = np.concatenate(
        [ng2 * omega_p2(ff.values, ff.jacobian), nf2 * omega_p2(gf.values, gf.jacobian)]
    )
    omega = omega_p2(big.values, big.jacobian)
    scale = max(
        float(np.linalg.norm(big.grad_norm_sq)),
        float(np.linalg.norm(expected_grad)),
        float(np.linalg.norm(omega)),
        float(np.linalg.norm(expected_omega)),
    )
    return ProductResiduals(
        float(np.linalg.norm(big.grad_norm_sq - expected_grad)),
        float(np.linalg.norm(omega - expected_omega)),
        scale,
    )
