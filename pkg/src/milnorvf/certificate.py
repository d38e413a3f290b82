"""Certificates: symbolic verdicts plus sampled numeric evidence for one input.

The ``conclusion`` only ever cites a criterion whose hypotheses were verified
symbolically.  Sampled a(x) values, determinants and the |G| growth record
are reported as evidence and never promote a verdict.
"""

from __future__ import annotations

import csv
import hashlib
import io
import json
from dataclasses import dataclass, field
from importlib import resources

import numpy as np

from .criteria import check_structural_criteria
from .errors import GermError
from .germ import PolyMapGerm, parse_germ
from .milnor import DEFAULT_TOLERANCES, ROUTES, AnalysisPoint, Tolerances, norm_growth_evidence, sample_milnor_set
from .mixed import MixedFunction, msl_check, parse_mixed, realify, separable_product

SCHEMA_ID = "milnorvf.certificate/1"

CLAIM_A_POSITIVE = "a(x) > 0 on M(G) minus (V_G and Sing G), near the origin"
CLAIM_FIBRATIONS = "tube and sphere fibrations exist and are equivalent"

# Strongest first.
PRIORITY = (
    "mixed_simple_l_map",
    "simple_l_map",
    "separable_product_holomorphic_factor",
    "separable_product_msl_factor",
    "orthogonal_gradients",
    "same_multiplicity",
    "omega_orthogonality",
)


@dataclass(frozen=True)
class ProductInput:
    """F = f * g with f and g in separate variables (f's variables first)."""

    f: MixedFunction
    g: MixedFunction

    @property
    def product(self) -> MixedFunction:
        return separable_product(self.f, self.g)

    def to_document(self) -> dict:
        return {"kind": "product", "f": self.f.to_document(), "g": self.g.to_document()}


def load_input(document: dict | str):
    """Dispatch on ``kind``: ``real`` -> PolyMapGerm, ``mixed`` -> MixedFunction, ``product`` -> ProductInput."""
    if isinstance(document, str):
        try:
            document = json.loads(document)
        except json.JSONDecodeError as exc:
            raise GermError(f"malformed input document: {exc}") from exc
    if not isinstance(document, dict):
        raise GermError("input document must be a JSON object")
    kind = document.get("kind", "real")
    if kind == "real":
        return parse_germ(document)
    if kind == "mixed":
        return parse_mixed(document)
    if kind == "product":
        try:
            return ProductInput(parse_mixed(document["f"]), parse_mixed(document["g"]))
        except KeyError as exc:
            raise GermError("product document needs 'f' and 'g'") from exc
    raise GermError(f"unknown input kind {kind!r}")


def real_germ_of(obj) -> PolyMapGerm:
    if isinstance(obj, PolyMapGerm):
        return obj
    if isinstance(obj, MixedFunction):
        return realify(obj)
    if isinstance(obj, ProductInput):
        return realify(obj.product)
    raise TypeError(f"unsupported input {type(obj).__name__}")


@dataclass(frozen=True)
class CertifyOptions:
    radii: tuple[float, ...] = (1e-1, 1e-2, 1e-3)
    samples: int = 200
    seed: int = 0
    tolerances: Tolerances = DEFAULT_TOLERANCES
    assume_disc_zero: bool = False

    def __post_init__(self):
        if not self.radii or any(r <= 0 for r in self.radii):
            raise ValueError("radii must be positive")
        if any(b >= a for a, b in zip(self.radii, self.radii[1:])):
            raise ValueError("radii must be strictly decreasing")
        if self.samples <= 0:
            raise ValueError("samples must be positive")


@dataclass
class Certificate:
    data: dict
    samples: dict = field(default_factory=dict)  # radius -> list[AnalysisPoint]

    @property
    def status(self) -> str:
        return self.data["conclusion"]["status"]

    @property
    def criterion(self) -> str | None:
        return self.data["conclusion"]["criterion"]

    @property
    def exit_code(self) -> int:
        return 0 if self.status == "certified" else 2

    def to_json(self) -> str:
        return json.dumps(self.data, indent=2, sort_keys=True) + "\n"


def _f(x) -> float | None:
    return None if x is None else float(x)


def _point_record(ap: AnalysisPoint) -> dict:
    a = {route: _f(ap.a_values.get(route)) for route in ROUTES}
    defined = [v for v in a.values() if v is not None]
    signs = {np.sign(v) for v in defined}
    if ap.det_D is not None:
        signs.add(np.sign(ap.det_D))
    return {
        "point": [float(v) for v in ap.point],
        "norm_g": ap.norm_g,
        "milnor_residual": ap.milnor_residual,
        "sing_gap": ap.sing_gap,
        "chart": ap.chart,
        "a": a,
        "det_D": _f(ap.det_D),
        "det_M": _f(ap.det_M),
        "radial_product": ap.radial_product,
        "sign_agreement": len(signs) == 1,
    }


def _rel(a: float, b: float) -> float:
    return abs(a - b) / (1.0 + abs(a))


def _radius_record(radius: float, pts: list[AnalysisPoint]) -> dict:
    good = [ap for ap in pts if ap.excluded is None]
    a_c = [ap.a_values.get("cramer") for ap in good]
    agree = 0.0
    for ap in good:
        c = ap.a_values.get("cramer")
        for route in ("alpha", "matrix_identity"):
            other = ap.a_values.get(route)
            if c is not None and other is not None:
                agree = max(agree, _rel(c, other))
    return {
        "radius": float(radius),
        "milnor_samples": len(good),
        "excluded_sing": sum(ap.excluded == "Sing" for ap in pts),
        "excluded_vanishing": sum(ap.excluded == "V_G" for ap in pts),
        "a_positive": sum(1 for v in a_c if v is not None and v > 0),
        "a_nonpositive": sum(1 for v in a_c if v is not None and v <= 0),
        "det_D_positive": sum(1 for ap in good if ap.det_D is not None and ap.det_D > 0),
        "min_det_M": min((ap.det_M for ap in good if ap.det_M is not None), default=None),
        "min_radial_product": min((ap.radial_product for ap in good), default=None),
        "max_route_disagreement": agree,
        "points": [_point_record(ap) for ap in good],
    }


def _conclude(applicable: list[dict], all_positive: bool, assume_disc_zero: bool) -> dict:
    if not applicable:
        return {
            "status": "inconclusive",
            "criterion": None,
            "claim": None,
            "assumptions": [],
            "applicable": [],
            "all_sampled_a_positive": all_positive,
        }
    applicable = sorted(applicable, key=lambda c: PRIORITY.index(c["criterion"]))
    best = applicable[0]
    return {
        "status": "certified" if all_positive else "criterion_holds_sampling_disagrees",
        "criterion": best["criterion"],
        "claim": best["claim"],
        "assumptions": best["assumptions"],
        "applicable": [c["criterion"] for c in applicable],
        "all_sampled_a_positive": all_positive,
    }


def _disc_assumption(assume_disc_zero: bool) -> list[str]:
    note = "Disc G = {0} (asserted by user, not computed)" if assume_disc_zero else "Disc G = {0} (not verified)"
    return [f"for MVF existence and rho-regularity: {note}"]


def certify(obj, options: CertifyOptions = CertifyOptions()) -> Certificate:
    germ = real_germ_of(obj)
    tol = options.tolerances
    structural = check_structural_criteria(germ)
    applicable: list[dict] = []

    symbolic = {"structural": structural.to_dict(), "msl": None, "product": None}
    if isinstance(obj, MixedFunction):
        full, im_only = msl_check(obj, "full"), msl_check(obj, "im_only")
        symbolic["msl"] = {"holomorphic": obj.is_holomorphic(), "full": full.to_dict(), "im_only": im_only.to_dict()}
        if full.holds:
            applicable.append({"criterion": "mixed_simple_l_map", "claim": f"{CLAIM_A_POSITIVE}; {CLAIM_FIBRATIONS}",
                               "assumptions": []})
    if isinstance(obj, ProductInput):
        hol = [obj.f.is_holomorphic(), obj.g.is_holomorphic()]
        msl = [msl_check(obj.f).holds, msl_check(obj.g).holds]
        symbolic["product"] = {"factor_holomorphic": hol, "factor_msl": msl}
        growth = "closure(M(F) minus F^-1(Disc F)) meets V_F only at 0 (sampled growth evidence only)"
        if any(hol):
            applicable.append({"criterion": "separable_product_holomorphic_factor", "claim": CLAIM_FIBRATIONS,
                               "assumptions": [growth]})
        elif any(msl):
            applicable.append({"criterion": "separable_product_msl_factor", "claim": CLAIM_FIBRATIONS,
                               "assumptions": [growth]})
    if structural.simple_l_map.holds:
        applicable.append({"criterion": "simple_l_map", "claim": f"{CLAIM_A_POSITIVE}; {CLAIM_FIBRATIONS}",
                           "assumptions": []})
    for name in ("orthogonal_gradients", "same_multiplicity", "omega_orthogonality"):
        if getattr(structural, name).holds:
            applicable.append({"criterion": name, "claim": CLAIM_A_POSITIVE,
                               "assumptions": _disc_assumption(options.assume_disc_zero)})

    samples: dict = {}
    per_radius = []
    for k, r in enumerate(options.radii):
        pts = sample_milnor_set(germ, r, options.samples, tol, options.seed + k, keep_excluded=True)
        samples[r] = pts
        per_radius.append(_radius_record(r, pts))
    norm_growth = norm_growth_evidence(germ, options.radii, options.samples, options.seed, tol,
                             samples={r: [ap for ap in pts if ap.excluded is None] for r, pts in samples.items()})
    # leading_term is an approximation of a(x), so it does not vote
    all_positive = all(
        p["a"][route] is None or p["a"][route] > 0
        for rec in per_radius
        for p in rec["points"]
        for route in ("cramer", "alpha", "matrix_identity")
    )

    doc = obj.to_document()
    blob = json.dumps(doc, sort_keys=True, separators=(",", ":"))
    data = {
        "schema": SCHEMA_ID,
        "input": {
            "kind": doc["kind"],
            "hash": hashlib.sha256(blob.encode("utf-8")).hexdigest(),
            "realified_hash": germ.content_hash(),
            "description": germ.format() if isinstance(obj, PolyMapGerm) else (
                obj.product.format() if isinstance(obj, ProductInput) else obj.format()),
            "m": germ.m,
            "p": germ.p,
        },
        "conventions": {
            "rho": "|x|^2",
            "grad_rho": "2x",
            "alpha": "x = sum_k alpha_k grad G_k",
            "chart": "argmax_j |G_j(x)|",
            "hermitian": "<u, v> = sum u_j conj(v_j)",
            "realification": "interleaved (x1, y1, ..., xn, yn)",
        },
        "options": {
            "radii": [float(r) for r in options.radii],
            "samples": options.samples,
            "seed": options.seed,
            "assume_disc_zero": options.assume_disc_zero,
            "tolerances": tol.to_dict(),
        },
        "symbolic": symbolic,
        "evidence": {
            "label": "evidence (not proof)",
            "per_radius": per_radius,
            "norm_growth": norm_growth,
        },
        "conclusion": _conclude(applicable, all_positive, options.assume_disc_zero),
    }
    return Certificate(data, samples)


# -- CSV / schema --------------------------------------------------------

SAMPLE_COLUMNS_TAIL = [
    "normG", "milnor_residual", "sing_gap", "a_cramer", "a_alpha", "a_matrix", "a_leading", "detD", "detM",
]


def _cell(v) -> str:
    return "" if v is None else repr(float(v))


def samples_csv(germ: PolyMapGerm, samples: dict) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["radius"] + [f"x{i + 1}" for i in range(germ.m)] + SAMPLE_COLUMNS_TAIL)
    for r, pts in samples.items():
        for ap in pts:
            if ap.excluded is not None:
                continue
            a = ap.a_values
            writer.writerow(
                [_cell(r)]
                + [_cell(v) for v in ap.point]
                + [_cell(ap.norm_g), _cell(ap.milnor_residual), _cell(ap.sing_gap),
                   _cell(a.get("cramer")), _cell(a.get("alpha")), _cell(a.get("matrix_identity")),
                   _cell(a.get("leading_term")), _cell(ap.det_D), _cell(ap.det_M)]
            )
    return buf.getvalue()


def certificate_schema() -> dict:
    text = resources.files("milnorvf").joinpath("certificate.schema.json").read_text(encoding="utf-8")
    return json.loads(text)


def validate_certificate(data: dict) -> None:
    import jsonschema

    jsonschema.validate(data, certificate_schema())
