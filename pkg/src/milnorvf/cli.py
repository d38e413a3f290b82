"""Command-line front end.

Exit codes: 0 certified / verified, 2 inconclusive, 3 rho-regularity
violation during a flow, 1 input or usage error.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import jsonschema
import numpy as np

from .certificate import (
    CertifyOptions,
    certify,
    load_input,
    real_germ_of,
    samples_csv,
    validate_certificate,
)
from .errors import GermError, PreconditionError
from .flow import (
    RhoRegularityError,
    StepperOptions,
    flow_to_sphere,
    trajectory_csv,
    trajectory_report,
    tube_starts,
)
from .milnor import ROUTES, Tolerances, analyze_point, a_coefficient, build_D_M, sample_milnor_set
from .mixed import msl_check, msl_generate, parse_recipe, random_recipe

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_INCONCLUSIVE = 2
EXIT_RHO_REGULARITY = 3

ROUTE_FLAGS = {"cramer": "cramer", "alpha": "alpha", "matrix": "matrix_identity", "leading": "leading_term"}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # argparse exits with 2 on bad usage, which would read as "inconclusive"
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_ERROR, f"{self.prog}: error: {message}\n")


def _float_list(text: str) -> tuple[float, ...]:
    try:
        return tuple(float(s) for s in text.split(",") if s.strip())
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from exc


def _write(path: str | None, text: str) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
        return
    Path(path).parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)


def _dump(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def _read_input(path: str):
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise GermError(f"cannot read {path}: {exc.strerror}") from exc
    return load_input(text)


def _tolerances(args) -> Tolerances:
    base = Tolerances()
    return Tolerances(
        milnor=base.milnor if args.tol_m is None else args.tol_m,
        singular=base.singular if args.tol_s is None else args.tol_s,
        vanishing=base.vanishing if args.tol_v is None else args.tol_v,
    )


def _options(args) -> CertifyOptions:
    try:
        return CertifyOptions(
            radii=args.radii,
            samples=args.samples,
            seed=args.seed,
            tolerances=_tolerances(args),
            assume_disc_zero=args.assume_disc_zero,
        )
    except ValueError as exc:
        raise UsageError(str(exc)) from exc


def _routes(flag: str) -> tuple[str, ...]:
    return ROUTES if flag == "all" else (ROUTE_FLAGS[flag],)


# -- subcommands -----------------------------------------------------------

def cmd_check(args) -> int:
    obj = _read_input(args.input)
    cert = certify(obj, _options(args))
    validate_certificate(cert.data)
    _write(args.out, cert.to_json())
    if args.csv:
        _write(args.csv, samples_csv(real_germ_of(obj), cert.samples))
    conclusion = cert.data["conclusion"]
    print(f"{conclusion['status']}: {conclusion['criterion'] or 'no criterion applies'}", file=sys.stderr)
    return cert.exit_code


def cmd_milnor_sample(args) -> int:
    germ = real_germ_of(_read_input(args.input))
    opts = _options(args)
    routes = _routes(args.route)
    samples = {
        r: sample_milnor_set(germ, r, opts.samples, opts.tolerances, opts.seed + k, routes=routes)
        for k, r in enumerate(opts.radii)
    }
    _write(args.csv or args.out, samples_csv(germ, samples))
    return EXIT_OK if any(samples.values()) else EXIT_INCONCLUSIVE


def cmd_a_coeff(args) -> int:
    germ = real_germ_of(_read_input(args.input))
    if args.point is None:
        raise UsageError("a-coeff needs --point")
    x = np.array(args.point, dtype=float)
    if x.size != germ.m:
        raise UsageError(f"--point has {x.size} coordinates, the germ has {germ.m} (real) variables")
    tol = _tolerances(args)
    ap = analyze_point(germ, x, tol)
    if ap.excluded is not None:
        raise PreconditionError(f"point lies on the {ap.excluded} proxy")
    record = {
        "point": [float(v) for v in x],
        "norm_g": ap.norm_g,
        "milnor_residual": ap.milnor_residual,
        "sing_gap": ap.sing_gap,
        "chart": ap.chart + 1,
        "det_D": ap.det_D,
        "det_M": ap.det_M,
        "a": {},
    }
    d, gram, _ = build_D_M(germ, x, ap.chart, tol)
    record["D"] = d.tolist()
    record["M"] = gram.tolist()
    for route in _routes(args.route):
        record["a"][route] = a_coefficient(germ, x, route, ap.chart, tol)
    _write(args.out, _dump(record))
    return EXIT_OK


def _csv_path(base: str, k: int, total: int) -> str:
    if total == 1:
        return base
    path = Path(base)
    return str(path.with_name(f"{path.stem}_{k + 1:02d}{path.suffix or '.csv'}"))


def cmd_flow(args) -> int:
    germ = real_germ_of(_read_input(args.input))
    tol = _tolerances(args)
    if args.eps <= 0:
        raise UsageError("--eps must be positive")
    if args.start is not None:
        start = np.array(args.start, dtype=float)
        if start.size != germ.m:
            raise UsageError(f"--start has {start.size} coordinates, the germ has {germ.m}")
        if float(np.linalg.norm(start)) >= args.eps:
            raise UsageError("start point is not inside the ball of radius --eps")
        starts = [start]
    else:
        if args.eta <= 0 or args.fan <= 0:
            raise UsageError("--eta and --fan must be positive")
        starts = tube_starts(germ, args.eta, args.eps, args.fan, args.seed, tol)
        if not starts:
            raise PreconditionError("no tube start point found inside the ball")

    options = StepperOptions(drift_tol=args.drift_tol)
    reports = []
    status = EXIT_OK
    for k, x0 in enumerate(starts):
        try:
            traj = flow_to_sphere(germ, x0, args.eps, options, tol)
        except RhoRegularityError as exc:
            reports.append({"start": [float(v) for v in x0], "termination": "rho_regularity_failure", "message": str(exc)})
            status = EXIT_RHO_REGULARITY
            continue
        report = trajectory_report(traj)
        report["start"] = [float(v) for v in x0]
        reports.append(report)
        if args.csv:
            _write(_csv_path(args.csv, k, len(starts)), trajectory_csv(traj))
        if traj.termination == "rho_regularity_failure":
            status = EXIT_RHO_REGULARITY
        elif status == EXIT_OK and not (
            report["reached_sphere"] and report["rho_monotone"] and report["norm_g_monotone"]
        ):
            status = EXIT_INCONCLUSIVE
    summary = {
        "input": germ.format(),
        "epsilon": args.eps,
        "eta": None if args.start is not None else args.eta,
        "trajectories": reports,
        "all_reached_sphere": all(r.get("reached_sphere", False) for r in reports),
    }
    _write(args.out, _dump(summary))
    return status


def cmd_msl_gen(args) -> int:
    if args.random:
        if args.recipe is not None:
            raise UsageError("give either a recipe file or --random, not both")
        rng = np.random.default_rng(args.seed)
        recipe = random_recipe(rng, args.n, args.k, args.deg)
    else:
        if args.recipe is None:
            raise UsageError("msl-gen needs a recipe file or --random")
        try:
            text = Path(args.recipe).read_text(encoding="utf-8")
        except OSError as exc:
            raise GermError(f"cannot read {args.recipe}: {exc.strerror}") from exc
        recipe = parse_recipe(text)
    f = msl_generate(recipe)
    verdict = msl_check(f, "full")
    if not verdict.holds:
        raise GermError(f"generated function fails the MSL check (witness {verdict.witness})")
    _write(args.out, _dump(f.to_document()))
    print(f.format(), file=sys.stderr)
    return EXIT_OK


def cmd_report(args) -> int:
    try:
        data = json.loads(Path(args.certificate).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise GermError(f"cannot load certificate {args.certificate}: {exc}") from exc
    validate_certificate(data)
    conclusion = data["conclusion"]
    lines = [
        f"input        {data['input']['description']}",
        f"kind         {data['input']['kind']} (m={data['input']['m']}, p={data['input']['p']})",
        f"status       {conclusion['status']}",
        f"criterion    {conclusion['criterion'] or '-'}",
        f"claim        {conclusion['claim'] or '-'}",
    ]
    for note in conclusion["assumptions"]:
        lines.append(f"assumption   {note}")
    lines.append("symbolic")
    for name, verdict in data["symbolic"]["structural"].items():
        extra = f"  ({verdict['witness']})" if verdict.get("witness") else ""
        lines.append(f"  {name:<22} {verdict['holds']}{extra}")
    if data["symbolic"]["msl"] is not None:
        msl = data["symbolic"]["msl"]
        lines.append(f"  {'msl full':<22} {msl['full']['holds']}")
        lines.append(f"  {'msl im_only':<22} {msl['im_only']['holds']}")
    lines.append("evidence (not proof)")
    lines.append("  radius      samples  a>0   a<=0  detD>0  max route disagreement")
    for rec in data["evidence"]["per_radius"]:
        lines.append(
            f"  {rec['radius']:<10.3g}  {rec['milnor_samples']:>7}  {rec['a_positive']:>4}  "
            f"{rec['a_nonpositive']:>4}  {rec['det_D_positive']:>6}  {rec['max_route_disagreement']:.2e}"
        )
    eq = data["evidence"]["norm_growth"]
    kappa = "-" if eq["exponent"] is None else f"{eq['exponent']:.3f}"
    lines.append(f"  min|G| growth exponent {kappa}: {eq['verdict']}")
    _write(args.out, "\n".join(lines) + "\n")
    return EXIT_OK if conclusion["status"] == "certified" else EXIT_INCONCLUSIVE


# -- parser ------------------------------------------------------------------

def _add_sampling(p: argparse.ArgumentParser) -> None:
    p.add_argument("--radii", type=_float_list, default=(1e-1, 1e-2, 1e-3), help="comma-separated, strictly decreasing")
    p.add_argument("--samples", type=int, default=200, help="seed points per radius")
    p.add_argument("--seed", type=int, default=0)


def _add_tolerances(p: argparse.ArgumentParser) -> None:
    p.add_argument("--tol-m", type=float, default=None, help="Milnor-set residual threshold")
    p.add_argument("--tol-s", type=float, default=None, help="relative singular-value threshold")
    p.add_argument("--tol-v", type=float, default=None, help="|G| threshold factor (times r^min multiplicity)")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="milnorvf", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("check", help="certify a(x) > 0 and write a JSON certificate")
    p.add_argument("input")
    _add_sampling(p)
    _add_tolerances(p)
    p.add_argument("--assume-disc-zero", action="store_true", help="record Disc G = {0} as asserted")
    p.add_argument("--out", help="certificate path (default stdout)")
    p.add_argument("--csv", help="also dump the sampled points as CSV")
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("milnor-sample", help="Newton-refined Milnor samples as CSV")
    p.add_argument("input")
    _add_sampling(p)
    _add_tolerances(p)
    p.add_argument("--route", choices=[*ROUTE_FLAGS, "all"], default="all")
    p.add_argument("--assume-disc-zero", action="store_true", help=argparse.SUPPRESS)
    p.add_argument("--csv", help="output path (default stdout)")
    p.add_argument("--out", help="alias of --csv")
    p.set_defaults(func=cmd_milnor_sample)

    p = sub.add_parser("a-coeff", help="a(x), D and M at one point of the Milnor set")
    p.add_argument("input")
    p.add_argument("--point", type=_float_list, required=True, help="real coordinates (interleaved for mixed input)")
    p.add_argument("--route", choices=[*ROUTE_FLAGS, "all"], default="all")
    _add_tolerances(p)
    p.add_argument("--out")
    p.set_defaults(func=cmd_a_coeff)

    p = sub.add_parser("flow", help="integrate the Milnor vector field from the tube to the sphere")
    p.add_argument("input")
    p.add_argument("--eta", type=float, default=1e-4, help="tube level |G| = eta for automatic starts")
    p.add_argument("--eps", type=float, default=0.1, help="sphere radius")
    p.add_argument("--fan", type=int, default=4, help="number of automatic start points")
    p.add_argument("--start", type=_float_list, default=None, help="explicit start point")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--drift-tol", type=float, default=StepperOptions.drift_tol)
    _add_tolerances(p)
    p.add_argument("--out", help="summary JSON (default stdout)")
    p.add_argument("--csv", help="trajectory CSV; numbered per start when --fan > 1")
    p.set_defaults(func=cmd_flow)

    p = sub.add_parser("msl-gen", help="build a verified mixed function from a recipe")
    p.add_argument("recipe", nargs="?")
    p.add_argument("--random", action="store_true")
    p.add_argument("--n", type=int, default=4)
    p.add_argument("--k", type=int, default=None)
    p.add_argument("--deg", type=int, default=3)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out")
    p.set_defaults(func=cmd_msl_gen)

    p = sub.add_parser("report", help="validate a certificate and print a summary")
    p.add_argument("certificate")
    p.add_argument("--out")
    p.set_defaults(func=cmd_report)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # --help or a usage error; keep main() usable in-process
        return int(exc.code or 0)
    try:
        return args.func(args)
    except (GermError, PreconditionError, UsageError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    except (jsonschema.ValidationError, OSError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
