"""Command line front end: JSON in, JSON out.

Exit codes: 0 ok, 1 schema error, 2 precondition failure, 3 internal inconsistency.
"""
from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction
from pathlib import Path

from . import __version__
from .errors import InconsistencyError, SchemaError, ShtvolError
from .expr import parse_poly
from .poly import Poly

# serialization

def encode(obj, approx=False):
    if isinstance(obj, bool) or obj is None or isinstance(obj, str):
        return obj
    if isinstance(obj, Fraction):
        s = str(obj)
        return {"exact": s, "approx": float(obj)} if approx else s
    if isinstance(obj, int):
        return obj
    if isinstance(obj, float):
        return obj
    if isinstance(obj, Poly):
        return obj.to_str()
    if isinstance(obj, dict):
        return {str(k): encode(v, approx) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [encode(v, approx) for v in obj]
    if hasattr(obj, "as_dict"):
        return encode(obj.as_dict(), approx)
    raise InconsistencyError(f"cannot serialize {type(obj).__name__}")


def emit(result, command, theorem, approx, out=None):
    payload = {"command": command, "theorem": theorem, "result": encode(result, approx)}
    doc = {"payload": payload, "version": __version__}
    text = json.dumps(doc, indent=2, sort_keys=True)
    if out:
        Path(out).write_text(text + "\n")
    else:
        print(text)


# input parsing

def load_json(value):
    """A JSON file path or an inline JSON document."""
    if value is None:
        return None
    path = Path(value)
    try:
        text = path.read_text() if path.exists() else value
    except OSError as exc:
        raise SchemaError(f"cannot read {value}: {exc}")
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        if not path.exists():
            raise SchemaError(f"{value!r} is neither a file nor valid JSON")
        raise SchemaError(f"malformed JSON in {value}: {exc.msg} (line {exc.lineno})")


def parse_vector(value, n=None):
    if isinstance(value, str):
        parts = [p for p in value.replace(" ", "").split(",") if p]
    elif isinstance(value, (list, tuple)):
        parts = list(value)
    else:
        raise SchemaError(f"bad coweight {value!r}")
    try:
        vec = tuple(Fraction(str(p)) for p in parts)
    except (ValueError, ZeroDivisionError):
        raise SchemaError(f"bad coweight {value!r}")
    if n is not None and len(vec) != n:
        raise SchemaError(f"coweight {value!r} needs {n} coordinates")
    return vec


def parse_expr(value, n):
    if value is None or value == "" or value == 0:
        return Poly(n)
    if isinstance(value, (int, Fraction)):
        return Poly.const(value, n)
    return parse_poly(str(value), n)


def load_curve(value):
    from .lfunctions import CurveData

    if value is None:
        raise SchemaError("a curve is required")
    if isinstance(value, dict):
        return CurveData.from_json(value)
    if isinstance(value, str) and not Path(value).exists() and not value.lstrip().startswith("{"):
        return CurveData.from_json(value)
    return CurveData.from_json(load_json(value))


def load_group(value):
    from .characters import group_from_json

    if isinstance(value, str) and not Path(value).exists() and not value.lstrip().startswith("{"):
        return group_from_json(value)
    return group_from_json(load_json(value) if isinstance(value, str) else value)


def load_artin(value):
    from .lfunctions import build_artin_system

    return build_artin_system(load_json(value) if isinstance(value, str) else value)


def root_datum(spec):
    from .weyl_poly import root_datum_from_string

    if not isinstance(spec, str):
        raise SchemaError("group must be a string such as 'gl:2'")
    return root_datum_from_string(spec)


def parse_legs(rd, legs):
    from .volume import LegSpec

    if not isinstance(legs, list):
        raise SchemaError("legs must be a list")
    out = []
    for leg in legs:
        if not isinstance(leg, dict) or "mu" not in leg:
            raise SchemaError("each leg needs a mu field")
        n = rd.nvars
        out.append(LegSpec(parse_vector(leg["mu"], n), parse_expr(leg.get("eta", 0), n),
                           parse_expr(leg.get("etap", 0), n), Fraction(str(leg.get("omega", 0)))))
    return out


def require(job, *keys):
    if not isinstance(job, dict):
        raise SchemaError("job must be a JSON object")
    for k in keys:
        if k not in job:
            raise SchemaError(f"job is missing {k!r}")


# subcommands

def cmd_eigenweights(args):
    from .flag_calculus import eigenweight_report

    rd = root_datum(args.group)
    mu = parse_vector(args.mu, rd.nvars)
    eta = parse_expr(args.eta, rd.nvars)
    rep = eigenweight_report(rd, mu, eta).as_dict()
    rep["group"] = rd.label
    return rep, "eigenweights"


def cmd_integrate(args):
    from .flag_calculus import integrate_flag

    rd = root_datum(args.group)
    mu = parse_vector(args.mu, rd.nvars)
    f = parse_expr(args.f, rd.nvars)
    return {"group": rd.label, "mu": list(mu), "integrand": f, "pushforward": rd.reduce(integrate_flag(rd, mu, f))}, \
        "flag_pushforward"


def _volume_from_job(job):
    from .volume import volume_gln, volume_split, volume_unitary
    from .lfunctions import DoubleCover

    kind = job.get("kind", "split")
    curve = load_curve(job.get("curve"))
    if kind == "split":
        require(job, "group")
        rd = root_datum(job["group"])
        return volume_split(rd, parse_legs(rd, job.get("legs", [])), curve, bool(job.get("total", False)))
    if kind == "gln":
        require(job, "n", "signs")
        signs = job["signs"]
        degs = job.get("degrees", [0] * len(signs))
        return volume_gln(int(job["n"]), int(job.get("component", 0)), signs, degs, curve)
    if kind == "unitary":
        require(job, "n", "r")
        cover = DoubleCover.from_json(curve, job.get("cover"))
        return volume_unitary(int(job["n"]), int(job["r"]), int(job.get("D", 0)), cover)
    raise SchemaError(f"unknown volume kind {kind!r}")


def cmd_volume(args):
    job = load_json(args.job)
    require(job)
    res = _volume_from_job(job)
    return res.as_dict(), res.theorem


def cmd_trace_check(args):
    from .trace_oracle import trace_check
    from .volume import volume_gln, volume_split

    job = load_json(args.job)
    require(job)
    kind = job.get("kind", "split")
    curve = load_curve(job.get("curve"))
    if kind == "split":
        require(job, "group")
        rd = root_datum(job["group"])
        legs = parse_legs(rd, job.get("legs", []))
        closed = volume_split(rd, legs, curve)
    elif kind == "gln":
        from .volume import gl_legs
        from .weyl_poly import build_root_datum

        require(job, "n", "signs")
        n = int(job["n"])
        signs = job["signs"]
        degs = job.get("degrees", [0] * len(signs))
        rd = build_root_datum("gl", n)
        legs = gl_legs(n, int(job.get("component", 0)), signs, degs)
        closed = volume_gln(n, int(job.get("component", 0)), signs, degs, curve)
    else:
        raise SchemaError(f"trace-check supports kinds split and gln, not {kind!r}")
    run = trace_check(rd, legs, curve, args.dmax)
    return {
        "closed_form": closed.value,
        "trace": run.as_dict(),
        "agrees": run.agrees_with(closed.value),
    }, "trace_oracle"


def cmd_phantom(args):
    from .phantom_ring import build_phantom, ring_report

    if args.job:
        job = load_json(args.job)
        require(job, "group", "legs")
        group, mus, curve, omega = job["group"], job["legs"], job.get("curve", "q2g0"), job.get("omega")
    else:
        if not args.group or not args.mu:
            raise SchemaError("phantom needs --job or --group with at least one --mu")
        group, mus, curve, omega = args.group, args.mu, args.curve, args.omega
    rd = root_datum(group)
    mus = [parse_vector(m, rd.nvars) for m in mus]
    if omega is not None:
        omega = parse_vector(omega, rd.nvars)
    ring = build_phantom(rd, mus, load_curve(curve), omega)
    rep = ring_report(ring)
    return rep, "phantom_ring"


def cmd_colmez(args):
    from .characters import check_character_identities
    from .phantom_ring import build_phantom_sigma, colmez_eta_coefficient, pgl_sign_coweight
    from .volume import volume_colmez
    from .weyl_poly import build_root_datum

    job = load_json(args.job)
    require(job, "n", "signs", "group", "sigma", "artin")
    n = int(job["n"])
    signs = job["signs"]
    group = load_group(job["group"])
    sigma = [group.parse_element(s) for s in job["sigma"]]
    artin = load_artin(job["artin"])
    a, b = volume_colmez(n, signs, group, sigma, artin)
    out = {"multinomial_form": a.as_dict(), "artin_form": b.as_dict(), "forms_agree": a.value == b.value,
           "character_identities": all(all(check_character_identities(group, sigma, signs, j))
                                       for j in range(2, n + 1))}
    if job.get("ring", True):
        rd = build_root_datum("pgl", n)
        ring = build_phantom_sigma(rd, [pgl_sign_coweight(n, s) for s in signs], group, sigma, artin)
        coeff = colmez_eta_coefficient(ring, signs)
        out["restricted_ring"] = {"eta_integral": coeff, "matches_bracket": coeff == a.breakdown["bracket"]}
    return out, "colmez_volume"


def build_parser():
    p = argparse.ArgumentParser(prog="shtvol", description="Exact volumes of shtuka moduli and related checks.")
    p.add_argument("--approx", action="store_true", help="add decimal renderings next to exact values")
    p.add_argument("--output", "-o", help="write JSON here instead of standard output")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("eigenweights", help="eigenvalues of the local operator on the Gross motive")
    s.add_argument("group")
    s.add_argument("--mu", required=True)
    s.add_argument("--eta", required=True)
    s.set_defaults(fn=cmd_eigenweights)

    s = sub.add_parser("integrate", help="pushforward from G/P_mu to a point")
    s.add_argument("group")
    s.add_argument("--mu", required=True)
    s.add_argument("--f", required=True)
    s.set_defaults(fn=cmd_integrate)

    s = sub.add_parser("volume", help="closed-form arithmetic volume")
    s.add_argument("--job", required=True)
    s.set_defaults(fn=cmd_volume)

    s = sub.add_parser("trace-check", help="truncated trace against the closed form")
    s.add_argument("--job", required=True)
    s.add_argument("--dmax", type=int, default=60)
    s.set_defaults(fn=cmd_trace_check)

    s = sub.add_parser("phantom", help="phantom tautological ring report")
    s.add_argument("--job")
    s.add_argument("--group")
    s.add_argument("--mu", action="append")
    s.add_argument("--curve", default="q2g0")
    s.add_argument("--omega")
    s.set_defaults(fn=cmd_phantom)

    s = sub.add_parser("colmez", help="PGL_n volumes over a Galois cover in both forms")
    s.add_argument("--job", required=True)
    s.set_defaults(fn=cmd_colmez)
    return p


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 1 if exc.code else 0
    try:
        result, theorem = args.fn(args)
        emit(result, args.command, theorem, args.approx, args.output)
        return 0
    except ShtvolError as exc:
        code = exc.exit_code
        print(json.dumps({"error": type(exc).__name__, "message": str(exc), "exit_code": code}), file=sys.stderr)
        return code


def main():
    sys.exit(run())
