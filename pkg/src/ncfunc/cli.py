"""Command-line front end.  JSON on stdout; exit 0 ok, 1 check failed, 2 bad input.

Input schemas
-------------
series  {"d": int, "terms": [{"word": [int, ...], "re": float, "im": float}, ...],
         "generator": null | {"kind": "geometric"|"full"|"luminet", "params": {...}}}
point   {"d": int, "n": int, "mats": [n x n matrix of [re, im] pairs] * d}
gamma   {"gamma": [[re, im], ...]} or a bare list of numbers / [re, im] pairs

Fock operators are emitted as {"basis": {"d", "N"}, "mat": {"rows", "cols", "entries"}}
with basis words in graded-lexicographic order.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
import warnings

import numpy as np

from . import fock, harness, mobius, suites
from .core import (
    InputError,
    Point,
    ResourceError,
    matrix_to_json,
    point_from_json,
    point_to_json,
    random_point,
)
from .report import CheckReport
from .series import FreeSeries, directional_derivative, evaluate, luminet, luminet_term, radius
from .taylor import MatricialFunction, remainder_check, taylor_expand


class CheckFailed(Exception):
    pass


def _load(path: str):
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}: malformed JSON at line {exc.lineno} column {exc.colno}: {exc.msg}") from exc
    except OSError as exc:
        raise InputError(f"{path}: {exc.strerror}") from exc


def _series(path: str) -> FreeSeries:
    return FreeSeries.from_json(_load(path))


def _point(path: str) -> Point:
    return point_from_json(_load(path))


def _gamma(path: str) -> mobius.CentralVector:
    obj = _load(path)
    if isinstance(obj, dict):
        obj = obj.get("gamma")
    if not isinstance(obj, list) or not obj:
        raise InputError(f"{path}: expected a non-empty gamma list")
    try:
        vals = [complex(v[0], v[1]) if isinstance(v, list) else complex(v) for v in obj]
    except (TypeError, ValueError, IndexError) as exc:
        raise InputError(f"{path}: bad gamma entry: {exc}") from exc
    return mobius.CentralVector(np.array(vals))


def _same_d(theta: FreeSeries, *points: Point) -> None:
    for z in points:
        if z.d != theta.d:
            raise InputError(f"series has d={theta.d} but point has d={z.d}")


def _levels(text: str) -> list[int]:
    try:
        levels = [int(t) for t in text.split(",") if t.strip()]
    except ValueError as exc:
        raise InputError(f"bad --levels {text!r}") from exc
    if not levels or min(levels) < 1:
        raise InputError("--levels needs positive integers")
    return levels


def _check(report: CheckReport, verbose: bool) -> dict:
    if verbose:
        print(report.summary(), file=sys.stderr)
    if not report.passed:
        raise CheckFailed(report.to_json())
    return report.to_json()


# -------------------------------------------------------------------- verbs


def cmd_eval(a) -> dict:
    theta, z = _series(a.series), _point(a.point)
    _same_d(theta, z)
    res = evaluate(theta, z, a.kmax)
    return {"value": matrix_to_json(res.value), "tail_bound": res.tail_bound, "k_max": res.k_max}


def cmd_deriv(a) -> dict:
    theta, z, u = _series(a.series), _point(a.point), _point(a.direction)
    _same_d(theta, z, u)
    return {"value": matrix_to_json(directional_derivative(theta, z, u, a.kmax))}


def cmd_radius(a) -> dict:
    est = radius(_series(a.series), a.kmax)
    return {"radius": est.value, "degrees_used": est.degrees_used, "exact": est.exact}


def cmd_taylor(a) -> dict:
    theta = _series(a.series)
    if a.action == "coeffs":
        if a.degree is None:
            raise InputError("taylor coeffs needs --degree")
        return taylor_expand(MatricialFunction.from_series(theta), a.degree).to_json()
    if not (a.z and a.w):
        raise InputError("taylor remainder needs --z and --w")
    z, w = _point(a.z), _point(a.w)
    _same_d(theta, z, w)
    return _check(remainder_check(theta, z, w, a.n, a.tol), a.verbose)


def cmd_fock(a) -> dict:
    basis = fock.FockBasis(a.d, a.N)
    if a.op == "identity":
        op = fock.identity(basis)
    elif a.op == "creation":
        op = fock.creation(basis, a.i)
    elif a.op == "gauge":
        op = fock.gauge(basis, a.t)
    else:
        if not a.series:
            raise InputError(f"fock {a.op} needs --series")
        theta = _series(a.series)
        if theta.d != a.d:
            raise InputError(f"series has d={theta.d} but --d is {a.d}")
        op = fock.toeplitz(basis, theta)
        if a.op == "fourier":
            op = fock.fourier(op, a.j, a.mode)
        elif a.op == "cesaro":
            op = fock.cesaro(op, a.k)
    return op.to_json()


def cmd_check(a) -> dict:
    theta = _series(a.series)
    f = MatricialFunction.from_series(theta, a.kmax)
    levels = _levels(a.levels)
    rng = np.random.default_rng(a.seed)
    scale = 0.5 * min(1.0, f.domain_radius)
    report = CheckReport("matricial", a.tol)
    for n in levels:
        for m in levels:
            z = random_point(rng, theta.d, n, norm=scale)
            w = random_point(rng, theta.d, m, norm=scale)
            cat = harness.build_catalog(z, w, seed=int(rng.integers(2**31)), radius=f.domain_radius)
            report.merge(harness.check_function_matricial(f, cat, a.tol), prefix=f"levels_{n}_{m}_")
            report.merge(harness.check_direct_sum(f, z, w, a.tol), prefix=f"levels_{n}_{m}_")
    return _check(report, a.verbose)


def cmd_mobius(a) -> dict:
    gamma = _gamma(a.gamma)
    if a.action == "eval":
        if not a.z:
            raise InputError("mobius eval needs --z")
        z = _point(a.z)
        if z.d != gamma.d:
            raise InputError(f"gamma has d={gamma.d} but point has d={z.d}")
        return point_to_json(mobius.g_gamma(gamma, z))
    rng = np.random.default_rng(a.seed)
    report = CheckReport("mobius", a.tol)
    D = mobius.dg_gamma_matrix(gamma)
    if a.tamper == "dg_gamma":
        D = -D
    report.merge(mobius.dg_gamma_check(gamma, a.trials, a.seed, a.tol, D=D), "dg_")
    report.merge(mobius.second_order_check(gamma, a.trials, a.seed, a.tol), "second_")
    report.merge(mobius.taylor_roundtrip_check(gamma, 3, a.tol), "roundtrip_")
    pts = [random_point(rng, gamma.d, int(rng.integers(1, 5)), norm=rng.uniform(0, 0.95)) for _ in range(a.trials)]
    ball = mobius.ball_preservation(gamma, pts)
    report.merge(ball, "ball_")
    report.info["ball_margin"] = ball.info["margin"]
    return _check(report, a.verbose)


def cmd_luminet(a) -> dict:
    theta = luminet_term(a.k) if a.k is not None else luminet(a.kmax)
    out = {"series": theta.to_json()}
    if a.point:
        z = _point(a.point)
        _same_d(theta, z)
        out["value"] = matrix_to_json(evaluate(theta, z).value)
    return out


def cmd_suite(a) -> dict:
    out = suites.run_suite(a.name, a.seed, a.tamper)
    if a.verbose:
        for group, res in out["suites"].items():
            for r in res["reports"]:
                print(f"{'PASS' if r['pass'] else 'FAIL'} {group}/{r['name']}", file=sys.stderr)
    if not out["pass"]:
        raise CheckFailed(out)
    return out


# ------------------------------------------------------------------- parser


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="ncfunc", description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    p.add_argument("--verbose", action="store_true", help="summary on stderr")
    p.add_argument("--tamper", help=argparse.SUPPRESS)
    p.add_argument("--output", "-o", help="write JSON here instead of stdout")
    # the same flags after the verb; SUPPRESS keeps them from clobbering the top level
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--verbose", action="store_true", default=argparse.SUPPRESS)
    common.add_argument("--tamper", default=argparse.SUPPRESS, help=argparse.SUPPRESS)
    common.add_argument("--output", "-o", default=argparse.SUPPRESS)
    sub = p.add_subparsers(dest="verb", required=True)

    def verb(name: str, help: str) -> argparse.ArgumentParser:
        return sub.add_parser(name, help=help, parents=[common])

    s = verb("eval", "evaluate a series at a point")
    s.add_argument("--series", required=True)
    s.add_argument("--point", required=True)
    s.add_argument("--kmax", type=int)
    s.set_defaults(fn=cmd_eval)

    s = verb("deriv", "directional derivative of a series")
    s.add_argument("--series", required=True)
    s.add_argument("--point", required=True)
    s.add_argument("--direction", required=True)
    s.add_argument("--kmax", type=int)
    s.set_defaults(fn=cmd_deriv)

    s = verb("radius", "radius of convergence estimate")
    s.add_argument("--series", required=True)
    s.add_argument("--kmax", type=int, default=32)
    s.set_defaults(fn=cmd_radius)

    s = verb("taylor", "coefficient extraction or remainder check")
    s.add_argument("action", choices=["coeffs", "remainder"])
    s.add_argument("--series", required=True)
    s.add_argument("--degree", type=int)
    s.add_argument("--z")
    s.add_argument("--w")
    s.add_argument("--n", type=int, default=4)
    s.add_argument("--tol", type=float, default=1e-10)
    s.set_defaults(fn=cmd_taylor)

    s = verb("fock", "truncated Fock space operators")
    s.add_argument("op", choices=["identity", "creation", "toeplitz", "gauge", "fourier", "cesaro"])
    s.add_argument("--d", type=int, required=True)
    s.add_argument("--N", type=int, required=True)
    s.add_argument("--i", type=int, default=1, help="letter for creation")
    s.add_argument("--t", type=float, default=0.0, help="gauge angle")
    s.add_argument("--j", type=int, default=0, help="Fourier index")
    s.add_argument("--k", type=int, default=1, help="Cesaro order")
    s.add_argument("--mode", choices=["mask", "quadrature"], default="mask")
    s.add_argument("--series")
    s.set_defaults(fn=cmd_fock)

    s = verb("check", "matriciality check of a series-backed function")
    s.add_argument("kind", choices=["matricial"])
    s.add_argument("--series", required=True)
    s.add_argument("--levels", default="1,2,3")
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--tol", type=float, default=1e-9)
    s.add_argument("--kmax", type=int)
    s.set_defaults(fn=cmd_check)

    s = verb("mobius", "the ball automorphism g_gamma")
    s.add_argument("action", choices=["eval", "check"])
    s.add_argument("--gamma", required=True)
    s.add_argument("--z")
    s.add_argument("--trials", type=int, default=100)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--tol", type=float, default=1e-8)
    s.set_defaults(fn=cmd_mobius)

    s = verb("luminet", "standard-polynomial series over d=2")
    g = s.add_mutually_exclusive_group()
    g.add_argument("--k", type=int, help="single term of degree k(k+1)/2")
    g.add_argument("--kmax", type=int, default=6)
    s.add_argument("--point")
    s.set_defaults(fn=cmd_luminet)

    s = verb("suite", "run a seeded property suite")
    s.add_argument("name", choices=["all", *suites.SUITES])
    s.add_argument("--seed", type=int, default=0)
    s.set_defaults(fn=cmd_suite)
    return p


def _finite(obj):
    """Non-finite floats become the strings "inf", "-inf", "nan" (strict JSON)."""
    if isinstance(obj, float) and not math.isfinite(obj):
        return "nan" if math.isnan(obj) else ("inf" if obj > 0 else "-inf")
    if isinstance(obj, dict):
        return {k: _finite(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_finite(v) for v in obj]
    return obj


def _emit(obj: dict, path: str | None) -> None:
    text = json.dumps(_finite(obj), indent=2, allow_nan=False) + "\n"
    if path:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        a = parser.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code == 0 else 2
    try:
        with warnings.catch_warnings():
            if not a.verbose:
                warnings.simplefilter("ignore")
            result = a.fn(a)
    except CheckFailed as exc:
        _emit(exc.args[0], a.output)
        return 1
    except (InputError, ResourceError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    _emit(result, a.output)
    return 0


if __name__ == "__main__":
    sys.exit(main())
