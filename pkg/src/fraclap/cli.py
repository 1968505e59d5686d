"""Command-line front end: one subcommand per capability, machine-readable output.

Output contracts: JSON objects carry ``"schema": 1``; CSV files open with a
``# fraclap v0.1.0 schema=1`` comment line.  All numbers are printed with 17
significant digits, so identical argv yields byte-identical output.  Exit
codes: 0 success, 2 validation error, 3 numerical non-convergence (with
best-effort output), 64 unknown subcommand.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from pathlib import Path

import numpy as np

from . import (
    ProblemParams,
    QuadratureSpec,
    Tail,
    bootstrap,
    build_counterexample,
    classify,
    decay_exponents,
    default_grid,
    fit_decay,
    frac_laplacian,
    kelvin_defect,
    load_radial,
    local_decay_check,
    nonlocal_average,
    picard_iterate,
    poisson_ball,
    green_ball,
    radial_from_callable,
    region_map,
    representation_identity,
    riesz_potential,
    save_radial,
    sign_lemma_check,
    smooth_bump,
    annulus_bump_radial,
    validate,
)
from .kernels import BallKernelParams
from .errors import FraclapError, NoConvergence

SCHEMA_HEADER = "# fraclap v0.1.0 schema=1"

SUBCOMMANDS = (
    "frlap", "riesz", "green", "poisson", "navg", "sign-lemma",
    "counterexample", "represent", "classify", "bootstrap", "region-map",
    "iterate", "decay-fit",
)

# Every library operation is reachable through exactly one subcommand; the
# coverage test in tests/test_cli.py checks this table against OPERATIONS.
OP_COVERAGE = {
    "frlap": ("frac_laplacian", "integrate_pv_symmetric"),
    "riesz": ("riesz_potential", "ring_kernel", "riesz_constant"),
    "green": ("green_ball",),
    "poisson": ("poisson_ball",),
    "navg": ("nonlocal_average", "integrate"),
    "sign-lemma": ("sign_integral_surface", "sign_integral_theta"),
    "counterexample": ("build_counterexample",),
    "represent": ("representation_identity",),
    "classify": ("validate", "classify"),
    "bootstrap": ("bootstrap",),
    "region-map": ("region_map",),
    "iterate": ("picard_iterate", "kelvin_defect", "kelvin"),
    "decay-fit": ("fit_decay", "decay_exponents", "local_decay_check", "make_radial"),
}

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_NOCONV = 3
EXIT_UNKNOWN = 64


def _fmt(x) -> str:
    return f"{x:.17g}"


def _json_ready(obj):
    """Render floats with 17 significant digits, recursively."""
    if isinstance(obj, float):
        if math.isfinite(obj):
            return float(_fmt(obj))
        return {"inf": "Infinity", "-inf": "-Infinity"}.get(str(obj), "NaN")
    if isinstance(obj, (np.floating,)):
        return _json_ready(float(obj))
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, np.ndarray):
        return [_json_ready(v) for v in obj.tolist()]
    if isinstance(obj, dict):
        return {k: _json_ready(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_json_ready(v) for v in obj]
    return obj


def _emit(args, payload: dict) -> None:
    payload = {"schema": 1, **_json_ready(payload)}
    text = json.dumps(payload, indent=2) + "\n"
    if getattr(args, "output", None):
        Path(args.output).write_text(text)
    else:
        sys.stdout.write(text)


def _add_param_flags(sub):
    sub.add_argument("--n", type=int, required=True, help="dimension")
    sub.add_argument("--k", type=int, default=0)
    sub.add_argument("--l", type=int, default=0)
    sub.add_argument("--alpha", type=float, default=1.0)
    sub.add_argument("--beta", type=float, default=1.0)
    sub.add_argument("--a", type=float, default=0.0)
    sub.add_argument("--b", type=float, default=0.0)
    sub.add_argument("--p", type=float, default=1.0)
    sub.add_argument("--q", type=float, default=1.0)


def _add_grid_flags(sub):
    sub.add_argument("--rmin", type=float, default=1e-3)
    sub.add_argument("--rmax", type=float, default=1e4)
    sub.add_argument("--points", type=int, default=256)


def _add_quad_flags(sub):
    sub.add_argument("--tol", type=float, default=1e-8, help="relative tolerance")
    sub.add_argument("--nodes", type=int, default=16, help="Gauss nodes per panel")


def _add_fn_flags(sub, with_const=False):
    sub.add_argument("--input", help="CSV of a radial function (with JSON sidecar)")
    sub.add_argument("--profile", choices=("bubble", "bump", "gaussian"),
                     help="built-in profile on the grid flags")
    sub.add_argument("--scale", type=float, default=1.0,
                     help="multiplicative scale for --profile")
    if with_const:
        sub.add_argument("--const", type=float,
                         help="constant function of this value (tail sigma = 0)")


def _add_common(sub):
    sub.add_argument("-o", "--output", help="write JSON here instead of stdout")
    sub.add_argument("--format", choices=("json", "csv"), default="json")
    sub.add_argument("--threads", type=int,
                     default=int(os.environ.get("FRACLAP_THREADS", os.cpu_count() or 1)))


def _spec(args) -> QuadratureSpec:
    return QuadratureSpec(rel_tol=args.tol, gauss_nodes=args.nodes) \
        if hasattr(args, "tol") else QuadratureSpec()


def _resolve_function(args, n=3, alpha=1.0):
    if getattr(args, "input", None):
        return load_radial(args.input)
    if getattr(args, "const", None) is not None:
        grid = default_grid(args.rmin, args.rmax, args.points)
        c = args.const
        return radial_from_callable(lambda r: np.full_like(r, c), grid,
                                    tail=Tail(0.0, c))
    profile = getattr(args, "profile", None)
    grid = default_grid(args.rmin, args.rmax, args.points)
    s = args.scale
    if profile == "bubble":
        sig = n - alpha
        return radial_from_callable(lambda r: s * (1 + r * r) ** (-sig / 2.0),
                                    grid, tail=Tail(sig, s))
    if profile == "bump":
        return annulus_bump_radial(lambda r: s * smooth_bump(r))
    if profile == "gaussian":
        return radial_from_callable(lambda r: s * np.exp(-r * r), grid,
                                    tail=Tail(math.inf, 0.0))
    raise FraclapError("no input function: pass --input, --profile, or --const")


def _params(args) -> ProblemParams:
    return validate(ProblemParams(n=args.n, k=args.k, l=args.l, alpha=args.alpha,
                                  beta=args.beta, a=args.a, b=args.b,
                                  p=args.p, q=args.q))


# ---------------------------------------------------------------------------
# handlers


def _cmd_classify(args):
    verdict = classify(_params(args))
    _emit(args, verdict.to_dict())
    return EXIT_OK


def _cmd_bootstrap(args):
    seq = bootstrap(_params(args), args.imax)
    _emit(args, seq.to_dict())
    return EXIT_OK


def _cmd_region_map(args):
    prm = _params(args)
    rm = region_map(prm, (args.p_min, args.p_max), (args.q_min, args.q_max),
                    args.resolution, threads=args.threads)
    if args.output:
        rm.to_csv(args.output)
    else:
        sys.stdout.write(SCHEMA_HEADER + "\n")
        sys.stdout.write("p,q,verdict,reason\n")
        for p, q, verd, reason in rm.rows():
            sys.stdout.write(f"{_fmt(p)},{_fmt(q)},{verd},\"{reason}\"\n")
    return EXIT_OK


def _cmd_frlap(args):
    u = _resolve_function(args, n=args.n, alpha=args.alpha)
    spec = _spec(args)
    radii = [float(t) for t in args.r.split(",")]
    vals = [{"r": r, "value": frac_laplacian(u, args.alpha, args.n, r, spec)}
            for r in radii]
    _emit(args, {"alpha": args.alpha, "n": args.n, "values": vals})
    return EXIT_OK


def _cmd_riesz(args):
    f = _resolve_function(args, n=args.n, alpha=args.gamma)
    spec = _spec(args)
    u = riesz_potential(f, args.gamma, args.n, spec)
    if args.output:
        save_radial(u, args.output)
        return EXIT_OK
    sample = np.geomspace(u.r_min, u.r_max, 17)
    _emit(args, {"gamma": args.gamma, "n": args.n,
                 "tail": {"sigma": u.tail.sigma, "c": u.tail.c},
                 "values": [{"r": r, "value": float(u(r))} for r in sample]})
    return EXIT_OK


def _cmd_green(args):
    params = BallKernelParams(R=args.R, alpha=args.alpha, n=args.n)
    val = green_ball(args.xr, args.yr, args.cos, params, _spec(args))
    _emit(args, {"value": val})
    return EXIT_OK


def _cmd_poisson(args):
    params = BallKernelParams(R=args.R, alpha=args.alpha, n=args.n)
    val = poisson_ball(args.xr, args.yr, args.cos, params)
    _emit(args, {"value": val})
    return EXIT_OK


def _cmd_navg(args):
    u = _resolve_function(args, n=3, alpha=args.alpha)
    val = nonlocal_average(u, args.alpha, args.R, _spec(args))
    _emit(args, {"alpha": args.alpha, "R": args.R, "value": val})
    return EXIT_OK


def _cmd_sign_lemma(args):
    res = sign_lemma_check(args.gamma, args.n, args.r, args.R, _spec(args))
    _emit(args, {
        "gamma": args.gamma, "n": args.n, "r": args.r, "R": args.R,
        "value_surface": res.value_surface,
        "value_theta": res.value_theta,
        "sign": res.sign,
        "sign_expected": res.sign_expected,
    })
    return EXIT_OK


def _cmd_counterexample(args):
    report = build_counterexample(args.alpha, args.n, spec=_spec(args))
    if args.save_u:
        save_radial(report.u, args.save_u)
    _emit(args, report.to_dict())
    return EXIT_OK


def _cmd_represent(args):
    f = _resolve_function(args, n=args.n, alpha=args.alpha) \
        if (args.input or args.profile) else annulus_bump_radial()
    res = representation_identity(f, args.alpha, args.n, args.R, _spec(args))
    _emit(args, res.to_dict())
    return EXIT_OK


def _cmd_iterate(args):
    prm = _params(args)
    spec = _spec(args)
    u0 = _resolve_function(args, n=prm.n, alpha=prm.alpha)
    v0 = u0
    traj = picard_iterate(prm, u0, v0, args.steps, spec)
    payload = json.loads(traj.to_json())
    if traj.iterates:
        u_fin = traj.iterates[-1][0]
        sigma = prm.n - 2 * prm.k - prm.alpha
        try:
            omega, neg = kelvin_defect(u_fin, args.kelvin_lambda, sigma)
            payload["kelvin_defect"] = {
                "lambda": args.kelvin_lambda,
                "sigma": sigma,
                "max_abs": float(np.max(np.abs(omega.values))),
                "negative_intervals": [list(iv) for iv in neg],
            }
        except FraclapError as exc:
            payload["kelvin_defect"] = {"error": str(exc)}
    _emit(args, payload)
    return EXIT_OK


def _cmd_decay_fit(args):
    u = load_radial(args.input)
    theo = math.nan
    prm = None
    if args.n is not None:
        prm = validate(ProblemParams(n=args.n, k=args.k, l=args.l, alpha=args.alpha,
                                     beta=args.beta, a=args.a, b=args.b,
                                     p=args.p, q=args.q))
        if prm.p * prm.q > 1:
            theo = decay_exponents(prm)[0]
    lo = args.window_lo if args.window_lo is not None else u.r_max / 100.0
    hi = args.window_hi if args.window_hi is not None else u.r_max
    report = fit_decay(u, (lo, hi), theoretical_exponent=theo)
    payload = json.loads(report.to_json())
    if args.input_v and prm is not None:
        v = load_radial(args.input_v)
        R_list = np.geomspace(max(u.r_min * 10, 1.0), u.r_max / 10.0, 12)
        check = local_decay_check(u, v, prm, R_list, _spec(args))
        payload["local_decay"] = check.to_dict()
    _emit(args, payload)
    return EXIT_OK


# ---------------------------------------------------------------------------
# self test


def _selftest() -> int:
    """Fast built-in checks; prints a pass/fail table and returns an exit code."""
    import time
    from .kernels import riesz_constant, ring_kernel

    checks = []

    def record(name, fn):
        t0 = time.time()
        try:
            ok = bool(fn())
            err = ""
        except Exception as exc:  # noqa: BLE001 - report, do not crash the table
            ok, err = False, f" ({exc})"
        checks.append((name, ok, time.time() - t0, err))

    record("riesz constant (2,3) = 1/(4 pi)",
           lambda: abs(riesz_constant(2, 3) * 4 * math.pi - 1) < 1e-12)
    record("Newton shell ring kernel",
           lambda: abs(ring_kernel(1.0, 2.0, 2.0, 3) - 0.5) < 1e-10)
    record("classify p=q=1",
           lambda: classify(ProblemParams(n=3, p=1, q=1)).verdict == "Nonexistence_Thm12_i")
    record("bootstrap p=q=1.5 worked sequence",
           lambda: abs(bootstrap(ProblemParams(n=3, p=1.5, q=1.5), 4).mu_u[2] + 0.25) < 1e-12)

    def navg_const():
        grid = default_grid(1e-3, 1e3, 128)
        one = radial_from_callable(lambda r: np.ones_like(r), grid, tail=Tail(0.0, 1.0))
        return abs(nonlocal_average(one, 1.0, 3.0) - math.pi / 2) < 1e-6

    record("nonlocal average of 1 = pi/2", navg_const)

    def sign_zero():
        res = sign_lemma_check(2.0, 3, 1.0, 2.0)
        return res.sign == "zero"

    record("sign lemma gamma=2 vanishes", sign_zero)

    width = max(len(name) for name, *_ in checks)
    all_ok = True
    for name, ok, dt, err in checks:
        status = "PASS" if ok else "FAIL"
        all_ok &= ok
        print(f"[{status}] {name:<{width}}  {dt * 1e3:8.1f} ms{err}")
    print(f"{'all checks passed' if all_ok else 'FAILURES present'}")
    return EXIT_OK if all_ok else 1


# ---------------------------------------------------------------------------
# parser and dispatch


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fraclap",
        description="numerics for radially-reduced fractional potential theory")
    parser.add_argument("--selftest", action="store_true",
                        help="run the built-in acceptance checks and exit")
    subs = parser.add_subparsers(dest="command")

    sp = subs.add_parser("classify", help="place a parameter point in the nonexistence regions")
    _add_param_flags(sp); _add_common(sp)

    sp = subs.add_parser("bootstrap", help="run the exponent recursion")
    _add_param_flags(sp); _add_common(sp)
    sp.add_argument("--imax", type=int, default=12)

    sp = subs.add_parser("region-map", help="verdict grid over a (p, q) rectangle")
    _add_param_flags(sp); _add_common(sp)
    sp.add_argument("--p-min", type=float, required=True)
    sp.add_argument("--p-max", type=float, required=True)
    sp.add_argument("--q-min", type=float, required=True)
    sp.add_argument("--q-max", type=float, required=True)
    sp.add_argument("--resolution", type=int, default=21)

    sp = subs.add_parser("frlap", help="fractional Laplacian of a radial function")
    _add_fn_flags(sp); _add_grid_flags(sp); _add_quad_flags(sp); _add_common(sp)
    sp.add_argument("--alpha", type=float, required=True)
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--r", required=True, help="evaluation radius (comma list allowed)")

    sp = subs.add_parser("riesz", help="Riesz potential of a radial density")
    _add_fn_flags(sp); _add_grid_flags(sp); _add_quad_flags(sp); _add_common(sp)
    sp.add_argument("--gamma", type=float, required=True)
    sp.add_argument("--n", type=int, required=True)

    sp = subs.add_parser("green", help="ball Green function value")
    _add_quad_flags(sp); _add_common(sp)
    for flag in ("--xr", "--yr", "--cos", "--R", "--alpha"):
        sp.add_argument(flag, type=float, required=(flag != "--cos"),
                        default=0.0 if flag == "--cos" else None)
    sp.add_argument("--n", type=int, required=True)

    sp = subs.add_parser("poisson", help="ball Poisson kernel value")
    _add_common(sp)
    for flag in ("--xr", "--yr", "--cos", "--R", "--alpha"):
        sp.add_argument(flag, type=float, required=(flag != "--cos"),
                        default=0.0 if flag == "--cos" else None)
    sp.add_argument("--n", type=int, required=True)

    sp = subs.add_parser("navg", help="nonlocal average beyond radius R")
    _add_fn_flags(sp, with_const=True); _add_grid_flags(sp); _add_quad_flags(sp); _add_common(sp)
    sp.add_argument("--alpha", type=float, required=True)
    sp.add_argument("--R", type=float, required=True)

    sp = subs.add_parser("sign-lemma", help="derivative-kernel sign integral, both routes")
    _add_quad_flags(sp); _add_common(sp)
    sp.add_argument("--gamma", type=float, required=True)
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--r", type=float, required=True)
    sp.add_argument("--R", type=float, required=True)

    sp = subs.add_parser("counterexample", help="increasing super-harmonic example report")
    _add_quad_flags(sp); _add_common(sp)
    sp.add_argument("--alpha", type=float, required=True)
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--save-u", help="also write the potential as CSV here")

    sp = subs.add_parser("represent", help="ball representation identity at the center")
    _add_fn_flags(sp); _add_grid_flags(sp); _add_quad_flags(sp); _add_common(sp)
    sp.add_argument("--alpha", type=float, required=True)
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--R", type=float, required=True)

    sp = subs.add_parser("iterate", help="Picard iteration of the integral system")
    _add_param_flags(sp); _add_fn_flags(sp); _add_grid_flags(sp); _add_quad_flags(sp)
    _add_common(sp)
    sp.add_argument("--steps", type=int, default=5)
    sp.add_argument("--kelvin-lambda", type=float, default=1.0,
                    help="run a Kelvin-defect diagnostic on the final iterate")

    sp = subs.add_parser("decay-fit", help="fit a decay exponent; optional local products")
    _add_quad_flags(sp); _add_common(sp)
    sp.add_argument("--input", required=True)
    sp.add_argument("--input-v", help="second function for the local product check")
    sp.add_argument("--window-lo", type=float)
    sp.add_argument("--window-hi", type=float)
    sp.add_argument("--n", type=int)
    sp.add_argument("--k", type=int, default=0)
    sp.add_argument("--l", type=int, default=0)
    sp.add_argument("--alpha", type=float, default=1.0)
    sp.add_argument("--beta", type=float, default=1.0)
    sp.add_argument("--a", type=float, default=0.0)
    sp.add_argument("--b", type=float, default=0.0)
    sp.add_argument("--p", type=float, default=2.0)
    sp.add_argument("--q", type=float, default=2.0)

    return parser


_HANDLERS = {
    "classify": _cmd_classify,
    "bootstrap": _cmd_bootstrap,
    "region-map": _cmd_region_map,
    "frlap": _cmd_frlap,
    "riesz": _cmd_riesz,
    "green": _cmd_green,
    "poisson": _cmd_poisson,
    "navg": _cmd_navg,
    "sign-lemma": _cmd_sign_lemma,
    "counterexample": _cmd_counterexample,
    "represent": _cmd_represent,
    "iterate": _cmd_iterate,
    "decay-fit": _cmd_decay_fit,
}


def run(argv=None) -> int:
    """Parse argv and dispatch; returns the process exit code."""
    argv = list(sys.argv[1:] if argv is None else argv)
    if argv and not argv[0].startswith("-") and argv[0] not in SUBCOMMANDS:
        sys.stderr.write(f"fraclap: unknown subcommand {argv[0]!r}\n")
        sys.stderr.write(f"expected one of: {', '.join(SUBCOMMANDS)}\n")
        return EXIT_UNKNOWN

    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_VALIDATION if exc.code not in (0,) else 0

    if args.selftest:
        return _selftest()
    if args.command is None:
        parser.print_help()
        return EXIT_VALIDATION

    try:
        return _HANDLERS[args.command](args)
    except NoConvergence as exc:
        payload = {"converged": False,
                   "best_estimate": exc.best_estimate,
                   "error_bound": exc.error_bound,
                   "error": str(exc)}
        _emit(args, payload)
        return EXIT_NOCONV
    except FraclapError as exc:
        sys.stderr.write(f"fraclap: {type(exc).__name__}: {exc}\n")
        return EXIT_VALIDATION


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
