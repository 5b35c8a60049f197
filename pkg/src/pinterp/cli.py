"""Command-line front end.

    pinterp converge --op pi1 --field rho --alpha 1.5 --pmax 16 --out rho.csv
    pinterp check diagram --p 4 --seed 1
    pinterp check preserve --p 6
    pinterp check poincare
    pinterp check approx1d

Exit status: 0 when every check passes, 1 when one fails, 2 on usage errors.
"""

import argparse
import sys

from .harness import (OPERATORS, check_approx1d, check_commuting, check_poincare,
                      check_preserve, emit_csv, fit_rate, get_field, run_convergence)
from .quadrature import QuadConfig

CONFIG_KEYS = {
    "element": str, "operator": str, "field": str, "alpha": float, "p_max": int,
    "p_min": int, "oracle_degree": int, "margin": int, "min_degree": int,
    "levels": int, "ratio": float, "seed": int, "out": str, "family": str,
    "jobs": int, "expect_slope": float, "p": int, "probes": int,
}
# CLI destination names that differ from the config keys
_ALIASES = {"op": "operator", "pmax": "p_max", "pmin": "p_min"}


class UsageError(Exception):
    pass


def read_config(path):
    """Flat ``key = value`` file; '#' starts a comment."""
    out = {}
    try:
        with open(path) as fh:
            lines = fh.readlines()
    except OSError as exc:
        raise UsageError(f"cannot read config {path}: {exc}") from exc
    for n, line in enumerate(lines, 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"{path}:{n}: expected key = value")
        key, value = (s.strip() for s in line.split("=", 1))
        if key not in CONFIG_KEYS:
            raise UsageError(f"{path}:{n}: unknown key {key!r}")
        try:
            out[key] = CONFIG_KEYS[key](value)
        except ValueError as exc:
            raise UsageError(f"{path}:{n}: bad value for {key}: {value!r}") from exc
    return out


def _merge(args):
    """Config file values, overridden by flags given on the command line."""
    conf = read_config(args.config) if getattr(args, "config", None) else {}
    for dest, value in vars(args).items():
        if value is not None and dest not in ("config", "command", "what", "func"):
            conf[_ALIASES.get(dest, dest)] = value
    return conf


def _converge(args):
    conf = _merge(args)
    for key in ("operator", "field", "p_max", "out"):
        if key not in conf:
            raise UsageError(f"missing required setting {key!r}")
    if conf["operator"] not in OPERATORS:
        raise UsageError(f"unknown operator {conf['operator']!r}")
    element = conf.get("element", "triangle")
    try:
        field = get_field(conf["field"], conf.get("alpha"), element)
    except KeyError as exc:
        raise UsageError(str(exc)) from exc
    if conf["operator"] == "pidiv" and field.kind == "vector":
        # the H(div) study runs on the rotated field, the image of the H(curl) study
        field = field.rotated()
    quad = QuadConfig(margin=conf.get("margin", 6), min_degree=conf.get("min_degree", 30),
                      singular=field.singular, levels=conf.get("levels", 12),
                      ratio=conf.get("ratio", 0.15), oracle_degree=conf.get("oracle_degree"))
    ps = range(conf.get("p_min", 1), conf["p_max"] + 1)
    try:
        records = run_convergence(conf["operator"], field, ps, quad, conf.get("family"),
                                  conf.get("jobs", 1))
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    emit_csv(records, conf["out"])
    column = "err_h1semi" if conf["operator"] == "pi1" else "err_graph"
    for r in records:
        print(f"p={r.p:3d}  {column}={getattr(r, column):.6e}  ({r.seconds:.2f}s)")
    if len(records) >= 4 and sum(r.p >= 3 for r in records) >= 4:
        fit = fit_rate(records, column)
        print(f"{column}: {fit}")
        if "expect_slope" in conf:
            ok = fit.slope <= conf["expect_slope"]
            print(f"{'PASS' if ok else 'FAIL'} slope <= {conf['expect_slope']}")
            return 0 if ok else 1
    return 0


def _check(args):
    try:
        report = _run_check(args.what, _merge(args))
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    for line in report.lines():
        print(line)
    return 0 if report.passed else 1


def _run_check(what, conf):
    element = conf.get("element", "triangle")
    if what == "diagram":
        if "p" not in conf:
            raise UsageError("check diagram needs --p")
        return check_commuting(conf["p"], conf.get("probes", 10), conf.get("seed", 0),
                               element, conf.get("family"))
    if what == "preserve":
        if "p" not in conf:
            raise UsageError("check preserve needs --p")
        return check_preserve(conf["p"], 20, conf.get("seed", 0), element, conf.get("family"))
    if what == "poincare":
        return check_poincare(seed=conf.get("seed", 0), element=element)
    return check_approx1d()


def build_parser():
    parser = argparse.ArgumentParser(prog="pinterp",
                                     description="p-interpolation studies and checks")
    sub = parser.add_subparsers(dest="command", required=True)

    conv = sub.add_parser("converge", help="convergence study, written as CSV")
    conv.add_argument("--op", choices=OPERATORS)
    conv.add_argument("--field")
    conv.add_argument("--alpha", type=float)
    conv.add_argument("--pmax", type=int)
    conv.add_argument("--pmin", type=int)
    conv.add_argument("--out")
    conv.add_argument("--element", choices=("triangle", "square"))
    conv.add_argument("--family")
    conv.add_argument("--jobs", type=int)
    conv.add_argument("--expect-slope", dest="expect_slope", type=float,
                      help="fail unless the fitted slope is at most this value")
    conv.add_argument("--config")
    conv.set_defaults(func=_converge)

    chk = sub.add_parser("check", help="identity checks")
    chk.add_argument("what", choices=("diagram", "preserve", "poincare", "approx1d"))
    chk.add_argument("--p", type=int)
    chk.add_argument("--seed", type=int)
    chk.add_argument("--probes", type=int)
    chk.add_argument("--element", choices=("triangle", "square"))
    chk.add_argument("--family")
    chk.add_argument("--config")
    chk.set_defaults(func=_check)
    return parser


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code == 0 else 2
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
