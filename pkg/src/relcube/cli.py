"""Command-line front end.

Subcommands:

* ``integrate``     -- run the controller on a problem and print a report
* ``describe-rule`` -- print a rule's order, error constant, and panel layout
* ``check-bounds``  -- normalize a problem and print M, D, and the
  derivative maxima without integrating

A problem comes either from inline flags (--g/--a/--b/--l/--u) or from a
problem file, an INI document with a ``[problem]`` section holding a, b,
l_expr, u_expr, g_expr and an optional ``[bounds]`` section holding any of
M, D, deriv_sup_x, deriv_sup_y (used verbatim).  ``--bounds-file`` loads
just a ``[bounds]`` section on top of either source.

Exit codes: 0 success, 2 usage error, 3 numerical error (crossing limits,
non-finite integrand, tolerance below the roundoff floor).
"""

import argparse
import configparser
import json
import math
import sys
import time
from dataclasses import replace

from . import bounds, controller, expr, rules
from .errors import RelcubeError
from .problem import BoundOverrides, Integrand, Region, normalize

__all__ = ["main"]

_EXIT_OK = 0
_EXIT_USAGE = 2
_EXIT_NUMERIC = 3


class _UsageError(Exception):
    pass


def _fmt6(x):
    """Six-significant-digit display form."""
    if isinstance(x, float):
        return f"{x:.5e}"
    return str(x)


def _parse_problem_file(path):
    parser = configparser.ConfigParser()
    read = parser.read(path)
    if not read:
        raise _UsageError(f"cannot read problem file {path!r}")
    if "problem" not in parser:
        raise _UsageError(f"problem file {path!r} has no [problem] section")
    sec = parser["problem"]
    missing = [k for k in ("a", "b", "l_expr", "u_expr", "g_expr")
               if k not in sec]
    if missing:
        raise _UsageError(
            f"problem file {path!r} is missing keys: {', '.join(missing)}")
    try:
        spec = {
            "a": sec.getfloat("a"),
            "b": sec.getfloat("b"),
            "l": sec["l_expr"],
            "u": sec["u_expr"],
            "g": sec["g_expr"],
        }
    except ValueError as exc:
        raise _UsageError(f"bad numeric value in {path!r}: {exc}") from None
    overrides = None
    if "bounds" in parser:
        overrides = _overrides_from_section(parser["bounds"])
    return spec, overrides


def _overrides_from_section(sec):
    def get(key):
        try:
            return sec.getfloat(key) if key in sec else None
        except ValueError as exc:
            raise _UsageError(f"bad numeric value for {key!r}: {exc}") from None

    return BoundOverrides(m=get("m"), d=get("d"),
                          deriv_sup_x=get("deriv_sup_x"),
                          deriv_sup_y=get("deriv_sup_y"))


def _parse_bounds_file(path):
    parser = configparser.ConfigParser()
    read = parser.read(path)
    if not read:
        raise _UsageError(f"cannot read bounds file {path!r}")
    if "bounds" not in parser:
        raise _UsageError(f"bounds file {path!r} has no [bounds] section")
    return _overrides_from_section(parser["bounds"])


def _build_problem(args):
    inline = [args.g, args.l, args.u, args.a, args.b]
    has_inline = any(v is not None for v in inline)
    if args.problem_file is not None and has_inline:
        raise _UsageError("give either --problem-file or inline"
                          " --g/--a/--b/--l/--u flags, not both")
    if args.problem_file is not None:
        spec, overrides = _parse_problem_file(args.problem_file)
    elif has_inline:
        if any(v is None for v in inline):
            raise _UsageError("inline problems need all of"
                              " --g, --a, --b, --l, --u")
        spec = {"a": args.a, "b": args.b, "l": args.l, "u": args.u,
                "g": args.g}
        overrides = None
    else:
        raise _UsageError("no problem given: use --problem-file or the"
                          " inline --g/--a/--b/--l/--u flags")

    if getattr(args, "bounds_file", None) is not None:
        file_overrides = _parse_bounds_file(args.bounds_file)
        overrides = file_overrides.merged_over(overrides)

    g_fn = expr.as_function(expr.parse(spec["g"], ("x", "y")), ("x", "y"))
    l_fn = expr.as_function(expr.parse(spec["l"], ("x",)), ("x",))
    u_fn = expr.as_function(expr.parse(spec["u"], ("x",)), ("x",))
    region = Region(a=spec["a"], b=spec["b"], lower=l_fn, upper=u_fn)
    integrand = Integrand(eval=g_fn)
    resolved = {"a": spec["a"], "b": spec["b"], "l_expr": spec["l"],
                "u_expr": spec["u"], "g_expr": spec["g"]}
    return region, integrand, overrides, resolved


def _control_config(args, overrides):
    target = None
    if args.target_rel is not None and args.target_abs is not None:
        raise _UsageError("--target-rel and --target-abs are mutually"
                          " exclusive")
    if args.target_rel is not None:
        target = controller.Target(kind="relative", value=args.target_rel)
    elif args.target_abs is not None:
        target = controller.Target(kind="absolute", value=args.target_abs)
    if args.eps is None and target is None:
        raise _UsageError("set --eps, or a --target-rel/--target-abs to"
                          " refine toward")
    sampling = bounds.SamplingConfig(grid_points_per_axis=args.grid,
                                     safety_factor=args.safety)
    return controller.ControlConfig(
        eps=args.eps, mu=args.mu, rule_name=args.rule, target=target,
        max_refinements=args.max_refine, sampling=sampling,
        bound_overrides=overrides)


def _config_echo(args, cfg, resolved_problem):
    echo = {
        "problem": resolved_problem,
        "rule": cfg.rule_name,
        "eps": cfg.eps,
        "mu": cfg.mu,
        "target": None if cfg.target is None else
        {"kind": cfg.target.kind, "value": cfg.target.value},
        "max_refine": cfg.max_refinements,
        "grid": cfg.sampling.grid_points_per_axis,
        "safety": cfg.sampling.safety_factor,
        "out": args.out,
    }
    if cfg.bound_overrides is not None:
        ov = cfg.bound_overrides
        echo["bound_overrides"] = {"m": ov.m, "d": ov.d,
                                   "deriv_sup_x": ov.deriv_sup_x,
                                   "deriv_sup_y": ov.deriv_sup_y}
    return echo


def _sanitize_nonfinite(obj):
    """Replace non-finite floats by strings so the JSON stays strict."""
    if isinstance(obj, float) and not math.isfinite(obj):
        return repr(obj)
    if isinstance(obj, dict):
        return {k: _sanitize_nonfinite(v) for k, v in obj.items()}
    if isinstance(obj, list):
        return [_sanitize_nonfinite(v) for v in obj]
    return obj


def _report_document(report, config_echo, wall_time):
    doc = report.as_dict()
    doc["wall_time_s"] = wall_time
    doc["config"] = config_echo
    doc["display"] = {
        "value": _fmt6(report.value),
        "abs_bound": _fmt6(report.abs_bound),
        "rel_estimate": _fmt6(report.rel_estimate),
        "qc_g": _fmt6(report.qc_g),
        "big_m": _fmt6(report.big_m),
        "h": _fmt6(report.h),
        "h_star": _fmt6(report.h_star),
        "max_k_star": _fmt6(report.max_k_star),
    }
    return doc


def _print_text_report(doc, out):
    r = doc
    lines = [
        f"value         = {r['value']!r}  ({r['display']['value']})",
        f"mode          = {r['mode']}",
        f"abs_bound     = {r['abs_bound']!r}  ({r['display']['abs_bound']})",
        f"rel_estimate  = {r['rel_estimate']!r}  ({r['display']['rel_estimate']})",
        f"qc_g          = {r['qc_g']!r}  ({r['display']['qc_g']})",
        f"big_m         = {r['big_m']!r}  ({r['display']['big_m']})",
        f"rule          = {r['rule']}",
        f"eps           = {r['eps']!r}",
        f"mu            = {r['mu']!r}",
        f"n1            = {r['n1']}",
        f"nodes         = {r['nodes_evaluated']}",
        f"h             = {r['h']!r}  ({r['display']['h']})",
        f"h_star        = {r['h_star']!r}  ({r['display']['h_star']})",
        f"max_k_star    = {r['max_k_star']!r}  ({r['display']['max_k_star']})",
        f"bounds.D      = {r['bounds']['d']!r}",
        f"bounds.Sx     = {r['bounds']['deriv_sup_x']!r}",
        f"bounds.Sy     = {r['bounds']['deriv_sup_y']!r}",
        f"bounds.from   = {r['bounds']['provenance']}",
        f"roundoff_floor= {r['roundoff_floor']!r}",
        f"converged     = {r['converged']}",
        f"wall_time_s   = {r['wall_time_s']:.3f}",
    ]
    for i, (e, rel, ab) in enumerate(
            (h["eps"], h["rel_estimate"], h["abs_bound"])
            for h in r["refinement_history"]):
        lines.append(f"pass[{i}]       eps={e:.6e}  rel_estimate={rel:.6e}"
                     f"  abs_bound={ab:.6e}")
    for w in r["warnings"]:
        lines.append(f"warning       : {w}")
    print("\n".join(lines), file=out)


def _cmd_integrate(args):
    region, integrand, overrides, resolved = _build_problem(args)
    cfg = _control_config(args, overrides)
    started = time.perf_counter()
    if cfg.target is not None:
        report = controller.refine_until(region, integrand, cfg)
    else:
        report = controller.run_once(region, integrand, cfg)
    wall = time.perf_counter() - started
    doc = _report_document(report, _config_echo(args, cfg, resolved), wall)
    if args.out == "structured":
        json.dump(_sanitize_nonfinite(doc), sys.stdout, indent=2,
                  sort_keys=True)
        print()
    else:
        _print_text_report(doc, sys.stdout)
    return _EXIT_OK


def _cmd_describe_rule(args):
    rule = rules.get_rule(args.rule)
    doc = {
        "name": rule.name,
        "order_r": rule.order_r,
        "err_const_A": rule.err_const_A,
        "panel_nodes": list(rule.panel_nodes),
        "panel_weights": list(rule.panel_weights),
        "closed": rule.closed,
    }
    if args.out == "structured":
        json.dump(doc, sys.stdout, indent=2, sort_keys=True)
        print()
    else:
        for key, value in doc.items():
            print(f"{key:13s}= {value}")
    return _EXIT_OK


def _cmd_check_bounds(args):
    region, integrand, overrides, resolved = _build_problem(args)
    if overrides is not None:
        integrand = replace(
            integrand,
            analytic_bounds=overrides.merged_over(integrand.analytic_bounds))
    sampling = bounds.SamplingConfig(grid_points_per_axis=args.grid,
                                     safety_factor=args.safety)
    prob = normalize(region, integrand, sampling)
    rule = rules.get_rule(args.rule)
    bound_set = bounds.estimate_bound_set(prob, rule.order_r, sampling)
    doc = {
        "problem": resolved,
        "m1": prob.m1,
        "m2": prob.m2,
        "l1": prob.l1,
        "u1": prob.u1,
        "big_m": prob.big_m,
        "d": bound_set.d,
        "deriv_sup_x": bound_set.deriv_sup_x,
        "deriv_sup_y": bound_set.deriv_sup_y,
        "provenance": bound_set.provenance,
        "roundoff_floor": 4.0 * bound_set.d * args.mu,
    }
    if args.out == "structured":
        json.dump(doc, sys.stdout, indent=2, sort_keys=True)
        print()
    else:
        for key, value in doc.items():
            print(f"{key:14s}= {value}")
    return _EXIT_OK


def _add_problem_flags(cmd):
    cmd.add_argument("--g", help="integrand G(x, y) as an expression")
    cmd.add_argument("--a", type=float, help="lower x limit")
    cmd.add_argument("--b", type=float, help="upper x limit")
    cmd.add_argument("--l", help="lower y limit l(x) as an expression")
    cmd.add_argument("--u", help="upper y limit u(x) as an expression")
    cmd.add_argument("--problem-file", help="INI problem definition")
    cmd.add_argument("--bounds-file", help="INI [bounds] overrides")
    cmd.add_argument("--rule", default="simpson",
                     choices=rules.rule_names())
    cmd.add_argument("--grid", type=int, default=201,
                     help="sampling grid points per axis")
    cmd.add_argument("--safety", type=float, default=1.1,
                     help="safety factor on estimated derivative maxima")
    cmd.add_argument("--mu", type=float, default=bounds.MU_DEFAULT,
                     help="machine-precision bound")
    cmd.add_argument("--out", default="text",
                     choices=["text", "structured"])


def build_parser():
    parser = argparse.ArgumentParser(
        prog="relcube",
        description="Bivariate cubature with relative error control over"
                    " regions a<=x<=b, l(x)<=y<=u(x).")
    sub = parser.add_subparsers(dest="command", required=True)

    integrate = sub.add_parser("integrate", help="integrate a problem")
    _add_problem_flags(integrate)
    integrate.add_argument("--eps", type=float, default=None,
                           help="working tolerance for the scaled problem")
    integrate.add_argument("--target-rel", type=float, default=None,
                           help="refine until rel_estimate <= this")
    integrate.add_argument("--target-abs", type=float, default=None,
                           help="refine until abs_bound <= this")
    integrate.add_argument("--max-refine", type=int, default=5)

    describe = sub.add_parser("describe-rule", help="show a rule's constants")
    describe.add_argument("--rule", default="simpson",
                          choices=rules.rule_names())
    describe.add_argument("--out", default="text",
                          choices=["text", "structured"])

    check = sub.add_parser("check-bounds",
                           help="estimate M, D, and derivative maxima")
    _add_problem_flags(check)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "integrate":
            return _cmd_integrate(args)
        if args.command == "describe-rule":
            return _cmd_describe_rule(args)
        if args.command == "check-bounds":
            return _cmd_check_bounds(args)
        parser.error(f"unknown command {args.command!r}")
    except _UsageError as exc:
        print(f"relcube: {exc}", file=sys.stderr)
        return _EXIT_USAGE
    except expr.ExprError as exc:
        print(f"relcube: expression error: {exc}", file=sys.stderr)
        return _EXIT_USAGE
    except RelcubeError as exc:
        print(f"relcube: {exc}", file=sys.stderr)
        return _EXIT_NUMERIC
    return _EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
