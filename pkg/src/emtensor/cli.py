"""Command-line front end.

Subcommands: ``run`` (default when flags are given directly), ``list`` and
``convergence``.  Reports are deterministic: the same configuration and seed
produce byte-identical JSON.

Exit codes: 0 all checks passed, 1 at least one check failed, 2 usage or
configuration error, 3 scenario gate error under --strict-gates.
"""

from __future__ import annotations

import argparse
import json
import sys

from .errors import ConfigError, EmtensorError, ExpressionError, GateError
from .geometry import RIEMANN_CONVENTION
from .lagrangian import PAIR_COUNTING
from .scalars import DUAL, fd_mode
from .scenarios import catalog, catalog_names, find_scenario, load_scenario
from .verify import (CHECKS, CONVERGENCE_OBSERVABLES, RunContext,
                     convergence_study, run_checks)

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_USAGE = 2
EXIT_GATE = 3


def _conventions():
    return {
        "signature": "mostly-plus (-,+,+,...) for Lorentzian entries; recorded per scenario",
        "riemann_convention": RIEMANN_CONVENTION,
        "pair_counting": PAIR_COUNTING,
    }


def _add_run_flags(parser):
    parser.add_argument("--scenario", default="all",
                        help="scenario name or 'all' (default: all)")
    parser.add_argument("--scenario-file", default=None,
                        help="path to a JSON scenario document")
    parser.add_argument("--checks", default="all",
                        help="comma-separated check names or 'all'")
    parser.add_argument("--mode", choices=("dual", "fd"), default="dual",
                        help="derivative engine (default: dual)")
    parser.add_argument("--h", type=float, default=1e-2,
                        help="finite-difference step for fd mode (default: 1e-2)")
    parser.add_argument("--tol", action="append", default=[],
                        metavar="CHECK=VALUE",
                        help="tolerance override, repeatable; CHECK may be 'all'")
    parser.add_argument("--samples", type=int, default=None,
                        help="sample points per scenario (default: scenario's own)")
    parser.add_argument("--seed", type=int, default=None,
                        help="sampling seed override")
    parser.add_argument("--out", default=None, help="write the report here")
    parser.add_argument("--format", choices=("json", "human"), default="human")
    parser.add_argument("--strict-gates", action="store_true",
                        help="abort with exit code 3 on scenario gate failures")


def build_parser():
    parser = argparse.ArgumentParser(
        prog="emt-verify",
        description="Construct electromagnetic stress tensors from arbitrary "
                    "Lagrangians and verify their identities numerically.")
    sub = parser.add_subparsers(dest="command")

    run_p = sub.add_parser("run", help="run checks and emit a report")
    _add_run_flags(run_p)

    list_p = sub.add_parser("list", help="list the scenario catalog")
    list_p.add_argument("--format", choices=("json", "human"), default="human")

    conv_p = sub.add_parser("convergence",
                            help="finite-difference convergence study")
    _add_run_flags(conv_p)
    conv_p.add_argument("--halvings", type=int, default=3,
                        help="number of step halvings (default and minimum: 3)")
    return parser


def _parse_tolerances(items):
    overrides = {}
    for item in items:
        if "=" in item:
            key, _, value = item.partition("=")
        else:
            key, value = "all", item
        key = key.strip()
        if key != "all" and key not in CHECKS:
            raise ConfigError(f"unknown check in --tol: {key!r}")
        try:
            overrides[key] = float(value)
        except ValueError:
            raise ConfigError(f"bad tolerance value in --tol: {value!r}")
    return overrides


def _resolve_scenarios(args):
    if args.scenario_file:
        with open(args.scenario_file, encoding="utf-8") as fh:
            doc = json.load(fh)
        return [load_scenario(doc)]
    if args.scenario == "all":
        return catalog()
    return [find_scenario(args.scenario)]


def _resolve_checks(selector):
    if selector == "all":
        return list(CHECKS)
    names = [c.strip() for c in selector.split(",") if c.strip()]
    if not names:
        raise ConfigError("--checks selected nothing")
    return names


def _context(args):
    mode = DUAL if args.mode == "dual" else fd_mode(args.h)
    return RunContext(mode=mode, samples=args.samples, seed=args.seed,
                      tolerance_overrides=_parse_tolerances(args.tol),
                      strict_gates=args.strict_gates)


def _emit(text, out_path):
    if out_path:
        with open(out_path, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
        if not text.endswith("\n"):
            sys.stdout.write("\n")


def _config_echo(args, extra=None):
    echo = {
        "scenario": args.scenario,
        "scenario_file": args.scenario_file,
        "checks": args.checks,
        "mode": args.mode,
        "h": args.h,
        "samples": args.samples,
        "seed": args.seed,
        "tolerance_overrides": _parse_tolerances(args.tol),
        "format": args.format,
    }
    if extra:
        echo.update(extra)
    return echo


def _human_table(reports):
    header = f"{'status':7s} {'scenario':33s} {'check':24s} " \
             f"{'max residual':>13s} {'scale':>10s} {'tol':>9s} {'pts':>4s}  note"
    lines = [header, "-" * len(header)]
    ordered = sorted(reports, key=lambda r: (r.passed, r.scenario, r.name))
    for r in ordered:
        status = "PASS" if r.passed else "FAIL"
        if r.witness:
            status += "*"
        lines.append(
            f"{status:7s} {r.scenario:33s} {r.name:24s} "
            f"{r.max_residual:13.3e} {r.scale:10.2e} {r.tolerance:9.0e} "
            f"{r.points:4d}  {r.note}")
    failed = sum(1 for r in reports if not r.passed)
    lines.append("-" * len(header))
    lines.append(f"{len(reports)} checks, {failed} failed "
                 f"(* = witness: asserts a lower bound)")
    return "\n".join(lines) + "\n"


def cmd_run(args):
    scenarios = _resolve_scenarios(args)
    checks = _resolve_checks(args.checks)
    ctx = _context(args)
    reports = run_checks(scenarios, checks, ctx)
    if args.format == "json":
        payload = {
            "run": {"config": _config_echo(args), "conventions": _conventions()},
            "checks": [r.to_dict() for r in reports],
        }
        _emit(json.dumps(payload, indent=2, sort_keys=True) + "\n", args.out)
    else:
        _emit(_human_table(reports), args.out)
    failed = sum(1 for r in reports if not r.passed)
    if failed:
        print(f"{failed} check(s) failed", file=sys.stderr)
        return EXIT_CHECK_FAILED
    return EXIT_OK


def cmd_list(args):
    entries = []
    for scenario in catalog():
        entries.append({
            "name": scenario.name,
            "dimension": scenario.chart.dim,
            "kind": scenario.kind,
            "model": (scenario.model or scenario.scalar_model).describe(),
            "on_shell": scenario.on_shell,
            "killing_count": len(scenario.killing),
            "samples": scenario.samples,
            "signature": list(scenario.signature),
        })
    if args.format == "json":
        print(json.dumps(entries, indent=2, sort_keys=True))
    else:
        print(f"{'name':33s} {'dim':>3s} {'kind':6s} {'model':28s} "
              f"{'on-shell':8s} {'killing':>7s}")
        for e in entries:
            print(f"{e['name']:33s} {e['dimension']:3d} {e['kind']:6s} "
                  f"{e['model']:28s} {str(e['on_shell']):8s} {e['killing_count']:7d}")
    return EXIT_OK


def cmd_convergence(args):
    if args.halvings < 3:
        raise ConfigError(f"--halvings must be at least 3, got {args.halvings}")
    scenarios = _resolve_scenarios(args)
    if args.checks == "all":
        checks = sorted(CONVERGENCE_OBSERVABLES)
    else:
        checks = _resolve_checks(args.checks)
    steps = tuple(args.h / (2 ** i) for i in range(args.halvings + 1))
    samples = args.samples or 8
    results = []
    for scenario in scenarios:
        for check in checks:
            try:
                results.append(convergence_study(check, scenario, steps,
                                                 samples=samples, seed=args.seed))
            except ConfigError:
                if args.checks != "all":
                    raise
    payload = {
        "run": {"config": _config_echo(args, {"halvings": args.halvings}),
                "conventions": _conventions()},
        "series": [r.to_dict() for r in results],
    }
    if args.format == "json":
        _emit(json.dumps(payload, indent=2, sort_keys=True) + "\n", args.out)
    else:
        lines = []
        for r in results:
            lines.append(f"{r.scenario} / {r.check} [{r.observable}]")
            for h, resid in zip(r.steps, r.residuals):
                lines.append(f"    h = {h:9.2e}   observable = {resid:.6e}")
            orders = ", ".join(f"{o:.2f}" for o in r.orders)
            lines.append(f"    observed orders: {orders}"
                         f"   (dual reference {r.dual_reference:.3e})")
        _emit("\n".join(lines) + "\n", args.out)
    return EXIT_OK


def main(argv=None):
    argv = list(sys.argv[1:] if argv is None else argv)
    if argv and argv[0] not in ("run", "list", "convergence", "-h", "--help"):
        argv.insert(0, "run")  # bare flags mean `run`
    elif not argv:
        argv = ["run"]
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "list":
            return cmd_list(args)
        if args.command == "convergence":
            return cmd_convergence(args)
        return cmd_run(args)
    except GateError as exc:
        print(f"scenario gate error: {exc}", file=sys.stderr)
        return EXIT_GATE
    except (ConfigError, ExpressionError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except EmtensorError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
