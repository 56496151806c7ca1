"""Command line interface.

Every subcommand reads a scenario JSON file:

    gvbopt table    --scenario study.json [--out DIR] [--seed N]
    gvbopt optimize --scenario study.json [--out DIR] [--seed N]
    gvbopt limit    --scenario study.json
    gvbopt check    --scenario study.json
    gvbopt plot     --scenario study.json [--out DIR] [--seed N]

Exit codes: 0 success, 2 bad scenario, 3 optimizer starts disagreed.
"""

import argparse
import sys

from ._kernels import backend_name
from .optimizer import limiting_profile, optimize
from .report import check_models, file_slug, render_profiles, run_table
from .scenario import ScenarioError, parse_scenario, with_seed
from .schedule import single_slug_volume


def _cmd_table(scenario, out):
    table, _ = run_table(scenario, out)
    print(table.to_text(), end="")
    return 0 if table.all_converged else 3


def _cmd_optimize(scenario, out):
    import os

    os.makedirs(out, exist_ok=True)
    all_ok = True
    for fingering in scenario.models:
        label = fingering.label
        for n in scenario.slug_counts:
            res = optimize(fingering, scenario.viscosity, n, scenario.optimizer)
            res.save(os.path.join(out, f"result_{file_slug(label)}_{n}.json"))
            flag = "" if res.converged else "  (starts disagree)"
            print(
                f"{label} n={n}: volume={res.volume:.9f} "
                f"gain={100.0 * res.gain:.2f}% rank={res.rank:.6f}{flag}"
            )
            all_ok = all_ok and res.converged
    return 0 if all_ok else 3


def _cmd_limit(scenario, out):
    model = scenario.viscosity
    for fingering in scenario.models:
        lp = limiting_profile(fingering, model)
        v1 = single_slug_volume(fingering, model)
        print(
            f"{fingering.label}: beta={lp.beta:.6g} V1={v1:.9f} "
            f"V_inf={lp.limiting_volume:.9f} gain={100.0 * lp.limiting_gain:.2f}%"
        )
    return 0


def _cmd_check(scenario, out):
    text, _ = check_models(scenario)
    print(text, end="")
    return 0


def _cmd_plot(scenario, out):
    results = {}
    all_ok = True
    for fingering in scenario.models:
        for n in scenario.slug_counts:
            res = optimize(fingering, scenario.viscosity, n, scenario.optimizer)
            results[fingering.label, n] = res
            all_ok = all_ok and res.converged
    svg_path, csv_paths = render_profiles(scenario, results, out)
    for path in [svg_path] + csv_paths:
        print(f"wrote {path}")
    return 0 if all_ok else 3


_COMMANDS = {
    "table": (_cmd_table, "gain table over models and slug counts"),
    "optimize": (_cmd_optimize, "optimal configurations per model and slug count"),
    "limit": (_cmd_limit, "limiting profiles and gains"),
    "check": (_cmd_check, "structural condition report for the flux factors"),
    "plot": (_cmd_plot, "profile charts with the limiting curve"),
}


def build_parser():
    parser = argparse.ArgumentParser(
        prog="gvbopt",
        description="Graded viscosity bank design: optimal polymer slug "
        "schedules under viscous-fingering mixing-zone models "
        f"(kernel backend: {backend_name()})",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, (func, help_text) in _COMMANDS.items():
        sp = sub.add_parser(name, help=help_text)
        sp.add_argument("--scenario", required=True, help="scenario JSON file")
        sp.add_argument("--out", default=None, help="output directory")
        sp.add_argument("--seed", type=int, default=None, help="optimizer seed")
        sp.set_defaults(func=func)
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        scenario = parse_scenario(args.scenario)
        scenario = with_seed(scenario, args.seed)
    except ScenarioError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    out = args.out or scenario.output_dir or "."
    return args.func(scenario, out)


def entrypoint():
    sys.exit(main())


if __name__ == "__main__":
    entrypoint()
