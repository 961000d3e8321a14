"""Command-line surface.

Subcommands: simulate, analyze, metrics, fit, apps-ads, apps-factcheck,
project, export-series.  Exit codes: 0 success, 1 runtime error, 2 usage
error; --json switches stderr errors to machine-readable JSON.  Every output
embeds run metadata (params, seed, version, PRNG id) and is byte-stable for
a fixed seed.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

import numpy as np

from . import __version__, io
from .analytic import (UnipartiteParams, group_size_distribution,
                       member_degree_distribution, member_ratio_curve,
                       solve, unipartite_analytics)
from .applications import (FactCheckConfig, ads_sweep, factcheck_sweep,
                           ad_reach_ratio)
from .core import BipartiteNetwork, GrowthParams, Variant
from .engine import (PRNG_ID, RunConfig, SamplingMode, grow, grow_unipartite)
from .errors import ChasmnetError
from .fitting import FitConfig, fit_homophily
from .metrics import (Binning, color_groups_by_ratio, detect_chasm,
                      group_ratio_by_size, homophily_pair_test,
                      member_ratio_by_size, power_law_exponent,
                      top_k_tail_ratio)
from .unipartite import connection_ratio_by_degree, project


def _params_from_args(args) -> GrowthParams:
    mapping = {}
    if getattr(args, "params_file", None):
        mapping.update(io.read_params_file(args.params_file))
    for key in ("alpha", "eta", "r", "xi", "rho_p_red", "rho_p_blue",
                "rho_u_red", "rho_u_blue", "rho", "variant"):
        v = getattr(args, key, None)
        if v is not None:
            mapping[key] = v
    return io.params_from_mapping(mapping)


def _add_params_flags(sub):
    sub.add_argument("--params-file", help="flat key=value parameter file")
    for key in ("alpha", "eta", "r", "xi", "rho-p-red", "rho-p-blue",
                "rho-u-red", "rho-u-blue", "rho"):
        sub.add_argument(f"--{key}", type=float, default=None)
    sub.add_argument("--variant", choices=[v.value for v in Variant], default=None)


def _add_figures_flag(sub):
    sub.add_argument("--figures", action=argparse.BooleanOptionalAction,
                     default=True, help="render PNG figures next to the CSVs")


def _outdir(args):
    os.makedirs(args.out, exist_ok=True)
    return args.out


def _span(spec):
    """Parse lo:hi[:step] into an integer range, inclusive of hi."""
    parts = [int(x) for x in spec.split(":")]
    if len(parts) == 1:
        return [parts[0]]
    lo, hi = parts[0], parts[1]
    step = parts[2] if len(parts) > 2 else 1
    return list(range(lo, hi + 1, step))


def _meta_block(args, params=None):
    meta = {"version": __version__, "prng": PRNG_ID,
            "seed": getattr(args, "seed", None)}
    if params is not None:
        meta["params"] = params.as_dict()
    return meta


# ---------------------------------------------------------------------------
# Subcommand handlers

def cmd_simulate(args):
    params = _params_from_args(args)
    config = RunConfig(t_max=args.t, seed=args.seed,
                       sampling=SamplingMode(args.sampling),
                       record_events=args.record_events)
    net = grow(params, config)
    out = _outdir(args)
    io.save_snapshot(net, os.path.join(out, "snapshot.jsonl"))
    if net.events is not None:
        net.events.to_jsonl(os.path.join(out, "events.jsonl"))
    summary = {
        "meta": net.meta,
        "t": net.t,
        "members": {"red": int(net.tallies.members[0]),
                    "blue": int(net.tallies.members[1])},
        "groups": {"red": int(net.tallies.groups[0]),
                   "blue": int(net.tallies.groups[1])},
        "member_degree_mass": {"red": int(net.tallies.member_degree[0]),
                               "blue": int(net.tallies.member_degree[1])},
        "group_size_mass": {"red": int(net.tallies.group_size[0]),
                            "blue": int(net.tallies.group_size[1])},
    }
    io.export_report_json(summary, os.path.join(out, "summary.json"))
    print(f"wrote {out}/snapshot.jsonl (t={net.t})")
    return 0


def cmd_analyze(args):
    params = _params_from_args(args)
    sol = solve(params)
    out = _outdir(args)
    report = {"meta": _meta_block(args, params), "solution": sol.as_dict()}
    io.export_report_json(report, os.path.join(out, "analysis.json"))
    k_max = args.k_max
    dist = group_size_distribution(params, k_max)
    io.export_columns_csv(os.path.join(out, "group_sizes.csv"),
                          ["k", "value_red", "value_blue"],
                          zip(dist.ks.tolist(), dist.red.tolist(), dist.blue.tolist()))
    md = member_degree_distribution(params, k_max)
    io.export_columns_csv(os.path.join(out, "member_degrees.csv"),
                          ["k", "value_red", "value_blue"],
                          zip(md.ks.tolist(), md.red.tolist(), md.blue.tolist()))
    curve = member_ratio_curve(params, min(k_max, 10_000))
    io.export_columns_csv(os.path.join(out, "member_ratio.csv"),
                          ["k", "ratio"],
                          zip(curve.ks.tolist(), curve.values.tolist()))
    if args.figures:
        from . import plots
        plots.plot_distribution_loglog(dist.ks, dist.red, dist.blue,
                                       os.path.join(out, "group_sizes.png"),
                                       "limit group-size distribution")
        plots.plot_distribution_loglog(md.ks, md.red, md.blue,
                                       os.path.join(out, "member_degrees.png"),
                                       "limit member-degree distribution",
                                       xlabel="degree")
    print(f"alpha*={sol.alpha_star:.6f} glass_ceiling={sol.glass_ceiling.value} "
          f"chasm={sol.chasm.value}")
    return 0


def cmd_metrics(args):
    net = io.load_network(args.network)
    if args.recolor_by_ratio:
        net = color_groups_by_ratio(net, args.ratio_threshold)
    out = _outdir(args)
    binning = Binning()
    gseries = group_ratio_by_size(net, binning)
    mseries = member_ratio_by_size(net, binning)
    io.export_series_csv(gseries, os.path.join(out, "group_ratio.csv"))
    io.export_series_csv(mseries, os.path.join(out, "member_ratio.csv"))
    homo = homophily_pair_test(net)
    io.export_report_json({"meta": _meta_block(args), **homo.as_dict()},
                          os.path.join(out, "homophily.json"))
    exponents = {}
    for label, seq in (("group_sizes_red", net.group_size[net.group_color == 0]),
                       ("group_sizes_blue", net.group_size[net.group_color == 1]),
                       ("member_degrees_red", net.member_degree[net.member_color == 0]),
                       ("member_degrees_blue", net.member_degree[net.member_color == 1])):
        try:
            exponents[label] = power_law_exponent(seq, method=args.exponent_method).as_dict()
        except ChasmnetError as exc:
            exponents[label] = {"error": str(exc)}
    io.export_report_json({"meta": _meta_block(args), "fits": exponents},
                          os.path.join(out, "exponents.json"))
    findings = {}
    for label, series in (("group_ratio", gseries), ("member_ratio", mseries)):
        try:
            findings[label] = detect_chasm(series, min_support=args.min_support).as_dict()
        except ChasmnetError as exc:
            findings[label] = {"error": str(exc)}
    io.export_report_json({"meta": _meta_block(args), "findings": findings},
                          os.path.join(out, "chasm.json"))
    tail = top_k_tail_ratio(net)
    io.export_series_csv(tail, os.path.join(out, "tail_ratio.csv"))
    if args.figures:
        from . import plots
        plots.plot_ratio_series(gseries, os.path.join(out, "group_ratio.png"),
                                "red share of groups by size")
        plots.plot_ratio_series(mseries, os.path.join(out, "member_ratio.png"),
                                "red member share by group size")
        plots.plot_homophily(homo, os.path.join(out, "homophily.png"))
    print(f"wrote metrics to {out}")
    return 0


def cmd_fit(args):
    net = io.load_network(args.network)
    config = FitConfig(K=args.K, objective=args.objective,
                       free_params=tuple(args.free_params.split(",")),
                       restarts=args.restarts, max_evals=args.max_evals,
                       seed=args.seed)
    result = fit_homophily(net, config)
    out = _outdir(args)
    io.export_report_json({"meta": _meta_block(args), **result.as_dict()},
                          os.path.join(out, "fit.json"))
    io.export_columns_csv(os.path.join(out, "comparison.csv"),
                          ["k", "empirical_ratio", "fitted_ratio"],
                          zip(result.ks.tolist(),
                              result.empirical_ratio.tolist(),
                              result.fitted_ratio.tolist()))
    est = result.direct_estimates
    print(f"direct: r={est.r:.4f} alpha={est.alpha:.4f} "
          f"eta={est.eta:.4f} (eta is the counted group-member ratio)")
    print(f"objective[{result.objective}]={result.objective_value:.6g}")
    for k, e, f in list(zip(result.ks, result.empirical_ratio,
                            result.fitted_ratio))[:10]:
        print(f"  k={int(k):3d} empirical={e:.4f} fitted={f:.4f}")
    return 0


def cmd_apps_ads(args):
    out = _outdir(args)
    ks = _span(args.k_a_sweep)
    if args.network:
        net = io.load_network(args.network)
        rows = ads_sweep(net, ks, counting=args.counting)
        r_overall = ad_reach_ratio(net, 1, counting=args.counting)
    else:
        params = _params_from_args(args)
        dist = group_size_distribution(params, args.k_max)
        curve = member_ratio_curve(params, args.k_max)
        rows = ads_sweep((dist, curve), ks)
        r_overall = params.r
    io.export_columns_csv(os.path.join(out, "ads_sweep.csv"),
                          ["k_a", "red_reach_share"], rows)
    if args.figures:
        from . import plots
        plots.plot_ads_sweep(rows, r_overall, os.path.join(out, "ads_sweep.png"))
    print(f"wrote {out}/ads_sweep.csv ({len(rows)} thresholds)")
    return 0


def cmd_apps_factcheck(args):
    net = io.load_network(args.network)
    out = _outdir(args)
    percents = _span(args.P_sweep)
    rows = factcheck_sweep(net, percents, p=args.p, reps=args.reps,
                           seed=args.seed, items_per_group=args.items_per_group)
    io.export_columns_csv(
        os.path.join(out, "factcheck_sweep.csv"),
        ["percent", "protected_group_red_share", "checked_count_red_share",
         "protected_members_red_share", "protected_red_members_share"],
        [(pc, m.protected_group_red_share, m.checked_count_red_share,
          m.protected_members_red_share, m.protected_red_members_share)
         for pc, m in rows])
    red_share = float((net.group_color == 0).mean())
    if args.emit_h_grid:
        from .applications import induced_h, kernel_grid_rows
        h = induced_h(net, FactCheckConfig(p=args.p, reps=args.reps,
                                           seed=args.seed,
                                           items_per_group=args.items_per_group),
                      thetas=[pc / 100.0 for pc in percents])
        io.export_columns_csv(os.path.join(out, "h_grid.csv"),
                              ["k", "theta", "h"], kernel_grid_rows(h))
    if args.figures:
        from . import plots
        plots.plot_factcheck_sweep(rows, red_share,
                                   os.path.join(out, "factcheck_sweep.png"))
    print(f"wrote {out}/factcheck_sweep.csv (red group share {red_share:.4f})")
    return 0


def cmd_project(args):
    net = io.load_network(args.network)
    uni = project(net, max_edges=args.max_edges,
                  collapse_multi=args.collapse_multi)
    out = _outdir(args)
    io.save_snapshot(uni, os.path.join(out, "unipartite.jsonl"))
    series = connection_ratio_by_degree(uni)
    io.export_series_csv(series, os.path.join(out, "connection_ratio.csv"))
    if args.figures:
        from . import plots
        plots.plot_ratio_series(series, os.path.join(out, "connection_ratio.png"),
                                "red-neighbor share by member degree")
    print(f"projected {uni.n_edges} edges over {uni.n_members} members")
    return 0


def cmd_export_series(args):
    net = io.load_network(args.network)
    what = args.what
    if what == "group-ratio":
        series = group_ratio_by_size(net)
    elif what == "member-ratio":
        series = member_ratio_by_size(net)
    elif what == "tail-ratio":
        series = top_k_tail_ratio(net)
    else:
        raise ChasmnetError(f"unknown series {what!r}")
    io.export_series_csv(series, args.out_file)
    print(f"wrote {args.out_file}")
    return 0


# ---------------------------------------------------------------------------

def build_parser():
    parser = argparse.ArgumentParser(prog="chasmnet",
                                     description=__doc__.splitlines()[0])
    parser.add_argument("--json", action="store_true",
                        help="machine-readable errors on stderr")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("simulate", help="grow a network")
    _add_params_flags(sp)
    sp.add_argument("--t", type=int, required=True)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--sampling", choices=[m.value for m in SamplingMode],
                    default=SamplingMode.EXACT_MIXTURE.value)
    sp.add_argument("--record-events", action="store_true")
    sp.add_argument("--out", required=True)
    sp.set_defaults(func=cmd_simulate)

    sp = sub.add_parser("analyze", help="closed-form solution and distributions")
    _add_params_flags(sp)
    sp.add_argument("--k-max", type=int, default=10_000)
    sp.add_argument("--out", required=True)
    sp.add_argument("--seed", type=int, default=None, help=argparse.SUPPRESS)
    _add_figures_flag(sp)
    sp.set_defaults(func=cmd_analyze)

    sp = sub.add_parser("metrics", help="empirical statistics on a network")
    sp.add_argument("--network", required=True)
    sp.add_argument("--recolor-by-ratio", action="store_true",
                    help="replace group colors by the member-share rule")
    sp.add_argument("--ratio-threshold", type=float, default=None)
    sp.add_argument("--min-support", type=int, default=50)
    sp.add_argument("--exponent-method", choices=["mle", "ls"], default="mle")
    sp.add_argument("--out", required=True)
    sp.add_argument("--seed", type=int, default=None, help=argparse.SUPPRESS)
    _add_figures_flag(sp)
    sp.set_defaults(func=cmd_metrics)

    sp = sub.add_parser("fit", help="infer parameters from a network")
    sp.add_argument("--network", required=True)
    sp.add_argument("--objective", choices=["summed_ratio_difference", "per_size_l1"],
                    default="summed_ratio_difference")
    sp.add_argument("--free-params",
                    default="xi,rho_p_red,rho_p_blue,rho_u_red,rho_u_blue")
    sp.add_argument("--K", type=int, default=None)
    sp.add_argument("--restarts", type=int, default=16)
    sp.add_argument("--max-evals", type=int, default=2000)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--out", required=True)
    sp.set_defaults(func=cmd_fit)

    sp = sub.add_parser("apps-ads", help="advertisement reach by size threshold")
    sp.add_argument("--network")
    _add_params_flags(sp)
    sp.add_argument("--k-a-sweep", default="1:200")
    sp.add_argument("--counting", choices=["impressions", "unique_members"],
                    default="impressions")
    sp.add_argument("--k-max", type=int, default=10_000)
    sp.add_argument("--out", required=True)
    sp.add_argument("--seed", type=int, default=None, help=argparse.SUPPRESS)
    _add_figures_flag(sp)
    sp.set_defaults(func=cmd_apps_ads)

    sp = sub.add_parser("apps-factcheck", help="fact-check protection sweep")
    sp.add_argument("--network", required=True)
    sp.add_argument("--p", type=float, default=0.5)
    sp.add_argument("--P-sweep", default="1:100:1")
    sp.add_argument("--reps", type=int, default=100)
    sp.add_argument("--items-per-group", type=int, default=1)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--emit-h-grid", action="store_true",
                    help="also estimate the detection kernel and write h_grid.csv")
    sp.add_argument("--out", required=True)
    _add_figures_flag(sp)
    sp.set_defaults(func=cmd_apps_factcheck)

    sp = sub.add_parser("project", help="bipartite -> unipartite projection")
    sp.add_argument("--network", required=True)
    sp.add_argument("--max-edges", type=int, default=50_000_000)
    sp.add_argument("--collapse-multi", action="store_true")
    sp.add_argument("--out", required=True)
    sp.add_argument("--seed", type=int, default=None, help=argparse.SUPPRESS)
    _add_figures_flag(sp)
    sp.set_defaults(func=cmd_project)

    sp = sub.add_parser("export-series", help="one series as CSV")
    sp.add_argument("--network", required=True)
    sp.add_argument("--what", required=True,
                    choices=["group-ratio", "member-ratio", "tail-ratio"])
    sp.add_argument("--out-file", required=True)
    sp.set_defaults(func=cmd_export_series)
    return parser


def cli(argv) -> int:
    """Run one CLI invocation; returns the exit code."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else 2
    try:
        return args.func(args)
    except Exception as exc:  # runtime failures are exit code 1
        _emit_error(args, exc)
        return 1


def _emit_error(args, exc):
    if getattr(args, "json", False):
        sys.stderr.write(json.dumps(
            {"error": type(exc).__name__, "message": str(exc)},
            sort_keys=True) + "\n")
    else:
        sys.stderr.write(f"error: {exc}\n")


def main():
    sys.exit(cli(sys.argv[1:]))


if __name__ == "__main__":
    main()
