"""Command-line front end.

Subcommands::

    mwsnsim analyze   [--pd P ...] [--td T ...] [--n N ...]
    mwsnsim simulate  [--out FILE]
    mwsnsim sweep     [--out FILE]
    mwsnsim minnodes  [--pd P ...] [--empirical] [--n-max N]
    mwsnsim snapshot  --times T[,T...] [--out FILE] [--hist-out FILE]

Every config key has a flag (``range`` -> ``--range``, ``n_nodes`` ->
``--n-nodes``); flags override ``--config PATH``. Exit status is 0 on
success, 1 for configuration errors and 2 for runtime failures.
"""
from __future__ import annotations

import argparse
import sys
from dataclasses import replace

from . import analysis
from .config import CONFIG_KEYS, ConfigDocument, ConfigError, _parse_value, load_config
from .harness import (
    SweepRow,
    analytic_min_nodes,
    export_snapshots,
    find_min_nodes_empirical,
    monte_carlo,
    sweep,
)
from .io import fmt, histogram_csv_text, snapshot_csv_text, sweep_csv_text, write_text_atomic

ALIASES = {
    "n_nodes": ["--n"],
    "mobility_model": ["--model"],
    "target_kind": ["--target"],
    "target_duration": ["--td"],
    "base_seed": ["--seed"],
}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ConfigError(message)


def _flag(key: str) -> str:
    return "--" + key.replace("_", "-")


def _add_config_flags(p: argparse.ArgumentParser, skip=()) -> None:
    p.add_argument("--config", metavar="PATH", help="key = value configuration file")
    g = p.add_argument_group("configuration overrides")
    for key in CONFIG_KEYS:
        if key in skip:
            continue
        g.add_argument(_flag(key), *ALIASES.get(key, []), dest=f"cfg_{key}", metavar="VALUE")


def _document(args) -> ConfigDocument:
    try:
        doc = load_config(args.config) if args.config else ConfigDocument()
    except OSError as e:
        raise ConfigError(f"cannot read config {args.config}: {e.strerror or e}") from e
    overrides = {
        key: getattr(args, f"cfg_{key}")
        for key in CONFIG_KEYS
        if getattr(args, f"cfg_{key}", None) is not None
    }
    doc = doc.with_overrides(overrides)
    doc.sim_config()
    return doc


def _build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="mwsnsim", description="Mobile sensor network coverage simulator")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("analyze", help="closed-form coverage results")
    _add_config_flags(p, skip=("n_nodes", "target_duration"))
    p.add_argument("--pd", nargs="+", default=["0.9", "0.99"], help="target detection probabilities")
    p.add_argument("--td", "--target-duration", nargs="+", dest="td_list", help="durations in seconds")
    p.add_argument("--n", "--n-nodes", nargs="+", dest="n_list", help="node counts")
    p.add_argument("--kmax", type=int, default=2, help="largest k for the k-coverage mass")

    p = sub.add_parser("simulate", help="Monte Carlo estimate for one configuration")
    _add_config_flags(p)
    p.add_argument("--out", metavar="FILE", help="write a one-row sweep CSV")

    p = sub.add_parser("sweep", help="grid over models x n_values x td_values")
    _add_config_flags(p)
    p.add_argument("--out", metavar="FILE", help="CSV destination (stdout if omitted)")

    p = sub.add_parser("minnodes", help="minimum node count for a detection probability")
    _add_config_flags(p)
    p.add_argument("--pd", nargs="+", default=["0.9", "0.99"])
    p.add_argument("--empirical", action="store_true", help="also search by simulation")
    p.add_argument("--n-max", type=int, default=100)

    p = sub.add_parser("snapshot", help="node positions and nearest-neighbour histogram")
    _add_config_flags(p)
    p.add_argument("--times", required=True, help="comma separated times in seconds")
    p.add_argument("--out", metavar="FILE", help="positions CSV (stdout if omitted)")
    p.add_argument("--hist-out", metavar="FILE", help="nearest-neighbour histogram CSV")
    return parser


def _probabilities(raw) -> list[float]:
    out = []
    for s in raw:
        try:
            p = float(s)
        except ValueError:
            raise ConfigError(f"not a probability: {s!r}", key="pd") from None
        if not 0 < p < 1:
            raise ConfigError(f"probability must lie in (0, 1), got {s}", key="pd")
        out.append(p)
    return out


def _cmd_analyze(args, out) -> None:
    doc = _document(args)
    tds = [_parse_value("target_duration", s, None) for s in args.td_list] if args.td_list else [doc.target_duration]
    ns = [_parse_value("n_nodes", s, None) for s in args.n_list] if args.n_list else [doc.n_nodes]
    pds = _probabilities(args.pd)
    base = analysis.CoverageParams(area=doc.arena_side ** 2, range=doc.range, mean_speed=doc.node_speed)

    print(f"# area_m2={fmt(base.area)} range_m={fmt(base.range)} mean_speed_mps={fmt(base.mean_speed)}", file=out)
    for n in ns:
        for k in range(args.kmax + 1):
            print(f"prob_k_coverage(n={n}, k={k}) = {fmt(analysis.prob_k_coverage(n, base, k))}", file=out)
        print(f"detect_prob_static(n={n}) = {fmt(analysis.detect_prob_static(n, base))}", file=out)
        for td in tds:
            p = analysis.detect_prob_mobile(n, replace(base, horizon=td))
            print(f"detect_prob_mobile(n={n}, t={fmt(td)}) = {fmt(p)}", file=out)
    for pd in pds:
        print(f"min_nodes_static(pd={fmt(pd)}) = {analysis.min_nodes_static(pd, base)}", file=out)
        for td in tds:
            m = analysis.min_nodes_mobile(pd, replace(base, horizon=td))
            print(f"min_nodes_mobile(pd={fmt(pd)}, t={fmt(td)}) = {m}", file=out)
    for td in tds:
        print(f"nodes_no_overlap(td={fmt(td)}) = {analysis.nodes_no_overlap(base, td)}", file=out)


def _cmd_simulate(args, out) -> None:
    doc = _document(args)
    exp = doc.experiment()
    det, trk = monte_carlo(exp)
    cfg = exp.base_config
    print(
        f"model={cfg.mobility.model.label} n_nodes={cfg.n_nodes} target={cfg.target.kind.label} "
        f"target_duration_s={fmt(cfg.target.duration)} runs={exp.runs} base_seed={exp.base_seed}",
        file=out,
    )
    print(f"detection_mean={fmt(det.mean)} detection_stderr={fmt(det.std_error)}", file=out)
    print(f"tracking_mean={fmt(trk.mean)} tracking_stderr={fmt(trk.std_error)}", file=out)
    if args.out:
        row = SweepRow(cfg.mobility.model, cfg.n_nodes, cfg.target.duration, det, trk)
        write_text_atomic(args.out, sweep_csv_text([row]))


def _cmd_sweep(args, out) -> None:
    doc = _document(args).validate_grid()
    rows = sweep(doc.sweep_grid(), doc.experiment())
    text = sweep_csv_text(rows)
    if args.out:
        write_text_atomic(args.out, text)
    else:
        out.write(text)


def _cmd_minnodes(args, out) -> None:
    doc = _document(args)
    exp = doc.experiment()
    cfg = exp.base_config
    label = cfg.mobility.model.label
    td = fmt(cfg.target.duration)
    for pd in _probabilities(args.pd):
        print(f"min_nodes_mobile(pd={fmt(pd)}, t={td}) = {analytic_min_nodes(pd, cfg)}", file=out)
        if args.empirical:
            n = find_min_nodes_empirical(pd, exp, args.n_max)
            value = str(n) if n is not None else f"not achievable (n <= {args.n_max})"
            print(f"empirical_min_nodes(pd={fmt(pd)}, model={label}, t={td}) = {value}", file=out)


def _cmd_snapshot(args, out) -> None:
    doc = _document(args)
    try:
        times = [float(t) for t in args.times.split(",") if t.strip()]
    except ValueError:
        raise ConfigError(f"malformed --times {args.times!r}", key="times") from None
    if any(t < 0 for t in times):
        raise ConfigError("snapshot times must be non-negative", key="times")
    export = export_snapshots(doc.experiment(), times)
    text = snapshot_csv_text(export)
    if args.out:
        write_text_atomic(args.out, text)
    else:
        out.write(text)
    if args.hist_out:
        write_text_atomic(args.hist_out, histogram_csv_text(export))


COMMANDS = {
    "analyze": _cmd_analyze,
    "simulate": _cmd_simulate,
    "sweep": _cmd_sweep,
    "minnodes": _cmd_minnodes,
    "snapshot": _cmd_snapshot,
}


def cli_dispatch(argv=None, out=None, err=None) -> int:
    out = sys.stdout if out is None else out
    err = sys.stderr if err is None else err
    try:
        args = _build_parser().parse_args(argv)
        COMMANDS[args.command](args, out)
    except ConfigError as e:
        print(f"config error: {e}", file=err)
        return 1
    except (OSError, ValueError, RuntimeError) as e:
        print(f"error: {e}", file=err)
        return 2
    return 0


def main() -> None:
    sys.exit(cli_dispatch())


if __name__ == "__main__":
    main()
