"""Command-line entry point: ``thermonet <subcommand> ...``.

Exit status: 0 success, 2 usage or contract error, 3 data error, 4 internal
invariant failure. Errors are reported as one JSON line on stderr.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from dataclasses import replace
from pathlib import Path

import numpy as np

from . import classify as cl
from . import ingest, metrics, netmap, preprocess, synth
from .errors import ContractError, DataError, InvariantError, MissingFileError, ThermonetError
from .pipeline import PipelineConfig, analyze_group, resolve_seed
from .series import Stage, TimeSeries, read_csv, write_csv

log = logging.getLogger("thermonet")

CONVENTION = (
    "Edge betweenness B_e is normalized by n(n-1), the number of ordered pairs of "
    "occupied quantile nodes ('ordered-pairs'), so scores lie in [0, 1]. Defaults "
    "q=20 and theta=0.2 are carried over from established thermal-video practice; "
    "0.2 is only meaningful under this normalization and for such data. The frozen "
    f"synthetic regimes separate at theta={synth.SYNTH_THETA}."
)


class _Outputs:
    """Tracks written files so a failed command can remove them."""

    def __init__(self):
        self.paths: list[Path] = []

    def add(self, path) -> Path:
        path = Path(path)
        self.paths.append(path)
        return path

    def discard(self) -> None:
        for p in reversed(self.paths):
            try:
                p.unlink()
            except FileNotFoundError:
                pass


def _json_dump(doc, path) -> Path:
    path = Path(path)
    path.write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n")
    return path


def _positive_int(text):
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text}")
    return v


# -- subcommands ------------------------------------------------------------

def cmd_reduce(args) -> int:
    seq = ingest.load_frames(args.manifest)
    if args.roi:
        seq = ingest.crop(seq, ingest.Roi.parse(args.roi))
    out = Path(args.out)
    if args.reducer == "mean":
        write_csv(ingest.mean_series(seq), out)
        return 0
    series, report = ingest.pc1_series(seq, args.k)
    variance_out = Path(args.variance_out or out.with_suffix(".variance.json"))
    write_csv(series, out)
    _json_dump(report.to_json(), variance_out)
    return 0


def _read_inputs(paths, stage=Stage.RAW_MEAN) -> list[TimeSeries]:
    return [read_csv(p, stage=stage) for p in paths]


def cmd_preprocess(args) -> int:
    series = _read_inputs(args.inputs)
    prepared, reports = [], []
    for s in series:
        p, r = preprocess.prepare(s, args.normalize)
        prepared.append(p)
        reports.append({"label": s.label, "slope": r.slope, "intercept": r.intercept,
                        "residual_mean": r.residual_mean})
    write_csv(preprocess.pool(prepared), args.out)
    if args.report:
        _json_dump({"series": reports, "normalize": args.normalize}, args.report)
    return 0


def cmd_netmap(args) -> int:
    s = read_csv(args.input, stage=Stage.POOLED)
    netmap.write_graph_json(netmap.series_to_network(s, args.q), args.out)
    return 0


def cmd_metrics(args) -> int:
    g = netmap.read_graph_json(args.graph)
    table = metrics.edge_betweenness(g)
    metrics.write_metrics_csv(table, args.out)
    if args.ecdf:
        metrics.write_ecdf_csv(metrics.ecdf(table.values()), args.ecdf)
    if args.nodes:
        metrics.write_node_csv(g, args.nodes)
    return 0


def cmd_classify(args) -> int:
    table = metrics.read_metrics_csv(args.metrics)
    verdict = cl.classify(table, args.theta)
    doc = verdict.to_json()
    if args.out:
        _json_dump(doc, args.out)
    print(json.dumps(doc, sort_keys=True))
    return 0


def cmd_pipeline(args) -> int:
    config = PipelineConfig(q=args.q, theta=args.theta, normalize_mode=args.normalize,
                            output_dir=Path(args.out_dir), seed=args.seed)
    series = _read_inputs(args.inputs)
    result = analyze_group(series, config)
    if not all(0.0 <= v <= 1.0 for v in result.scores.scores.values()):
        raise InvariantError("edge score outside [0, 1]")

    out = config.output_dir
    out.mkdir(parents=True, exist_ok=True)
    written = _Outputs()
    try:
        if args.keep_intermediates:
            for i, p in enumerate(result.prepared):
                write_csv(p, written.add(out / f"normalized_{i:03d}_{p.label}.csv"))
            write_csv(result.pooled, written.add(out / "pooled.csv"))
            _json_dump(
                {"q": result.spec.q, "boundaries": list(result.spec.boundaries),
                 "lo": result.spec.lo, "hi": result.spec.hi},
                written.add(out / "quantiles.json"),
            )
            metrics.write_node_csv(result.network, written.add(out / "nodes.csv"))
        netmap.write_graph_json(result.network, written.add(out / "graph.json"))
        metrics.write_metrics_csv(result.scores, written.add(out / "metrics.csv"))
        metrics.write_ecdf_csv(result.distribution, written.add(out / "ecdf.csv"))
        _json_dump(result.verdict.to_json(), written.add(out / "verdict.json"))
    except BaseException:
        written.discard()
        raise
    print(json.dumps(result.verdict.to_json(), sort_keys=True))
    return 0


def cmd_synth_series(args) -> int:
    seed = resolve_seed(args.seed)
    params = synth.RegimeParams(kind=args.kind, n=args.n, phi=args.phi, sigma=args.sigma,
                                jump_prob=args.jump_prob, jump_scale=args.jump_scale,
                                seed=seed)
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    for s in synth.gen_group(params, args.count, dt=args.dt):
        write_csv(s, out / f"{s.label}.csv")
    return 0


def cmd_synth_video(args) -> int:
    seed = resolve_seed(args.seed)
    signal = synth.gen_series(synth.RegimeParams(kind=args.kind, n=args.frames, seed=seed))
    values = signal.values
    peak = np.max(np.abs(values))
    if peak > 0:
        values = values * (args.amplitude / peak)
    seq = synth.gen_video(args.frames, args.width, args.height, seed, values,
                          args.noise_sigma, fps=args.fps, base=args.base,
                          source_id=f"synthetic-{seed}")
    path = ingest.write_manifest(seq, args.out_dir, fmt=args.format)
    print(json.dumps({"manifest": str(path), "frames": len(seq), "fps": seq.fps,
                      "duration_s": seq.duration}, sort_keys=True))
    return 0


def cmd_compare(args) -> int:
    a = metrics.read_ecdf_csv(args.group_a)
    b = metrics.read_ecdf_csv(args.group_b)
    cmp = cl.compare_groups(a, b)
    doc = cmp.to_json()
    if args.out:
        _json_dump(doc, args.out)
    if args.plot_data:
        xs = np.union1d(a.sorted_values, b.sorted_values)
        with open(args.plot_data, "w") as fh:
            fh.write("value,cumfrac_a,cumfrac_b\n")
            for x, fa, fb in zip(xs, a.evaluate(xs), b.evaluate(xs)):
                fh.write(f"{x:.17g},{fa:.12g},{fb:.12g}\n")
    print(json.dumps(doc, sort_keys=True))
    return 0


def cmd_export_dot(args) -> int:
    g = netmap.read_graph_json(args.graph)
    Path(args.out).write_text(g.to_dot())
    return 0


# -- parser -----------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    fmt = argparse.ArgumentDefaultsHelpFormatter
    parser = argparse.ArgumentParser(
        prog="thermonet",
        description="Frame sequences -> time series -> quantile transition networks -> "
                    "edge-betweenness verdicts.",
        epilog=CONVENTION, formatter_class=fmt)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, func, help_):
        p = sub.add_parser(name, help=help_, description=help_, epilog=CONVENTION,
                           formatter_class=fmt)
        p.set_defaults(func=func)
        return p

    p = add("reduce", cmd_reduce, "Reduce a frame manifest to a time-series CSV.")
    p.add_argument("--manifest", required=True)
    p.add_argument("--roi", help="x0,y0,w,h crop; whole frame when omitted")
    p.add_argument("--reducer", choices=("mean", "pc1"), default="mean")
    p.add_argument("--k", type=_positive_int, default=3, help="components in the variance report")
    p.add_argument("--out", required=True)
    p.add_argument("--variance-out", help="variance JSON for pc1 (default: <out>.variance.json)")

    p = add("preprocess", cmd_preprocess,
            "Baseline, detrend and normalize each series, then pool them in order.")
    p.add_argument("inputs", nargs="+")
    p.add_argument("--normalize", choices=("auto", "std", "none"), default="auto")
    p.add_argument("--out", required=True)
    p.add_argument("--report", help="detrend report JSON")

    p = add("netmap", cmd_netmap, "Map a prepared series onto a quantile transition network.")
    p.add_argument("input")
    p.add_argument("--q", type=int, default=netmap.DEFAULT_Q)
    p.add_argument("--out", required=True)

    p = add("metrics", cmd_metrics, "Edge betweenness (and optional ECDF / node metrics) of a graph.")
    p.add_argument("graph")
    p.add_argument("--out", required=True)
    p.add_argument("--ecdf")
    p.add_argument("--nodes", help="node CSV with degrees and node betweenness")

    p = add("classify", cmd_classify, "Threshold verdict from a metrics CSV.")
    p.add_argument("metrics")
    p.add_argument("--theta", type=float, default=cl.DEFAULT_THETA)
    p.add_argument("--out")

    p = add("pipeline", cmd_pipeline, "Full chain for one group of raw series CSVs.")
    p.add_argument("inputs", nargs="+")
    p.add_argument("--q", type=int, default=netmap.DEFAULT_Q)
    p.add_argument("--theta", type=float, default=cl.DEFAULT_THETA)
    p.add_argument("--normalize", choices=("auto", "std", "none"), default="auto")
    p.add_argument("--out-dir", default="thermonet-out")
    p.add_argument("--keep-intermediates", action="store_true")
    p.add_argument("--seed", type=int, help="recorded only; the pipeline is deterministic")

    p = add("synth", None, "Generate synthetic series or videos.")
    ssub = p.add_subparsers(dest="synth_command", required=True)
    s = ssub.add_parser("series", help="AR(1) series, optionally with level jumps",
                        epilog=CONVENTION, formatter_class=fmt)
    s.set_defaults(func=cmd_synth_series)
    s.add_argument("--kind", choices=("smooth", "jumpy"), default="smooth")
    s.add_argument("--n", type=_positive_int, default=synth.SMOOTH.n)
    s.add_argument("--phi", type=float, default=synth.SMOOTH.phi)
    s.add_argument("--sigma", type=float, default=synth.SMOOTH.sigma)
    s.add_argument("--jump-prob", type=float, default=synth.JUMPY.jump_prob)
    s.add_argument("--jump-scale", type=float, default=synth.JUMPY.jump_scale)
    s.add_argument("--count", type=_positive_int, default=1, help="series with seeds seed..seed+count-1")
    s.add_argument("--dt", type=float, default=1.0)
    s.add_argument("--seed", type=int, help="falls back to $THERMONET_SEED, then 0")
    s.add_argument("--out-dir", default=".")
    v = ssub.add_parser("video", help="rank-one synthetic video with manifest",
                        epilog=CONVENTION, formatter_class=fmt)
    v.set_defaults(func=cmd_synth_video)
    v.add_argument("--frames", type=_positive_int, default=135)
    v.add_argument("--fps", type=float, default=9.0)
    v.add_argument("--width", type=_positive_int, default=32)
    v.add_argument("--height", type=_positive_int, default=24)
    v.add_argument("--kind", choices=("smooth", "jumpy"), default="smooth")
    v.add_argument("--amplitude", type=float, default=500.0, help="peak |signal| in counts")
    v.add_argument("--base", type=float, default=20000.0)
    v.add_argument("--noise-sigma", type=float, default=0.0)
    v.add_argument("--format", choices=ingest.FORMATS, default="pgm16")
    v.add_argument("--seed", type=int, help="falls back to $THERMONET_SEED, then 0")
    v.add_argument("--out-dir", required=True)

    p = add("compare", cmd_compare, "KS distance and plot data for two ECDF CSVs.")
    p.add_argument("group_a")
    p.add_argument("group_b")
    p.add_argument("--out")
    p.add_argument("--plot-data")

    p = add("export-dot", cmd_export_dot, "Convert a graph JSON to Graphviz DOT.")
    p.add_argument("graph")
    p.add_argument("--out", required=True)
    return parser


def _report(code: str, detail: str) -> None:
    print(json.dumps({"error": code, "detail": detail}), file=sys.stderr)


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except ThermonetError as exc:
        _report(exc.code, str(exc))
        return exc.exit_status
    except FileNotFoundError as exc:
        _report(MissingFileError.code, str(exc))
        return MissingFileError.exit_status
    except OSError as exc:
        _report(DataError.code, str(exc))
        return DataError.exit_status
    except ValueError as exc:
        _report(ContractError.code, str(exc))
        return ContractError.exit_status
    except Exception as exc:  # noqa: BLE001
        log.debug("internal failure", exc_info=True)
        _report(InvariantError.code, f"{type(exc).__name__}: {exc}")
        return InvariantError.exit_status


if __name__ == "__main__":
    sys.exit(main())
