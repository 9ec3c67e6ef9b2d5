"""Command-line surface: corpus generation, compression, reports, simulation.

Exit codes: 0 success, 2 validation/parameter problems, 3 file I/O
problems, 4 fidelity search found no solution.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from pathlib import Path

from . import cwmf, memsim
from .codec import (
    CodecConfig,
    compress,
    compression_stats,
    decompress,
    fidelity_aware_compress,
)
from .errors import ValidationError, WfcodecError
from .transform import TransformKind, TransformVariant
from .waveform import (
    IBM_PARAMS,
    build_corpus,
    estimate_bandwidth,
    estimate_capacity,
    load_library,
    mse,
    save_library,
)

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_IO = 3
EXIT_NO_SOLUTION = 4


class NoSolutionError(WfcodecError):
    """Raised internally when the fidelity search fails for an entry."""


def _variant(name: str, window_size: int) -> TransformVariant:
    return TransformVariant(TransformKind(name), window_size)


def cmd_gen_corpus(args) -> int:
    waveforms = build_corpus(
        n_qubits=args.qubits,
        seed=args.seed,
        sample_rate_hz=args.sample_rate,
        connectivity_degree=args.connectivity,
    )
    save_library(args.output, waveforms, meta={"seed": args.seed, "qubits": args.qubits})
    print(f"wrote {len(waveforms)} waveforms to {args.output}")
    return EXIT_OK


def cmd_compress(args) -> int:
    waveforms = load_library(args.input)
    cfg = CodecConfig(
        variant=_variant(args.variant, args.window_size),
        threshold=args.threshold,
        adaptive=args.adaptive,
    )
    entries = []
    for w in waveforms:
        if args.target_error is not None:
            c = fidelity_aware_compress(w, args.target_error, cfg)
            if c is None:
                raise NoSolutionError(
                    f"no threshold meets target error {args.target_error} for '{w.label}'"
                )
        else:
            c = compress(w, cfg)
        entries.append(c)
    cwmf.write_cwmf(args.output, entries)
    widths = max(c.uniform_width for c in entries)
    print(f"wrote {len(entries)} entries to {args.output} (max uniform width {widths})")
    return EXIT_OK


def cmd_decompress(args) -> int:
    entries = cwmf.read_cwmf(args.input, sample_rate_hz=args.sample_rate)
    waveforms = [decompress(c) for c in entries]
    save_library(args.output, waveforms)
    print(f"wrote {len(waveforms)} decompressed waveforms to {args.output}")
    return EXIT_OK


def cmd_report(args) -> int:
    waveforms = {w.label: w for w in load_library(args.input)}
    rate = next(iter(waveforms.values())).sample_rate_hz
    entries = cwmf.read_cwmf(args.compressed, sample_rate_hz=rate)
    labels = {c.label for c in entries}
    if labels != set(waveforms):
        missing = set(waveforms) ^ labels
        raise ValidationError(f"library/compressed label mismatch: {sorted(missing)[:5]}")

    rows = []
    for c in entries:
        w = waveforms[c.label]
        stats = compression_stats(c)
        rows.append(
            {
                "label": c.label,
                "n_samples": c.original_length,
                "windows": c.n_windows_total,
                "uniform_width": stats.uniform_width,
                "r_uniform": stats.r_uniform,
                "r_occupied": stats.r_occupied,
                "r_effective": stats.r_effective,
                "mse": mse(w, decompress(c)),
            }
        )
    hist = memsim.samples_per_window_histogram(entries)
    summary = {
        "entries": len(rows),
        "r_uniform": _min_avg_max(rows, "r_uniform"),
        "r_occupied": _min_avg_max(rows, "r_occupied"),
        "max_mse": max(r["mse"] for r in rows),
        "capacity_bytes_per_qubit": estimate_capacity(IBM_PARAMS),
        "bandwidth_bytes_per_s": estimate_bandwidth(rate, 32),
    }
    report = {"summary": summary, "histogram": {str(k): v for k, v in hist.items()}, "entries": rows}
    Path(args.output).write_text(json.dumps(report, indent=2), encoding="utf-8")
    if args.csv:
        with open(args.csv, "w", newline="") as fh:
            writer = csv.DictWriter(fh, fieldnames=list(rows[0].keys()))
            writer.writeheader()
            writer.writerows(rows)
    print(
        f"report: {len(rows)} entries, R(uniform) min/avg/max ="
        f" {summary['r_uniform']['min']:.2f}/{summary['r_uniform']['avg']:.2f}/"
        f"{summary['r_uniform']['max']:.2f}, worst MSE = {summary['max_mse']:.3e}"
    )
    return EXIT_OK


def _min_avg_max(rows, key):
    vals = [r[key] for r in rows]
    return {"min": min(vals), "avg": sum(vals) / len(vals), "max": max(vals)}


def cmd_simulate(args) -> int:
    entries = cwmf.read_cwmf(args.input)
    by_label = {c.label: c for c in entries}
    if args.label is not None:
        if args.label not in by_label:
            raise ValidationError(f"label '{args.label}' not in {args.input}")
        target = by_label[args.label]
    else:
        target = entries[0]
    cfg = memsim.PipelineConfig(
        fabric_clock_hz=1.0,
        dac_rate_sps=args.ratio,
        window_size=target.window_size,
    )
    if args.adaptive:
        trace, stats = memsim.adaptive_stream(target, cfg)
    else:
        trace = memsim.simulate_stream(target, cfg, banks=args.banks)
        stats = memsim.access_stats(trace)
    if args.trace:
        memsim.trace_to_csv(trace, args.trace)
    if args.stats:
        memsim.stats_to_json(stats, args.stats)
    print(
        f"streamed '{target.label}': {trace.samples_streamed} samples,"
        f" {trace.underrun_count} underruns, {stats.memory_accesses} accesses,"
        f" {stats.idct_invocations} transform calls"
    )
    return EXIT_OK


def cmd_sweep(args) -> int:
    ratios = [float(r) for r in args.ratios.split(",")]
    window_sizes = [int(w) for w in args.window_sizes.split(",")]
    widths = [int(w) for w in args.widths.split(",")]
    rows = []
    for ratio in ratios:
        for ws in window_sizes:
            cfg = memsim.PipelineConfig(1.0, ratio, window_size=ws)
            for width in widths:
                gain = memsim.qubit_capacity_gain(cfg, width)
                stream = memsim.make_synthetic_stream(args.n_windows, width, ws)
                plan = memsim.plan_banks(stream, cfg)
                ok = memsim.simulate_stream(stream, cfg)
                starved = (
                    memsim.simulate_stream(stream, cfg, banks=plan.banks_per_channel - 1)
                    if plan.banks_per_channel > 1
                    else None
                )
                rows.append(
                    {
                        "ratio": ratio,
                        "window_size": ws,
                        "uniform_width": width,
                        "banks_uncompressed": memsim.plan_banks(args.n_windows * ws, cfg).banks_per_channel,
                        "banks_compressed": plan.banks_per_channel,
                        "gain": float(gain),
                        "gain_exact": str(gain),
                        "underruns_at_plan": ok.underrun_count,
                        "underruns_below_plan": starved.underrun_count if starved else "",
                    }
                )
    with open(args.output, "w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=list(rows[0].keys()))
        writer.writeheader()
        writer.writerows(rows)
    print(f"wrote {len(rows)} sweep rows to {args.output}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="wfcodec",
        description="Waveform compression and control-memory pipeline modeling",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen-corpus", help="write a synthetic waveform library")
    p.add_argument("--output", required=True)
    p.add_argument("--qubits", type=int, default=16)
    p.add_argument("--seed", type=int, default=11)
    p.add_argument("--sample-rate", type=float, default=4.54e9)
    p.add_argument("--connectivity", type=int, default=2)
    p.set_defaults(func=cmd_gen_corpus)

    p = sub.add_parser("compress", help="compress a waveform library to CWMF")
    p.add_argument("--input", required=True)
    p.add_argument("--output", required=True)
    p.add_argument("--variant", choices=[k.value for k in TransformKind], default="int-dct-w")
    p.add_argument("--window-size", type=int, choices=[8, 16], default=16)
    p.add_argument("--threshold", type=float, default=0.0)
    p.add_argument("--target-error", type=float, default=None)
    p.add_argument("--adaptive", action="store_true")
    p.set_defaults(func=cmd_compress)

    p = sub.add_parser("decompress", help="decompress a CWMF library to JSON")
    p.add_argument("--input", required=True)
    p.add_argument("--output", required=True)
    p.add_argument("--sample-rate", type=float, default=1.0)
    p.set_defaults(func=cmd_decompress)

    p = sub.add_parser("report", help="per-waveform ratios, errors, and summaries")
    p.add_argument("--input", required=True, help="original waveform library (JSON)")
    p.add_argument("--compressed", required=True, help="compressed library (CWMF)")
    p.add_argument("--output", required=True, help="report JSON path")
    p.add_argument("--csv", default=None, help="optional plot-ready CSV path")
    p.set_defaults(func=cmd_report)

    p = sub.add_parser("simulate", help="stream one compressed entry through the pipeline")
    p.add_argument("--input", required=True)
    p.add_argument("--label", default=None)
    p.add_argument("--ratio", type=float, default=16.0)
    p.add_argument("--banks", type=int, default=None)
    p.add_argument("--adaptive", action="store_true")
    p.add_argument("--trace", default=None, help="trace CSV path")
    p.add_argument("--stats", default=None, help="stats JSON path")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("sweep", help="gain/underrun grid over ratio, window size, width")
    p.add_argument("--output", required=True)
    p.add_argument("--ratios", default="6,8,16")
    p.add_argument("--window-sizes", default="8,16")
    p.add_argument("--widths", default="1,2,3,4")
    p.add_argument("--n-windows", type=int, default=64)
    p.set_defaults(func=cmd_sweep)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except NoSolutionError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NO_SOLUTION
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except WfcodecError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION


if __name__ == "__main__":
    sys.exit(main())
