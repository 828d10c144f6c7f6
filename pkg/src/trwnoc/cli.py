"""Command-line experiment runner.

Exit codes: 0 success, 2 configuration error, 3 runtime error.
"""

import argparse
import os
import sys
from dataclasses import replace

from .channel import ChannelImpulseResponse, export_cir_trace, import_cir_trace, rms_delay_spread
from .exceptions import ConfigError, TrwnocError
from .experiments import (
    ExperimentKind,
    ExperimentSpec,
    ResultsTable,
    build_channel,
    parse_config,
    run_experiment,
)
from .plotting import emit_plot
from .trcore import build_tr_filter, temporal_focusing_gain

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_RUNTIME = 3

_EXPERIMENT_COMMANDS = {
    "sweep-rate": ExperimentKind.SWEEP_RATE,
    "sweep-snr": ExperimentKind.SWEEP_SNR,
    "spatial-map": ExperimentKind.SPATIAL_MAP,
    "temporal-focus": ExperimentKind.TEMPORAL_FOCUS,
    "interference-probe": ExperimentKind.INTERFERENCE_PROBE,
}


def _common(p):
    p.add_argument("--config", help="experiment spec file (section.key = value lines)")
    p.add_argument("--seed", type=int, help="master seed (overrides the config)")
    p.add_argument("--out", help="output directory (overrides the config)")
    p.add_argument("--bits", type=int, help="bits per Monte-Carlo trial (overrides the config)")
    p.add_argument("--no-plot", action="store_true", help="skip SVG rendering")


def build_parser():
    # argparse exits with 2 on bad usage, which matches EXIT_CONFIG
    parser = argparse.ArgumentParser(prog="trwnoc",
                     description="Time-reversal link simulator for in-package wireless channels.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("synth-channel", help="synthesize the tx->rx cavity CIR")
    _common(p)
    p = sub.add_parser("import-cir", help="load a CIR trace and export its TR filter")
    p.add_argument("trace", help="time_s,real,imag CSV")
    p.add_argument("--format", default="csv")
    _common(p)
    for name, kind in _EXPERIMENT_COMMANDS.items():
        p = sub.add_parser(name, help=f"run the {kind.value.replace('_', ' ')} experiment")
        _common(p)
    p = sub.add_parser("plot", help="render a results CSV to SVG")
    p.add_argument("table", help="results CSV written by one of the experiments")
    p.add_argument("--kind", default="auto")
    p.add_argument("--out", help="output SVG path (default: next to the CSV)")
    return parser


def _load_spec(args):
    spec = parse_config(args.config) if args.config else ExperimentSpec()
    changes = {}
    if args.seed is not None:
        if args.seed < 0 or args.seed >= 2 ** 64:
            raise ConfigError("seed must be an unsigned 64-bit integer", key="--seed")
        changes["master_seed"] = args.seed
    if args.bits is not None:
        if args.bits < 1:
            raise ConfigError("bits must be >= 1", key="--bits")
        changes["n_bits"] = args.bits
    if args.out is not None:
        changes["output_dir"] = args.out
    return replace(spec, **changes) if changes else spec


def _outdir(spec):
    os.makedirs(spec.output_dir, exist_ok=True)
    return spec.output_dir


def _write(table, outdir, plot, kind="auto"):
    path = os.path.join(outdir, f"{table.name}.csv")
    table.write_csv(path)
    print(f"wrote {path}")
    if plot:
        svg = emit_plot(table, kind, os.path.join(outdir, f"{table.name}.svg"))
        print(f"wrote {svg}")


def _cmd_synth(args):
    spec = _load_spec(args)
    cir = build_channel(spec)
    outdir = _outdir(spec)
    path = os.path.join(outdir, "cir.csv")
    export_cir_trace(cir, path)
    print(f"wrote {path}")
    print(f"taps={len(cir.taps)} samples={len(cir)} sample_rate_hz={cir.sample_rate!r} "
          f"rms_delay_spread_s={rms_delay_spread(cir)!r} "
          f"focusing_gain_db={temporal_focusing_gain(cir)!r}")


def _cmd_import(args):
    spec = _load_spec(args)
    cir = import_cir_trace(args.trace, format=args.format)
    flt = build_tr_filter(cir)
    outdir = _outdir(spec)
    path = os.path.join(outdir, "tr_filter.csv")
    export_cir_trace(ChannelImpulseResponse(flt.coefficients, flt.sample_rate), path)
    print(f"wrote {path}")
    print(f"samples={len(cir)} sample_rate_hz={cir.sample_rate!r} "
          f"rms_delay_spread_s={rms_delay_spread(cir)!r} "
          f"focusing_gain_db={temporal_focusing_gain(cir)!r}")


def _cmd_experiment(args):
    spec = _load_spec(args)
    kind = _EXPERIMENT_COMMANDS[args.command]
    table = run_experiment(spec, kind)
    outdir = _outdir(spec)
    _write(table, outdir, not args.no_plot)
    summary = table.extras.get("summary")
    if summary is not None:
        _write(summary, outdir, plot=False)
    if "suppression_db" in table.extras:
        print(f"suppression_db={table.extras['suppression_db']!r}")


def _cmd_plot(args):
    table = ResultsTable.read_csv(args.table)
    out = args.out or os.path.splitext(args.table)[0] + ".svg"
    emit_plot(table, args.kind, out)
    print(f"wrote {out}")


def main(argv=None):
    args = build_parser().parse_args(argv)
    handler = {"synth-channel": _cmd_synth, "import-cir": _cmd_import,
               "plot": _cmd_plot}.get(args.command, _cmd_experiment)
    try:
        handler(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (TrwnocError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
