"""Command-line surface: calibrate, monitor, transport, adapt-toy, risk-curve,
simulate.

All file formats are line-oriented text so the tool composes with shell
pipelines and external training loops: one decimal value per line in, one JSON
object per line (or CSV) out.  Floats in output files carry 17 significant
digits, so a run with a fixed seed replays byte-identically; the run report on
stdout additionally carries wall-clock time and is not part of the replayable
artifacts.

Exit codes: 0 completed without an alarm, 2 completed and the Ville alarm
fired, 1 error.
"""

import argparse
import json
import sys
import time

import numpy as np

from .ecdf import EmpiricalCdf
from .engine import EngineConfig, write_records
from .presets import get_preset, run_preset
from .streamgen import GeneratedStream, Segment, StreamSpec, generate
from .toy_model import GaussianScenario, risk_curve

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_ALARM = 2


class CliError(Exception):
    """User-facing failure: message printed to stderr, exit code 1."""


def _fmt(x):
    return format(float(x), ".17g")


def read_values(source):
    """Read one decimal value per line from a path or '-' (stdin).

    Blank lines are skipped; a non-numeric token raises with its line number.
    """
    if source == "-":
        lines = sys.stdin.readlines()
        label = "<stdin>"
    else:
        try:
            with open(source, "r", encoding="ascii") as fh:
                lines = fh.readlines()
        except OSError as exc:
            raise CliError(f"cannot read {source}: {exc}") from exc
        label = source
    values = []
    for lineno, line in enumerate(lines, start=1):
        token = line.strip()
        if not token:
            continue
        try:
            values.append(float(token))
        except ValueError:
            raise CliError(f"{label}:{lineno}: not a number: {token!r}") from None
    return np.asarray(values, dtype=float)


def read_config_file(path):
    """Parse a 'key = value' config file; '#' starts a comment."""
    mapping = {}
    try:
        with open(path, "r", encoding="ascii") as fh:
            for lineno, line in enumerate(fh, start=1):
                stripped = line.split("#", 1)[0].strip()
                if not stripped:
                    continue
                if "=" not in stripped:
                    raise CliError(f"{path}:{lineno}: expected 'key = value', got {stripped!r}")
                key, _, value = stripped.partition("=")
                mapping[key.strip()] = value.strip()
    except OSError as exc:
        raise CliError(f"cannot read {path}: {exc}") from exc
    return mapping


def load_engine_settings(args, mode):
    """EngineConfig from config file plus flag overrides, and the config seed."""
    mapping = read_config_file(args.config) if getattr(args, "config", None) else {}
    seed = int(mapping.pop("seed", 0))
    try:
        config = EngineConfig.from_mapping(mapping)
    except ValueError as exc:
        raise CliError(str(exc)) from exc
    overrides = {"mode": mode}
    if getattr(args, "alpha", None) is not None:
        overrides["alpha"] = args.alpha
    if getattr(args, "eta", None) is not None:
        overrides["eta"] = args.eta
    if getattr(args, "lambda_threshold", None) is not None:
        overrides["lambda_threshold"] = args.lambda_threshold
    return config, overrides, seed


def print_report(**fields):
    print(json.dumps(fields))


def _mean_loss(records):
    losses = [r.loss for r in records if r.loss is not None]
    return float(np.mean(losses)) if losses else None


def cmd_calibrate(args):
    values = read_values(args.source)
    if values.size < 2:
        raise CliError(f"calibration needs at least 2 samples, got {values.size}")
    cdf = EmpiricalCdf().fit(values)
    cdf.save(args.out)
    print(f"calibrated n={cdf.n_samples_} "
          f"entropy range=[{cdf.knots_[0]:.6g}, {cdf.knots_[-1]:.6g}] -> {args.out}")
    return EXIT_OK


def _run_stream_engine(args, mode):
    config, overrides, _ = load_engine_settings(args, mode)
    cdf = EmpiricalCdf.load(args.artifact)
    engine = config.build_engine(**overrides).fit(cdf.knots_)
    stream = read_values(args.stream)
    start = time.perf_counter()
    records = engine.run(stream)
    elapsed = time.perf_counter() - start
    return engine, records, elapsed


def cmd_monitor(args):
    engine, records, elapsed = _run_stream_engine(args, "monitor-only")
    if args.out:
        with open(args.out, "w", encoding="ascii") as fh:
            write_records(records, fh)
    print_report(
        mode="monitor-only",
        n_steps=len(records),
        final_epsilon=engine.betting_state_.epsilon,
        max_log_wealth=engine.betting_state_.max_log_wealth,
        alarm_step=engine.alarm_step_,
        wall_clock_s=round(elapsed, 6),
    )
    return EXIT_ALARM if engine.alarm_step_ is not None else EXIT_OK


def cmd_transport(args):
    engine, records, elapsed = _run_stream_engine(args, "transport-only")
    with open(args.out, "w", encoding="ascii") as fh:
        for record in records:
            fh.write(_fmt(record.z_tilde))
            fh.write("\n")
    if args.trace:
        with open(args.trace, "w", encoding="ascii") as fh:
            write_records(records, fh)
    print_report(
        mode="transport-only",
        n_steps=len(records),
        final_epsilon=engine.betting_state_.epsilon,
        max_log_wealth=engine.betting_state_.max_log_wealth,
        alarm_step=engine.alarm_step_,
        wall_clock_s=round(elapsed, 6),
    )
    return EXIT_ALARM if engine.alarm_step_ is not None else EXIT_OK


def cmd_adapt_toy(args):
    try:
        preset = get_preset(args.preset)
    except ValueError as exc:
        raise CliError(str(exc)) from exc
    overrides = {}
    if args.eta is not None:
        overrides["eta"] = args.eta
    if args.alpha is not None:
        overrides["alpha"] = args.alpha
    if args.steps is not None:
        overrides["stream_length"] = args.steps
    start = time.perf_counter()
    result = run_preset(preset, seed=args.seed, **overrides)
    elapsed = time.perf_counter() - start
    if args.out:
        with open(args.out, "w", encoding="ascii") as fh:
            write_records(result.records, fh)
    last = result.records[-1]
    print_report(
        preset=preset.name,
        seed=args.seed,
        n_steps=len(result.records),
        final_omega=result.final_model.omega,
        final_epsilon=last.epsilon,
        max_log_wealth=max(r.log_wealth for r in result.records),
        alarm_step=result.alarm_step,
        mean_loss=_mean_loss(result.records),
        accuracy=result.accuracy,
        wall_clock_s=round(elapsed, 6),
    )
    return EXIT_ALARM if result.alarm_step is not None else EXIT_OK


def cmd_risk_curve(args):
    grid = np.arange(args.grid_min, args.grid_max + 0.5 * args.grid_step, args.grid_step)
    scenario = GaussianScenario(shift=args.shift, n_per_class=args.n_per_class,
                                seed=args.seed)
    entropy_rows = risk_curve(scenario, grid, "entropy")
    match_rows = risk_curve(scenario, grid, "match-oracle")
    with open(args.out, "w", encoding="ascii") as fh:
        fh.write("omega,entropy_risk,match_risk\n")
        for (omega, ent), (_, match) in zip(entropy_rows, match_rows):
            fh.write(f"{_fmt(omega)},{_fmt(ent)},{_fmt(match)}\n")
    print(f"risk curve over {grid.size} grid points -> {args.out}")
    return EXIT_OK


def parse_segment(text):
    """Segment from 'length=1000,shift=0.5' or 'length=500,a=2,b=1'."""
    fields = {}
    for part in text.split(","):
        if "=" not in part:
            raise CliError(f"segment field {part!r} must look like key=value")
        key, _, value = part.partition("=")
        fields[key.strip()] = value.strip()
    if "length" not in fields:
        raise CliError(f"segment {text!r} needs a length")
    length = fields.pop("length")
    shift = fields.pop("shift", 0.0)
    beta_a = fields.pop("a", 1.0)
    beta_b = fields.pop("b", 1.0)
    if fields:
        raise CliError(f"unknown segment fields: {sorted(fields)}")
    try:
        return Segment(length=int(length), shift=float(shift),
                       beta_a=float(beta_a), beta_b=float(beta_b))
    except ValueError as exc:
        raise CliError(f"bad segment {text!r}: {exc}") from exc


def cmd_simulate(args):
    segments = [parse_segment(text) for text in args.segment]
    try:
        spec = StreamSpec(kind=args.kind, segments=tuple(segments), seed=args.seed)
    except ValueError as exc:
        raise CliError(str(exc)) from exc
    stream: GeneratedStream = generate(spec)
    with open(args.out, "w", encoding="ascii") as fh:
        for value in stream.values:
            fh.write(_fmt(value))
            fh.write("\n")
    if args.labels_out:
        if stream.labels is None:
            raise CliError(f"kind {args.kind!r} produces no labels")
        with open(args.labels_out, "w", encoding="ascii") as fh:
            for label in stream.labels:
                fh.write(f"{int(label)}\n")
    print(f"wrote {stream.values.size} values -> {args.out}")
    return EXIT_OK


def build_parser():
    parser = argparse.ArgumentParser(
        prog="entmatch",
        description="Drift detection on entropy streams by betting martingales, "
                    "with quantile transport back to the source distribution.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("calibrate", help="build the source-entropy CDF artifact")
    p.add_argument("--source", required=True, help="entropy file, one value per line")
    p.add_argument("--out", required=True, help="artifact path")
    p.set_defaults(func=cmd_calibrate)

    for name, helptext in (("monitor", "run drift monitoring over an entropy stream"),
                           ("transport", "write pseudo-entropy targets for a stream")):
        p = sub.add_parser(name, help=helptext)
        p.add_argument("--artifact", required=True, help="calibrated CDF artifact")
        p.add_argument("--stream", required=True, help="entropy stream file or '-'")
        p.add_argument("--config", help="key = value engine config file")
        p.add_argument("--alpha", type=float, help="Ville alarm level")
        p.add_argument("--eta", type=float, help=argparse.SUPPRESS)
        p.add_argument("--lambda", dest="lambda_threshold", type=float,
                       help=argparse.SUPPRESS)
        if name == "monitor":
            p.add_argument("--out", help="step-record JSONL sink")
            p.set_defaults(func=cmd_monitor)
        else:
            p.add_argument("--out", required=True, help="pseudo-entropy sink")
            p.add_argument("--trace", help="optional step-record JSONL sink")
            p.set_defaults(func=cmd_transport)

    p = sub.add_parser("adapt-toy", help="reproduce the toy adaptation experiments")
    p.add_argument("--preset", required=True,
                   help="fig1-indist or fig1-shift")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--eta", type=float, help="override the preset learning rate")
    p.add_argument("--alpha", type=float, help="override the alarm level")
    p.add_argument("--steps", type=int, help="override the stream length")
    p.add_argument("--out", help="step-record JSONL sink")
    p.set_defaults(func=cmd_adapt_toy)

    p = sub.add_parser("risk-curve", help="entropy vs match risk over a boundary grid")
    p.add_argument("--shift", type=float, required=True)
    p.add_argument("--out", required=True, help="CSV sink")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--n-per-class", type=int, default=10000)
    p.add_argument("--grid-min", type=float, default=-3.0)
    p.add_argument("--grid-max", type=float, default=4.0)
    p.add_argument("--grid-step", type=float, default=0.05)
    p.set_defaults(func=cmd_risk_curve)

    p = sub.add_parser("simulate", help="write a deterministic synthetic stream")
    p.add_argument("--kind", required=True,
                   choices=["uniform-null", "gaussian-toy", "entropy-direct"])
    p.add_argument("--segment", action="append", required=True,
                   help="e.g. length=1000,shift=0 (repeatable)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.add_argument("--labels-out", help="label sidecar (gaussian kinds)")
    p.set_defaults(func=cmd_simulate)

    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except CliError as exc:
        print(f"entmatch: {exc}", file=sys.stderr)
        return EXIT_ERROR
    except (OSError, ValueError) as exc:
        print(f"entmatch: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
