"""Command-line interface to the toolkit.

Subcommands mirror the library pipeline: ``ingest`` raw CSV into a
normalized dataset, ``estimate`` a conditional PDF bank, ``optimize`` a
carriage-aware detector, sweep ``det`` and ``fdr`` curves, ``sweep`` look
configurations against an FDR budget, and ``simulate`` scan-timing windows.

Every run writes its primary outputs (CSV, JSON, optional SVG) plus a
``*.config.json`` sidecar recording the resolved configuration and toolkit
version. Outputs are deterministic: rerunning with the same inputs, seed,
and configuration reproduces byte-identical files at any ``--threads``.

Options may also come from a JSON config file (``--config``); explicit
command-line flags win over the file, which wins over built-in defaults.
Boolean switches can only be set on the command line.

Exit codes: 0 success; 1 input/validation failure; 2 configuration,
parameter, or coverage error; 3 optimization target infeasible.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

from . import __version__, svgplot
from .densities import ConditionalPdfBank, ContactDensity, HypothesisPdfs
from .detectors import MofNDetector, minimax_select
from .errors import (
    ConfigurationError,
    CoverageError,
    EstimationError,
    InfeasibleError,
    ParameterError,
    RowError,
    SchemaError,
)
from .evaluation import (
    CarriagePrior,
    DetMode,
    det_curve,
    fdr_curve,
    look_sweep,
)
from .measurements import (
    CarriagePair,
    Dataset,
    bulk_deltas_from_json,
    estimate_bulk_deltas,
    extend_range,
    ingest_csv,
    normalize_tx,
    synthesize_pose,
    write_csv,
)
from .scansim import (
    Correlation,
    RecordingPolicy,
    SamplingModel,
    ScanModel,
    censor_sensitivity,
    simulate_windows,
)


def _load_json(path: str):
    with open(path, encoding="utf-8") as fh:
        return json.load(fh)


def _write_json(path: str, obj) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(obj, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _write_csv_rows(path: str, header: list[str], rows: list[list]) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(_cell(v) for v in row) + "\n")


def _cell(v) -> str:
    if v is None:
        return ""
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return f"{v:.12g}"
    return str(v)


def _write_sidecar(base: str, command: str, params: dict) -> None:
    _write_json(
        base + ".config.json",
        {"command": command, "version": __version__, "parameters": params},
    )


def _resolved_params(args: argparse.Namespace) -> dict:
    skip = {"func", "command", "config"}
    out = {}
    for key, value in sorted(vars(args).items()):
        if key in skip:
            continue
        out[key] = value
    return out


def _load_bank(path: str) -> ConditionalPdfBank:
    return ConditionalPdfBank.from_json_dict(_load_json(path))


def _select_pairs(bank: ConditionalPdfBank, arg: str | None) -> list[CarriagePair]:
    if not arg:
        return list(bank.pairs())
    return [CarriagePair.parse(part) for part in arg.split(",") if part.strip()]


def _load_prior(arg: str | None, pairs: list[CarriagePair]) -> CarriagePrior:
    if arg is None or arg == "uniform":
        return CarriagePrior.uniform(pairs)
    return CarriagePrior.from_dict(_load_json(arg))


def _load_density(arg: str | None) -> ContactDensity:
    if arg is None or arg == "uniform_area":
        return ContactDensity.uniform_area()
    table = _load_json(arg)
    return ContactDensity.from_table([(float(s), float(w)) for s, w in table])


def _sampling_from_args(args: argparse.Namespace) -> SamplingModel | None:
    if args.policy is None:
        if getattr(args, "samples_per_scan", None) or getattr(args, "correlation", None):
            raise ConfigurationError("--samples-per-scan/--correlation require --policy")
        return None
    correlation = Correlation(args.correlation) if args.correlation else Correlation.WITHIN_SCAN_CORRELATED
    return SamplingModel(
        policy=RecordingPolicy(args.policy),
        samples_per_scan=args.samples_per_scan,
        correlation=correlation,
    )


def _hypotheses(
    bank: ConditionalPdfBank,
    pairs: list[CarriagePair],
    density: ContactDensity,
    args: argparse.Namespace,
) -> dict[CarriagePair, HypothesisPdfs]:
    return {
        c: HypothesisPdfs.from_bank(
            bank, c, density,
            boundary=args.boundary, max_range=args.max_range, max_gap=args.max_gap,
        )
        for c in pairs
    }


# --------------------------------------------------------------------------
# Subcommands
# --------------------------------------------------------------------------


def cmd_ingest(args: argparse.Namespace) -> int:
    schema = _load_json(args.schema) if args.schema else None
    dataset = ingest_csv(
        args.input,
        schema,
        strict=args.strict,
        censor=not args.no_censor,
        sensitivity_floor=args.sensitivity_floor,
    )
    if args.reference_tx is not None:
        dataset = normalize_tx(dataset, args.reference_tx)

    deltas = None
    if args.bulk_deltas:
        with open(args.bulk_deltas, encoding="utf-8") as fh:
            deltas = bulk_deltas_from_json(fh.read())
    elif args.estimate_deltas:
        deltas = {}
        for state in sorted({s.carriage.user2 for s in dataset}, key=lambda c: c.label()):
            for angle, value in estimate_bulk_deltas(dataset, state).items():
                deltas[(state, angle)] = value
    if deltas is not None:
        dataset = synthesize_pose(dataset, deltas)

    if args.extend_to:
        for target in args.extend_to:
            base = args.extend_base if args.extend_base is not None else max(dataset.distances())
            dataset = extend_range(dataset, base, target, args.path_loss_exponent)

    write_csv(dataset, args.out)
    _write_sidecar(os.path.splitext(args.out)[0], "ingest", _resolved_params(args))
    print(f"wrote {len(dataset)} samples to {args.out}")
    return 0


def cmd_estimate(args: argparse.Namespace) -> int:
    dataset = ingest_csv(args.dataset)
    support = tuple(args.support) if args.support else None
    bank = ConditionalPdfBank.from_dataset(
        dataset, support=support, floor=args.floor, stratify=not args.no_strata
    )
    _write_json(args.out, bank.to_json_dict())
    _write_sidecar(os.path.splitext(args.out)[0], "estimate", _resolved_params(args))
    n_cells = sum(1 for _ in bank.cells())
    print(f"wrote {n_cells} cells ({len(bank.pairs())} carriage pairs) to {args.out}")
    return 0


def cmd_optimize(args: argparse.Namespace) -> int:
    bank = _load_bank(args.bank)
    pairs = _select_pairs(bank, args.pairs)
    density = _load_density(args.density)
    hyps = _hypotheses(bank, pairs, density, args)
    detector = minimax_select(hyps, args.n, args.target_pd)
    _write_json(args.out, detector.to_dict())
    _write_sidecar(os.path.splitext(args.out)[0], "optimize", _resolved_params(args))
    offsets = ", ".join(f"{c.label()}:{o:+d}" for c, o in (detector.offsets or ()))
    print(f"tau={detector.tau} m={detector.m} n={detector.n} offsets[{offsets}] -> {args.out}")
    return 0


def _curve_base(args: argparse.Namespace, kind: str, mode: DetMode) -> str:
    name = args.name or f"{kind}_{mode.value}_n{args.n}"
    os.makedirs(args.out_dir, exist_ok=True)
    return os.path.join(args.out_dir, name)


def cmd_det(args: argparse.Namespace) -> int:
    bank = _load_bank(args.bank)
    pairs = _select_pairs(bank, args.pairs)
    density = _load_density(args.density)
    prior = _load_prior(args.prior, pairs)
    mode = DetMode(args.mode)
    sampling = _sampling_from_args(args)
    hyps = _hypotheses(bank, pairs, density, args)
    curve = det_curve(
        hyps, args.n, mode, sampling,
        prior=prior, trials=args.trials, seed=args.seed, threads=args.threads,
        pfa_bucket=args.pfa_bucket,
    )
    base = _curve_base(args, "det", mode)
    _write_csv_rows(
        base + ".csv",
        ["p_fa", "p_d", "tau", "m"],
        [[pt.p_fa, pt.p_d, pt.tau, pt.m] for pt in curve.points],
    )
    _write_json(base + ".json", curve.to_dict())
    if args.svg:
        svgplot.render_curves(
            base + ".svg",
            [(f"{mode.value} n={args.n}", [pt.p_fa for pt in curve.points], [pt.p_d for pt in curve.points])],
            title="Detection error tradeoff",
            xlabel="probability of false alarm",
            ylabel="probability of detection",
            diagonal=True,
        )
    _write_sidecar(base, "det", _resolved_params(args))
    print(f"{len(curve.points)} operating points -> {base}.csv")
    return 0


def cmd_fdr(args: argparse.Namespace) -> int:
    bank = _load_bank(args.bank)
    pairs = _select_pairs(bank, args.pairs)
    density = _load_density(args.density)
    prior = _load_prior(args.prior, pairs)
    mode = DetMode(args.mode)
    sampling = _sampling_from_args(args)
    curve = fdr_curve(
        bank, density, prior, args.n, mode, sampling,
        boundary=args.boundary, max_range=args.max_range, max_gap=args.max_gap,
        trials=args.trials, seed=args.seed, threads=args.threads,
    )
    base = _curve_base(args, "fdr", mode)
    _write_csv_rows(
        base + ".csv",
        ["p_d", "fdr", "tau", "m"],
        [[pt.p_d, pt.fdr, pt.detector.tau, pt.detector.m] for pt in curve.points],
    )
    _write_json(base + ".json", curve.to_dict())
    if args.svg:
        svgplot.render_curves(
            base + ".svg",
            [(f"{mode.value} n={args.n}", [pt.p_d for pt in curve.points], [pt.fdr for pt in curve.points])],
            title="False-discovery rate",
            xlabel="overall probability of detection",
            ylabel="false-discovery rate",
        )
    _write_sidecar(base, "fdr", _resolved_params(args))
    print(f"{len(curve.points)} operating points -> {base}.csv")
    return 0


def _parse_configs(text: str) -> list[tuple[int, int]]:
    configs = []
    for part in text.split(","):
        part = part.strip()
        if not part:
            continue
        try:
            scans, spp = part.lower().split("x")
            configs.append((int(scans), int(spp)))
        except ValueError:
            raise ConfigurationError(
                f"look configuration {part!r} must look like '6x1' (scans x samples-per-scan)"
            ) from None
    if not configs:
        raise ConfigurationError("no look configurations given")
    return configs


def cmd_sweep(args: argparse.Namespace) -> int:
    bank = _load_bank(args.bank)
    pairs = _select_pairs(bank, args.pairs)
    density = _load_density(args.density)
    prior = _load_prior(args.prior, pairs)
    mode = DetMode(args.mode)
    configs = _parse_configs(args.looks)
    results = look_sweep(
        bank, density, prior, configs, args.fdr_target, mode,
        boundary=args.boundary, max_range=args.max_range, max_gap=args.max_gap,
        trials=args.trials, seed=args.seed, threads=args.threads,
    )
    os.makedirs(args.out_dir, exist_ok=True)
    base = os.path.join(args.out_dir, args.name or f"sweep_{mode.value}")
    _write_csv_rows(
        base + ".csv",
        ["n_scans", "samples_per_scan", "n_looks", "p_d", "feasible"],
        [[r.n_scans, r.samples_per_scan, r.n_looks, r.p_d, r.feasible] for r in results],
    )
    _write_sidecar(base, "sweep", _resolved_params(args))
    for r in results:
        if not r.feasible:
            print(
                f"warning: {r.n_scans}x{r.samples_per_scan} cannot reach "
                f"FDR <= {args.fdr_target:g}",
                file=sys.stderr,
            )
    print(f"{len(results)} configurations -> {base}.csv")
    return 0


def cmd_simulate(args: argparse.Namespace) -> int:
    bank = _load_bank(args.bank)
    carriage = CarriagePair.parse(args.carriage)
    model = ScanModel(
        chirp_rate_hz=args.chirp_rate,
        scan_duration_s=args.scan_duration,
        scan_interval_s=args.scan_interval,
        scans_per_window=args.scans,
        window_s=args.window,
    )
    sampling = SamplingModel(
        policy=RecordingPolicy(args.policy),
        samples_per_scan=args.samples_per_scan,
        correlation=Correlation(args.correlation)
        if args.correlation
        else Correlation.WITHIN_SCAN_CORRELATED,
    )
    values = simulate_windows(
        model, sampling, bank, args.distance, carriage, args.seed, args.windows
    )
    rows = []
    for w in range(values.shape[0]):
        window = values[w]
        if args.censor:
            window = censor_sensitivity(window, args.sensitivity_floor)
        for look, rssi in enumerate(window):
            rows.append([w, look, int(rssi)])
    os.makedirs(args.out_dir, exist_ok=True)
    base = os.path.join(args.out_dir, args.name or f"simulate_{sampling.policy.value}")
    _write_csv_rows(base + ".csv", ["window", "look", "rssi"], rows)
    _write_sidecar(base, "simulate", _resolved_params(args))
    print(f"{values.shape[0]} windows ({len(rows)} looks) -> {base}.csv")
    return 0


# --------------------------------------------------------------------------
# Parser plumbing
# --------------------------------------------------------------------------


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="JSON file of option defaults (flags win)")
    p.add_argument("--seed", type=int, default=None, help="RNG seed (default 0)")
    p.add_argument("--threads", type=int, default=None, help="worker threads (default 1)")


def _add_curve_common(p: argparse.ArgumentParser) -> None:
    _add_common(p)
    p.add_argument("--bank", required=True, help="PDF bank JSON from 'estimate'")
    p.add_argument("--pairs", default=None, help="comma-separated carriage pair labels (default: all)")
    p.add_argument("--density", default=None, help="'uniform_area' or JSON [[s, weight], ...]")
    p.add_argument("--prior", default=None, help="'uniform' or JSON {pair label: weight}")
    p.add_argument("--n", type=int, default=None, help="looks per window (default 6)")
    p.add_argument("--mode", default=None, choices=[m.value for m in DetMode], help="sweep mode")
    p.add_argument("--boundary", type=float, default=None, help="too-close boundary, ft (default 6)")
    p.add_argument("--max-range", type=float, default=None, help="far-hypothesis limit, ft (default 30)")
    p.add_argument("--max-gap", type=float, default=None, help="largest tolerated range-grid hole, ft")
    p.add_argument("--trials", type=int, default=None, help="Monte Carlo windows (default 20000)")
    p.add_argument("--policy", default=None, choices=[p.value for p in RecordingPolicy],
                   help="recording policy (omit for ideal independent looks)")
    p.add_argument("--samples-per-scan", type=int, default=None, help="looks recorded per scan (all_chirps)")
    p.add_argument("--correlation", default=None, choices=[c.value for c in Correlation],
                   help="within-scan correlation structure")
    p.add_argument("--out-dir", default=None, help="output directory (default '.')")
    p.add_argument("--name", default=None, help="output basename override")
    p.add_argument("--svg", action="store_true", help="also render an SVG plot")


_DEFAULTS = {
    "seed": 0,
    "threads": 1,
    "n": 6,
    "mode": "mofn",
    "boundary": 6.0,
    "max_range": 30.0,
    "trials": 20000,
    "pfa_bucket": 1e-3,
    "out_dir": ".",
    "floor": 0.0,
    "path_loss_exponent": 2.0,
    "sensitivity_floor": -100,
    "target_pd": 0.5,
    "fdr_target": 0.5,
    "windows": 100,
    "scans": 6,
    "chirp_rate": 4.0,
    "scan_duration": 4.0,
    "scan_interval": 150.0,
    "window": 900.0,
    "policy_simulate": "first_chirp",
    "distance": 6.0,
}


def _apply_config(args: argparse.Namespace) -> None:
    """Resolve option precedence: flags > --config file > built-in defaults."""
    if getattr(args, "config", None):
        file_values = _load_json(args.config)
        if not isinstance(file_values, dict):
            raise ConfigurationError(f"{args.config}: config file must hold a JSON object")
        for key, value in file_values.items():
            dest = key.replace("-", "_")
            if not hasattr(args, dest):
                raise ConfigurationError(f"{args.config}: unknown option {key!r}")
            if getattr(args, dest) is None:
                setattr(args, dest, value)
    for dest, value in _DEFAULTS.items():
        if hasattr(args, dest) and getattr(args, dest) is None:
            setattr(args, dest, value)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="tcftl",
        description="Too-close-for-too-long detector design and evaluation from RSSI measurements.",
    )
    parser.add_argument("--version", action="version", version=f"tcftl {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ingest", help="validate and normalize a measurement CSV")
    _add_common(p)
    p.add_argument("--input", required=True, help="raw measurement CSV")
    p.add_argument("--schema", default=None, help="JSON mapping of logical fields to CSV columns")
    p.add_argument("--strict", action="store_true", help="fail on the first invalid row")
    p.add_argument("--no-censor", action="store_true", help="keep rows below the sensitivity floor")
    p.add_argument("--sensitivity-floor", type=int, default=None, help="censoring floor, dBm (default -100)")
    p.add_argument("--reference-tx", type=int, default=None, help="normalize to this transmit power, dBm")
    p.add_argument("--bulk-deltas", default=None, help="pose-offset JSON for synthesize_pose")
    p.add_argument("--estimate-deltas", action="store_true",
                   help="estimate pose offsets from the data, then synthesize")
    p.add_argument("--extend-to", type=float, action="append", default=None,
                   help="emit synthetic samples at this range, ft (repeatable)")
    p.add_argument("--extend-base", type=float, default=None,
                   help="base range for extension (default: longest measured)")
    p.add_argument("--path-loss-exponent", type=float, default=None, help="log-distance exponent (default 2)")
    p.add_argument("--out", required=True, help="normalized dataset CSV")
    p.set_defaults(func=cmd_ingest)

    p = sub.add_parser("estimate", help="estimate the conditional PDF bank")
    _add_common(p)
    p.add_argument("--dataset", required=True, help="dataset CSV from 'ingest'")
    p.add_argument("--support", type=int, nargs=2, default=None, metavar=("LO", "HI"),
                   help="explicit dB support bounds")
    p.add_argument("--floor", type=float, default=None, help="probability floor for empty bins (default 0)")
    p.add_argument("--no-strata", action="store_true", help="skip pose-angle strata")
    p.add_argument("--out", required=True, help="bank JSON")
    p.set_defaults(func=cmd_estimate)

    p = sub.add_parser("optimize", help="design a carriage-aware minimax detector")
    _add_common(p)
    p.add_argument("--bank", required=True)
    p.add_argument("--pairs", default=None)
    p.add_argument("--density", default=None)
    p.add_argument("--n", type=int, default=None, help="looks per window (default 6)")
    p.add_argument("--target-pd", type=float, default=None, help="detection target (default 0.5)")
    p.add_argument("--boundary", type=float, default=None)
    p.add_argument("--max-range", type=float, default=None)
    p.add_argument("--max-gap", type=float, default=None)
    p.add_argument("--out", required=True, help="detector JSON")
    p.set_defaults(func=cmd_optimize)

    p = sub.add_parser("det", help="detection-error-tradeoff curve")
    _add_curve_common(p)
    p.add_argument("--pfa-bucket", type=float, default=None, help="P_FA envelope bucket (default 1e-3)")
    p.set_defaults(func=cmd_det)

    p = sub.add_parser("fdr", help="false-discovery-rate curve")
    _add_curve_common(p)
    p.set_defaults(func=cmd_fdr)

    p = sub.add_parser("sweep", help="P_D at an FDR budget across look configurations")
    _add_curve_common(p)
    p.add_argument("--looks", required=True, help="comma list of scans x samples, e.g. '6x1,12x1,6x4'")
    p.add_argument("--fdr-target", type=float, default=None, help="FDR budget (default 0.5)")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("simulate", help="simulate scan-timing windows from a bank cell")
    _add_common(p)
    p.add_argument("--bank", required=True)
    p.add_argument("--distance", type=float, default=None, help="separation, ft (default 6)")
    p.add_argument("--carriage", required=True, help="carriage pair label")
    p.add_argument("--policy", default=None, choices=[x.value for x in RecordingPolicy])
    p.add_argument("--samples-per-scan", type=int, default=None)
    p.add_argument("--correlation", default=None, choices=[c.value for c in Correlation])
    p.add_argument("--scans", type=int, default=None, help="scans per window (default 6)")
    p.add_argument("--chirp-rate", type=float, default=None, help="chirps per second (default 4)")
    p.add_argument("--scan-duration", type=float, default=None, help="seconds (default 4)")
    p.add_argument("--scan-interval", type=float, default=None, help="seconds (default 150)")
    p.add_argument("--window", type=float, default=None, help="window length, seconds (default 900)")
    p.add_argument("--windows", type=int, default=None, help="windows to simulate (default 100)")
    p.add_argument("--censor", action="store_true", help="drop looks below the sensitivity floor")
    p.add_argument("--sensitivity-floor", type=int, default=None)
    p.add_argument("--out-dir", default=None)
    p.add_argument("--name", default=None)
    p.set_defaults(func=cmd_simulate)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        _apply_config(args)
        if args.command == "simulate" and args.policy is None:
            args.policy = _DEFAULTS["policy_simulate"]
        return args.func(args)
    except (SchemaError, RowError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (ConfigurationError, ParameterError, CoverageError, EstimationError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except InfeasibleError as exc:
        print(f"infeasible: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
