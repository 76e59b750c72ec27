"""Command-line surface: synth, decompose, simulate, fit-tau, bench.

All commands emit machine-readable CSV/JSON plus a run manifest; no
plotting. Exit codes: 0 ok, 2 usage, 3 input, 4 decomposition, 5 fit.
Relative output paths are resolved against $NFMD_OUT_DIR when set.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from pathlib import Path

import numpy as np

from . import bench, configio, decomposition, manifest, perturbation, synth, timeseries
from .errors import (
    ConfigError,
    GenerationError,
    NfmdError,
    NonUniformTimeError,
    OnsetNotFoundError,
    SignalTooShortError,
    UndefinedSnrError,
    WindowFitError,
)
from .fmd import FmdConfig
from .oscillator import simulate

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_INPUT = 3
EXIT_DECOMPOSE = 4
EXIT_FIT = 5


def _out_path(p) -> Path:
    p = Path(p)
    base = os.environ.get("NFMD_OUT_DIR")
    if base and not p.is_absolute():
        return Path(base) / p
    return p


def _finish(args_ns, manifest_path, cfg, seed, input_digest, outputs, watch):
    manifest.write_manifest(
        manifest_path,
        command=getattr(args_ns, "_argv", []),
        cfg_hash=manifest.config_hash(cfg),
        seed=seed,
        input_digest=input_digest,
        outputs=manifest.digest_outputs(outputs),
        wall_time_s=watch.elapsed,
    )


def cmd_synth(args) -> int:
    specs = synth.builtin_specs()
    if args.spec in specs:
        spec = specs[args.spec]
    elif Path(args.spec).exists():
        spec = configio.load_synthetic_spec(args.spec)
    else:
        print(
            f"unknown spec {args.spec!r}; builtin specs: {', '.join(sorted(specs))}",
            file=sys.stderr,
        )
        return EXIT_USAGE
    snr = args.snr if args.snr is not None else math.inf
    out = _out_path(args.out or f"{Path(args.spec).stem}.csv")
    with manifest.Stopwatch() as watch:
        ts = synth.generate(spec)
        ts = synth.add_noise(ts, snr, args.seed)
        timeseries.write_csv(ts, out)
    cfg = {"spec": repr(spec), "snr_db": snr, "seed": args.seed}
    _finish(args, out.with_suffix(out.suffix + ".manifest.json"), cfg, args.seed,
            manifest.config_hash(repr(spec)), [out], watch)
    return EXIT_OK


def cmd_decompose(args) -> int:
    ts = timeseries.read_csv(args.input)
    cfg = decomposition.NfmdConfig(
        window=args.window,
        num_modes=args.modes,
        stride=args.stride,
        fmd=FmdConfig(tol=args.tol, rel_tol=args.rel_tol, max_iters=args.max_iters),
        on_window_error="skip" if args.skip_failed else "raise",
    )
    prefix = _out_path(args.out_prefix)
    prefix.parent.mkdir(parents=True, exist_ok=True)
    with manifest.Stopwatch() as watch:
        d = decomposition.decompose(ts, cfg)
        cfg_hash = manifest.config_hash(
            {"window": cfg.window, "num_modes": cfg.num_modes, "stride": cfg.stride,
             "tol": cfg.fmd.tol, "rel_tol": cfg.fmd.rel_tol, "max_iters": cfg.fmd.max_iters}
        )
        outputs = []
        json_path = Path(f"{prefix}.json")
        decomposition.write_json(d, json_path, config_hash=cfg_hash)
        outputs.append(json_path)
        flat_path = Path(f"{prefix}.windows.csv")
        decomposition.write_flat_csv(d, flat_path)
        outputs.append(flat_path)
        tracks = decomposition.mode_tracks(d)
        for track in tracks:
            p = Path(f"{prefix}.mode{track.mode_index}.csv")
            with open(p, "w") as fh:
                fh.write("center,freq_hz,amp\n")
                for c, w, a in zip(track.centers, track.freq, track.amp):
                    fh.write(f"{c:.17g},{w / (2 * np.pi):.17g},{a:.17g}\n")
            outputs.append(p)
        centers, mu = decomposition.instantaneous_mean(d)
        mean_path = Path(f"{prefix}.mean.csv")
        with open(mean_path, "w") as fh:
            fh.write("center,mean\n")
            for c, m in zip(centers, mu):
                fh.write(f"{c:.17g},{m:.17g}\n")
        outputs.append(mean_path)
    _finish(args, Path(f"{prefix}.manifest.json"),
            {"window": cfg.window, "num_modes": cfg.num_modes, "stride": cfg.stride,
             "tol": cfg.fmd.tol, "rel_tol": cfg.fmd.rel_tol,
             "max_iters": cfg.fmd.max_iters, "on_window_error": cfg.on_window_error},
            None, manifest.sha256_file(args.input), outputs, watch)
    return EXIT_OK


def cmd_simulate(args) -> int:
    osc, forcing = configio.load_oscillator_config(args.config)
    out = _out_path(args.out)
    with manifest.Stopwatch() as watch:
        ts = simulate(osc, forcing, duration=args.duration, dt_out=args.dt)
        if args.snr is not None:
            ts = synth.add_noise(ts, args.snr, args.seed)
        timeseries.write_csv(ts, out)
    cfg = {"oscillator": repr(osc), "forcing": repr(forcing),
           "duration": args.duration, "dt": args.dt, "snr": args.snr}
    _finish(args, out.with_suffix(out.suffix + ".manifest.json"), cfg, args.seed,
            manifest.sha256_file(args.config), [out], watch)
    return EXIT_OK


def cmd_fit_tau(args) -> int:
    data = np.genfromtxt(args.mean_csv, delimiter=",", skip_header=1, dtype=float)
    if data.ndim != 2 or data.shape[1] < 2:
        raise NonUniformTimeError(f"{args.mean_csv}: expected a two-column CSV")
    fixed = {}
    if args.fix_tprime is not None:
        fixed["t_prime"] = args.fix_tprime
    if args.fix_lambda is not None:
        fixed["lambda"] = args.fix_lambda
    variant = args.variant.replace("-", "_")
    with manifest.Stopwatch() as watch:
        try:
            fit = perturbation.fit_perturbation_model(
                data[:, 0], data[:, 1], variant=variant, fixed=fixed
            )
        except ValueError as exc:
            print(json.dumps({"error": "invalid_fit", "detail": str(exc)}), file=sys.stderr)
            return EXIT_FIT
        report = {
            "alpha": fit.alpha,
            "lambda": fit.lam,
            "tau": fit.tau,
            "t_prime": fit.t_prime,
            "fixed": list(fit.fixed_mask),
            "rss": fit.rss,
            "variant": fit.variant,
            "status": "degenerate" if fit.degenerate else "ok",
        }
    out = _out_path(args.out) if args.out else None
    text = json.dumps(report, indent=1, sort_keys=True) + "\n"
    if out:
        out.write_text(text)
        _finish(args, out.with_suffix(out.suffix + ".manifest.json"),
                {"variant": variant, "fixed": fixed}, None,
                manifest.sha256_file(args.mean_csv), [out], watch)
    else:
        sys.stdout.write(text)
    if fit.degenerate:
        print("degenerate fit: no onset above the noise floor", file=sys.stderr)
        return EXIT_FIT
    return EXIT_OK


def cmd_bench(args) -> int:
    if args.suite not in bench.SUITES:
        print(
            f"unknown suite {args.suite!r}; known suites: {', '.join(bench.SUITES)}",
            file=sys.stderr,
        )
        return EXIT_USAGE
    out_dir = _out_path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    with manifest.Stopwatch() as watch:
        if args.suite == "tau-sweep":
            rows = bench.run_tau_sweep(args.seed)
            header = ["tau_true", "tau_est", "alpha", "rss", "status", "role", "pass"]
        elif args.suite == "resolution":
            rows = bench.run_resolution()
            header = ["offset_bins", "freq_true_hz", "freq_est_hz", "error_hz", "pass"]
        elif args.suite == "sharp-omega":
            rows = bench.run_sharp_omega(args.seed)
            header = ["t_leave_400", "t_reach_410", "span_s", "limit_s", "pass"]
        else:
            rows = bench.run_sharp_mean(args.seed)
            header = ["metric", "value", "limit", "pass"]
        table = out_dir / f"{args.suite}.csv"
        bench.write_table(table, header, rows)
    _finish(args, out_dir / f"{args.suite}.manifest.json",
            {"suite": args.suite, "seed": args.seed}, args.seed, "", [table], watch)
    failed = [row for row in rows if row[-1] is False]
    if failed:
        print(f"{len(failed)} benchmark row(s) failed", file=sys.stderr)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="nfmd",
        description="Sliding-window Fourier mode decomposition toolkit",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("synth", help="generate a synthetic benchmark signal")
    p.add_argument("spec", help="builtin spec name or YAML spec file")
    p.add_argument("--snr", type=float, default=None, help="SNR in dB (omit for noiseless)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("decompose", help="sliding-window decomposition of a CSV signal")
    p.add_argument("input", help="time,value CSV")
    p.add_argument("--window", type=int, required=True)
    p.add_argument("--modes", type=int, required=True)
    p.add_argument("--stride", type=int, default=1)
    p.add_argument("--tol", type=float, default=0.0)
    p.add_argument("--rel-tol", type=float, default=1e-8)
    p.add_argument("--max-iters", type=int, default=500)
    p.add_argument("--skip-failed", action="store_true",
                   help="record failed windows instead of aborting")
    p.add_argument("--out-prefix", required=True)
    p.set_defaults(func=cmd_decompose)

    p = sub.add_parser("simulate", help="forced harmonic oscillator trace")
    p.add_argument("config", help="YAML with oscillator and forcing sections")
    p.add_argument("--duration", type=float, required=True)
    p.add_argument("--dt", type=float, required=True)
    p.add_argument("--snr", type=float, default=None)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("fit-tau", help="fit the relaxation model to a mean trace")
    p.add_argument("mean_csv", help="center,mean CSV")
    p.add_argument("--variant", default="lambda-zero",
                   choices=[v.replace("_", "-") for v in perturbation.VARIANTS])
    p.add_argument("--fix-tprime", type=float, default=None)
    p.add_argument("--fix-lambda", type=float, default=None)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_fit_tau)

    p = sub.add_parser("bench", help="run a benchmark suite")
    p.add_argument("suite", help=f"one of: {', '.join(bench.SUITES)}")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out-dir", required=True)
    p.set_defaults(func=cmd_bench)
    return parser


def main(argv=None) -> int:
    argv = list(sys.argv[1:]) if argv is None else list(argv)
    args = build_parser().parse_args(argv)
    args._argv = argv
    try:
        return args.func(args)
    except WindowFitError as exc:
        print(f"decomposition failed at window {exc.window_index}: {exc}", file=sys.stderr)
        return EXIT_DECOMPOSE
    except (OnsetNotFoundError,) as exc:
        print(json.dumps({"error": "onset_not_found", "detail": str(exc)}), file=sys.stderr)
        return EXIT_FIT
    except (NonUniformTimeError, SignalTooShortError, GenerationError,
            UndefinedSnrError, ConfigError, OSError) as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (NfmdError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
