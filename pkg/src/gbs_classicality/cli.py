"""Command-line front end (``gbsc``).

Exit codes: 0 success or simulable, 2 classicality test failed, 1 usage or
input error.
"""

from __future__ import annotations

import argparse
import json
import sys
from importlib.resources import files
from pathlib import Path

from .classicality import classicality_test, lossy_squeezed_params
from .oracle import MAX_MODES, exact_distribution, total_variation
from .renyi import alpha_scan, scan_to_csv
from .sampler import (
    ConfigError,
    ExperimentConfig,
    SimulabilityError,
    default_threads,
    noisy_output_state,
    sample,
    surrogate_output_covariance,
)
from .validation import validation_report

EXIT_OK = 0
EXIT_INPUT = 1
EXIT_FAILED = 2
DEFAULT_GRID = "0.5,0.6,0.7,0.8,0.9,0.99,0.999"


class InputError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # argparse exits with 2 on usage errors, which collides with "test failed"
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INPUT, f"{self.prog}: error: {message}\n")


def _resolve(path: str):
    """Config path, falling back to a bundled config of that name."""
    if Path(path).exists():
        return path
    bundled = files("gbs_classicality") / "configs" / f"{Path(path).stem}.json"
    return bundled if bundled.is_file() else path


def _load(path: str, epsilon: float | None = None) -> ExperimentConfig:
    path = _resolve(path)
    try:
        config = ExperimentConfig.load(path)
    except OSError as exc:
        raise InputError(f"{path}: {exc.strerror}") from None
    except ConfigError as exc:
        raise InputError(str(exc)) from None
    if epsilon is not None:
        try:
            config = ExperimentConfig(config.noise, config.detector, config.interferometer, epsilon)
        except ConfigError as exc:
            raise InputError(str(exc)) from None
    return config


def _dump(obj, stream=None):
    stream = sys.stdout if stream is None else stream
    stream.write(json.dumps(obj, indent=2) + "\n")


def cmd_test(args) -> int:
    config = _load(args.config, args.epsilon)
    verdict = classicality_test(config.noise, config.detector, config.epsilon)
    _dump(verdict.to_dict())
    return EXIT_OK if verdict.simulable else EXIT_FAILED


def cmd_sample(args) -> int:
    config = _load(args.config, args.epsilon)
    if args.shots < 0:
        raise InputError("--shots must be non-negative")
    threads = args.threads if args.threads is not None else default_threads()
    try:
        shots = sample(config, args.shots, args.seed, threads=threads)
    except SimulabilityError as exc:
        _dump(exc.to_dict(), sys.stderr)
        return EXIT_FAILED
    out = Path(args.out)
    with out.open("w") as fh:
        for row in shots:
            fh.write('{"n": [' + ",".join(map(str, row.tolist())) + "]}\n")
    meta = {
        "config_sha256": config.digest(),
        "config": config.to_dict(),
        "seed": args.seed,
        "shots": args.shots,
        "eps_min": config.verdict().eps_min,
        "samples": out.name,
    }
    Path(str(out) + ".meta.json").write_text(json.dumps(meta, indent=2) + "\n")
    return EXIT_OK


def _parse_grid(text: str) -> list[float]:
    try:
        grid = [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise InputError(f"--grid: cannot parse {text!r} as comma-separated numbers") from None
    bad = [a for a in grid if not 0.5 <= a < 1]
    if bad or not grid:
        raise InputError(f"--grid: every alpha must lie in [0.5, 1), got {bad or grid}")
    return grid


def cmd_scan_alpha(args) -> int:
    grid = _parse_grid(args.grid)
    try:
        sigma = lossy_squeezed_params(args.r, args.eta)
        rows = alpha_scan(sigma, args.q_d, grid)
    except ValueError as exc:
        raise InputError(str(exc)) from None
    sys.stdout.write(scan_to_csv(rows))
    return EXIT_OK


def cmd_validate(args) -> int:
    try:
        report = validation_report(args.modes, args.seed, args.shots, args.instances,
                                   vacuum=args.vacuum)
    except ValueError as exc:
        raise InputError(str(exc)) from None
    _dump(report)
    return EXIT_OK if report["passed"] else EXIT_FAILED


def cmd_exact(args) -> int:
    config = _load(args.config)
    M = config.noise.M
    if M > MAX_MODES:
        raise InputError(
            f"exact distribution of {M} modes costs 2^{M} determinants; limit is {MAX_MODES}"
        )
    truth = exact_distribution(noisy_output_state(config), config.detector)
    surrogate = exact_distribution(surrogate_output_covariance(config, check=False), config.detector)
    _dump({
        "M": M,
        "rho_out": truth.probs.tolist(),
        "surrogate": surrogate.probs.tolist(),
        "total_variation": total_variation(truth, surrogate),
        "eps_min": config.verdict().eps_min,
    })
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="gbsc", description="Classical simulability of noisy Gaussian boson sampling.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    t = sub.add_parser("test", help="run the classicality test on a config")
    t.add_argument("config")
    t.add_argument("--epsilon", type=float, help="override the config's target error")
    t.set_defaults(func=cmd_test)

    s = sub.add_parser("sample", help="draw click patterns from the classical surrogate")
    s.add_argument("config")
    s.add_argument("--shots", type=int, required=True)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--out", required=True, help="JSONL output; metadata goes to OUT.meta.json")
    s.add_argument("--epsilon", type=float)
    s.add_argument("--threads", type=int, help="worker threads (default: $GBSC_THREADS or 1)")
    s.set_defaults(func=cmd_sample)

    a = sub.add_parser("scan-alpha", help="Renyi-order scan of the distance bound, CSV")
    a.add_argument("--r", type=float, required=True)
    a.add_argument("--eta", type=float, required=True)
    a.add_argument("--q-d", type=float, default=0.0)
    a.add_argument("--grid", default=DEFAULT_GRID, help=f"comma-separated orders (default {DEFAULT_GRID})")
    a.set_defaults(func=cmd_scan_alpha)

    v = sub.add_parser("validate", help="sampler and bound checks against the exact oracle")
    v.add_argument("--modes", type=int, default=4)
    v.add_argument("--seed", type=int, default=0)
    v.add_argument("--shots", type=int, default=100_000)
    v.add_argument("--instances", type=int, default=3)
    v.add_argument("--vacuum", action="store_true", help="use r = 0 and no dark counts")
    v.set_defaults(func=cmd_validate)

    e = sub.add_parser("exact", help="exact click distributions of the output and its surrogate")
    e.add_argument("config")
    e.set_defaults(func=cmd_exact)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except InputError as exc:
        _dump({"error": "input", "message": str(exc)}, sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
