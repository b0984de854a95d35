"""Command-line experiment driver.

One experiment per invocation:

    lplab partition-check [--samples N] [--inject-psi-error EPS]
    lplab besov        [--dim D --n N --size S --profile P --norms a,b,...]
    lplab embeddings   [--dim D --n N --size S]
    lplab boundedness  [--symbol mu|...|nu|...|N|t2 --grids 64,128,256 --pairs P]
    lplab symbol-check [--samples N]
    lplab iterate      [--n-iter 1|2 --t T --steps S --input F --output F]
    lplab inflation    [--alpha sqrt|inv --Ns 15,20,30,40 --zeta-eps E --nodes Q]
    lplab chemin       [--j-lo J --j-hi J --t T]

Every run writes <outdir>/<experiment>.csv (rows), .json (config echo,
summary, provenance) and .png (figure; disable with --no-plot).  Options
may also come from a flat KEY=VALUE config file (--config); explicit
flags win over the file.  LPLAB_THREADS caps the numba thread count.

Exit codes: 0 experiment passed its assertions, 1 an assertion failed,
2 usage error.
"""
from __future__ import annotations

import argparse
import os
import sys
from dataclasses import dataclass, field
from pathlib import Path

from .experiments import RUNNERS
from .reports import render_figure, write_csv, write_json

EXIT_OK = 0
EXIT_ASSERTION = 1
EXIT_USAGE = 2


@dataclass
class ExperimentConfig:
    """A named experiment plus its flat option map; round-trips losslessly."""
    experiment: str
    options: dict = field(default_factory=dict)

    def to_lines(self) -> str:
        lines = [f"experiment={self.experiment}"]
        lines += [f"{k}={self.options[k]}" for k in sorted(self.options)]
        return "\n".join(lines) + "\n"

    @classmethod
    def from_lines(cls, text: str) -> "ExperimentConfig":
        experiment = ""
        options = {}
        for raw in text.splitlines():
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise ValueError(f"config line without '=': {line!r}")
            key, value = line.split("=", 1)
            key, value = key.strip(), value.strip()
            if key == "experiment":
                experiment = value
            else:
                options[key] = value
        return cls(experiment=experiment, options=options)


def _int_list(text):
    return tuple(int(x) for x in str(text).split(",") if x != "")


def _str_list(text):
    return tuple(x.strip() for x in str(text).split(",") if x.strip())


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="lplab",
        description="dyadic harmonic-analysis and second-iterate experiments")
    parser.add_argument("--version", action="version", version="%(prog)s 0.1.0")
    sub = parser.add_subparsers(dest="experiment", required=True)

    def common(p):
        p.add_argument("--config", help="flat KEY=VALUE option file (flags win)")
        p.add_argument("--outdir", default="lplab-out", help="output directory")
        p.add_argument("--no-plot", action="store_true", help="skip the figure")
        p.add_argument("--seed", type=int, help="ensemble / sampling seed")

    p = sub.add_parser("partition-check", help="dyadic partition-of-unity residual")
    common(p)
    p.add_argument("--samples", type=int)
    p.add_argument("--inject-psi-error", type=float, metavar="EPS",
                   help="scale psi by 1+EPS (fault injection; must fail)")

    p = sub.add_parser("besov", help="Besov norm table over an ensemble")
    common(p)
    p.add_argument("--dim", type=int)
    p.add_argument("--n", type=int)
    p.add_argument("--size", type=int)
    p.add_argument("--profile")
    p.add_argument("--band", type=int)
    p.add_argument("--norms")

    p = sub.add_parser("embeddings", help="embedding-chain constants")
    common(p)
    p.add_argument("--dim", type=int)
    p.add_argument("--n", type=int)
    p.add_argument("--size", type=int)
    p.add_argument("--band", type=int)

    p = sub.add_parser("boundedness", help="operator-ratio stability under doubling")
    common(p)
    p.add_argument("--symbol")
    p.add_argument("--dim", type=int)
    p.add_argument("--grids")
    p.add_argument("--bands")
    p.add_argument("--pairs", type=int)

    p = sub.add_parser("symbol-check", help="symbol decomposition residuals")
    common(p)
    p.add_argument("--samples", type=int)

    p = sub.add_parser("iterate", help="heat-Duhamel iterate of a stored field")
    common(p)
    p.add_argument("--n-iter", type=int, choices=(1, 2))
    p.add_argument("--t", type=float)
    p.add_argument("--steps", type=int)
    p.add_argument("--input")
    p.add_argument("--output")
    p.add_argument("--dim", type=int)
    p.add_argument("--n", type=int)
    p.add_argument("--band", type=int)

    p = sub.add_parser("inflation", help="norm-inflation growth experiment")
    common(p)
    p.add_argument("--alpha", choices=("sqrt", "inv"))
    p.add_argument("--Ns")
    p.add_argument("--zeta-eps", type=float)
    p.add_argument("--nodes", type=int)

    p = sub.add_parser("chemin", help="dyadic heat-decay bound check")
    common(p)
    p.add_argument("--j-lo", type=int)
    p.add_argument("--j-hi", type=int)
    p.add_argument("--t", type=float)
    p.add_argument("--n", type=int)
    return parser


# per-experiment: (runner kwarg, parse) for each accepted option key
_OPTION_SCHEMA = {
    "partition-check": {"samples": ("samples", int), "seed": ("seed", int),
                        "inject_psi_error": ("psi_scale", lambda v: 1.0 + float(v))},
    "besov": {"dim": ("dim", int), "n": ("n", int), "size": ("size", int),
              "seed": ("seed", int), "profile": ("profile", str),
              "band": ("band", int), "norms": ("norms", _str_list)},
    "embeddings": {"dim": ("dim", int), "n": ("n", int), "size": ("size", int),
                   "seed": ("seed", int), "band": ("band", int)},
    "boundedness": {"symbol": ("symbol", str), "dim": ("dim", int),
                    "grids": ("grids", _int_list), "bands": ("bands", _int_list),
                    "pairs": ("pairs", int), "seed": ("seed", int)},
    "symbol-check": {"samples": ("samples", int), "seed": ("seed", int)},
    "iterate": {"n_iter": ("n_iter", int), "t": ("t", float), "steps": ("steps", int),
                "input": ("input_path", str), "output": ("output_path", str),
                "dim": ("dim", int), "n": ("n", int), "seed": ("seed", int),
                "band": ("band", int)},
    "inflation": {"alpha": ("alpha", str), "Ns": ("Ns", _int_list),
                  "zeta_eps": ("zeta_eps", float), "nodes": ("nodes", int)},
    "chemin": {"j_lo": ("j_lo", int), "j_hi": ("j_hi", int), "t": ("t", float),
               "n": ("n", int), "seed": ("seed", int)},
}


def _collect_options(args: argparse.Namespace) -> dict:
    """Merge config-file options with CLI flags; flags win."""
    schema = _OPTION_SCHEMA[args.experiment]
    merged = {}
    if getattr(args, "config", None):
        cfg = ExperimentConfig.from_lines(Path(args.config).read_text())
        if cfg.experiment and cfg.experiment != args.experiment:
            raise ValueError(
                f"config file is for {cfg.experiment!r}, not {args.experiment!r}")
        for key, value in cfg.options.items():
            if key not in schema:
                raise ValueError(f"unknown config key {key!r} for {args.experiment}")
            dest, parse = schema[key]
            merged[dest] = parse(value)
    for key, (dest, parse) in schema.items():
        flag_val = getattr(args, key, None)
        if flag_val is None:
            continue
        if isinstance(flag_val, str):
            merged[dest] = parse(flag_val)
        elif key == "inject_psi_error":
            merged[dest] = 1.0 + float(flag_val)
        else:
            merged[dest] = flag_val
    return merged


def _apply_thread_env():
    threads = os.environ.get("LPLAB_THREADS")
    if threads:
        import numba
        numba.set_num_threads(max(1, int(threads)))


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        options = _collect_options(args)
    except (ValueError, OSError) as exc:
        parser.error(str(exc))  # exits with code 2
    _apply_thread_env()
    runner = RUNNERS[args.experiment]
    try:
        report, ok = runner(**options)
    except (ValueError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    outdir = Path(args.outdir)
    csv_path = write_csv(report, outdir / f"{args.experiment}.csv")
    json_path = write_json(report, outdir / f"{args.experiment}.json")
    written = [str(csv_path), str(json_path)]
    if not args.no_plot:
        written.append(str(render_figure(report, outdir / f"{args.experiment}.png")))
    status = "ok" if ok else "FAILED"
    print(f"[{args.experiment}] {status}")
    for key, value in report.summary.items():
        print(f"  {key}: {value}")
    print("  wrote: " + ", ".join(written))
    return EXIT_OK if ok else EXIT_ASSERTION


if __name__ == "__main__":
    sys.exit(main())
