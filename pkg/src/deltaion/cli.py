"""Command-line front end.

Exit status: 0 success, 2 invalid input, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import itertools
import json
import sys
import tempfile
from pathlib import Path

import numpy as np

from . import io as dio
from .config import RunConfig, config_from_dict, parse_config
from .errors import ConfigError, DeltaIonError, DomainError, NumericalFailure
from .experiments import compare_outputs, resolve_workers, run_scenario
from .kernel import eval_M

EXIT_OK = 0
EXIT_INVALID = 2
EXIT_NUMERICAL = 3

SUBCOMMANDS = {
    "survival": "survival_curves",
    "sweep": "gamma_sweep",
    "threshold": "threshold_50",
    "fraction": "ionization_vs_r",
    "xval": "route_xval",
}
PAIR_SCENARIOS = ("survival_curves", "route_xval")


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ConfigError(message)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="deltaion", description="Ionization of a driven delta well by three routes.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    for name in list(SUBCOMMANDS) + ["kernel-table"]:
        p = sub.add_parser(name)
        p.add_argument("--config", type=Path, help="JSON run configuration")
        p.add_argument("--out", type=Path, help="output directory")
        p.add_argument("--workers", type=int, help="worker processes (default: DELTAION_WORKERS or 1)")
        p.add_argument("--verify", action="store_true", help="recompute an existing run and diff its CSVs")
        if name != "kernel-table":
            p.add_argument("--omega", type=float, nargs="+", help="drive frequencies")
            p.add_argument("--r", type=float, nargs="+", help="drive amplitudes")
            p.add_argument("--tmax", type=float, help="final time")
        else:
            p.add_argument("--points", type=int, default=50, help="number of log-spaced arguments")
    return parser


def _overrides(args, scenario_id: str) -> dict:
    ov: dict = {"scenario.id": scenario_id}
    if args.out is not None:
        ov["output"] = str(args.out)
    if args.workers is not None:
        ov["workers"] = args.workers
    if getattr(args, "tmax", None) is not None:
        ov["scenario.t_max"] = args.tmax
    omegas, rs = getattr(args, "omega", None), getattr(args, "r", None)
    if scenario_id in PAIR_SCENARIOS:
        if (omegas is None) != (rs is None):
            raise ConfigError("--omega and --r must be given together for this subcommand")
        if omegas is not None:
            ov["scenario.pairs"] = [[w, r] for w, r in itertools.product(omegas, rs)]
    else:
        if omegas is not None:
            ov["scenario.omegas"] = omegas
        if rs is not None:
            ov["scenario.rs"] = rs
    return ov


def load_config(args, scenario_id: str) -> RunConfig:
    doc: dict = {"scenario": {"id": scenario_id}}
    if args.config is not None:
        path = Path(args.config)
        if not path.is_file():
            raise ConfigError(f"config file not found: {path}")
        text = path.read_text(encoding="utf-8")
        cfg = parse_config(text)  # validate the file on its own first
        doc = cfg.document
        if doc["scenario"]["id"] != scenario_id:
            raise ConfigError(f"scenario.id: config is for {doc['scenario']['id']!r}, subcommand runs {scenario_id!r}")
    return config_from_dict(doc, _overrides(args, scenario_id))


def _report(ds, out_dir: Path) -> None:
    for name, (header, rows) in sorted(ds.tables.items()):
        if name.startswith(("trajectory_", "spectrum_")) or len(rows) > 40:
            print(f"{name}: {len(rows)} rows -> {out_dir / 'data' / (name + '.csv')}")
            continue
        print(f"# {name}")
        print(",".join(header))
        for row in rows:
            print(",".join(dio.fmt(v) for v in row))
    for msg in ds.failures:
        print(f"FAILED {msg}", file=sys.stderr)


def _run(cfg: RunConfig, out_dir: Path, quiet: bool = False):
    workers = resolve_workers(cfg.workers)
    ds = run_scenario(
        cfg.scenario,
        cfg.solver,
        out_dir,
        workers=workers,
        newton_tol=cfg.newton_tol,
        max_depth=cfg.depth_cap,
        config=cfg.document,
    )
    if not quiet:
        _report(ds, out_dir)
    return ds


def _verify(out_dir: Path) -> int:
    manifest_path = out_dir / "manifest.json"
    if not manifest_path.is_file():
        raise ConfigError(f"no manifest to verify: {manifest_path}")
    manifest = dio.read_manifest(manifest_path)
    if "kernel_table" in manifest:
        with tempfile.TemporaryDirectory() as tmp:
            _kernel_table(Path(tmp), int(manifest["kernel_table"]["points"]))
            problems = compare_outputs(out_dir, Path(tmp))
    else:
        cfg = config_from_dict(manifest["config"])
        tol = manifest.get("tolerances", {})
        with tempfile.TemporaryDirectory() as tmp:
            _run(cfg, Path(tmp), quiet=True)
            problems = compare_outputs(
                out_dir, Path(tmp), tol.get("verify_rtol", 1e-9), tol.get("verify_atol", 1e-12)
            )
    for p in problems:
        print(f"DIFF {p}", file=sys.stderr)
    print("verify: " + ("ok" if not problems else f"{len(problems)} differences"))
    return EXIT_OK if not problems else EXIT_NUMERICAL


def _kernel_table(out_dir: Path, points: int) -> None:
    if points < 2:
        raise DomainError("--points must be >= 2")
    s = np.logspace(-4, 3, points)
    dio.write_manifest(
        out_dir / "manifest.json",
        {"kernel_table": {"points": points, "s_min": 1e-4, "s_max": 1e3}, "code_revision": dio.code_revision()},
    )
    dio.write_kernel_table(out_dir / "data" / "kernel.csv", s, eval_M(s))


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    try:
        args = build_parser().parse_args(argv)
        if args.command == "kernel-table":
            out_dir = args.out or Path("out")
            if args.verify:
                return _verify(out_dir)
            _kernel_table(out_dir, args.points)
            print(f"kernel table -> {out_dir / 'data' / 'kernel.csv'}")
            return EXIT_OK
        scenario_id = SUBCOMMANDS[args.command]
        if args.verify:
            return _verify(args.out or Path("out"))
        cfg = load_config(args, scenario_id)
        ds = _run(cfg, Path(cfg.output))
        return EXIT_OK if ds.ok else EXIT_NUMERICAL
    except (ConfigError, DomainError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except NumericalFailure as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except DeltaIonError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except (json.JSONDecodeError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
