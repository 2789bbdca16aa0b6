"""Command-line runner: config parsing, density sweeps, CSV output.

Config files are flat ``key = value`` lines; ``#`` starts a comment and lists
are comma separated.  Every key can also be given as ``--key value`` on the
command line, which overrides the file.
"""

from __future__ import annotations

import argparse
import csv
import io
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, TextIO

from .geometry import SystemParams
from .search import METHODS, CapacityCurve, sweep_hotspot_density

SCHEMA_VERSION = 1
CSV_COLUMNS = ("schema_version", "p_h", "method", "capacity_n", "p_hat_at_n", "p_hat_at_n_plus_1",
               "trials", "mu", "sigma", "seed")
DEFAULT_DENSITIES = tuple(i / 10 for i in range(11))
DEFAULT_OUTPUT = "capacity.csv"

# config key -> SystemParams field
PARAM_KEYS = {
    "processing_gain": "processing_gain",
    "gamma_db": "gamma_db",
    "b_macro_m": "b_macro",
    "b_micro_m": "b_micro",
    "h_ratio": "h_ratio",
    "x0_m": "x0",
    "sigma_macro_db": "sigma_macro_db",
    "sigma_micro_db": "sigma_micro_db",
    "hotspot_side_m": "hotspot_side",
    "region_side_m": "region_side",
    "confidence": "confidence",
    "trials": "trials",
}
RUN_KEYS = ("densities", "hotspot_density", "methods", "moment_samples", "seed", "output")
CONFIG_KEYS = tuple(PARAM_KEYS) + RUN_KEYS


class ConfigError(ValueError):
    def __init__(self, key: Optional[str], message: str):
        self.key = key
        super().__init__(f"{key}: {message}" if key else message)


@dataclass
class RunConfig:
    params: SystemParams = field(default_factory=SystemParams)
    densities: List[float] = field(default_factory=lambda: list(DEFAULT_DENSITIES))
    methods: List[str] = field(default_factory=lambda: list(METHODS))
    seed: int = 0
    output: str = DEFAULT_OUTPUT
    moment_samples: int = 1_000_000


def _float(key, raw):
    try:
        return float(raw)
    except ValueError:
        raise ConfigError(key, f"expected a number, got {raw!r}") from None


def _int(key, raw):
    try:
        return int(raw)
    except ValueError:
        raise ConfigError(key, f"expected an integer, got {raw!r}") from None


def _list(raw):
    return [item.strip() for item in raw.split(",") if item.strip()]


def read_config_text(text: str) -> Dict[str, str]:
    """Raw ``key -> value`` strings from config file contents."""
    values: Dict[str, str] = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(None, f"line {lineno}: expected 'key = value', got {line!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        if key not in CONFIG_KEYS:
            raise ConfigError(key, f"unknown key (line {lineno})")
        if not value:
            raise ConfigError(key, f"missing value (line {lineno})")
        values[key] = value
    return values


def parse_config(text: str = "", overrides: Optional[Dict[str, str]] = None) -> RunConfig:
    """Validated RunConfig from config text plus flag overrides.

    Omitted keys take the reference defaults.
    """
    raw = read_config_text(text)
    for key, value in (overrides or {}).items():
        if key not in CONFIG_KEYS:
            raise ConfigError(key, "unknown key")
        if value is not None:
            raw[key] = str(value)

    fields = {}
    for key, name in PARAM_KEYS.items():
        if key in raw:
            fields[name] = _int(key, raw[key]) if key == "trials" else _float(key, raw[key])
    for key, name in PARAM_KEYS.items():
        if name not in fields:
            continue
        v = fields[name]
        if key == "confidence":
            ok = 0 < v < 1
        elif key in ("sigma_macro_db", "sigma_micro_db"):
            ok = v >= 0
        elif key == "gamma_db":
            ok = abs(v) < float("inf")
        else:
            ok = v > 0
        if not ok:
            raise ConfigError(key, f"value {raw[key]} out of range")

    cfg = RunConfig()
    if "densities" in raw and "hotspot_density" in raw:
        raise ConfigError("hotspot_density", "give either densities or hotspot_density, not both")
    if "hotspot_density" in raw:
        cfg.densities = [_float("hotspot_density", raw["hotspot_density"])]
        density_key = "hotspot_density"
    else:
        density_key = "densities"
        if "densities" in raw:
            cfg.densities = [_float("densities", v) for v in _list(raw["densities"])]
    if not cfg.densities:
        raise ConfigError(density_key, "no densities given")
    for p_h in cfg.densities:
        if not 0.0 <= p_h <= 1.0:
            raise ConfigError(density_key, f"value {p_h} out of range [0, 1]")

    if "methods" in raw:
        cfg.methods = _list(raw["methods"])
        bad = [m for m in cfg.methods if m not in METHODS]
        if bad or not cfg.methods:
            raise ConfigError("methods", f"unknown or empty methods {bad}; choose from {', '.join(METHODS)}")
    if "moment_samples" in raw:
        cfg.moment_samples = _int("moment_samples", raw["moment_samples"])
        if cfg.moment_samples < 2:
            raise ConfigError("moment_samples", "must be at least 2")
    if "seed" in raw:
        cfg.seed = _int("seed", raw["seed"])
        if not 0 <= cfg.seed < 2 ** 64:
            raise ConfigError("seed", "must be an unsigned 64-bit integer")
    if "output" in raw:
        cfg.output = raw["output"]

    try:
        cfg.params = SystemParams(**fields)
    except ValueError as exc:
        raise ConfigError(None, str(exc)) from None
    return cfg


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return repr(value)
    return str(value)


def curve_rows(curve: CapacityCurve) -> List[Dict[str, str]]:
    rows = []
    for result in curve.results:
        for method, mc in result.methods.items():
            rows.append({
                "schema_version": str(SCHEMA_VERSION),
                "p_h": _fmt(result.hotspot_density),
                "method": method,
                "capacity_n": str(mc.capacity),
                "p_hat_at_n": _fmt(mc.p_hat_at_n),
                "p_hat_at_n_plus_1": _fmt(mc.p_hat_at_n_plus_1),
                "trials": _fmt(mc.trials),
                "mu": _fmt(mc.mu),
                "sigma": _fmt(mc.sigma),
                "seed": str(curve.seed),
            })
    return rows


def write_csv(curve: CapacityCurve, stream: TextIO) -> None:
    writer = csv.DictWriter(stream, fieldnames=CSV_COLUMNS, lineterminator="\n")
    writer.writeheader()
    writer.writerows(curve_rows(curve))


def read_csv(stream: TextIO) -> List[Dict[str, object]]:
    """Parse a results CSV back into typed rows (empty fields become None)."""
    casts = {"schema_version": int, "p_h": float, "capacity_n": int, "p_hat_at_n": float,
             "p_hat_at_n_plus_1": float, "trials": int, "mu": float, "sigma": float, "seed": int}
    rows = []
    for row in csv.DictReader(stream):
        rows.append({k: (casts[k](v) if v != "" else None) if k in casts else v for k, v in row.items()})
    return rows


def _summary(result, mc) -> str:
    if mc.method == "approx2":
        return (f"P_h={result.hotspot_density:.3f} {mc.method:<10} N*={mc.capacity:3d}  "
                f"mu={mc.mu:.4f} sigma={mc.sigma:.4f}")
    return (f"P_h={result.hotspot_density:.3f} {mc.method:<10} N*={mc.capacity:3d}  "
            f"p_hat(N*)={mc.p_hat_at_n:.4f} p_hat(N*+1)={mc.p_hat_at_n_plus_1:.4f}  "
            f"wilson+/-{mc.wilson_half_width:.4f} indeterminate={mc.indeterminate}")


def run(config: RunConfig, workers: int = 1, log: Optional[TextIO] = None) -> int:
    """Run the sweep and write the CSV.  Returns a process exit status."""
    out_dir = os.path.dirname(os.path.abspath(config.output))
    if not os.path.isdir(out_dir) or not os.access(out_dir, os.W_OK):
        print(f"error: cannot write to {config.output}", file=sys.stderr)
        return 2

    def report(result, mc):
        print(_summary(result, mc), file=log or sys.stdout, flush=True)

    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            curve = sweep_hotspot_density(config.params, config.densities, config.methods, config.seed,
                                          moment_samples=config.moment_samples, executor=pool,
                                          progress=report)
    else:
        curve = sweep_hotspot_density(config.params, config.densities, config.methods, config.seed,
                                      moment_samples=config.moment_samples, progress=report)

    buf = io.StringIO()
    write_csv(curve, buf)
    try:
        with open(config.output, "w", newline="") as fh:
            fh.write(buf.getvalue())
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="twotier-capacity",
        description="Uplink user capacity of a macrocell with an embedded hotspot microcell.")
    parser.add_argument("--config", metavar="PATH", help="key = value config file")
    parser.add_argument("--workers", type=int, default=1, help="worker processes (results do not depend on it)")
    for key in CONFIG_KEYS:
        parser.add_argument(f"--{key}", dest=key, metavar="VALUE")
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    text = ""
    if args.config:
        try:
            with open(args.config) as fh:
                text = fh.read()
        except OSError as exc:
            print(f"error: {exc}", file=sys.stderr)
            return 2
    try:
        config = parse_config(text, {k: getattr(args, k) for k in CONFIG_KEYS})
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    if args.workers < 1:
        print("error: --workers must be at least 1", file=sys.stderr)
        return 2
    return run(config, workers=args.workers)


if __name__ == "__main__":
    sys.exit(main())
