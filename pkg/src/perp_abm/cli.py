"""Command-line front end: ``perp-abm run|sweep|analyze``.

Configuration is a flat JSON object keyed by parameter name.  Defaults are
overlaid by the file, and the file by ``--key value`` flags.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass, field
from os import PathLike
from pathlib import Path
from typing import Any, Mapping, Sequence

import numpy as np

from . import analytics
from .session import PARAMETERS, SWEEPABLE, SimulationConfig, read_session_csv, run_session, run_sweep

COMMANDS = ("run", "sweep", "analyze")
DEFAULT_MAX_LAG = 20


@dataclass
class ExperimentSpec:
    config: SimulationConfig
    command: str = "run"
    param: str | None = None
    values: list[float] = field(default_factory=list)
    n_sims: int = 100
    output_dir: Path = Path("out")
    emit_svg: bool = False
    max_lag: int = DEFAULT_MAX_LAG
    session_csv: Path | None = None

    def __post_init__(self) -> None:
        if self.command not in COMMANDS:
            raise ValueError(f"unknown command {self.command!r}")
        if self.command == "sweep":
            if self.param is None:
                raise ValueError("sweep needs --param")
            if self.param not in SWEEPABLE:
                raise ValueError(f"cannot sweep {self.param!r}; choose from {', '.join(SWEEPABLE)}")
            if not self.values:
                raise ValueError("sweep needs a non-empty --values list")
            for value in self.values:
                self.config.replace(**{self.param: value})
        if self.n_sims < 1:
            raise ValueError(f"n_sims must be >= 1, got {self.n_sims}")


def parse_values(text: str) -> list[float]:
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise ValueError(f"--values must be a comma-separated list of numbers, got {text!r}") from None


def load_config(
    path: str | PathLike | None,
    overrides: Mapping[str, Any] | None = None,
    *,
    command: str = "run",
    **experiment: Any,
) -> ExperimentSpec:
    """Assemble an experiment from defaults, a JSON file and overrides.

    ``overrides`` holds flat simulation parameters; ``experiment`` holds the
    remaining :class:`ExperimentSpec` fields.
    """
    values: dict[str, Any] = {}
    if path is not None:
        text = Path(path).read_text()
        raw = json.loads(text) if text.strip() else {}
        if not isinstance(raw, dict):
            raise ValueError(f"{path}: config must be a JSON object")
        values.update(raw)
    values.update(overrides or {})
    for key in values:
        if key not in PARAMETERS:
            raise ValueError(f"unknown parameter {key!r}")
    config = SimulationConfig.from_dict(values)
    return ExperimentSpec(config=config, command=command, **experiment)


def _write(path: Path, text: str) -> Path:
    path.write_text(text)
    return path


def _write_ccf(out: Path, spot: np.ndarray, perp: np.ndarray, max_lag: int, svg: bool) -> list[Path]:
    max_lag = min(max_lag, len(spot) - 3)
    lags, corr = analytics.cross_correlation(spot, perp, max_lag)
    written = [out / "ccf.csv"]
    with open(written[0], "w", newline="") as fh:
        analytics.write_ccf_csv(fh, lags, corr)
    if svg:
        chart = analytics.svg_line_chart(lags, {"corr(spot[t], perp[t+lag])": corr}, title="Cross correlation: perp vs spot")
        written.append(_write(out / "ccf.svg", chart))
    return written


def _write_summary(out: Path, t: np.ndarray, premium: np.ndarray, svg: bool) -> list[Path]:
    summary = analytics.shewhart(premium)
    written = [out / "summary.csv"]
    with open(written[0], "w", newline="") as fh:
        analytics.write_summary_csv(fh, summary)
    if svg:
        written.append(_write(out / "control_chart.svg", analytics.svg_control_chart(premium, summary, x0=int(t[0]))))
    return written


def cmd_run(spec: ExperimentSpec) -> list[Path]:
    out = Path(spec.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    result = run_session(spec.config)
    window = result.analysis_window()
    written = [out / "session.csv"]
    with open(written[0], "w", newline="") as fh:
        result.write_csv(fh)
    t = np.arange(len(result.spot))[window]
    written += _write_summary(out, t, result.premium[window], spec.emit_svg)
    written += _write_ccf(out, result.spot[window], result.perp[window], spec.max_lag, spec.emit_svg)
    if spec.emit_svg:
        prices = analytics.svg_line_chart(
            t, {"spot": result.spot[window], "perp": result.perp[window]}, title="Spot and Perp prices"
        )
        written.append(_write(out / "prices.svg", prices))
        premium = analytics.svg_line_chart(t, {"premium": result.premium[window]}, title="Premium", hlines={"0": 0.0})
        written.append(_write(out / "premium.svg", premium))
    return written


def cmd_sweep(spec: ExperimentSpec) -> list[Path]:
    out = Path(spec.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    report = run_sweep(spec.config, spec.param, spec.values, spec.n_sims)
    written = [out / "sweep.csv"]
    with open(written[0], "w", newline="") as fh:
        report.write_csv(fh)
    if spec.emit_svg:
        x = report.values
        limits = analytics.svg_line_chart(
            x,
            {name.upper() if name != "center" else "Center": report.column(name) for name in ("center", "lcl", "ucl")},
            title=f"Varying {report.param_name}: Center, LCL and UCL",
        )
        counts = analytics.svg_line_chart(
            x,
            {"Violations": report.column("violations"), "Runs": report.column("runs")},
            title=f"Varying {report.param_name}: Violations and Runs",
        )
        written.append(_write(out / "sweep_limits.svg", limits))
        written.append(_write(out / "sweep_counts.svg", counts))
    return written


def cmd_analyze(spec: ExperimentSpec) -> list[Path]:
    out = Path(spec.output_dir)
    source = spec.session_csv or out / "session.csv"
    with open(source, newline="") as fh:
        data = read_session_csv(fh)
    out.mkdir(parents=True, exist_ok=True)
    written = _write_summary(out, data["t"], data["premium"], spec.emit_svg)
    written += _write_ccf(out, data["spot"], data["perp"], spec.max_lag, spec.emit_svg)
    return written


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="perp-abm", description=__doc__.splitlines()[0])
    parser.add_argument("command", choices=COMMANDS)
    parser.add_argument("--config", help="JSON file of simulation parameters")
    parser.add_argument("--out", default="out", help="output directory (default: out)")
    parser.add_argument("--param", help="parameter to sweep")
    parser.add_argument("--values", help="comma-separated sweep values")
    parser.add_argument("--n-sims", type=int, default=100, help="sessions per sweep value (default: 100)")
    parser.add_argument("--svg", action="store_true", help="also write SVG charts")
    parser.add_argument("--max-lag", type=int, default=DEFAULT_MAX_LAG, help="largest cross-correlation lag")
    parser.add_argument("--session", help="session.csv to analyze (default: OUT/session.csv)")
    params = parser.add_argument_group("simulation parameters")
    for key in PARAMETERS:
        flags = [f"--{key.replace('_', '-')}"] + ([f"--{key}"] if "_" in key else [])
        params.add_argument(*flags, dest=f"param_{key}", metavar=key.upper())
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    overrides = {
        key: getattr(args, f"param_{key}") for key in PARAMETERS if getattr(args, f"param_{key}") is not None
    }
    try:
        spec = load_config(
            args.config,
            overrides,
            command=args.command,
            param=args.param,
            values=parse_values(args.values) if args.values else [],
            n_sims=args.n_sims,
            output_dir=Path(args.out),
            emit_svg=args.svg,
            max_lag=args.max_lag,
            session_csv=Path(args.session) if args.session else None,
        )
        handler = {"run": cmd_run, "sweep": cmd_sweep, "analyze": cmd_analyze}[spec.command]
        written = handler(spec)
    except (OSError, ValueError) as exc:
        print(f"perp-abm: error: {exc}", file=sys.stderr)
        return 1
    for path in written:
        print(path)
    return 0


if __name__ == "__main__":
    sys.exit(main())
