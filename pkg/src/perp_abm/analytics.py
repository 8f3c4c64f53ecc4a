"""Control-chart statistics and lag correlation for premium series."""

from __future__ import annotations

import csv
import math
from dataclasses import astuple, dataclass, field, fields
from typing import IO, Iterable, Mapping, Sequence

import numpy as np

# d2 constant for moving ranges of two consecutive points.
D2 = 1.128

SUMMARY_COLUMNS = ("center", "stddev", "lcl", "ucl", "violations", "runs")


@dataclass(frozen=True)
class ShewhartSummary:
    center: float
    stddev: float
    lcl: float
    ucl: float
    violations: float
    runs: float


@dataclass
class SweepReport:
    param_name: str
    values: list[float] = field(default_factory=list)
    rows: list[ShewhartSummary] = field(default_factory=list)

    def column(self, name: str) -> np.ndarray:
        return np.array([getattr(row, name) for row in self.rows])

    def write_csv(self, fh: IO[str]) -> None:
        writer = csv.writer(fh)
        writer.writerow(("param_value",) + SUMMARY_COLUMNS)
        for value, row in zip(self.values, self.rows):
            writer.writerow([repr(value)] + [repr(float(x)) for x in astuple(row)])


def _run_points(above: np.ndarray, below: np.ndarray, run_length: int) -> int:
    """Count points in maximal same-side runs of at least ``run_length``."""
    count = 0
    for mask in (above, below):
        run = 0
        for flag in mask:
            if flag:
                run += 1
                continue
            if run >= run_length:
                count += run
            run = 0
        if run >= run_length:
            count += run
    return count


def rounding_tolerance(x: np.ndarray) -> float:
    """Distance below which a point counts as lying on the center or a limit."""
    scale = float(np.max(np.abs(x))) if x.size else 0.0
    return 64 * np.finfo(float).eps * max(1.0, scale)


def shewhart(series: Sequence[float], sigma_mult: float = 3.0, run_length: int = 7) -> ShewhartSummary:
    """Individuals chart summary of ``series``.

    The process sigma is estimated from the mean absolute difference of
    consecutive points divided by ``D2``; limits sit ``sigma_mult`` sigmas
    either side of the mean.  ``violations`` counts points outside the
    limits and ``runs`` counts points that belong to a stretch of at least
    ``run_length`` consecutive points on one side of the mean.  Points within
    :func:`rounding_tolerance` of the mean or a limit count as on it.
    """
    x = np.asarray(series, dtype=float)
    if x.ndim != 1 or x.size < 2:
        raise ValueError("shewhart needs a 1-d series of at least 2 points")
    tol = rounding_tolerance(x)
    center = float(x.mean())
    stddev = float(np.abs(np.diff(x)).mean() / D2)
    lcl = center - sigma_mult * stddev
    ucl = center + sigma_mult * stddev
    violations = int(np.count_nonzero((x < lcl - tol) | (x > ucl + tol)))
    runs = _run_points(x > center + tol, x < center - tol, run_length)
    return ShewhartSummary(center, stddev, lcl, ucl, violations, runs)


def aggregate(summaries: Iterable[ShewhartSummary]) -> ShewhartSummary:
    """Field-wise arithmetic mean of several summaries."""
    table = np.array([astuple(s) for s in summaries], dtype=float)
    if table.size == 0:
        raise ValueError("cannot aggregate an empty list of summaries")
    return ShewhartSummary(*(float(v) for v in table.mean(axis=0)))


def cross_correlation(
    a: Sequence[float], b: Sequence[float], max_lag: int, estimator: str = "pearson"
) -> tuple[np.ndarray, np.ndarray]:
    """Correlation of ``a[i]`` with ``b[i + lag]`` for each lag.

    A positive lag means ``b`` trails ``a``.  With ``estimator="pearson"``
    each lag is the Pearson correlation of the overlapping stretch of the two
    series.  ``estimator="sample"`` is the classical sample cross-correlation
    function instead: full-series means and norms, so the overlap sum shrinks
    with ``|lag|``.  Lags with zero variance get NaN.

    Returns ``(lags, corr)`` with lags running from ``-max_lag`` to
    ``max_lag``.
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.shape != b.shape or a.ndim != 1:
        raise ValueError("series must be 1-d and of equal length")
    if max_lag < 0 or a.size <= max_lag + 2:
        raise ValueError(f"series of length {a.size} too short for max_lag={max_lag}")
    if estimator not in ("pearson", "sample"):
        raise ValueError(f"unknown estimator {estimator!r}")
    n = a.size
    lags = np.arange(-max_lag, max_lag + 1)
    corr = np.full(lags.size, np.nan)
    if estimator == "sample":
        ac = a - a.mean()
        bc = b - b.mean()
        denom = math.sqrt(float(ac @ ac) * float(bc @ bc))
    for i, lag in enumerate(lags):
        if estimator == "sample":
            if denom > 0:
                x, y = (ac[: n - lag], bc[lag:]) if lag >= 0 else (ac[-lag:], bc[: n + lag])
                corr[i] = float(x @ y) / denom
            continue
        x, y = (a[: n - lag], b[lag:]) if lag >= 0 else (a[-lag:], b[: n + lag])
        xc = x - x.mean()
        yc = y - y.mean()
        d = math.sqrt(float(xc @ xc) * float(yc @ yc))
        if d > 0:
            corr[i] = float(xc @ yc) / d
    return lags, corr


def peak_lag(lags: np.ndarray, corr: np.ndarray) -> tuple[int, float]:
    """Lag and value of the largest defined correlation."""
    if np.all(np.isnan(corr)):
        raise ValueError("no defined correlation")
    i = int(np.nanargmax(corr))
    return int(lags[i]), float(corr[i])


def write_summary_csv(fh: IO[str], summary: ShewhartSummary) -> None:
    writer = csv.writer(fh)
    writer.writerow(SUMMARY_COLUMNS)
    writer.writerow([repr(float(x)) for x in astuple(summary)])


def read_summary_csv(fh: IO[str]) -> ShewhartSummary:
    rows = list(csv.DictReader(fh))
    if len(rows) != 1:
        raise ValueError(f"expected exactly one summary row, got {len(rows)}")
    return ShewhartSummary(*(float(rows[0][f.name]) for f in fields(ShewhartSummary)))


def write_ccf_csv(fh: IO[str], lags: np.ndarray, corr: np.ndarray) -> None:
    writer = csv.writer(fh)
    writer.writerow(["lag", "correlation"])
    for lag, c in zip(lags, corr):
        writer.writerow([int(lag), "" if np.isnan(c) else repr(float(c))])


# -- SVG ----------------------------------------------------------------------

_PALETTE = ("#1f77b4", "#2ca02c", "#d62728", "#ff7f0e", "#9467bd", "#8c564b")


def svg_line_chart(
    x: Sequence[float],
    lines: Mapping[str, Sequence[float]],
    *,
    title: str = "",
    hlines: Mapping[str, float] | None = None,
    markers: Sequence[tuple[float, float]] = (),
    width: int = 720,
    height: int = 360,
) -> str:
    """Render a minimal SVG line chart.

    ``lines`` maps a legend label to y values aligned with ``x``; ``hlines``
    draws labelled horizontal reference lines and ``markers`` draws red dots
    at the given ``(x, y)`` points.
    """
    hlines = dict(hlines or {})
    pad_l, pad_r, pad_t, pad_b = 60, 20, 30, 40
    xs = np.asarray(x, dtype=float)
    ys = [np.asarray(v, dtype=float) for v in lines.values()]
    finite = np.concatenate([y[np.isfinite(y)] for y in ys] + [np.asarray(list(hlines.values()), dtype=float)])
    y_lo, y_hi = (float(finite.min()), float(finite.max())) if finite.size else (0.0, 1.0)
    if y_hi == y_lo:
        y_lo, y_hi = y_lo - 1.0, y_hi + 1.0
    x_lo, x_hi = float(xs.min()), float(xs.max())
    if x_hi == x_lo:
        x_lo, x_hi = x_lo - 1.0, x_hi + 1.0

    def px(v: float) -> float:
        return pad_l + (v - x_lo) / (x_hi - x_lo) * (width - pad_l - pad_r)

    def py(v: float) -> float:
        return height - pad_b - (v - y_lo) / (y_hi - y_lo) * (height - pad_t - pad_b)

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" font-family="sans-serif" font-size="11">',
        f'<rect width="{width}" height="{height}" fill="white"/>',
        f'<text x="{width / 2:.1f}" y="18" text-anchor="middle" font-size="13">{title}</text>',
        f'<line x1="{pad_l}" y1="{height - pad_b}" x2="{width - pad_r}" y2="{height - pad_b}" stroke="black"/>',
        f'<line x1="{pad_l}" y1="{pad_t}" x2="{pad_l}" y2="{height - pad_b}" stroke="black"/>',
        f'<text x="{pad_l - 4}" y="{py(y_hi) + 4:.1f}" text-anchor="end">{y_hi:.4g}</text>',
        f'<text x="{pad_l - 4}" y="{py(y_lo) + 4:.1f}" text-anchor="end">{y_lo:.4g}</text>',
        f'<text x="{px(x_lo):.1f}" y="{height - pad_b + 14}" text-anchor="middle">{x_lo:.4g}</text>',
        f'<text x="{px(x_hi):.1f}" y="{height - pad_b + 14}" text-anchor="middle">{x_hi:.4g}</text>',
    ]
    for label, level in hlines.items():
        out.append(
            f'<line x1="{pad_l}" y1="{py(level):.2f}" x2="{width - pad_r}" y2="{py(level):.2f}" '
            'stroke="#888" stroke-dasharray="4 3"/>'
        )
        out.append(f'<text x="{width - pad_r - 2}" y="{py(level) - 3:.2f}" text-anchor="end">{label} {level:.3g}</text>')
    for i, (label, y) in enumerate(zip(lines, ys)):
        colour = _PALETTE[i % len(_PALETTE)]
        pts = " ".join(f"{px(a):.2f},{py(b):.2f}" for a, b in zip(xs, y) if np.isfinite(b))
        out.append(f'<polyline fill="none" stroke="{colour}" stroke-width="1.2" points="{pts}"/>')
        out.append(f'<text x="{pad_l + 8}" y="{pad_t + 14 * (i + 1)}" fill="{colour}">{label}</text>')
    for a, b in markers:
        out.append(f'<circle cx="{px(a):.2f}" cy="{py(b):.2f}" r="2" fill="#d62728"/>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def svg_control_chart(series: Sequence[float], summary: ShewhartSummary, x0: int = 0, title: str = "") -> str:
    x = np.arange(x0, x0 + len(series))
    y = np.asarray(series, dtype=float)
    out_of_limits = (y < summary.lcl) | (y > summary.ucl)
    return svg_line_chart(
        x,
        {"premium": y},
        title=title or "Shewhart chart of premiums",
        hlines={"UCL": summary.ucl, "CL": summary.center, "LCL": summary.lcl},
        markers=list(zip(x[out_of_limits], y[out_of_limits])),
    )
