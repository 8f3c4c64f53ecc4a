"""Exogenous Spot price signal."""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from os import PathLike

import numpy as np

# Floor applied to additive-mode paths so log/ratio forecasts stay defined.
ADDITIVE_FLOOR = 1e-6

SPOT_MODES = ("geometric", "additive")


@dataclass(frozen=True)
class SpotParams:
    s0: float = 100.0
    mu: float = 1.0
    sigma: float = 0.5
    n_steps: int = 1000
    t0: float = 0.0
    t1: float = 1.0
    mode: str = "geometric"

    def __post_init__(self) -> None:
        if not self.s0 > 0:
            raise ValueError(f"s0 must be positive, got {self.s0}")
        if self.sigma < 0:
            raise ValueError(f"sigma must be >= 0, got {self.sigma}")
        if self.n_steps < 1:
            raise ValueError(f"n_steps must be >= 1, got {self.n_steps}")
        if not self.t1 > self.t0:
            raise ValueError(f"t1 ({self.t1}) must exceed t0 ({self.t0})")
        if self.mode not in SPOT_MODES:
            raise ValueError(f"mode must be one of {SPOT_MODES}, got {self.mode!r}")

    @property
    def dt(self) -> float:
        return (self.t1 - self.t0) / self.n_steps


def generate_spot_path(params: SpotParams, rng: np.random.Generator) -> np.ndarray:
    """Simulate ``n_steps`` increments of the Spot price starting at ``s0``.

    ``geometric`` is exact geometric Brownian motion,
    ``S[k+1] = S[k] * exp((mu - sigma^2/2) dt + sigma sqrt(dt) eps)``.
    ``additive`` applies ``S[k+1] = S[k] + mu dt + sigma sqrt(dt) eps`` and
    floors the result at ``ADDITIVE_FLOOR``.
    """
    dt = params.dt
    eps = rng.standard_normal(params.n_steps)
    path = np.empty(params.n_steps + 1)
    path[0] = params.s0
    if params.mode == "geometric":
        log_steps = (params.mu - 0.5 * params.sigma**2) * dt + params.sigma * math.sqrt(dt) * eps
        path[1:] = params.s0 * np.exp(np.cumsum(log_steps))
    else:
        steps = params.mu * dt + params.sigma * math.sqrt(dt) * eps
        for k, step in enumerate(steps):
            path[k + 1] = max(path[k] + step, ADDITIVE_FLOOR)
    return path


def load_spot_csv(path: str | PathLike, column: str | int = 0) -> np.ndarray:
    """Read a Spot path from a CSV file, one price per row.

    ``column`` is a header name or a 0-based column index.  A header row is
    detected when its selected cell does not parse as a number.
    """
    values: list[float] = []
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows:
        raise ValueError(f"{path}: empty file")
    idx = column
    first = rows[0]
    if isinstance(column, str):
        if column not in first:
            raise ValueError(f"{path}: no column named {column!r}")
        idx = first.index(column)
        rows = rows[1:]
    else:
        try:
            float(first[idx])
        except ValueError:
            rows = rows[1:]
    for row in rows:
        if not row:
            continue
        values.append(float(row[idx]))
    prices = np.asarray(values, dtype=float)
    if prices.size == 0 or np.any(prices <= 0):
        raise ValueError(f"{path}: spot prices must be non-empty and positive")
    return prices
