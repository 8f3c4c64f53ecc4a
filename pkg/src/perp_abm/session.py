"""Trading sessions, batches of sessions and parameter sweeps.

A session generates a Spot path and an agent pool, fills a warm-up stretch of
Perp prices with Spot plus uniform noise, seeds the order book, then lets a
random cohort of agents trade at every step.  The Perp price moves to the
first trade of the step, or to the book mid-point when nobody trades.
"""

from __future__ import annotations

import csv
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import IO, Any, Mapping, Sequence

import numpy as np

from .agents import AgentParams, TraderAgent, create_agent, decide_order
from .analytics import ShewhartSummary, SweepReport, aggregate, shewhart
from .orderbook import OrderBook, Side
from .price_process import SpotParams, generate_spot_path

THREADS_ENV = "PERP_ABM_THREADS"

# flat parameter name -> (section, field name, type)
PARAMETERS: dict[str, tuple[str, str, type]] = {
    "s0": ("spot", "s0", float),
    "mu": ("spot", "mu", float),
    "sigma": ("spot", "sigma", float),
    "t0": ("spot", "t0", float),
    "t1": ("spot", "t1", float),
    "spot_mode": ("spot", "mode", str),
    "sigma_f": ("agent_params", "sigma_f", float),
    "sigma_c": ("agent_params", "sigma_c", float),
    "sigma_n": ("agent_params", "sigma_n", float),
    "sigma_eps": ("agent_params", "sigma_eps", float),
    "l_min": ("agent_params", "l_min", int),
    "l_max": ("agent_params", "l_max", int),
    "k_max": ("agent_params", "k_max", float),
    "n_agents": ("", "n_agents", int),
    "cohort_size": ("", "cohort_size", int),
    "tau": ("", "tau", int),
    "bias": ("", "bias", float),
    "exit_probability": ("", "exit_probability", float),
    "warmup_steps": ("", "warmup_steps", int),
    "total_steps": ("", "total_steps", int),
    "seed": ("", "seed", int),
}

SWEEPABLE = tuple(name for name in PARAMETERS if name not in ("seed", "spot_mode"))


def _coerce(name: str, value: Any) -> Any:
    kind = PARAMETERS[name][2]
    if kind is int:
        if isinstance(value, bool) or float(value) != int(float(value)):
            raise ValueError(f"{name} must be an integer, got {value!r}")
        return int(float(value))
    if kind is float:
        if isinstance(value, bool):
            raise ValueError(f"{name} must be a number, got {value!r}")
        return float(value)
    return str(value)


@dataclass(frozen=True)
class SimulationConfig:
    spot: SpotParams = field(default_factory=SpotParams)
    agent_params: AgentParams = field(default_factory=AgentParams)
    n_agents: int = 200
    cohort_size: int = 4
    tau: int = 8
    bias: float = 0.5
    exit_probability: float = 0.05
    warmup_steps: int = 250
    total_steps: int = 1000
    seed: int = 0

    def __post_init__(self) -> None:
        if self.n_agents < 1:
            raise ValueError(f"n_agents must be >= 1, got {self.n_agents}")
        if not 1 <= self.cohort_size <= self.n_agents:
            raise ValueError(f"cohort_size must lie in [1, n_agents={self.n_agents}], got {self.cohort_size}")
        if self.tau < 1:
            raise ValueError(f"tau must be >= 1, got {self.tau}")
        for name in ("bias", "exit_probability"):
            if not 0.0 <= getattr(self, name) <= 1.0:
                raise ValueError(f"{name} must lie in [0, 1], got {getattr(self, name)}")
        need = 2 * self.tau + self.agent_params.l_max + 2
        if self.warmup_steps < need:
            raise ValueError(f"warmup_steps must be >= 2*tau + l_max + 2 = {need}, got {self.warmup_steps}")
        if self.total_steps <= self.warmup_steps:
            raise ValueError(f"total_steps ({self.total_steps}) must exceed warmup_steps ({self.warmup_steps})")
        if self.spot.n_steps != self.total_steps:
            raise ValueError(f"spot.n_steps ({self.spot.n_steps}) must equal total_steps ({self.total_steps})")
        if self.seed < 0:
            raise ValueError(f"seed must be >= 0, got {self.seed}")

    @classmethod
    def from_dict(cls, values: Mapping[str, Any], base: SimulationConfig | None = None) -> SimulationConfig:
        """Build a config from flat parameter names, overlaying ``base``."""
        flat = (base or cls()).to_dict()
        for key, value in values.items():
            if key not in PARAMETERS:
                raise ValueError(f"unknown parameter {key!r}")
            try:
                flat[key] = _coerce(key, value)
            except (TypeError, ValueError) as exc:
                raise ValueError(f"invalid value for {key!r}: {exc}") from None
        sections: dict[str, dict[str, Any]] = {"spot": {}, "agent_params": {}, "": {}}
        for key, value in flat.items():
            section, attr, _ = PARAMETERS[key]
            sections[section][attr] = value
        sections["spot"]["n_steps"] = flat["total_steps"]
        return cls(
            spot=SpotParams(**sections["spot"]),
            agent_params=AgentParams(**sections["agent_params"]),
            **sections[""],
        )

    def to_dict(self) -> dict[str, Any]:
        out = {}
        for key, (section, attr, _) in PARAMETERS.items():
            owner = getattr(self, section) if section else self
            out[key] = getattr(owner, attr)
        return out

    def replace(self, **values: Any) -> SimulationConfig:
        return SimulationConfig.from_dict(values, base=self)


@dataclass
class SessionResult:
    spot: np.ndarray
    perp: np.ndarray
    premium: np.ndarray
    warmup_steps: int

    def analysis_window(self) -> slice:
        return slice(self.warmup_steps, None)

    def premium_tail(self) -> np.ndarray:
        return self.premium[self.warmup_steps :]

    def write_csv(self, fh: IO[str], start: int | None = None) -> None:
        """Write ``t,spot,perp,premium`` rows from ``start`` (default: warm-up end)."""
        start = self.warmup_steps if start is None else start
        writer = csv.writer(fh)
        writer.writerow(["t", "spot", "perp", "premium"])
        for t in range(start, len(self.spot)):
            writer.writerow([t, repr(float(self.spot[t])), repr(float(self.perp[t])), repr(float(self.premium[t]))])


def read_session_csv(fh: IO[str]) -> dict[str, np.ndarray]:
    reader = csv.DictReader(fh)
    expected = ["t", "spot", "perp", "premium"]
    if reader.fieldnames != expected:
        raise ValueError(f"session CSV must have columns {expected}, got {reader.fieldnames}")
    rows = list(reader)
    return {
        "t": np.array([int(r["t"]) for r in rows]),
        **{name: np.array([float(r[name]) for r in rows]) for name in expected[1:]},
    }


def session_rng(seed: int, index: int) -> np.random.Generator:
    """Random stream for session ``index`` of a batch seeded with ``seed``."""
    return np.random.default_rng(np.random.SeedSequence([seed, index]))


def warm_up(spot: np.ndarray, config: SimulationConfig, rng: np.random.Generator) -> tuple[np.ndarray, np.ndarray, OrderBook]:
    """Initial Perp/premium history and a seeded order book.

    Indices ``0..warmup_steps`` get ``perp = spot + U(-1, 1)``; later entries
    are left at zero for the session loop to fill.  The book receives one
    order per step over the ``2 * tau`` steps before ``warmup_steps``: a bid
    ``U{0..10}`` below Spot on even steps, an ask above it on odd ones.
    """
    n = len(spot)
    w = config.warmup_steps
    perp = np.zeros(n)
    premium = np.zeros(n)
    perp[: w + 1] = spot[: w + 1] + rng.uniform(-1.0, 1.0, w + 1)
    premium[: w + 1] = perp[: w + 1] - spot[: w + 1]

    book = OrderBook()
    for i in range(w - 2 * config.tau, w):
        offset = int(rng.integers(0, 11))
        if i % 2 == 0:
            price = spot[i] - offset
            if price > 0:
                book.add(Side.BID, price, i)
        else:
            book.add(Side.ASK, spot[i] + offset, i)
    return perp, premium, book


class Session:
    """Mutable state of one session: Spot path, agent pool, book and prices.

    ``rng`` defaults to stream 0 of ``config.seed``.  A pre-computed ``spot``
    path of length ``total_steps + 1`` replaces the generated one.
    """

    def __init__(
        self,
        config: SimulationConfig,
        rng: np.random.Generator | None = None,
        spot: np.ndarray | None = None,
    ) -> None:
        self.config = config
        self.rng = session_rng(config.seed, 0) if rng is None else rng
        if spot is None:
            spot = generate_spot_path(config.spot, self.rng)
        else:
            spot = np.asarray(spot, dtype=float)
            if spot.shape != (config.total_steps + 1,):
                raise ValueError(f"spot path must have {config.total_steps + 1} points, got {spot.shape}")
        self.spot = spot
        self.pool: list[TraderAgent] = [create_agent(config.agent_params, self.rng) for _ in range(config.n_agents)]
        self.perp, self.premium, self.book = warm_up(spot, config, self.rng)
        self.t = config.warmup_steps
        # trade price per completed step, None where the price came from the book mid-point
        self.trades: list[float | None] = []

    @property
    def done(self) -> bool:
        return self.t >= self.config.total_steps

    def step(self) -> float:
        """Advance one step and return the new Perp price."""
        cfg, t = self.config, self.t
        if self.done:
            raise RuntimeError("session already finished")
        cohort = self.rng.choice(cfg.n_agents, size=cfg.cohort_size, replace=False)
        trade = None
        for i in cohort:
            _, intent = decide_order(
                self.pool[i], self.spot, self.premium, t, cfg.bias, cfg.exit_probability, cfg.agent_params, self.rng
            )
            if intent.signed_price == 0:
                continue
            trade = self.book.submit(intent.signed_price, t)
            if trade is not None:
                break
        new_price = trade
        if new_price is None:
            new_price = self.book.mid_point()
        if new_price is None:
            new_price = self.perp[t]
        self.perp[t + 1] = new_price
        self.premium[t + 1] = new_price - self.spot[t + 1]
        self.book.expire_orders(cfg.tau, t)
        self.trades.append(trade)
        self.t += 1
        return new_price

    def run(self) -> SessionResult:
        while not self.done:
            self.step()
        return self.result()

    def result(self) -> SessionResult:
        return SessionResult(self.spot, self.perp, self.premium, self.config.warmup_steps)


def run_session(
    config: SimulationConfig,
    rng: np.random.Generator | None = None,
    spot: np.ndarray | None = None,
) -> SessionResult:
    """Simulate one full trading session (see :class:`Session`)."""
    return Session(config, rng, spot).run()


def _threads(threads: int | None) -> int:
    if threads is None:
        threads = int(os.environ.get(THREADS_ENV, "1") or 1)
    return max(1, threads)


def _run_indexed(args: tuple[SimulationConfig, int]) -> SessionResult:
    config, index = args
    return run_session(config, session_rng(config.seed, index))


def _summarise_indexed(args: tuple[SimulationConfig, int]) -> ShewhartSummary:
    return shewhart(_run_indexed(args).premium_tail())


def _map(fn, jobs: list, threads: int | None) -> list:
    workers = min(_threads(threads), len(jobs))
    if workers <= 1:
        return [fn(job) for job in jobs]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, jobs, chunksize=max(1, len(jobs) // (4 * workers))))


def run_batch(config: SimulationConfig, n_sims: int, threads: int | None = None) -> list[SessionResult]:
    """Run ``n_sims`` independent sessions, session ``i`` on stream ``(seed, i)``.

    ``threads`` caps worker processes (default: ``$PERP_ABM_THREADS`` or 1).
    """
    if n_sims < 1:
        raise ValueError(f"n_sims must be >= 1, got {n_sims}")
    return _map(_run_indexed, [(config, i) for i in range(n_sims)], threads)


def batch_summaries(config: SimulationConfig, n_sims: int, threads: int | None = None) -> list[ShewhartSummary]:
    """Per-session control-chart summaries of the post-warm-up premium."""
    if n_sims < 1:
        raise ValueError(f"n_sims must be >= 1, got {n_sims}")
    return _map(_summarise_indexed, [(config, i) for i in range(n_sims)], threads)


def run_sweep(
    base_config: SimulationConfig,
    param: str,
    values: Sequence[float],
    n_sims: int,
    threads: int | None = None,
) -> SweepReport:
    """Average control-chart statistics over ``n_sims`` sessions per value.

    Every value reuses the same session streams, so differences between rows
    come from the parameter and not from fresh randomness.
    """
    if param not in SWEEPABLE:
        raise ValueError(f"cannot sweep {param!r}; choose from {', '.join(SWEEPABLE)}")
    if len(values) == 0:
        raise ValueError("sweep needs at least one value")
    report = SweepReport(param)
    for value in values:
        config = base_config.replace(**{param: value})
        report.values.append(config.to_dict()[param])
        report.rows.append(aggregate(batch_summaries(config, n_sims, threads)))
    return report
