"""Trader agents: strategy weights, forecasts and order decisions.

An agent is a random mix of fundamentalist, chartist and noise forecasting
rules.  When it is drawn into a trading cohort it either trades the Perp
positionally, forecasting the Spot price, or trades the basis, forecasting the
premium.  Which of the two it does depends on its market side and on ``bias``.

Price series are indexed from 0 and ``t`` is the index of the current
observation.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np


class MarketSide(enum.Enum):
    NEUTRAL = "neutral"
    LONG = "long"
    SHORT = "short"


class Style(enum.Enum):
    POSITIONAL = "positional"
    BASIS = "basis"
    EXIT = "exit"
    NONE = "none"


@dataclass(frozen=True)
class AgentParams:
    sigma_f: float = 0.0
    sigma_c: float = 10.0
    sigma_n: float = 10.0
    k_max: float = 0.5
    l_min: int = 1
    l_max: int = 5
    sigma_eps: float = 0.05

    def __post_init__(self) -> None:
        for name in ("sigma_f", "sigma_c", "sigma_n", "sigma_eps"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be >= 0, got {getattr(self, name)}")
        if not 0 < self.k_max < 1:
            raise ValueError(f"k_max must lie in (0, 1), got {self.k_max}")
        if self.l_min < 1:
            raise ValueError(f"l_min must be >= 1, got {self.l_min}")
        if self.l_min > self.l_max:
            raise ValueError(f"l_min ({self.l_min}) must not exceed l_max ({self.l_max})")
        if self.sigma_c <= 0 and self.sigma_n <= 0:
            raise ValueError("at least one of sigma_c, sigma_n must be positive")


@dataclass
class TraderAgent:
    w_f: float
    w_c: float
    w_n: float
    spread_cap: float
    # Drawn at creation like the original agent vector; forecasts redraw it.
    stored_horizon: int
    side: MarketSide = MarketSide.NEUTRAL

    @property
    def total_weight(self) -> float:
        return self.w_f + self.w_c + self.w_n


@dataclass(frozen=True)
class ForecastComponents:
    f_f: float
    f_c: float
    f_n: float
    r: float
    price_forecast: float
    horizon: int


@dataclass(frozen=True)
class OrderIntent:
    style: Style
    signed_price: float = 0.0
    horizon_used: int = 0
    k_used: float = 0.0
    size: int = 1


def create_agent(params: AgentParams, rng: np.random.Generator) -> TraderAgent:
    """Draw a trader with uniform random strategy weights and spread cap."""
    while True:
        w_f, w_c, w_n = params.sigma_f * rng.random(), params.sigma_c * rng.random(), params.sigma_n * rng.random()
        horizon = int(rng.integers(params.l_min, params.l_max + 1))
        spread_cap = params.k_max * rng.random()
        # An all-zero draw has probability zero but would leave the composite undefined.
        if w_f + w_c + w_n > 0:
            return TraderAgent(w_f, w_c, w_n, spread_cap, horizon)


def fundamental_forecast_return(prices: Sequence[float], t: int) -> float:
    """Log return implied by reversion to the mean of ``prices[0..t]``."""
    history = np.asarray(prices[: t + 1], dtype=float)
    return math.log(history.mean() / history[-1])


def chartist_forecast_return(prices: Sequence[float], t: int, horizon: int) -> float:
    """Mean of the ``horizon`` simple returns ending at ``prices[t - 1]``.

    Computes ``(1/L) * sum_{j=1..L} (p[t-j] - p[t-j-1]) / p[t-j-1]``, which
    needs ``t - horizon - 1 >= 0``.
    """
    if horizon < 1:
        raise ValueError("horizon must be >= 1")
    start = t - horizon - 1
    if start < 0:
        raise ValueError(f"need {horizon + 1} prices before index {t}, have {t}")
    window = [float(p) for p in prices[start:t]]
    total = 0.0
    for prev, cur in zip(window[:-1], window[1:]):
        total += (cur - prev) / prev
    return total / horizon


def noise_forecast_return(sigma_eps: float, rng: np.random.Generator) -> float:
    return sigma_eps * rng.random()


def composite_forecast(
    agent: TraderAgent,
    prices: Sequence[float],
    t: int,
    params: AgentParams,
    rng: np.random.Generator,
) -> ForecastComponents:
    """Weighted forecast of the next value of ``prices``.

    The chartist horizon is redrawn from ``[l_min, l_max]`` on every call.
    A component with zero weight is not evaluated and reported as 0.
    """
    horizon = int(rng.integers(params.l_min, params.l_max + 1))
    f_c = chartist_forecast_return(prices, t, horizon)
    f_n = noise_forecast_return(params.sigma_eps, rng)
    f_f = fundamental_forecast_return(prices, t) if agent.w_f > 0 else 0.0
    r = (agent.w_f * f_f + agent.w_c * f_c + agent.w_n * f_n) / agent.total_weight
    current = float(prices[t])
    return ForecastComponents(f_f, f_c, f_n, r, current * math.exp(r), horizon)


def adjust_premia(premia: np.ndarray, t: int) -> np.ndarray:
    """Shift the whole premium series by ``|min(premia[0..t])| + 1``.

    The shift is applied unconditionally, so ``premia[0..t]`` always ends up
    at 1 or above and ratio-based forecasts stay defined.
    """
    premia = np.asarray(premia, dtype=float)
    return premia + (abs(premia[: t + 1].min()) + 1.0)


def positional_order(price_forecast: float, current_price: float, side: MarketSide, k: float) -> float:
    """Signed order price for a trader speculating on price direction.

    Longs buy when they expect a rise and shorts buy when they expect a fall;
    everything else, including a forecast equal to the price, sells.  Buys are
    priced ``k`` below the forecast, sells ``k`` above it.
    """
    if (price_forecast > current_price and side is MarketSide.LONG) or (
        price_forecast < current_price and side is MarketSide.SHORT
    ):
        return price_forecast * (1.0 - k)
    return -price_forecast * (1.0 + k)


def funding_order(
    premium_forecast: float,
    price_forecast: float,
    current_premium: float,
    side: MarketSide,
    k: float,
) -> float:
    """Signed order price for a trader chasing funding payments.

    The premium forecast picks the direction, the Spot price forecast sets the
    level.  Ties fall through to a sell.
    """
    level = abs(price_forecast)
    if (premium_forecast < current_premium and side is MarketSide.LONG) or (
        premium_forecast > current_premium and side is MarketSide.SHORT
    ):
        return level * (1.0 - k)
    return -level * (1.0 + k)


def decide_order(
    agent: TraderAgent,
    spot_prices: Sequence[float],
    premia: np.ndarray,
    t: int,
    bias: float,
    exit_prob: float,
    params: AgentParams,
    rng: np.random.Generator,
) -> tuple[TraderAgent, OrderIntent]:
    """Decide what ``agent`` does at time ``t``.

    The agent may exit (its side is cleared and no order is placed).
    Otherwise a neutral agent is assigned long or short with equal odds, and
    the side persists on the returned agent.  Longs trade positionally with
    probability ``1 - bias`` and shorts with probability ``bias``; the rest
    trade the basis.  The agent is updated in place and also returned.
    """
    if rng.random() < exit_prob:
        agent.side = MarketSide.NEUTRAL
        return agent, OrderIntent(Style.EXIT)

    if agent.side is MarketSide.NEUTRAL:
        agent.side = MarketSide.LONG if rng.random() < 0.5 else MarketSide.SHORT

    u = rng.random()
    positional = u >= bias if agent.side is MarketSide.LONG else u < bias
    k = agent.spread_cap * rng.random()

    spot_fc = composite_forecast(agent, spot_prices, t, params, rng)
    if positional:
        price = positional_order(spot_fc.price_forecast, float(spot_prices[t]), agent.side, k)
        return agent, OrderIntent(Style.POSITIONAL, price, spot_fc.horizon, k)

    adjusted = adjust_premia(premia, t)
    premium_fc = composite_forecast(agent, adjusted, t, params, rng)
    price = funding_order(premium_fc.price_forecast, spot_fc.price_forecast, float(adjusted[t]), agent.side, k)
    return agent, OrderIntent(Style.BASIS, price, premium_fc.horizon, k)
