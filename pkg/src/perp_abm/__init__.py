"""Agent-based simulation of a Perpetual Futures market on a limit order book."""

from .agents import (
    AgentParams,
    ForecastComponents,
    MarketSide,
    OrderIntent,
    Style,
    TraderAgent,
    adjust_premia,
    chartist_forecast_return,
    composite_forecast,
    create_agent,
    decide_order,
    fundamental_forecast_return,
    funding_order,
    noise_forecast_return,
    positional_order,
)
from .analytics import ShewhartSummary, SweepReport, aggregate, cross_correlation, peak_lag, shewhart
from .orderbook import Order, OrderBook, Side
from .price_process import SpotParams, generate_spot_path, load_spot_csv
from .session import (
    Session,
    SessionResult,
    SimulationConfig,
    batch_summaries,
    run_batch,
    run_session,
    run_sweep,
    session_rng,
    warm_up,
)

__version__ = "0.1.0"
