"""Price-time priority limit order book.

Every order has size 1, so a crossing order consumes exactly the best
resting order on the other side and there are no partial fills.  Prices are
passed to :meth:`OrderBook.submit` in signed form: a positive number is a buy
at that price, a negative number a sell at its absolute value.
"""

from __future__ import annotations

import bisect
import csv
import enum
from dataclasses import dataclass
from typing import IO, Iterator


class Side(enum.Enum):
    BID = "BID"
    ASK = "ASK"


@dataclass(frozen=True)
class Order:
    id: int
    side: Side
    price: float
    placed_at: int
    size: int = 1


def _bid_key(order: Order) -> tuple[float, int, int]:
    return (-order.price, order.placed_at, order.id)


def _ask_key(order: Order) -> tuple[float, int, int]:
    return (order.price, order.placed_at, order.id)


class OrderBook:
    """Limit order book with bids and asks kept best-first.

    Bids are ordered by descending price, asks by ascending price; at equal
    price the earlier ``placed_at`` (then the lower id) has priority.
    """

    def __init__(self) -> None:
        self.bids: list[Order] = []
        self.asks: list[Order] = []
        self._next_id = 0

    def __len__(self) -> int:
        return len(self.bids) + len(self.asks)

    def __iter__(self) -> Iterator[Order]:
        yield from self.bids
        yield from self.asks

    def __repr__(self) -> str:
        return (
            f"OrderBook(bids={[o.price for o in self.bids]}, "
            f"asks={[o.price for o in self.asks]})"
        )

    def best_bid(self) -> float | None:
        return self.bids[0].price if self.bids else None

    def best_ask(self) -> float | None:
        return self.asks[0].price if self.asks else None

    def mid_point(self) -> float | None:
        if not self.bids or not self.asks:
            return None
        return (self.bids[0].price + self.asks[0].price) / 2.0

    def add(self, side: Side, price: float, placed_at: int, size: int = 1) -> Order:
        """Rest a limit order without any matching.

        Used directly only to seed a book; :meth:`submit` is the trading entry
        point and is the one that keeps the book uncrossed.
        """
        if not price > 0:
            raise ValueError(f"order price must be positive, got {price!r}")
        if size != 1:
            raise ValueError("only unit-size orders are supported")
        order = Order(self._next_id, side, float(price), int(placed_at), size)
        self._next_id += 1
        if side is Side.BID:
            bisect.insort(self.bids, order, key=_bid_key)
        else:
            bisect.insort(self.asks, order, key=_ask_key)
        return order

    def submit(self, signed_price: float, t: int, size: int = 1) -> float | None:
        """Submit a buy (``signed_price > 0``) or sell (``< 0``) at time ``t``.

        A buy strictly below the best ask (or into an empty ask side) rests as
        a bid; otherwise it executes against the best ask and that ask's price
        is returned.  Sells mirror this against the best bid.  A buy priced
        exactly at the best ask therefore executes, never rests.

        Returns the trade price, or ``None`` when the order rested.
        """
        if signed_price > 0:
            best = self.best_ask()
            if best is None or signed_price < best:
                self.add(Side.BID, signed_price, t, size)
                return None
            self.asks.pop(0)
            return best
        if signed_price < 0:
            price = -signed_price
            best = self.best_bid()
            if best is None or price > best:
                self.add(Side.ASK, price, t, size)
                return None
            self.bids.pop(0)
            return best
        raise ValueError("signed_price of 0 means 'no order' and cannot be submitted")

    def expire_orders(self, tau: int, t: int) -> None:
        """Drop every order with ``placed_at <= t - tau``."""
        if tau < 1:
            raise ValueError(f"tau must be >= 1, got {tau}")
        cutoff = t - tau
        self.bids = [o for o in self.bids if o.placed_at > cutoff]
        self.asks = [o for o in self.asks if o.placed_at > cutoff]

    def write_csv(self, fh: IO[str]) -> None:
        """Dump resting orders as ``side,price,placed_at`` rows (debug aid)."""
        writer = csv.writer(fh)
        writer.writerow(["side", "price", "placed_at"])
        for order in self:
            writer.writerow([order.side.value, repr(order.price), order.placed_at])
