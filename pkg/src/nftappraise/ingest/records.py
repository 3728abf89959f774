"""Raw per-date observations and request descriptors."""

from __future__ import annotations

import datetime as dt
import json
import re
from dataclasses import dataclass

from ..errors import ValidationError

SOURCES = ("nft_market", "public_market", "search_trends")

_ADDRESS = re.compile(r"0x[0-9a-fA-F]{40}")


@dataclass(frozen=True)
class ContractAddress:
    value: str

    def __post_init__(self):
        if not isinstance(self.value, str) or not _ADDRESS.fullmatch(self.value):
            raise ValidationError(
                f"malformed contract address {self.value!r}: expected '0x' followed by 40 hex digits")

    def __str__(self):
        return self.value


@dataclass(frozen=True)
class NftDailyRecord:
    date: dt.date
    average_price_quote: float
    tokens_sold_count: int
    gas_quote_rate: float
    volume_quote: float

    def __post_init__(self):
        if self.tokens_sold_count < 0:
            raise ValidationError(f"{self.date}: negative tokens_sold_count {self.tokens_sold_count}")
        if self.average_price_quote < 0:
            raise ValidationError(f"{self.date}: negative average price {self.average_price_quote}")


@dataclass(frozen=True)
class MarketQuote:
    date: dt.date
    ticker: str
    close: float

    def __post_init__(self):
        if not self.close > 0:
            raise ValidationError(f"{self.ticker} {self.date}: close must be positive, got {self.close}")


@dataclass(frozen=True)
class TrendPoint:
    date: dt.date
    relative_volume: int

    def __post_init__(self):
        if not 0 <= self.relative_volume <= 100:
            raise ValidationError(f"{self.date}: relative volume {self.relative_volume} outside [0, 100]")


@dataclass(frozen=True)
class EventAnnotation:
    date: dt.date
    polarity: int
    note: str = ""

    def __post_init__(self):
        if self.polarity not in (-1, 0, 1):
            raise ValidationError(f"{self.date}: polarity {self.polarity} not in {{-1, 0, 1}}")


@dataclass(frozen=True)
class FetchSpec:
    source: str
    identifier: str
    start: dt.date
    end: dt.date

    def __post_init__(self):
        if self.source not in SOURCES:
            raise ValidationError(f"unknown source {self.source!r}; expected one of {SOURCES}")
        if isinstance(self.identifier, ContractAddress):
            object.__setattr__(self, "identifier", self.identifier.value.lower())
        if not self.identifier:
            raise ValidationError("fetch identifier must be non-empty")
        if self.start > self.end:
            raise ValidationError(f"start {self.start} is after end {self.end}")

    def to_dict(self):
        return {"source": self.source, "identifier": self.identifier,
                "start": self.start.isoformat(), "end": self.end.isoformat()}

    @classmethod
    def from_dict(cls, d):
        return cls(d["source"], d["identifier"],
                   dt.date.fromisoformat(d["start"]), dt.date.fromisoformat(d["end"]))

    def key(self):
        return json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))


def check_ascending(records, what):
    for a, b in zip(records, records[1:]):
        if not a.date < b.date:
            raise AssertionError(f"{what}: dates not strictly ascending at {a.date} -> {b.date}")
    return records
