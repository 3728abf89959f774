"""Fetching and parsing for the NFT-market, public-market and search-trend sources."""

from __future__ import annotations

import datetime as dt
import json
import math
import os

from ..errors import ConfigError, SchemaError, ValidationError
from ..frame import DEFAULT_TICKERS
from .fixtures import FixtureStore
from .http import HttpClient
from .records import (
    ContractAddress, FetchSpec, MarketQuote, NftDailyRecord, TrendPoint, check_ascending,
)

MODES = ("live", "replay", "record")

API_KEY_ENV = {
    "nft_market": "APPRAISE_NFT_API_KEY",
    "public_market": "APPRAISE_MARKET_API_KEY",
    "search_trends": "APPRAISE_TRENDS_API_KEY",
}

DEFAULT_BASE_URLS = {
    "nft_market": "https://api.covalenthq.com",
    "public_market": "https://query1.finance.yahoo.com",
    "search_trends": "https://trends.google.com",
}

# item keys of the NFT-market daily object, mapped to record fields
NFT_KEYS = {
    "average_volume_quote_day": "average_price_quote",
    "unique_token_ids_sold_count_day": "tokens_sold_count",
    "gas_quote_rate_day": "gas_quote_rate",
    "volume_quote_day": "volume_quote",
}


def _utc_date(ts):
    return dt.datetime.fromtimestamp(int(ts), tz=dt.timezone.utc).date()


def _epoch(day):
    return int(dt.datetime(day.year, day.month, day.day, tzinfo=dt.timezone.utc).timestamp())


def _load_json(body, source):
    try:
        return json.loads(body)
    except ValueError as exc:
        raise SchemaError(f"{source}: response is not JSON: {exc}") from None


def _number(item, key, day, source):
    value = item.get(key)
    if value is None or isinstance(value, bool):
        raise SchemaError(f"{source}: missing {key!r} on {day}")
    try:
        x = float(value)
    except (TypeError, ValueError):
        raise SchemaError(f"{source}: non-numeric {key!r}={value!r} on {day}") from None
    if not math.isfinite(x):
        raise SchemaError(f"{source}: {key!r} is {value!r} on {day}")
    return x


def _unique_sorted(records, source):
    records = sorted(records, key=lambda r: r.date)
    for a, b in zip(records, records[1:]):
        if a.date == b.date:
            raise SchemaError(f"{source}: duplicate observations for {a.date}")
    return records


def parse_nft_daily(body, spec):
    doc = _load_json(body, spec.source)
    items = doc.get("data", {}).get("items") if isinstance(doc, dict) else doc
    if not isinstance(items, list):
        raise SchemaError(f"{spec.source}: expected a list of daily items")
    out = []
    for item in items:
        raw_date = item.get("opening_date")
        if not raw_date:
            raise SchemaError(f"{spec.source}: item without 'opening_date'")
        try:
            day = dt.date.fromisoformat(str(raw_date)[:10])
        except ValueError:
            raise SchemaError(f"{spec.source}: bad opening_date {raw_date!r}") from None
        if not spec.start <= day <= spec.end:
            continue
        fields = {f: _number(item, k, day, spec.source) for k, f in NFT_KEYS.items()}
        sold = fields["tokens_sold_count"]
        if sold != int(sold):
            raise SchemaError(f"{spec.source}: fractional token count {sold} on {day}")
        fields["tokens_sold_count"] = int(sold)
        try:
            out.append(NftDailyRecord(day, **fields))
        except ValidationError as exc:
            raise SchemaError(f"{spec.source}: {exc}") from None
    return _unique_sorted(out, spec.source)


def parse_market_quotes(body, spec):
    doc = _load_json(body, spec.source)
    try:
        result = doc["chart"]["result"][0]
    except (KeyError, IndexError, TypeError):
        raise SchemaError(f"{spec.source}: missing chart.result for {spec.identifier}") from None
    stamps = result.get("timestamp") or []
    try:
        closes = result["indicators"]["quote"][0]["close"] if stamps else []
    except (KeyError, IndexError, TypeError):
        raise SchemaError(f"{spec.source}: missing close series for {spec.identifier}") from None
    if len(closes) != len(stamps):
        raise SchemaError(f"{spec.source}: {len(stamps)} timestamps but {len(closes)} closes")
    out = []
    for ts, close in zip(stamps, closes):
        day = _utc_date(ts)
        if not spec.start <= day <= spec.end:
            continue
        x = _number({"close": close}, "close", day, f"{spec.source}:{spec.identifier}")
        if not x > 0:
            raise SchemaError(f"{spec.source}: non-positive close {x} for {spec.identifier} on {day}")
        out.append(MarketQuote(day, spec.identifier, x))
    return _unique_sorted(out, f"{spec.source}:{spec.identifier}")


def parse_trends(body, spec):
    if not body.strip():
        return []
    doc = _load_json(body, spec.source)
    try:
        timeline = doc["default"]["timelineData"]
    except (KeyError, TypeError):
        raise SchemaError(f"{spec.source}: missing default.timelineData") from None
    out = []
    for point in timeline:
        day = _utc_date(point["time"])
        if not spec.start <= day <= spec.end:
            continue
        value = point.get("value")
        value = value[0] if isinstance(value, list) and value else value
        x = _number({"value": value}, "value", day, spec.source)
        if x != int(x) or not 0 <= x <= 100:
            raise SchemaError(f"{spec.source}: relative volume {value!r} on {day} outside 0..100")
        out.append(TrendPoint(day, int(x)))
    return _unique_sorted(out, spec.source)


class DataClient:
    """Entry point for all three remote sources.

    ``mode`` is ``live`` (HTTP only), ``record`` (HTTP, responses saved as
    fixtures) or ``replay`` (fixtures only; never touches the network).
    """

    def __init__(self, mode="replay", fixtures=None, http=None, base_urls=None,
                 tickers=DEFAULT_TICKERS, env=None):
        if mode not in MODES:
            raise ConfigError(f"unknown mode {mode!r}; expected one of {MODES}")
        if isinstance(fixtures, (str, os.PathLike)):
            fixtures = FixtureStore(fixtures)
        if fixtures is None:
            fixtures = FixtureStore.from_env()
        if mode in ("replay", "record") and fixtures is None:
            raise ConfigError(f"{mode} mode needs a fixture directory (set APPRAISE_FIXTURE_DIR)")
        self.mode = mode
        self.fixtures = fixtures
        self.http = http
        self.base_urls = {**DEFAULT_BASE_URLS, **(base_urls or {})}
        self.tickers = tuple(tickers)
        self.env = os.environ if env is None else env

    def _api_key(self, source):
        var = API_KEY_ENV[source]
        key = self.env.get(var)
        if not key:
            raise ConfigError(f"live fetch from {source} needs the {var} environment variable")
        return key

    def _request(self, spec):
        base = self.base_urls[spec.source].rstrip("/")
        key = self._api_key(spec.source)
        if spec.source == "nft_market":
            url = f"{base}/v1/1/nft_market/collection/{spec.identifier}/"
            params = {"quote-currency": "USD", "from": spec.start.isoformat(),
                      "to": spec.end.isoformat(), "key": key}
            return url, params, {}
        if spec.source == "public_market":
            url = f"{base}/v8/finance/chart/{spec.identifier}"
            params = {"period1": _epoch(spec.start),
                      "period2": _epoch(spec.end + dt.timedelta(days=1)), "interval": "1d"}
            return url, params, {"X-API-KEY": key}
        url = f"{base}/trends/api/widgetdata/multiline"
        params = {"q": spec.identifier, "from": spec.start.isoformat(), "to": spec.end.isoformat()}
        return url, params, {"X-API-KEY": key}

    def raw(self, spec):
        """Response bytes for ``spec`` according to the client's mode."""
        if self.mode == "replay":
            return self.fixtures.replay(spec)
        if self.http is None:
            self.http = HttpClient()
        url, params, headers = self._request(spec)
        body = self.http.get(spec.source, url, params, headers)
        if self.mode == "record":
            self.fixtures.record(spec, body)
        return body

    def fetch_nft_daily(self, contract, start, end):
        if not isinstance(contract, ContractAddress):
            contract = ContractAddress(contract)
        spec = FetchSpec("nft_market", contract.value.lower(), start, end)
        return check_ascending(parse_nft_daily(self.raw(spec), spec), "nft_market")

    def fetch_market_quotes(self, ticker, start, end):
        if ticker not in self.tickers:
            raise ValidationError(f"ticker {ticker!r} is not in the configured universe {self.tickers}")
        spec = FetchSpec("public_market", ticker, start, end)
        return check_ascending(parse_market_quotes(self.raw(spec), spec), ticker)

    def fetch_trends(self, term, start, end):
        if not term or not term.strip():
            raise ValidationError("search term must be non-empty")
        spec = FetchSpec("search_trends", term, start, end)
        return check_ascending(parse_trends(self.raw(spec), spec), "search_trends")
