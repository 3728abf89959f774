"""Regenerate the shipped replay fixtures.

The fixture window is 2022-01-01 .. 2022-02-16. Equity-style tickers skip
weekends and 2022-01-17 (US market holiday); the NFT series skips
2022-01-26. That leaves 31 common dates, hence a 30-row frame (the last
common date only supplies a label).

    python scripts/make_fixtures.py
"""

import datetime as dt
import json
from pathlib import Path

import numpy as np

from nftappraise.frame import DEFAULT_TICKERS, is_crypto
from nftappraise.ingest import COLLECTIONS, FetchSpec, FixtureStore
from nftappraise.synthetic import sinusoid_frame
from nftappraise import frame as fr

ROOT = Path(__file__).resolve().parent.parent / "fixtures"
START, END = dt.date(2022, 1, 1), dt.date(2022, 2, 16)
HOLIDAY = dt.date(2022, 1, 17)
NFT_GAP = dt.date(2022, 1, 26)
FETCHED_AT = "2022-04-22T00:00:00+00:00"

LEVELS = {"ETH-USD": 3700.0, "BTC-USD": 47000.0, "GC=F": 1800.0, "^GSPC": 4700.0,
          "^DJI": 36000.0, "^NDX": 16000.0, "MSFT": 330.0, "AAPL": 180.0, "NFLX": 590.0,
          "TSLA": 1150.0, "AMZN": 3400.0, "FB": 340.0}


def days():
    d = START
    while d <= END:
        yield d
        d += dt.timedelta(days=1)


def epoch(d, hour=0):
    return int(dt.datetime(d.year, d.month, d.day, hour, tzinfo=dt.timezone.utc).timestamp())


def main():
    rng = np.random.default_rng(20220422)
    store = FixtureStore(ROOT / "replay")
    all_days = list(days())
    n = len(all_days)

    market_shock = np.cumsum(rng.normal(0, 0.012, n))
    quotes = {}
    for ticker in DEFAULT_TICKERS:
        own = np.cumsum(rng.normal(0, 0.01, n))
        beta = 1.6 if is_crypto(ticker) else 1.0
        path = LEVELS[ticker] * np.exp(beta * market_shock + own)
        keep = [i for i, d in enumerate(all_days)
                if is_crypto(ticker) or (d.weekday() < 5 and d != HOLIDAY)]
        hour = 0 if is_crypto(ticker) else 14
        result = {"meta": {"symbol": ticker, "currency": "USD"},
                  "timestamp": [epoch(all_days[i], hour) for i in keep],
                  "indicators": {"quote": [{"close": [round(float(path[i]), 4) for i in keep]}]}}
        body = json.dumps({"chart": {"result": [result], "error": None}}).encode()
        store.record(FetchSpec("public_market", ticker, START, END), body, FETCHED_AT)
        quotes[ticker] = path

    # next-day price driven by today's price, sales and ETH, plus noise
    price = np.empty(n)
    sold = rng.integers(20, 160, n)
    gas = 90 + 40 * rng.random(n)
    price[0] = 230000.0
    eth = quotes["ETH-USD"] / LEVELS["ETH-USD"]
    for i in range(1, n):
        price[i] = (0.85 * price[i - 1] + 0.15 * 230000.0 * eth[i - 1]
                    + 180.0 * (sold[i - 1] - 90) + rng.normal(0, 2500))
    items = []
    for i, d in enumerate(all_days):
        if d == NFT_GAP:
            continue
        items.append({
            "average_volume_quote_day": round(float(price[i]), 5),
            "chain_id": 1,
            "collection_address": COLLECTIONS["Bored Ape Yacht Club"].lower(),
            "collection_name": "Bored Ape Yacht Club",
            "collection_ticker_symbol": "BAYC",
            "gas_quote_rate_day": round(float(gas[i]), 3),
            "opening_date": d.isoformat(),
            "quote_currency": "USD",
            "unique_token_ids_sold_count_day": int(sold[i]),
            "volume_quote_day": round(float(price[i] * sold[i]), 3),
        })
    items.reverse()  # the service lists newest first
    body = json.dumps({"data": {"items": items}, "error": False}).encode()
    contract = COLLECTIONS["Bored Ape Yacht Club"].lower()
    store.record(FetchSpec("nft_market", contract, START, END), body, FETCHED_AT)

    # daily search interest, a few days absent
    timeline = [{"time": str(epoch(d)), "formattedTime": d.isoformat(),
                 "value": [int(np.clip(round(55 + 25 * np.sin(i / 5) + rng.normal(0, 6)), 0, 100))]}
                for i, d in enumerate(all_days) if i % 9 != 4]
    body = json.dumps({"default": {"timelineData": timeline}}).encode()
    store.record(FetchSpec("search_trends", "Bored Ape Yacht Club", START, END), body, FETCHED_AT)

    (ROOT / "events.csv").write_text(
        "date,polarity,note\n"
        "2022-01-05,1,spin-off collection announced\n"
        "2022-01-08,1,weekend announcement (not a trading day)\n"
        "2022-01-12,-1,scammer targets collection\n"
        "2022-02-01,1,partnership announced\n"
        "2022-02-09,-1,phishing links circulating\n")

    fr.to_csv(sinusoid_frame(), ROOT / "sinusoid_frame.csv")


if __name__ == "__main__":
    main()
