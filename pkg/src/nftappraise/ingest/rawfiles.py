"""CSV persistence of fetched raw series (one file per source)."""

from __future__ import annotations

import csv
import datetime as dt

from ..errors import ParseError
from .records import MarketQuote, NftDailyRecord, TrendPoint

NFT_HEADER = ["date", "average_price_quote", "tokens_sold_count", "gas_quote_rate", "volume_quote"]
MARKET_HEADER = ["ticker", "date", "close"]
TRENDS_HEADER = ["date", "relative_volume"]


def _write(path, header, rows):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)


def _read(path, header):
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        got = next(reader, None)
        if got != header:
            raise ParseError(f"{path}:1: expected header {header}, got {got}")
        for lineno, row in enumerate(reader, start=2):
            if row:
                yield lineno, row


def write_nft(records, path):
    _write(path, NFT_HEADER, ([r.date.isoformat(), repr(r.average_price_quote), r.tokens_sold_count,
                               repr(r.gas_quote_rate), repr(r.volume_quote)] for r in records))


def read_nft(path):
    out = []
    for lineno, row in _read(path, NFT_HEADER):
        try:
            out.append(NftDailyRecord(dt.date.fromisoformat(row[0]), float(row[1]), int(row[2]),
                                      float(row[3]), float(row[4])))
        except (ValueError, IndexError) as exc:
            raise ParseError(f"{path}:{lineno}: {exc}") from None
    return out


def write_quotes(quotes, path):
    """``quotes`` maps ticker -> list of MarketQuote."""
    _write(path, MARKET_HEADER, ([q.ticker, q.date.isoformat(), repr(q.close)]
                                 for qs in quotes.values() for q in qs))


def read_quotes(path):
    out = {}
    for lineno, row in _read(path, MARKET_HEADER):
        try:
            q = MarketQuote(dt.date.fromisoformat(row[1]), row[0], float(row[2]))
        except (ValueError, IndexError) as exc:
            raise ParseError(f"{path}:{lineno}: {exc}") from None
        out.setdefault(q.ticker, []).append(q)
    return out


def write_trends(points, path):
    _write(path, TRENDS_HEADER, ([p.date.isoformat(), p.relative_volume] for p in points))


def read_trends(path):
    out = []
    for lineno, row in _read(path, TRENDS_HEADER):
        try:
            out.append(TrendPoint(dt.date.fromisoformat(row[0]), int(row[1])))
        except (ValueError, IndexError) as exc:
            raise ParseError(f"{path}:{lineno}: {exc}") from None
    return out
