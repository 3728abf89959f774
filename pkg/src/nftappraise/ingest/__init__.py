from .addresses import COLLECTIONS, PRINTED
from .events import load_events, write_events
from .fixtures import FixtureStore, fixture_name
from .http import HttpClient, TokenBucket, TransientError
from .records import (
    ContractAddress, EventAnnotation, FetchSpec, MarketQuote, NftDailyRecord, TrendPoint,
)
from .sources import (
    API_KEY_ENV, DataClient, parse_market_quotes, parse_nft_daily, parse_trends,
)

__all__ = [
    "COLLECTIONS", "PRINTED", "load_events", "write_events", "FixtureStore", "fixture_name",
    "HttpClient", "TokenBucket", "TransientError", "ContractAddress", "EventAnnotation",
    "FetchSpec", "MarketQuote", "NftDailyRecord", "TrendPoint", "API_KEY_ENV", "DataClient",
    "parse_market_quotes", "parse_nft_daily", "parse_trends",
]
