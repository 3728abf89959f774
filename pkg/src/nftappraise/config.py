"""Pipeline configuration: one TOML document, CLI flags override it."""

from __future__ import annotations

import datetime as dt
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path

import tomli
import tomli_w

from .errors import ConfigError, ValidationError
from .frame import DEFAULT_TICKERS, SplitConfig, preset_columns
from .ingest.addresses import COLLECTIONS
from .ingest.records import ContractAddress
from .rnn.grid import GRID_KEYS
from .rnn.model import RnnConfig


@dataclass
class CollectionSection:
    name: str = "Bored Ape Yacht Club"
    contract: str = COLLECTIONS["Bored Ape Yacht Club"]
    release_date: dt.date = dt.date(2021, 4, 23)
    search_term: str = "Bored Ape Yacht Club"


@dataclass
class DataSection:
    start: dt.date = dt.date(2021, 4, 23)
    end: dt.date = dt.date(2022, 4, 22)
    tickers: list = field(default_factory=lambda: list(DEFAULT_TICKERS))
    events: str = ""
    mode: str = "replay"
    fixtures: str = "fixtures"
    rate_limit: float = 4.0


@dataclass
class FrameSection:
    preset: str = "extended"
    train: float = 0.6
    val: float = 0.2
    test: float = 0.2


@dataclass
class RegressSection:
    vif_threshold: float = 10.0
    p_threshold: float = 0.10


@dataclass
class RnnSection:
    cell: str = "gru"
    num_blocks: int = 3
    hidden_dim: int = 16
    learning_rate: float = 0.01
    seq_len: int = 5
    epochs: int = 500
    clip_norm: float = 5.0
    mode: str = "univariate"


@dataclass
class PipelineConfig:
    seed: int = 42
    out: str = "out"
    collection: CollectionSection = field(default_factory=CollectionSection)
    data: DataSection = field(default_factory=DataSection)
    frame: FrameSection = field(default_factory=FrameSection)
    regress: RegressSection = field(default_factory=RegressSection)
    rnn: RnnSection = field(default_factory=RnnSection)
    gridsearch: dict = field(default_factory=lambda: {
        "cell": ["vanilla", "gru", "lstm"], "hidden_dim": [8, 16], "learning_rate": [0.01, 0.001]})
    base_dir: Path = field(default=Path("."), compare=False, repr=False)

    def validate(self):
        ContractAddress(self.collection.contract)
        if self.data.start > self.data.end:
            raise ValidationError(f"data.start {self.data.start} is after data.end {self.data.end}")
        if self.collection.release_date > self.data.end:
            raise ValidationError("collection.release_date is after data.end")
        if not self.collection.search_term.strip():
            raise ValidationError("collection.search_term must be non-empty")
        if self.data.mode not in ("live", "replay", "record"):
            raise ValidationError(f"data.mode must be live, replay or record, got {self.data.mode!r}")
        if self.data.mode == "replay" and not self.path(self.data.fixtures).is_dir():
            raise ConfigError(f"fixture directory {self.path(self.data.fixtures)} does not exist")
        preset_columns(self.frame.preset, self.data.tickers)
        self.split_config()
        if not self.regress.vif_threshold >= 1:
            raise ValidationError("regress.vif_threshold must be >= 1")
        if not 0 < self.regress.p_threshold < 1:
            raise ValidationError("regress.p_threshold must lie in (0, 1)")
        if self.rnn.mode not in ("univariate", "multivariate"):
            raise ValidationError(f"rnn.mode must be univariate or multivariate, got {self.rnn.mode!r}")
        self.rnn_config()
        unknown = sorted(set(self.gridsearch) - set(GRID_KEYS) - {"workers"})
        if unknown:
            raise ValidationError(f"unsupported gridsearch key(s) {unknown}")
        return self

    def path(self, p):
        p = Path(p)
        return p if p.is_absolute() else self.base_dir / p

    def split_config(self):
        return SplitConfig(self.frame.train, self.frame.val, self.frame.test)

    def rnn_config(self, input_dim=1):
        r = asdict(self.rnn)
        r.pop("mode")
        return RnnConfig(**r, seed=self.seed, input_dim=input_dim)

    def to_dict(self):
        d = {"seed": self.seed, "out": self.out}
        for section in ("collection", "data", "frame", "regress", "rnn"):
            d[section] = asdict(getattr(self, section))
        d["gridsearch"] = {k: list(v) if isinstance(v, (list, tuple)) else v
                           for k, v in self.gridsearch.items()}
        return d

    @classmethod
    def from_dict(cls, d, base_dir=Path(".")):
        sections = {"collection": CollectionSection, "data": DataSection, "frame": FrameSection,
                    "regress": RegressSection, "rnn": RnnSection}
        known = {"seed", "out", "gridsearch", *sections}
        unknown = sorted(set(d) - known)
        if unknown:
            raise ConfigError(f"unknown config key(s) {unknown}")
        kwargs = {"base_dir": Path(base_dir)}
        for key in ("seed", "out"):
            if key in d:
                kwargs[key] = d[key]
        for key, typ in sections.items():
            if key in d:
                allowed = {f.name for f in fields(typ)}
                extra = sorted(set(d[key]) - allowed)
                if extra:
                    raise ConfigError(f"unknown key(s) {extra} in [{key}]")
                kwargs[key] = typ(**d[key])
        if "gridsearch" in d:
            kwargs["gridsearch"] = dict(d["gridsearch"])
        return cls(**kwargs)


def loads(text, base_dir=Path(".")):
    try:
        doc = tomli.loads(text)
    except tomli.TOMLDecodeError as exc:
        raise ConfigError(f"invalid config: {exc}") from None
    return PipelineConfig.from_dict(doc, base_dir)


def dumps(config):
    return tomli_w.dumps(config.to_dict())


def load(path):
    path = Path(path)
    if not path.is_file():
        raise ConfigError(f"config file {path} does not exist")
    return loads(path.read_text(), path.parent)
