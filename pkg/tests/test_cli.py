import csv
import json
import shutil

import numpy as np
import pytest

from nftappraise import config as cfgmod
from nftappraise import frame as fr
from nftappraise import synthetic
from nftappraise.cli import main
from nftappraise.errors import ConfigError, ValidationError

from conftest import CONFIG, FIXTURES


def write_config(tmp_path, **changes):
    """Copy of the shipped config with absolute paths and ``section.key`` overrides."""
    cfg = cfgmod.load(CONFIG)
    cfg.data.events = str(cfg.path(cfg.data.events).resolve())
    cfg.data.fixtures = str(cfg.path(cfg.data.fixtures).resolve())
    cfg.out = str(tmp_path / "out")
    for key, value in changes.items():
        section, _, name = key.partition("__")
        setattr(getattr(cfg, section), name, value) if name else setattr(cfg, section, value)
    path = tmp_path / "config.toml"
    path.write_text(cfgmod.dumps(cfg))
    return path


def run(*argv):
    return main([str(a) for a in argv])


class TestConfig:
    def test_round_trip(self):
        cfg = cfgmod.load(CONFIG)
        again = cfgmod.loads(cfgmod.dumps(cfg), cfg.base_dir)
        assert again == cfg

    def test_shipped_config_valid(self):
        cfg = cfgmod.load(CONFIG).validate()
        assert cfg.rnn_config().to_dict()["num_blocks"] == 3

    def test_unknown_key(self):
        with pytest.raises(ConfigError, match="bogus"):
            cfgmod.loads("[rnn]\nbogus = 1\n")

    def test_bad_address(self, tmp_path):
        cfg = cfgmod.loads('[collection]\ncontract = "0xBC4CAoEdA7647A8aB7C2061c2E118A18a936f13D"\n',
                           FIXTURES)
        cfg.data.fixtures = "replay"
        with pytest.raises(ValidationError):
            cfg.validate()


class TestIngestBuild:
    def test_replay_idempotent(self, tmp_path):
        conf = write_config(tmp_path)
        assert run("ingest", "--config", conf) == 0
        first = {p.name: p.read_bytes() for p in (tmp_path / "out" / "raw").iterdir()}
        assert run("ingest", "--config", conf) == 0
        second = {p.name: p.read_bytes() for p in (tmp_path / "out" / "raw").iterdir()}
        assert first == second and set(first) == {"nft.csv", "market.csv", "trends.csv"}

    def test_live_without_key(self, tmp_path, monkeypatch, capsys):
        for var in ("APPRAISE_NFT_API_KEY", "APPRAISE_MARKET_API_KEY", "APPRAISE_TRENDS_API_KEY"):
            monkeypatch.delenv(var, raising=False)
        conf = write_config(tmp_path, data__mode="live")
        assert run("ingest", "--config", conf) == 1
        out = capsys.readouterr().out
        assert "APPRAISE_NFT_API_KEY" in out and "APPRAISE_MARKET_API_KEY" in out

    def test_partial_failure(self, tmp_path, capsys):
        fixtures = tmp_path / "fx"
        shutil.copytree(FIXTURES / "replay", fixtures)
        next(fixtures.glob("search_trends-*")).unlink()
        conf = write_config(tmp_path, data__fixtures=str(fixtures))
        assert run("ingest", "--config", conf) == 1
        lines = capsys.readouterr().out.splitlines()
        status = {line.split()[0]: line.split()[1] for line in lines}
        assert status == {"nft_market": "ok", "public_market": "ok", "search_trends": "FAILED:"}

    def test_build_row_count(self, tmp_path):
        conf = write_config(tmp_path)
        assert run("ingest", "--config", conf) == 0
        assert run("build", "--config", conf) == 0
        f = fr.from_csv(tmp_path / "out" / "frame.csv")
        assert len(f) == 30
        assert len(f.names) == 18

    def test_extended_needs_events(self, tmp_path):
        conf = write_config(tmp_path, data__events=str(tmp_path / "missing.csv"))
        assert run("ingest", "--config", conf) == 0
        assert run("build", "--config", conf) == 1
        assert run("build", "--config", conf, "--preset", "initial") == 0

    def test_weekend_only_nft(self, tmp_path, capsys):
        conf = write_config(tmp_path)
        assert run("ingest", "--config", conf) == 0
        nft = tmp_path / "out" / "raw" / "nft.csv"
        rows = list(csv.reader(nft.open()))
        import datetime as dt
        keep = [rows[0]] + [r for r in rows[1:] if dt.date.fromisoformat(r[0]).weekday() >= 5]
        with nft.open("w", newline="") as fh:
            csv.writer(fh, lineterminator="\n").writerows(keep)
        assert run("build", "--config", conf) == 1
        assert "coverage" in capsys.readouterr().err


class TestRegress:
    def test_synthetic_recovery(self, tmp_path):
        fr.to_csv(synthetic.linear_frame(seed=0), tmp_path / "lin.csv")
        conf = write_config(tmp_path)
        assert run("regress", "--config", conf, "--frame", tmp_path / "lin.csv") == 0
        rows = list(csv.DictReader((tmp_path / "out" / "regress" / "final_table.csv").open()))
        coef = {r["Predictor"]: float(r["Coeff"]) for r in rows}
        assert coef["x1"] == pytest.approx(2.0, rel=0.01)
        assert coef["x2"] == pytest.approx(3.0, rel=0.01)

    def test_collinear(self, tmp_path):
        fr.to_csv(synthetic.collinear_frame(seed=0), tmp_path / "col.csv")
        conf = write_config(tmp_path)
        assert run("regress", "--config", conf, "--frame", tmp_path / "col.csv") == 0
        trace = json.loads((tmp_path / "out" / "regress" / "trace.json").read_text())
        assert trace["steps"]
        rows = list(csv.DictReader((tmp_path / "out" / "regress" / "final_table.csv").open()))
        assert max(float(r["VIF"]) for r in rows if r["VIF"]) < 10

    def test_two_rows(self, tmp_path, capsys):
        f = synthetic.linear_frame(seed=0, n=2)
        fr.to_csv(f, tmp_path / "tiny.csv")
        conf = write_config(tmp_path)
        assert run("regress", "--config", conf, "--frame", tmp_path / "tiny.csv") == 1
        assert "insufficient observations" in capsys.readouterr().err


class TestTrainEvaluate:
    def test_reference_config_on_sinusoid(self, tmp_path):
        conf = write_config(tmp_path, rnn__epochs=500)
        frame = FIXTURES / "sinusoid_frame.csv"
        assert run("train", "--config", conf, "--frame", frame) == 0
        metrics = json.loads((tmp_path / "out" / "rnn" / "metrics.json").read_text())
        assert metrics["train_ape"] < 5.0
        assert run("evaluate", "--config", conf, "--frame", frame) == 0
        first = {p.name: p.read_bytes() for p in (tmp_path / "out" / "evaluate").iterdir()}
        assert run("evaluate", "--config", conf, "--frame", frame) == 0
        second = {p.name: p.read_bytes() for p in (tmp_path / "out" / "evaluate").iterdir()}
        assert first == second
        ev = json.loads((tmp_path / "out" / "evaluate" / "evaluation.json").read_text())
        assert abs(ev["train_ape"] - metrics["train_ape"]) <= 1e-9

    def test_grid_two_by_two(self, tmp_path):
        conf = write_config(tmp_path, gridsearch={"cell": ["vanilla", "gru"], "hidden_dim": [4, 8]},
                            rnn__num_blocks=1, rnn__epochs=20)
        assert run("gridsearch", "--config", conf, "--frame", FIXTURES / "sinusoid_frame.csv") == 0
        rows = list(csv.DictReader((tmp_path / "out" / "gridsearch" / "grid.csv").open()))
        assert len(rows) == 4
        assert sorted(r["best"] for r in rows) == ["0", "0", "0", "1"]
