import datetime as dt
import json

import numpy as np
import pytest

from nftappraise import frame as fr
from nftappraise import synthetic
from nftappraise.errors import ValidationError
from nftappraise.rnn import (
    Parameters, RnnConfig, average_percent_error, backward, clip_gradients,
    expected_shapes, forecast, forward, grid_search, init_params, load_checkpoint,
    loss_and_grads, make_windows, save_checkpoint, stack, train,
)
from nftappraise.rnn.grid import derive_seed, expand

import oracles

CELLS = ("vanilla", "gru", "lstm")


def perturbed_params(config, seed):
    """Initialized weights plus non-zero biases so every gate path is exercised."""
    rng = np.random.default_rng(seed)
    p = init_params(config, rng)
    for k in p:
        p[k] = p[k] + 0.3 * rng.normal(size=p[k].shape)
    return p


def random_batch(config, seed, B=3):
    rng = np.random.default_rng(seed + 1)
    return rng.normal(size=(B, config.seq_len, config.input_dim)), rng.normal(size=B)


def zero_params(config):
    return Parameters({k: np.zeros(s) for k, s in expected_shapes(config).items()})


class TestForward:
    @pytest.mark.parametrize("steps", [1, 2, 5])
    def test_gru_zero_weights_halves_state(self, steps):
        cfg = RnnConfig(cell="gru", num_blocks=1, hidden_dim=3, seq_len=steps)
        params = zero_params(cfg)
        params["readout.W"] = np.eye(3)[:, :1]
        v = np.array([0.8, -2.0, 4.0])
        _, state = forward(cfg, params, np.ones((1, steps, 1)), h0=v)
        np.testing.assert_allclose(state.top[0], v / 2 ** steps, rtol=1e-15)

    def test_vanilla_zero_weights_gives_readout_bias(self):
        cfg = RnnConfig(cell="vanilla", num_blocks=2, hidden_dim=4)
        params = zero_params(cfg)
        params["readout.b"] = np.array([1.25])
        pred, _ = forward(cfg, params, np.random.default_rng(0).normal(size=(6, 5, 1)))
        np.testing.assert_array_equal(pred, np.full(6, 1.25))

    def test_deterministic(self):
        cfg = RnnConfig(seed=42)
        w = np.random.default_rng(0).normal(size=(4, 5, 1))
        a, _ = forward(cfg, init_params(cfg), w)
        b, _ = forward(cfg, init_params(cfg), w)
        assert a.tobytes() == b.tobytes()

    def test_batch_rows_independent(self):
        cfg = RnnConfig(cell="lstm", num_blocks=2, hidden_dim=5)
        params = init_params(cfg)
        w = np.random.default_rng(1).normal(size=(4, 5, 1))
        batched, _ = forward(cfg, params, w)
        single = [forward(cfg, params, w[i])[0][0] for i in range(4)]
        np.testing.assert_allclose(batched, single, rtol=1e-14)

    def test_shape_mismatch(self):
        cfg = RnnConfig(input_dim=2)
        with pytest.raises(ValidationError):
            forward(cfg, init_params(cfg), np.zeros((1, 5, 3)))
        with pytest.raises(ValidationError):
            forward(cfg, init_params(RnnConfig(input_dim=1)), np.zeros((1, 5, 2)))

    def test_xavier_bounds_and_zero_bias(self):
        cfg = RnnConfig(cell="lstm", hidden_dim=8, num_blocks=2, input_dim=3)
        p = init_params(cfg)
        assert np.all(np.abs(p["layer0.W"]) <= np.sqrt(6 / (3 + 8)))
        assert np.all(np.abs(p["layer1.U"]) <= np.sqrt(6 / 16))
        assert not np.any(p["layer0.b"]) and not np.any(p["readout.b"])


class TestGradients:
    @pytest.mark.parametrize("cell", CELLS)
    @pytest.mark.parametrize("blocks", [1, 2])
    def test_finite_differences(self, cell, blocks):
        cfg = RnnConfig(cell=cell, num_blocks=blocks, hidden_dim=4, input_dim=2)
        params = perturbed_params(cfg, 5)
        X, y = random_batch(cfg, 5)
        _, grads = loss_and_grads(cfg, params, (X, y))
        fd = oracles.finite_difference(lambda p: loss_and_grads(cfg, p, (X, y))[0], params)
        for k in params:
            assert np.max(oracles.relative_error(grads[k], fd[k])) < 1e-4, k

    def test_zero_at_exact_fit(self):
        cfg = RnnConfig(cell="gru", num_blocks=1, hidden_dim=4)
        params = perturbed_params(cfg, 0)
        X, _ = random_batch(cfg, 0)
        y, _ = forward(cfg, params, X)
        loss, grads = loss_and_grads(cfg, params, (X, y))
        assert loss == 0.0
        assert grads.norm() == 0.0

    def test_duplicated_batch(self):
        cfg = RnnConfig(cell="lstm", num_blocks=2, hidden_dim=4)
        params = perturbed_params(cfg, 1)
        X, y = random_batch(cfg, 1, B=4)
        l1, g1 = loss_and_grads(cfg, params, (X, y))
        l2, g2 = loss_and_grads(cfg, params, (np.concatenate([X, X]), np.concatenate([y, y])))
        assert l1 == pytest.approx(l2, rel=1e-14)
        for k in g1:
            np.testing.assert_allclose(g2[k], g1[k], rtol=1e-12, atol=1e-15)

    def test_backward_is_linear_in_dpred(self):
        cfg = RnnConfig(cell="vanilla", num_blocks=2, hidden_dim=3)
        params = perturbed_params(cfg, 2)
        X, _ = random_batch(cfg, 2)
        _, state = forward(cfg, params, X)
        a = backward(cfg, params, state, [1.0, 0.0, 0.0])
        b = backward(cfg, params, state, [0.0, 2.0, -1.0])
        c = backward(cfg, params, state, [1.0, 2.0, -1.0])
        for k in a:
            np.testing.assert_allclose(a[k] + b[k], c[k], atol=1e-13)

    def test_clip(self):
        cfg = RnnConfig(cell="gru", num_blocks=1, hidden_dim=4)
        g = perturbed_params(cfg, 3)
        for k in g:
            g[k] = g[k] * 100
        clip_gradients(g, 5.0)
        assert g.norm() == pytest.approx(5.0, rel=1e-12)
        small = perturbed_params(cfg, 3)
        for k in small:
            small[k] = small[k] * 1e-3
        before = small.copy()
        assert clip_gradients(small, 5.0) == before


class TestWindows:
    def _frame(self, values, extra=None):
        n = len(values)
        dates = tuple(dt.date(2022, 1, 1) + dt.timedelta(days=i) for i in range(n))
        cols = {fr.PRICE: np.asarray(values, dtype=float)}
        cols.update(extra or {})
        return fr.FeatureFrame(dates, cols, np.arange(n) + 1.0)

    def test_count(self):
        assert len(make_windows(self._frame(range(1, 8)), 5)) == 2

    def test_first_window(self):
        s = make_windows(self._frame(range(1, 7)), 5)
        assert len(s) == 1
        np.testing.assert_array_equal(s[0].window[:, 0], [1, 2, 3, 4, 5])
        assert s[0].target == 6

    def test_multivariate_width(self):
        names = [n for n in fr.CANONICAL_COLUMNS if n != fr.PRICE][:16]
        extra = {n: np.arange(10.0) + i for i, n in enumerate(names)}
        s = make_windows(self._frame(range(1, 11), extra), 5, mode="multivariate")
        assert s[0].window.shape == (5, 17)

    def test_too_short(self):
        with pytest.raises(ValidationError):
            make_windows(self._frame(range(5)), 5)


class TestTrain:
    def _segments(self):
        f = synthetic.sinusoid_frame()
        train_f, val_f, test_f = fr.split(f)
        stats = fr.fit_normalizer(train_f, [fr.PRICE])
        return train_f, val_f, test_f, stats

    def test_zero_epochs(self):
        tr, va, _, stats = self._segments()
        cfg = RnnConfig(cell="gru", num_blocks=1, hidden_dim=4, epochs=0)
        params, report = train(cfg, fr.apply_normalizer(stats, tr), fr.apply_normalizer(stats, va), stats)
        assert params == init_params(cfg)
        assert report.train_loss == [] and report.val_ape == []

    def test_same_seed_same_report(self):
        tr, va, _, stats = self._segments()
        cfg = RnnConfig(cell="lstm", num_blocks=1, hidden_dim=4, epochs=30)
        a = train(cfg, fr.apply_normalizer(stats, tr), fr.apply_normalizer(stats, va), stats)
        b = train(cfg, fr.apply_normalizer(stats, tr), fr.apply_normalizer(stats, va), stats)
        assert a[0] == b[0] and a[1] == b[1]

    def test_loss_decreases_early(self):
        tr, va, _, stats = self._segments()
        cfg = RnnConfig(cell="gru", num_blocks=1, hidden_dim=8, epochs=20)
        _, report = train(cfg, fr.apply_normalizer(stats, tr), fr.apply_normalizer(stats, va), stats)
        assert report.train_loss[-1] < report.train_loss[0]


class TestPercentError:
    def test_examples(self):
        assert average_percent_error([3.0, 4.0], [3.0, 4.0]) == 0.0
        assert average_percent_error([2.0], [1.0]) == 100.0
        assert average_percent_error([1.0, 3.0], [2.0, 2.0]) == 50.0

    def test_zero_truth(self):
        with pytest.raises(ValidationError):
            average_percent_error([1.0], [0.0])


class TestGrid:
    def _segments(self):
        f = synthetic.sinusoid_frame(n=60)
        tr, va, _ = fr.split(f)
        stats = fr.fit_normalizer(tr, [fr.PRICE])
        return fr.apply_normalizer(stats, tr), fr.apply_normalizer(stats, va), stats

    def test_single_config(self):
        tr, va, stats = self._segments()
        base = RnnConfig(num_blocks=1, hidden_dim=4, epochs=5)
        best, results = grid_search({"cell": ["lstm"]}, tr, va, stats, base=base)
        assert len(results) == 1 and best.config.cell == "lstm"

    def test_duplicate_entries_identical(self):
        tr, va, stats = self._segments()
        base = RnnConfig(num_blocks=1, hidden_dim=4, epochs=10)
        _, results = grid_search({"cell": ["gru", "gru"]}, tr, va, stats, base=base)
        a, b = results
        assert a.report == b.report and a.params == b.params

    def test_reference_config_present(self):
        tr, va, stats = self._segments()
        base = RnnConfig(epochs=10)
        _, results = grid_search({"cell": ["gru"], "num_blocks": [3], "hidden_dim": [16],
                                  "learning_rate": [0.01], "seq_len": [5]}, tr, va, stats, base=base)
        (r,) = results
        assert (r.config.cell, r.config.num_blocks, r.config.hidden_dim,
                r.config.learning_rate, r.config.seq_len) == ("gru", 3, 16, 0.01, 5)
        assert np.isfinite(r.report.final_val_ape)

    def test_seed_derivation_ignores_order(self):
        base = RnnConfig(seed=7)
        a = expand({"cell": ["gru", "lstm"], "hidden_dim": [4, 8]}, base)
        b = expand({"hidden_dim": [8, 4], "cell": ["lstm", "gru"]}, base)
        assert {c.seed for c in a} == {c.seed for c in b}
        assert len({c.seed for c in a}) == 4
        assert derive_seed(7, a[0]) == a[0].seed

    def test_unknown_key(self):
        with pytest.raises(ValidationError):
            expand({"momentum": [0.9]}, RnnConfig())


class TestForecastAndCheckpoint:
    def test_one_row(self):
        f = synthetic.sinusoid_frame(n=6)
        cfg = RnnConfig(cell="vanilla", num_blocks=1, hidden_dim=3)
        series = forecast(init_params(cfg), cfg, f)
        assert len(series) == 1 and series.dates == (f.dates[5],)

    def test_denormalization_identity(self):
        f = synthetic.sinusoid_frame(n=40)
        stats = fr.fit_normalizer(f, [fr.PRICE])
        cfg = RnnConfig(cell="gru", num_blocks=1, hidden_dim=4)
        params = perturbed_params(cfg, 0)
        series = forecast(params, cfg, f, stats)
        X, _ = stack(make_windows(fr.apply_normalizer(stats, f), cfg.seq_len))
        z, _ = forward(cfg, params, X)
        direct = z * stats.std[fr.PRICE] + stats.mean[fr.PRICE]
        np.testing.assert_allclose(series.predicted_price, direct, rtol=1e-9)
        np.testing.assert_array_equal(series.true_price, f.columns[fr.PRICE][5:])

    def test_checkpoint_round_trip(self, tmp_path):
        f = synthetic.sinusoid_frame(n=30)
        stats = fr.fit_normalizer(f, [fr.PRICE])
        cfg = RnnConfig(cell="lstm", num_blocks=2, hidden_dim=3)
        params = perturbed_params(cfg, 4)
        save_checkpoint(tmp_path / "c.json", cfg, params, stats, extra={"note": 1})
        cfg2, params2, stats2, mode, extra = load_checkpoint(tmp_path / "c.json")
        assert cfg2 == cfg and params2 == params and mode == "univariate" and extra == {"note": 1}
        assert stats2.to_dict() == stats.to_dict()

    def test_checkpoint_shape_mismatch(self, tmp_path):
        cfg = RnnConfig(cell="gru", num_blocks=1, hidden_dim=3)
        save_checkpoint(tmp_path / "c.json", cfg, init_params(cfg))
        doc = json.loads((tmp_path / "c.json").read_text())
        doc["config"]["hidden_dim"] = 4
        (tmp_path / "c.json").write_text(json.dumps(doc))
        with pytest.raises(ValidationError):
            load_checkpoint(tmp_path / "c.json")
