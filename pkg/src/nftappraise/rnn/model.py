"""Recurrent cells (vanilla, GRU, LSTM) with hand-written backprop through time.

All computations are batched: an input batch has shape ``(B, T, D)``
and every layer keeps its hidden state as ``(B, H)``. Gate weights are
stored concatenated along the output axis:

    vanilla  W (D, H),  U (H, H),  b (H,)
    gru      W (D, 3H), U (H, 3H), b (3H,)   gate order z, r, candidate
    lstm     W (D, 4H), U (H, 4H), b (4H,)   gate order i, f, o, g

Stacked layers feed their full hidden sequence to the next layer; the
affine readout maps the top layer's final state to a scalar.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass

import numpy as np

from ..errors import ValidationError

CELLS = ("vanilla", "gru", "lstm")
GATES = {"vanilla": 1, "gru": 3, "lstm": 4}


@dataclass(frozen=True)
class RnnConfig:
    cell: str = "gru"
    num_blocks: int = 3
    hidden_dim: int = 16
    learning_rate: float = 0.01
    seq_len: int = 5
    epochs: int = 500
    seed: int = 42
    input_dim: int = 1
    clip_norm: float = 5.0

    def __post_init__(self):
        if self.cell not in CELLS:
            raise ValidationError(f"unknown cell {self.cell!r}; expected one of {CELLS}")
        for name in ("num_blocks", "hidden_dim", "seq_len", "input_dim"):
            if int(getattr(self, name)) < 1:
                raise ValidationError(f"{name} must be >= 1, got {getattr(self, name)}")
        if self.epochs < 0:
            raise ValidationError(f"epochs must be >= 0, got {self.epochs}")
        if not self.learning_rate > 0:
            raise ValidationError(f"learning_rate must be > 0, got {self.learning_rate}")
        if not self.clip_norm > 0:
            raise ValidationError(f"clip_norm must be > 0, got {self.clip_norm}")

    def to_dict(self):
        return asdict(self)

    def replace(self, **changes):
        return RnnConfig(**{**asdict(self), **changes})


class Parameters:
    """Named float64 tensors for every layer plus the readout.

    Names are ``layer{l}.W``, ``layer{l}.U``, ``layer{l}.b``, ``readout.W``
    and ``readout.b``. Iteration order is fixed, which keeps flattening and
    norm computations reproducible.
    """

    def __init__(self, tensors):
        self.tensors = {k: np.asarray(v, dtype=np.float64) for k, v in tensors.items()}

    def __getitem__(self, name):
        return self.tensors[name]

    def __setitem__(self, name, value):
        self.tensors[name] = value

    def __iter__(self):
        return iter(self.tensors)

    def items(self):
        return self.tensors.items()

    def copy(self):
        return Parameters({k: v.copy() for k, v in self.tensors.items()})

    def zeros_like(self):
        return Parameters({k: np.zeros_like(v) for k, v in self.tensors.items()})

    def norm(self):
        return float(np.sqrt(sum(float(np.sum(v * v)) for v in self.tensors.values())))

    def count(self):
        return int(sum(v.size for v in self.tensors.values()))

    def all_finite(self):
        return all(np.all(np.isfinite(v)) for v in self.tensors.values())

    def shapes(self):
        return {k: v.shape for k, v in self.tensors.items()}

    def __eq__(self, other):
        if not isinstance(other, Parameters) or list(self) != list(other):
            return False
        return all(np.array_equal(self[k], other[k]) for k in self)


def expected_shapes(config):
    h, k = config.hidden_dim, GATES[config.cell]
    shapes = {}
    for layer in range(config.num_blocks):
        d = config.input_dim if layer == 0 else h
        shapes[f"layer{layer}.W"] = (d, k * h)
        shapes[f"layer{layer}.U"] = (h, k * h)
        shapes[f"layer{layer}.b"] = (k * h,)
    shapes["readout.W"] = (h, 1)
    shapes["readout.b"] = (1,)
    return shapes


def check_shapes(config, params):
    want = expected_shapes(config)
    got = params.shapes()
    if want != got:
        raise ValidationError(f"parameter shapes {got} do not match config {want}")


def _xavier(rng, fan_in, fan_out, shape):
    bound = np.sqrt(6.0 / (fan_in + fan_out))
    return rng.uniform(-bound, bound, size=shape)


def init_params(config, rng=None):
    """Uniform Xavier weights per gate block, zero biases."""
    if rng is None:
        rng = np.random.default_rng(config.seed)
    h, k = config.hidden_dim, GATES[config.cell]
    tensors = {}
    for layer in range(config.num_blocks):
        d = config.input_dim if layer == 0 else h
        tensors[f"layer{layer}.W"] = np.concatenate(
            [_xavier(rng, d, h, (d, h)) for _ in range(k)], axis=1)
        tensors[f"layer{layer}.U"] = np.concatenate(
            [_xavier(rng, h, h, (h, h)) for _ in range(k)], axis=1)
        tensors[f"layer{layer}.b"] = np.zeros(k * h)
    tensors["readout.W"] = _xavier(rng, h, 1, (h, 1))
    tensors["readout.b"] = np.zeros(1)
    return Parameters(tensors)


def _sigmoid(a):
    # split by sign so exp never overflows
    out = np.empty_like(a)
    pos = a >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-a[pos]))
    e = np.exp(a[~pos])
    out[~pos] = e / (1.0 + e)
    return out


# -- single-step cells ------------------------------------------------------
# Each step function returns (h_new, c_new, cache); c is None except for LSTM.

def _vanilla_step(x, h, c, W, U, b):
    hn = np.tanh(x @ W + h @ U + b)
    return hn, None, (x, h, hn)


def _vanilla_back(dh, dc, cache, W, U, grads):
    x, h, hn = cache
    da = dh * (1.0 - hn * hn)
    grads[0] += x.T @ da
    grads[1] += h.T @ da
    grads[2] += da.sum(axis=0)
    return da @ W.T, da @ U.T, None


def _gru_step(x, h, c, W, U, b):
    H = h.shape[1]
    xw = x @ W + b
    hu = h @ U[:, :2 * H]
    z = _sigmoid(xw[:, :H] + hu[:, :H])
    r = _sigmoid(xw[:, H:2 * H] + hu[:, H:])
    rh = r * h
    cand = np.tanh(xw[:, 2 * H:] + rh @ U[:, 2 * H:])
    hn = (1.0 - z) * h + z * cand
    return hn, None, (x, h, z, r, rh, cand)


def _gru_back(dh, dc, cache, W, U, grads):
    x, h, z, r, rh, cand = cache
    H = h.shape[1]
    dz = dh * (cand - h)
    dcand = dh * z
    dh_prev = dh * (1.0 - z)
    da_c = dcand * (1.0 - cand * cand)
    drh = da_c @ U[:, 2 * H:].T
    dr = drh * h
    dh_prev += drh * r
    da_z = dz * z * (1.0 - z)
    da_r = dr * r * (1.0 - r)
    da = np.concatenate([da_z, da_r, da_c], axis=1)
    grads[0] += x.T @ da
    grads[1][:, :2 * H] += h.T @ da[:, :2 * H]
    grads[1][:, 2 * H:] += rh.T @ da_c
    grads[2] += da.sum(axis=0)
    dh_prev += da[:, :2 * H] @ U[:, :2 * H].T
    return da @ W.T, dh_prev, None


def _lstm_step(x, h, c, W, U, b):
    H = h.shape[1]
    a = x @ W + h @ U + b
    i = _sigmoid(a[:, :H])
    f = _sigmoid(a[:, H:2 * H])
    o = _sigmoid(a[:, 2 * H:3 * H])
    g = np.tanh(a[:, 3 * H:])
    cn = f * c + i * g
    tc = np.tanh(cn)
    hn = o * tc
    return hn, cn, (x, h, c, i, f, o, g, tc)


def _lstm_back(dh, dc, cache, W, U, grads):
    x, h, c, i, f, o, g, tc = cache
    do = dh * tc
    dcn = dc + dh * o * (1.0 - tc * tc)
    di = dcn * g
    df = dcn * c
    dg = dcn * i
    da = np.concatenate([
        di * i * (1.0 - i),
        df * f * (1.0 - f),
        do * o * (1.0 - o),
        dg * (1.0 - g * g),
    ], axis=1)
    grads[0] += x.T @ da
    grads[1] += h.T @ da
    grads[2] += da.sum(axis=0)
    return da @ W.T, da @ U.T, dcn * f


_STEP = {"vanilla": _vanilla_step, "gru": _gru_step, "lstm": _lstm_step}
_BACK = {"vanilla": _vanilla_back, "gru": _gru_back, "lstm": _lstm_back}


@dataclass
class ForwardState:
    """Everything backward() needs: per-layer per-step caches and the top state."""
    caches: list
    top: np.ndarray
    pred: np.ndarray


def _as_batch(config, windows):
    x = np.asarray(windows, dtype=np.float64)
    if x.ndim == 2:
        x = x[None]
    if x.ndim != 3 or x.shape[2] != config.input_dim:
        raise ValidationError(
            f"window shape {np.shape(windows)} incompatible with input_dim={config.input_dim}")
    return x


def forward(config, params, windows, h0=None):
    """Run the stacked network over ``windows`` (``(B, T, D)`` or ``(T, D)``).

    Returns ``(pred, state)``: ``pred`` has shape ``(B,)``. ``h0`` optionally
    overrides the zero initial hidden state of every layer (shape ``(H,)``
    or ``(B, H)``).
    """
    check_shapes(config, params)
    x = _as_batch(config, windows)
    B, T, _ = x.shape
    H = config.hidden_dim
    step = _STEP[config.cell]
    caches = []
    seq = x
    for layer in range(config.num_blocks):
        W, U, b = (params[f"layer{layer}.{n}"] for n in "WUb")
        h = np.zeros((B, H)) if h0 is None else np.broadcast_to(h0, (B, H)).astype(np.float64)
        c = np.zeros((B, H)) if config.cell == "lstm" else None
        out = np.empty((B, T, H))
        layer_cache = []
        for t in range(T):
            h, c, cache = step(seq[:, t, :], h, c, W, U, b)
            out[:, t, :] = h
            layer_cache.append(cache)
        caches.append(layer_cache)
        seq = out
    top = seq[:, -1, :]
    pred = (top @ params["readout.W"])[:, 0] + params["readout.b"][0]
    return pred, ForwardState(caches, top, pred)


def backward(config, params, state, dpred):
    """Gradient of a scalar objective given ``dpred = d objective / d pred``."""
    grads = params.zeros_like()
    dpred = np.asarray(dpred, dtype=np.float64).reshape(-1, 1)
    grads["readout.W"] += state.top.T @ dpred
    grads["readout.b"] += dpred.sum(axis=0)
    back = _BACK[config.cell]
    B = dpred.shape[0]
    H = config.hidden_dim
    T = len(state.caches[0])
    # gradient flowing into the top layer's hidden output at each step
    dseq = np.zeros((B, T, H))
    dseq[:, -1, :] = dpred @ params["readout.W"].T
    for layer in reversed(range(config.num_blocks)):
        W, U = params[f"layer{layer}.W"], params[f"layer{layer}.U"]
        g = [grads[f"layer{layer}.{n}"] for n in "WUb"]
        dh = np.zeros((B, H))
        dc = np.zeros((B, H)) if config.cell == "lstm" else None
        din = np.zeros((B, T, W.shape[0]))
        for t in reversed(range(T)):
            dx, dh, dc = back(dh + dseq[:, t, :], dc, state.caches[layer][t], W, U, g)
            din[:, t, :] = dx
        dseq = din
    return grads
