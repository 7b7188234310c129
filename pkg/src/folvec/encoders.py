"""Character-level sequence encoders: CNN, BiLSTM, WaveNet, Transformer.

Each encoder maps a formula string to a fixed-size real vector.  All four
share the same interface: build one with `build_encoder`, run it with
`encode_batch`, persist with `save` / `load`.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, asdict, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from . import tensor_autodiff as ta
from .tensor_autodiff import Tensor

PAD_ID = 0
UNK_ID = 1

ARCHS = ("cnn", "bilstm", "wavenet", "transformer")


@dataclass
class EncoderConfig:
    arch: str = "cnn"
    token_dim: int = 128
    output_dim: int = 128
    layers: int = 6           # BiLSTM default is 2, see build_encoder
    heads: int = 8            # transformer only
    max_len: int = 256
    head_layers: int = 0      # optional fully connected head
    projection_dim: Optional[int] = None
    ff_dim: Optional[int] = None  # transformer feed-forward width
    cnn_filters: Optional[tuple] = None  # per-layer channel counts

    def __post_init__(self):
        if self.arch not in ARCHS:
            raise ValueError(f"unknown arch {self.arch!r}; pick from {ARCHS}")
        if self.output_dim < 1:
            raise ValueError("output_dim must be positive")
        if self.arch == "transformer" and self.token_dim % self.heads != 0:
            raise ValueError("heads must divide token_dim")
        if self.cnn_filters is not None:
            self.cnn_filters = tuple(self.cnn_filters)

    @property
    def encoding_dim(self) -> int:
        """Dimension of the final formula encoding."""
        return self.projection_dim or self.output_dim

    def to_dict(self) -> dict:
        d = asdict(self)
        if d["cnn_filters"] is not None:
            d["cnn_filters"] = list(d["cnn_filters"])
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "EncoderConfig":
        return cls(**d)


def explicit_cnn_config(**overrides) -> EncoderConfig:
    """Explicit-approach CNN preset: 9 conv/pool layers with increasing
    filter sizes (an 8-layer variant exists; pass layers=8)."""
    layers = overrides.pop("layers", 9)
    filters = tuple(min(128, 2 ** (i + 2)) for i in range(layers))
    return EncoderConfig(arch="cnn", layers=layers, cnn_filters=filters,
                         **overrides)


def explicit_bilstm_config(**overrides) -> EncoderConfig:
    """Explicit-approach LSTM preset: 3 bidirectional layers of size 256."""
    overrides.setdefault("layers", 3)
    overrides.setdefault("token_dim", 256)
    return EncoderConfig(arch="bilstm", **overrides)


# ---------------------------------------------------------------------------
# Vocabulary


def build_vocab(corpus: Sequence[str]) -> Dict[str, int]:
    """Character -> id, reserving PAD=0 and UNK=1; deterministic order."""
    vocab: Dict[str, int] = {}
    for c in sorted({c for line in corpus for c in line}):
        vocab[c] = len(vocab) + 2
    return vocab


def string_to_ids(s: str, vocab: Dict[str, int], max_len: int) -> List[int]:
    return [vocab.get(c, UNK_ID) for c in s[:max_len]]


# ---------------------------------------------------------------------------
# Model


class EncoderModel:
    def __init__(self, config: EncoderConfig, vocab: Dict[str, int],
                 params: Dict[str, Tensor]):
        self.config = config
        self.vocab = vocab
        self.params = params

    @property
    def encoding_dim(self) -> int:
        return self.config.encoding_dim


def _init_params(config: EncoderConfig, vocab_size: int,
                 rng: np.random.RandomState) -> Dict[str, Tensor]:
    d = config.token_dim
    out = config.output_dim
    P: Dict[str, Tensor] = {}

    def par(name, arr):
        P[name] = ta.parameter(arr, name=name)

    par("emb", rng.normal(0, 0.1, size=(vocab_size, d)).astype(ta.default_dtype()))

    if config.arch == "cnn":
        chans = list(config.cnn_filters or [d] * config.layers)
        cin = d
        for i, cout in enumerate(chans):
            par(f"conv{i}.w", ta.glorot_uniform(rng, (3, cin, cout),
                                                3 * cin, cout))
            par(f"conv{i}.b", np.zeros(cout, dtype=ta.default_dtype()))
            cin = cout
        par("out.w", ta.glorot_uniform(rng, (cin, out), cin, out))
        par("out.b", np.zeros(out, dtype=ta.default_dtype()))

    elif config.arch == "wavenet":
        for i in range(config.layers):
            par(f"conv{i}.w", ta.glorot_uniform(rng, (2, d, d), 2 * d, d))
            par(f"conv{i}.b", np.zeros(d, dtype=ta.default_dtype()))
        par("out.w", ta.glorot_uniform(rng, (d, out), d, out))
        par("out.b", np.zeros(out, dtype=ta.default_dtype()))

    elif config.arch == "bilstm":
        h = d
        for i in range(config.layers):
            cin = d if i == 0 else 2 * h
            for direction in ("fw", "bw"):
                par(f"lstm{i}.{direction}.wx",
                    ta.recurrent_uniform(rng, (cin, 4 * h), cin))
                par(f"lstm{i}.{direction}.wh",
                    ta.recurrent_uniform(rng, (h, 4 * h), h))
                par(f"lstm{i}.{direction}.b",
                    np.zeros(4 * h, dtype=ta.default_dtype()))
        par("out.w", ta.glorot_uniform(rng, (2 * h, out), 2 * h, out))
        par("out.b", np.zeros(out, dtype=ta.default_dtype()))

    elif config.arch == "transformer":
        ff = config.ff_dim or 2 * d
        par("pos", rng.normal(0, 0.1, size=(config.max_len + 1, d))
            .astype(ta.default_dtype()))
        par("agg", rng.normal(0, 0.1, size=(d,)).astype(ta.default_dtype()))
        for i in range(config.layers):
            for nm in ("wq", "wk", "wv", "wo"):
                par(f"attn{i}.{nm}", ta.glorot_uniform(rng, (d, d), d, d))
            par(f"ln1.{i}.g", np.ones(d, dtype=ta.default_dtype()))
            par(f"ln1.{i}.b", np.zeros(d, dtype=ta.default_dtype()))
            par(f"ln2.{i}.g", np.ones(d, dtype=ta.default_dtype()))
            par(f"ln2.{i}.b", np.zeros(d, dtype=ta.default_dtype()))
            par(f"ff{i}.w1", ta.glorot_uniform(rng, (d, ff), d, ff))
            par(f"ff{i}.b1", np.zeros(ff, dtype=ta.default_dtype()))
            par(f"ff{i}.w2", ta.glorot_uniform(rng, (ff, d), ff, d))
            par(f"ff{i}.b2", np.zeros(d, dtype=ta.default_dtype()))
        par("out.w", ta.glorot_uniform(rng, (d, out), d, out))
        par("out.b", np.zeros(out, dtype=ta.default_dtype()))

    # optional head: fully connected layers then projection
    dim = out
    for i in range(config.head_layers):
        par(f"head{i}.w", ta.glorot_uniform(rng, (dim, dim), dim, dim))
        par(f"head{i}.b", np.zeros(dim, dtype=ta.default_dtype()))
    if config.projection_dim:
        par("proj.w", ta.glorot_uniform(rng, (dim, config.projection_dim),
                                        dim, config.projection_dim))
        par("proj.b", np.zeros(config.projection_dim,
                               dtype=ta.default_dtype()))
    return P


def build_encoder(config: EncoderConfig, vocab: Dict[str, int],
                  seed: int = 0) -> EncoderModel:
    if config.arch == "bilstm" and config.layers == 6:
        # paper pins 6 layers for the non-recurrent models only
        config = EncoderConfig(**{**config.to_dict(), "layers": 2})
    rng = np.random.RandomState(seed)
    params = _init_params(config, len(vocab) + 2, rng)
    return EncoderModel(config, vocab, params)


# ---------------------------------------------------------------------------
# Forward passes


def _batch_ids(model: EncoderModel, strings: Sequence[str]):
    cfg = model.config
    seqs = [string_to_ids(s, model.vocab, cfg.max_len) for s in strings]
    L = max(1, max((len(s) for s in seqs), default=1))
    ids = np.full((len(seqs), L), PAD_ID, dtype=np.int64)
    mask = np.zeros((len(seqs), L), dtype=np.float64)
    for i, s in enumerate(seqs):
        ids[i, :len(s)] = s
        # an empty string is encoded as a single valid PAD position
        mask[i, :max(len(s), 1)] = 1.0
    return ids, mask


def _head(model: EncoderModel, vec: Tensor) -> Tensor:
    P = model.params
    for i in range(model.config.head_layers):
        vec = ta.relu(ta.add(ta.matmul(vec, P[f"head{i}.w"]), P[f"head{i}.b"]))
    if model.config.projection_dim:
        vec = ta.add(ta.matmul(vec, P["proj.w"]), P["proj.b"])
    return vec


def _forward_cnn(model: EncoderModel, ids, mask) -> Tensor:
    P = model.params
    cfg = model.config
    x = ta.embedding_lookup(P["emb"], ids)
    x = ta.mul(x, ta.constant(mask[:, :, None]))
    m = mask
    for i in range(cfg.layers):
        x = ta.relu(ta.conv1d(x, P[f"conv{i}.w"], P[f"conv{i}.b"]))
        x = ta.mul(x, ta.constant(m[:, :, None]))
        x = ta.max_pool1d(x, 2)
        # pool the mask the same way so downstream layers know valid cells
        B, T = m.shape
        Tp = -(-T // 2) * 2
        mp = np.zeros((B, Tp))
        mp[:, :T] = m
        m = mp.reshape(B, Tp // 2, 2).max(axis=2)
    x = ta.masked_fill(x, m[:, :, None] > 0, -1e9)
    vec = ta.max_time(x)
    vec = ta.add(ta.matmul(vec, P["out.w"]), P["out.b"])
    return _head(model, vec)


def _forward_wavenet(model: EncoderModel, ids, mask) -> Tensor:
    P = model.params
    cfg = model.config
    x = ta.embedding_lookup(P["emb"], ids)
    x = ta.mul(x, ta.constant(mask[:, :, None]))
    for i in range(cfg.layers):
        y = ta.relu(ta.conv1d(x, P[f"conv{i}.w"], P[f"conv{i}.b"],
                              dilation=2 ** i))
        y = ta.mul(y, ta.constant(mask[:, :, None]))
        x = ta.add(x, y)
    vec = ta.mean_pool_time(x, mask)
    vec = ta.add(ta.matmul(vec, P["out.w"]), P["out.b"])
    return _head(model, vec)


def _lstm_direction(P, prefix: str, x: Tensor, mask, reverse: bool,
                    hidden: int) -> Tuple[Tensor, Tensor]:
    """Run one LSTM direction; returns (outputs (B,T,H), final state (B,H)).

    State updates are gated by the mask so the final state equals the
    state at each sequence's last valid position.
    """
    B, T, _ = x.data.shape
    wx, wh, b = P[f"{prefix}.wx"], P[f"{prefix}.wh"], P[f"{prefix}.b"]
    h = ta.constant(np.zeros((B, hidden)))
    c = ta.constant(np.zeros((B, hidden)))
    steps = range(T - 1, -1, -1) if reverse else range(T)
    outputs: List[Optional[Tensor]] = [None] * T
    for t in steps:
        xt = ta.reshape(ta.narrow(x, 1, t, 1), (B, -1))
        gates = ta.add(ta.add(ta.matmul(xt, wx), ta.matmul(h, wh)), b)
        i_g = ta.sigmoid(ta.narrow(gates, 1, 0, hidden))
        f_g = ta.sigmoid(ta.narrow(gates, 1, hidden, hidden))
        o_g = ta.sigmoid(ta.narrow(gates, 1, 2 * hidden, hidden))
        g_g = ta.tanh(ta.narrow(gates, 1, 3 * hidden, hidden))
        c_new = ta.add(ta.mul(f_g, c), ta.mul(i_g, g_g))
        h_new = ta.mul(o_g, ta.tanh(c_new))
        mt = mask[:, t][:, None]
        keep = ta.constant(1.0 - mt)
        take = ta.constant(mt)
        c = ta.add(ta.mul(take, c_new), ta.mul(keep, c))
        h = ta.add(ta.mul(take, h_new), ta.mul(keep, h))
        outputs[t] = h
    seq = ta.concat([ta.reshape(o, (B, 1, hidden)) for o in outputs], axis=1)
    return seq, h


def _forward_bilstm(model: EncoderModel, ids, mask) -> Tensor:
    P = model.params
    cfg = model.config
    h = cfg.token_dim
    x = ta.embedding_lookup(P["emb"], ids)
    finals = (None, None)
    for i in range(cfg.layers):
        fw_seq, fw_h = _lstm_direction(P, f"lstm{i}.fw", x, mask, False, h)
        bw_seq, bw_h = _lstm_direction(P, f"lstm{i}.bw", x, mask, True, h)
        x = ta.concat([fw_seq, bw_seq], axis=-1)
        finals = (fw_h, bw_h)
    vec = ta.concat(list(finals), axis=-1)
    vec = ta.add(ta.matmul(vec, P["out.w"]), P["out.b"])
    return _head(model, vec)


def _forward_transformer(model: EncoderModel, ids, mask) -> Tensor:
    P = model.params
    cfg = model.config
    B, T = ids.shape
    x = ta.embedding_lookup(P["emb"], ids)
    # prepend the aggregation token
    agg = ta.reshape(P["agg"], (1, 1, cfg.token_dim))
    agg_b = ta.mul(agg, ta.constant(np.ones((B, 1, 1))))
    x = ta.concat([agg_b, x], axis=1)
    pos = ta.narrow(P["pos"], 0, 0, T + 1)
    x = ta.add(x, ta.reshape(pos, (1, T + 1, cfg.token_dim)))
    full_mask = np.concatenate([np.ones((B, 1)), mask], axis=1)
    for i in range(cfg.layers):
        xn = ta.layer_norm(x, P[f"ln1.{i}.g"], P[f"ln1.{i}.b"])
        q = ta.matmul(xn, P[f"attn{i}.wq"])
        k = ta.matmul(xn, P[f"attn{i}.wk"])
        v = ta.matmul(xn, P[f"attn{i}.wv"])
        ctx = ta.scaled_dot_attention(q, k, v, cfg.heads, mask=full_mask)
        x = ta.add(x, ta.matmul(ctx, P[f"attn{i}.wo"]))
        xn = ta.layer_norm(x, P[f"ln2.{i}.g"], P[f"ln2.{i}.b"])
        ff = ta.relu(ta.add(ta.matmul(xn, P[f"ff{i}.w1"]), P[f"ff{i}.b1"]))
        x = ta.add(x, ta.add(ta.matmul(ff, P[f"ff{i}.w2"]), P[f"ff{i}.b2"]))
    vec = ta.reshape(ta.narrow(x, 1, 0, 1), (B, cfg.token_dim))
    vec = ta.add(ta.matmul(vec, P["out.w"]), P["out.b"])
    return _head(model, vec)


_FORWARD = {
    "cnn": _forward_cnn,
    "wavenet": _forward_wavenet,
    "bilstm": _forward_bilstm,
    "transformer": _forward_transformer,
}


def encode_batch(model: EncoderModel, strings: Sequence[str]) -> Tensor:
    """Encode a batch of strings to a (B, encoding_dim) tensor."""
    ids, mask = _batch_ids(model, strings)
    return _FORWARD[model.config.arch](model, ids, mask)


def encode_string(model: EncoderModel, s: str) -> np.ndarray:
    return encode_batch(model, [s]).data[0]


# ---------------------------------------------------------------------------
# Persistence


def save(model: EncoderModel, path, extra_metadata: Optional[dict] = None
         ) -> None:
    meta = {"config": model.config.to_dict(), "vocab": model.vocab}
    if extra_metadata:
        meta.update(extra_metadata)
    ta.save_checkpoint(model.params, path, metadata=meta)


def load(path) -> EncoderModel:
    params, meta = ta.load_checkpoint(path)
    if meta is None or "config" not in meta or "vocab" not in meta:
        raise ta.CheckpointError("missing sidecar metadata for encoder")
    config = EncoderConfig.from_dict(meta["config"])
    vocab = {k: int(v) for k, v in meta["vocab"].items()}
    template = _init_params(config, len(vocab) + 2, np.random.RandomState(0))
    for name, t in template.items():
        if name not in params:
            raise ta.CheckpointError(f"missing parameter {name}")
        if params[name].shape != t.shape:
            raise ta.CheckpointError(
                f"shape mismatch for {name}: "
                f"{params[name].shape} vs {t.shape}")
    extra = set(params) - set(template)
    enc_params = {n: params[n] for n in template}
    model = EncoderModel(config, vocab, enc_params)
    if extra:
        # decoder heads etc. ride along in the same file
        model.extra_params = {n: params[n] for n in extra}
    return model
