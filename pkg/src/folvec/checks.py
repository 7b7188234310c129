"""Finite-difference verification of every differentiable layer and of the
four encoder architectures on reduced configurations.

Everything here runs in float64 mode; callers compare the returned max
relative errors against their tolerance (1e-3 end-to-end, 1e-6 for simple
layers).
"""

from __future__ import annotations

from typing import Dict, List, Sequence

import numpy as np

from . import encoders, tensor_autodiff as ta
from .encoders import EncoderConfig
from .tensor_autodiff import Tensor


def _rand(rng, *shape):
    return ta.parameter(rng.uniform(-1.0, 1.0, size=shape))


def check_layers(seed: int = 0) -> Dict[str, float]:
    """Max relative gradient error per layer type."""
    out: Dict[str, float] = {}
    with ta.float64_mode():
        rng = np.random.RandomState(seed)

        w = _rand(rng, 4, 3)
        x = _rand(rng, 2, 4)
        b = _rand(rng, 3)
        out["linear"] = ta.gradient_check(
            lambda x, w, b: ta.tsum(ta.add(ta.matmul(x, w), b)), [x, w, b])

        a1, a2 = _rand(rng, 3, 4), _rand(rng, 3, 4)
        out["mul"] = ta.gradient_check(
            lambda a, b: ta.tsum(ta.mul(a, b)), [a1, a2])
        out["concat"] = ta.gradient_check(
            lambda a, b: ta.tsum(ta.mul(ta.concat([a, b], axis=1),
                                        ta.concat([b, a], axis=1))),
            [a1, a2])

        # keep relu pre-activations away from the kink
        xr = ta.parameter(rng.choice([-1.0, 1.0], size=(3, 5))
                          * rng.uniform(0.5, 1.5, size=(3, 5)))
        out["relu"] = ta.gradient_check(
            lambda x: ta.tsum(ta.mul(ta.relu(x), x)), [xr])

        xs = _rand(rng, 3, 5)
        out["sigmoid"] = ta.gradient_check(
            lambda x: ta.tsum(ta.mul(ta.sigmoid(x), x)), [xs])
        out["tanh"] = ta.gradient_check(
            lambda x: ta.tsum(ta.mul(ta.tanh(x), x)), [xs])

        table = _rand(rng, 6, 4)
        ids = np.array([[0, 2, 5], [1, 1, 3]])
        mixer = rng.uniform(-1, 1, size=(2, 3, 4))
        out["embedding_lookup"] = ta.gradient_check(
            lambda t: ta.tsum(ta.mul(ta.embedding_lookup(t, ids),
                                     ta.constant(mixer))), [table])

        xc = _rand(rng, 2, 8, 3)
        wc = _rand(rng, 3, 3, 4)
        bc = _rand(rng, 4)
        mix = rng.uniform(-1, 1, size=(2, 8, 4))
        out["conv1d"] = ta.gradient_check(
            lambda x, w, b: ta.tsum(ta.mul(ta.conv1d(x, w, b),
                                           ta.constant(mix))), [xc, wc, bc])
        out["conv1d_dilated"] = ta.gradient_check(
            lambda x, w, b: ta.tsum(ta.mul(ta.conv1d(x, w, b, dilation=2),
                                           ta.constant(mix))), [xc, wc, bc])

        xp = _rand(rng, 2, 6, 3)
        mixp = rng.uniform(-1, 1, size=(2, 3, 3))
        out["max_pool1d"] = ta.gradient_check(
            lambda x: ta.tsum(ta.mul(ta.max_pool1d(x, 2),
                                     ta.constant(mixp))), [xp])

        mask = np.array([[1, 1, 1, 1, 0, 0], [1, 1, 1, 1, 1, 1]],
                        dtype=np.float64)
        mixm = rng.uniform(-1, 1, size=(2, 3))
        out["mean_pool_time"] = ta.gradient_check(
            lambda x: ta.tsum(ta.mul(ta.mean_pool_time(x, mask),
                                     ta.constant(mixm))), [xp])
        mixt = rng.uniform(-1, 1, size=(2, 3))
        out["max_time"] = ta.gradient_check(
            lambda x: ta.tsum(ta.mul(ta.max_time(x), ta.constant(mixt))),
            [xp])

        xl = _rand(rng, 2, 5)
        gl = _rand(rng, 5)
        bl = _rand(rng, 5)
        mixl = rng.uniform(-1, 1, size=(2, 5))
        out["layer_norm"] = ta.gradient_check(
            lambda x, g, b: ta.tsum(ta.mul(ta.layer_norm(x, g, b),
                                           ta.constant(mixl))), [xl, gl, bl])

        out["softmax"] = ta.gradient_check(
            lambda x: ta.tsum(ta.mul(ta.softmax(x), ta.constant(mixl))),
            [xl])

        q = _rand(rng, 2, 4, 6)
        k = _rand(rng, 2, 4, 6)
        v = _rand(rng, 2, 4, 6)
        amask = np.array([[1, 1, 1, 0], [1, 1, 1, 1]], dtype=np.float64)
        mixa = rng.uniform(-1, 1, size=(2, 4, 6))
        out["scaled_dot_attention"] = ta.gradient_check(
            lambda q, k, v: ta.tsum(ta.mul(
                ta.scaled_dot_attention(q, k, v, heads=2, mask=amask),
                ta.constant(mixa))), [q, k, v])

        logits = _rand(rng, 3, 4)
        out["softmax_cross_entropy"] = ta.gradient_check(
            lambda l: ta.softmax_cross_entropy(l, [0, 2, 3]), [logits])
        m1, m2 = _rand(rng, 3, 4), _rand(rng, 3, 4)
        out["mse"] = ta.gradient_check(lambda a, b: ta.mse(a, b), [m1, m2])
        zl = _rand(rng, 5)
        out["binary_cross_entropy"] = ta.gradient_check(
            lambda z: ta.binary_cross_entropy(z, [0, 1, 1, 0, 1]), [zl])
    return out


REDUCED_CONFIGS = {
    "cnn": EncoderConfig(arch="cnn", token_dim=8, output_dim=8, layers=2,
                         max_len=16),
    "wavenet": EncoderConfig(arch="wavenet", token_dim=8, output_dim=8,
                             layers=2, max_len=16),
    "bilstm": EncoderConfig(arch="bilstm", token_dim=6, output_dim=8,
                            layers=2, max_len=12),
    "transformer": EncoderConfig(arch="transformer", token_dim=8,
                                 output_dim=8, layers=2, heads=2,
                                 max_len=16),
}


def check_encoder(arch: str, seed: int = 0) -> float:
    """End-to-end gradient check of one architecture on a 2-layer reduced
    config; returns the max relative error over all parameters."""
    strings = ["p(X)", "(p(a) & q(X,b))", "~p(f(Y))"]
    with ta.float64_mode():
        cfg = REDUCED_CONFIGS[arch]
        vocab = encoders.build_vocab(strings)
        model = encoders.build_encoder(cfg, vocab, seed=seed)
        rng = np.random.RandomState(seed + 1)
        mix = rng.uniform(-1, 1, size=(len(strings), cfg.encoding_dim))
        names = sorted(model.params)
        tensors = [model.params[n] for n in names]

        def loss_fn(*params):
            return ta.tsum(ta.mul(encoders.encode_batch(model, strings),
                                  ta.constant(mix)))

        # smaller eps keeps weight perturbations from crossing relu kinks
        return ta.gradient_check(loss_fn, tensors, eps=1e-5)


def check_all(seed: int = 0) -> Dict[str, float]:
    out = check_layers(seed)
    for arch in ("cnn", "wavenet", "bilstm", "transformer"):
        out[f"encoder_{arch}"] = check_encoder(arch, seed)
    return out
