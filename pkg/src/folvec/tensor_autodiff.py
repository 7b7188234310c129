"""Minimal dense-tensor math with reverse-mode automatic differentiation.

Storage is float32 by default; a float64 mode exists for gradient
verification.  The computation graph is built implicitly: each Tensor
records its parents and a closure that propagates the output gradient.
"""

from __future__ import annotations

import contextlib
import json
import struct
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np

_DEFAULT_DTYPE = np.float32


def default_dtype():
    return _DEFAULT_DTYPE


def set_default_dtype(dtype) -> None:
    global _DEFAULT_DTYPE
    if dtype not in (np.float32, np.float64):
        raise ValueError("dtype must be float32 or float64")
    _DEFAULT_DTYPE = dtype


@contextlib.contextmanager
def float64_mode():
    """64-bit accumulation mode, used by gradient checking."""
    global _DEFAULT_DTYPE
    prev = _DEFAULT_DTYPE
    _DEFAULT_DTYPE = np.float64
    try:
        yield
    finally:
        _DEFAULT_DTYPE = prev


class ContractViolation(Exception):
    pass


class Tensor:
    __slots__ = ("data", "grad", "requires_grad", "_parents", "_backward", "name")

    def __init__(self, data, requires_grad: bool = False,
                 parents: Sequence["Tensor"] = (), backward=None,
                 name: str = ""):
        self.data = np.asarray(data, dtype=_DEFAULT_DTYPE)
        self.grad: Optional[np.ndarray] = None
        self.requires_grad = requires_grad
        self._parents = tuple(parents)
        self._backward = backward
        self.name = name

    @property
    def shape(self):
        return self.data.shape

    def item(self) -> float:
        return float(self.data)

    def zero_grad(self) -> None:
        self.grad = None

    def accumulate(self, g: np.ndarray) -> None:
        if self.grad is None:
            self.grad = np.zeros_like(self.data)
        self.grad += g

    def __repr__(self):
        return f"Tensor(shape={self.shape}, requires_grad={self.requires_grad})"


def parameter(data, name: str = "") -> Tensor:
    return Tensor(data, requires_grad=True, name=name)


def constant(data) -> Tensor:
    return Tensor(data)


def _needs_graph(*ts: Tensor) -> bool:
    return any(t.requires_grad or t._parents for t in ts)


def _unbroadcast(g: np.ndarray, shape: tuple) -> np.ndarray:
    """Sum a gradient down to a broadcast operand's shape."""
    while g.ndim > len(shape):
        g = g.sum(axis=0)
    for i, s in enumerate(shape):
        if s == 1 and g.shape[i] != 1:
            g = g.sum(axis=i, keepdims=True)
    return g


# ---------------------------------------------------------------------------
# Elementwise and structural ops


def add(a: Tensor, b: Tensor) -> Tensor:
    out_data = a.data + b.data

    def bwd(g, out):
        a.accumulate(_unbroadcast(g, a.shape))
        b.accumulate(_unbroadcast(g, b.shape))

    return Tensor(out_data, parents=(a, b), backward=bwd) if _needs_graph(a, b) \
        else Tensor(out_data)


def sub(a: Tensor, b: Tensor) -> Tensor:
    out_data = a.data - b.data

    def bwd(g, out):
        a.accumulate(_unbroadcast(g, a.shape))
        b.accumulate(_unbroadcast(-g, b.shape))

    return Tensor(out_data, parents=(a, b), backward=bwd) if _needs_graph(a, b) \
        else Tensor(out_data)


def mul(a: Tensor, b: Tensor) -> Tensor:
    out_data = a.data * b.data

    def bwd(g, out):
        a.accumulate(_unbroadcast(g * b.data, a.shape))
        b.accumulate(_unbroadcast(g * a.data, b.shape))

    return Tensor(out_data, parents=(a, b), backward=bwd) if _needs_graph(a, b) \
        else Tensor(out_data)


def scale(a: Tensor, c: float) -> Tensor:
    def bwd(g, out):
        a.accumulate(g * c)

    return Tensor(a.data * c, parents=(a,), backward=bwd) if _needs_graph(a) \
        else Tensor(a.data * c)


def add_const(a: Tensor, c) -> Tensor:
    def bwd(g, out):
        a.accumulate(g)

    return Tensor(a.data + c, parents=(a,), backward=bwd) if _needs_graph(a) \
        else Tensor(a.data + c)


def matmul(a: Tensor, b: Tensor) -> Tensor:
    if a.data.shape[-1] != b.data.shape[-2 if b.data.ndim > 1 else 0]:
        raise ContractViolation(
            f"matmul shape mismatch: {a.shape} @ {b.shape}")
    out_data = np.matmul(a.data, b.data)

    def bwd(g, out):
        if b.data.ndim == 1:
            a.accumulate(_unbroadcast(np.outer(g, b.data) if a.data.ndim > 1
                                      else g * b.data, a.shape))
            b.accumulate(_unbroadcast(np.matmul(a.data.swapaxes(-1, -2), g)
                                      if a.data.ndim > 1 else a.data * g,
                                      b.shape))
            return
        ga = np.matmul(g, b.data.swapaxes(-1, -2))
        gb = np.matmul(a.data.swapaxes(-1, -2), g)
        a.accumulate(_unbroadcast(ga, a.shape))
        b.accumulate(_unbroadcast(gb, b.shape))

    return Tensor(out_data, parents=(a, b), backward=bwd) if _needs_graph(a, b) \
        else Tensor(out_data)


def concat(tensors: Sequence[Tensor], axis: int = -1) -> Tensor:
    out_data = np.concatenate([t.data for t in tensors], axis=axis)
    sizes = [t.data.shape[axis] for t in tensors]

    def bwd(g, out):
        offset = 0
        for t, s in zip(tensors, sizes):
            sl = [slice(None)] * g.ndim
            sl[axis if axis >= 0 else g.ndim + axis] = slice(offset, offset + s)
            t.accumulate(g[tuple(sl)])
            offset += s

    if _needs_graph(*tensors):
        return Tensor(out_data, parents=tuple(tensors), backward=bwd)
    return Tensor(out_data)


def reshape(a: Tensor, shape) -> Tensor:
    def bwd(g, out):
        a.accumulate(g.reshape(a.shape))

    return Tensor(a.data.reshape(shape), parents=(a,), backward=bwd) \
        if _needs_graph(a) else Tensor(a.data.reshape(shape))


def transpose(a: Tensor, axes) -> Tensor:
    inv = np.argsort(axes)

    def bwd(g, out):
        a.accumulate(g.transpose(inv))

    return Tensor(a.data.transpose(axes), parents=(a,), backward=bwd) \
        if _needs_graph(a) else Tensor(a.data.transpose(axes))


def narrow(a: Tensor, axis: int, start: int, length: int) -> Tensor:
    sl = [slice(None)] * a.data.ndim
    sl[axis] = slice(start, start + length)
    sl = tuple(sl)

    def bwd(g, out):
        buf = np.zeros_like(a.data)
        buf[sl] = g
        a.accumulate(buf)

    return Tensor(a.data[sl], parents=(a,), backward=bwd) if _needs_graph(a) \
        else Tensor(a.data[sl])


def tsum(a: Tensor, axis=None, keepdims: bool = False) -> Tensor:
    out_data = a.data.sum(axis=axis, keepdims=keepdims)

    def bwd(g, out):
        if axis is None:
            a.accumulate(np.full_like(a.data, 1.0) * g)
            return
        if not keepdims:
            g = np.expand_dims(g, axis)
        a.accumulate(np.broadcast_to(g, a.shape).copy())

    return Tensor(out_data, parents=(a,), backward=bwd) if _needs_graph(a) \
        else Tensor(out_data)


# ---------------------------------------------------------------------------
# Nonlinearities


def relu(a: Tensor) -> Tensor:
    out_data = np.maximum(a.data, 0)

    def bwd(g, out):
        a.accumulate(g * (a.data > 0))

    return Tensor(out_data, parents=(a,), backward=bwd) if _needs_graph(a) \
        else Tensor(out_data)


def sigmoid(a: Tensor) -> Tensor:
    out_data = 1.0 / (1.0 + np.exp(-np.clip(a.data, -60, 60)))

    def bwd(g, out):
        g_in = g * out.data * (1.0 - out.data)
        a.accumulate(g_in.astype(a.data.dtype))

    return Tensor(out_data, parents=(a,), backward=bwd) if _needs_graph(a) \
        else Tensor(out_data)


def tanh(a: Tensor) -> Tensor:
    out_data = np.tanh(a.data)

    def bwd(g, out):
        a.accumulate(g * (1.0 - out.data ** 2))

    return Tensor(out_data, parents=(a,), backward=bwd) if _needs_graph(a) \
        else Tensor(out_data)


def softmax(a: Tensor, axis: int = -1) -> Tensor:
    shifted = a.data - a.data.max(axis=axis, keepdims=True)
    e = np.exp(shifted)
    out_data = e / e.sum(axis=axis, keepdims=True)

    def bwd(g, out):
        s = out.data
        dot = (g * s).sum(axis=axis, keepdims=True)
        a.accumulate(s * (g - dot))

    return Tensor(out_data, parents=(a,), backward=bwd) if _needs_graph(a) \
        else Tensor(out_data)


def layer_norm(x: Tensor, gain: Tensor, bias: Tensor,
               eps: float = 1e-5) -> Tensor:
    """Normalize the last axis to zero mean / unit variance, then apply an
    elementwise affine map."""
    mu = x.data.mean(axis=-1, keepdims=True)
    var = x.data.var(axis=-1, keepdims=True)
    inv = 1.0 / np.sqrt(var + eps)
    xhat = (x.data - mu) * inv
    out_data = xhat * gain.data + bias.data
    n = x.data.shape[-1]

    def bwd(g, out):
        gy = g * gain.data
        gx = inv * (gy - gy.mean(axis=-1, keepdims=True)
                    - xhat * (gy * xhat).mean(axis=-1, keepdims=True))
        x.accumulate(gx.astype(x.data.dtype))
        gain.accumulate(_unbroadcast(g * xhat, gain.shape))
        bias.accumulate(_unbroadcast(g, bias.shape))

    if _needs_graph(x, gain, bias):
        return Tensor(out_data, parents=(x, gain, bias), backward=bwd)
    return Tensor(out_data)


# ---------------------------------------------------------------------------
# Sequence ops


def embedding_lookup(table: Tensor, ids: np.ndarray) -> Tensor:
    ids = np.asarray(ids)
    out_data = table.data[ids]

    def bwd(g, out):
        buf = np.zeros_like(table.data)
        np.add.at(buf, ids.reshape(-1),
                  g.reshape(-1, table.data.shape[-1]))
        table.accumulate(buf)

    return Tensor(out_data, parents=(table,), backward=bwd) \
        if _needs_graph(table) else Tensor(out_data)


def conv1d(x: Tensor, w: Tensor, b: Optional[Tensor] = None,
           dilation: int = 1) -> Tensor:
    """Same-padded 1-d convolution.

    x: (B, T, Cin); w: (K, Cin, Cout); output (B, T, Cout).
    """
    if dilation < 1:
        raise ContractViolation("dilation must be >= 1")
    B, T, Cin = x.data.shape
    K, WCin, Cout = w.data.shape
    if WCin != Cin:
        raise ContractViolation(
            f"conv1d channel mismatch: input {Cin}, kernel {WCin}")
    span = (K - 1) * dilation
    left = span // 2
    xpad = np.zeros((B, T + span, Cin), dtype=x.data.dtype)
    xpad[:, left:left + T, :] = x.data
    out_data = np.zeros((B, T, Cout), dtype=x.data.dtype)
    for k in range(K):
        off = k * dilation
        out_data += np.matmul(xpad[:, off:off + T, :], w.data[k])
    if b is not None:
        out_data += b.data

    def bwd(g, out):
        gxpad = np.zeros_like(xpad)
        gw = np.zeros_like(w.data)
        for k in range(K):
            off = k * dilation
            gxpad[:, off:off + T, :] += np.matmul(g, w.data[k].T)
            gw[k] = np.einsum("btc,btd->cd", xpad[:, off:off + T, :], g)
        x.accumulate(gxpad[:, left:left + T, :])
        w.accumulate(gw)
        if b is not None:
            b.accumulate(g.sum(axis=(0, 1)))

    parents = (x, w) if b is None else (x, w, b)
    if _needs_graph(*parents):
        return Tensor(out_data, parents=parents, backward=bwd)
    return Tensor(out_data)


def max_pool1d(x: Tensor, width: int) -> Tensor:
    """Non-overlapping max pooling over time; a ragged tail cell is padded
    with -inf so no position is dropped.  x: (B, T, C) -> (B, ceil(T/w), C)."""
    B, T, C = x.data.shape
    Tp = -(-T // width) * width
    buf = np.full((B, Tp, C), -np.inf, dtype=x.data.dtype)
    buf[:, :T, :] = x.data
    win = buf.reshape(B, Tp // width, width, C)
    out_data = win.max(axis=2)
    arg = win.argmax(axis=2)

    def bwd(g, out):
        gbuf = np.zeros((B, Tp // width, width, C), dtype=x.data.dtype)
        i0, i1, i3 = np.ogrid[:B, :Tp // width, :C]
        gbuf[i0, i1, arg, i3] = g
        x.accumulate(gbuf.reshape(B, Tp, C)[:, :T, :])

    return Tensor(out_data, parents=(x,), backward=bwd) if _needs_graph(x) \
        else Tensor(out_data)


def mean_pool_time(x: Tensor, mask: Optional[np.ndarray] = None) -> Tensor:
    """Mean over the time axis; with a (B, T) mask, averages valid
    positions only."""
    B, T, C = x.data.shape
    if mask is None:
        out_data = x.data.mean(axis=1)

        def bwd(g, out):
            x.accumulate(np.repeat(g[:, None, :], T, axis=1) / T)
    else:
        m = np.asarray(mask, dtype=x.data.dtype)[:, :, None]
        counts = np.maximum(m.sum(axis=1), 1.0)
        out_data = (x.data * m).sum(axis=1) / counts

        def bwd(g, out):
            x.accumulate(m * (g / counts)[:, None, :])

    return Tensor(out_data, parents=(x,), backward=bwd) if _needs_graph(x) \
        else Tensor(out_data)


def masked_fill(x: Tensor, mask: np.ndarray, value: float) -> Tensor:
    """Replace positions where mask == 0 by `value` (mask broadcasts)."""
    m = np.asarray(mask, dtype=bool)
    out_data = np.where(m, x.data, np.asarray(value, dtype=x.data.dtype))

    def bwd(g, out):
        x.accumulate(np.where(m, g, 0.0))

    return Tensor(out_data, parents=(x,), backward=bwd) if _needs_graph(x) \
        else Tensor(out_data)


def max_time(x: Tensor) -> Tensor:
    """Global max over the time axis. x: (B, T, C) -> (B, C)."""
    B, T, C = x.data.shape
    arg = x.data.argmax(axis=1)
    out_data = x.data.max(axis=1)

    def bwd(g, out):
        gx = np.zeros_like(x.data)
        i0, i2 = np.ogrid[:B, :C]
        gx[i0, arg, i2] = g
        x.accumulate(gx)

    return Tensor(out_data, parents=(x,), backward=bwd) if _needs_graph(x) \
        else Tensor(out_data)


def scaled_dot_attention(q: Tensor, k: Tensor, v: Tensor, heads: int,
                         mask: Optional[np.ndarray] = None) -> Tensor:
    """Multi-head scaled dot-product attention over (B, T, C) inputs.

    mask: (B, T) with 1 for attendable key positions.
    """
    B, T, C = q.data.shape
    if C % heads != 0:
        raise ContractViolation(f"heads {heads} must divide channels {C}")
    dh = C // heads

    def split(t: Tensor) -> Tensor:
        return transpose(reshape(t, (B, T, heads, dh)), (0, 2, 1, 3))

    qh, kh, vh = split(q), split(k), split(v)
    scores = scale(matmul(qh, transpose(kh, (0, 1, 3, 2))), 1.0 / np.sqrt(dh))
    if mask is not None:
        key_mask = np.asarray(mask, dtype=bool)[:, None, None, :]
        scores = masked_fill(scores, key_mask, -1e9)
    attn = softmax(scores, axis=-1)
    ctx = matmul(attn, vh)  # (B, H, T, dh)
    return reshape(transpose(ctx, (0, 2, 1, 3)), (B, T, C))


# ---------------------------------------------------------------------------
# Losses


def softmax_cross_entropy(logits: Tensor, class_ids,
                          reduction: str = "mean") -> Tensor:
    """Cross-entropy from raw logits.  logits: (B, C) or (C,)."""
    data = logits.data
    if data.ndim == 1:
        data = data[None, :]
    ids = np.atleast_1d(np.asarray(class_ids, dtype=np.int64))
    Bc, C = data.shape
    if ids.min() < 0 or ids.max() >= C:
        raise ContractViolation(f"class id out of range [0, {C})")
    shifted = data - data.max(axis=1, keepdims=True)
    logz = np.log(np.exp(shifted).sum(axis=1))
    per = logz - shifted[np.arange(Bc), ids]
    out_data = per.sum() if reduction == "sum" else per.mean()
    sm = np.exp(shifted) / np.exp(shifted).sum(axis=1, keepdims=True)

    def bwd(g, out):
        gl = sm.copy()
        gl[np.arange(Bc), ids] -= 1.0
        if reduction == "mean":
            gl /= Bc
        gl *= g
        logits.accumulate(gl.reshape(logits.shape))

    return Tensor(out_data, parents=(logits,), backward=bwd) \
        if _needs_graph(logits) else Tensor(out_data)


def mse(a: Tensor, b: Tensor) -> Tensor:
    if a.shape != b.shape:
        raise ContractViolation(f"mse shape mismatch: {a.shape} vs {b.shape}")
    diff = a.data - b.data
    n = diff.size
    out_data = (diff ** 2).mean()

    def bwd(g, out):
        a.accumulate(g * 2.0 * diff / n)
        b.accumulate(-g * 2.0 * diff / n)

    return Tensor(out_data, parents=(a, b), backward=bwd) if _needs_graph(a, b) \
        else Tensor(out_data)


def binary_cross_entropy(logit: Tensor, labels,
                         reduction: str = "mean") -> Tensor:
    """Numerically stable BCE from logits."""
    y = np.asarray(labels, dtype=logit.data.dtype)
    z = logit.data
    per = np.maximum(z, 0) - z * y + np.log1p(np.exp(-np.abs(z)))
    out_data = per.sum() if reduction == "sum" else per.mean()

    def bwd(g, out):
        s = 1.0 / (1.0 + np.exp(-z))
        gl = (s - y)
        if reduction == "mean":
            gl = gl / max(z.size, 1)
        logit.accumulate(g * gl)

    return Tensor(out_data, parents=(logit,), backward=bwd) \
        if _needs_graph(logit) else Tensor(out_data)


# ---------------------------------------------------------------------------
# Backward pass


def backward(loss: Tensor) -> None:
    """Populate gradients of every requires_grad tensor reachable from
    loss, visiting graph nodes in reverse topological order."""
    if loss.data.size != 1:
        raise ContractViolation("backward needs a scalar loss")
    if not loss._parents and not loss.requires_grad:
        raise ContractViolation("backward on a detached value")
    order: List[Tensor] = []
    seen = set()
    stack = [(loss, False)]
    while stack:
        node, processed = stack.pop()
        if processed:
            order.append(node)
            continue
        if id(node) in seen:
            continue
        seen.add(id(node))
        stack.append((node, True))
        for p in node._parents:
            if id(p) not in seen:
                stack.append((p, False))
    loss.grad = np.ones_like(loss.data)
    for node in reversed(order):
        if node._backward is not None and node.grad is not None:
            node._backward(node.grad, node)


# ---------------------------------------------------------------------------
# Adam


class AdamState:
    """Adam optimizer with bias correction over a named parameter dict."""

    def __init__(self, params: Dict[str, Tensor], lr: float = 1e-4,
                 beta1: float = 0.9, beta2: float = 0.999, eps: float = 1e-8):
        self.params = params
        self.lr = lr
        self.beta1 = beta1
        self.beta2 = beta2
        self.eps = eps
        self.t = 0
        self.m = {k: np.zeros_like(p.data) for k, p in params.items()}
        self.v = {k: np.zeros_like(p.data) for k, p in params.items()}


def adam_step(state: AdamState) -> None:
    """One Adam update; parameters with no gradient are untouched.
    Gradients are cleared afterwards."""
    state.t += 1
    b1, b2 = state.beta1, state.beta2
    for k, p in state.params.items():
        g = p.grad
        if g is None:
            continue
        state.m[k] = b1 * state.m[k] + (1 - b1) * g
        state.v[k] = b2 * state.v[k] + (1 - b2) * g * g
        mhat = state.m[k] / (1 - b1 ** state.t)
        vhat = state.v[k] / (1 - b2 ** state.t)
        p.data -= (state.lr * mhat / (np.sqrt(vhat) + state.eps)).astype(
            p.data.dtype)
        p.grad = None


def zero_grads(params: Dict[str, Tensor]) -> None:
    for p in params.values():
        p.grad = None


# ---------------------------------------------------------------------------
# Initialization


def glorot_uniform(rng: np.random.RandomState, shape, fan_in: int,
                   fan_out: int) -> np.ndarray:
    limit = np.sqrt(6.0 / (fan_in + fan_out))
    return rng.uniform(-limit, limit, size=shape).astype(_DEFAULT_DTYPE)


def recurrent_uniform(rng: np.random.RandomState, shape,
                      fan_in: int) -> np.ndarray:
    limit = 1.0 / np.sqrt(fan_in)
    return rng.uniform(-limit, limit, size=shape).astype(_DEFAULT_DTYPE)


# ---------------------------------------------------------------------------
# Gradient checking


def gradient_check(f: Callable[..., Tensor], inputs: Sequence[Tensor],
                   eps: float = 1e-4) -> float:
    """Max relative error between analytic gradients and central
    differences, over all elements of all inputs.  Run under
    float64_mode with float64 inputs."""
    for t in inputs:
        t.grad = None
    loss = f(*inputs)
    backward(loss)
    analytic = [np.array(t.grad, dtype=np.float64, copy=True)
                if t.grad is not None else np.zeros_like(t.data)
                for t in inputs]
    worst = 0.0
    for t, ga in zip(inputs, analytic):
        flat = t.data.reshape(-1)
        gflat = ga.reshape(-1)
        for i in range(flat.size):
            orig = flat[i]
            flat[i] = orig + eps
            up = float(f(*inputs).data)
            flat[i] = orig - eps
            down = float(f(*inputs).data)
            flat[i] = orig
            numeric = (up - down) / (2 * eps)
            a = gflat[i]
            rel = abs(a - numeric) / max(1e-8, abs(a) + abs(numeric))
            worst = max(worst, rel)
    return worst


# ---------------------------------------------------------------------------
# Checkpoint I/O


CKPT_MAGIC = "FOLVEC-CKPT v1"


class CheckpointError(Exception):
    pass


def save_checkpoint(params: Dict[str, Tensor], path,
                    metadata: Optional[dict] = None) -> None:
    """Text header + per-parameter shape line + raw little-endian float32
    data; metadata goes to a sidecar JSON file."""
    with open(path, "wb") as fh:
        fh.write(f"{CKPT_MAGIC} {len(params)}\n".encode("ascii"))
        for name in sorted(params):
            arr = np.asarray(params[name].data, dtype="<f4")
            dims = " ".join(str(d) for d in arr.shape)
            fh.write(f"{name} {arr.ndim} {dims}".rstrip().encode("ascii")
                     + b"\n")
            fh.write(arr.tobytes(order="C"))
    if metadata is not None:
        with open(str(path) + ".json", "w", encoding="utf-8") as mh:
            json.dump(metadata, mh, sort_keys=True, indent=1)


def _read_line(fh) -> str:
    buf = bytearray()
    while True:
        c = fh.read(1)
        if not c or c == b"\n":
            break
        buf += c
    return buf.decode("ascii")


def load_checkpoint(path) -> Tuple[Dict[str, Tensor], Optional[dict]]:
    with open(path, "rb") as fh:
        header = _read_line(fh)
        parts = header.rsplit(" ", 1)
        if parts[0] != CKPT_MAGIC:
            raise CheckpointError(f"bad checkpoint header: {header!r}")
        count = int(parts[1])
        params: Dict[str, Tensor] = {}
        for _ in range(count):
            line = _read_line(fh)
            fields = line.split(" ")
            name = fields[0]
            rank = int(fields[1])
            dims = tuple(int(d) for d in fields[2:2 + rank])
            n = int(np.prod(dims)) if dims else 1
            raw = fh.read(n * 4)
            if len(raw) != n * 4:
                raise CheckpointError(f"truncated data for parameter {name}")
            arr = np.frombuffer(raw, dtype="<f4").reshape(dims)
            params[name] = parameter(arr.astype(_DEFAULT_DTYPE), name=name)
    metadata = None
    try:
        with open(str(path) + ".json", "r", encoding="utf-8") as mh:
            metadata = json.load(mh)
    except FileNotFoundError:
        pass
    return params, metadata
