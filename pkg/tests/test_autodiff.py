import math

import numpy as np
import pytest

from folvec import tensor_autodiff as ta


def test_default_dtype_float32():
    t = ta.parameter(np.zeros(3))
    assert t.data.dtype == np.float32
    with ta.float64_mode():
        assert ta.parameter(np.zeros(3)).data.dtype == np.float64
    assert ta.parameter(np.zeros(3)).data.dtype == np.float32


def test_backward_requires_scalar():
    x = ta.parameter(np.ones((2, 2)))
    with pytest.raises(ta.ContractViolation):
        ta.backward(ta.mul(x, x))


def test_grad_accumulates_over_reuse():
    x = ta.parameter(np.array([2.0]))
    y = ta.add(ta.mul(x, x), x)  # x^2 + x -> grad 2x + 1 = 5
    ta.backward(ta.tsum(y))
    assert np.allclose(x.grad, [5.0])


def test_mse_closed_form_gradient():
    a = ta.parameter(np.array([1.0, 2.0, 3.0]))
    b = ta.constant(np.array([0.0, 0.0, 0.0]))
    loss = ta.mse(a, b)
    ta.backward(loss)
    # d/da mean((a-b)^2) = 2(a-b)/n
    assert np.allclose(a.grad, 2.0 * a.data / 3.0, atol=1e-6)


def test_cross_entropy_uniform_is_ln_c():
    for c in (2, 5, 11):
        logits = ta.parameter(np.zeros((4, c)))
        loss = ta.softmax_cross_entropy(logits, [0] * 4)
        assert abs(loss.data - math.log(c)) < 1e-5


def test_softmax_rows_sum_to_one():
    x = ta.parameter(np.random.RandomState(0).randn(3, 7) * 10)
    s = ta.softmax(x)
    assert np.allclose(s.data.sum(axis=1), 1.0, atol=1e-5)


def test_adam_first_step_closed_form():
    # after one step the bias-corrected update is lr * g/|g| elementwise
    p = ta.parameter(np.array([1.0, -3.0, 0.5]))
    before = p.data.copy()
    st = ta.AdamState({"p": p}, lr=0.01)
    ta.backward(ta.tsum(ta.mul(p, p)))
    g = 2.0 * before
    ta.adam_step(st)
    expect = before - 0.01 * g / (np.abs(g) + 1e-8)
    assert np.allclose(p.data, expect, atol=1e-5)
    assert p.grad is None  # cleared by the step
    assert st.t == 1


def test_adam_skips_gradless_params():
    p = ta.parameter(np.ones(2))
    q = ta.parameter(np.ones(2))
    st = ta.AdamState({"p": p, "q": q}, lr=0.1)
    ta.backward(ta.tsum(p))
    ta.adam_step(st)
    assert np.allclose(q.data, 1.0)
    assert not np.allclose(p.data, 1.0)


def test_conv1d_shapes_and_padding():
    x = ta.parameter(np.random.RandomState(1).randn(2, 9, 3))
    w = ta.parameter(np.random.RandomState(2).randn(3, 3, 5))
    b = ta.parameter(np.zeros(5))
    y = ta.conv1d(x, w, b)
    assert y.data.shape == (2, 9, 5)  # same padding keeps T
    y2 = ta.conv1d(x, w, b, dilation=2)
    assert y2.data.shape == (2, 9, 5)


def test_max_pool1d_ceil():
    x = ta.parameter(np.arange(10, dtype=float).reshape(1, 5, 2))
    y = ta.max_pool1d(x, 2)
    assert y.data.shape == (1, 3, 2)  # ceil(5/2)


def test_mean_pool_time_masked():
    x = ta.parameter(np.ones((1, 4, 2)))
    mask = np.array([[1.0, 1.0, 0.0, 0.0]])
    y = ta.mean_pool_time(x, mask)
    assert np.allclose(y.data, 1.0)


def test_embedding_lookup_and_narrow():
    table = ta.parameter(np.arange(12, dtype=float).reshape(4, 3))
    e = ta.embedding_lookup(table, np.array([[1, 3]]))
    assert np.allclose(e.data, [[table.data[1], table.data[3]]])
    n = ta.narrow(e, 1, 1, 1)
    assert np.allclose(n.data[0, 0], table.data[3])


def test_checkpoint_roundtrip(tmp_path):
    rng = np.random.RandomState(0)
    params = {"a.w": ta.parameter(rng.randn(3, 4)),
              "b": ta.parameter(rng.randn(5))}
    path = str(tmp_path / "m.ckpt")
    ta.save_checkpoint(params, path, metadata={"arch": "test"})
    loaded, meta = ta.load_checkpoint(path)
    assert meta["arch"] == "test"
    assert set(loaded) == set(params)
    for k in params:
        assert np.array_equal(loaded[k].data, params[k].data)


def test_checkpoint_corruption(tmp_path):
    path = str(tmp_path / "m.ckpt")
    ta.save_checkpoint({"a": ta.parameter(np.zeros(2))}, path)
    raw = open(path, "rb").read()
    open(path, "wb").write(b"garbage" + raw[7:])
    with pytest.raises(ta.CheckpointError):
        ta.load_checkpoint(path)


def test_checkpoint_truncation(tmp_path):
    path = str(tmp_path / "m.ckpt")
    ta.save_checkpoint({"a": ta.parameter(np.zeros(100))}, path)
    raw = open(path, "rb").read()
    open(path, "wb").write(raw[:-50])
    with pytest.raises(ta.CheckpointError):
        ta.load_checkpoint(path)


def test_gradient_check_utility():
    with ta.float64_mode():
        x = ta.parameter(np.random.RandomState(3).uniform(0.5, 1.5, (3, 3)))
        err = ta.gradient_check(lambda x: ta.tsum(ta.mul(x, x)), [x])
        assert err < 1e-8
