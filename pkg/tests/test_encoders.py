import numpy as np
import pytest

from folvec import encoders
from folvec.encoders import EncoderConfig
from folvec.tensor_autodiff import CheckpointError

STRINGS = ["p(X)", "(p(a) & q(X,b))", "~p(f(Y))", "![X]: p(X)", ""]


@pytest.fixture(scope="module")
def vocab():
    return encoders.build_vocab(STRINGS + ["abcdefghij" * 4])


def small_config(arch):
    return EncoderConfig(arch=arch, token_dim=16, output_dim=16, layers=2,
                         heads=2, max_len=64)


@pytest.mark.parametrize("arch", encoders.ARCHS)
def test_encode_shapes(arch, vocab):
    m = encoders.build_encoder(small_config(arch), vocab, seed=0)
    out = encoders.encode_batch(m, STRINGS)
    assert out.data.shape == (len(STRINGS), 16)
    assert np.isfinite(out.data).all()


@pytest.mark.parametrize("arch", encoders.ARCHS)
def test_padding_invariance(arch, vocab):
    m = encoders.build_encoder(small_config(arch), vocab, seed=0)
    for s in STRINGS:
        solo = encoders.encode_string(m, s)
        padded = encoders.encode_batch(m, [s, "abcdefghij" * 4]).data[0]
        assert np.abs(solo - padded).max() <= 1e-5


@pytest.mark.parametrize("arch", encoders.ARCHS)
def test_deterministic_init_and_forward(arch, vocab):
    a = encoders.build_encoder(small_config(arch), vocab, seed=7)
    b = encoders.build_encoder(small_config(arch), vocab, seed=7)
    c = encoders.build_encoder(small_config(arch), vocab, seed=8)
    ea = encoders.encode_batch(a, STRINGS).data
    assert np.array_equal(ea, encoders.encode_batch(b, STRINGS).data)
    assert not np.array_equal(ea, encoders.encode_batch(c, STRINGS).data)


@pytest.mark.parametrize("arch", encoders.ARCHS)
def test_save_load_bit_exact(arch, vocab, tmp_path):
    m = encoders.build_encoder(small_config(arch), vocab, seed=0)
    path = str(tmp_path / f"{arch}.ckpt")
    encoders.save(m, path)
    m2 = encoders.load(path)
    assert np.array_equal(encoders.encode_batch(m, STRINGS).data,
                          encoders.encode_batch(m2, STRINGS).data)


def test_load_rejects_cross_arch(vocab, tmp_path):
    m = encoders.build_encoder(small_config("cnn"), vocab, seed=0)
    path = str(tmp_path / "m.ckpt")
    encoders.save(m, path)
    import json
    meta = json.load(open(path + ".json"))
    meta["config"]["arch"] = "bilstm"
    json.dump(meta, open(path + ".json", "w"))
    with pytest.raises(CheckpointError):
        encoders.load(path)


def test_unknown_chars_map_to_unk(vocab):
    m = encoders.build_encoder(small_config("cnn"), vocab, seed=0)
    a = encoders.encode_string(m, "p(é)")
    b = encoders.encode_string(m, "p(ü)")  # both unseen -> UNK
    assert np.array_equal(a, b)


def test_config_validation():
    with pytest.raises(ValueError):
        EncoderConfig(arch="rnn")
    with pytest.raises(ValueError):
        EncoderConfig(arch="transformer", token_dim=10, heads=4)


def test_bilstm_layer_coercion():
    cfg = EncoderConfig(arch="bilstm")  # default layers=6
    m = encoders.build_encoder(cfg, encoders.build_vocab(["p"]), seed=0)
    lstm_layers = {n.split(".")[0] for n in m.params if n.startswith("lstm")}
    assert len(lstm_layers) == 2


def test_explicit_presets():
    c = encoders.explicit_cnn_config()
    assert c.arch == "cnn" and c.layers == 9
    b = encoders.explicit_bilstm_config()
    assert b.arch == "bilstm" and b.layers == 3 and b.token_dim == 256


def test_max_len_truncation(vocab):
    cfg = EncoderConfig(arch="cnn", token_dim=16, output_dim=16, layers=2,
                        max_len=8)
    m = encoders.build_encoder(cfg, vocab, seed=0)
    long = "p(a) & q(b) & r(c) & s(d)"
    out = encoders.encode_string(m, long)
    assert np.array_equal(out, encoders.encode_string(m, long[:8]))
