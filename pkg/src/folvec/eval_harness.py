"""Downstream evaluation: frozen-encoder property classifiers, joint
multi-task (explicit) training, linear probes, and premise selection."""

from __future__ import annotations

import logging
import random
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from . import encoders, tensor_autodiff as ta
from .dataset_gen import PAIR_TASKS, LabeledExample
from .encoders import EncoderModel, encode_batch
from .tensor_autodiff import Tensor

log = logging.getLogger(__name__)

HIDDEN_LAYERS = 6
HIDDEN_WIDTH = 128


# ---------------------------------------------------------------------------
# Classifier network


def init_classifier(input_dim: int, rng: np.random.RandomState,
                    hidden_layers: int = HIDDEN_LAYERS,
                    width: int = HIDDEN_WIDTH,
                    n_classes: int = 2,
                    prefix: str = "cls") -> Dict[str, Tensor]:
    P: Dict[str, Tensor] = {}
    dim = input_dim
    for i in range(hidden_layers):
        P[f"{prefix}.h{i}.w"] = ta.parameter(
            ta.glorot_uniform(rng, (dim, width), dim, width))
        P[f"{prefix}.h{i}.b"] = ta.parameter(
            np.zeros(width, dtype=ta.default_dtype()))
        dim = width
    P[f"{prefix}.out.w"] = ta.parameter(
        ta.glorot_uniform(rng, (dim, n_classes), dim, n_classes))
    P[f"{prefix}.out.b"] = ta.parameter(
        np.zeros(n_classes, dtype=ta.default_dtype()))
    return P


def classifier_logits(P: Dict[str, Tensor], x: Tensor,
                      hidden_layers: int = HIDDEN_LAYERS,
                      prefix: str = "cls") -> Tensor:
    for i in range(hidden_layers):
        x = ta.relu(ta.add(ta.matmul(x, P[f"{prefix}.h{i}.w"]),
                           P[f"{prefix}.h{i}.b"]))
    return ta.add(ta.matmul(x, P[f"{prefix}.out.w"]), P[f"{prefix}.out.b"])


# ---------------------------------------------------------------------------
# Splits


@dataclass(frozen=True)
class SplitSpec:
    train: float = 0.8
    valid: float = 0.1
    test: float = 0.1
    seed: int = 0


def stratified_split(labels: Sequence[int], spec: SplitSpec
                     ) -> Tuple[list, list, list]:
    """Disjoint, exhaustive index partition keeping class balance."""
    rng = random.Random(spec.seed)
    by_label: Dict[int, list] = {}
    for i, y in enumerate(labels):
        by_label.setdefault(y, []).append(i)
    train, valid, test = [], [], []
    for y in sorted(by_label):
        idx = by_label[y]
        rng.shuffle(idx)
        n = len(idx)
        n_train = round(n * spec.train)
        n_valid = round(n * spec.valid)
        train += idx[:n_train]
        valid += idx[n_train:n_train + n_valid]
        test += idx[n_train + n_valid:]
    return sorted(train), sorted(valid), sorted(test)


# ---------------------------------------------------------------------------
# Feature extraction with a frozen encoder


def encode_examples(encoder: EncoderModel,
                    examples: Sequence[LabeledExample],
                    batch_size: int = 128) -> Tuple[np.ndarray, np.ndarray]:
    """Features for a task-homogeneous dataset: single-input tasks give the
    encoding, pair tasks the concatenation of (a, b) encodings."""
    tasks = {ex.task for ex in examples}
    if len(tasks) > 1:
        raise ValueError(f"dataset mixes tasks: {sorted(tasks)}")
    pair = tasks.pop() in PAIR_TASKS if tasks else False
    strings: List[str] = []
    for ex in examples:
        strings.append(ex.a)
        if pair:
            strings.append(ex.b)
    vecs = []
    for start in range(0, len(strings), batch_size):
        vecs.append(encode_batch(encoder,
                                 strings[start:start + batch_size]).data)
    flat = np.concatenate(vecs, axis=0) if vecs else np.zeros((0, 1))
    if pair:
        X = flat.reshape(len(examples), -1)
    else:
        X = flat
    y = np.array([ex.label for ex in examples], dtype=np.int64)
    return X.astype(np.float64), y


def _params_bytes(params: Dict[str, Tensor]) -> bytes:
    return b"".join(np.ascontiguousarray(params[k].data).tobytes()
                    for k in sorted(params))


@dataclass
class EvalReport:
    task: str
    arch: str
    mode: str
    test_accuracy: float
    best_step: int


def _accuracy(P, X, y, hidden_layers=HIDDEN_LAYERS) -> float:
    logits = classifier_logits(P, ta.constant(X), hidden_layers)
    return float((logits.data.argmax(axis=1) == y).mean())


def _val_loss(P, X, y, hidden_layers=HIDDEN_LAYERS) -> float:
    logits = classifier_logits(P, ta.constant(X), hidden_layers)
    return ta.softmax_cross_entropy(logits, y, reduction="mean").item()


def train_classifier_on_features(X: np.ndarray, y: np.ndarray,
                                 steps: int = 3000, batch: int = 32,
                                 seed: int = 0, lr: float = 1e-4,
                                 split: Optional[SplitSpec] = None,
                                 hidden_layers: int = HIDDEN_LAYERS
                                 ) -> Tuple[float, int]:
    """Train the feed-forward classifier with best-validation-checkpoint
    selection; returns (test accuracy, best step)."""
    split = split or SplitSpec(seed=seed)
    if min(np.bincount(y, minlength=2)) < 10:
        raise ValueError("dataset too small: need >= 10 examples per class")
    tr, va, te = stratified_split(y.tolist(), split)
    # standardize features with train-split statistics; pooled encoder
    # features have very uneven per-dimension scales otherwise
    mu = X[tr].mean(axis=0)
    sd = X[tr].std(axis=0) + 1e-6
    X = ((X - mu) / sd).astype(X.dtype)
    rng = np.random.RandomState(seed)
    P = init_classifier(X.shape[1], rng, hidden_layers=hidden_layers)
    opt = ta.AdamState(P, lr=lr)
    brng = random.Random(seed + 1)
    eval_every = max(1, steps // 30)
    best = (np.inf, 0, {k: p.data.copy() for k, p in P.items()})
    for step in range(1, steps + 1):
        idx = [tr[brng.randrange(len(tr))] for _ in range(batch)]
        logits = classifier_logits(P, ta.constant(X[idx]), hidden_layers)
        loss = ta.softmax_cross_entropy(logits, y[idx], reduction="mean")
        ta.zero_grads(P)
        ta.backward(loss)
        ta.adam_step(opt)
        if step % eval_every == 0 or step == steps:
            vl = _val_loss(P, X[va], y[va], hidden_layers)
            if vl < best[0]:
                best = (vl, step, {k: p.data.copy() for k, p in P.items()})
    for k, p in P.items():
        p.data = best[2][k]
    return _accuracy(P, X[te], y[te], hidden_layers), best[1]


def train_frozen_classifier(encoder: EncoderModel,
                            dataset: Sequence[LabeledExample],
                            steps: int = 3000, batch: int = 32,
                            seed: int = 0, lr: float = 1e-4,
                            mode: str = "") -> EvalReport:
    """Property classifier over a frozen encoder; encoder parameters are
    verified bit-identical before and after."""
    before = _params_bytes(encoder.params)
    X, y = encode_examples(encoder, dataset)
    acc, best_step = train_classifier_on_features(
        X, y, steps=steps, batch=batch, seed=seed, lr=lr)
    after = _params_bytes(encoder.params)
    if before != after:
        raise RuntimeError("frozen encoder parameters changed during "
                           "classifier training")
    task = dataset[0].task if dataset else "unknown"
    return EvalReport(task, encoder.config.arch, mode, acc, best_step)


# ---------------------------------------------------------------------------
# Explicit (multi-task) training


def explicit_multitask_train(encoder: EncoderModel,
                             datasets: Dict[str, Sequence[LabeledExample]],
                             steps: int = 1000, batch: int = 16,
                             seed: int = 0, lr: float = 1e-4
                             ) -> Dict[str, Dict[str, Tensor]]:
    """Jointly train per-property heads (two fully connected layers each)
    and the encoder itself; the total loss is the sum over properties."""
    if not datasets:
        raise ValueError("need at least one property dataset")
    rng = np.random.RandomState(seed)
    enc_dim = encoder.encoding_dim
    heads: Dict[str, Dict[str, Tensor]] = {}
    for task in sorted(datasets):
        pair = task in PAIR_TASKS
        heads[task] = init_classifier(enc_dim * (2 if pair else 1), rng,
                                      hidden_layers=1, prefix=f"head.{task}")
    all_params = dict(encoder.params)
    for task, hp in heads.items():
        all_params.update(hp)
    opt = ta.AdamState(all_params, lr=lr)
    brng = random.Random(seed + 1)
    for step in range(steps):
        loss = None
        for task in sorted(datasets):
            data = datasets[task]
            pair = task in PAIR_TASKS
            exs = [data[brng.randrange(len(data))] for _ in range(batch)]
            strings = [ex.a for ex in exs] + ([ex.b for ex in exs] if pair
                                              else [])
            embs = encode_batch(encoder, strings)
            if pair:
                a = ta.narrow(embs, 0, 0, batch)
                b = ta.narrow(embs, 0, batch, batch)
                feats = ta.concat([a, b], axis=-1)
            else:
                feats = embs
            logits = classifier_logits(heads[task], feats, hidden_layers=1,
                                       prefix=f"head.{task}")
            part = ta.softmax_cross_entropy(
                logits, [ex.label for ex in exs], reduction="mean")
            loss = part if loss is None else ta.add(loss, part)
        ta.zero_grads(all_params)
        ta.backward(loss)
        ta.adam_step(opt)
        if step % 100 == 0:
            log.info("explicit step %d loss %.4f", step, loss.item())
    return heads


def multitask_loss(encoder: EncoderModel,
                   heads: Dict[str, Dict[str, Tensor]],
                   batches: Dict[str, Sequence[LabeledExample]]) -> float:
    """Total loss on fixed batches: the sum of per-task losses."""
    total = 0.0
    for task in sorted(batches):
        exs = batches[task]
        pair = task in PAIR_TASKS
        strings = [ex.a for ex in exs] + ([ex.b for ex in exs] if pair else [])
        embs = encode_batch(encoder, strings)
        n = len(exs)
        if pair:
            feats = ta.concat([ta.narrow(embs, 0, 0, n),
                               ta.narrow(embs, 0, n, n)], axis=-1)
        else:
            feats = embs
        logits = classifier_logits(heads[task], feats, hidden_layers=1,
                                   prefix=f"head.{task}")
        total += ta.softmax_cross_entropy(
            logits, [ex.label for ex in exs], reduction="mean").item()
    return total


# ---------------------------------------------------------------------------
# Linear probes


def linear_probe(encodings: np.ndarray, labels: Sequence[float],
                 kind: str = "classify", seed: int = 0,
                 steps: int = 2000, lr: float = 1e-2) -> float:
    """Logistic-regression (classify) or rounded linear-regression
    (regress) probe with an internal 80/20 split."""
    X = np.asarray(encodings, dtype=np.float64)
    y = np.asarray(labels)
    rng = random.Random(seed)
    idx = list(range(len(y)))
    rng.shuffle(idx)
    cut = int(0.8 * len(idx))
    tr, te = idx[:cut], idx[cut:]
    if kind == "regress":
        A = np.concatenate([X[tr], np.ones((len(tr), 1))], axis=1)
        coef, *_ = np.linalg.lstsq(A, y[tr].astype(np.float64), rcond=None)
        pred = np.concatenate([X[te], np.ones((len(te), 1))], axis=1) @ coef
        return float((np.rint(pred) == y[te]).mean())
    if kind != "classify":
        raise ValueError(f"unknown probe kind {kind!r}")
    classes = sorted(set(int(v) for v in y))
    remap = {c: i for i, c in enumerate(classes)}
    yi = np.array([remap[int(v)] for v in y], dtype=np.int64)
    nrng = np.random.RandomState(seed)
    # single linear layer: a logistic-regression decision boundary
    W = ta.parameter(ta.glorot_uniform(nrng, (X.shape[1], len(classes)),
                                       X.shape[1], len(classes)))
    b = ta.parameter(np.zeros(len(classes), dtype=ta.default_dtype()))
    opt = ta.AdamState({"w": W, "b": b}, lr=lr)
    Xtr = X[tr]
    for _ in range(steps):
        logits = ta.add(ta.matmul(ta.constant(Xtr), W), b)
        loss = ta.softmax_cross_entropy(logits, yi[tr], reduction="mean")
        ta.zero_grads({"w": W, "b": b})
        ta.backward(loss)
        ta.adam_step(opt)
    logits = ta.add(ta.matmul(ta.constant(X[te]), W), b)
    return float((logits.data.argmax(axis=1) == yi[te]).mean())


def connective_presence_labels(strings: Sequence[str],
                               connective: str = "&") -> List[int]:
    return [1 if connective in s else 0 for s in strings]


def quantifier_count_labels(strings: Sequence[str]) -> List[int]:
    return [s.count("![") + s.count("?[") for s in strings]


# ---------------------------------------------------------------------------
# Premise selection


def premise_select(encoder: EncoderModel,
                   dataset: Sequence[LabeledExample],
                   steps: int = 3000, batch: int = 32, seed: int = 0,
                   lr: float = 1e-4, mode: str = "") -> EvalReport:
    """Binary usefulness classifier on concatenated (conjecture, premise)
    encodings; same protocol as the frozen property classifiers."""
    if any(ex.task != "premise_selection" for ex in dataset):
        raise ValueError("dataset must be premise_selection examples")
    return train_frozen_classifier(encoder, dataset, steps=steps,
                                   batch=batch, seed=seed, lr=lr, mode=mode)


# ---------------------------------------------------------------------------
# Reporting


REPORT_HEADER = "task,arch,mode,test_accuracy,best_step"


def report_csv(reports: Sequence[EvalReport], path) -> None:
    rows = sorted(reports, key=lambda r: (r.task, r.arch, r.mode))
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(REPORT_HEADER + "\n")
        for r in rows:
            fh.write(f"{r.task},{r.arch},{r.mode},"
                     f"{r.test_accuracy:.4f},{r.best_step}\n")
