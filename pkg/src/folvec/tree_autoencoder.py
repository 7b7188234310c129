"""Decodable formula embeddings: top-symbol classifier + per-child-index
subtree extractors over any of the sequence encoders.

Two training modes: difference (regress extracted child embeddings onto
independently computed ones) and recursive (chain extractors from the root
embedding and classify the top symbol at every ground-truth node).
"""

from __future__ import annotations

import logging
import random
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from . import encoders, tensor_autodiff as ta
from .dataset_gen import build_signature, tree_label
from .encoders import EncoderConfig, EncoderModel, encode_batch
from .fol_core import SignatureTable, children, depth, pretty_print
from .fol_core import (
    And, Application, Atom, Constant, Exists, Forall, Iff, Implies, Not, Or,
    Variable,
)
from .tensor_autodiff import Tensor
from .tptp_parser import parse_formula

log = logging.getLogger(__name__)


# ---------------------------------------------------------------------------
# Tree view


@dataclass(frozen=True)
class TreeView:
    label_id: int
    children: tuple = ()


TRUNCATED = TreeView(label_id=-1)


class TreeViewError(Exception):
    pass


def to_tree_view(e, sig: SignatureTable, register: bool = False) -> TreeView:
    name, arity, kind = tree_label(e)
    if register:
        label_id = sig.register(name, arity, kind)
    else:
        try:
            label_id = sig.lookup(name, arity, kind)
        except KeyError:
            raise TreeViewError(f"unknown label {(name, arity, kind)}")
    kids = tuple(to_tree_view(c, sig, register) for c in children(e))
    return TreeView(label_id, kids)


_BINARY_BY_NAME = {"&": And, "|": Or, "=>": Implies, "<=>": Iff}
_QUANT_BY_NAME = {"!": Forall, "?": Exists}


def from_tree_view(t: TreeView, sig: SignatureTable):
    """Rebuild a Formula/Term; raises TreeViewError on arity or kind
    inconsistencies (e.g. a quantifier whose first child is not a
    variable leaf)."""
    if t.label_id < 0 or t.label_id >= sig.num_labels():
        raise TreeViewError(f"unknown label id {t.label_id}")
    name, arity, kind = sig.label(t.label_id)
    if len(t.children) != arity:
        raise TreeViewError(
            f"arity mismatch for {name}: expected {arity}, "
            f"got {len(t.children)}")
    if kind == "variable":
        return Variable(name)
    if kind == "constant":
        return Constant(name)
    if kind == "function":
        return Application(name, tuple(from_tree_view(c, sig)
                                       for c in t.children))
    if kind == "predicate":
        return Atom(name, tuple(from_tree_view(c, sig) for c in t.children))
    if kind == "connective":
        if name == "~":
            return Not(from_tree_view(t.children[0], sig))
        return _BINARY_BY_NAME[name](from_tree_view(t.children[0], sig),
                                     from_tree_view(t.children[1], sig))
    if kind == "quantifier":
        var = from_tree_view(t.children[0], sig)
        if not isinstance(var, Variable):
            raise TreeViewError("quantifier child 0 must be a variable leaf")
        return _QUANT_BY_NAME[name](var.name,
                                    from_tree_view(t.children[1], sig))
    raise TreeViewError(f"unknown kind {kind!r}")


def tree_depth(t: TreeView) -> int:
    if not t.children:
        return 1
    return 1 + max(tree_depth(c) for c in t.children)


def tree_size(t: TreeView) -> int:
    return 1 + sum(tree_size(c) for c in t.children)


# ---------------------------------------------------------------------------
# Decoder heads


def init_heads(encoding_dim: int, sig: SignatureTable,
               rng: np.random.RandomState) -> Dict[str, Tensor]:
    """Top-symbol classifier (one linear layer) plus one extractor matrix
    per child index."""
    P: Dict[str, Tensor] = {}
    n = sig.num_labels()
    P["dec.top.w"] = ta.parameter(
        ta.glorot_uniform(rng, (encoding_dim, n), encoding_dim, n),
        name="dec.top.w")
    P["dec.top.b"] = ta.parameter(np.zeros(n, dtype=ta.default_dtype()),
                                  name="dec.top.b")
    for i in range(sig.max_arity):
        P[f"dec.ext{i}.w"] = ta.parameter(
            ta.glorot_uniform(rng, (encoding_dim, encoding_dim),
                              encoding_dim, encoding_dim),
            name=f"dec.ext{i}.w")
    return P


def top_logits(heads: Dict[str, Tensor], emb: Tensor) -> Tensor:
    return ta.add(ta.matmul(emb, heads["dec.top.w"]), heads["dec.top.b"])


def classify_top(heads: Dict[str, Tensor], emb: Tensor) -> np.ndarray:
    """Distribution over labels for a single embedding or a batch."""
    return ta.softmax(top_logits(heads, emb)).data


def extract_child(heads: Dict[str, Tensor], emb: Tensor, i: int) -> Tensor:
    key = f"dec.ext{i}.w"
    if key not in heads:
        raise IndexError(f"child index {i} out of range")
    return ta.matmul(emb, heads[key])


# ---------------------------------------------------------------------------
# Autoencoder bundle


class TreeAutoencoder:
    def __init__(self, encoder: EncoderModel, heads: Dict[str, Tensor],
                 sig: SignatureTable, detach_targets: bool = False):
        self.encoder = encoder
        self.heads = heads
        self.sig = sig
        self.detach_targets = detach_targets

    def all_params(self) -> Dict[str, Tensor]:
        return {**self.encoder.params, **self.heads}

    def save(self, path) -> None:
        meta = {
            "config": self.encoder.config.to_dict(),
            "vocab": self.encoder.vocab,
            "signature": self.sig.to_dict(),
        }
        ta.save_checkpoint(self.all_params(), path, metadata=meta)

    @classmethod
    def load(cls, path) -> "TreeAutoencoder":
        params, meta = ta.load_checkpoint(path)
        if meta is None or "signature" not in meta:
            raise ta.CheckpointError("missing autoencoder metadata")
        config = EncoderConfig.from_dict(meta["config"])
        vocab = {k: int(v) for k, v in meta["vocab"].items()}
        sig = SignatureTable.from_dict(meta["signature"])
        enc_params = {n: p for n, p in params.items()
                      if not n.startswith("dec.")}
        heads = {n: p for n, p in params.items() if n.startswith("dec.")}
        encoder = EncoderModel(config, vocab, enc_params)
        return cls(encoder, heads, sig)


# ---------------------------------------------------------------------------
# Losses


@dataclass
class TreeRecord:
    """A tree together with the strings needed to train on it."""
    string: str
    view: TreeView
    child_strings: tuple  # pretty-printed immediate children


def expand_records(corpus: Sequence[str], sig: SignatureTable,
                   register: bool = False) -> List[TreeRecord]:
    """All trees and all their subtrees, one record each (the difference
    training set)."""
    out = []

    def walk(e):
        view = to_tree_view(e, sig, register)
        kids = children(e)
        out.append(TreeRecord(pretty_print(e), view,
                              tuple(pretty_print(c) for c in kids)))
        for c in kids:
            walk(c)

    for line in corpus:
        walk(parse_formula(line))
    return out


def difference_loss(ae: TreeAutoencoder, batch: Sequence[TreeRecord]
                    ) -> Tensor:
    """Cross-entropy on each tree's top symbol plus MSE between extracted
    and independently encoded child embeddings."""
    strings = [r.string for r in batch]
    child_offsets = []
    for r in batch:
        child_offsets.append(len(strings))
        strings.extend(r.child_strings)
    embs = encode_batch(ae.encoder, strings)
    n = len(batch)
    parent_embs = ta.narrow(embs, 0, 0, n)
    logits = top_logits(ae.heads, parent_embs)
    labels = [r.view.label_id for r in batch]
    loss = ta.softmax_cross_entropy(logits, labels, reduction="sum")
    for j, r in enumerate(batch):
        if not r.child_strings:
            continue
        parent = ta.narrow(embs, 0, j, 1)
        for i in range(len(r.child_strings)):
            target = ta.narrow(embs, 0, child_offsets[j] + i, 1)
            if ae.detach_targets:
                target = ta.constant(target.data)
            loss = ta.add(loss, ta.mse(extract_child(ae.heads, parent, i),
                                       target))
    return loss


def recursive_loss(ae: TreeAutoencoder, batch: Sequence[TreeRecord]
                   ) -> Tuple[Tensor, int]:
    """Encode each root once, chain extractors along the ground-truth
    structure, cross-entropy at every node.  Returns (loss, node count)."""
    embs = encode_batch(ae.encoder, [r.string for r in batch])
    terms = [0]
    loss_parts: List[Tensor] = []

    def walk(emb: Tensor, view: TreeView):
        logits = top_logits(ae.heads, emb)
        loss_parts.append(
            ta.softmax_cross_entropy(logits, [view.label_id],
                                     reduction="sum"))
        terms[0] += 1
        for i, c in enumerate(view.children):
            walk(extract_child(ae.heads, emb, i), c)

    for j, r in enumerate(batch):
        walk(ta.narrow(embs, 0, j, 1), r.view)
    total = loss_parts[0]
    for part in loss_parts[1:]:
        total = ta.add(total, part)
    return total, terms[0]


# ---------------------------------------------------------------------------
# Training


@dataclass
class TrainConfig:
    mode: str = "recursive"           # "difference" | "recursive"
    steps: int = 1000
    batch_size: Optional[int] = None  # defaults: 32 difference, 16 recursive
    lr: float = 1e-4
    seed: int = 0
    detach_targets: bool = False
    log_every: int = 100

    def resolved_batch(self) -> int:
        if self.batch_size is not None:
            return self.batch_size
        return 32 if self.mode == "difference" else 16


class TrainingDiverged(Exception):
    def __init__(self, step: int, loss: float, max_grad: float):
        self.step = step
        self.loss = loss
        self.max_grad = max_grad
        super().__init__(
            f"non-finite loss at step {step}: loss={loss}, "
            f"max gradient={max_grad}")


def train(corpus: Sequence[str], enc_config: EncoderConfig,
          train_config: TrainConfig,
          sig: Optional[SignatureTable] = None,
          loss_history: Optional[list] = None) -> TreeAutoencoder:
    """Train a tree autoencoder on a formula corpus."""
    if train_config.mode not in ("difference", "recursive"):
        raise ValueError(f"unknown mode {train_config.mode!r}")
    sig = sig or build_signature(corpus)
    vocab = encoders.build_vocab(corpus)
    encoder = encoders.build_encoder(enc_config, vocab,
                                     seed=train_config.seed)
    rng_np = np.random.RandomState(train_config.seed + 1)
    heads = init_heads(encoder.encoding_dim, sig, rng_np)
    ae = TreeAutoencoder(encoder, heads, sig,
                         detach_targets=train_config.detach_targets)

    if train_config.mode == "difference":
        records = expand_records(corpus, sig)
    else:
        records = [TreeRecord(line, to_tree_view(parse_formula(line), sig), ())
                   for line in corpus]

    params = ae.all_params()
    opt = ta.AdamState(params, lr=train_config.lr)
    rng = random.Random(train_config.seed + 2)
    batch_size = train_config.resolved_batch()
    for step in range(train_config.steps):
        batch = [records[rng.randrange(len(records))]
                 for _ in range(batch_size)]
        if train_config.mode == "difference":
            loss = difference_loss(ae, batch)
        else:
            loss, _ = recursive_loss(ae, batch)
        value = loss.item()
        if not np.isfinite(value):
            max_grad = max((np.abs(p.grad).max() for p in params.values()
                            if p.grad is not None), default=0.0)
            raise TrainingDiverged(step, value, float(max_grad))
        ta.zero_grads(params)
        ta.backward(loss)
        ta.adam_step(opt)
        if loss_history is not None:
            loss_history.append(value)
        if step % train_config.log_every == 0:
            log.info("step %d loss %.4f", step, value)
    return ae


# ---------------------------------------------------------------------------
# Decoding and metrics


def decode_tree(ae: TreeAutoencoder, embedding: np.ndarray,
                depth_cap: int = 32) -> TreeView:
    """Greedy recursive decode; exhausted depth yields a TRUNCATED marker
    whose ground-truth nodes all count as wrong."""

    def step(emb: Tensor, budget: int) -> TreeView:
        if budget <= 0:
            return TRUNCATED
        dist = classify_top(ae.heads, emb)
        label = int(dist.reshape(-1, dist.shape[-1])[0].argmax())
        arity = ae.sig.arity(label)
        kids = tuple(step(extract_child(ae.heads, emb, i), budget - 1)
                     for i in range(arity))
        return TreeView(label, kids)

    emb = ta.constant(np.asarray(embedding).reshape(1, -1))
    return step(emb, depth_cap)


def decode_string(ae: TreeAutoencoder, s: str, depth_cap: int = 32
                  ) -> TreeView:
    vec = encoders.encode_string(ae.encoder, s)
    return decode_tree(ae, vec, depth_cap)


def _matched_symbols(pred: TreeView, truth: TreeView) -> int:
    """Top-down index-wise alignment, descending only where both trees
    have a child at an index."""
    m = 1 if pred.label_id == truth.label_id else 0
    for i in range(min(len(pred.children), len(truth.children))):
        m += _matched_symbols(pred.children[i], truth.children[i])
    return m


@dataclass
class DecodeMetrics:
    formula_accuracy: float
    symbol_accuracy: float
    per_depth: Dict[int, float]
    per_depth_counts: Dict[int, int]
    oov_skipped: int

    def csv_row(self, arch: str, mode: str, dataset: str,
                max_depth: int = 12) -> str:
        cells = [arch, mode, dataset,
                 f"{self.formula_accuracy:.4f}", f"{self.symbol_accuracy:.4f}"]
        for d in range(1, max_depth + 1):
            v = self.per_depth.get(d)
            cells.append("" if v is None else f"{v:.4f}")
        return ",".join(cells)

    @staticmethod
    def csv_header(max_depth: int = 12) -> str:
        cols = ["arch", "mode", "dataset", "formula_acc", "symbol_acc"]
        cols += [f"d{d}" for d in range(1, max_depth + 1)]
        return ",".join(cols)


def decoding_metrics(ae: TreeAutoencoder, corpus: Sequence[str],
                     depth_cap: int = 32,
                     batch_size: int = 64) -> DecodeMetrics:
    views = []
    kept = []
    oov = 0
    for line in corpus:
        try:
            views.append(to_tree_view(parse_formula(line), ae.sig))
            kept.append(line)
        except TreeViewError:
            oov += 1
    exact = 0
    sym_fracs = []
    by_depth: Dict[int, List[int]] = {}
    for start in range(0, len(kept), batch_size):
        chunk = kept[start:start + batch_size]
        embs = encode_batch(ae.encoder, chunk).data
        for j, line in enumerate(chunk):
            truth = views[start + j]
            pred = decode_tree(ae, embs[j], depth_cap)
            hit = int(pred == truth)
            exact += hit
            sym_fracs.append(_matched_symbols(pred, truth) / tree_size(truth))
            by_depth.setdefault(tree_depth(truth), []).append(hit)
    # out-of-vocabulary formulas count as decode failures
    sym_fracs.extend([0.0] * oov)
    n = max(len(kept) + oov, 1)
    per_depth = {d: float(np.mean(v)) for d, v in sorted(by_depth.items())}
    per_depth_counts = {d: len(v) for d, v in sorted(by_depth.items())}
    return DecodeMetrics(
        formula_accuracy=exact / n,
        symbol_accuracy=float(np.mean(sym_fracs)) if sym_fracs else 0.0,
        per_depth=per_depth,
        per_depth_counts=per_depth_counts,
        oov_skipped=oov,
    )
