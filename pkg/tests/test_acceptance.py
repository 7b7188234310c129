"""Acceptance suite: one test per criterion, each printing a PASS line.

The training-based criteria share module-scoped fixtures so the whole
suite stays well inside its CPU budget.
"""

import glob
import itertools
import math
import os
import random
import statistics
import time

import numpy as np
import pytest

from folvec import checks, dataset_gen as dg, encoders, eval_harness as eh
from folvec import fol_core as fc, tensor_autodiff as ta
from folvec import tree_autoencoder as tae
from folvec.fol_core import (
    Application, Constant, Substitution, Variable, apply_substitution,
    pretty_print,
)
from folvec.logic_oracles import Unifiable, unify
from folvec.tptp_parser import load_corpus, parse_formula

SEEDS = (0, 1, 2)
HERE = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))


def _report(name, ok, detail):
    print(f"\n[{'PASS' if ok else 'FAIL'}] {name}: {detail}")
    assert ok, f"{name}: {detail}"


# -- 1: parser round-trip ----------------------------------------------------

def _fixture_formulas():
    out = []
    pattern = os.path.join(HERE, "tests", "fixtures", "*.p")
    for path in sorted(glob.glob(pattern)):
        out.extend(load_corpus(path))
    assert out, "no fixture formulas found"
    return out


def test_criterion_1_parser_roundtrip():
    t0 = time.time()
    corpus = dg.gen_random_corpus(10_000, max_depth=6, seed=101)
    corpus += [s for s in _fixture_formulas()]
    n_ok = 0
    for s in corpus:
        f = parse_formula(s)
        assert parse_formula(pretty_print(f)) == f
        n_ok += 1
    dt = time.time() - t0
    _report("criterion 1 (parser round-trip)", dt < 10.0,
            f"{n_ok} formulas round-tripped in {dt:.1f}s")


# -- 2: oracle audit ---------------------------------------------------------

def test_criterion_2_oracle_audit():
    t0 = time.time()
    corpus = dg.gen_random_corpus(2_000, max_depth=4, seed=102)
    sig = dg.build_signature(corpus)
    n = 0
    n += dg.audit_examples(dg.gen_well_formed(corpus, 2000, seed=1))
    n += dg.audit_examples(dg.gen_subformula(corpus, 2000, seed=2))
    n += dg.audit_examples(dg.gen_modus_ponens(corpus, 2000, seed=3))
    n += dg.audit_examples(dg.gen_alpha(corpus, 2000, seed=4))
    n += dg.audit_examples(dg.gen_term_vs_formula(corpus, 2000, seed=5,
                                                  signature=sig),
                           signature=sig)
    n += dg.audit_examples(dg.gen_unifiability(corpus, 2000, seed=6))
    dt = time.time() - t0
    _report("criterion 2 (oracle audit)", n == 12_000 and dt < 60.0,
            f"{n}/12000 examples re-verified in {dt:.1f}s")


# -- 3: unification vs brute force ------------------------------------------

def _rand_term(rng, depth, variables):
    if depth == 0 or rng.random() < 0.35:
        return rng.choice([Variable(v) for v in variables]
                          + [Constant("a"), Constant("b")])
    if rng.random() < 0.5:
        return Application("g", (_rand_term(rng, depth - 1, variables),))
    return Application("f", (_rand_term(rng, depth - 1, variables),
                             _rand_term(rng, depth - 1, variables)))


def _term_vars(t):
    if isinstance(t, Variable):
        return {t.name}
    if isinstance(t, Application):
        return set().union(*(_term_vars(a) for a in t.args))
    return set()


def _ground_terms(depth):
    out = [Constant("a"), Constant("b")]
    if depth > 0:
        below = _ground_terms(depth - 1)
        out += [Application("g", (t,)) for t in below]
        pairs = itertools.product(below, below)
        out += [Application("f", p) for p in pairs]
    return out


def test_criterion_3_unify_vs_brute_force():
    t0 = time.time()
    rng = random.Random(103)
    pool = _ground_terms(1)
    checked = 0
    for _ in range(500):
        t1 = _rand_term(rng, 3, ["X", "Y", "Z"])
        t2 = _rand_term(rng, 3, ["X", "Y", "Z"])
        res = unify(t1, t2)
        vs = sorted(_term_vars(t1) | _term_vars(t2))
        if isinstance(res, Unifiable):
            s = res.mgu
            assert apply_substitution(t1, s) == apply_substitution(t2, s)
            for _, rhs in s.bindings.items():
                assert apply_substitution(rhs, s) == rhs  # idempotent
        else:
            # no bounded ground instantiation may reconcile the pair
            for combo in itertools.product(pool, repeat=len(vs)):
                s = Substitution(dict(zip(vs, combo)))
                assert apply_substitution(t1, s) != apply_substitution(t2, s), (
                    pretty_print(t1), pretty_print(t2))
        checked += 1
    dt = time.time() - t0
    _report("criterion 3 (unify vs brute force)", dt < 120.0,
            f"{checked}/500 pairs agree in {dt:.1f}s")


# -- 4: gradient checks ------------------------------------------------------

def test_criterion_4_gradient_checks():
    t0 = time.time()
    results = checks.check_all(seed=0)
    worst = max(results.values())
    dt = time.time() - t0
    _report("criterion 4 (gradient checks)", worst <= 1e-3 and dt < 600.0,
            f"max relative error {worst:.2e} over {len(results)} checks "
            f"in {dt:.1f}s")


# -- shared desk-scale fixtures ---------------------------------------------

TOY_SEED = 11
ENC_CNN = encoders.EncoderConfig(arch="cnn", token_dim=64, output_dim=64,
                                 layers=2, max_len=64)
ENC_TFM = encoders.EncoderConfig(arch="transformer", token_dim=64,
                                 output_dim=64, layers=2, heads=4,
                                 max_len=64)
TRAIN_STEPS = 5_000
TRAIN_LR = 1e-3


@pytest.fixture(scope="module")
def toy_corpus_5k():
    corpus = dg.gen_random_corpus(5_000, max_depth=4, seed=TOY_SEED,
                                  cfg=dg.toy_sampler_config())
    sig = dg.build_signature(corpus)
    assert sig.num_labels() <= 15
    assert max(fc.depth(parse_formula(s)) for s in corpus) <= 4
    return corpus


def _train(corpus, enc_config, mode, seed):
    tc = tae.TrainConfig(mode=mode, steps=TRAIN_STEPS, batch_size=16,
                         lr=TRAIN_LR, seed=seed)
    return tae.train(corpus, enc_config, tc)


@pytest.fixture(scope="module")
def recursive_cnn_aes(toy_corpus_5k):
    return {s: _train(toy_corpus_5k, ENC_CNN, "recursive", s) for s in SEEDS}


# -- 6: desk-scale autoencoding ---------------------------------------------

def test_criterion_6_desk_scale_autoencoding(toy_corpus_5k,
                                             recursive_cnn_aes):
    t0 = time.time()
    uniq = sorted(set(toy_corpus_5k))
    by_depth = {d: [s for s in uniq
                    if fc.depth(parse_formula(s)) == d] for d in (1, 2, 3, 4)}
    d3 = by_depth[1] + by_depth[2] + by_depth[3]
    d4 = by_depth[4][:500]

    lines = []
    ok = True
    for seed in SEEDS:
        rec_cnn = recursive_cnn_aes[seed]
        rec_tfm = _train(toy_corpus_5k, ENC_TFM, "recursive", seed)
        diff_cnn = _train(toy_corpus_5k, ENC_CNN, "difference", seed)

        cnn3 = tae.decoding_metrics(rec_cnn, d3).formula_accuracy
        tfm3 = tae.decoding_metrics(rec_tfm, d3).formula_accuracy
        rec4 = tae.decoding_metrics(rec_cnn, d4).formula_accuracy
        diff4 = tae.decoding_metrics(diff_cnn, d4).formula_accuracy

        seed_ok = cnn3 >= 0.80 and tfm3 >= 0.80 and diff4 < rec4
        ok = ok and seed_ok
        lines.append(f"seed {seed}: cnn@d<=3 {cnn3:.3f}, "
                     f"tfm@d<=3 {tfm3:.3f}, rec@d4 {rec4:.3f}, "
                     f"diff@d4 {diff4:.3f}")
    dt = time.time() - t0
    _report("criterion 6 (desk-scale autoencoding)", ok and dt < 7200.0,
            "; ".join(lines) + f"; {dt:.0f}s")


# -- 7: desk-scale property classification ----------------------------------

def test_criterion_7_property_classification(toy_corpus_5k,
                                             recursive_cnn_aes):
    t0 = time.time()
    encoder = recursive_cnn_aes[0].encoder
    sig = dg.build_signature(toy_corpus_5k)
    datasets = {
        "term_vs_formula": dg.gen_term_vs_formula(toy_corpus_5k, 10_000,
                                                  seed=71, signature=sig),
        "well_formed": dg.gen_well_formed(toy_corpus_5k, 10_000, seed=72),
        "alpha_equiv": dg.gen_alpha(toy_corpus_5k, 10_000, seed=73),
    }
    floors = {"term_vs_formula": 0.95, "well_formed": 0.90,
              "alpha_equiv": 0.85}
    ok = True
    lines = []
    for task, data in datasets.items():
        X, y = eh.encode_examples(encoder, data)
        accs = [eh.train_classifier_on_features(X, y, steps=5000, lr=1e-3,
                                                seed=s)[0] for s in SEEDS]
        med = statistics.median(accs)
        ok = ok and med >= floors[task]
        lines.append(f"{task} median {med:.3f} (floor {floors[task]})")
    dt = time.time() - t0
    _report("criterion 7 (property classification)", ok and dt < 3600.0,
            "; ".join(lines) + f"; {dt:.0f}s")


# -- 8: premise-selection harness -------------------------------------------

def _synthetic_deepmath(path, n_blocks, seed, shuffle_labels=False):
    rng = random.Random(seed)
    with open(path, "w", encoding="utf-8") as fh:
        for i in range(n_blocks):
            fh.write(f"C p{i % 50}(c{i % 20})\n")
            pos = f"useful_{rng.randrange(100)}(a)"
            neg = f"noise_{rng.randrange(100)}(a)"
            if shuffle_labels and rng.random() < 0.5:
                pos, neg = neg, pos
            fh.write(f"+ {pos}\n- {neg}\n\n")


def test_criterion_8_premise_selection(tmp_path, recursive_cnn_aes):
    t0 = time.time()
    encoder = recursive_cnn_aes[0].encoder
    real = tmp_path / "dm.txt"
    _synthetic_deepmath(real, 1000, seed=81)
    rep = eh.premise_select(encoder, dg.load_deepmath(real), steps=2000,
                            seed=0)
    shuf = tmp_path / "dm_shuffled.txt"
    _synthetic_deepmath(shuf, 1000, seed=81, shuffle_labels=True)
    rep_s = eh.premise_select(encoder, dg.load_deepmath(shuf), steps=2000,
                              seed=0)
    ok = rep.test_accuracy >= 0.90 and rep_s.test_accuracy <= 0.55
    dt = time.time() - t0
    _report("criterion 8 (premise selection)", ok,
            f"separable {rep.test_accuracy:.3f} (>=0.90), shuffled control "
            f"{rep_s.test_accuracy:.3f} (<=0.55); {dt:.0f}s")


# -- 5: loss bookkeeping -----------------------------------------------------

def test_criterion_5_loss_bookkeeping(toy_corpus_5k, recursive_cnn_aes):
    ae = recursive_cnn_aes[0]
    rng = random.Random(55)
    records = tae.expand_records(sorted(set(toy_corpus_5k))[:400], ae.sig)
    for _ in range(100):
        batch = rng.sample(records, 8)
        _, n = tae.recursive_loss(ae, batch)
        assert n == sum(tae.tree_size(r.view) for r in batch)
    # difference additivity
    batch = rng.sample(records, 8)
    whole = tae.difference_loss(ae, batch).data
    parts = (tae.difference_loss(ae, batch[:4]).data
             + tae.difference_loss(ae, batch[4:]).data)
    add_err = abs(whole - parts) / max(abs(whole), 1e-8)
    # uniform-logit cross entropy
    xent_errs = []
    for c in (2, 7, 13):
        loss = ta.softmax_cross_entropy(ta.parameter(np.zeros((3, c))),
                                        [0, 1, c - 1])
        xent_errs.append(abs(loss.data - math.log(c)))
    ok = add_err < 1e-5 and max(xent_errs) < 1e-5
    _report("criterion 5 (loss bookkeeping)", ok,
            f"node counts exact on 100 batches, additivity err "
            f"{add_err:.1e}, uniform-xent err {max(xent_errs):.1e}")


# -- 9: determinism ----------------------------------------------------------

def test_criterion_9_determinism(tmp_path, toy_corpus_5k, recursive_cnn_aes):
    t0 = time.time()
    # criterion 1 inputs: corpus generation
    a = dg.gen_random_corpus(2_000, max_depth=6, seed=101)
    b = dg.gen_random_corpus(2_000, max_depth=6, seed=101)
    assert a == b
    # criterion 2 inputs: JSONL outputs byte-identical
    corpus = dg.gen_random_corpus(500, max_depth=4, seed=102)
    for gen, seed in ((dg.gen_well_formed, 1), (dg.gen_modus_ponens, 3),
                      (dg.gen_unifiability, 6)):
        p1, p2 = tmp_path / "x.jsonl", tmp_path / "y.jsonl"
        dg.write_jsonl(gen(corpus, 300, seed=seed), p1)
        dg.write_jsonl(gen(corpus, 300, seed=seed), p2)
        assert p1.read_bytes() == p2.read_bytes()
    # criterion 3 inputs: seeded RNG streams
    r1 = [pretty_print(_rand_term(random.Random(103), 3, ["X"]))
          for _ in range(5)]
    r2 = [pretty_print(_rand_term(random.Random(103), 3, ["X"]))
          for _ in range(5)]
    assert r1 == r2
    # criterion 6: retraining one configuration reproduces the decode CSV
    ae1 = recursive_cnn_aes[0]
    ae2 = _train(toy_corpus_5k, ENC_CNN, "recursive", 0)
    sample = sorted(set(toy_corpus_5k))[:300]
    rows = []
    for ae in (ae1, ae2):
        m = tae.decoding_metrics(ae, sample)
        rows.append(tae.DecodeMetrics.csv_header() + "\n"
                    + m.csv_row("cnn", "recursive", "toy"))
    ok = rows[0] == rows[1]
    dt = time.time() - t0
    _report("criterion 9 (determinism)", ok,
            f"generation and retraining byte-identical; {dt:.0f}s")
