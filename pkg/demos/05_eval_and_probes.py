"""Downstream evaluation: frozen property classifiers, joint multi-task
training, linear probes, and premise selection.

Run: python3 demos/05_eval_and_probes.py   (about a minute)
"""

import tempfile

from folvec import dataset_gen as dg, encoders, eval_harness as eh

corpus = dg.gen_random_corpus(600, max_depth=3, seed=3)
sig = dg.build_signature(corpus)
cfg = encoders.EncoderConfig(arch="cnn", token_dim=32, output_dim=32,
                             layers=2, max_len=64)
vocab = encoders.build_vocab(corpus)
encoder = encoders.build_encoder(cfg, vocab, seed=0)

# 1. Frozen-encoder classification: a 6x128 MLP reads property labels
# out of fixed encodings; the encoder's bytes are verified unchanged.
data = dg.gen_term_vs_formula(corpus, 600, seed=1, signature=sig)
report = eh.train_frozen_classifier(encoder, data, steps=400, seed=0)
print(f"frozen {report.task}: test accuracy {report.test_accuracy:.3f} "
      f"(best step {report.best_step})")

# 2. Explicit multi-task training: the encoder itself is optimized
# through per-task two-layer heads on several properties jointly.
datasets = {
    "term_vs_formula": data,
    "well_formed": dg.gen_well_formed(corpus, 400, seed=2),
}
model = encoders.build_encoder(cfg, vocab, seed=0)
heads = eh.explicit_multitask_train(model, datasets, steps=150, seed=0)
print("explicit multi-task heads:", sorted(heads))

# 3. Linear probes for properties never trained on.
X, _ = eh.encode_examples(
    model, [dg.LabeledExample("well_formed", s, None, 1) for s in corpus])
conn = eh.linear_probe(X, eh.connective_presence_labels(corpus),
                       kind="classify")
quant = eh.linear_probe(X, eh.quantifier_count_labels(corpus),
                        kind="regress")
print(f"probe connective-presence {conn:.3f}, quantifier-count {quant:.3f}")

# 4. Premise selection on the deepmath block format.
with tempfile.NamedTemporaryFile("w", suffix=".txt", delete=False) as fh:
    for i, c in enumerate(corpus[:80]):
        fh.write(f"C {c}\n+ useful{i}(a)\n- noise{i}(a)\n\n")
    dm_path = fh.name
report = eh.premise_select(model, dg.load_deepmath(dm_path), steps=300,
                           seed=0)
print(f"premise selection accuracy {report.test_accuracy:.3f}")
