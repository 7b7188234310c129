"""Training a tree autoencoder and decoding formulas back out of their
vectors.

A character-level encoder maps each formula string to a fixed vector; a
top-symbol classifier plus per-child-index linear extractors decode the
formula tree back from that vector alone.  Recursive training chains the
extractors through the whole tree; difference training only matches each
extracted child to an independently encoded child.

Run: python3 demos/04_train_tree_autoencoder.py   (about two minutes)
"""

from folvec import dataset_gen as dg, encoders, tree_autoencoder as tae
from folvec.fol_core import pretty_print
from folvec.tptp_parser import parse_formula

corpus = dg.gen_random_corpus(2000, max_depth=3, seed=7,
                              cfg=dg.toy_sampler_config())
print(f"toy corpus: {len(corpus)} formulas, e.g. {corpus[:3]}")

enc_config = encoders.EncoderConfig(arch="cnn", token_dim=64, output_dim=64,
                                    layers=3, max_len=64)
train_config = tae.TrainConfig(mode="recursive", steps=1500, batch_size=16,
                               lr=1e-3, seed=0)
history = []
ae = tae.train(corpus, enc_config, train_config, loss_history=history)
print(f"loss: {history[0]:.1f} -> {history[-1]:.1f}")

# Decode a few formulas greedily from their embeddings.
for s in sorted(set(corpus))[:5]:
    view = tae.decode_string(ae, s)
    try:
        back = pretty_print(tae.from_tree_view(view, ae.sig))
    except tae.TreeViewError:
        back = "<invalid tree>"
    mark = "ok " if back == pretty_print(parse_formula(s)) else "BAD"
    print(f"  {mark} {s}  ->  {back}")

metrics = tae.decoding_metrics(ae, sorted(set(corpus))[:400])
print(f"formula accuracy {metrics.formula_accuracy:.3f}, "
      f"symbol accuracy {metrics.symbol_accuracy:.3f}")
print("per-depth formula accuracy:", {
    d: round(a, 3) for d, a in sorted(metrics.per_depth.items())})
