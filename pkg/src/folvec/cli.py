"""Command-line interface exposing the full pipeline.

Exit codes: 0 success, 1 contract violation (bad input, failed check),
2 I/O error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

import numpy as np

from . import (
    checks, dataset_gen, encoders, eval_harness, logic_oracles,
    tensor_autodiff as ta, tptp_parser, tree_autoencoder,
)
from .dataset_gen import LabeledExample
from .encoders import EncoderConfig
from .logic_oracles import Unifiable
from .tptp_parser import ParseError
from .tree_autoencoder import DecodeMetrics, TrainConfig, TreeAutoencoder


class CliError(Exception):
    def __init__(self, message: str, code: int = 1):
        self.code = code
        super().__init__(message)


def worker_count() -> int:
    env = os.environ.get("FOLVEC_THREADS")
    if env:
        return max(1, int(env))
    return os.cpu_count() or 1


# ---------------------------------------------------------------------------
# Subcommand implementations


def cmd_parse(args) -> int:
    lines = tptp_parser.load_corpus(args.file)
    for i, line in enumerate(lines, start=1):
        try:
            tptp_parser.parse_formula(line)
        except ParseError as e:
            print(f"{args.file}: formula {i}: {e}")
            return 1
    print(f"{len(lines)} formulas parsed")
    return 0


ORACLE_PAIRWISE = {"subformula", "modus_ponens", "alpha_equiv", "unify"}


def cmd_oracle(args) -> int:
    prop = args.property
    if prop in ORACLE_PAIRWISE and args.b is None:
        raise CliError(f"property {prop} needs two expressions")
    if prop == "well_formed":
        print(int(logic_oracles.is_well_formed(args.a)))
    elif prop == "term_vs_formula":
        print(tptp_parser.classify_string(args.a))
    elif prop == "subformula":
        print(int(logic_oracles.is_subformula(
            tptp_parser.parse_formula(args.b),
            tptp_parser.parse_formula(args.a))))
    elif prop == "alpha_equiv":
        print(int(logic_oracles.alpha_equivalent(
            tptp_parser.parse_formula(args.a),
            tptp_parser.parse_formula(args.b))))
    elif prop == "modus_ponens":
        print(int(logic_oracles.mp_derivable(
            tptp_parser.parse_formula(args.a),
            tptp_parser.parse_formula(args.b), args.k)))
    elif prop == "unify":
        res = logic_oracles.unify(tptp_parser.parse_term(args.a),
                                  tptp_parser.parse_term(args.b))
        if isinstance(res, Unifiable):
            print(1)
            print(repr(res.mgu))
        else:
            print(0)
    else:
        raise CliError(f"unknown property {prop!r}")
    return 0


GENERATORS = {
    "well_formed": dataset_gen.gen_well_formed,
    "subformula": dataset_gen.gen_subformula,
    "modus_ponens": dataset_gen.gen_modus_ponens,
    "alpha_equiv": dataset_gen.gen_alpha,
    "term_vs_formula": dataset_gen.gen_term_vs_formula,
    "unifiable": dataset_gen.gen_unifiability,
}


def cmd_gen(args) -> int:
    corpus = tptp_parser.load_corpus(args.corpus)
    gen = GENERATORS.get(args.task)
    if gen is None:
        raise CliError(f"unknown task {args.task!r}; "
                       f"choose from {sorted(GENERATORS)}")
    examples = gen(corpus, args.n, args.seed)
    dataset_gen.write_jsonl(examples, args.out)
    print(f"wrote {len(examples)} examples to {args.out}")
    return 0


def cmd_gen_subtrees(args) -> int:
    corpus = tptp_parser.load_corpus(args.corpus)
    pairs = dataset_gen.gen_subtree_pairs(corpus)
    dataset_gen.write_subtree_pairs(pairs, args.out)
    print(f"wrote {len(pairs)} subtree pairs to {args.out}")
    return 0


def _encoder_config(args) -> EncoderConfig:
    overrides = {}
    if args.config:
        with open(args.config, "r", encoding="utf-8") as fh:
            overrides = json.load(fh)
        known = set(EncoderConfig().to_dict())
        unknown = set(overrides) - known - {"lr", "batch_size"}
        if unknown:
            raise CliError(f"unknown config keys: {sorted(unknown)}")
    overrides.pop("lr", None)
    overrides.pop("batch_size", None)
    overrides["arch"] = args.arch
    return EncoderConfig(**overrides)


def _train_extras(args) -> dict:
    if not args.config:
        return {}
    with open(args.config, "r", encoding="utf-8") as fh:
        overrides = json.load(fh)
    return {k: overrides[k] for k in ("lr", "batch_size") if k in overrides}


def cmd_train_ae(args) -> int:
    corpus = tptp_parser.load_corpus(args.corpus)
    extras = _train_extras(args)
    tc = TrainConfig(mode=args.mode, steps=args.steps, seed=args.seed,
                     lr=extras.get("lr", 1e-4),
                     batch_size=extras.get("batch_size"))
    ae = tree_autoencoder.train(corpus, _encoder_config(args), tc)
    ae.save(args.out)
    print(f"checkpoint written to {args.out}")
    return 0


def cmd_eval_decode(args) -> int:
    ae = TreeAutoencoder.load(args.ckpt)
    corpus = tptp_parser.load_corpus(args.corpus)
    metrics = tree_autoencoder.decoding_metrics(ae, corpus)
    with open(args.out, "w", encoding="utf-8") as fh:
        fh.write(DecodeMetrics.csv_header() + "\n")
        fh.write(metrics.csv_row(ae.encoder.config.arch, "", args.corpus)
                 + "\n")
    print(f"formula accuracy {metrics.formula_accuracy:.4f}, "
          f"symbol accuracy {metrics.symbol_accuracy:.4f}")
    return 0


def cmd_train_cls(args) -> int:
    ae = TreeAutoencoder.load(args.ckpt)
    data = dataset_gen.read_jsonl(args.data)
    report = eval_harness.train_frozen_classifier(
        ae.encoder, data, steps=args.steps, seed=args.seed)
    eval_harness.report_csv([report], args.out)
    print(f"{report.task}: test accuracy {report.test_accuracy:.4f} "
          f"(best step {report.best_step})")
    return 0


def cmd_train_explicit(args) -> int:
    if len(args.corpora) != len(args.tasks):
        raise CliError("--corpora and --tasks must have matching lengths")
    datasets = {}
    all_strings = []
    for task, path in zip(args.tasks, args.corpora):
        data = dataset_gen.read_jsonl(path)
        if any(ex.task != task for ex in data):
            raise CliError(f"{path} contains tasks other than {task}")
        datasets[task] = data
        for ex in data:
            all_strings.append(ex.a)
            if ex.b is not None:
                all_strings.append(ex.b)
    vocab = encoders.build_vocab(all_strings)
    config = _encoder_config(args)
    model = encoders.build_encoder(config, vocab, seed=args.seed)
    eval_harness.explicit_multitask_train(model, datasets, steps=args.steps,
                                          seed=args.seed)
    encoders.save(model, args.out)
    print(f"checkpoint written to {args.out}")
    return 0


def cmd_premise(args) -> int:
    ae = TreeAutoencoder.load(args.ckpt)
    data = dataset_gen.load_deepmath(args.data)
    report = eval_harness.premise_select(ae.encoder, data, steps=args.steps,
                                         seed=args.seed)
    eval_harness.report_csv([report], args.out)
    print(f"premise selection accuracy {report.test_accuracy:.4f}")
    return 0


def cmd_probe(args) -> int:
    ae = TreeAutoencoder.load(args.ckpt)
    corpus = tptp_parser.load_corpus(args.corpus)
    X, _ = eval_harness.encode_examples(
        ae.encoder,
        [LabeledExample("well_formed", s, None, 1) for s in corpus])
    if args.target == "connectives":
        labels = eval_harness.connective_presence_labels(corpus)
        acc = eval_harness.linear_probe(X, labels, kind="classify",
                                        seed=args.seed)
    elif args.target == "quantifier-count":
        labels = eval_harness.quantifier_count_labels(corpus)
        acc = eval_harness.linear_probe(X, labels, kind="regress",
                                        seed=args.seed)
    else:
        raise CliError(f"unknown probe target {args.target!r}")
    with open(args.out, "w", encoding="utf-8") as fh:
        fh.write("probe,target,accuracy\n")
        kind = "classify" if args.target == "connectives" else "regress"
        fh.write(f"{kind},{args.target},{acc:.4f}\n")
    print(f"probe {args.target}: {acc:.4f}")
    return 0


def cmd_gradcheck(args) -> int:
    if args.arch:
        results = {f"encoder_{args.arch}": checks.check_encoder(args.arch)}
    else:
        results = checks.check_all()
    worst = 0.0
    for name, err in sorted(results.items()):
        print(f"{name}: {err:.2e}")
        worst = max(worst, err)
    if worst > 1e-3:
        print(f"FAIL: max relative error {worst:.2e} > 1e-3")
        return 1
    print("all gradient checks passed")
    return 0


# ---------------------------------------------------------------------------
# Argument parsing


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="folvec",
        description="Parse FOL formulas, generate logical-property "
                    "datasets, train and evaluate reversible formula "
                    "embeddings.  FOLVEC_THREADS caps worker count.")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("parse", help="check that every line of a file parses")
    s.add_argument("file")
    s.set_defaults(fn=cmd_parse)

    s = sub.add_parser("oracle", help="run a symbolic property decider")
    s.add_argument("property",
                   choices=sorted(ORACLE_PAIRWISE
                                  | {"well_formed", "term_vs_formula"}))
    s.add_argument("a")
    s.add_argument("b", nargs="?")
    s.add_argument("--k", type=int, default=3,
                   help="inference budget for modus_ponens")
    s.set_defaults(fn=cmd_oracle)

    s = sub.add_parser("gen", help="generate a labeled property dataset")
    s.add_argument("task", choices=sorted(GENERATORS))
    s.add_argument("--corpus", required=True)
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--seed", type=int, required=True)
    s.add_argument("--out", required=True)
    s.set_defaults(fn=cmd_gen)

    s = sub.add_parser("gen-subtrees",
                       help="emit all (tree, child index, subtree) records")
    s.add_argument("--corpus", required=True)
    s.add_argument("--out", required=True)
    s.set_defaults(fn=cmd_gen_subtrees)

    s = sub.add_parser("train-ae", help="train a tree autoencoder")
    s.add_argument("--mode", choices=("difference", "recursive"),
                   required=True)
    s.add_argument("--arch", choices=encoders.ARCHS, required=True)
    s.add_argument("--corpus", required=True)
    s.add_argument("--steps", type=int, required=True)
    s.add_argument("--seed", type=int, required=True)
    s.add_argument("--out", required=True)
    s.add_argument("--config", help="JSON file with model/training options")
    s.set_defaults(fn=cmd_train_ae)

    s = sub.add_parser("eval-decode",
                       help="decoding accuracy of a trained autoencoder")
    s.add_argument("--ckpt", required=True)
    s.add_argument("--corpus", required=True)
    s.add_argument("--out", required=True)
    s.set_defaults(fn=cmd_eval_decode)

    s = sub.add_parser("train-cls",
                       help="frozen-encoder property classifier")
    s.add_argument("--ckpt", required=True)
    s.add_argument("--data", required=True)
    s.add_argument("--steps", type=int, default=3000)
    s.add_argument("--seed", type=int, required=True)
    s.add_argument("--out", required=True)
    s.set_defaults(fn=cmd_train_cls)

    s = sub.add_parser("train-explicit",
                       help="joint multi-task encoder training")
    s.add_argument("--corpora", nargs="+", required=True)
    s.add_argument("--tasks", nargs="+", required=True)
    s.add_argument("--arch", choices=encoders.ARCHS, default="cnn")
    s.add_argument("--steps", type=int, default=1000)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--out", required=True)
    s.add_argument("--config")
    s.set_defaults(fn=cmd_train_explicit)

    s = sub.add_parser("premise", help="premise-selection evaluation")
    s.add_argument("--ckpt", required=True)
    s.add_argument("--data", required=True, help="deepmath block file")
    s.add_argument("--steps", type=int, default=3000)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--out", required=True)
    s.set_defaults(fn=cmd_premise)

    s = sub.add_parser("probe", help="linear probe of unseen properties")
    s.add_argument("--ckpt", required=True)
    s.add_argument("--corpus", required=True)
    s.add_argument("--target", choices=("connectives", "quantifier-count"),
                   required=True)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--out", required=True)
    s.set_defaults(fn=cmd_probe)

    s = sub.add_parser("gradcheck",
                       help="finite-difference checks of all layers and "
                            "encoders")
    s.add_argument("--arch", choices=encoders.ARCHS)
    s.set_defaults(fn=cmd_gradcheck)

    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except CliError as e:
        print(f"error: {e}", file=sys.stderr)
        return e.code
    except (ParseError, ValueError, dataset_gen.IngestError,
            ta.ContractViolation, ta.CheckpointError,
            tree_autoencoder.TreeViewError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 1
    except OSError as e:
        print(f"i/o error: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
