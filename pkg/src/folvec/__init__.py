"""folvec: reversible continuous vector representations of first-order
logic formulas, with exact symbolic oracles for the logical properties
the vectors are meant to preserve."""

from . import (
    checks, dataset_gen, encoders, eval_harness, fol_core, logic_oracles,
    tensor_autodiff, tptp_parser, tree_autoencoder,
)

__all__ = [
    "checks", "dataset_gen", "encoders", "eval_harness", "fol_core",
    "logic_oracles", "tensor_autodiff", "tptp_parser", "tree_autoencoder",
]

__version__ = "0.1.0"
