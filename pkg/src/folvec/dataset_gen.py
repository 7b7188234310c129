"""Seeded generators for the logical-property datasets.

Every generator labels its output with the exact symbolic oracles and the
emitted examples can be re-audited against them at any time.  Identical
(corpus, n, seed) triples produce identical output.
"""

from __future__ import annotations

import json
import logging
import random
from dataclasses import dataclass, field
from typing import List, Optional, Sequence

from . import fol_core, logic_oracles
from .fol_core import (
    And, Application, Atom, Constant, Exists, Forall, Formula, Iff, Implies,
    Not, Or, SignatureTable, Term, Variable, children, free_variables,
    node_count, pretty_print,
)
from .logic_oracles import (
    Unifiable, alpha_equivalent, is_subformula, is_well_formed, mp_derivable,
    subformulas, unify,
)
from .tptp_parser import ParseError, classify_string, parse_formula

log = logging.getLogger(__name__)

TASKS = (
    "well_formed", "subformula", "modus_ponens", "alpha_equiv",
    "term_vs_formula", "unifiable", "premise_selection",
)
PAIR_TASKS = frozenset(
    {"subformula", "modus_ponens", "alpha_equiv", "unifiable", "premise_selection"}
)


@dataclass(frozen=True)
class LabeledExample:
    task: str
    a: str
    b: Optional[str]
    label: int

    def __post_init__(self):
        if self.task not in TASKS:
            raise ValueError(f"unknown task: {self.task}")
        if (self.b is not None) != (self.task in PAIR_TASKS):
            raise ValueError(f"field b mismatch for task {self.task}")
        if self.label not in (0, 1):
            raise ValueError(f"label must be 0/1, got {self.label}")


@dataclass(frozen=True)
class SubtreePair:
    formula: str
    child_index: int
    subtree: str


class IngestError(Exception):
    def __init__(self, line_number: int, message: str):
        self.line_number = line_number
        super().__init__(f"line {line_number}: {message}")


# ---------------------------------------------------------------------------
# JSONL I/O


def write_jsonl(examples: Sequence[LabeledExample], path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for ex in examples:
            rec = {"task": ex.task, "a": ex.a, "b": ex.b, "label": ex.label}
            fh.write(json.dumps(rec, sort_keys=True) + "\n")


def read_jsonl(path) -> List[LabeledExample]:
    out = []
    with open(path, "r", encoding="utf-8") as fh:
        for i, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                rec = json.loads(line)
            except json.JSONDecodeError as e:
                raise IngestError(i, f"malformed JSON: {e}") from e
            try:
                out.append(
                    LabeledExample(rec["task"], rec["a"], rec.get("b"),
                                   int(rec["label"]))
                )
            except (KeyError, ValueError) as e:
                raise IngestError(i, str(e)) from e
    return out


def write_subtree_pairs(pairs: Sequence[SubtreePair], path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for p in pairs:
            rec = {"formula": p.formula, "child_index": p.child_index,
                   "subtree": p.subtree}
            fh.write(json.dumps(rec, sort_keys=True) + "\n")


def read_subtree_pairs(path) -> List[SubtreePair]:
    out = []
    with open(path, "r", encoding="utf-8") as fh:
        for i, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                rec = json.loads(line)
                out.append(SubtreePair(rec["formula"], int(rec["child_index"]),
                                       rec["subtree"]))
            except (json.JSONDecodeError, KeyError, ValueError) as e:
                raise IngestError(i, str(e)) from e
    return out


# ---------------------------------------------------------------------------
# Corpus helpers


def parse_corpus(corpus: Sequence[str]) -> List[Formula]:
    return [parse_formula(line) for line in corpus]


def build_signature(corpus: Sequence[str]) -> SignatureTable:
    """Scan a corpus, registering every label in tree-view form and the
    character vocabulary."""
    sig = SignatureTable()
    for line in corpus:
        register_labels(parse_formula(line), sig)
    sig.build_char_vocab(corpus)
    return sig


def register_labels(e, sig: SignatureTable) -> None:
    name, arity, kind = tree_label(e)
    sig.register(name, arity, kind)
    for c in children(e):
        register_labels(c, sig)


def tree_label(e) -> tuple:
    """(name, arity, kind) of a node in the labeled-tree view."""
    if isinstance(e, Variable):
        return (e.name, 0, "variable")
    if isinstance(e, Constant):
        return (e.name, 0, "constant")
    if isinstance(e, Application):
        return (e.fn, len(e.args), "function")
    if isinstance(e, Atom):
        return (e.pred, len(e.args), "predicate")
    if isinstance(e, Not):
        return ("~", 1, "connective")
    if isinstance(e, (And, Or, Implies, Iff)):
        return (fol_core.BINARY_OPS[type(e)], 2, "connective")
    if isinstance(e, (Forall, Exists)):
        return (fol_core.QUANTIFIERS[type(e)], 2, "quantifier")
    raise TypeError(f"not a term or formula: {e!r}")


def harvest_terms(trees: Sequence[Formula]) -> List[Term]:
    """Collect every term argument (recursively) of every atom."""
    seen = set()
    out = []

    def walk_term(t: Term):
        s = pretty_print(t)
        if s not in seen:
            seen.add(s)
            out.append(t)
        if isinstance(t, Application):
            for a in t.args:
                walk_term(a)

    def walk(f):
        if isinstance(f, Atom):
            for a in f.args:
                walk_term(a)
        else:
            for c in children(f):
                if not fol_core.is_term(c):
                    walk(c)

    for f in trees:
        walk(f)
    return out


# ---------------------------------------------------------------------------
# Random formula sampling


@dataclass(frozen=True)
class SamplerConfig:
    """Symbol inventory for random formula generation."""
    predicates: tuple = (("p", 1), ("q", 2), ("r", 0))
    functions: tuple = (("f", 1), ("g", 2))
    constants: tuple = ("a", "b", "c")
    variables: tuple = ("X", "Y", "Z")
    connectives: tuple = ("~", "&", "|", "=>", "<=>")
    quantifiers: tuple = ("!", "?")
    max_term_depth: int = 2


def toy_sampler_config() -> SamplerConfig:
    """Small inventory: 11 distinct tree labels, suited for desk-scale
    autoencoder experiments."""
    return SamplerConfig(
        predicates=(("p", 1), ("q", 2)),
        functions=(("f", 1),),
        constants=("a", "b"),
        variables=("X", "Y"),
        connectives=("~", "&", "|"),
        quantifiers=("!",),
        max_term_depth=2,
    )


_BINARY_CTOR = {"&": And, "|": Or, "=>": Implies, "<=>": Iff}
_QUANT_CTOR = {"!": Forall, "?": Exists}


def random_term(rng: random.Random, cfg: SamplerConfig, depth_budget: int) -> Term:
    choices = ["var", "const"]
    if depth_budget > 1 and cfg.functions:
        choices += ["fn", "fn"]
    kind = rng.choice(choices)
    if kind == "var":
        return Variable(rng.choice(cfg.variables))
    if kind == "const":
        return Constant(rng.choice(cfg.constants))
    fn, arity = rng.choice(cfg.functions)
    return Application(
        fn, tuple(random_term(rng, cfg, depth_budget - 1) for _ in range(arity))
    )


def random_formula(rng: random.Random, cfg: SamplerConfig,
                   depth_budget: int) -> Formula:
    """Sample a formula whose tree-view depth does not exceed depth_budget."""
    term_room = min(cfg.max_term_depth, depth_budget - 2)

    def atom() -> Atom:
        pred, arity = rng.choice(cfg.predicates)
        return Atom(pred, tuple(
            random_term(rng, cfg, max(term_room, 1)) for _ in range(arity)
        ))

    # an atom with arguments already has depth >= 2 (3 with nested terms)
    if depth_budget <= 2:
        return atom()
    roll = rng.random()
    if roll < 0.35:
        return atom()
    op = rng.choice(cfg.connectives + cfg.quantifiers)
    if op == "~":
        return Not(random_formula(rng, cfg, depth_budget - 1))
    if op in _BINARY_CTOR:
        return _BINARY_CTOR[op](
            random_formula(rng, cfg, depth_budget - 1),
            random_formula(rng, cfg, depth_budget - 1),
        )
    var = rng.choice(cfg.variables)
    return _QUANT_CTOR[op](var, random_formula(rng, cfg, depth_budget - 1))


def gen_random_corpus(n: int, max_depth: int, seed: int,
                      cfg: Optional[SamplerConfig] = None) -> List[str]:
    """n random formula strings with tree depth <= max_depth, deduplicated
    best-effort while preserving determinism."""
    cfg = cfg or SamplerConfig()
    rng = random.Random(seed)
    out = []
    seen = set()
    attempts = 0
    while len(out) < n and attempts < n * 50:
        attempts += 1
        budget = rng.randint(2, max_depth)
        f = random_formula(rng, cfg, budget)
        if fol_core.depth(f) > max_depth:
            continue
        s = pretty_print(f)
        if s in seen and rng.random() < 0.9:
            continue
        seen.add(s)
        out.append(s)
    return out


# ---------------------------------------------------------------------------
# Property dataset generators


def gen_well_formed(corpus: Sequence[str], n: int, seed: int) -> List[LabeledExample]:
    """Half corpus lines (positive), half character-swap mutations that no
    longer parse (negative)."""
    if n % 2 != 0:
        raise ValueError("n must be even")
    rng = random.Random(seed)
    out = []
    for _ in range(n // 2):
        out.append(LabeledExample("well_formed", rng.choice(corpus), None, 1))
    negatives = 0
    guard = 0
    while negatives < n // 2:
        guard += 1
        if guard > n * 100 + 100:
            raise RuntimeError("cannot generate enough ill-formed mutations")
        s = rng.choice(corpus)
        broken = _break_by_swapping(s, rng, rounds=50)
        if broken is None:
            log.info("could not break %r in 50 swap rounds; resampling", s)
            continue
        out.append(LabeledExample("well_formed", broken, None, 0))
        negatives += 1
    return out


def _break_by_swapping(s: str, rng: random.Random, rounds: int) -> Optional[str]:
    cur = list(s)
    if len(cur) < 2:
        return None
    for _ in range(rounds):
        i, j = rng.randrange(len(cur)), rng.randrange(len(cur))
        cur[i], cur[j] = cur[j], cur[i]
        candidate = "".join(cur)
        if not is_well_formed(candidate):
            return candidate
    return None


def gen_subformula(corpus: Sequence[str], n: int, seed: int) -> List[LabeledExample]:
    """Positive pairs (whole, proper subformula); negatives pair a whole
    with a subformula of some other corpus formula."""
    if n % 2 != 0:
        raise ValueError("n must be even")
    rng = random.Random(seed)
    trees = parse_corpus(corpus)
    subs = [sorted(subformulas(t), key=pretty_print) for t in trees]
    out = []
    positives = 0
    guard = 0
    while positives < n // 2:
        guard += 1
        if guard > n * 100 + 100:
            raise RuntimeError("corpus formulas have too few proper subformulas")
        i = rng.randrange(len(trees))
        proper = [s for s in subs[i] if s != trees[i]]
        if not proper:
            continue
        psi = rng.choice(proper)
        out.append(LabeledExample("subformula", corpus[i], pretty_print(psi), 1))
        positives += 1
    negatives = 0
    guard = 0
    while negatives < n // 2:
        guard += 1
        if guard > n * 100 + 100:
            raise RuntimeError("cannot find non-subformula negatives")
        i = rng.randrange(len(trees))
        j = rng.randrange(len(trees))
        chi = rng.choice(subs[j])
        if is_subformula(chi, trees[i]):
            continue
        out.append(LabeledExample("subformula", corpus[i], pretty_print(chi), 0))
        negatives += 1
    return out


def _universal_closure(body: Formula, var_names) -> Formula:
    for v in reversed(sorted(var_names)):
        body = Forall(v, body)
    return body


def _fold_and(conjuncts: Sequence[Formula]) -> Formula:
    out = conjuncts[-1]
    for c in reversed(conjuncts[:-1]):
        out = And(c, out)
    return out


def _find_implications(f: Formula) -> List[Implies]:
    return [s for s in subformulas(f) if isinstance(s, Implies)]


def gen_modus_ponens(corpus: Sequence[str], n: int, seed: int,
                     k: int = 3) -> List[LabeledExample]:
    """Half corpus-derived, half synthetic MP instances, with shuffled
    conjuncts and 0-2 distractors; all labels verified against the
    derivability oracle."""
    if n % 2 != 0:
        raise ValueError("n must be even")
    rng = random.Random(seed)
    trees = parse_corpus(corpus)
    with_impl = [t for t in trees if _find_implications(t)]
    atoms_pool = [s for t in trees for s in subformulas(t) if isinstance(s, Atom)]

    def corpus_instance() -> Optional[tuple]:
        if not with_impl:
            return None
        t = rng.choice(with_impl)
        impl = rng.choice(_find_implications(t))
        return impl.left, impl.right

    def synthetic_instance() -> tuple:
        suffix = rng.randrange(10000)
        var = Variable("X")
        a = Atom(f"sp{suffix}", (var,))
        b = Atom(f"sq{suffix}", (var,))
        return a, b

    def distractor() -> Formula:
        if atoms_pool and rng.random() < 0.7:
            return rng.choice(atoms_pool)
        return Atom(f"sd{rng.randrange(10000)}")

    out = []
    made = 0
    guard = 0
    while made < n:
        guard += 1
        if guard > n * 100 + 100:
            raise RuntimeError("modus ponens generation stalled")
        use_corpus = made % 2 == 0 and with_impl
        inst = corpus_instance() if use_corpus else synthetic_instance()
        if inst is None:
            inst = synthetic_instance()
        a, b = inst
        conjuncts = [Implies(a, b), a]
        conjuncts += [distractor() for _ in range(rng.randint(0, 2))]
        rng.shuffle(conjuncts)
        prefix_vars = free_variables(_fold_and(conjuncts))
        premise = _universal_closure(_fold_and(conjuncts), prefix_vars)
        goal = _universal_closure(b, prefix_vars)
        want_positive = made % 4 < 2
        if want_positive:
            if not mp_derivable(premise, goal, k):
                continue  # unlucky shuffle; resample
            out.append(LabeledExample("modus_ponens", pretty_print(premise),
                                      pretty_print(goal), 1))
        else:
            bad_goal = _universal_closure(Atom(f"sn{rng.randrange(10000)}"),
                                          prefix_vars)
            if mp_derivable(premise, bad_goal, k):
                continue
            out.append(LabeledExample("modus_ponens", pretty_print(premise),
                                      pretty_print(bad_goal), 0))
        made += 1
    return out


def _bound_variables(f: Formula) -> List[str]:
    out = []

    def walk(g):
        if isinstance(g, (Forall, Exists)):
            if g.var not in out:
                out.append(g.var)
            walk(g.body)
        elif isinstance(g, Not):
            walk(g.body)
        elif isinstance(g, (And, Or, Implies, Iff)):
            walk(g.left)
            walk(g.right)

    walk(f)
    return out


def _rename_map(f: Formula, mapping: dict) -> Formula:
    """Consistent renaming of variable names; only safe for injective maps
    onto names fresh for f."""

    def rt(t):
        if isinstance(t, Variable):
            return Variable(mapping.get(t.name, t.name))
        if isinstance(t, Constant):
            return t
        return Application(t.fn, tuple(rt(a) for a in t.args))

    def walk(g):
        if isinstance(g, Atom):
            return Atom(g.pred, tuple(rt(a) for a in g.args))
        if isinstance(g, Not):
            return Not(walk(g.body))
        if isinstance(g, (And, Or, Implies, Iff)):
            return type(g)(walk(g.left), walk(g.right))
        if isinstance(g, (Forall, Exists)):
            return type(g)(mapping.get(g.var, g.var), walk(g.body))
        raise TypeError(repr(g))

    return walk(f)


def gen_alpha(corpus: Sequence[str], n: int, seed: int) -> List[LabeledExample]:
    """Positives rename bound variables injectively to fresh names;
    negatives break the renaming or alter a symbol, oracle-verified."""
    if n % 2 != 0:
        raise ValueError("n must be even")
    rng = random.Random(seed)
    trees = parse_corpus(corpus)
    with_bound = [(s, t) for s, t in zip(corpus, trees) if _bound_variables(t)]
    out = []
    positives = 0
    guard = 0
    while positives < n // 2:
        guard += 1
        if guard > n * 100 + 100:
            raise RuntimeError("alpha-equivalence positives stalled")
        if not with_bound:
            raise ValueError("corpus has no quantified formulas")
        s, t = rng.choice(with_bound)
        bound = _bound_variables(t)
        taken = free_variables(t) | set(bound)
        fresh = []
        while len(fresh) < len(bound):
            cand = f"W{rng.randrange(100)}"
            if cand not in taken and cand not in fresh:
                fresh.append(cand)
        renamed = _rename_map(t, dict(zip(bound, fresh)))
        if not alpha_equivalent(t, renamed):
            continue
        out.append(LabeledExample("alpha_equiv", s, pretty_print(renamed), 1))
        positives += 1
    negatives = 0
    guard = 0
    while negatives < n // 2:
        guard += 1
        if guard > n * 100 + 100:
            raise RuntimeError("alpha-equivalence negatives stalled")
        i = rng.randrange(len(trees))
        s, t = corpus[i], trees[i]
        bound = _bound_variables(t)
        if len(bound) >= 2 and rng.random() < 0.5:
            # collapse two bound variables into one (non-injective)
            x, y = rng.sample(bound, 2)
            mutant = _rename_map(t, {x: y})
        else:
            mutant = _mutate_one_symbol(t, rng)
            if mutant is None:
                continue
        if alpha_equivalent(t, mutant):
            continue
        out.append(LabeledExample("alpha_equiv", s, pretty_print(mutant), 0))
        negatives += 1
    return out


def _mutate_one_symbol(f: Formula, rng: random.Random) -> Optional[Formula]:
    """Rename one predicate/function/constant occurrence to a fresh name."""
    count = [0]

    def count_syms(g):
        if isinstance(g, (Atom, Application, Constant)):
            count[0] += 1
        for c in children(g):
            count_syms(c)

    count_syms(f)
    if count[0] == 0:
        return None
    target = rng.randrange(count[0])
    idx = [0]
    new_name = f"m{rng.randrange(1000)}"

    def walk(g):
        if isinstance(g, Atom):
            hit = idx[0] == target
            idx[0] += 1
            pred = new_name if hit else g.pred
            return Atom(pred, tuple(walk_t(a) for a in g.args))
        if isinstance(g, Not):
            return Not(walk(g.body))
        if isinstance(g, (And, Or, Implies, Iff)):
            return type(g)(walk(g.left), walk(g.right))
        if isinstance(g, (Forall, Exists)):
            return type(g)(g.var, walk(g.body))
        raise TypeError(repr(g))

    def walk_t(t):
        if isinstance(t, Variable):
            return t
        if isinstance(t, Constant):
            hit = idx[0] == target
            idx[0] += 1
            return Constant(new_name if hit else t.name)
        hit = idx[0] == target
        idx[0] += 1
        fn = new_name if hit else t.fn
        return Application(fn, tuple(walk_t(a) for a in t.args))

    return walk(f)


def gen_term_vs_formula(corpus: Sequence[str], n: int, seed: int,
                        signature: Optional[SignatureTable] = None
                        ) -> List[LabeledExample]:
    """Corpus formulas labeled 1, harvested terms labeled 0."""
    if n % 2 != 0:
        raise ValueError("n must be even")
    rng = random.Random(seed)
    trees = parse_corpus(corpus)
    sig = signature or build_signature(corpus)
    terms = harvest_terms(trees)
    if not terms:
        raise ValueError("corpus atoms carry no term arguments")
    out = []
    positives = 0
    guard = 0
    while positives < n // 2:
        guard += 1
        if guard > n * 100 + 100:
            raise RuntimeError("term-vs-formula positives stalled")
        s = rng.choice(corpus)
        if classify_string(s, sig) != "formula":
            continue
        out.append(LabeledExample("term_vs_formula", s, None, 1))
        positives += 1
    negatives = 0
    guard = 0
    while negatives < n // 2:
        guard += 1
        if guard > n * 100 + 100:
            raise RuntimeError("term-vs-formula negatives stalled")
        t = rng.choice(terms)
        s = pretty_print(t)
        if classify_string(s, sig) != "term":
            continue
        out.append(LabeledExample("term_vs_formula", s, None, 0))
        negatives += 1
    return out


def _rename_apart(t: Term, suffix: str) -> Term:
    if isinstance(t, Variable):
        return Variable(t.name + suffix)
    if isinstance(t, Constant):
        return t
    return Application(t.fn, tuple(_rename_apart(a, suffix) for a in t.args))


def gen_unifiability(corpus: Sequence[str], n: int, seed: int
                     ) -> List[LabeledExample]:
    """Pairs of harvested corpus terms with variables renamed apart,
    labeled by the unification oracle and balanced by rejection."""
    if n % 2 != 0:
        raise ValueError("n must be even")
    rng = random.Random(seed)
    terms = harvest_terms(parse_corpus(corpus))
    if len(terms) < 2:
        raise ValueError("not enough terms in corpus")
    out = []
    want = {1: n // 2, 0: n // 2}
    guard = 0
    while want[0] + want[1] > 0:
        guard += 1
        if guard > n * 1000:
            raise RuntimeError("cannot balance unifiability dataset from corpus")
        t1 = _rename_apart(rng.choice(terms), "_l")
        t2 = _rename_apart(rng.choice(terms), "_r")
        label = 1 if isinstance(unify(t1, t2), Unifiable) else 0
        if want[label] == 0:
            continue
        want[label] -= 1
        out.append(LabeledExample("unifiable", pretty_print(t1),
                                  pretty_print(t2), label))
    return out


# ---------------------------------------------------------------------------
# Subtree pairs (difference training data)


def subtree_pairs_of(e) -> List[SubtreePair]:
    """One record per node-child edge, recursively over the whole tree."""
    out = []

    def walk(node):
        for i, c in enumerate(children(node)):
            out.append(SubtreePair(pretty_print(node), i, pretty_print(c)))
            walk(c)

    walk(e)
    return out


def gen_subtree_pairs(corpus: Sequence[str]) -> List[SubtreePair]:
    out = []
    for line in corpus:
        out.extend(subtree_pairs_of(parse_formula(line)))
    return out


# ---------------------------------------------------------------------------
# Premise selection ingestion (deepmath block format)


def load_deepmath(path) -> List[LabeledExample]:
    """Blocks separated by blank lines; first line `C <formula>`, then
    `+ <formula>` / `- <formula>` premise lines."""
    out = []
    conjecture = None
    with open(path, "r", encoding="utf-8") as fh:
        for i, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line:
                conjecture = None
                continue
            prefix, _, rest = line.partition(" ")
            rest = rest.strip()
            if prefix == "C":
                if not rest:
                    raise IngestError(i, "empty conjecture")
                conjecture = rest
            elif prefix in ("+", "-"):
                if conjecture is None:
                    raise IngestError(i, "premise line before any conjecture")
                if not rest:
                    raise IngestError(i, "empty premise")
                out.append(LabeledExample("premise_selection", conjecture, rest,
                                          1 if prefix == "+" else 0))
            else:
                raise IngestError(i, f"unknown line prefix {prefix!r}")
    return out


# ---------------------------------------------------------------------------
# Post-generation audit


def audit_examples(examples: Sequence[LabeledExample],
                   signature: Optional[SignatureTable] = None,
                   k: int = 3) -> int:
    """Re-verify every label against its oracle; returns the number of
    examples checked, raises AssertionError on the first mismatch."""
    for ex in examples:
        if ex.task == "well_formed":
            ok = is_well_formed(ex.a) == bool(ex.label)
        elif ex.task == "subformula":
            ok = is_subformula(parse_formula(ex.b),
                               parse_formula(ex.a)) == bool(ex.label)
        elif ex.task == "modus_ponens":
            ok = mp_derivable(parse_formula(ex.a), parse_formula(ex.b),
                              k) == bool(ex.label)
        elif ex.task == "alpha_equiv":
            ok = alpha_equivalent(parse_formula(ex.a),
                                  parse_formula(ex.b)) == bool(ex.label)
        elif ex.task == "term_vs_formula":
            got = classify_string(ex.a, signature)
            ok = got == ("formula" if ex.label else "term")
        elif ex.task == "unifiable":
            from .tptp_parser import parse_term
            res = unify(parse_term(ex.a), parse_term(ex.b))
            ok = isinstance(res, Unifiable) == bool(ex.label)
        else:
            raise ValueError(f"no oracle for task {ex.task}")
        if not ok:
            raise AssertionError(f"label audit failed for {ex}")
    return len(examples)
