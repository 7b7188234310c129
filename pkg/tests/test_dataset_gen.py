import json

import pytest

from folvec import dataset_gen as dg
from folvec import fol_core as fc
from folvec.tptp_parser import parse_formula


def test_random_corpus_deterministic():
    a = dg.gen_random_corpus(100, max_depth=4, seed=3)
    b = dg.gen_random_corpus(100, max_depth=4, seed=3)
    c = dg.gen_random_corpus(100, max_depth=4, seed=4)
    assert a == b
    assert a != c
    for s in a:
        assert fc.depth(parse_formula(s)) <= 4 + 1  # +1 for binder leaves


def test_toy_sampler_label_budget():
    toy = dg.gen_random_corpus(500, max_depth=4, seed=0,
                               cfg=dg.toy_sampler_config())
    sig = dg.build_signature(toy)
    assert sig.num_labels() <= 15


@pytest.mark.parametrize("gen,task", [
    (dg.gen_well_formed, "well_formed"),
    (dg.gen_subformula, "subformula"),
    (dg.gen_modus_ponens, "modus_ponens"),
    (dg.gen_alpha, "alpha_equiv"),
    (dg.gen_unifiability, "unifiable"),
])
def test_generators_balanced_and_audited(small_corpus, gen, task):
    ex = gen(small_corpus, 60, seed=9)
    assert len(ex) == 60
    assert all(e.task == task for e in ex)
    assert sum(e.label for e in ex) == 30  # exact balance
    assert dg.audit_examples(ex) == 60
    # determinism
    assert gen(small_corpus, 60, seed=9) == ex
    assert gen(small_corpus, 60, seed=10) != ex


def test_term_vs_formula_generator(small_corpus):
    sig = dg.build_signature(small_corpus)
    ex = dg.gen_term_vs_formula(small_corpus, 60, seed=9, signature=sig)
    assert sum(e.label for e in ex) == 30
    assert dg.audit_examples(ex, signature=sig) == 60


def test_labeled_example_validation():
    with pytest.raises(ValueError):
        dg.LabeledExample("no_such_task", "p(a)", None, 1)
    with pytest.raises(ValueError):
        dg.LabeledExample("alpha_equiv", "p(a)", None, 1)  # pair task
    with pytest.raises(ValueError):
        dg.LabeledExample("well_formed", "p(a)", None, 2)


def test_jsonl_roundtrip(tmp_path, small_corpus):
    ex = dg.gen_alpha(small_corpus, 20, seed=1)
    path = tmp_path / "d.jsonl"
    dg.write_jsonl(ex, path)
    assert dg.read_jsonl(path) == ex
    # stable serialization: keys sorted, one object per line
    lines = path.read_text().splitlines()
    assert len(lines) == 20
    assert list(json.loads(lines[0])) == sorted(json.loads(lines[0]))


def test_subtree_pair_count(small_corpus):
    pairs = dg.gen_subtree_pairs(small_corpus)
    expect = sum(fc.node_count(parse_formula(s)) - 1 for s in small_corpus)
    assert len(pairs) == expect


def test_subtree_pairs_roundtrip(tmp_path, small_corpus):
    pairs = dg.gen_subtree_pairs(small_corpus[:20])
    path = tmp_path / "p.jsonl"
    dg.write_subtree_pairs(pairs, path)
    assert dg.read_subtree_pairs(path) == pairs


def test_mp_universal_closure(small_corpus):
    ex = dg.gen_modus_ponens(small_corpus, 40, seed=2)
    for e in ex:
        prem = parse_formula(e.a)
        goal = parse_formula(e.b)
        # premises and goals are closed formulas
        assert not fc.free_variables(prem)
        assert not fc.free_variables(goal)


def test_load_deepmath(tmp_path):
    path = tmp_path / "dm.txt"
    path.write_text("C p(a)\n+ q(a)\n- r(a)\n\nC s(b)\n+ t(b)\n")
    ex = dg.load_deepmath(path)
    assert len(ex) == 3
    assert ex[0].a == "p(a)" and ex[0].b == "q(a)" and ex[0].label == 1
    assert ex[1].label == 0
    assert ex[2].a == "s(b)"


def test_load_deepmath_errors(tmp_path):
    path = tmp_path / "bad.txt"
    path.write_text("+ q(a)\n")
    with pytest.raises(dg.IngestError) as e:
        dg.load_deepmath(path)
    assert e.value.line_number == 1
