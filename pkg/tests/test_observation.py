"""
Tests for Sierpinski tests, the bounded intrinsic preorder, applicative
comparison and the corpus loaders.
"""
import json

import pytest

from src.combinators import bottom
from src.denotation import Fuel, denote
from src.errors import GameMismatchError, PcfTypeError
from src.game_core import NAT, Bounds, Lolli, hom_game
from src.observation import (
    CaseStatus,
    CorpusEntry,
    TestSuite,
    VerdictKind,
    classify,
    default_suite,
    ignore_test,
    intrinsic_leq_approx,
    load_corpus,
    load_functions,
    obs_compare,
    observe_answer,
    replay_witness,
    sierpinski_run,
)
from src.pcf_lang import N, Answer, Arrow, Unresolved, arg_types, arrow, contains_fix, parse, typecheck

CONST0 = "\\x:N. 0"
IF0X = "\\x:N. if0 x 0 0"


def closed(text):
    return denote([], parse(text), Fuel(4))


# ============================================
# SIERPINSKI TESTS
# ============================================

def test_observing_an_answer():
    assert sierpinski_run(observe_answer(3), closed("3"))
    missed = sierpinski_run(observe_answer(4), closed("3"))
    assert not missed and not missed.exhausted


def test_ignoring_test_converges_on_bottom():
    assert sierpinski_run(ignore_test(NAT), bottom(hom_game([], N)))
    assert not sierpinski_run(observe_answer(0), bottom(hom_game([], N)))


def test_tests_must_end_in_sigma():
    with pytest.raises(GameMismatchError):
        sierpinski_run(closed("\\x:N. x"), closed("3"))


def test_ground_suite_separates_numerals():
    suite = default_suite(N, 0, 3)
    assert len(suite) == 4
    verdict = intrinsic_leq_approx(closed("2"), closed("3"), suite)
    assert verdict.kind == VerdictKind.NOT_LEQ
    assert verdict.witness == "answer=2"
    assert intrinsic_leq_approx(closed("3"), closed("3"), suite).holds
    assert intrinsic_leq_approx(bottom(hom_game([], N)), closed("3"), suite).holds


def test_applicative_suite_separates_strictness():
    suite = default_suite(arrow(N, N), 0, 1)
    assert len(suite) == 6
    verdict = intrinsic_leq_approx(closed(CONST0), closed(IF0X), suite)
    assert verdict.kind == VerdictKind.NOT_LEQ
    assert verdict.witness == "(Omega[N]) answer=0"
    assert intrinsic_leq_approx(closed(IF0X), closed(CONST0), suite).holds


def test_suite_rejects_tests_on_other_games():
    suite = TestSuite(NAT)
    with pytest.raises(GameMismatchError):
        suite.add("wrong", ignore_test(Lolli(NAT, NAT)))


# ============================================
# APPLICATIVE COMPARISON
# ============================================

def test_constant_is_not_below_strict_function():
    verdict = obs_compare(parse(CONST0), parse(IF0X), 1, 1000, Bounds(max_nat=2))
    assert verdict.kind == VerdictKind.NOT_LEQ
    assert verdict.witness == "Omega[N]"
    assert verdict.arguments == ("Omega[N]",)
    assert replay_witness(parse(CONST0), parse(IF0X), verdict, 1000)


def test_strict_function_is_below_constant():
    verdict = obs_compare(parse(IF0X), parse(CONST0), 1, 1000, Bounds(max_nat=2))
    assert verdict.kind == VerdictKind.LEQ
    assert verdict.checked > 0
    assert not replay_witness(parse(IF0X), parse(CONST0), verdict, 1000)


def test_ground_comparison():
    verdict = obs_compare(parse("2"), parse("3"), 1, 100)
    assert verdict.kind == VerdictKind.NOT_LEQ and verdict.witness == ""
    assert obs_compare(parse("Omega[N]"), parse("0"), 1, 100).holds
    assert obs_compare(parse("0"), parse("Omega[N]"), 1, 100).kind == VerdictKind.NOT_LEQ


def test_case_and_conditional_encodings_agree():
    case = parse("\\x:N. case2 x 0 1")
    nested = parse("\\x:N. if0 x 0 (if0 (pred x) 1 Omega[N])")
    bounds = Bounds(max_nat=3)
    assert obs_compare(case, nested, 1, 1000, bounds).holds
    assert obs_compare(nested, case, 1, 1000, bounds).holds


def test_running_out_of_fuel_is_inconclusive():
    verdict = obs_compare(parse(CONST0), parse("\\x:N. Y[N] (\\y:N. y)"), 1, 200, Bounds(max_nat=1))
    assert verdict.kind == VerdictKind.INCONCLUSIVE
    assert verdict.budgets["limited"] == 3


def test_comparison_needs_equal_types():
    with pytest.raises(PcfTypeError):
        obs_compare(parse(CONST0), parse("0"), 1, 100)


def test_cross_check_adds_game_outcomes():
    verdict = obs_compare(parse(CONST0), parse(IF0X), 1, 1000, Bounds(max_nat=1), cross_check=True)
    assert len(verdict.outcomes) == 4
    assert verdict.outcomes[2] == {"game": {"answer": 0}}


def test_context_limit():
    verdict = obs_compare(parse(IF0X), parse(CONST0), 1, 1000, Bounds(max_nat=2), limit=2)
    assert verdict.checked == 2


# ============================================
# CORPUS FILES
# ============================================

def test_load_corpus(corpus_dir):
    everything = load_corpus(corpus_dir / "adequacy.jsonl")
    fast = load_corpus(corpus_dir / "adequacy.jsonl", include_slow=False)
    assert len(everything) == 47
    assert len(fast) < len(everything)
    assert all(not e.slow for e in fast)
    assert sum(1 for e in everything if e.diverges) == 9


def test_load_corpus_rejects_bad_entries(tmp_path):
    path = tmp_path / "bad.jsonl"
    path.write_text(json.dumps({"term": "0", "expect": "maybe"}) + "\n")
    with pytest.raises(ValueError):
        load_corpus(path)
    path.write_text("{not json}\n")
    with pytest.raises(ValueError) as info:
        load_corpus(path)
    assert "bad.jsonl:1" in str(info.value)


def test_load_corpus_skips_blank_lines(tmp_path):
    path = tmp_path / "small.jsonl"
    path.write_text('\n{"term": "succ 0", "expect": {"answer": 1}}\n\n{"term": "Omega[N]", "expect": "diverges"}\n')
    entries = load_corpus(path)
    assert [e.expect for e in entries] == [1, None]
    assert entries[0].name == "succ 0"


def test_load_functions(corpus_dir):
    entries = load_functions(corpus_dir / "functions.jsonl")
    assert len({e.term for e in entries}) == len(entries) >= 50
    first = entries[0]
    assert len(first.applications()) == len(first.args)


def test_function_corpus_mixes_shapes(corpus_dir):
    entries = load_functions(corpus_dir / "functions.jsonl")
    assert all(typecheck([], t) == N for e in entries for t in e.applications())
    types = [typecheck([], parse(e.term)) for e in entries]
    assert {1, 2, 3} <= {len(arg_types(ty)) for ty in types}
    assert sum(any(isinstance(a, Arrow) for a in arg_types(ty)) for ty in types) >= 10
    assert sum(contains_fix(parse(e.term)) for e in entries) >= 5
    assert sum("case" in e.term for e in entries) >= 5


def test_classify():
    answers = CorpusEntry("succ 0", 1)
    assert classify(answers, Answer(1), Answer(1)) == CaseStatus.PASS
    assert classify(answers, Answer(1), Unresolved(10, True)) == CaseStatus.MISMATCH
    diverges = CorpusEntry("Omega[N]", None)
    assert classify(diverges, Unresolved(0, False), Unresolved(0, False)) == CaseStatus.CONSISTENT
    assert classify(diverges, Unresolved(0, False), Answer(0)) == CaseStatus.MISMATCH
