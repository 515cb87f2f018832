"""
Tests for the law suites, their generators and the run ledger.
"""
import json

import numpy as np
import pytest

from pipeline.run_log import log_run, summarize_runs
from pipeline.suites import CORPUS_SUITES, SUITE_BOUNDS, SUITES, SuiteResult
from pipeline.suites.approximation import within_level
from pipeline.suites.bang import BANG_SHAPES, random_bang_map
from pipeline.suites.generators import (
    FET_CONTEXTS,
    GENERATOR_BOUNDS,
    WELL_OPENED,
    random_fet,
    random_finite,
    random_kleisli,
)
from src.combinators import compose, der, promote
from src.game_core import NAT, Ans, L, Lolli, Q, R, legal_position, mv
from src.observation import load_functions
from src.pcf_lang import N, check_fet
from src.strategy import strat_equiv


@pytest.fixture
def functions(corpus_dir):
    return load_functions(corpus_dir / "functions.jsonl")[:4]


# ============================================
# GENERATORS
# ============================================

def test_random_finite_strategies_are_legal():
    rng = np.random.default_rng(11)
    for _ in range(5):
        sigma = random_finite(rng, Lolli(NAT, NAT))
        assert all(legal_position(sigma.game, s) for s in sigma.positions)
        assert all(len(s) <= GENERATOR_BOUNDS.max_len for s in sigma.positions)


def test_silent_strategy_has_no_positions():
    sigma = random_finite(np.random.default_rng(0), NAT, silence=1.0)
    assert sigma.positions == ((),)


def test_random_kleisli_game():
    sigma = random_kleisli(np.random.default_rng(2), WELL_OPENED[0], NAT)
    assert sigma.game.right == NAT


@pytest.mark.parametrize("ctx", FET_CONTEXTS)
def test_random_trees_are_well_typed(ctx):
    rng = np.random.default_rng(5)
    for _ in range(5):
        check_fet(ctx, random_fet(rng, ctx, N), N)


def test_same_seed_same_population():
    first = random_finite(np.random.default_rng(9), Lolli(NAT, NAT))
    second = random_finite(np.random.default_rng(9), Lolli(NAT, NAT))
    assert first.positions == second.positions


def test_bang_population_covers_every_shape():
    rng = np.random.default_rng(3)
    assert {random_bang_map(rng)[0] for _ in range(80)} == set(BANG_SHAPES)


@pytest.mark.parametrize("shape", ["contracted pair", "iso round trip", "projection"])
def test_bang_lemma_beyond_promotions(shape):
    rng = np.random.default_rng(8)
    for _ in range(200):
        drawn, sigma = random_bang_map(rng)
        if drawn == shape:
            break
    else:
        pytest.fail(f"no {shape} drawn")
    target = sigma.game.right.inner
    assert strat_equiv(sigma, promote(compose(sigma, der(target))), SUITE_BOUNDS)


# ============================================
# SUITES
# ============================================

@pytest.mark.parametrize("name", ["category", "comonad", "bang"])
def test_structural_suites_pass(name):
    result = SUITES[name]().run(np.random.default_rng(1), 2, seed=1)
    assert result.passed, result.failures
    assert result.cases == 2 and result.seed == 1


@pytest.mark.parametrize("name", sorted(CORPUS_SUITES))
def test_corpus_suites_pass(name, functions):
    result = SUITES[name](functions=functions).run(np.random.default_rng(4), 2)
    assert result.passed, result.failures


@pytest.mark.slow
@pytest.mark.parametrize("name", sorted(CORPUS_SUITES))
def test_corpus_suites_cover_every_function(name, corpus_dir):
    everything = load_functions(corpus_dir / "functions.jsonl")
    result = SUITES[name](functions=everything).run(np.random.default_rng(0), len(everything))
    assert result.passed, result.failures


def test_decomposition_suite_without_functions_checks_trees():
    result = SUITES["decomposition"]().run(np.random.default_rng(0), 3)
    assert result.passed and result.cases == 3


def test_save_result(tmp_path):
    suite = SUITES["category"]()
    result = SuiteResult("category", 1, ["case 0: left identity"], 0.5, {"max_nat": 2}, 7)
    path = suite.save_result(result, tmp_path / "results")
    data = json.loads(open(path, encoding="utf-8").read())
    assert data["failures"] == ["case 0: left identity"]
    assert data["seed"] == 7
    assert not result.passed


# ============================================
# APPROXIMATION LEVELS
# ============================================

def test_within_level_bounds_length():
    game = Lolli(NAT, NAT)
    play = (mv(R, Q), mv(L, Q), mv(L, Ans(0)), mv(R, Ans(0)))
    assert within_level(game, play, 2)
    assert not within_level(game, play, 1)


def test_within_level_bounds_opponent_answers():
    game = Lolli(NAT, NAT)
    play = (mv(R, Q), mv(L, Q), mv(L, Ans(1)), mv(R, Ans(1)))
    # the answer at ply 2 survives only when 1 < k - 1
    assert not within_level(game, play, 2)
    assert within_level(game, play, 3)


# ============================================
# RUN LEDGER
# ============================================

def test_run_ledger(tmp_path):
    log_file = str(tmp_path / "nested" / "runs.jsonl")
    log_run("category", 10, 0, 0, 1.25, seed=3, log_file=log_file)
    log_run("category", 5, 1, 0, 0.5, log_file=log_file)
    log_run("adequacy", 47, 0, 900, 2.0, timestamp="2026-01-01T00:00:00", log_file=log_file)
    summary = summarize_runs(log_file)
    assert summary["runs"] == 3
    assert summary["elapsed"] == 3.75
    assert summary["by_suite"]["category"] == {"runs": 2, "cases": 15, "failures": 1}
    last = json.loads(open(log_file).read().splitlines()[-1])
    assert last["timestamp"] == "2026-01-01T00:00:00" and last["steps"] == 900


def test_empty_run_ledger(tmp_path):
    assert summarize_runs(str(tmp_path / "absent.jsonl")) == {"runs": 0, "elapsed": 0.0, "by_suite": {}}
