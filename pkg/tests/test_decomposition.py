"""
Tests for decomposition, readback, the approximants and decomposition-driven
application.
"""
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pipeline.suites.generators import random_fet
from src.decomposition import (
    DecompKind,
    E_k,
    S_k,
    apply_via_decomposition,
    decomposition_tree,
    dhb,
    eta_k,
    p_k,
    phi,
    preceq_k,
    run_decomposed,
    uncurried,
)
from src.denotation import Fuel, denote
from src.errors import DecompositionError
from src.game_core import NAT, Bounds, Lolli
from src.pcf_lang import (
    N,
    Answer,
    NumLeaf,
    Unresolved,
    arrow,
    case_node,
    fet_equal,
    fet_to_text,
    lam_ctx,
    parse,
    q_k,
)
from src.strategy import FunctionStrategy, strat_equiv, strat_subeq

X = (("x", N),)


def closed(text, fuel=Fuel(4)):
    return denote([], parse(text), fuel)


def code(text):
    return closed(text).code


# ============================================
# DECOMPOSITION
# ============================================

def test_kinds_of_decomposition():
    assert phi(closed("\\x:N. 3")).kind == DecompKind.CONST
    assert phi(closed("\\x:N. 3")).value == 3
    assert phi(closed("Omega[N->N]")).kind == DecompKind.BOTTOM
    case = phi(closed("\\x:N. succ x"))
    assert case.kind == DecompKind.CASE
    assert case.position == 1 and case.args == []
    assert case.types == [N]


def test_head_position_counts_from_the_outermost_variable():
    d = phi(closed("\\x:N. \\y:N. y"))
    assert d.position == 2
    d = phi(closed("\\f:N->N. f 0"))
    assert d.position == 1 and len(d.args) == 1


def test_answer_continuations():
    d = phi(closed("\\x:N. succ x"))
    assert phi(d.answer(4)).kind == DecompKind.CONST
    assert phi(d.answer(4)).value == 5
    with pytest.raises(DecompositionError):
        phi(closed("\\x:N. 3")).answer(0)


def test_uncurried_moves_arguments_into_the_context():
    flat, types = uncurried(closed("\\x:N. \\y:N. x"))
    assert types == [N, N]


def test_decomposition_rejects_non_pcf_games():
    sigma = FunctionStrategy(Lolli(NAT, NAT), lambda m: None, "linear")
    with pytest.raises(DecompositionError):
        phi(sigma)


def test_decomposition_tree_view():
    tree = decomposition_tree(closed("\\x:N. if0 x 7 Omega[N]"), 2)
    assert tree["kind"] == "case" and tree["head"] == "y1"
    assert tree["answers"]["0"] == {"kind": "const", "n": 7}
    assert tree["answers"]["1"] == {"kind": "bottom"}


# ============================================
# READBACK AND APPROXIMANTS
# ============================================

def test_readback_of_identity():
    tree = eta_k(2, closed("\\x:N. x"), (), ["x"])
    assert fet_to_text(tree, (), arrow(N, N)) == "\\x:N. case2 x 0 1"


def test_readback_at_depth_zero_is_omega():
    tree = eta_k(0, closed("\\x:N. 5"), (), ["x"])
    assert fet_to_text(tree, (), arrow(N, N)) == "\\x:N. Omega[N]"


def test_readback_of_a_recursive_function():
    countdown = closed("Y[N->N] (\\f:N->N. \\n:N. if0 n 0 (f (pred n)))")
    # every later question to n only decides between 0 and another recursive call
    inner = case_node("n", [], {0: NumLeaf(0), 1: NumLeaf(0)})
    expected = lam_ctx((("n", N),), case_node("n", [], {0: NumLeaf(0), 1: inner, 2: inner}))
    assert fet_equal(eta_k(3, countdown, (), ["n"]), expected)


def test_approximant_matches_readback(small_bounds):
    approx = p_k(2, closed("\\x:N. x"))
    assert strat_equiv(approx, closed("\\x:N. case2 x 0 1"), small_bounds)


def test_approximants_are_below(small_bounds):
    sigma = closed("\\x:N. succ x")
    for k in range(3):
        assert strat_subeq(p_k(k, sigma), sigma, small_bounds)
    assert not strat_subeq(sigma, p_k(1, sigma), small_bounds)


@settings(max_examples=15, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(0, 2))
def test_strategies_of_trees_read_back_truncated(seed, k):
    rng = np.random.default_rng(seed)
    ty = arrow(N, N) if seed % 2 else N
    ctx = () if seed % 2 else X
    tree = random_fet(rng, ctx, ty, depth=2, max_nat=2, support=2)
    assert fet_equal(E_k(k, S_k(k, tree, ctx, ty), ctx), q_k(k, tree))


# ============================================
# RECURSIVE CODES
# ============================================

def test_dhb_components():
    assert dhb(code("\\x:N. x")).D == (3, 1)
    assert dhb(code("\\x:N. 3")).D == (2, 3)
    bottom = dhb(code("Omega[N->N]"))
    assert bottom.D is None and bottom.H is None and bottom.B(0) is None


def test_dhb_of_a_case_lists_argument_codes():
    parts = dhb(code("\\f:N->N. f 0"))
    assert parts.D == (3, 1)
    assert len(parts.H) == 1
    assert dhb(parts.H[0]).D == (2, 0)
    assert dhb(parts.B(6)).D == (2, 6)


def test_apply_via_decomposition():
    assert apply_via_decomposition(code("\\x:N. succ x"), [code("4")]) == Answer(5)
    assert apply_via_decomposition(code("\\f:N->N. f 3"), [code("\\x:N. pred x")]) == Answer(2)
    assert apply_via_decomposition(code("\\x:N. \\y:N. y"), [code("Omega[N]"), code("6")]) == Answer(6)


def test_apply_via_decomposition_on_bottom():
    outcome = apply_via_decomposition(code("\\x:N. x"), [code("Omega[N]")])
    assert isinstance(outcome, Unresolved) and not outcome.fuel_exhausted


def test_apply_via_decomposition_checks_arity():
    with pytest.raises(DecompositionError):
        apply_via_decomposition(code("\\x:N. x"), [])


def test_simulation_order():
    sigma = closed("\\x:N. succ x")
    assert preceq_k(2, p_k(2, sigma).code, sigma.code)
    assert preceq_k(2, sigma.code, p_k(2, sigma).code)
    assert not preceq_k(2, sigma.code, p_k(1, sigma).code)
    assert preceq_k(3, code("Omega[N->N]"), code("\\x:N. 3"))
    assert not preceq_k(1, code("\\x:N. x"), code("\\x:N. 3"))
    assert preceq_k(0, code("\\x:N. 3"), code("\\x:N. 4"))


@pytest.mark.parametrize("text,expected", [
    ("(\\x:N. succ x) 4", 5),
    ("(\\f:N->N. f 3) (\\x:N. pred x)", 2),
    ("Y[N->N] (\\f:N->N. \\n:N. if0 n 7 (f (pred n))) 2", 7),
    ("case2 1 7 8", 8),
])
def test_run_decomposed(text, expected):
    assert run_decomposed(parse(text), Fuel(8)) == Answer(expected)


def test_run_decomposed_divergence():
    assert isinstance(run_decomposed(parse("succ Omega[N]"), Fuel(4)), Unresolved)


def test_run_decomposed_spends_the_step_budget():
    program = parse("(\\f:N->N. f (f 0)) (\\x:N. succ x)")
    assert run_decomposed(program, Fuel(8), bounds=Bounds()) == Answer(2)
    starved = run_decomposed(program, Fuel(8), bounds=Bounds(max_steps=1))
    assert isinstance(starved, Unresolved) and starved.fuel_exhausted


def test_readback_of_constants_is_stable():
    assert fet_equal(eta_k(1, closed("\\x:N. 5"), (), ["x"]), eta_k(3, closed("\\x:N. 5"), (), ["x"]))
