"""
Tests for the strategy combinators: pairings, composition, exponentials,
the co-Kleisli structure and the case construction.
"""
import pytest
from hypothesis import given
from hypothesis import strategies as st

from src.combinators import (
    CantorPairing,
    Engine,
    GammaPairing,
    Lambda,
    apply_morphism,
    arithmetic,
    case_construct,
    chi,
    chi_a,
    compose,
    compose_all,
    con,
    constant,
    curry,
    der,
    exp_iso,
    first_order,
    fst,
    get_pairing,
    identity,
    linear_app,
    pair,
    parse_expression,
    promote,
    snd,
    tensor,
    uncurry,
    unit_left,
    unit_right,
    unit_right_inv,
    unlambda,
    variable,
    weak,
)
from src.errors import BudgetExhausted, GameMismatchError, PcfSyntaxError, StrategyCodeError
from src.game_core import NAT, Ans, Bang, Bounds, Comp, Family, Idx, L, Lolli, Move, Q, R, Tensor, With, hom_game, mv
from src.pcf_lang import N
from src.strategy import Diagnostics, FunctionStrategy, probe, strat_equiv, traces

SUCC = arithmetic("succ")


# ============================================
# PAIRINGS
# ============================================

@given(st.integers(0, 5000), st.integers(0, 5000))
def test_pairings_are_invertible(i, j):
    for pairing in (CantorPairing(), GammaPairing()):
        assert pairing.unpair(pairing.pair(i, j)) == (i, j)


@given(st.integers(0, 5000))
def test_gamma_grows_linearly_in_the_second_component(j):
    assert GammaPairing().pair(0, j) == 2 * j + 1


def test_gamma_never_uses_zero():
    assert GammaPairing().unpair(0) is None
    assert CantorPairing().pair(0, 0) == 0


def test_unknown_pairing():
    with pytest.raises(ValueError):
        get_pairing("hilbert")


# ============================================
# COPYCATS AND COMPOSITION
# ============================================

def test_identity_traces():
    found = traces(identity(NAT), Bounds(max_nat=1, max_len=4))
    assert found == {
        (),
        (mv(R, Q), mv(L, Q)),
        (mv(R, Q), mv(L, Q), mv(L, Ans(0)), mv(R, Ans(0))),
        (mv(R, Q), mv(L, Q), mv(L, Ans(1)), mv(R, Ans(1))),
    }


def test_successor_plays():
    assert SUCC.next_move(mv(R, Q)) == mv(L, Q)
    assert SUCC.next_move(mv(L, Ans(4))) == mv(R, Ans(5))
    assert arithmetic("pred").next_move(mv(L, Ans(0))) == mv(R, Ans(0))


def test_composition_hides_the_middle_game():
    twice = compose(SUCC, SUCC)
    assert twice.next_move(mv(R, Q)) == mv(L, Q)
    assert twice.next_move(mv(L, Ans(3))) == mv(R, Ans(5))
    _, middle = twice.interaction(mv(L, Ans(3)))
    assert middle == [mv(Ans(4))]


def test_identity_is_neutral(small_bounds):
    assert strat_equiv(compose(identity(NAT), SUCC), SUCC, small_bounds)
    assert strat_equiv(compose(SUCC, identity(NAT)), SUCC, small_bounds)


def test_composition_rejects_mismatched_games():
    with pytest.raises(GameMismatchError):
        compose(SUCC, der(NAT))


def test_unit_round_trip(small_bounds):
    round_trip = compose(unit_right_inv(NAT), unit_right(NAT))
    assert strat_equiv(round_trip, identity(NAT), small_bounds)


def second_input():
    """On (N⊗N)⊸N: answer with the right-hand input"""
    def respond(m):
        if m == mv(R, Q):
            return mv(L, R, Q)
        if m.path == (L, R) and isinstance(m.base, Ans):
            return mv(R, m.base)
        return None

    return FunctionStrategy(Lolli(Tensor(NAT, NAT), NAT), respond, "second")


def test_curry_retags_moves(small_bounds):
    curried = curry(second_input())
    assert curried.game == Lolli(NAT, Lolli(NAT, NAT))
    assert curried.next_move(mv(R, R, Q)) == mv(R, L, Q)
    assert curried.next_move(mv(R, L, Ans(3))) == mv(R, R, Ans(3))
    assert strat_equiv(uncurry(curried), second_input(), small_bounds)


def test_curry_needs_a_tensor():
    with pytest.raises(GameMismatchError):
        curry(SUCC)


def test_linear_application_wires_function_and_argument():
    app = linear_app(NAT, NAT)
    assert app.game == Lolli(Tensor(Lolli(NAT, NAT), NAT), NAT)
    assert app.next_move(mv(R, Q)) == mv(L, L, R, Q)
    assert app.next_move(mv(L, L, L, Q)) == mv(L, R, Q)
    assert app.next_move(mv(L, R, Ans(2))) == mv(L, L, L, Ans(2))
    assert app.next_move(mv(L, L, R, Ans(3))) == mv(R, Ans(3))


def test_endless_chatter_exhausts_the_budget():
    # sigma answers at once; tau keeps asking again
    sigma = FunctionStrategy(Lolli(NAT, NAT), lambda m: mv(R, Ans(0)) if m == mv(R, Q) else None, "eager")
    tau = FunctionStrategy(Lolli(NAT, NAT), lambda m: mv(L, Q), "nagging")
    looping = compose(sigma, tau, Engine(max_steps=10))
    with pytest.raises(BudgetExhausted) as info:
        looping.next_move(mv(R, Q))
    assert info.value.steps == 10
    assert probe(compose(sigma, tau, Engine(max_steps=10)), mv(R, Q)) is None


def test_shared_budget_counts_every_exchange():
    diagnostics = Diagnostics(budget=5)
    sigma = FunctionStrategy(Lolli(NAT, NAT), lambda m: mv(R, Ans(0)) if m == mv(R, Q) else None, "eager")
    tau = FunctionStrategy(Lolli(NAT, NAT), lambda m: mv(L, Q), "nagging")
    looping = compose(sigma, tau, Engine(max_steps=1000, diagnostics=diagnostics))
    with pytest.raises(BudgetExhausted):
        looping.next_move(mv(R, Q))
    assert diagnostics.steps == 6
    assert diagnostics.exhausted == 1


# ============================================
# EXPONENTIALS
# ============================================

def test_promoted_dereliction_is_identity():
    bounds = Bounds(max_nat=1, max_index=1, max_len=6, max_steps=20000)
    assert strat_equiv(promote(der(NAT)), identity(Bang(NAT)), bounds)


def test_promoted_dereliction_is_a_left_unit():
    bounds = Bounds(max_nat=1, max_index=1, max_len=6, max_steps=20000)
    sigma = compose(der(NAT), SUCC)
    assert strat_equiv(compose(promote(der(NAT)), sigma), sigma, bounds)


@pytest.mark.parametrize("game", [NAT, With(NAT, NAT)], ids=["N", "N&N"])
def test_dereliction_does_not_depend_on_the_copy(game, small_bounds):
    assert der(NAT, 1).next_move(mv(R, Q)) == mv(L, Idx(1), Q)
    assert strat_equiv(der(game, 0), der(game, 1), small_bounds)


def test_canonical_engine_pairs_with_cantor():
    promoted = promote(der(NAT), Engine())
    assert promoted.next_move(mv(R, Idx(2), Q)) == mv(L, Idx(3), Q)
    assert promoted.next_move(mv(L, Idx(3), Ans(1))) == mv(R, Idx(2), Ans(1))


def test_promotion_relocates_source_copies():
    promoted = promote(der(NAT), Engine(pairing=GammaPairing()))
    assert promoted.next_move(mv(R, Idx(2), Q)) == mv(L, Idx(GammaPairing().pair(2, 0)), Q)
    cantor = promote(der(NAT), Engine(pairing=CantorPairing()))
    assert cantor.next_move(mv(R, Idx(2), Q)) == mv(L, Idx(CantorPairing().pair(2, 0)), Q)


def test_contraction_then_weakening_is_identity():
    bounds = Bounds(max_nat=1, max_index=1, max_len=4, max_steps=20000)
    counit = compose_all([con(NAT), tensor(weak(NAT), identity(Bang(NAT))), unit_left(Bang(NAT))])
    assert strat_equiv(counit, identity(Bang(NAT)), bounds)


def test_exponential_isomorphism_round_trip():
    bounds = Bounds(max_nat=1, max_index=1, max_len=4, max_steps=20000)
    round_trip = compose(exp_iso(NAT, NAT, "fwd"), exp_iso(NAT, NAT, "bwd"))
    assert strat_equiv(round_trip, identity(Tensor(Bang(NAT), Bang(NAT))), bounds)


def test_exponential_isomorphism_direction():
    with pytest.raises(ValueError):
        exp_iso(NAT, NAT, "sideways")


# ============================================
# CO-KLEISLI STRUCTURE
# ============================================

@pytest.mark.parametrize("position", [1, 2])
def test_lambda_then_unlambda(position, small_bounds):
    sigma = variable([N, N], position)
    assert strat_equiv(unlambda(Lambda(sigma)), sigma, small_bounds)


def test_variable_out_of_range():
    with pytest.raises(GameMismatchError):
        variable([N], 2)


def test_pairing_then_projection():
    four = constant(Lolli(Bang(NAT), NAT), 4)
    tupled = pair(der(NAT), four)
    assert tupled.game == Lolli(Bang(NAT), With(NAT, NAT))
    assert compose(tupled, snd(NAT, NAT)).next_move(mv(R, Q)) == mv(R, Ans(4))
    bounds = Bounds(max_nat=1, max_index=2, max_len=4, max_steps=20000)
    assert strat_equiv(compose(tupled, fst(NAT, NAT)), der(NAT), bounds)


def test_pairing_needs_a_common_context():
    with pytest.raises(GameMismatchError):
        pair(der(NAT), constant(Lolli(Bang(With(NAT, NAT)), NAT), 0))


def test_application_feeds_the_argument():
    pick_argument = Lambda(variable([N, N], 2))
    three = constant(hom_game([N], N), 3)
    assert probe(apply_morphism(pick_argument, three), mv(R, Q)) == mv(R, Ans(3))
    ignore_argument = Lambda(variable([N, N], 1))
    question = probe(apply_morphism(ignore_argument, three), mv(R, Q))
    assert question is not None and question.path[0] == L


def test_application_checks_the_argument_game():
    with pytest.raises(GameMismatchError):
        apply_morphism(Lambda(variable([N, N], 2)), constant(hom_game([N, N], N), 3))


def test_first_order_successor_in_empty_context():
    succ = first_order([], "succ")
    assert succ.next_move(mv(R, R, Q)) == mv(R, L, Idx(0), Q)
    assert succ.next_move(mv(R, L, Idx(0), Ans(3))) == mv(R, R, Ans(4))


def test_first_order_conditional_selects_a_branch():
    if0 = first_order([], "if0")
    assert if0.next_move(mv(R, L, Idx(0), Ans(0))) == mv(R, R, L, Idx(0), Q)
    assert if0.next_move(mv(R, L, Idx(0), Ans(7))) == mv(R, R, R, L, Idx(0), Q)


def test_affine_case_selects_a_component():
    case = chi_a()
    assert case.game == Lolli(Tensor(NAT, Family(NAT)), NAT)
    assert case.next_move(mv(R, Q)) == mv(L, L, Q)
    assert case.next_move(mv(L, L, Ans(2))) == mv(L, R, Comp(2), Q)
    assert case.next_move(mv(L, R, Comp(2), Ans(7))) == mv(R, Ans(7))


def test_case_through_the_exponential():
    case = chi()
    assert case.game == Lolli(Bang(With(NAT, Family(NAT))), NAT)
    assert case.next_move(mv(R, Q)) == mv(L, Idx(0), L, Q)
    assert case.next_move(mv(L, Idx(0), L, Ans(1))) == mv(L, Idx(1), R, Comp(1), Q)
    assert case.next_move(mv(L, Idx(1), R, Comp(1), Ans(5))) == mv(R, Ans(5))


def test_case_construct_interrogates_the_head():
    body = hom_game([N], N)
    case = case_construct([N], 1, [], [constant(body, 5), constant(body, 6)])
    question = probe(case, mv(R, Q))
    assert question is not None
    assert question.path[0] == L and isinstance(question.path[1], Idx)
    assert question.path[2:] == (R,) and question.base == Q
    assert probe(case, Move(question.path, Ans(1))) == mv(R, Ans(6))
    assert probe(case, Move(question.path, Ans(0))) == mv(R, Ans(5))
    assert probe(case, Move(question.path, Ans(2))) is None


# ============================================
# EXPRESSION LANGUAGE
# ============================================

def test_parse_expression():
    engine = Engine(pairing=GammaPairing())
    strategy = parse_expression("compose(promote(der(N)), der(N))", engine)
    assert strategy.game == Lolli(Bang(NAT), NAT)
    assert strategy.next_move(mv(R, Q)) == mv(L, Idx(GammaPairing().pair(0, 0)), Q)


def test_parse_expression_with_arrow_types():
    strategy = parse_expression("id(N->N)")
    assert strategy.game == Lolli(Lolli(Bang(NAT), NAT), Lolli(Bang(NAT), NAT))
    assert parse_expression("const(N, 3)").next_move(mv(Q)) == mv(Ans(3))


def test_expression_errors():
    with pytest.raises(StrategyCodeError):
        parse_expression("frobnicate(N)")
    with pytest.raises(PcfSyntaxError):
        parse_expression("compose(")
    with pytest.raises(GameMismatchError):
        parse_expression("compose(succ(), der(N))")
