"""
Tests for game expressions: labelling, legality, switching, position equivalence.
"""
import pytest

from src.errors import GameMismatchError, IllegalPositionError
from src.game_core import (
    NAT,
    SIGMA,
    Ans,
    Bang,
    Bounds,
    Idx,
    L,
    Lolli,
    Move,
    Player,
    Q,
    R,
    Tensor,
    With,
    audit_position,
    candidate_moves,
    candidate_o_moves,
    ctx_path,
    ctx_types,
    format_move,
    game_from_text,
    game_of_type,
    game_to_text,
    hom_game,
    legal_position,
    mv,
    parse_move,
    parse_position,
    player_of,
    pos_equiv,
    split_hom,
    switching_ok,
    well_opened,
)
from src.pcf_lang import N, arrow

NAT_TO_NAT = Lolli(NAT, NAT)


def test_move_text_format():
    move = parse_move("L.3!.Ans(2)")
    assert move == Move((L, Idx(3)), Ans(2))
    assert format_move(move) == "L.3!.Ans(2)"
    assert parse_move("R.Q") == mv(R, Q)
    assert parse_position("R.Q\nL.Q\n") == (mv(R, Q), mv(L, Q))


def test_unknown_tag_rejected():
    with pytest.raises(GameMismatchError):
        parse_move("X.Q")


def test_labels_flip_on_the_left_of_a_lolli():
    assert player_of(NAT_TO_NAT, mv(R, Q)) == Player.O
    assert player_of(NAT_TO_NAT, mv(L, Q)) == Player.P
    assert player_of(NAT_TO_NAT, mv(L, Ans(3))) == Player.O
    assert player_of(NAT_TO_NAT, mv(R, Ans(3))) == Player.P


def test_sigma_answers_only_zero():
    assert player_of(SIGMA, mv(Ans(0))) == Player.P
    with pytest.raises(GameMismatchError):
        player_of(SIGMA, mv(Ans(1)))


def test_legal_positions_of_successor_game():
    play = [mv(R, Q), mv(L, Q), mv(L, Ans(3)), mv(R, Ans(4))]
    assert legal_position(NAT_TO_NAT, play)
    assert legal_position(NAT_TO_NAT, play[:2])
    assert not legal_position(NAT_TO_NAT, [mv(L, Q)])
    assert not legal_position(NAT_TO_NAT, [mv(R, Q), mv(R, Ans(1)), mv(R, Q)])
    # answers must close the pending question
    assert not legal_position(NAT_TO_NAT, [mv(R, Q), mv(L, Q), mv(L, Ans(3)), mv(L, Ans(4))])


def test_with_positions_stay_in_one_component():
    game = With(NAT, NAT)
    assert legal_position(game, [mv(L, Q), mv(L, Ans(0))])
    assert not legal_position(game, [mv(L, Q), mv(L, Ans(0)), mv(R, Q)])


def test_tensor_allows_opponent_switch():
    game = Tensor(NAT, NAT)
    play = [mv(L, Q), mv(L, Ans(0)), mv(R, Q), mv(R, Ans(1))]
    assert legal_position(game, play)
    assert switching_ok(game, play)


def test_bang_copies():
    game = Bang(NAT)
    play = [mv(Idx(0), Q), mv(Idx(0), Ans(1)), mv(Idx(2), Q), mv(Idx(2), Ans(1))]
    assert legal_position(game, play)
    assert not legal_position(game, [mv(Idx(0), Q), mv(Idx(0), Ans(1)), mv(Idx(0), Q)])


def test_position_equivalence_relocates_indices():
    game = Bang(NAT)
    s = [mv(Idx(0), Q), mv(Idx(0), Ans(1))]
    assert pos_equiv(game, s, [mv(Idx(3), Q), mv(Idx(3), Ans(1))])
    assert not pos_equiv(game, s, [mv(Idx(3), Q), mv(Idx(3), Ans(2))])
    two = s + [mv(Idx(1), Q)]
    assert not pos_equiv(game, two, [mv(Idx(5), Q), mv(Idx(5), Ans(1)), mv(Idx(5), Q)])
    assert pos_equiv(game, two, [mv(Idx(5), Q), mv(Idx(5), Ans(1)), mv(Idx(4), Q)])


def test_position_equivalence_is_identity_on_nat():
    assert pos_equiv(NAT, [mv(Q)], [mv(Q)])
    assert not pos_equiv(NAT, [mv(Q), mv(Ans(1))], [mv(Q), mv(Ans(2))])


def test_type_games_and_contexts():
    assert game_of_type(arrow(N, N)) == Lolli(Bang(NAT), NAT)
    game = hom_game([N, arrow(N, N)], N)
    assert split_hom(game) == ([N, arrow(N, N)], N)
    assert ctx_types(game.left.inner) == [N, arrow(N, N)]
    assert ctx_path(3, 1) == (L, L, R)
    assert ctx_path(3, 3) == (R,)
    assert well_opened(With(NAT, NAT))
    assert not well_opened(Bang(NAT))


def test_game_text_roundtrip():
    game = hom_game([arrow(N, N)], arrow(N, N))
    assert game_from_text(game_to_text(game)) == game


def test_candidate_moves_respect_bounds():
    bounds = Bounds(max_nat=2, max_index=1)
    assert candidate_o_moves(NAT, [], bounds) == [mv(Q)]
    answers = candidate_moves(NAT, [mv(Q)], bounds, Player.P)
    assert answers == [mv(Ans(0)), mv(Ans(1)), mv(Ans(2))]
    opening = candidate_o_moves(Lolli(Bang(NAT), NAT), [], bounds)
    assert opening == [mv(R, Q)]
    copies = candidate_moves(Lolli(Bang(NAT), NAT), [mv(R, Q)], bounds, Player.P)
    assert mv(L, Idx(0), Q) in copies and mv(L, Idx(1), Q) in copies


def test_bounds_must_be_positive():
    with pytest.raises(ValueError):
        Bounds(max_nat=0)


def test_audit_hook_raises_on_illegal_positions(audit):
    audit_position(NAT_TO_NAT, [mv(R, Q), mv(L, Q)])
    with pytest.raises(IllegalPositionError):
        audit_position(NAT_TO_NAT, [mv(L, Q)])


def test_audit_hook_is_silent_when_disabled():
    audit_position(NAT_TO_NAT, [mv(L, Q)])
