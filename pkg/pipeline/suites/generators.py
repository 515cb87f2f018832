"""
Random populations for the law suites: small games, explicit finite
strategies on them, and evaluation trees.
"""
import logging
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from src.game_core import (
    NAT,
    Bang,
    Bounds,
    GameExpr,
    Lolli,
    Move,
    Player,
    Tensor,
    With,
    candidate_moves,
    candidate_o_moves,
    legal_position,
    switching_ok,
)
from src.pcf_lang import (
    FET,
    OMEGA,
    Context,
    N,
    NumLeaf,
    Type,
    arg_types,
    arrow,
    case_node,
    fresh_binders,
    lam_ctx,
    lookup,
)
from src.strategy import FiniteStrategy

logger = logging.getLogger(__name__)

# Games of type depth <= 2 over Nat
BASE_GAMES: Tuple[GameExpr, ...] = (
    NAT,
    Tensor(NAT, NAT),
    With(NAT, NAT),
    Lolli(NAT, NAT),
)

# Well-opened games for the exponential suites
WELL_OPENED: Tuple[GameExpr, ...] = (NAT, With(NAT, NAT))

# Generator bounds; kept below the suite bounds so explicit sets stay small
GENERATOR_BOUNDS = Bounds(max_nat=2, max_index=1, max_len=6)


def pick(rng: np.random.Generator, items: Sequence):
    return items[int(rng.integers(len(items)))]


def random_game(rng: np.random.Generator) -> GameExpr:
    return pick(rng, BASE_GAMES)


def random_finite(
    rng: np.random.Generator,
    game: GameExpr,
    bounds: Bounds = GENERATOR_BOUNDS,
    silence: float = 0.3,
    name: str = "σ",
) -> FiniteStrategy:
    """
    A random history-free strategy on `game` given by explicit positions.

    Each Opponent move gets at most one response for the whole strategy,
    chosen among the legal Player moves that respect switching; with
    probability `silence` it gets none.
    """
    table: Dict[Move, Optional[Move]] = {}
    positions = set()
    frontier: List[Tuple[Move, ...]] = [()]
    while frontier:
        s = frontier.pop()
        if len(s) + 2 > bounds.max_len:
            continue
        for a in candidate_o_moves(game, s, bounds):
            if a not in table:
                options = [
                    b for b in candidate_moves(game, s + (a,), bounds, Player.P)
                    if switching_ok(game, s + (a, b))
                ]
                table[a] = pick(rng, options) if options and rng.random() >= silence else None
            b = table[a]
            if b is None:
                continue
            t = s + (a, b)
            if t in positions or not legal_position(game, t) or not switching_ok(game, t):
                continue
            positions.add(t)
            frontier.append(t)
    return FiniteStrategy(game, positions, name)


def random_arrow(rng: np.random.Generator, source: GameExpr, target: GameExpr, name: str = "σ") -> FiniteStrategy:
    return random_finite(rng, Lolli(source, target), name=name)


def random_kleisli(rng: np.random.Generator, source: GameExpr, target: GameExpr, name: str = "σ") -> FiniteStrategy:
    """Random strategy on !source ⊸ target"""
    return random_finite(rng, Lolli(Bang(source), target), name=name)


# ============================================
# EVALUATION TREES
# ============================================

# Contexts for generated trees, innermost variable last
FET_CONTEXTS: Tuple[Context, ...] = (
    (("x", N),),
    (("x", N), ("z", N)),
    (("f", arrow(N, N)),),
    (("f", arrow(N, N)), ("x", N)),
    (("g", arrow(N, N, N)),),
)

FET_TYPES: Tuple[Type, ...] = (N, arrow(N, N))


def random_fet(
    rng: np.random.Generator,
    ctx: Context,
    ty: Type,
    depth: int = 3,
    max_nat: int = 3,
    support: int = 3,
) -> FET:
    """Random evaluation tree of type `ty` in `ctx`, case depth <= depth"""
    binders = fresh_binders(ctx, ty)
    scope = tuple(ctx) + binders
    return lam_ctx(binders, _random_body(rng, scope, depth, max_nat, support))


def _random_body(rng: np.random.Generator, scope, depth: int, max_nat: int, support: int) -> FET:
    roll = rng.random()
    heads = [name for k, (name, _) in enumerate(scope) if lookup(scope, name) == k]
    if depth == 0 or not heads or roll < 0.3:
        return OMEGA if rng.random() < 0.3 else NumLeaf(int(rng.integers(max_nat + 1)))
    head = pick(rng, heads)
    head_type = scope[lookup(scope, head)][1]
    args = [random_fet(rng, scope, t, depth - 1, max_nat, support) for t in arg_types(head_type)]
    answers = {
        n: _random_body(rng, scope, depth - 1, max_nat, support)
        for n in range(int(rng.integers(1, support + 1)))
    }
    return case_node(head, args, answers)
