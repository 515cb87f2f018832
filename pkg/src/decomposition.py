"""
Decomposition of strategies at PCF types.

phi looks at a strategy's response to the opening question: no response,
an immediate answer, or a question to a head variable. In the last case the
argument strategies and the answer-continuations are derived from the parent
strategy by re-routing moves, so they stay lazy over infinite strategies.
Readback (eta_k) and the approximants p_k are built on top of phi.
"""
import logging
from dataclasses import dataclass, field
from enum import Enum
from functools import lru_cache
from typing import Callable, Dict, List, Optional, Sequence, Tuple

from .combinators import Engine, Lambda, Pairing, bottom, case_construct, constant, default_engine, unlambda
from .denotation import OPENING, Fuel, deepening_schedule, denote, denote_fet
from .errors import DecompositionError, GameMismatchError
from .game_core import L, R, Ans, Bounds, Idx, Move, ctx_path, hom_game, split_hom
from .pcf_lang import (
    FET,
    N,
    OMEGA,
    Answer,
    Context,
    NumLeaf,
    Outcome,
    Term,
    Type,
    Unresolved,
    arg_types,
    case_node,
    fresh_binders,
    lam_ctx,
    q_k,
    spine,
    typecheck,
)
from .strategy import CombinatorCode, Diagnostics, Strategy, StrategyCode, decode, probe, register_decoder

logger = logging.getLogger(__name__)


# ============================================
# DECOMPOSITION
# ============================================

class DecompKind(str, Enum):
    BOTTOM = "bottom"
    CONST = "const"
    CASE = "case"


@dataclass
class Decomp:
    """
    Result of phi. For CASE, `position` is the 1-based head variable in the
    uncurried context `types`, `args` its argument strategies and answer(n)
    the continuation after the head returns n.
    """
    kind: DecompKind
    types: List[Type]
    value: Optional[int] = None
    position: Optional[int] = None
    args: List[Strategy] = field(default_factory=list)
    answers: Optional[Callable[[int], Strategy]] = None
    _memo: Dict[int, Strategy] = field(default_factory=dict, repr=False)

    def answer(self, n: int) -> Strategy:
        if self.answers is None:
            raise DecompositionError(f"A {self.kind.value} decomposition has no answers")
        if n not in self._memo:
            self._memo[n] = self.answers(n)
        return self._memo[n]

    def tag(self) -> Optional[Tuple[int, int]]:
        """(2, n) for a constant, (3, i) for a case, None for bottom"""
        if self.kind == DecompKind.CONST:
            return (2, self.value)
        if self.kind == DecompKind.CASE:
            return (3, self.position)
        return None


def uncurried(sigma: Strategy) -> Tuple[Strategy, List[Type]]:
    """
    Move every argument of a strategy on !Γ⊸(A_1⇒…⇒N) into its context.

    Raises:
        DecompositionError: If the game is not a PCF type in context
    """
    try:
        types, ty = split_hom(sigma.game)
    except GameMismatchError as e:
        raise DecompositionError(f"Cannot decompose a strategy on {sigma.game}") from e
    result = sigma
    for _ in arg_types(ty):
        result = unlambda(result)
    return result, types + arg_types(ty)


def _locate_head(move: Move, types: Sequence[Type]) -> Tuple[int, int]:
    """(copy index, 1-based variable position) of a question to a head variable"""
    if move.head != L or len(move.path) < 3 or not isinstance(move.path[1], Idx):
        raise DecompositionError(f"Opening response {move} is not a context question")
    rest = move.path[2:]
    lefts = 0
    while lefts < len(rest) and rest[lefts] == L:
        lefts += 1
    position = len(types) - lefts
    if lefts >= len(rest) or rest[lefts] != R or position < 1:
        raise DecompositionError(f"Opening response {move} does not address a variable")
    inner = rest[lefts + 1:]
    if inner != (R,) * len(arg_types(types[position - 1])) or not move.is_question:
        raise DecompositionError(f"Opening response {move} is not the head's result question")
    return move.path[1].i, position


class ArgumentStrategy(Strategy):
    """
    σ_j: the parent's behaviour inside copy 0 of argument j of the head call,
    re-rooted at the right of !Γ ⊸ B_j.
    """

    def __init__(self, parent: Strategy, types: Sequence[Type], copy: int, position: int, j: int):
        arg_type = arg_types(types[position - 1])[j - 1]
        super().__init__(hom_game(types, arg_type), f"arg{j}")
        self.parent = parent
        self.copy = copy
        self.prefix = (L, Idx(copy)) + ctx_path(len(types), position) + (R,) * (j - 1) + (L, Idx(0))

    def _outside_head(self, move: Move) -> bool:
        return move.head == L and len(move.path) > 1 and move.path[1] != Idx(self.copy)

    def respond(self, move: Move) -> Optional[Move]:
        if move.head == R:
            parent_move = Move(self.prefix + move.path[1:], move.base)
        elif self._outside_head(move):
            parent_move = move
        else:
            return None
        r = self.parent.next_move(parent_move)
        if r is None:
            return None
        if r.path[: len(self.prefix)] == self.prefix:
            return Move((R,) + r.path[len(self.prefix):], r.base)
        return r if self._outside_head(r) else None


class AnswerStrategy(Strategy):
    """τ_n: the parent after the head question has been answered with n"""

    def __init__(self, parent: Strategy, types: Sequence[Type], head_question: Move, n: int):
        super().__init__(hom_game(types, N), f"ans{n}")
        self.parent = parent
        self.copy = head_question.path[1]
        self.head_answer = Move(head_question.path, Ans(n))

    def _outside_head(self, move: Move) -> bool:
        return move.head == L and len(move.path) > 1 and move.path[1] != self.copy

    def respond(self, move: Move) -> Optional[Move]:
        if move.path == (R,) and move.is_question:
            parent_move = self.head_answer
        elif self._outside_head(move):
            parent_move = move
        else:
            return None
        r = self.parent.next_move(parent_move)
        if r is None:
            return None
        if r.path == (R,) or self._outside_head(r):
            return r
        return None


def _child_code(sigma: Strategy, tag: str, param: int) -> Optional[StrategyCode]:
    return CombinatorCode(tag, (sigma.code,), (param,)) if sigma.code is not None else None


@lru_cache(maxsize=8192)
def phi(sigma: Strategy) -> Decomp:
    """
    Decompose a strategy on a PCF type-in-context game.

    Returns:
        Decomp of kind BOTTOM, CONST (with value) or CASE (with position,
        argument strategies and lazily derived answer strategies)

    Raises:
        DecompositionError: If the game is ill-shaped or the opening response is off-shape
    """
    flat, types = uncurried(sigma)
    response = probe(flat, OPENING)
    if response is None:
        return Decomp(DecompKind.BOTTOM, types)
    if response.path == (R,) and isinstance(response.base, Ans):
        return Decomp(DecompKind.CONST, types, value=response.base.n)
    copy, position = _locate_head(response, types)
    args = []
    for j in range(1, len(arg_types(types[position - 1])) + 1):
        arg = ArgumentStrategy(flat, types, copy, position, j)
        arg.code = _child_code(sigma, "phi_arg", j)
        args.append(arg)

    def answer(n: int) -> Strategy:
        tau = AnswerStrategy(flat, types, response, n)
        tau.code = _child_code(sigma, "phi_answer", n)
        return tau

    return Decomp(DecompKind.CASE, types, position=position, args=args, answers=answer)


def _decode_arg(code: CombinatorCode) -> Strategy:
    d = phi(decode(code.children[0]))
    if d.kind != DecompKind.CASE or not 1 <= code.params[0] <= len(d.args):
        raise DecompositionError(f"No argument {code.params[0]} in a {d.kind.value} decomposition")
    return d.args[code.params[0] - 1]


def _decode_answer(code: CombinatorCode) -> Strategy:
    d = phi(decode(code.children[0]))
    if d.kind != DecompKind.CASE:
        raise DecompositionError(f"No answers in a {d.kind.value} decomposition")
    return d.answer(int(code.params[0]))


register_decoder("phi_arg", _decode_arg)
register_decoder("phi_answer", _decode_answer)


def _recurry(strategy: Strategy, count: int) -> Strategy:
    for _ in range(count):
        strategy = Lambda(strategy)
    return strategy


# ============================================
# APPROXIMANTS AND READBACK
# ============================================

def p_k(k: int, sigma: Strategy, engine: Optional[Engine] = None) -> Strategy:
    """
    The k-th approximant of sigma, rebuilt from truncated components.

    p_0 is ⊥; at level k a case keeps the answers n < k and truncates its
    arguments and answers at level k-1.
    """
    types0, ty = split_hom(sigma.game)
    extra = len(arg_types(ty))
    d = phi(sigma) if k > 0 else None
    types = types0 + arg_types(ty)
    if d is None or d.kind == DecompKind.BOTTOM:
        body = bottom(hom_game(types, N))
    elif d.kind == DecompKind.CONST:
        body = constant(hom_game(types, N), d.value)
    else:
        body = case_construct(
            types,
            d.position,
            [p_k(k - 1, a, engine) for a in d.args],
            [p_k(k - 1, d.answer(n), engine) for n in range(k)],
            engine,
        )
    result = _recurry(body, extra)
    result.name = f"p{k}({sigma.name})"
    result.code = CombinatorCode("p_k", (sigma.code,), (k,)) if sigma.code is not None else result.code
    return result


register_decoder("p_k", lambda code: p_k(int(code.params[0]), decode(code.children[0])))


def _named_binders(ctx: Context, ty: Type, names: Optional[Sequence[str]]) -> Tuple:
    """Binders for the arguments of ty, taking the given names first"""
    binders = fresh_binders(ctx, ty)
    if names:
        binders = tuple((name, t) for name, (_, t) in zip(names, binders)) + binders[len(names):]
    return binders


def eta_k(k: int, sigma: Strategy, ctx: Context = (), names: Optional[Sequence[str]] = None) -> FET:
    """
    Read sigma back as an evaluation tree of depth at most k.

    Args:
        k: Depth
        sigma: Strategy on !Γ ⊸ T
        ctx: Names and types of Γ
        names: Optional binder names for the arguments of T; fresh y<n> names otherwise
    """
    types0, ty = split_hom(sigma.game)
    if [t for _, t in ctx] != types0:
        raise DecompositionError("Readback context does not match the strategy's game")
    binders = _named_binders(ctx, ty, names)
    scope = list(ctx) + list(binders)
    if k == 0:
        return lam_ctx(binders, OMEGA)
    d = phi(sigma)
    if d.kind == DecompKind.BOTTOM:
        return lam_ctx(binders, OMEGA)
    if d.kind == DecompKind.CONST:
        return lam_ctx(binders, NumLeaf(d.value))
    head = scope[d.position - 1][0]
    args = [eta_k(k - 1, a, scope) for a in d.args]
    answers = {n: eta_k(k - 1, d.answer(n), scope) for n in range(k)}
    return lam_ctx(binders, case_node(head, args, answers))


def S_k(k: int, tree: FET, ctx: Context = (), ty: Type = N, engine: Optional[Engine] = None) -> Strategy:
    """Strategy of the depth-k truncation of an evaluation tree"""
    return denote_fet(ctx, q_k(k, tree), ty, engine)


def E_k(k: int, sigma: Strategy, ctx: Context = (), names: Optional[Sequence[str]] = None) -> FET:
    return eta_k(k, sigma, ctx, names)


def decomposition_tree(sigma: Strategy, depth: int, ctx: Context = (), names: Optional[Sequence[str]] = None) -> Dict:
    """Nested JSON-ready view of repeated decomposition down to `depth`"""
    _, ty = split_hom(sigma.game)
    binders = _named_binders(ctx, ty, names)
    scope = list(ctx) + list(binders)
    if depth == 0:
        return {"kind": "truncated"}
    d = phi(sigma)
    if d.kind == DecompKind.BOTTOM:
        return {"kind": "bottom"}
    if d.kind == DecompKind.CONST:
        return {"kind": "const", "n": d.value}
    return {
        "kind": "case",
        "position": d.position,
        "head": scope[d.position - 1][0],
        "args": [decomposition_tree(a, depth - 1, scope) for a in d.args],
        "answers": {str(n): decomposition_tree(d.answer(n), depth - 1, scope) for n in range(depth)},
    }


# ============================================
# RECURSIVE CODES
# ============================================

@dataclass
class DHB:
    """The D, H and B components of a code's decomposition"""
    D: Optional[Tuple[int, int]]
    H: Optional[List[StrategyCode]]
    B: Callable[[int], Optional[StrategyCode]]


def dhb(code: StrategyCode) -> DHB:
    """
    D = (2, n) | (3, i) | None, H = codes of the argument strategies of a
    case, B(n) = code of the n-th answer strategy.

    Raises:
        StrategyCodeError: Malformed code
    """
    d = phi(decode(code))
    if d.kind != DecompKind.CASE:
        return DHB(d.tag(), None, lambda n: None)
    args = [CombinatorCode("phi_arg", (code,), (j,)) for j in range(1, len(d.args) + 1)]
    return DHB(d.tag(), args, lambda n: CombinatorCode("phi_answer", (code,), (n,)))


@dataclass(frozen=True)
class Closure:
    """A strategy on !Γ ⊸ T together with one closure per variable of Γ"""
    strategy: Strategy
    env: Tuple["Closure", ...] = ()


@dataclass
class _Machine:
    depth: int
    dispatches: int = 0
    exhausted: bool = False

    def run(self, closure: Closure, args: Sequence[Closure], depth: int) -> Optional[int]:
        if depth <= 0:
            self.exhausted = True
            return None
        self.dispatches += 1
        d = phi(closure.strategy)
        env = closure.env + tuple(args)
        if d.kind == DecompKind.BOTTOM:
            return None
        if d.kind == DecompKind.CONST:
            return d.value
        head = env[d.position - 1]
        arg_closures = [Closure(a, env) for a in d.args]
        n = self.run(head, arg_closures, depth - 1)
        if n is None:
            return None
        return self.run(Closure(d.answer(n), env), (), depth - 1)


def _dispatch(
    sigma: Strategy,
    args: Sequence[Strategy],
    depth: int,
    diagnostics: Optional[Diagnostics] = None,
) -> Outcome:
    _, ty = split_hom(sigma.game)
    if len(arg_types(ty)) != len(args):
        raise DecompositionError(f"Expected {len(arg_types(ty))} arguments, got {len(args)}")
    machine = _Machine(depth)
    result = machine.run(Closure(sigma), [Closure(a) for a in args], depth)
    if result is None:
        spent = diagnostics is not None and diagnostics.exhausted > 0
        return Unresolved(machine.dispatches, machine.exhausted or spent)
    return Answer(result)


def apply_via_decomposition(code: StrategyCode, args: Sequence[StrategyCode], depth: int = 256) -> Outcome:
    """
    Apply a closed strategy to closed arguments by dispatching on its
    decompositions, keeping the arguments as an environment of closures.

    Returns:
        Answer(n), or Unresolved when a bottom is reached (fuel_exhausted False)
        or the dispatch depth runs out (fuel_exhausted True)
    """
    return _dispatch(decode(code), [decode(a) for a in args], depth)


# ============================================
# SIMULATION
# ============================================

def _preceq(k: int, a: Strategy, b: Strategy) -> bool:
    if k == 0:
        return True
    da = phi(a)
    if da.kind == DecompKind.BOTTOM:
        return True
    db = phi(b)
    if da.tag() != db.tag():
        return False
    if da.kind == DecompKind.CONST:
        return True
    return all(_preceq(k - 1, x, y) for x, y in zip(da.args, db.args)) and all(
        _preceq(k - 1, da.answer(n), db.answer(n)) for n in range(k)
    )


def preceq_k(k: int, a: StrategyCode, b: StrategyCode) -> bool:
    """Level-k simulation of code a by code b"""
    return _preceq(k, decode(a), decode(b))


def run_decomposed(
    t: Term,
    fuel: Fuel = Fuel(),
    depth: int = 256,
    bounds: Optional[Bounds] = None,
    pairing: Optional[Pairing] = None,
) -> Outcome:
    """
    Evaluate a closed ground program by applying the denotation of its head
    to the denotations of its arguments through apply_via_decomposition,
    deepening the unfolding of Y as run_game does.

    With bounds, each unfolding depth gets its own budget of
    bounds.max_steps exchanges; running out reads as Unresolved with
    fuel_exhausted set.
    """
    typecheck([], t)
    head, args = spine(t)
    outcome: Outcome = Unresolved(0, False)
    for y_depth in deepening_schedule(t, fuel):
        level = Fuel(y_depth)
        if bounds is None:
            code = denote([], head, level).code
            outcome = apply_via_decomposition(code, [denote([], a, level).code for a in args], depth)
        else:
            diagnostics = Diagnostics(budget=bounds.max_steps)
            engine = Engine(bounds.max_steps, pairing or default_engine().pairing, diagnostics)
            sigma = denote([], head, level, engine)
            outcome = _dispatch(sigma, [denote([], a, level, engine) for a in args], depth, diagnostics)
        if isinstance(outcome, Answer):
            logger.debug(f"✓ decomposition answered {outcome.n} at depth {y_depth}")
            return outcome
    return outcome
