"""
The semantic map from PCF terms-in-context to strategies.

Y[T] is interpreted through its syntactic approximants: before denoting, each
Y[T] is replaced by λf. f(f(…f(Ω[T]))) with the configured number of
applications. run_game deepens that number until the program answers.
"""
import logging
from dataclasses import dataclass, field
from typing import List, Optional

from .combinators import (
    Engine,
    Lambda,
    apply_morphism,
    bottom,
    case_construct,
    constant,
    default_engine,
    first_order,
    variable,
)
from .errors import PcfTypeError
from .game_core import Ans, Bounds, Move, Q, R, hom_game
from .pcf_lang import (
    FET,
    N,
    Answer,
    App,
    Arrow,
    CaseK,
    CaseNode,
    Context,
    If0,
    Lam,
    LamCtx,
    Num,
    NumLeaf,
    Omega,
    OmegaLeaf,
    Outcome,
    Pred,
    Succ,
    Term,
    Type,
    Unresolved,
    Var,
    Y,
    arg_types,
    contains_fix,
    lookup,
    parse,
    term_to_text,
    typecheck,
)
from .strategy import DenotationCode, Diagnostics, Strategy, probe, register_decoder

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Fuel:
    """Number of unfoldings used for every Y"""
    y_depth: int = 32

    def __post_init__(self):
        if self.y_depth < 0:
            raise ValueError(f"Fuel.y_depth must be non-negative, got {self.y_depth}")


def unfold_fix(t: Term, k: int) -> Term:
    """Replace every Y[T] by its k-th approximant λf:T→T. f^k(Ω[T])"""
    if isinstance(t, Y):
        body: Term = Omega(t.at)
        for _ in range(k):
            body = App(Var("f"), body)
        return Lam("f", Arrow(t.at, t.at), body)
    if isinstance(t, Lam):
        return Lam(t.name, t.ty, unfold_fix(t.body, k))
    if isinstance(t, App):
        return App(unfold_fix(t.fun, k), unfold_fix(t.arg, k))
    return t


def _types(ctx: Context) -> List[Type]:
    return [ty for _, ty in ctx]


def _denote(ctx: Context, t: Term, engine: Engine) -> Strategy:
    types = _types(ctx)
    if isinstance(t, Var):
        k = lookup(ctx, t.name)
        if k is None:
            raise PcfTypeError("Unbound variable", t.name)
        return variable(types, k + 1)
    if isinstance(t, Lam):
        return Lambda(_denote(list(ctx) + [(t.name, t.ty)], t.body, engine))
    if isinstance(t, App):
        return apply_morphism(_denote(ctx, t.fun, engine), _denote(ctx, t.arg, engine), engine)
    if isinstance(t, Num):
        return constant(hom_game(types, N), t.n)
    if isinstance(t, Succ):
        return first_order(types, "succ")
    if isinstance(t, Pred):
        return first_order(types, "pred")
    if isinstance(t, If0):
        return first_order(types, "if0")
    if isinstance(t, CaseK):
        return first_order(types, "case", t.k)
    if isinstance(t, Omega):
        return bottom(hom_game(types, t.at))
    raise PcfTypeError("Fixpoint left after unfolding", term_to_text(t))


def denote(env: Context, t: Term, fuel: Fuel = Fuel(), engine: Optional[Engine] = None) -> Strategy:
    """
    Strategy of a well-typed term in context `env`.

    Args:
        env: Ordered (name, type) pairs; the last pair is the innermost variable
        t: Term to interpret
        fuel: Unfolding depth for Y
        engine: Step budget and pairing used by the composites

    Raises:
        PcfTypeError: If t does not typecheck in env
    """
    typecheck(env, t)
    engine = engine if engine is not None else default_engine()
    strategy = _denote(env, unfold_fix(t, fuel.y_depth), engine)
    if not env:
        strategy.code = DenotationCode(term_to_text(t), fuel.y_depth)
    return strategy


register_decoder("denotation", lambda code: denote([], parse(code.term), Fuel(code.fuel)))


# ============================================
# RUNNING GROUND PROGRAMS
# ============================================

OPENING = Move((R,), Q)


@dataclass
class GameRun:
    """Outcome of a game-semantic run with the unfolding depth that settled it"""
    outcome: Outcome
    y_depth: int
    diagnostics: Diagnostics = field(default_factory=Diagnostics)

    def to_dict(self):
        return {"outcome": self.outcome.to_dict(), "y_depth": self.y_depth, "diagnostics": self.diagnostics.to_dict()}


def deepening_schedule(t: Term, fuel: Fuel) -> List[int]:
    """1, 2, 4, … up to fuel.y_depth; just [0] for terms without Y"""
    if not contains_fix(t):
        return [0]
    depths, k = [], 1
    while k < fuel.y_depth:
        depths.append(k)
        k *= 2
    depths.append(fuel.y_depth)
    return depths


def play_game(
    t: Term,
    fuel: Fuel,
    bounds: Bounds,
    pairing=None,
    log: Optional[List[str]] = None,
) -> GameRun:
    """
    Probe the denotation of a closed ground term with the opening question.

    Each unfolding depth gets its own budget of bounds.max_steps exchanges.
    """
    typecheck([], t)
    steps, exhausted = 0, False
    last = Diagnostics()
    for depth in deepening_schedule(t, fuel):
        diagnostics = Diagnostics(budget=bounds.max_steps, log=log)
        engine = Engine(bounds.max_steps, pairing or default_engine().pairing, diagnostics)
        response = probe(denote([], t, Fuel(depth), engine), OPENING)
        steps += diagnostics.steps
        exhausted = exhausted or diagnostics.exhausted > 0
        last = diagnostics
        if response is not None and isinstance(response.base, Ans):
            logger.debug(f"✓ answered {response.base.n} at depth {depth} after {diagnostics.steps} exchanges")
            return GameRun(Answer(response.base.n), depth, diagnostics)
    return GameRun(Unresolved(steps, exhausted), fuel.y_depth if contains_fix(t) else 0, last)


def run_game(t: Term, fuel: Fuel = Fuel(), bounds: Bounds = Bounds(), pairing=None) -> Outcome:
    """Answer(n) if the denotation of t answers n to the opening question, else Unresolved"""
    return play_game(t, fuel, bounds, pairing).outcome


# ============================================
# EVALUATION TREES
# ============================================

def denote_fet(env: Context, tree: FET, ty: Type = N, engine: Optional[Engine] = None) -> Strategy:
    """
    The map from evaluation trees to strategies: Ω to ⊥, n to K n, a case node
    to the case construct on its head variable, binders to co-Kleisli currying.
    """
    if isinstance(tree, LamCtx):
        binders, body = tree.binders, tree.body
    else:
        binders, body = (), tree
    if not binders and arg_types(ty):
        if not isinstance(body, OmegaLeaf):
            raise PcfTypeError("Evaluation tree at an arrow type needs binders")
        return bottom(hom_game(_types(env), ty))
    scope = list(env) + list(binders)
    types = _types(scope)
    if isinstance(body, OmegaLeaf):
        strategy = bottom(hom_game(types, N))
    elif isinstance(body, NumLeaf):
        strategy = constant(hom_game(types, N), body.n)
    elif isinstance(body, CaseNode):
        k = lookup(scope, body.head)
        if k is None:
            raise PcfTypeError("Unbound head variable", body.head)
        args = [denote_fet(scope, a, t, engine) for a, t in zip(body.args, arg_types(types[k]))]
        answers = [denote_fet(scope, body.answer(n), N, engine) for n in range(body.support)]
        strategy = case_construct(types, k + 1, args, answers, engine)
    else:
        raise PcfTypeError(f"Not an evaluation tree: {tree!r}")
    for _ in binders:
        strategy = Lambda(strategy)
    return strategy
