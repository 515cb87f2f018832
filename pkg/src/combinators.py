"""
Categorical structure on strategies.

Copycat strategies are described by Wirings, path-rewriting rules between
the two sides of a linear implication. Composition runs the execution
formula as a message-passing loop between the two strategies. Promotion
and the Family of answer strategies relocate copy indices through a
pairing function.
"""
import logging
import math
from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, Sequence, Tuple, Union

from lark import Lark, Transformer
from lark.exceptions import UnexpectedInput, VisitError

from .errors import BudgetExhausted, GameMismatchError, PcfSyntaxError, StrategyCodeError
from .game_core import (
    I,
    L,
    NAT,
    R,
    Ans,
    Bang,
    Comp,
    Family,
    GameExpr,
    Idx,
    Lolli,
    Move,
    Nat,
    Q,
    Tensor,
    With,
    ctx_game,
    ctx_path,
    format_move,
    game_from_text,
    game_of_type,
    game_to_text,
    hom_game,
)
from .pcf_lang import N, Arrow, Ground, Type, arg_types, arrow, parse_type, type_to_text
from .strategy import (
    BottomStrategy,
    CombinatorCode,
    Diagnostics,
    FunctionStrategy,
    Strategy,
    decode,
    register_decoder,
)

logger = logging.getLogger(__name__)


# ============================================
# PAIRING FUNCTIONS
# ============================================

class Pairing(ABC):
    """Injective map ω×ω ↣ ω used to relocate copy indices"""

    name = "abstract"

    @abstractmethod
    def pair(self, i: int, j: int) -> int:
        pass

    @abstractmethod
    def unpair(self, k: int) -> Optional[Tuple[int, int]]:
        """Inverse of pair, or None when k is not in its image"""
        pass


class CantorPairing(Pairing):
    name = "cantor"

    def pair(self, i: int, j: int) -> int:
        return (i + j) * (i + j + 1) // 2 + j

    def unpair(self, k: int) -> Optional[Tuple[int, int]]:
        w = (math.isqrt(8 * k + 1) - 1) // 2
        j = k - w * (w + 1) // 2
        return w - j, j


class GammaPairing(Pairing):
    """
    Prefix-code pairing: the low bits of k hold an Elias-gamma code of i+1
    (N zero bits, a one bit, then the N low bits of i+1), the high bits hold j.

    Index magnitudes grow linearly in j, so nested promotions stay small.
    """

    name = "gamma"

    def pair(self, i: int, j: int) -> int:
        x = i + 1
        width = x.bit_length() - 1
        code = (1 << width) | ((x & ((1 << width) - 1)) << (width + 1))
        return code | (j << (2 * width + 1))

    def unpair(self, k: int) -> Optional[Tuple[int, int]]:
        if k <= 0:
            return None
        width = (k & -k).bit_length() - 1
        low = (k >> (width + 1)) & ((1 << width) - 1)
        return ((1 << width) | low) - 1, k >> (2 * width + 1)


PAIRINGS: Dict[str, Callable[[], Pairing]] = {
    "cantor": CantorPairing,
    "gamma": GammaPairing,
}


def get_pairing(name: str) -> Pairing:
    if name not in PAIRINGS:
        raise ValueError(f"Unknown pairing {name!r}; choose from {sorted(PAIRINGS)}")
    return PAIRINGS[name]()


@dataclass
class Engine:
    """Step budget, pairing function (Cantor unless given) and shared diagnostics of a construction"""
    max_steps: int = 100000
    pairing: Pairing = field(default_factory=CantorPairing)
    diagnostics: Diagnostics = field(default_factory=Diagnostics)


# process-wide engine; matches the default Config.pairing until Config.apply() replaces it
_DEFAULT_ENGINE = Engine(pairing=GammaPairing())


def default_engine() -> Engine:
    return _DEFAULT_ENGINE


def set_default_engine(engine: Engine) -> None:
    global _DEFAULT_ENGINE
    _DEFAULT_ENGINE = engine


def _engine(engine: Optional[Engine]) -> Engine:
    return engine if engine is not None else _DEFAULT_ENGINE


def _coded(strategy: Strategy, tag: str, children: Sequence[Strategy] = (), params: Sequence = ()) -> Strategy:
    """Attach a combinator code when every child carries one"""
    codes = tuple(c.code for c in children)
    if all(c is not None for c in codes):
        strategy.code = CombinatorCode(tag, codes, tuple(params))
    return strategy


def _short(name: str, limit: int = 48) -> str:
    return name if len(name) <= limit else name[: limit - 1] + "…"


def _lolli(strategy: Strategy, what: str) -> Lolli:
    if not isinstance(strategy.game, Lolli):
        raise GameMismatchError(f"{what} needs a strategy on a linear implication, got {strategy.game}")
    return strategy.game


# ============================================
# WIRINGS
# ============================================

@dataclass(frozen=True)
class Slot:
    """Index variable of a pattern: matches Idx(scale*i + offset) and binds i"""
    scale: int = 1
    offset: int = 0

    def match(self, tag) -> Optional[int]:
        if not isinstance(tag, Idx) or tag.i < self.offset or (tag.i - self.offset) % self.scale:
            return None
        return (tag.i - self.offset) // self.scale

    def emit(self, i: int) -> Idx:
        return Idx(self.scale * i + self.offset)


ANY = Slot()
EVEN = Slot(2, 0)
ODD = Slot(2, 1)

Pattern = Tuple[Union[str, Idx, Comp, Slot], ...]


def _match(pattern: Pattern, path: Tuple) -> Optional[Tuple[Optional[int], Tuple]]:
    if len(path) < len(pattern):
        return None
    bound = None
    for p, tag in zip(pattern, path):
        if isinstance(p, Slot):
            bound = p.match(tag)
            if bound is None:
                return None
        elif p != tag:
            return None
    return bound, path[len(pattern):]


def _emit(pattern: Pattern, bound: Optional[int], rest: Tuple) -> Tuple:
    return tuple(p.emit(bound) if isinstance(p, Slot) else p for p in pattern) + rest


@dataclass(frozen=True)
class Wiring:
    """
    Partial injective move translation given as prefix-rewriting rules.

    Each rule (a, b) rewrites a path starting with pattern a into one
    starting with b, carrying a bound index across when both use a Slot.
    """
    rules: Tuple[Tuple[Pattern, Pattern], ...]

    def _rewrite(self, move: Move, forward: bool) -> Optional[Move]:
        for a, b in self.rules:
            source, target = (a, b) if forward else (b, a)
            hit = _match(source, move.path)
            if hit is not None:
                bound, rest = hit
                return Move(_emit(target, bound, rest), move.base)
        return None

    def forward(self, move: Move) -> Optional[Move]:
        return self._rewrite(move, True)

    def backward(self, move: Move) -> Optional[Move]:
        return self._rewrite(move, False)

    def link(self, move: Move) -> Optional[Move]:
        """Copy a move across the wiring in whichever direction applies"""
        result = self.forward(move)
        return result if result is not None else self.backward(move)

    def inverse(self) -> "Wiring":
        return Wiring(tuple((b, a) for a, b in self.rules))


class Copycat(Strategy):
    """Strategy that copies each Opponent move across a wiring"""

    def __init__(self, game: GameExpr, wiring: Wiring, name: str = "copycat"):
        super().__init__(game, name)
        self.wiring = wiring

    def respond(self, move: Move) -> Optional[Move]:
        return self.wiring.link(move)


class Retagged(Strategy):
    """`inner` seen through a wiring from this game's moves to the inner game's moves"""

    def __init__(self, inner: Strategy, game: GameExpr, wiring: Wiring, name: str = "retagged"):
        super().__init__(game, name)
        self.inner = inner
        self.wiring = wiring

    def respond(self, move: Move) -> Optional[Move]:
        inner_move = self.wiring.forward(move)
        if inner_move is None:
            return None
        response = self.inner.next_move(inner_move)
        return None if response is None else self.wiring.backward(response)


IDENTITY_WIRING = Wiring((((R,), (L,)),))


def identity(game: GameExpr) -> Strategy:
    """Copycat on game ⊸ game"""
    return _coded(Copycat(Lolli(game, game), IDENTITY_WIRING, "id"), "id", params=(game_to_text(game),))


# ============================================
# COMPOSITION
# ============================================

class Composite(Strategy):
    """
    sigma;tau on A ⊸ C by the execution formula.

    An Opponent move in A goes to sigma, one in C to tau. Moves in the
    middle game B bounce between them until one exits into A or C, one side
    has no response, or the step budget runs out.
    """

    def __init__(self, sigma: Strategy, tau: Strategy, engine: Engine):
        left, right = _lolli(sigma, "compose"), _lolli(tau, "compose")
        if left.right != right.left:
            raise GameMismatchError(f"Cannot compose through {left.right} and {right.left}")
        super().__init__(Lolli(left.left, right.right), _short(f"({sigma.name};{tau.name})"))
        self.sigma = sigma
        self.tau = tau
        self.engine = engine

    def respond(self, move: Move) -> Optional[Move]:
        return self.interaction(move)[0]

    def interaction(self, move: Move) -> Tuple[Optional[Move], List[Move]]:
        """Visible response to `move` and the middle-game moves exchanged on the way"""
        diag = self.engine.diagnostics
        middle: List[Move] = []
        in_sigma = move.head == L
        m = move
        for _ in range(self.engine.max_steps):
            current = self.sigma if in_sigma else self.tau
            r = current.next_move(m)
            if diag.log is not None:
                diag.note(f"{current.name}: {format_move(m)} -> {format_move(r) if r else '∅'}")
            if r is None:
                diag.record(len(middle), False)
                return None, middle
            exit_side = L if in_sigma else R
            if r.head == exit_side:
                diag.record(len(middle), False)
                return r, middle
            # sigma's R is tau's L and vice versa
            m = Move((exit_side,) + r.path[1:], r.base)
            in_sigma = not in_sigma
            middle.append(m.strip())
            if not diag.spend():
                diag.record(len(middle), True)
                logger.debug(f"Global budget spent inside {self.name}: {diag.to_dict()}")
                raise BudgetExhausted(diag.steps)
        diag.record(len(middle), True)
        logger.debug(f"{self.name} exhausted {self.engine.max_steps} exchanges on {format_move(move)}")
        raise BudgetExhausted(self.engine.max_steps)


def compose(sigma: Strategy, tau: Strategy, engine: Optional[Engine] = None) -> Strategy:
    return _coded(Composite(sigma, tau, _engine(engine)), "compose", (sigma, tau))


def compose_all(strategies: Sequence[Strategy], engine: Optional[Engine] = None) -> Strategy:
    """Left-to-right composite of a non-empty chain"""
    result = strategies[0]
    for s in strategies[1:]:
        result = compose(result, s, engine)
    return result


# ============================================
# MULTIPLICATIVES
# ============================================

class TensorStrategy(Strategy):
    def __init__(self, sigma: Strategy, tau: Strategy):
        left, right = _lolli(sigma, "tensor"), _lolli(tau, "tensor")
        super().__init__(
            Lolli(Tensor(left.left, right.left), Tensor(left.right, right.right)),
            f"({sigma.name}⊗{tau.name})",
        )
        self.sigma = sigma
        self.tau = tau

    def respond(self, move: Move) -> Optional[Move]:
        if len(move.path) < 2:
            return None
        side = move.path[1]
        target = self.sigma if side == L else self.tau
        r = target.next_move(Move((move.path[0],) + move.path[2:], move.base))
        return None if r is None else Move((r.path[0], side) + r.path[1:], r.base)


def tensor(sigma: Strategy, tau: Strategy) -> Strategy:
    return _coded(TensorStrategy(sigma, tau), "tensor", (sigma, tau))


CURRY_WIRING = Wiring((((L,), (L, L)), ((R, L), (L, R)), ((R, R), (R,))))
UNCURRY_WIRING = Wiring((((L, L), (L,)), ((L, R), (R, L)), ((R,), (R, R))))


def curry(sigma: Strategy) -> Strategy:
    """(A⊗B)⊸C to A⊸(B⊸C) by re-tagging"""
    game = _lolli(sigma, "curry")
    if not isinstance(game.left, Tensor):
        raise GameMismatchError(f"curry needs (A⊗B)⊸C, got {game}")
    target = Lolli(game.left.left, Lolli(game.left.right, game.right))
    return _coded(Retagged(sigma, target, CURRY_WIRING, f"Λ{sigma.name}"), "curry", (sigma,))


def uncurry(sigma: Strategy) -> Strategy:
    game = _lolli(sigma, "uncurry")
    if not isinstance(game.right, Lolli):
        raise GameMismatchError(f"uncurry needs A⊸(B⊸C), got {game}")
    target = Lolli(Tensor(game.left, game.right.left), game.right.right)
    return _coded(Retagged(sigma, target, UNCURRY_WIRING, f"Λ⁻¹{sigma.name}"), "uncurry", (sigma,))


def linear_app(a: GameExpr, b: GameExpr) -> Strategy:
    """Application ((A⊸B)⊗A)⊸B: output demands go to the function, its input demands to the argument"""
    wiring = Wiring((((R,), (L, L, R)), ((L, L, L), (L, R))))
    game = Lolli(Tensor(Lolli(a, b), a), b)
    return _coded(Copycat(game, wiring, "app"), "lapp", params=(game_to_text(a), game_to_text(b)))


def unit_left(game: GameExpr) -> Strategy:
    """I⊗A ⊸ A"""
    wiring = Wiring((((R,), (L, R)),))
    return _coded(Copycat(Lolli(Tensor(I, game), game), wiring, "unitl"), "unit_left", params=(game_to_text(game),))


def unit_right(game: GameExpr) -> Strategy:
    """A⊗I ⊸ A"""
    wiring = Wiring((((R,), (L, L)),))
    return _coded(Copycat(Lolli(Tensor(game, I), game), wiring, "unitr"), "unit_right", params=(game_to_text(game),))


def unit_right_inv(game: GameExpr) -> Strategy:
    """A ⊸ A⊗I"""
    wiring = Wiring((((R, L), (L,)),))
    return _coded(
        Copycat(Lolli(game, Tensor(game, I)), wiring, "unitr⁻¹"), "unit_right_inv", params=(game_to_text(game),)
    )


def assoc(a: GameExpr, b: GameExpr, c: GameExpr) -> Strategy:
    """(A⊗B)⊗C ⊸ A⊗(B⊗C)"""
    wiring = Wiring((((R, L), (L, L, L)), ((R, R, L), (L, L, R)), ((R, R, R), (L, R))))
    game = Lolli(Tensor(Tensor(a, b), c), Tensor(a, Tensor(b, c)))
    return _coded(Copycat(game, wiring, "assoc"), "assoc", params=tuple(game_to_text(g) for g in (a, b, c)))


def symm(a: GameExpr, b: GameExpr) -> Strategy:
    """A⊗B ⊸ B⊗A"""
    wiring = Wiring((((R, L), (L, R)), ((R, R), (L, L))))
    game = Lolli(Tensor(a, b), Tensor(b, a))
    return _coded(Copycat(game, wiring, "symm"), "symm", params=(game_to_text(a), game_to_text(b)))


# ============================================
# EXPONENTIALS
# ============================================

def der(game: GameExpr, index: int = 0) -> Strategy:
    """Dereliction !A ⊸ A through copy `index`"""
    wiring = Wiring((((R,), (L, Idx(index))),))
    return _coded(
        Copycat(Lolli(Bang(game), game), wiring, f"der{index}"), "der", params=(game_to_text(game), index)
    )


def weak(game: GameExpr) -> Strategy:
    """!A ⊸ I; the empty strategy"""
    return _coded(BottomStrategy(Lolli(Bang(game), I)), "weak", params=(game_to_text(game),))


def con(game: GameExpr) -> Strategy:
    """Contraction !A ⊸ !A⊗!A, tagging left copies 2i and right copies 2i+1"""
    wiring = Wiring((((R, L, ANY), (L, EVEN)), ((R, R, ANY), (L, ODD))))
    target = Lolli(Bang(game), Tensor(Bang(game), Bang(game)))
    return _coded(Copycat(target, wiring, "con"), "con", params=(game_to_text(game),))


class Promotion(Strategy):
    """
    σ† on !A ⊸ !B for σ on !A ⊸ B.

    Target copy i runs its own instance of σ; that instance's source copy j
    is relocated to source copy pair(i, j).
    """

    def __init__(self, sigma: Strategy, pairing: Pairing):
        game = _lolli(sigma, "promote")
        if not isinstance(game.left, Bang):
            raise GameMismatchError(f"promote needs !A⊸B, got {game}")
        super().__init__(Lolli(game.left, Bang(game.right)), f"{sigma.name}†")
        self.sigma = sigma
        self.pairing = pairing

    def respond(self, move: Move) -> Optional[Move]:
        if len(move.path) < 2 or not isinstance(move.path[1], Idx):
            return None
        k = move.path[1].i
        if move.head == R:
            thread, inner = k, Move((R,) + move.path[2:], move.base)
        else:
            unpaired = self.pairing.unpair(k)
            if unpaired is None:
                return None
            thread, j = unpaired
            inner = Move((L, Idx(j)) + move.path[2:], move.base)
        r = self.sigma.next_move(inner)
        if r is None:
            return None
        if r.head == R:
            return Move((R, Idx(thread)) + r.path[1:], r.base)
        return Move((L, Idx(self.pairing.pair(thread, r.path[1].i))) + r.path[2:], r.base)


def promote(sigma: Strategy, engine: Optional[Engine] = None) -> Strategy:
    pairing = _engine(engine).pairing
    return _coded(Promotion(sigma, pairing), "promote", (sigma,), (pairing.name,))


def exp_iso(a: GameExpr, b: GameExpr, direction: str = "fwd") -> Strategy:
    """
    The isomorphism between !(A&B) and !A⊗!B.

    fwd lives on !A⊗!B ⊸ !(A&B) and keeps indices; bwd lives on
    !(A&B) ⊸ !A⊗!B and sends copy i of !A to 2i and of !B to 2i+1.
    """
    if direction == "fwd":
        wiring = Wiring((((R, ANY, L), (L, L, ANY)), ((R, ANY, R), (L, R, ANY))))
        game = Lolli(Tensor(Bang(a), Bang(b)), Bang(With(a, b)))
    elif direction == "bwd":
        wiring = Wiring((((R, L, ANY), (L, EVEN, L)), ((R, R, ANY), (L, ODD, R))))
        game = Lolli(Bang(With(a, b)), Tensor(Bang(a), Bang(b)))
    else:
        raise ValueError(f"exp_iso direction must be fwd or bwd, got {direction!r}")
    return _coded(
        Copycat(game, wiring, f"e_{direction}"), f"exp_{direction}", params=(game_to_text(a), game_to_text(b))
    )


# ============================================
# PRODUCTS AND THE CO-KLEISLI CATEGORY
# ============================================

def fst(a: GameExpr, b: GameExpr) -> Strategy:
    wiring = Wiring((((R,), (L, L)),))
    return _coded(Copycat(Lolli(With(a, b), a), wiring, "fst"), "fst", params=(game_to_text(a), game_to_text(b)))


def snd(a: GameExpr, b: GameExpr) -> Strategy:
    wiring = Wiring((((R,), (L, R)),))
    return _coded(Copycat(Lolli(With(a, b), b), wiring, "snd"), "snd", params=(game_to_text(a), game_to_text(b)))


def proj(a: GameExpr, b: GameExpr, side: int, engine: Optional[Engine] = None) -> Strategy:
    """Co-Kleisli projection !(A&B) ⊸ A (side 1) or B (side 2)"""
    pick = fst(a, b) if side == 1 else snd(a, b)
    return compose(der(With(a, b)), pick, engine)


def kleisli_compose(sigma: Strategy, tau: Strategy, engine: Optional[Engine] = None) -> Strategy:
    """σ on !A⊸B then τ on !B⊸C, as σ†;τ"""
    return compose(promote(sigma, engine), tau, engine)


def pair(sigma: Strategy, tau: Strategy, engine: Optional[Engine] = None) -> Strategy:
    """⟨σ,τ⟩ = con ; (σ†⊗τ†) ; e ; der on !C ⊸ A&B"""
    left, right = _lolli(sigma, "pair"), _lolli(tau, "pair")
    if left.left != right.left or not isinstance(left.left, Bang):
        raise GameMismatchError(f"pair needs strategies on a common !C, got {left.left} and {right.left}")
    a, b = left.right, right.right
    chain = [
        con(left.left.inner),
        tensor(promote(sigma, engine), promote(tau, engine)),
        exp_iso(a, b, "fwd"),
        der(With(a, b)),
    ]
    return compose_all(chain, engine)


def apply_morphism(gamma: Strategy, delta: Strategy, engine: Optional[Engine] = None) -> Strategy:
    """Ap∘⟨γ,δ⟩ = con ; (γ⊗δ†) ; App on !C ⊸ B for γ on !C⊸(!A⊸B) and δ on !C⊸A"""
    game = _lolli(gamma, "apply")
    if not isinstance(game.right, Lolli) or not isinstance(game.right.left, Bang):
        raise GameMismatchError(f"apply needs a function strategy on !C⊸(!A⊸B), got {game}")
    if _lolli(delta, "apply") != Lolli(game.left, game.right.left.inner):
        raise GameMismatchError(f"Argument {delta.game} does not fit {game}")
    chain = [
        con(game.left.inner),
        tensor(gamma, promote(delta, engine)),
        linear_app(game.right.left, game.right.right),
    ]
    return compose_all(chain, engine)


def Lambda(sigma: Strategy) -> Strategy:
    """
    Co-Kleisli currying of σ on !(C&A)⊸B to !C⊸(!A⊸B).

    Move-for-move the same as curry(e_fwd;σ).
    """
    game = _lolli(sigma, "Lambda")
    if not (isinstance(game.left, Bang) and isinstance(game.left.inner, With)):
        raise GameMismatchError(f"Lambda needs !(C&A)⊸B, got {game}")
    c, a = game.left.inner.left, game.left.inner.right
    wiring = Wiring((((L, ANY), (L, ANY, L)), ((R, L, ANY), (L, ANY, R)), ((R, R), (R,))))
    target = Lolli(Bang(c), Lolli(Bang(a), game.right))
    return _coded(Retagged(sigma, target, wiring, f"λ{sigma.name}"), "lambda", (sigma,))


def unlambda(tau: Strategy) -> Strategy:
    """Inverse of Lambda up to ≈; move-for-move e_bwd;uncurry(τ)"""
    game = _lolli(tau, "unlambda")
    if not (isinstance(game.left, Bang) and isinstance(game.right, Lolli) and isinstance(game.right.left, Bang)):
        raise GameMismatchError(f"unlambda needs !C⊸(!A⊸B), got {game}")
    c, a = game.left.inner, game.right.left.inner
    wiring = Wiring((((L, EVEN, L), (L, ANY)), ((L, ODD, R), (R, L, ANY)), ((R,), (R, R))))
    target = Lolli(Bang(With(c, a)), game.right.right)
    return _coded(Retagged(tau, target, wiring, f"λ⁻¹{tau.name}"), "unlambda", (tau,))


def as_point(sigma: Strategy) -> Strategy:
    """View σ on !I⊸A as I⊸A; the two games have the same moves"""
    game = _lolli(sigma, "as_point")
    wiring = Wiring((((R,), (R,)),))
    return _coded(Retagged(sigma, Lolli(I, game.right), wiring, sigma.name), "as_point", (sigma,))


def variable(types: Sequence[Type], position: int) -> Strategy:
    """
    Projection onto variable `position` (1-based) of a context: der followed
    by the With-projections down the context chain.
    """
    if not 1 <= position <= len(types):
        raise GameMismatchError(f"No variable {position} in a context of {len(types)}")
    wiring = Wiring((((R,), (L, Idx(0)) + ctx_path(len(types), position)),))
    game = hom_game(types, types[position - 1])
    return _coded(
        Copycat(game, wiring, f"π{position}"), "var", params=(tuple(type_to_text(t) for t in types), position)
    )


# ============================================
# NAMED STRATEGIES
# ============================================

def opening_path(game: GameExpr) -> Tuple:
    """Path of the opening question of a game built from Nat by ⊸"""
    path: Tuple = ()
    while isinstance(game, Lolli):
        path += (R,)
        game = game.right
    if not isinstance(game, Nat):
        raise GameMismatchError(f"{game} does not end in Nat")
    return path


def bottom(game: GameExpr) -> Strategy:
    return _coded(BottomStrategy(game), "bottom", params=(game_to_text(game),))


class ConstantStrategy(Strategy):
    """K n: answers the opening question with n"""

    def __init__(self, game: GameExpr, n: int):
        super().__init__(game, f"K{n}")
        self.n = n
        self.path = opening_path(game)

    def respond(self, move: Move) -> Optional[Move]:
        if move.path == self.path and move.is_question:
            return Move(self.path, Ans(self.n))
        return None


def constant(game: GameExpr, n: int) -> Strategy:
    return _coded(ConstantStrategy(game, n), "K", params=(game_to_text(game), n))


def numeral(n: int) -> Strategy:
    """n̄ on I ⊸ Nat"""
    return constant(Lolli(I, NAT), n)


ARITHMETIC: Dict[str, Callable[[int], Optional[int]]] = {
    "succ": lambda n: n + 1,
    "pred": lambda n: max(n - 1, 0),
}


def arithmetic(name: str) -> Strategy:
    """σ^f on Nat ⊸ Nat: ask the input, answer f of it"""
    f = ARITHMETIC[name]

    def respond(move: Move) -> Optional[Move]:
        if move.path == (R,) and move.is_question:
            return Move((L,), Q)
        if move.path == (L,) and isinstance(move.base, Ans):
            value = f(move.base.n)
            return None if value is None else Move((R,), Ans(value))
        return None

    return _coded(FunctionStrategy(Lolli(NAT, NAT), respond, name), "arith", params=(name,))


FIRST_ORDER_ARITY = {"succ": 1, "pred": 1, "if0": 3}


def first_order_type(name: str, k: int = 0) -> Type:
    arity = k + 1 if name == "case" else FIRST_ORDER_ARITY[name]
    return arrow(*([N] * (arity + 1)))


class FirstOrderStrategy(Strategy):
    """
    A first-order constant in a context: interrogate the first argument,
    then either answer or interrogate the selected argument and copy its answer.
    """

    def __init__(self, types: Sequence[Type], name: str, k: int = 0):
        super().__init__(hom_game(types, first_order_type(name, k)), name if name != "case" else f"case{k}")
        self.kind = name
        self.k = k
        self.arity = k + 1 if name == "case" else FIRST_ORDER_ARITY[name]
        self.result = (R,) * (self.arity + 1)

    def _arg(self, a: int) -> Tuple:
        return (R,) * (a + 1) + (L, Idx(0))

    def _select(self, n: int) -> Optional[Union[int, Move]]:
        if self.kind == "succ":
            return Move(self.result, Ans(n + 1))
        if self.kind == "pred":
            return Move(self.result, Ans(max(n - 1, 0)))
        if self.kind == "if0":
            return 1 if n == 0 else 2
        return n + 1 if n < self.k else None

    def respond(self, move: Move) -> Optional[Move]:
        if move.path == self.result:
            return Move(self._arg(0), Q) if move.is_question else None
        if not isinstance(move.base, Ans):
            return None
        if move.path == self._arg(0):
            chosen = self._select(move.base.n)
            if chosen is None or isinstance(chosen, Move):
                return chosen
            return Move(self._arg(chosen), Q)
        for a in range(1, self.arity):
            if move.path == self._arg(a):
                return Move(self.result, move.base)
        return None


def first_order(types: Sequence[Type], name: str, k: int = 0) -> Strategy:
    """succ, pred, if0 or case_k as a strategy in context `types`"""
    if name != "case" and name not in FIRST_ORDER_ARITY:
        raise StrategyCodeError(f"Unknown first-order constant {name!r}")
    return _coded(
        FirstOrderStrategy(types, name, k), "const", params=(tuple(type_to_text(t) for t in types), name, k)
    )


FAMILY_GAME = Family(NAT)
CHI_A_GAME = Lolli(Tensor(NAT, FAMILY_GAME), NAT)


def chi_a() -> Strategy:
    """Ask the first input for n, then ask the n-th component of the family and copy its answer"""

    def respond(move: Move) -> Optional[Move]:
        if move.path == (R,) and move.is_question:
            return Move((L, L), Q)
        if move.path == (L, L) and isinstance(move.base, Ans):
            return Move((L, R, Comp(move.base.n)), Q)
        if len(move.path) == 3 and move.path[:2] == (L, R) and isinstance(move.base, Ans):
            return Move((R,), move.base)
        return None

    return _coded(FunctionStrategy(CHI_A_GAME, respond, "χa"), "chi_a")


def chi(engine: Optional[Engine] = None) -> Strategy:
    """χ on !(Nat & Nat^ω) ⊸ Nat through e and dereliction"""
    return compose_all(
        [exp_iso(NAT, FAMILY_GAME, "bwd"), tensor(der(NAT), der(FAMILY_GAME)), chi_a()],
        engine,
    )


class FamilyStrategy(Strategy):
    """⟨τ_n⟩ on !C ⊸ Nat^ω; context copies of τ_n are relocated through pair(n, ·)"""

    def __init__(self, context: GameExpr, answers: Callable[[int], Strategy], pairing: Pairing, inner: GameExpr = NAT):
        super().__init__(Lolli(Bang(context), Family(inner)), "⟨τ⟩")
        self.answers = answers
        self.pairing = pairing
        self._members: Dict[int, Strategy] = {}

    def member(self, n: int) -> Strategy:
        with self._lock:
            if n not in self._members:
                self._members[n] = self.answers(n)
            return self._members[n]

    def respond(self, move: Move) -> Optional[Move]:
        if len(move.path) < 2:
            return None
        tag = move.path[1]
        if move.head == R and isinstance(tag, Comp):
            n, inner = tag.n, Move((R,) + move.path[2:], move.base)
        elif move.head == L and isinstance(tag, Idx):
            unpaired = self.pairing.unpair(tag.i)
            if unpaired is None:
                return None
            n, j = unpaired
            inner = Move((L, Idx(j)) + move.path[2:], move.base)
        else:
            return None
        r = self.member(n).next_move(inner)
        if r is None:
            return None
        if r.head == R:
            return Move((R, Comp(n)) + r.path[1:], r.base)
        return Move((L, Idx(self.pairing.pair(n, r.path[1].i))) + r.path[2:], r.base)


def family(
    types: Sequence[Type],
    answers: Sequence[Strategy],
    engine: Optional[Engine] = None,
) -> Strategy:
    """
    The family n ↦ answers[n], ⊥ beyond the given list, on !Γ ⊸ Nat^ω.
    """
    context = ctx_game(types)
    fallback = bottom(hom_game(types, N))
    members = list(answers)
    strategy = FamilyStrategy(context, lambda n: members[n] if n < len(members) else fallback, _engine(engine).pairing)
    return _coded(
        strategy, "family", members, (tuple(type_to_text(t) for t in types), _engine(engine).pairing.name)
    )


def head_application(types: Sequence[Type], position: int, args: Sequence[Strategy], engine: Optional[Engine] = None) -> Strategy:
    """Ap(…Ap(π_i, σ_1)…, σ_l) on !Γ ⊸ Nat"""
    head_args = arg_types(types[position - 1])
    if len(head_args) != len(args):
        raise GameMismatchError(f"Variable {position} takes {len(head_args)} arguments, got {len(args)}")
    result = variable(types, position)
    for a in args:
        result = apply_morphism(result, a, engine)
    return result


def case_construct(
    types: Sequence[Type],
    position: int,
    args: Sequence[Strategy],
    answers: Sequence[Strategy],
    engine: Optional[Engine] = None,
) -> Strategy:
    """
    C_i(σ_1, …, σ_l, (τ_n)) = χ ∘ ⟨Ap(…Ap(π_i, σ_1)…, σ_l), ⟨τ_n⟩⟩ on !Γ ⊸ Nat.

    `answers` lists τ_0 … τ_{m-1}; later answers are ⊥.
    """
    head = head_application(types, position, args, engine)
    tupled = pair(head, family(types, answers, engine), engine)
    result = kleisli_compose(tupled, chi(engine), engine)
    result.name = f"C{position}"
    return _coded(
        result, "case", list(args) + list(answers),
        (tuple(type_to_text(t) for t in types), position, len(args)),
    )


def tuple_of(types: Sequence[Type], components: Sequence[Strategy], engine: Optional[Engine] = None) -> Strategy:
    """⟨σ_1, …, σ_l⟩ on !Γ ⊸ (I & B_1 & … & B_l), left nested like a context"""
    result = bottom(Lolli(Bang(ctx_game(types)), I))
    for c in components:
        result = pair(result, c, engine)
    return result


def uncurry_iso(head_type: Type) -> Strategy:
    """!(B_1 ⇒ … ⇒ B_l ⇒ Nat) ⊸ (!(I & B_1 & … & B_l) ⊸ Nat), one curried call per tuple"""
    params = arg_types(head_type)
    rules: List[Tuple[Pattern, Pattern]] = [((R, R), (L, Idx(0)) + (R,) * len(params))]
    for j in range(1, len(params) + 1):
        rules.append(((R, L, ANY) + ctx_path(len(params), j), (L, Idx(0)) + (R,) * (j - 1) + (L, ANY)))
    game = Lolli(Bang(game_of_type(head_type)), Lolli(Bang(ctx_game(params)), NAT))
    return _coded(Copycat(game, Wiring(tuple(rules)), "α"), "uncurry_iso", params=(type_to_text(head_type),))


def case_construct_tupled(
    types: Sequence[Type],
    position: int,
    args: Sequence[Strategy],
    answers: Sequence[Strategy],
    engine: Optional[Engine] = None,
) -> Strategy:
    """Č_i: the head variable applied once, uncurried, to the tuple of its arguments"""
    head_type = types[position - 1]
    head = kleisli_compose(variable(types, position), uncurry_iso(head_type), engine)
    applied = apply_morphism(head, tuple_of(types, args, engine), engine)
    result = kleisli_compose(pair(applied, family(types, answers, engine), engine), chi(engine), engine)
    result.name = f"Č{position}"
    return result


# ============================================
# DECODERS
# ============================================

def _games(code: CombinatorCode) -> List[GameExpr]:
    return [game_from_text(p) for p in code.params]


def _types(texts: Sequence[str]) -> List[Type]:
    return [parse_type(t) for t in texts]


def _children(code: CombinatorCode) -> List[Strategy]:
    return [decode(c) for c in code.children]


def _engine_for(name: str) -> Engine:
    engine = default_engine()
    if engine.pairing.name == name:
        return engine
    return Engine(engine.max_steps, get_pairing(name), engine.diagnostics)


register_decoder("id", lambda c: identity(*_games(c)))
register_decoder("compose", lambda c: compose(*_children(c)))
register_decoder("tensor", lambda c: tensor(*_children(c)))
register_decoder("curry", lambda c: curry(*_children(c)))
register_decoder("uncurry", lambda c: uncurry(*_children(c)))
register_decoder("lapp", lambda c: linear_app(*_games(c)))
register_decoder("unit_left", lambda c: unit_left(*_games(c)))
register_decoder("unit_right", lambda c: unit_right(*_games(c)))
register_decoder("unit_right_inv", lambda c: unit_right_inv(*_games(c)))
register_decoder("assoc", lambda c: assoc(*_games(c)))
register_decoder("symm", lambda c: symm(*_games(c)))
register_decoder("der", lambda c: der(game_from_text(c.params[0]), int(c.params[1])))
register_decoder("weak", lambda c: weak(*_games(c)))
register_decoder("con", lambda c: con(*_games(c)))
register_decoder("promote", lambda c: promote(*_children(c), engine=_engine_for(c.params[0])))
register_decoder("exp_fwd", lambda c: exp_iso(*_games(c), direction="fwd"))
register_decoder("exp_bwd", lambda c: exp_iso(*_games(c), direction="bwd"))
register_decoder("fst", lambda c: fst(*_games(c)))
register_decoder("snd", lambda c: snd(*_games(c)))
register_decoder("lambda", lambda c: Lambda(*_children(c)))
register_decoder("unlambda", lambda c: unlambda(*_children(c)))
register_decoder("as_point", lambda c: as_point(*_children(c)))
register_decoder("var", lambda c: variable(_types(c.params[0]), int(c.params[1])))
register_decoder("bottom", lambda c: bottom(*_games(c)))
register_decoder("K", lambda c: constant(game_from_text(c.params[0]), int(c.params[1])))
register_decoder("arith", lambda c: arithmetic(c.params[0]))
register_decoder("const", lambda c: first_order(_types(c.params[0]), c.params[1], int(c.params[2])))
register_decoder("chi_a", lambda c: chi_a())
register_decoder("family", lambda c: family(_types(c.params[0]), _children(c), _engine_for(c.params[1])))
register_decoder("uncurry_iso", lambda c: uncurry_iso(parse_type(c.params[0])))
register_decoder(
    "case",
    lambda c: case_construct(
        _types(c.params[0]), int(c.params[1]),
        _children(c)[: int(c.params[2])], _children(c)[int(c.params[2]):],
    ),
)


# ============================================
# EXPRESSION LANGUAGE
# ============================================

EXPRESSION_GRAMMAR = r"""
    ?start: expr

    expr: NAME "(" [arg ("," arg)*] ")"

    ?arg: expr
        | INT -> number
        | type

    ?type: atype
         | atype "->" type -> arrow
    ?atype: "N" -> ground
          | "(" type ")"

    NAME: /[a-z_][a-z0-9_]*/

    %import common.INT
    %import common.WS
    %ignore WS
"""

_ONE_STRATEGY = {
    "promote": promote, "curry": curry, "uncurry": uncurry,
    "lambda": Lambda, "unlambda": unlambda,
}
_TWO_STRATEGIES = {
    "compose": compose, "tensor": tensor, "pair": pair,
    "kleisli": kleisli_compose, "apply": apply_morphism,
}
_ONE_GAME = {
    "id": identity, "weak": weak, "con": con, "bottom": bottom,
    "unit_left": unit_left, "unit_right": unit_right,
}
_TWO_GAMES = {
    "app": linear_app, "fst": fst, "snd": snd, "symm": symm,
    "exp_fwd": lambda a, b: exp_iso(a, b, "fwd"),
    "exp_bwd": lambda a, b: exp_iso(a, b, "bwd"),
}


class ToStrategy(Transformer):
    """Builds strategies bottom-up; type arguments stand for their games"""

    def __init__(self, engine: Optional[Engine] = None):
        super().__init__()
        self.engine = engine

    def ground(self, _):
        return N

    def arrow(self, items):
        return arrow(items[0], items[1])

    def number(self, items):
        return int(items[0])

    def expr(self, items):
        name, args = str(items[0]), [a for a in items[1:] if a is not None]
        games = [game_of_type(a) if isinstance(a, (Ground, Arrow)) else a for a in args]
        if name in _ONE_STRATEGY and len(args) == 1:
            return _ONE_STRATEGY[name](args[0]) if name != "promote" else promote(args[0], self.engine)
        if name in _TWO_STRATEGIES and len(args) == 2:
            fn = _TWO_STRATEGIES[name]
            return fn(args[0], args[1]) if fn is tensor else fn(args[0], args[1], self.engine)
        if name in _ONE_GAME and len(args) == 1:
            return _ONE_GAME[name](games[0])
        if name in _TWO_GAMES and len(args) == 2:
            return _TWO_GAMES[name](games[0], games[1])
        if name == "der" and len(args) in (1, 2):
            return der(games[0], args[1] if len(args) == 2 else 0)
        if name == "numeral" and len(args) == 1:
            return numeral(args[0])
        if name == "const" and len(args) == 2:
            return constant(games[0], args[1])
        if name in ARITHMETIC and not args:
            return arithmetic(name)
        if name == "chi_a" and not args:
            return chi_a()
        if name == "chi" and not args:
            return chi(self.engine)
        raise StrategyCodeError(f"Unknown combinator {name}/{len(args)}")


_expression_parser = Lark(EXPRESSION_GRAMMAR, parser="lalr")


def parse_expression(text: str, engine: Optional[Engine] = None) -> Strategy:
    """
    Build a strategy from an expression such as `compose(promote(der(N)), der(N))`.

    Raises:
        PcfSyntaxError: If the text does not parse
        StrategyCodeError: For unknown combinators or wrong arities
    """
    try:
        tree = _expression_parser.parse(text)
    except UnexpectedInput as e:
        raise PcfSyntaxError("Unexpected input in expression", e.line, e.column) from e
    try:
        return ToStrategy(engine).transform(tree)
    except VisitError as e:
        if isinstance(e.orig_exc, (GameMismatchError, StrategyCodeError)):
            raise e.orig_exc from e
        raise
