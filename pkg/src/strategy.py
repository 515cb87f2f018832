"""
History-free strategies as executable next-move functions.

Every strategy answers `next_move(m)` for Opponent moves m of its game.
Strategies built from explicit position sets also keep those positions.
`traces` explores the plays a strategy admits within Bounds, and
`strat_subeq` checks the bounded partial preorder between two strategies.
"""
import json
import logging
import threading
from abc import ABC, abstractmethod
from collections import OrderedDict, deque
from dataclasses import dataclass, field
from typing import Callable, Dict, Iterable, List, Optional, Sequence, Set, Tuple, Union

from .errors import BudgetExhausted, GameMismatchError, StrategyCodeError
from .game_core import (
    Ans,
    Bounds,
    GameExpr,
    Move,
    Player,
    Position,
    audit_enabled,
    audit_position,
    candidate_o_moves,
    format_move,
    game_from_text,
    game_to_text,
    legal_position,
    parse_move,
    player_of,
    pos_equiv,
    position_key,
)

logger = logging.getLogger(__name__)


# ============================================
# STRATEGY CODES
# ============================================

@dataclass(frozen=True)
class ExplicitFinite:
    """Finite strategy given by its sorted even-length positions"""
    game: GameExpr
    positions: Tuple[Position, ...]

    def to_dict(self) -> Dict:
        return {
            "kind": "finite",
            "game": json.loads(game_to_text(self.game)),
            "positions": [[format_move(m) for m in s] for s in self.positions],
        }


@dataclass(frozen=True)
class DenotationCode:
    """Denotation of a closed term, with the Y unfolding depth"""
    term: str
    fuel: int

    def to_dict(self) -> Dict:
        return {"kind": "denotation", "term": self.term, "fuel": self.fuel}


@dataclass(frozen=True)
class CombinatorCode:
    """A combinator tag applied to child codes and primitive parameters"""
    tag: str
    children: Tuple["StrategyCode", ...] = ()
    params: Tuple = ()

    def to_dict(self) -> Dict:
        return {
            "kind": "comb",
            "tag": self.tag,
            "children": [c.to_dict() for c in self.children],
            "params": list(self.params),
        }


StrategyCode = Union[ExplicitFinite, DenotationCode, CombinatorCode]


def code_from_dict(data: Dict) -> StrategyCode:
    """
    Rebuild a code from its JSON form.

    Raises:
        StrategyCodeError: If the dictionary is not a code
    """
    try:
        kind = data["kind"]
        if kind == "finite":
            game = game_from_text(json.dumps(data["game"]))
            positions = tuple(tuple(parse_move(m) for m in s) for s in data["positions"])
            return ExplicitFinite(game, tuple(sorted(positions, key=position_key)))
        if kind == "denotation":
            return DenotationCode(data["term"], int(data["fuel"]))
        if kind == "comb":
            return CombinatorCode(
                data["tag"],
                tuple(code_from_dict(c) for c in data.get("children", [])),
                tuple(_freeze(p) for p in data.get("params", [])),
            )
    except (KeyError, TypeError, ValueError) as e:
        raise StrategyCodeError(f"Malformed strategy code: {e}") from e
    raise StrategyCodeError(f"Unknown strategy code kind: {data.get('kind')!r}")


def _freeze(value):
    return tuple(_freeze(v) for v in value) if isinstance(value, list) else value


def code_to_json(code: StrategyCode) -> str:
    return json.dumps(code.to_dict(), sort_keys=True)


def code_from_json(text: str) -> StrategyCode:
    return code_from_dict(json.loads(text))


# ============================================
# STRATEGIES
# ============================================

@dataclass
class Diagnostics:
    """Counters shared by the composites of one construction"""
    steps: int = 0
    exhausted: int = 0
    longest: int = 0
    budget: Optional[int] = None
    log: Optional[List[str]] = None
    lock: threading.Lock = field(default_factory=threading.Lock, repr=False)

    def spend(self, count: int = 1) -> bool:
        """Charge `count` exchanges; False once the shared budget is gone"""
        with self.lock:
            self.steps += count
            return self.budget is None or self.steps <= self.budget

    def record(self, length: int, exhausted: bool) -> None:
        with self.lock:
            self.longest = max(self.longest, length)
            if exhausted:
                self.exhausted += 1

    def note(self, line: str) -> None:
        """Append to the interaction log when one is being kept"""
        if self.log is not None:
            with self.lock:
                self.log.append(line)

    def to_dict(self) -> Dict:
        return {"steps": self.steps, "exhausted": self.exhausted, "longest": self.longest, "budget": self.budget}


class Strategy(ABC):
    """
    Abstract base class for history-free strategies.

    Subclasses implement respond(); next_move() adds memoization and, when
    the position audit is on, checks that it is only probed with O-moves.
    """

    def __init__(self, game: GameExpr, name: str = "", code: Optional[StrategyCode] = None):
        self.game = game
        self.name = name or type(self).__name__
        self.code = code
        self._cache: Dict[Move, Optional[Move]] = {}
        self._lock = threading.Lock()

    @abstractmethod
    def respond(self, move: Move) -> Optional[Move]:
        """Player's response to the Opponent move, or None"""
        pass

    def next_move(self, move: Move) -> Optional[Move]:
        with self._lock:
            if move in self._cache:
                return self._cache[move]
        if audit_enabled() and player_of(self.game, move) != Player.O:
            raise GameMismatchError(f"{self.name} probed with a Player move {format_move(move)}")
        result = self.respond(move)
        with self._lock:
            return self._cache.setdefault(move, result)

    def with_code(self, code: StrategyCode) -> "Strategy":
        self.code = code
        return self

    def __repr__(self) -> str:
        return f"{type(self).__name__}(name={self.name!r}, game={self.game})"


class FunctionStrategy(Strategy):
    """Strategy whose responses come from a plain function"""

    def __init__(self, game: GameExpr, fn: Callable[[Move], Optional[Move]], name: str = "", code=None):
        super().__init__(game, name, code)
        self.fn = fn

    def respond(self, move: Move) -> Optional[Move]:
        return self.fn(move)


class BottomStrategy(Strategy):
    """The strategy {ε}"""

    def __init__(self, game: GameExpr, code=None):
        super().__init__(game, "bottom", code)

    def respond(self, move: Move) -> Optional[Move]:
        return None


class FiniteStrategy(Strategy):
    """
    Strategy given by an explicit finite set of even-length positions.

    The response table pairs each O-move with the P-move following it in
    some position; two different responses to the same O-move violate
    history-freedom.
    """

    def __init__(self, game: GameExpr, positions: Iterable[Sequence[Move]], name: str = "finite"):
        normalized = {tuple(s) for s in positions}
        normalized.add(())
        ordered = tuple(sorted(normalized, key=position_key))
        super().__init__(game, name, ExplicitFinite(game, ordered))
        self.positions = ordered
        self.table: Dict[Move, Move] = {}
        witness: Dict[Move, Position] = {}
        for s in ordered:
            if len(s) % 2:
                raise StrategyCodeError(f"Odd-length position {[format_move(m) for m in s]}")
            if not legal_position(game, s):
                raise StrategyCodeError(f"Illegal position {[format_move(m) for m in s]} in {game}")
            for k in range(0, len(s), 2):
                a, b = s[k], s[k + 1]
                if self.table.setdefault(a, b) != b:
                    raise StrategyCodeError(
                        f"Not history-free: {format_move(a)} answered by both "
                        f"{format_move(self.table[a])} and {format_move(b)}",
                        offending=(witness[a], tuple(s[:k + 2])),
                    )
                witness.setdefault(a, tuple(s[:k + 2]))

    def respond(self, move: Move) -> Optional[Move]:
        return self.table.get(move)

    def sufficient_bounds(self, slack: int = 1) -> Bounds:
        """Bounds large enough to explore every position of the explicit set"""
        numerals = [m.base.n for s in self.positions for m in s if isinstance(m.base, Ans)]
        indices = [getattr(t, "i", getattr(t, "n", 0)) for s in self.positions for m in s for t in m.path if not isinstance(t, str)]
        longest = max((len(s) for s in self.positions), default=0)
        return Bounds(
            max_nat=max(numerals, default=0) + slack,
            max_index=max(indices, default=0) + slack,
            max_len=longest + 2,
        )


# ============================================
# TRACES AND THE PREORDER
# ============================================

def probe(strategy: Strategy, move: Move) -> Optional[Move]:
    """next_move with step-budget exhaustion read as no response"""
    try:
        return strategy.next_move(move)
    except BudgetExhausted as e:
        logger.debug(f"{strategy.name}: no response to {format_move(move)} within {e.steps} exchanges")
        return None


def traces(strategy: Strategy, bounds: Bounds) -> Set[Position]:
    """
    Breadth-first enumeration of the even-length plays of `strategy`.

    Opponent moves are drawn from candidate_o_moves under `bounds`; a
    response that would make the play illegal is not recorded.
    """
    game = strategy.game
    result: Set[Position] = {()}
    frontier = deque([()])
    while frontier:
        s = frontier.popleft()
        if len(s) + 2 > bounds.max_len:
            continue
        for a in candidate_o_moves(game, s, bounds):
            b = probe(strategy, a)
            if b is None:
                continue
            t = s + (a, b)
            if not legal_position(game, t):
                audit_position(game, t)
                logger.debug(f"{strategy.name}: dropped illegal response {format_move(b)}")
                continue
            audit_position(game, t)
            if t not in result:
                result.add(t)
                frontier.append(t)
    return result


def materialize(strategy: Strategy, bounds: Bounds, name: str = "") -> FiniteStrategy:
    """Explicit finite strategy with the plays of `strategy` inside `bounds`"""
    return FiniteStrategy(strategy.game, traces(strategy, bounds), name or f"{strategy.name}@bounds")


def strat_subeq(sigma: Strategy, tau: Strategy, bounds: Bounds) -> bool:
    """
    Bounded check of sigma ⊂≈ tau.

    Walks pairs (s, s') with s ≈ s', s a play of sigma and s' a play of tau.
    Every O-move a' making s'a' ≈ sa must be answered by tau with some b'
    such that sab ≈ s'a'b'.
    """
    if sigma.game != tau.game:
        raise GameMismatchError(f"Cannot compare strategies on {sigma.game} and {tau.game}")
    game = sigma.game
    seen: Set[Tuple[Position, Position]] = {((), ())}
    frontier = deque([((), ())])
    while frontier:
        s, s2 = frontier.popleft()
        if len(s) + 2 > bounds.max_len:
            continue
        candidates = candidate_o_moves(game, s2, bounds)
        for a in candidate_o_moves(game, s, bounds):
            b = probe(sigma, a)
            if b is None or not legal_position(game, s + (a, b)):
                continue
            sab = s + (a, b)
            for a2 in candidates:
                if not pos_equiv(game, s + (a,), s2 + (a2,)):
                    continue
                b2 = probe(tau, a2)
                if b2 is None:
                    logger.debug(f"⊂≈ fails: {tau.name} has no response to {format_move(a2)}")
                    return False
                t = s2 + (a2, b2)
                if not legal_position(game, t) or not pos_equiv(game, sab, t):
                    logger.debug(f"⊂≈ fails: {format_move(b)} vs {format_move(b2)}")
                    return False
                if (sab, t) not in seen:
                    seen.add((sab, t))
                    frontier.append((sab, t))
    return True


def strat_equiv(sigma: Strategy, tau: Strategy, bounds: Bounds) -> bool:
    return strat_subeq(sigma, tau, bounds) and strat_subeq(tau, sigma, bounds)


def explicit_subset(sigma: Strategy, tau: Strategy, bounds: Bounds) -> bool:
    """Plain inclusion of bounded trace sets"""
    return traces(sigma, bounds) <= traces(tau, bounds)


# ============================================
# DECODING
# ============================================

Decoder = Callable[[StrategyCode], Strategy]
_DECODERS: Dict[str, Decoder] = {}
# least recently decoded codes are dropped first
DECODE_CACHE_SIZE = 4096
_DECODED: "OrderedDict[StrategyCode, Strategy]" = OrderedDict()
_DECODE_LOCK = threading.RLock()


def register_decoder(tag: str, decoder: Decoder) -> None:
    """Register the decoder of a combinator tag, or of the "denotation" kind"""
    _DECODERS[tag] = decoder


def decode(code: StrategyCode) -> Strategy:
    """
    Turn a code into a strategy; decoded strategies are shared per code
    while the code stays among the DECODE_CACHE_SIZE most recent.

    Raises:
        StrategyCodeError: Malformed code or an unregistered combinator tag
    """
    with _DECODE_LOCK:
        if code in _DECODED:
            _DECODED.move_to_end(code)
            return _DECODED[code]
    if isinstance(code, ExplicitFinite):
        strategy: Strategy = FiniteStrategy(code.game, code.positions)
        strategy.code = code
    elif isinstance(code, DenotationCode):
        decoder = _DECODERS.get("denotation")
        if decoder is None:
            raise StrategyCodeError("No decoder registered for denotations")
        strategy = decoder(code)
    elif isinstance(code, CombinatorCode):
        decoder = _DECODERS.get(code.tag)
        if decoder is None:
            raise StrategyCodeError(f"Unknown combinator tag {code.tag!r}")
        strategy = decoder(code)
    else:
        raise StrategyCodeError(f"Not a strategy code: {code!r}")
    if strategy.code is None:
        strategy.code = code
    with _DECODE_LOCK:
        strategy = _DECODED.setdefault(code, strategy)
        while len(_DECODED) > DECODE_CACHE_SIZE:
            _DECODED.popitem(last=False)
        return strategy


def encode(strategy: Strategy) -> StrategyCode:
    if strategy.code is None:
        raise StrategyCodeError(f"{strategy.name} carries no code")
    return strategy.code
