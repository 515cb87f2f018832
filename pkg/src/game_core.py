"""
Games as structural expressions.

A game is described by a GameExpr tree (I, Nat, Sigma, Tensor, Lolli, With,
Bang and the lazily indexed With-family Family). Moves are paths into that
tree plus a base move; labelling, legality of positions and the position
equivalence are all computed structurally from the tree.
"""
import json
import logging
import threading
from dataclasses import dataclass, field
from enum import Enum
from functools import lru_cache
from typing import Dict, Iterator, List, Optional, Sequence, Tuple, Union

from .errors import GameMismatchError, IllegalPositionError
from .pcf_lang import Arrow, Ground, Type

logger = logging.getLogger(__name__)


# ============================================
# MOVES
# ============================================

L = "L"
R = "R"


@dataclass(frozen=True)
class Idx:
    """Copy index at a Bang node"""
    i: int

    def __str__(self) -> str:
        return f"{self.i}!"


@dataclass(frozen=True)
class Comp:
    """Component index at a Family node"""
    n: int

    def __str__(self) -> str:
        return f"{self.n}~"


Tag = Union[str, Idx, Comp]


@dataclass(frozen=True)
class Question:
    def __str__(self) -> str:
        return "Q"


@dataclass(frozen=True)
class Ans:
    n: int

    def __str__(self) -> str:
        return f"Ans({self.n})"


Q = Question()
BaseMove = Union[Question, Ans]


@dataclass(frozen=True)
class Move:
    """A tagged path into a game plus a base move"""
    path: Tuple[Tag, ...]
    base: BaseMove

    def under(self, *tags: Tag) -> "Move":
        return Move(tuple(tags) + self.path, self.base)

    def strip(self, count: int = 1) -> "Move":
        return Move(self.path[count:], self.base)

    @property
    def head(self) -> Optional[Tag]:
        return self.path[0] if self.path else None

    @property
    def is_question(self) -> bool:
        return isinstance(self.base, Question)

    def __str__(self) -> str:
        return format_move(self)


def mv(*parts) -> Move:
    """mv(R, Idx(0), Q) builds Move((R, Idx(0)), Q)"""
    *tags, base = parts
    return Move(tuple(tags), base)


Position = Tuple[Move, ...]


class Player(str, Enum):
    P = "P"
    O = "O"


class Kind(str, Enum):
    QUESTION = "Q"
    ANSWER = "A"


# ============================================
# GAME EXPRESSIONS
# ============================================

class GameExpr:
    """Base class of the structural game description"""

    def to_json(self):
        raise NotImplementedError


@dataclass(frozen=True)
class Unit(GameExpr):
    def __str__(self) -> str:
        return "I"

    def to_json(self):
        return "I"


@dataclass(frozen=True)
class Nat(GameExpr):
    def __str__(self) -> str:
        return "N"

    def to_json(self):
        return "N"


@dataclass(frozen=True)
class Sigma(GameExpr):
    def __str__(self) -> str:
        return "S"

    def to_json(self):
        return "S"


@dataclass(frozen=True)
class Tensor(GameExpr):
    left: GameExpr
    right: GameExpr

    def __str__(self) -> str:
        return f"({self.left} * {self.right})"

    def to_json(self):
        return {"tensor": [self.left.to_json(), self.right.to_json()]}


@dataclass(frozen=True)
class Lolli(GameExpr):
    left: GameExpr
    right: GameExpr

    def __str__(self) -> str:
        return f"({self.left} -o {self.right})"

    def to_json(self):
        return {"lolli": [self.left.to_json(), self.right.to_json()]}


@dataclass(frozen=True)
class With(GameExpr):
    left: GameExpr
    right: GameExpr

    def __str__(self) -> str:
        return f"({self.left} & {self.right})"

    def to_json(self):
        return {"with": [self.left.to_json(), self.right.to_json()]}


@dataclass(frozen=True)
class Bang(GameExpr):
    inner: GameExpr

    def __str__(self) -> str:
        return f"!{self.inner}"

    def to_json(self):
        return {"bang": self.inner.to_json()}


@dataclass(frozen=True)
class Family(GameExpr):
    """Countable With-family; component n is addressed by Comp(n)"""
    inner: GameExpr

    def __str__(self) -> str:
        return f"{self.inner}^w"

    def to_json(self):
        return {"family": self.inner.to_json()}


I = Unit()
NAT = Nat()
SIGMA = Sigma()

_BINARY = {"tensor": Tensor, "lolli": Lolli, "with": With}


def game_from_json(data) -> GameExpr:
    if data == "I":
        return I
    if data == "N":
        return NAT
    if data == "S":
        return SIGMA
    if isinstance(data, dict) and len(data) == 1:
        (key, value), = data.items()
        if key in _BINARY:
            return _BINARY[key](game_from_json(value[0]), game_from_json(value[1]))
        if key == "bang":
            return Bang(game_from_json(value))
        if key == "family":
            return Family(game_from_json(value))
    raise GameMismatchError(f"Not a game description: {data!r}")


def game_to_text(game: GameExpr) -> str:
    return json.dumps(game.to_json(), separators=(",", ":"))


def game_from_text(text: str) -> GameExpr:
    return game_from_json(json.loads(text))


# ============================================
# LABELLING
# ============================================

def subgame(game: GameExpr, path: Sequence[Tag]) -> Tuple[GameExpr, bool]:
    """Follow `path` into `game`; returns the addressed subgame and whether P/O is flipped"""
    flipped = False
    g = game
    for tag in path:
        if isinstance(g, (Tensor, With)) and tag in (L, R):
            g = g.left if tag == L else g.right
        elif isinstance(g, Lolli) and tag in (L, R):
            if tag == L:
                flipped = not flipped
                g = g.left
            else:
                g = g.right
        elif isinstance(g, Bang) and isinstance(tag, Idx):
            g = g.inner
        elif isinstance(g, Family) and isinstance(tag, Comp):
            g = g.inner
        else:
            raise GameMismatchError(f"Tag {tag} does not address {g}")
    return g, flipped


@lru_cache(maxsize=200000)
def label(game: GameExpr, move: Move) -> Tuple[Player, Kind]:
    """
    Label a move of `game`.

    Args:
        game: The game the move belongs to
        move: Path-tagged move

    Returns:
        (Player, Kind) pair

    Raises:
        GameMismatchError: If the path or base move does not fit the game
    """
    g, flipped = subgame(game, move.path)
    if isinstance(g, Nat):
        pass
    elif isinstance(g, Sigma):
        if isinstance(move.base, Ans) and move.base.n != 0:
            raise GameMismatchError(f"Sigma only answers Ans(0), got {move}")
    else:
        raise GameMismatchError(f"Move {move} stops at non-atomic game {g}")

    if isinstance(move.base, Question):
        player, kind = Player.O, Kind.QUESTION
    else:
        player, kind = Player.P, Kind.ANSWER
    if flipped:
        player = Player.P if player == Player.O else Player.O
    return player, kind


def player_of(game: GameExpr, move: Move) -> Player:
    return label(game, move)[0]


# ============================================
# LEGALITY
# ============================================

def _labels(game: GameExpr, s: Sequence[Move]) -> Optional[List[Tuple[Player, Kind]]]:
    try:
        return [label(game, m) for m in s]
    except GameMismatchError:
        return None


def _alternating_bracketed(s: Sequence[Move], labels: List[Tuple[Player, Kind]]) -> bool:
    # (p1) Opponent opens, (p2) strict alternation, (p3) bracketing with the stack discipline
    stack: List[int] = []
    for k, (move, (player, kind)) in enumerate(zip(s, labels)):
        expected = Player.O if k % 2 == 0 else Player.P
        if player != expected:
            return False
        if kind == Kind.QUESTION:
            stack.append(k)
        else:
            if not stack:
                return False
            j = stack.pop()
            if s[j].path != move.path or labels[j][0] == player:
                return False
    return True


def _projections_legal(game: GameExpr, s: Sequence[Move]) -> bool:
    if not s:
        return True
    if isinstance(game, (Nat, Sigma)):
        if len(s) > 2 or not s[0].is_question:
            return False
        return len(s) == 1 or not s[1].is_question
    if isinstance(game, Unit):
        return False
    if isinstance(game, (Tensor, Lolli, With)):
        heads = {m.path[0] for m in s}
        if isinstance(game, With) and len(heads) > 1:
            return False
        return all(
            _legal(game.left if side == L else game.right, [m.strip() for m in s if m.path[0] == side])
            for side in heads
        )
    if isinstance(game, (Bang, Family)):
        groups: Dict[Tag, List[Move]] = {}
        for m in s:
            groups.setdefault(m.path[0], []).append(m.strip())
        if isinstance(game, Family) and len(groups) > 1:
            return False
        return all(_legal(game.inner, group) for group in groups.values())
    return False


def _legal(game: GameExpr, s: Sequence[Move]) -> bool:
    labels = _labels(game, s)
    if labels is None:
        return False
    if not _alternating_bracketed(s, labels):
        return False
    return _projections_legal(game, s)


def legal_position(game: GameExpr, s: Sequence[Move]) -> bool:
    """
    Check (p1)-(p3), the projection conditions and the stack discipline.

    Every component restriction must itself be a legal position of the
    component game; With and Family positions stay inside one component.
    """
    return _legal(game, s)


def switching_ok(game: GameExpr, s: Sequence[Move]) -> bool:
    """Component switches are made by Opponent in a Tensor and by Player in a Lolli"""
    if not s or isinstance(game, (Nat, Sigma, Unit)):
        return True
    labels = _labels(game, s)
    if labels is None:
        return False
    if isinstance(game, (Tensor, Lolli)):
        switcher = Player.O if isinstance(game, Tensor) else Player.P
        for k in range(1, len(s)):
            if s[k].path[0] != s[k - 1].path[0] and labels[k][0] != switcher:
                return False
        return all(
            switching_ok(sub, [m.strip() for m in s if m.path[0] == side])
            for side, sub in ((L, game.left), (R, game.right))
        )
    if isinstance(game, With):
        return all(
            switching_ok(sub, [m.strip() for m in s if m.path[0] == side])
            for side, sub in ((L, game.left), (R, game.right))
        )
    groups: Dict[Tag, List[Move]] = {}
    for m in s:
        groups.setdefault(m.path[0], []).append(m.strip())
    return all(switching_ok(game.inner, group) for group in groups.values())


# ============================================
# POSITION EQUIVALENCE
# ============================================

def _equiv(game: GameExpr, s: Sequence[Move], t: Sequence[Move]) -> bool:
    if len(s) != len(t):
        return False
    if not s:
        return True
    if isinstance(game, (Nat, Sigma, Unit)):
        return list(s) == list(t)
    if isinstance(game, (Tensor, Lolli, With)):
        if [m.path[0] for m in s] != [m.path[0] for m in t]:
            return False
        return all(
            _equiv(sub, [m.strip() for m in s if m.path[0] == side], [m.strip() for m in t if m.path[0] == side])
            for side, sub in ((L, game.left), (R, game.right))
        )
    if isinstance(game, Family):
        if [m.path[0] for m in s] != [m.path[0] for m in t]:
            return False
        comps = {m.path[0] for m in s}
        return all(
            _equiv(game.inner, [m.strip() for m in s if m.path[0] == c], [m.strip() for m in t if m.path[0] == c])
            for c in comps
        )
    if isinstance(game, Bang):
        # the index traces determine the permutation; it must be a consistent bijection
        forward: Dict[Tag, Tag] = {}
        backward: Dict[Tag, Tag] = {}
        for a, b in zip(s, t):
            i, j = a.path[0], b.path[0]
            if forward.setdefault(i, j) != j or backward.setdefault(j, i) != i:
                return False
        return all(
            _equiv(game.inner, [m.strip() for m in s if m.path[0] == i], [m.strip() for m in t if m.path[0] == j])
            for i, j in forward.items()
        )
    return False


def pos_equiv(game: GameExpr, s: Sequence[Move], t: Sequence[Move]) -> bool:
    """
    Position equivalence.

    Identity at atomic games, component-wise with equal component traces at
    binary connectives, and at Bang a bijection between occurring indices that
    transports the index trace of s onto that of t.
    """
    try:
        return _equiv(game, s, t)
    except (AttributeError, TypeError):
        return False


# ============================================
# TYPES AND CONTEXTS
# ============================================

def game_of_type(t: Type) -> GameExpr:
    if isinstance(t, Ground):
        return NAT
    return Lolli(Bang(game_of_type(t.dom)), game_of_type(t.cod))


def type_of_game(game: GameExpr) -> Type:
    if isinstance(game, Nat):
        return Ground()
    if isinstance(game, Lolli) and isinstance(game.left, Bang):
        return Arrow(type_of_game(game.left.inner), type_of_game(game.right))
    raise GameMismatchError(f"{game} is not the game of a PCF type")


def ctx_game(types: Sequence[Type]) -> GameExpr:
    """Left-nested With-chain: [] -> I, Γ,T -> With(ctx_game Γ, game T)"""
    g: GameExpr = I
    for t in types:
        g = With(g, game_of_type(t))
    return g


def ctx_types(game: GameExpr) -> List[Type]:
    types: List[Type] = []
    while isinstance(game, With):
        types.append(type_of_game(game.right))
        game = game.left
    if not isinstance(game, Unit):
        raise GameMismatchError(f"{game} is not a context game")
    return list(reversed(types))


def ctx_path(size: int, position: int) -> Tuple[str, ...]:
    """Path of variable `position` (1-based) inside a context chain of `size` entries"""
    return (L,) * (size - position) + (R,)


def hom_game(types: Sequence[Type], t: Type) -> GameExpr:
    return Lolli(Bang(ctx_game(types)), game_of_type(t))


def split_hom(game: GameExpr) -> Tuple[List[Type], Type]:
    """Inverse of hom_game"""
    if not (isinstance(game, Lolli) and isinstance(game.left, Bang)):
        raise GameMismatchError(f"{game} is not a hom-game of PCF types")
    return ctx_types(game.left.inner), type_of_game(game.right)


def well_opened(game: GameExpr) -> bool:
    if isinstance(game, (Nat, Sigma, Unit)):
        return True
    if isinstance(game, With):
        return well_opened(game.left) and well_opened(game.right)
    if isinstance(game, Lolli):
        return well_opened(game.right)
    if isinstance(game, Family):
        return well_opened(game.inner)
    return False


# ============================================
# BOUNDS AND MOVE ENUMERATION
# ============================================

@dataclass(frozen=True)
class Bounds:
    """Finite limits for exploring infinite move alphabets"""
    max_nat: int = 8
    max_index: int = 8
    max_len: int = 64
    max_steps: int = 100000

    def __post_init__(self):
        for name in ("max_nat", "max_index", "max_len", "max_steps"):
            if getattr(self, name) <= 0:
                raise ValueError(f"Bounds.{name} must be positive, got {getattr(self, name)}")


def _question_moves(
    game: GameExpr,
    want: Player,
    s: Sequence[Move],
    bounds: Bounds,
) -> Iterator[Move]:
    if isinstance(game, (Nat, Sigma)):
        if want == Player.O:
            yield Move((), Q)
        return
    if isinstance(game, (Tensor, With, Lolli)):
        for side, sub in ((L, game.left), (R, game.right)):
            flipped = isinstance(game, Lolli) and side == L
            sub_want = (Player.P if want == Player.O else Player.O) if flipped else want
            proj = [m.strip() for m in s if m.path[0] == side]
            for m in _question_moves(sub, sub_want, proj, bounds):
                yield m.under(side)
        return
    if isinstance(game, (Bang, Family)):
        make = Idx if isinstance(game, Bang) else Comp
        limit = bounds.max_index if isinstance(game, Bang) else bounds.max_nat
        occurring = [m.path[0] for m in s]
        tags = list(dict.fromkeys(occurring + [make(k) for k in range(limit + 1)]))
        for tag in tags:
            proj = [m.strip() for m in s if m.path[0] == tag]
            for m in _question_moves(game.inner, want, proj, bounds):
                yield m.under(tag)


def _pending_question(game: GameExpr, s: Sequence[Move]) -> Optional[Move]:
    stack: List[Move] = []
    for m in s:
        if m.is_question:
            stack.append(m)
        elif stack:
            stack.pop()
    return stack[-1] if stack else None


def candidate_moves(game: GameExpr, s: Sequence[Move], bounds: Bounds, player: Player) -> List[Move]:
    """
    Legal next moves for `player` after `s`, with numerals and fresh indices
    limited by `bounds`. Occurring indices are always offered.
    """
    result: List[Move] = []
    pending = _pending_question(game, s)
    if pending is not None:
        try:
            owner = player_of(game, pending)
        except GameMismatchError:
            owner = None
        if owner is not None and owner != player:
            atom, _ = subgame(game, pending.path)
            top = 0 if isinstance(atom, Sigma) else bounds.max_nat
            result.extend(Move(pending.path, Ans(n)) for n in range(top + 1))
    result.extend(_question_moves(game, player, s, bounds))
    s = list(s)
    return [m for m in dict.fromkeys(result) if legal_position(game, s + [m])]


def candidate_o_moves(game: GameExpr, s: Sequence[Move], bounds: Bounds) -> List[Move]:
    return candidate_moves(game, s, bounds, Player.O)


# ============================================
# TRACE FORMAT
# ============================================

def _format_tag(tag: Tag) -> str:
    return str(tag)


def format_move(move: Move) -> str:
    return ".".join([_format_tag(t) for t in move.path] + [str(move.base)])


def _parse_tag(text: str) -> Tag:
    if text in (L, R):
        return text
    if text.endswith("!") and text[:-1].isdigit():
        return Idx(int(text[:-1]))
    if text.endswith("~") and text[:-1].isdigit():
        return Comp(int(text[:-1]))
    raise GameMismatchError(f"Unknown path tag {text!r}")


def parse_move(text: str) -> Move:
    parts = text.strip().split(".")
    base_text = parts[-1]
    if base_text == "Q":
        base: BaseMove = Q
    elif base_text.startswith("Ans(") and base_text.endswith(")"):
        base = Ans(int(base_text[4:-1]))
    else:
        raise GameMismatchError(f"Unknown base move {base_text!r}")
    return Move(tuple(_parse_tag(p) for p in parts[:-1]), base)


def format_position(s: Sequence[Move]) -> str:
    return "\n".join(format_move(m) for m in s)


def parse_position(text: str) -> Position:
    return tuple(parse_move(line) for line in text.splitlines() if line.strip())


def move_to_json(move: Move) -> Dict:
    return {"path": [_format_tag(t) for t in move.path], "base": str(move.base)}


def move_from_json(data: Dict) -> Move:
    return parse_move(".".join(list(data["path"]) + [data["base"]]))


def position_key(s: Sequence[Move]) -> Tuple:
    """Canonical sort key: shorter first, then textual"""
    return (len(s), tuple(format_move(m) for m in s))


# ============================================
# AUDIT HOOK
# ============================================

@dataclass
class AuditState:
    enabled: bool = False
    checked: int = 0
    lock: threading.Lock = field(default_factory=threading.Lock)


_AUDIT = AuditState()


def set_audit(enabled: bool) -> None:
    _AUDIT.enabled = enabled
    logger.debug(f"Position audit {'enabled' if enabled else 'disabled'}")


def audit_enabled() -> bool:
    return _AUDIT.enabled


def audit_count() -> int:
    return _AUDIT.checked


def audit_position(game: GameExpr, s: Sequence[Move]) -> None:
    """Assert legality and the Switching Condition of a produced position when auditing is on"""
    if not _AUDIT.enabled:
        return
    with _AUDIT.lock:
        _AUDIT.checked += 1
    if not legal_position(game, s):
        raise IllegalPositionError(f"Illegal position in {game}: {[format_move(m) for m in s]}", tuple(s))
    if not switching_ok(game, s):
        raise IllegalPositionError(f"Switching Condition violated in {game}", tuple(s))
