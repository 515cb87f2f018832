"""
Observations: Sierpinski tests, the bounded intrinsic preorder, applicative
contexts and the adequacy corpus.

A test on A is a strategy on A ⊸ Σ; a point x of A converges on it when
x;α answers the opening question of Σ. Divergence is never certified, only
reported as consistent with the budgets used.
"""
import itertools
import json
import logging
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Dict, Iterator, List, Optional, Sequence, Tuple, Union

from .combinators import (
    Engine,
    Retagged,
    Wiring,
    as_point,
    compose,
    compose_all,
    default_engine,
    identity,
    linear_app,
    promote,
    tensor,
    unit_right_inv,
)
from .denotation import Fuel, denote_fet, play_game
from .errors import BudgetExhausted, GameMismatchError, PcfTypeError
from .game_core import (
    I,
    NAT,
    SIGMA,
    Ans,
    Bang,
    Bounds,
    GameExpr,
    Lolli,
    Move,
    Q,
    L,
    R,
    game_from_text,
    game_of_type,
    game_to_text,
)
from .pcf_lang import (
    FET,
    N,
    Answer,
    Outcome,
    Term,
    Type,
    Unresolved,
    apply,
    arg_types,
    enumerate_fets,
    eval_op,
    fet_to_term,
    parse,
    term_to_text,
    type_to_text,
    typecheck,
)
from .strategy import CombinatorCode, Diagnostics, FunctionStrategy, Strategy, register_decoder

logger = logging.getLogger(__name__)


# ============================================
# SIERPINSKI TESTS
# ============================================

@dataclass(frozen=True)
class Convergence:
    """Result of running a point against a test"""
    converged: bool
    steps: int = 0
    exhausted: bool = False

    def __bool__(self) -> bool:
        return self.converged

    def to_dict(self) -> Dict:
        return {"converged": self.converged, "steps": self.steps, "exhausted": self.exhausted}


POINT_WIRING = Wiring((((R,), ()),))


def point(x: Strategy, game: GameExpr) -> Strategy:
    """
    View x as a point I ⊸ game.

    Accepts strategies on I ⊸ game, closed denotations on !I ⊸ game and
    strategies on the bare game.
    """
    if x.game == Lolli(I, game):
        return x
    if x.game == Lolli(Bang(I), game):
        return as_point(x)
    if x.game == game:
        return Retagged(x, Lolli(I, game), POINT_WIRING, x.name)
    raise GameMismatchError(f"{x.name} on {x.game} is not a point of {game}")


def sierpinski_run(alpha: Strategy, x: Strategy, bounds: Bounds = Bounds()) -> Convergence:
    """
    Compose the point x with the test alpha and ask the question of Σ.

    Args:
        alpha: Test strategy on A ⊸ Σ
        x: Point of A
        bounds: max_steps caps the exchanges of the probe

    Returns:
        Convergence, converged iff the answer arrived within budget
    """
    if not isinstance(alpha.game, Lolli) or alpha.game.right != SIGMA:
        raise GameMismatchError(f"A test lives on A ⊸ S, got {alpha.game}")
    diagnostics = Diagnostics(budget=bounds.max_steps)
    engine = Engine(bounds.max_steps, default_engine().pairing, diagnostics)
    run = compose(point(x, alpha.game.left), alpha, engine)
    try:
        response = run.next_move(Move((R,), Q))
    except BudgetExhausted:
        return Convergence(False, diagnostics.steps, True)
    converged = response is not None and response == Move((R,), Ans(0))
    return Convergence(converged, diagnostics.steps, diagnostics.exhausted > 0)


def ignore_test(game: GameExpr) -> Strategy:
    """The test that answers without looking at its argument"""

    def respond(move: Move) -> Optional[Move]:
        return Move((R,), Ans(0)) if move.path == (R,) and move.is_question else None

    strategy = FunctionStrategy(Lolli(game, SIGMA), respond, "⊤")
    strategy.code = CombinatorCode("ignore", (), (game_to_text(game),))
    return strategy


def observe_answer(n: int) -> Strategy:
    """Test on Nat ⊸ Σ that converges iff the number played is n"""

    def respond(move: Move) -> Optional[Move]:
        if move.path == (R,) and move.is_question:
            return Move((L,), Q)
        if move.path == (L,) and isinstance(move.base, Ans) and move.base.n == n:
            return Move((R,), Ans(0))
        return None

    strategy = FunctionStrategy(Lolli(NAT, SIGMA), respond, f"answer={n}")
    strategy.code = CombinatorCode("observe", (), (n,))
    return strategy


def feed(game: GameExpr, argument: Strategy, engine: Optional[Engine] = None) -> Strategy:
    """
    (!B ⊸ C) ⊸ C supplying the closed argument on !I ⊸ B:
    unitr⁻¹ ; (id ⊗ arg†) ; App.
    """
    if not isinstance(game, Lolli) or not isinstance(game.left, Bang):
        raise GameMismatchError(f"Cannot feed an argument to {game}")
    supplied = as_point(promote(argument, engine))
    if supplied.game.right != game.left:
        raise GameMismatchError(f"Argument on {argument.game} does not fit {game}")
    chain = [
        unit_right_inv(game),
        tensor(identity(game), supplied),
        linear_app(game.left, game.right),
    ]
    return compose_all(chain, engine)


def applicative_test(ty: Type, args: Sequence[FET], n: int, engine: Optional[Engine] = None) -> Strategy:
    """
    Test on game(ty) ⊸ Σ that applies its argument to the denotations of the
    closed evaluation trees `args` and converges iff the result is n.
    """
    params = arg_types(ty)
    if len(params) != len(args):
        raise PcfTypeError(f"{type_to_text(ty)} takes {len(params)} arguments, got {len(args)}")
    game = game_of_type(ty)
    stages: List[Strategy] = []
    for tree, param in zip(args, params):
        stages.append(feed(game, denote_fet([], tree, param, engine), engine))
        game = game.right
    stages.append(observe_answer(n))
    return compose_all(stages, engine)


register_decoder("ignore", lambda c: ignore_test(game_from_text(c.params[0])))
register_decoder("observe", lambda c: observe_answer(int(c.params[0])))


# ============================================
# TEST SUITES AND THE INTRINSIC PREORDER
# ============================================

@dataclass
class TestCase:
    __test__ = False

    description: str
    test: Strategy

    @property
    def code(self):
        return self.test.code


@dataclass
class TestSuite:
    """Named tests on one game A ⊸ Σ"""
    __test__ = False

    game: GameExpr
    cases: List[TestCase] = field(default_factory=list)

    def add(self, description: str, test: Strategy) -> None:
        if test.game != Lolli(self.game, SIGMA):
            raise GameMismatchError(f"Test {description!r} lives on {test.game}, not {self.game} ⊸ S")
        self.cases.append(TestCase(description, test))

    def __len__(self) -> int:
        return len(self.cases)

    def __iter__(self) -> Iterator[TestCase]:
        return iter(self.cases)


def closed_arguments(ty: Type, depth: int, max_nat: int, support: int = 2) -> Iterator[Tuple[FET, ...]]:
    """Tuples of closed evaluation trees, one per argument type of ty"""
    choices = [list(enumerate_fets([], t, depth, max_nat, support)) for t in arg_types(ty)]
    return itertools.product(*choices)


def _argument_text(args: Sequence[FET], ty: Type) -> List[str]:
    return [term_to_text(fet_to_term(p, [], t)) for p, t in zip(args, arg_types(ty))]


def default_suite(
    ty: Type,
    depth: int,
    max_nat: int,
    support: int = 2,
    limit: Optional[int] = None,
    engine: Optional[Engine] = None,
) -> TestSuite:
    """
    Applicative tests at type ty: every tuple of enumerated closed arguments
    against every observer answer=n with n <= max_nat.

    At type N this is the full ground suite answer=0 … answer=max_nat.
    """
    suite = TestSuite(game_of_type(ty))
    for args in closed_arguments(ty, depth, max_nat, support):
        prefix = " ".join(f"({text})" for text in _argument_text(args, ty))
        for n in range(max_nat + 1):
            if limit is not None and len(suite) >= limit:
                return suite
            description = f"{prefix} answer={n}" if prefix else f"answer={n}"
            suite.add(description, applicative_test(ty, args, n, engine))
    logger.debug(f"Built {len(suite)} tests at {type_to_text(ty)}")
    return suite


class VerdictKind(str, Enum):
    LEQ = "leq"
    NOT_LEQ = "not_leq"
    INCONCLUSIVE = "inconclusive"


@dataclass
class Verdict:
    """
    Outcome of a bounded comparison.

    For NotLeq, `witness` names the separating test or context and
    `arguments` holds the argument terms of an applicative context.
    """
    kind: VerdictKind
    witness: Optional[str] = None
    arguments: Tuple[str, ...] = ()
    outcomes: Tuple[Dict, ...] = ()
    budgets: Dict = field(default_factory=dict)
    checked: int = 0

    @property
    def holds(self) -> bool:
        return self.kind == VerdictKind.LEQ

    def to_dict(self) -> Dict:
        return {
            "verdict": self.kind.value,
            "witness": self.witness,
            "arguments": list(self.arguments),
            "outcomes": list(self.outcomes),
            "budgets": self.budgets,
            "checked": self.checked,
        }


def intrinsic_leq_approx(x: Strategy, y: Strategy, suite: TestSuite, bounds: Bounds = Bounds()) -> Verdict:
    """
    x ≲ y on the tests of `suite`: every test that converges on x must
    converge on y.

    A test that x only fails through budget exhaustion, or that y exhausts
    its budget on, makes the verdict Inconclusive unless another test
    separates.
    """
    budgets = {"max_steps": bounds.max_steps, "tests": len(suite)}
    limited = []
    for count, case in enumerate(suite, 1):
        on_x = sierpinski_run(case.test, x, bounds)
        if not on_x:
            if on_x.exhausted:
                limited.append(case.description)
            continue
        on_y = sierpinski_run(case.test, y, bounds)
        if on_y:
            continue
        if on_y.exhausted:
            limited.append(case.description)
            continue
        logger.debug(f"✗ {case.description} separates {x.name} from {y.name}")
        return Verdict(
            VerdictKind.NOT_LEQ, case.description, (), (on_x.to_dict(), on_y.to_dict()), budgets, count
        )
    if limited:
        return Verdict(VerdictKind.INCONCLUSIVE, None, (), (), {**budgets, "limited": limited}, len(suite))
    return Verdict(VerdictKind.LEQ, None, (), (), budgets, len(suite))


# ============================================
# APPLICATIVE CONTEXTS
# ============================================

def _outcome_dict(outcome: Outcome) -> Dict:
    return outcome.to_dict()


def _separates(left: Outcome, right: Outcome) -> Optional[bool]:
    """True if left answered and right disagrees, None if right ran out of fuel"""
    if not isinstance(left, Answer):
        return False
    if isinstance(right, Answer):
        return right.n != left.n
    return None if right.fuel_exhausted else True


def obs_compare(
    m: Term,
    n: Term,
    depth: int,
    fuel: int,
    bounds: Bounds = Bounds(),
    max_nat: Optional[int] = None,
    cross_check: bool = False,
    limit: Optional[int] = None,
) -> Verdict:
    """
    Compare M ≤ N in all applicative contexts [.]P₁…P_k whose arguments are
    read back from enumerated closed evaluation trees of depth <= `depth`.

    Args:
        m: Closed term of type T₁ ⇒ … ⇒ T_k ⇒ N
        n: Closed term of the same type
        depth: Case depth of the argument trees
        fuel: Reduction steps for each evaluation
        bounds: max_nat bounds the argument numerals unless max_nat is given;
            max_steps budgets the game runs of cross_check
        max_nat: Largest numeral in argument trees
        cross_check: Also run separating contexts through the game semantics
        limit: Stop after this many contexts

    Returns:
        Verdict; a NotLeq witness lists the argument terms
    """
    ty = typecheck([], m)
    other = typecheck([], n)
    if ty != other:
        raise PcfTypeError(f"Cannot compare {type_to_text(ty)} with {type_to_text(other)}")
    max_nat = bounds.max_nat if max_nat is None else max_nat
    budgets = {"fuel": fuel, "depth": depth, "max_nat": max_nat}
    limited = 0
    checked = 0
    for args in closed_arguments(ty, depth, max_nat):
        if limit is not None and checked >= limit:
            break
        checked += 1
        terms = [fet_to_term(p, [], t) for p, t in zip(args, arg_types(ty))]
        left = eval_op(apply(m, terms), fuel)
        if not isinstance(left, Answer):
            continue
        right = eval_op(apply(n, terms), fuel)
        verdict = _separates(left, right)
        if verdict is None:
            limited += 1
        elif verdict:
            texts = tuple(term_to_text(t) for t in terms)
            outcomes = (_outcome_dict(left), _outcome_dict(right))
            if cross_check:
                outcomes += tuple(_cross_check(t, terms, fuel, bounds) for t in (m, n))
            logger.debug(f"✗ context [.] {' '.join(texts)} separates: {left} vs {right}")
            return Verdict(VerdictKind.NOT_LEQ, " ".join(texts), texts, outcomes, budgets, checked)
    if limited:
        return Verdict(VerdictKind.INCONCLUSIVE, None, (), (), {**budgets, "limited": limited}, checked)
    return Verdict(VerdictKind.LEQ, None, (), (), budgets, checked)


def _cross_check(term: Term, args: Sequence[Term], fuel: int, bounds: Bounds) -> Dict:
    program = apply(term, args)
    operational = eval_op(program, fuel)
    game = play_game(program, Fuel(), bounds).outcome
    if isinstance(operational, Answer) != isinstance(game, Answer) or (
        isinstance(game, Answer) and game != operational
    ):
        logger.warning(f"✗ game run disagrees on {term_to_text(program)}: {operational} vs {game}")
    return {"game": game.to_dict()}


def replay_witness(m: Term, n: Term, verdict: Verdict, fuel: int) -> bool:
    """Re-run the context of a NotLeq verdict; True iff it still separates"""
    if verdict.kind != VerdictKind.NOT_LEQ:
        return False
    terms = [parse(text) for text in verdict.arguments]
    left = eval_op(apply(m, terms), fuel)
    return bool(_separates(left, eval_op(apply(n, terms), fuel)))


# ============================================
# ADEQUACY CORPUS
# ============================================

@dataclass
class CorpusEntry:
    """A closed ground program with its expected behaviour; expect None means it diverges"""
    term: str
    expect: Optional[int]
    name: str = ""
    slow: bool = False

    @property
    def diverges(self) -> bool:
        return self.expect is None

    def to_dict(self) -> Dict:
        expect: Union[str, Dict] = "diverges" if self.diverges else {"answer": self.expect}
        return {"name": self.name, "term": self.term, "expect": expect, "slow": self.slow}


def _entry_from_dict(data: Dict, where: str) -> CorpusEntry:
    if "term" not in data or "expect" not in data:
        raise ValueError(f"{where}: corpus entries need 'term' and 'expect'")
    expect = data["expect"]
    if expect == "diverges":
        value = None
    elif isinstance(expect, dict) and isinstance(expect.get("answer"), int):
        value = expect["answer"]
    else:
        raise ValueError(f"{where}: expect must be \"diverges\" or {{\"answer\": n}}, got {expect!r}")
    return CorpusEntry(data["term"], value, data.get("name", data["term"]), bool(data.get("slow", False)))


def load_corpus(path: Union[str, Path], include_slow: bool = True) -> List[CorpusEntry]:
    """Read a JSON-lines corpus; blank lines are skipped"""
    entries = []
    with open(path, encoding="utf-8") as f:
        for number, line in enumerate(f, 1):
            if not line.strip():
                continue
            try:
                data = json.loads(line)
            except json.JSONDecodeError as e:
                raise ValueError(f"{path}:{number}: {e.msg}") from e
            entry = _entry_from_dict(data, f"{path}:{number}")
            if include_slow or not entry.slow:
                entries.append(entry)
    logger.debug(f"Loaded {len(entries)} corpus entries from {path}")
    return entries


@dataclass
class FunctionEntry:
    """A closed function-typed term with sample argument tuples"""
    term: str
    args: List[Tuple[str, ...]]
    name: str = ""

    def applications(self) -> List[Term]:
        head = parse(self.term)
        return [apply(head, [parse(a) for a in row]) for row in self.args]


def load_functions(path: Union[str, Path]) -> List[FunctionEntry]:
    """Read a JSON-lines file of {"term", "args": [[...], ...], "name"} objects"""
    entries = []
    with open(path, encoding="utf-8") as f:
        for number, line in enumerate(f, 1):
            if not line.strip():
                continue
            data = json.loads(line)
            if "term" not in data:
                raise ValueError(f"{path}:{number}: function entries need a 'term'")
            rows = [tuple(row) for row in data.get("args", [])]
            entries.append(FunctionEntry(data["term"], rows, data.get("name", data["term"])))
    return entries


class CaseStatus(str, Enum):
    PASS = "pass"
    CONSISTENT = "consistent"
    MISMATCH = "mismatch"


@dataclass
class CaseResult:
    entry: CorpusEntry
    status: CaseStatus
    operational: Outcome
    game: Outcome
    y_depth: int = 0
    steps: int = 0

    def to_dict(self) -> Dict:
        return {
            **self.entry.to_dict(),
            "status": self.status.value,
            "op": self.operational.to_dict(),
            "game": self.game.to_dict(),
            "y_depth": self.y_depth,
            "steps": self.steps,
        }


@dataclass
class AdequacyReport:
    results: List[CaseResult] = field(default_factory=list)
    budgets: Dict = field(default_factory=dict)

    def count(self, status: CaseStatus) -> int:
        return sum(1 for r in self.results if r.status == status)

    @property
    def ok(self) -> bool:
        return self.count(CaseStatus.MISMATCH) == 0

    @property
    def mismatches(self) -> List[CaseResult]:
        return [r for r in self.results if r.status == CaseStatus.MISMATCH]

    def to_dict(self) -> Dict:
        return {
            "summary": {
                "total": len(self.results),
                "pass": self.count(CaseStatus.PASS),
                "consistent": self.count(CaseStatus.CONSISTENT),
                "mismatch": self.count(CaseStatus.MISMATCH),
            },
            "budgets": self.budgets,
            "cases": [r.to_dict() for r in self.results],
        }


def classify(entry: CorpusEntry, operational: Outcome, game: Outcome) -> CaseStatus:
    if entry.diverges:
        both = isinstance(operational, Unresolved) and isinstance(game, Unresolved)
        return CaseStatus.CONSISTENT if both else CaseStatus.MISMATCH
    if operational == Answer(entry.expect) and game == Answer(entry.expect):
        return CaseStatus.PASS
    return CaseStatus.MISMATCH


def adequacy_check(
    entries: Sequence[CorpusEntry],
    fuel: Fuel = Fuel(),
    bounds: Bounds = Bounds(),
    eval_fuel: Optional[int] = None,
) -> AdequacyReport:
    """
    Run every corpus program operationally and through the game semantics.

    Args:
        entries: Closed programs of type N with expected outcomes
        fuel: Unfolding depth for Y in the game runs
        bounds: max_steps budgets each game run
        eval_fuel: Reduction steps for eval_op; defaults to bounds.max_steps

    Returns:
        AdequacyReport with one CaseResult per entry; mismatches are entries, not errors
    """
    eval_fuel = bounds.max_steps if eval_fuel is None else eval_fuel
    report = AdequacyReport(budgets={"y_depth": fuel.y_depth, "max_steps": bounds.max_steps, "eval_fuel": eval_fuel})
    for entry in entries:
        t = parse(entry.term)
        ty = typecheck([], t)
        if ty != N:
            raise PcfTypeError(f"Corpus program {entry.name!r} has type {type_to_text(ty)}, expected N")
        operational = eval_op(t, eval_fuel)
        run = play_game(t, fuel, bounds)
        status = classify(entry, operational, run.outcome)
        marker = "✗" if status == CaseStatus.MISMATCH else "✓"
        logger.info(f"{marker} {entry.name}: op={operational} game={run.outcome}")
        report.results.append(CaseResult(entry, status, operational, run.outcome, run.y_depth, run.diagnostics.steps))
    return report
