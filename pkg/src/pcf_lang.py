"""
PCF/PCFc syntax, typing, call-by-name evaluation and finite evaluation trees
"""
import itertools
import logging
import re
from dataclasses import dataclass
from functools import lru_cache
from typing import Dict, Iterator, List, Optional, Sequence, Tuple, Union

from lark import Lark, Transformer
from lark.exceptions import UnexpectedInput, VisitError

from .errors import FETMismatchError, PcfSyntaxError, PcfTypeError

logger = logging.getLogger(__name__)


# ============================================
# TYPES
# ============================================

@dataclass(frozen=True)
class Ground:
    def __str__(self) -> str:
        return "N"


@dataclass(frozen=True)
class Arrow:
    dom: "Type"
    cod: "Type"

    def __str__(self) -> str:
        return type_to_text(self)


Type = Union[Ground, Arrow]
N = Ground()


def arrow(*types: Type) -> Type:
    """arrow(A, B, C) = A -> B -> C"""
    result = types[-1]
    for t in reversed(types[:-1]):
        result = Arrow(t, result)
    return result


def arg_types(t: Type) -> List[Type]:
    """Right-spine normal form: T1 -> ... -> Tk -> N gives [T1, ..., Tk]"""
    args = []
    while isinstance(t, Arrow):
        args.append(t.dom)
        t = t.cod
    return args


def type_to_text(t: Type) -> str:
    if isinstance(t, Ground):
        return "N"
    dom = type_to_text(t.dom)
    if isinstance(t.dom, Arrow):
        dom = f"({dom})"
    return f"{dom}->{type_to_text(t.cod)}"


# ============================================
# TERMS
# ============================================

@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class Lam:
    name: str
    ty: Type
    body: "Term"


@dataclass(frozen=True)
class App:
    fun: "Term"
    arg: "Term"


@dataclass(frozen=True)
class Num:
    n: int


@dataclass(frozen=True)
class Succ:
    pass


@dataclass(frozen=True)
class Pred:
    pass


@dataclass(frozen=True)
class If0:
    pass


@dataclass(frozen=True)
class Y:
    at: Type


@dataclass(frozen=True)
class Omega:
    at: Type


@dataclass(frozen=True)
class CaseK:
    k: int


Term = Union[Var, Lam, App, Num, Succ, Pred, If0, Y, Omega, CaseK]


def apply(head: Term, args: Sequence[Term]) -> Term:
    for a in args:
        head = App(head, a)
    return head


def spine(t: Term) -> Tuple[Term, List[Term]]:
    args: List[Term] = []
    while isinstance(t, App):
        args.append(t.arg)
        t = t.fun
    return t, list(reversed(args))


def contains_fix(t: Term) -> bool:
    if isinstance(t, Y):
        return True
    if isinstance(t, Lam):
        return contains_fix(t.body)
    if isinstance(t, App):
        return contains_fix(t.fun) or contains_fix(t.arg)
    return False


# ============================================
# PARSER
# ============================================

GRAMMAR = r"""
?start: term

?term: lam
     | app

lam: "\\" NAME ":" type "." term

app: atom+

?atom: NAME -> var
     | INT -> num
     | "succ" -> succ
     | "pred" -> pred
     | "if0" -> if0
     | "Y" "[" type "]" -> fix
     | "Omega" "[" type "]" -> omega
     | "case" INT -> case_k
     | "(" term ")"

?type: atype
     | atype "->" type -> arrow

?atype: "N" -> ground
      | "(" type ")"

NAME: /(?!\d)[A-Za-z_][A-Za-z0-9_']*/

%import common.INT
%import common.WS
%ignore WS
%ignore /--[^\n]*/
"""

_CASE_NAME = re.compile(r"case(\d+)")


class ToTerm(Transformer):
    def lam(self, args):
        name, ty, body = args
        return Lam(str(name), ty, body)

    def app(self, args):
        return apply(args[0], args[1:])

    def var(self, args):
        name = str(args[0])
        match = _CASE_NAME.fullmatch(name)
        if match:
            return CaseK(int(match.group(1)))
        return Var(name)

    def num(self, args):
        return Num(int(args[0]))

    def succ(self, args):
        return Succ()

    def pred(self, args):
        return Pred()

    def if0(self, args):
        return If0()

    def fix(self, args):
        return Y(args[0])

    def omega(self, args):
        return Omega(args[0])

    def case_k(self, args):
        return CaseK(int(args[0]))

    def arrow(self, args):
        return Arrow(args[0], args[1])

    def ground(self, args):
        return N


_parser = Lark(GRAMMAR, parser="lalr", maybe_placeholders=False)
_type_parser = Lark(GRAMMAR, parser="lalr", start="type", maybe_placeholders=False)


def parse(text: str) -> Term:
    """
    Parse surface syntax into a Term.

    Raises:
        PcfSyntaxError: With the line and column of the offending input
    """
    try:
        tree = _parser.parse(text)
        return ToTerm().transform(tree)
    except UnexpectedInput as e:
        line = getattr(e, "line", None)
        column = getattr(e, "column", None)
        raise PcfSyntaxError("Syntax error", line if line and line > 0 else None, column if column and column > 0 else None) from e
    except VisitError as e:
        raise PcfSyntaxError(f"Malformed term: {e.orig_exc}") from e


def parse_type(text: str) -> Type:
    try:
        return ToTerm().transform(_type_parser.parse(text))
    except UnexpectedInput as e:
        raise PcfSyntaxError("Syntax error in type", getattr(e, "line", None), getattr(e, "column", None)) from e


# ============================================
# PRETTY PRINTER
# ============================================

def _atom_text(t: Term) -> str:
    text = term_to_text(t)
    return f"({text})" if isinstance(t, (Lam, App)) else text


def term_to_text(t: Term) -> str:
    if isinstance(t, Var):
        return t.name
    if isinstance(t, Lam):
        return f"\\{t.name}:{type_to_text(t.ty)}. {term_to_text(t.body)}"
    if isinstance(t, App):
        head, args = spine(t)
        return " ".join([_atom_text(head)] + [_atom_text(a) for a in args])
    if isinstance(t, Num):
        return str(t.n)
    if isinstance(t, Succ):
        return "succ"
    if isinstance(t, Pred):
        return "pred"
    if isinstance(t, If0):
        return "if0"
    if isinstance(t, Y):
        return f"Y[{type_to_text(t.at)}]"
    if isinstance(t, Omega):
        return f"Omega[{type_to_text(t.at)}]"
    if isinstance(t, CaseK):
        return f"case{t.k}"
    raise TypeError(f"Not a term: {t!r}")


# ============================================
# TYPECHECKER
# ============================================

Context = Sequence[Tuple[str, Type]]


def lookup(ctx: Context, name: str) -> Optional[int]:
    """0-based index of the innermost binding of `name`"""
    for k in range(len(ctx) - 1, -1, -1):
        if ctx[k][0] == name:
            return k
    return None


def constant_type(t: Term) -> Optional[Type]:
    if isinstance(t, (Succ, Pred)):
        return arrow(N, N)
    if isinstance(t, If0):
        return arrow(N, N, N, N)
    if isinstance(t, CaseK):
        return arrow(*([N] * (t.k + 2)))
    if isinstance(t, Y):
        return Arrow(Arrow(t.at, t.at), t.at)
    if isinstance(t, Omega):
        return t.at
    if isinstance(t, Num):
        return N
    return None


def typecheck(ctx: Context, t: Term) -> Type:
    """
    Principal simple type of `t` in `ctx`.

    Raises:
        PcfTypeError: Naming the offending subterm
    """
    if isinstance(t, Var):
        k = lookup(ctx, t.name)
        if k is None:
            raise PcfTypeError("Unbound variable", t.name)
        return ctx[k][1]
    if isinstance(t, Lam):
        return Arrow(t.ty, typecheck(list(ctx) + [(t.name, t.ty)], t.body))
    if isinstance(t, App):
        fun_type = typecheck(ctx, t.fun)
        if not isinstance(fun_type, Arrow):
            raise PcfTypeError("Applying a non-function", term_to_text(t))
        arg_type = typecheck(ctx, t.arg)
        if arg_type != fun_type.dom:
            raise PcfTypeError(
                f"Argument type {type_to_text(arg_type)} does not match {type_to_text(fun_type.dom)}",
                term_to_text(t),
            )
        return fun_type.cod
    ty = constant_type(t)
    if ty is None:
        raise PcfTypeError("Unknown term form", repr(t))
    return ty


# ============================================
# OPERATIONAL SEMANTICS
# ============================================

@dataclass(frozen=True)
class Answer:
    n: int

    def to_dict(self) -> Dict:
        return {"answer": self.n}


@dataclass(frozen=True)
class Unresolved:
    """No answer; `fuel_exhausted` is False when evaluation got stuck before the budget ran out"""
    steps: int
    fuel_exhausted: bool = True

    def to_dict(self) -> Dict:
        return {"unresolved": {"steps": self.steps, "fuel_exhausted": self.fuel_exhausted}}


Outcome = Union[Answer, Unresolved]


def substitute(t: Term, name: str, value: Term) -> Term:
    """t[value/name] for a closed `value`"""
    if isinstance(t, Var):
        return value if t.name == name else t
    if isinstance(t, Lam):
        if t.name == name:
            return t
        return Lam(t.name, t.ty, substitute(t.body, name, value))
    if isinstance(t, App):
        return App(substitute(t.fun, name, value), substitute(t.arg, name, value))
    return t


_ARITY = {Succ: 1, Pred: 1, If0: 3}


def step(t: Term) -> Optional[Term]:
    """One call-by-name step on a closed term, or None when no rule applies"""
    head, args = spine(t)
    if isinstance(head, Lam) and args:
        return apply(substitute(head.body, head.name, args[0]), args[1:])
    if isinstance(head, Y) and args:
        return apply(App(args[0], App(head, args[0])), args[1:])

    arity = head.k + 1 if isinstance(head, CaseK) else _ARITY.get(type(head))
    if arity is None or len(args) < arity:
        return None
    scrutinee = args[0]
    if not isinstance(scrutinee, Num):
        inner = step(scrutinee)
        if inner is None:
            return None
        return apply(head, [inner] + args[1:])

    n = scrutinee.n
    rest = args[arity:]
    if isinstance(head, Succ):
        return apply(Num(n + 1), rest)
    if isinstance(head, Pred):
        return apply(Num(max(n - 1, 0)), rest)
    if isinstance(head, If0):
        return apply(args[1] if n == 0 else args[2], rest)
    if n >= head.k:
        return None
    return apply(args[1 + n], rest)


def eval_op(t: Term, fuel: int) -> Outcome:
    """
    Call-by-name small-step evaluation of a closed ground term.

    Args:
        t: Closed term of type N
        fuel: Maximum number of steps

    Returns:
        Answer(n) if t reduces to the numeral n within fuel steps, else Unresolved
    """
    for steps in range(fuel + 1):
        if isinstance(t, Num):
            return Answer(t.n)
        if steps == fuel:
            break
        nxt = step(t)
        if nxt is None:
            logger.debug(f"Evaluation stuck after {steps} steps")
            return Unresolved(steps, fuel_exhausted=False)
        t = nxt
    return Unresolved(fuel, fuel_exhausted=True)


# ============================================
# FINITE EVALUATION TREES
# ============================================

@dataclass(frozen=True)
class OmegaLeaf:
    pass


@dataclass(frozen=True)
class NumLeaf:
    n: int


@dataclass(frozen=True)
class CaseNode:
    """case(head args, answers); `answers` holds only the non-Omega entries, sorted"""
    head: str
    args: Tuple["FET", ...]
    answers: Tuple[Tuple[int, "FET"], ...]

    def answer(self, n: int) -> "FET":
        for k, tree in self.answers:
            if k == n:
                return tree
        return OMEGA

    @property
    def support(self) -> int:
        """Least l beyond which every answer is Omega"""
        return self.answers[-1][0] + 1 if self.answers else 0


@dataclass(frozen=True)
class LamCtx:
    binders: Tuple[Tuple[str, Type], ...]
    body: "FET"


FET = Union[OmegaLeaf, NumLeaf, CaseNode, LamCtx]
OMEGA = OmegaLeaf()


def lam_ctx(binders: Sequence[Tuple[str, Type]], body: FET) -> FET:
    if not binders:
        return body
    if isinstance(body, LamCtx):
        return LamCtx(tuple(binders) + body.binders, body.body)
    return LamCtx(tuple(binders), body)


def case_node(head: str, args: Sequence[FET], answers: Dict[int, FET]) -> CaseNode:
    kept = tuple(sorted((n, q) for n, q in answers.items() if not _is_omega(q)))
    return CaseNode(head, tuple(args), kept)


def _is_omega(tree: FET) -> bool:
    return isinstance(tree, OmegaLeaf)


def _split(tree: FET) -> Tuple[Tuple[Tuple[str, Type], ...], FET]:
    if isinstance(tree, LamCtx):
        return tree.binders, tree.body
    return (), tree


def alpha_normalize(tree: FET, env: Optional[Dict[str, str]] = None, level: int = 0) -> FET:
    """Rename binders positionally by binding depth; free variables are kept"""
    env = dict(env or {})
    if isinstance(tree, LamCtx):
        binders = []
        for name, ty in tree.binders:
            level += 1
            fresh = f"#{level}"
            env[name] = fresh
            binders.append((fresh, ty))
        return LamCtx(tuple(binders), alpha_normalize(tree.body, env, level))
    if isinstance(tree, CaseNode):
        return CaseNode(
            env.get(tree.head, tree.head),
            tuple(alpha_normalize(a, env, level) for a in tree.args),
            tuple((n, alpha_normalize(q, env, level)) for n, q in tree.answers),
        )
    return tree


def fet_equal(p: FET, q: FET) -> bool:
    return alpha_normalize(p) == alpha_normalize(q)


def _leq(p: FET, q: FET) -> bool:
    if isinstance(p, OmegaLeaf):
        return True
    if isinstance(p, LamCtx) or isinstance(q, LamCtx):
        p_binders, p_body = _split(p)
        q_binders, q_body = _split(q)
        if isinstance(q, OmegaLeaf):
            return _leq(p_body, OMEGA)
        if [t for _, t in p_binders] != [t for _, t in q_binders]:
            raise FETMismatchError("Evaluation trees bind different types")
        return _leq(p_body, q_body)
    if isinstance(p, NumLeaf):
        return isinstance(q, NumLeaf) and q.n == p.n
    if not isinstance(q, CaseNode):
        return False
    if p.head != q.head or len(p.args) != len(q.args):
        return False
    return all(_leq(a, b) for a, b in zip(p.args, q.args)) and all(
        _leq(tree, q.answer(n)) for n, tree in p.answers
    )


def fet_leq(p: FET, q: FET) -> bool:
    """
    Omega-match order: q arises from p by replacing Omega leaves.

    Raises:
        FETMismatchError: If the trees bind different types
    """
    return _leq(alpha_normalize(p), alpha_normalize(q))


def _meet(p: FET, q: FET) -> FET:
    if isinstance(p, LamCtx) and isinstance(q, LamCtx):
        if [t for _, t in p.binders] != [t for _, t in q.binders]:
            raise FETMismatchError("Evaluation trees bind different types")
        return LamCtx(p.binders, _meet(p.body, q.body))
    if isinstance(p, NumLeaf) and p == q:
        return p
    if isinstance(p, CaseNode) and isinstance(q, CaseNode) and p.head == q.head and len(p.args) == len(q.args):
        support = {n for n, _ in p.answers} & {n for n, _ in q.answers}
        return case_node(
            p.head,
            [_meet(a, b) for a, b in zip(p.args, q.args)],
            {n: _meet(p.answer(n), q.answer(n)) for n in support},
        )
    if isinstance(p, LamCtx):
        return LamCtx(p.binders, OMEGA)
    if isinstance(q, LamCtx):
        return LamCtx(q.binders, OMEGA)
    return OMEGA


def fet_meet(p: FET, q: FET) -> FET:
    """Node-wise greatest lower bound in the Omega-match order"""
    return _meet(alpha_normalize(p), alpha_normalize(q))


def q_k(k: int, tree: FET) -> FET:
    """
    Truncate an evaluation tree to depth k.

    q_0 replaces the body by Omega; at level k a case node keeps the answers
    n < k and truncates arguments and answers at level k-1.
    """
    binders, body = _split(tree)
    if k == 0:
        return lam_ctx(binders, OMEGA)
    if isinstance(body, CaseNode):
        body = case_node(
            body.head,
            [q_k(k - 1, a) for a in body.args],
            {n: q_k(k - 1, q) for n, q in body.answers if n < k},
        )
    return lam_ctx(binders, body)


def fet_depth(tree: FET) -> int:
    _, body = _split(tree)
    if not isinstance(body, CaseNode):
        return 0 if isinstance(body, OmegaLeaf) else 1
    children = list(body.args) + [q for _, q in body.answers]
    return 1 + max((fet_depth(c) for c in children), default=0)


def check_fet(ctx: Context, tree: FET, ty: Type) -> None:
    """
    Check that `tree` is an evaluation tree of type `ty` in `ctx`.

    Raises:
        FETMismatchError: Naming the offending node
    """
    binders, body = _split(tree)
    expected = arg_types(ty)
    if binders and [t for _, t in binders] != expected[:len(binders)]:
        raise FETMismatchError(f"Binders {binders} do not match type {type_to_text(ty)}")
    if len(binders) not in (0, len(expected)):
        raise FETMismatchError(f"Partial binder list {binders} at type {type_to_text(ty)}")
    if not binders and expected and not isinstance(body, OmegaLeaf):
        raise FETMismatchError(f"Missing binders at type {type_to_text(ty)}")
    scope = list(ctx) + list(binders)
    if isinstance(body, CaseNode):
        k = lookup(scope, body.head)
        if k is None:
            raise FETMismatchError(f"Unbound head variable {body.head}")
        head_args = arg_types(scope[k][1])
        if len(head_args) != len(body.args):
            raise FETMismatchError(f"Head {body.head} expects {len(head_args)} arguments")
        for a, t in zip(body.args, head_args):
            check_fet(scope, a, t)
        for _, q in body.answers:
            check_fet(scope, q, N)


def fet_to_term(tree: FET, ctx: Context = (), ty: Type = N) -> Term:
    """
    Read an evaluation tree as a PCFc term.

    Each case node becomes caseL applied to the head application and the
    answers 0..L-1, where L is the least index beyond which answers are Omega.
    """
    binders, body = _split(tree)
    scope = list(ctx) + list(binders)
    if isinstance(body, OmegaLeaf):
        result: Term = Omega(N if binders else ty)
    elif isinstance(body, NumLeaf):
        result = Num(body.n)
    else:
        k = lookup(scope, body.head)
        if k is None and body.args:
            raise FETMismatchError(f"Unbound head variable {body.head}")
        head_args = arg_types(scope[k][1]) if k is not None else []
        head_term = apply(Var(body.head), [fet_to_term(a, scope, t) for a, t in zip(body.args, head_args)])
        branches = [fet_to_term(body.answer(n), scope, N) for n in range(body.support)]
        result = apply(CaseK(body.support), [head_term] + branches)
    for name, t in reversed(binders):
        result = Lam(name, t, result)
    return result


def fet_to_text(tree: FET, ctx: Context = (), ty: Type = N) -> str:
    return term_to_text(fet_to_term(tree, ctx, ty))


def fresh_name(used: Sequence[str], position: int) -> str:
    name = f"y{position}"
    while name in used:
        position += 1
        name = f"y{position}"
    return name


def fresh_binders(ctx: Context, ty: Type) -> Tuple[Tuple[str, Type], ...]:
    used = [name for name, _ in ctx]
    binders = []
    for t in arg_types(ty):
        name = fresh_name(used, len(used) + 1)
        used.append(name)
        binders.append((name, t))
    return tuple(binders)


def enumerate_fets(
    ctx: Context,
    ty: Type,
    depth: int,
    max_nat: int,
    support: int = 2,
) -> Iterator[FET]:
    """
    Lazily enumerate evaluation trees of type `ty` in `ctx` up to case depth
    `depth`, with numerals <= max_nat and answers indexed below `support`.
    Omega comes first, then numerals, then case nodes.
    """
    binders = fresh_binders(ctx, ty)
    scope = list(ctx) + list(binders)
    for body in _bodies(tuple(scope), depth, max_nat, support):
        yield lam_ctx(binders, body)


def _bodies(scope: Tuple[Tuple[str, Type], ...], depth: int, max_nat: int, support: int) -> Iterator[FET]:
    yield OMEGA
    for n in range(max_nat + 1):
        yield NumLeaf(n)
    if depth == 0:
        return
    heads = [name for k, (name, _) in enumerate(scope) if lookup(scope, name) == k]
    for name in heads:
        head_type = scope[lookup(scope, name)][1]
        arg_choices = [list(enumerate_fets(scope, t, depth - 1, max_nat, support)) for t in arg_types(head_type)]
        answer_choices = list(_bodies(scope, depth - 1, max_nat, support))
        for args in itertools.product(*arg_choices):
            for answers in itertools.product(answer_choices, repeat=support):
                if all(_is_omega(q) for q in answers):
                    continue
                yield case_node(name, args, dict(enumerate(answers)))


@lru_cache(maxsize=4096)
def parse_cached(text: str) -> Term:
    return parse(text)
