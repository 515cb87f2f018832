"""
Decomposition round trips: readback of the strategy of an evaluation tree,
re-denotation of the readback of a term, and rebuilding a strategy from its
decomposition.
"""
from typing import List, Optional, Sequence

import numpy as np

from src.combinators import case_construct
from src.decomposition import DecompKind, E_k, S_k, p_k, phi, uncurried
from src.denotation import Fuel, denote
from src.observation import FunctionEntry
from src.pcf_lang import fet_equal, fet_to_text, parse, q_k, typecheck
from src.strategy import strat_equiv

from .base import LawSuite
from .generators import FET_CONTEXTS, FET_TYPES, pick, random_fet

SUITE_FUEL = Fuel(4)
LEVELS = (0, 1, 2, 3)


class DecompositionSuite(LawSuite):
    def __init__(self, functions: Sequence[FunctionEntry] = (), **kwargs):
        super().__init__("decomposition", **kwargs)
        self.functions = list(functions)

    def describe(self) -> str:
        return "E_k(S_k(P)) = q_k(P), S_k(E_k(⟦M⟧)) ≈ p_k(⟦M⟧), and C_i of the components ≈ the strategy"

    def check(self, rng: np.random.Generator, index: int) -> List[str]:
        failures = []
        ctx = pick(rng, FET_CONTEXTS)
        ty = pick(rng, FET_TYPES)
        tree = random_fet(rng, ctx, ty)
        for k in LEVELS:
            readback = E_k(k, S_k(k, tree, ctx, ty), ctx)
            if not fet_equal(readback, q_k(k, tree)):
                failures.append(f"E_{k}(S_{k}(P)) ≠ q_{k}(P) for P = {fet_to_text(tree, ctx, ty)}")
        if self.functions:
            failures.extend(self.check_term(self.functions[index % len(self.functions)]))
        return failures

    def check_term(self, entry: FunctionEntry) -> List[str]:
        failures = []
        term = parse(entry.term)
        ty = typecheck([], term)
        sigma = denote([], term, SUITE_FUEL)
        for k in LEVELS:
            if not strat_equiv(S_k(k, E_k(k, sigma), (), ty), p_k(k, sigma), self.bounds):
                failures.append(f"S_{k}(E_{k}(⟦{entry.name}⟧)) ≉ p_{k}")
        rebuilt = rebuild(sigma, self.bounds.max_nat)
        if rebuilt is not None and not strat_equiv(rebuilt, uncurried(sigma)[0], self.bounds):
            failures.append(f"rebuilt {entry.name} ≉ its uncurried denotation")
        return failures


def rebuild(sigma, answers: int) -> Optional[object]:
    """C_i of the components of a case decomposition, with answers 0..answers"""
    d = phi(sigma)
    if d.kind != DecompKind.CASE:
        return None
    return case_construct(d.types, d.position, d.args, [d.answer(n) for n in range(answers + 1)])
