"""
Application by decomposition against the game semantics, and the
simulation of a strategy by its approximants.
"""
from typing import List, Sequence

import numpy as np

from src.decomposition import apply_via_decomposition, p_k, preceq_k
from src.denotation import Fuel, denote, run_game
from src.observation import FunctionEntry
from src.pcf_lang import Answer, apply, parse

from .base import LawSuite

SUITE_FUEL = Fuel(8)


class ApplicationSuite(LawSuite):
    def __init__(self, functions: Sequence[FunctionEntry] = (), levels: Sequence[int] = (0, 1, 2, 3), **kwargs):
        super().__init__("application", **kwargs)
        self.functions = list(functions)
        self.levels = tuple(levels)

    def describe(self) -> str:
        return "apply_via_decomposition agrees with run_game; p_k(σ) ≼_k σ and σ ≼_k p_k(σ)"

    def check(self, rng: np.random.Generator, index: int) -> List[str]:
        if not self.functions:
            return []
        entry = self.functions[index % len(self.functions)]
        head = parse(entry.term)
        sigma = denote([], head, SUITE_FUEL)
        failures = []
        for row in entry.args:
            args = [parse(a) for a in row]
            decomposed = apply_via_decomposition(sigma.code, [denote([], a, SUITE_FUEL).code for a in args])
            played = run_game(apply(head, args), SUITE_FUEL, self.bounds)
            if isinstance(decomposed, Answer) != isinstance(played, Answer) or (
                isinstance(played, Answer) and decomposed != played
            ):
                failures.append(f"{entry.name} {' '.join(row)}: decomposition {decomposed} vs game {played}")
        for k in self.levels:
            approx = p_k(k, sigma).code
            if not preceq_k(k, approx, sigma.code):
                failures.append(f"p_{k}({entry.name}) ⋠_{k} {entry.name}")
            if not preceq_k(k, sigma.code, approx):
                failures.append(f"{entry.name} ⋠_{k} p_{k}({entry.name})")
        return failures
