"""
Properties of the approximants p_k on denotations of corpus terms.
"""
from typing import List, Sequence

import numpy as np

from src.decomposition import p_k
from src.denotation import Fuel, denote
from src.game_core import Ans, Player, player_of, pos_equiv
from src.observation import FunctionEntry
from src.pcf_lang import parse
from src.strategy import explicit_subset, strat_equiv, strat_subeq, traces

from .base import LawSuite

SUITE_FUEL = Fuel(4)


def within_level(game, s, k: int) -> bool:
    """
    Plays p_k is required to reproduce: at most 2k moves, and every
    Opponent answer small enough to survive truncation at its depth.
    """
    if len(s) > 2 * k:
        return False
    for position, m in enumerate(s):
        if isinstance(m.base, Ans) and player_of(game, m) == Player.O and m.base.n >= k - position // 2:
            return False
    return True


class ApproximationSuite(LawSuite):
    def __init__(self, functions: Sequence[FunctionEntry] = (), levels: Sequence[int] = (1, 2, 3), **kwargs):
        super().__init__("approximation", **kwargs)
        self.functions = list(functions)
        self.levels = tuple(levels)

    def describe(self) -> str:
        return "p_k(σ) ⊂≈ σ, short plays survive p_k, p_k ⊆ p_(k+1), p_k idempotent"

    def check(self, rng: np.random.Generator, index: int) -> List[str]:
        if not self.functions:
            return []
        entry = self.functions[index % len(self.functions)]
        sigma = denote([], parse(entry.term), SUITE_FUEL)
        bounds = self.bounds
        plays = traces(sigma, bounds)
        failures = []
        for k in self.levels:
            approx = p_k(k, sigma)
            if not strat_subeq(approx, sigma, bounds):
                failures.append(f"p_{k}({entry.name}) ⊄≈ {entry.name}")
            approx_plays = traces(approx, bounds)
            for s in plays:
                if within_level(sigma.game, s, k) and not any(pos_equiv(sigma.game, s, t) for t in approx_plays):
                    failures.append(f"play of length {len(s)} of {entry.name} missing from p_{k}")
                    break
            if not explicit_subset(approx, p_k(k + 1, sigma), bounds):
                failures.append(f"p_{k}({entry.name}) ⊈ p_{k + 1}")
            if not strat_equiv(p_k(k, approx), approx, bounds):
                failures.append(f"p_{k}(p_{k}({entry.name})) ≉ p_{k}")
        return failures
