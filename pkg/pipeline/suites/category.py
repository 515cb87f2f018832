"""
Identity and associativity of composition on random finite strategies.
"""
from typing import List

import numpy as np

from src.combinators import compose, identity
from src.strategy import strat_equiv

from .base import LawSuite
from .generators import random_arrow, random_game


class CategorySuite(LawSuite):
    def __init__(self, **kwargs):
        super().__init__("category", **kwargs)

    def describe(self) -> str:
        return "id;σ ≈ σ ≈ σ;id and (σ;τ);υ ≈ σ;(τ;υ)"

    def check(self, rng: np.random.Generator, index: int) -> List[str]:
        a, b, c, d = (random_game(rng) for _ in range(4))
        sigma = random_arrow(rng, a, b, "σ")
        tau = random_arrow(rng, b, c, "τ")
        upsilon = random_arrow(rng, c, d, "υ")
        failures = []
        if not strat_equiv(compose(identity(a), sigma), sigma, self.bounds):
            failures.append(f"left identity on {sigma.game}")
        if not strat_equiv(compose(sigma, identity(b)), sigma, self.bounds):
            failures.append(f"right identity on {sigma.game}")
        left = compose(compose(sigma, tau), upsilon)
        right = compose(sigma, compose(tau, upsilon))
        if not strat_equiv(left, right, self.bounds):
            failures.append(f"associativity through {b} and {c}")
        return failures
