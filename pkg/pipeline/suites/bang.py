"""
The Bang Lemma: every σ on !A ⊸ !B with A well-opened is ≈ (σ;der)†.
"""
from typing import List, Tuple

import numpy as np

from src.combinators import compose, compose_all, con, der, exp_iso, identity, promote, tensor, unit_right, weak
from src.game_core import Bang
from src.strategy import Strategy, strat_equiv

from .base import LawSuite
from .generators import WELL_OPENED, pick, random_kleisli

# Only the first three are promotions or identities; the rest are wirings
# through contraction, weakening and the exponential isomorphism.
BANG_SHAPES = ("identity", "promotion", "promotions", "contracted pair", "iso round trip", "projection")


def random_bang_map(rng: np.random.Generator) -> Tuple[str, Strategy]:
    """A shape from BANG_SHAPES and a strategy of that shape on !A ⊸ !B"""
    shape = pick(rng, BANG_SHAPES)
    a, b = pick(rng, WELL_OPENED), pick(rng, WELL_OPENED)
    if shape == "identity":
        return shape, identity(Bang(a))
    if shape == "promotion":
        return shape, promote(random_kleisli(rng, a, b, "ρ"))
    if shape == "promotions":
        middle = pick(rng, WELL_OPENED)
        rho, rho2 = random_kleisli(rng, a, middle, "ρ"), random_kleisli(rng, middle, b, "ρ'")
        return shape, compose(promote(rho), promote(rho2))
    c = pick(rng, WELL_OPENED)
    if shape == "contracted pair":
        # !a ⊸ !a⊗!a ⊸ !b⊗!c ⊸ !(b&c)
        both = tensor(promote(random_kleisli(rng, a, b, "ρ")), promote(random_kleisli(rng, a, c, "ρ'")))
        return shape, compose_all([con(a), both, exp_iso(b, c, "fwd")])
    if shape == "iso round trip":
        return shape, compose(exp_iso(a, b, "bwd"), exp_iso(a, b, "fwd"))
    # !(a&b) ⊸ !a⊗!b ⊸ !c⊗I ⊸ !c
    left = tensor(promote(random_kleisli(rng, a, c, "ρ")), weak(b))
    return shape, compose_all([exp_iso(a, b, "bwd"), left, unit_right(Bang(c))])


class BangSuite(LawSuite):
    def __init__(self, **kwargs):
        super().__init__("bang", **kwargs)

    def describe(self) -> str:
        return "σ ≈ (σ;der)† for σ on !A ⊸ !B"

    def check(self, rng: np.random.Generator, index: int) -> List[str]:
        shape, sigma = random_bang_map(rng)
        target = sigma.game.right.inner
        if strat_equiv(sigma, promote(compose(sigma, der(target))), self.bounds):
            return []
        return [f"bang lemma for {shape} {sigma.name} on {sigma.game}"]
