"""
The comonad laws of ! and the commutative comonoid on !A.
"""
from typing import List

import numpy as np

from src.combinators import (
    assoc,
    compose,
    compose_all,
    con,
    der,
    identity,
    promote,
    symm,
    tensor,
    unit_left,
    unit_right,
    weak,
)
from src.game_core import Bang
from src.strategy import strat_equiv

from .base import LawSuite
from .generators import WELL_OPENED, pick, random_kleisli


class ComonadSuite(LawSuite):
    def __init__(self, **kwargs):
        super().__init__("comonad", **kwargs)

    def describe(self) -> str:
        return "(m1) σ†;τ† ≈ (σ†;τ)†, (m2) der†;σ ≈ σ, (m3) σ†;der ≈ σ, der† ≈ id, counit, coassociativity and commutativity of con"

    def check(self, rng: np.random.Generator, index: int) -> List[str]:
        a, b, c = (pick(rng, WELL_OPENED) for _ in range(3))
        sigma = random_kleisli(rng, a, b, "σ")
        tau = random_kleisli(rng, b, c, "τ")
        failures = []
        bounds = self.bounds

        if not strat_equiv(compose(promote(sigma), promote(tau)), promote(compose(promote(sigma), tau)), bounds):
            failures.append(f"m1 through {b}")
        if not strat_equiv(compose(promote(der(a)), sigma), sigma, bounds):
            failures.append(f"m2 on {sigma.game}")
        if not strat_equiv(compose(promote(sigma), der(b)), sigma, bounds):
            failures.append(f"m3 on {sigma.game}")
        if not strat_equiv(promote(der(a)), identity(Bang(a)), bounds):
            failures.append(f"der† ≉ id at {a}")

        bang = Bang(a)
        if not strat_equiv(compose_all([con(a), tensor(weak(a), identity(bang)), unit_left(bang)]), identity(bang), bounds):
            failures.append(f"left counit at {a}")
        if not strat_equiv(compose_all([con(a), tensor(identity(bang), weak(a)), unit_right(bang)]), identity(bang), bounds):
            failures.append(f"right counit at {a}")
        left = compose_all([con(a), tensor(con(a), identity(bang)), assoc(bang, bang, bang)])
        right = compose(con(a), tensor(identity(bang), con(a)))
        if not strat_equiv(left, right, bounds):
            failures.append(f"coassociativity at {a}")
        if not strat_equiv(compose(con(a), symm(bang, bang)), con(a), bounds):
            failures.append(f"commutativity at {a}")
        return failures
