"""
Law Suites Package
"""

from .base import LawSuite, SuiteResult, SUITE_BOUNDS
from .category import CategorySuite
from .comonad import ComonadSuite
from .bang import BangSuite
from .decomposition import DecompositionSuite
from .approximation import ApproximationSuite
from .application import ApplicationSuite

SUITES = {
    'category': CategorySuite,
    'comonad': ComonadSuite,
    'bang': BangSuite,
    'decomposition': DecompositionSuite,
    'approximation': ApproximationSuite,
    'application': ApplicationSuite,
}

# Suites that draw their population from the function corpus
CORPUS_SUITES = {'decomposition', 'approximation', 'application'}

__all__ = [
    'LawSuite', 'SuiteResult', 'SUITE_BOUNDS', 'SUITES', 'CORPUS_SUITES',
    'CategorySuite', 'ComonadSuite', 'BangSuite',
    'DecompositionSuite', 'ApproximationSuite', 'ApplicationSuite',
]
