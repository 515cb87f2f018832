"""gpcf - Executable game semantics for PCF"""

from .errors import (
    GpcfError,
    PcfSyntaxError,
    PcfTypeError,
    GameMismatchError,
    IllegalPositionError,
    StrategyCodeError,
    FETMismatchError,
    DecompositionError,
    BudgetExhausted,
)
from .pcf_lang import parse, typecheck, eval_op, term_to_text, Answer, Unresolved
from .game_core import Bounds, legal_position, switching_ok, pos_equiv, game_of_type
from .strategy import Strategy, FiniteStrategy, traces, strat_subeq, strat_equiv, decode, encode
from .combinators import Engine, compose, identity, promote, parse_expression
from .denotation import Fuel, denote, run_game, play_game, denote_fet
from .decomposition import phi, p_k, eta_k, S_k, E_k, dhb, apply_via_decomposition, preceq_k, run_decomposed
from .observation import obs_compare, intrinsic_leq_approx, adequacy_check, load_corpus, load_functions
from .config import Config
from .report_generator import ReportGenerator

__all__ = [
    'GpcfError', 'PcfSyntaxError', 'PcfTypeError', 'GameMismatchError', 'IllegalPositionError',
    'StrategyCodeError', 'FETMismatchError', 'DecompositionError', 'BudgetExhausted',
    'parse', 'typecheck', 'eval_op', 'term_to_text', 'Answer', 'Unresolved',
    'Bounds', 'legal_position', 'switching_ok', 'pos_equiv', 'game_of_type',
    'Strategy', 'FiniteStrategy', 'traces', 'strat_subeq', 'strat_equiv', 'decode', 'encode',
    'Engine', 'compose', 'identity', 'promote', 'parse_expression',
    'Fuel', 'denote', 'run_game', 'play_game', 'denote_fet',
    'phi', 'p_k', 'eta_k', 'S_k', 'E_k', 'dhb', 'apply_via_decomposition', 'preceq_k', 'run_decomposed',
    'obs_compare', 'intrinsic_leq_approx', 'adequacy_check', 'load_corpus', 'load_functions',
    'Config',
    'ReportGenerator',
]
