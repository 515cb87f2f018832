"""
Run configuration: budgets, depths and the pairing function.

Values come from GPCF_* environment variables (a .env file at the repo root
is loaded when present); command-line flags override them.
"""
import logging
import os
import sys
from dataclasses import asdict, dataclass, replace
from pathlib import Path
from typing import Dict, Optional

from dotenv import load_dotenv

from .combinators import PAIRINGS, Engine, get_pairing, set_default_engine
from .denotation import Fuel
from .game_core import Bounds, set_audit
from .strategy import Diagnostics

logger = logging.getLogger(__name__)

ENV_FILE = Path(__file__).parent.parent / ".env"

# field name -> environment variable
ENV_VARS = {
    "y_depth": "GPCF_Y_DEPTH",
    "max_nat": "GPCF_MAX_NAT",
    "max_index": "GPCF_MAX_INDEX",
    "max_len": "GPCF_MAX_LEN",
    "max_steps": "GPCF_MAX_STEPS",
    "depth": "GPCF_DEPTH",
    "pairing": "GPCF_PAIRING",
    "recursion_limit": "GPCF_RECURSION_LIMIT",
    "run_log": "GPCF_RUN_LOG",
    "audit": "GPCF_AUDIT",
    "eval_fuel": "GPCF_EVAL_FUEL",
}

_POSITIVE = ("y_depth", "max_nat", "max_index", "max_len", "max_steps", "depth", "recursion_limit", "eval_fuel")


@dataclass(frozen=True)
class Config:
    y_depth: int = 32
    max_nat: int = 8
    max_index: int = 8
    max_len: int = 64
    max_steps: int = 100000
    depth: int = 3
    output_format: str = "text"
    pairing: str = "gamma"
    recursion_limit: int = 200000
    run_log: str = "data/run_log.jsonl"
    audit: bool = False
    # reduction steps for the operational backend
    eval_fuel: int = 1000000

    def __post_init__(self):
        for name in _POSITIVE:
            value = getattr(self, name)
            if not isinstance(value, int) or value <= 0:
                raise ValueError(f"{ENV_VARS[name]} ({name}) must be a positive integer, got {value!r}")
        if self.pairing not in PAIRINGS:
            raise ValueError(f"{ENV_VARS['pairing']} must be one of {sorted(PAIRINGS)}, got {self.pairing!r}")
        if self.output_format not in ("text", "json"):
            raise ValueError(f"output_format must be text or json, got {self.output_format!r}")

    @classmethod
    def from_env(cls, env_file: Optional[Path] = None, **overrides) -> "Config":
        """
        Build a Config from GPCF_* variables, then apply non-None overrides.

        Raises:
            ValueError: If a variable is not a positive integer where one is required
        """
        load_dotenv(env_file or ENV_FILE)
        values: Dict = {}
        for name, var in ENV_VARS.items():
            raw = os.getenv(var)
            if raw is None or raw == "":
                continue
            if name in ("pairing", "run_log"):
                values[name] = raw
            elif name == "audit":
                values[name] = raw.strip().lower() in ("1", "true", "yes", "on")
            else:
                try:
                    values[name] = int(raw)
                except ValueError:
                    raise ValueError(f"{var} must be an integer, got {raw!r}") from None
        values.update({k: v for k, v in overrides.items() if v is not None})
        return cls(**values)

    def with_overrides(self, **overrides) -> "Config":
        return replace(self, **{k: v for k, v in overrides.items() if v is not None})

    def bounds(self) -> Bounds:
        return Bounds(self.max_nat, self.max_index, self.max_len, self.max_steps)

    def fuel(self) -> Fuel:
        return Fuel(self.y_depth)

    def engine(self) -> Engine:
        return Engine(self.max_steps, get_pairing(self.pairing), Diagnostics())

    def apply(self) -> None:
        """Install the engine, audit flag and recursion limit process-wide"""
        sys.setrecursionlimit(max(sys.getrecursionlimit(), self.recursion_limit))
        set_default_engine(self.engine())
        set_audit(self.audit)
        logger.debug(f"Configuration applied: {self.to_dict()}")

    def to_dict(self) -> Dict:
        return asdict(self)
