"""
Base Law Suite Class - Abstract interface for all law suites
"""

from abc import ABC, abstractmethod
from dataclasses import asdict, dataclass, field
from datetime import datetime
from pathlib import Path
from typing import Dict, List, Optional
import json
import logging
import time

import numpy as np

from src.game_core import Bounds

logger = logging.getLogger(__name__)

# Bounds small enough for exhaustive bounded comparison of generated strategies
SUITE_BOUNDS = Bounds(max_nat=2, max_index=2, max_len=6, max_steps=20000)


@dataclass
class SuiteResult:
    suite: str
    cases: int
    failures: List[str] = field(default_factory=list)
    elapsed: float = 0.0
    bounds: Dict = field(default_factory=dict)
    seed: Optional[int] = None

    @property
    def passed(self) -> bool:
        return not self.failures

    def to_dict(self) -> Dict:
        return asdict(self)


class LawSuite(ABC):
    """
    Abstract base class for law suites.

    All suites must implement:
    - check() to test one generated case
    - describe() to name the laws being checked

    run() draws `cases` cases from the generator and collects failures.
    """

    def __init__(self, suite_name: str, bounds: Bounds = SUITE_BOUNDS, version: str = "1.0.0"):
        """
        Initialize base suite.

        Args:
            suite_name: Name of the suite (e.g., "category", "comonad")
            bounds: Bounds of the bounded equivalence checks
            version: Suite version for tracking
        """
        self.suite_name = suite_name
        self.bounds = bounds
        self.version = version

    @abstractmethod
    def check(self, rng: np.random.Generator, index: int) -> List[str]:
        """
        Generate and check one case.

        Args:
            rng: Random generator driving the case
            index: Case number

        Returns:
            Descriptions of the laws that failed on this case (empty if all hold)
        """
        pass

    @abstractmethod
    def describe(self) -> str:
        """
        Return a one-line description of the laws checked.

        Returns:
            Description as string
        """
        pass

    def run(self, rng: np.random.Generator, cases: int, seed: Optional[int] = None) -> SuiteResult:
        """
        Run `cases` generated cases.

        Args:
            rng: Random generator
            cases: Number of cases
            seed: Seed recorded in the result

        Returns:
            SuiteResult with one entry per failed law instance
        """
        start = time.time()
        failures: List[str] = []
        for index in range(cases):
            for failure in self.check(rng, index):
                failures.append(f"case {index}: {failure}")
                logger.warning(f"✗ {self.suite_name} case {index}: {failure}")
        elapsed = time.time() - start
        marker = "✓" if not failures else "✗"
        logger.info(f"{marker} {self.suite_name}: {cases - len({f.split(':')[0] for f in failures})}/{cases} ({elapsed:.1f}s)")
        return SuiteResult(self.suite_name, cases, failures, elapsed, asdict(self.bounds), seed)

    def save_result(self, result: SuiteResult, output_dir: Path) -> str:
        """
        Save a suite result to a JSON file.

        Args:
            result: Result from run()
            output_dir: Directory to save into

        Returns:
            Path to saved result file
        """
        output_dir = Path(output_dir)
        output_dir.mkdir(parents=True, exist_ok=True)

        timestamp = datetime.now().strftime("%Y%m%d_%H%M%S")
        filepath = output_dir / f"{self.suite_name}_{timestamp}.json"

        with open(filepath, 'w', encoding='utf-8') as f:
            json.dump(result.to_dict(), f, indent=2, ensure_ascii=False)

        return str(filepath)
