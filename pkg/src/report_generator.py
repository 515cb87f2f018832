"""
Generate markdown reports from adequacy, law-suite and comparison runs
"""
import os
from datetime import datetime
from pathlib import Path
from typing import Dict, List, Sequence
import logging

logger = logging.getLogger(__name__)


class ReportGenerator:
    def __init__(self, output_dir: str):
        """
        Initialize report generator

        Args:
            output_dir: Directory to save reports
        """
        self.output_dir = output_dir
        os.makedirs(output_dir, exist_ok=True)

    def _write(self, filename: str, report_lines: List[str]) -> str:
        report_path = os.path.join(self.output_dir, filename)
        with open(report_path, 'w', encoding='utf-8') as f:
            f.write('\n'.join(report_lines))
        logger.info(f"✓ Report saved: {report_path}")
        return report_path

    def _header(self, title: str, budgets: Dict) -> List[str]:
        timestamp = datetime.now().strftime("%Y-%m-%d %H:%M:%S")
        report_lines = [f"# {title}", f"\n**Generated:** {timestamp}\n", "## Budgets\n"]
        for key, value in budgets.items():
            report_lines.append(f"- **{key}:** {value}")
        report_lines.append("")
        return report_lines

    def generate_adequacy_report(self, report: Dict, name: str = "adequacy") -> str:
        """
        Markdown table of an adequacy run

        Args:
            report: AdequacyReport.to_dict()
            name: File stem

        Returns:
            Path to generated report file
        """
        summary = report["summary"]
        report_lines = self._header("Adequacy Report", report.get("budgets", {}))
        report_lines.append("## Summary\n")
        report_lines.append(f"- **Programs:** {summary['total']}")
        report_lines.append(f"- **Pass:** {summary['pass']}")
        report_lines.append(f"- **Consistent (diverging):** {summary['consistent']}")
        report_lines.append(f"- **Mismatch:** {summary['mismatch']}")
        report_lines.append("")

        report_lines.append("## Programs\n")
        report_lines.append("| Status | Name | Operational | Game | Y depth | Exchanges |")
        report_lines.append("|---|---|---|---|---|---|")
        for case in report["cases"]:
            marker = "✗" if case["status"] == "mismatch" else "✓"
            report_lines.append(
                f"| {marker} {case['status']} | `{self._cell(case['name'])}` | {self._outcome(case['op'])} "
                f"| {self._outcome(case['game'])} | {case['y_depth']} | {case['steps']} |"
            )
        return self._write(f"{self._sanitize_filename(name)}_report.md", report_lines)

    def generate_law_report(self, results: Sequence[Dict], total_time: float, name: str = "laws") -> str:
        """
        Markdown summary of law-suite results

        Args:
            results: SuiteResult.to_dict() per suite
            total_time: Wall-clock seconds for all suites
        """
        budgets = results[0].get("bounds", {}) if results else {}
        report_lines = self._header("Law Suite Report", budgets)
        report_lines.append(f"**Total Time:** {total_time:.1f} seconds\n")
        report_lines.append("## Suites\n")
        report_lines.append("| Suite | Cases | Failures | Seconds |")
        report_lines.append("|---|---|---|---|")
        for r in results:
            marker = "✓" if not r["failures"] else "✗"
            report_lines.append(f"| {marker} {r['suite']} | {r['cases']} | {len(r['failures'])} | {r['elapsed']:.1f} |")
        failing = [r for r in results if r["failures"]]
        if failing:
            report_lines.append("\n## Failures\n")
            for r in failing:
                report_lines.append(f"### {r['suite']}\n")
                for failure in r["failures"][:20]:
                    report_lines.append(f"- {self._cell(failure)}")
                report_lines.append("")
        return self._write(f"{self._sanitize_filename(name)}_report.md", report_lines)

    def generate_comparison_report(self, left: str, right: str, verdicts: Dict[str, Dict], name: str = "compare") -> str:
        """Markdown record of the two directions of an observational comparison"""
        first = next(iter(verdicts.values()), {})
        report_lines = self._header("Observational Comparison", first.get("budgets", {}))
        report_lines.append(f"- **M:** `{left}`")
        report_lines.append(f"- **N:** `{right}`\n")
        for direction, verdict in verdicts.items():
            report_lines.append(f"## {direction}\n")
            report_lines.append(f"- **Verdict:** {verdict['verdict']}")
            report_lines.append(f"- **Contexts checked:** {verdict['checked']}")
            if verdict["witness"] is not None:
                report_lines.append(f"- **Witness:** `[.] {verdict['witness']}`")
                for outcome in verdict["outcomes"]:
                    report_lines.append(f"  - {self._outcome(outcome)}")
            report_lines.append("")
        return self._write(f"{self._sanitize_filename(name)}_report.md", report_lines)

    def _outcome(self, outcome: Dict) -> str:
        if "answer" in outcome:
            return str(outcome["answer"])
        if "unresolved" in outcome:
            u = outcome["unresolved"]
            return f"unresolved ({u['steps']} steps{', out of fuel' if u['fuel_exhausted'] else ', stuck'})"
        if "game" in outcome:
            return f"game: {self._outcome(outcome['game'])}"
        if "converged" in outcome:
            return "converges" if outcome["converged"] else "no answer"
        return str(outcome)

    def _cell(self, text: str) -> str:
        return str(text).replace("|", "\\|")

    def _sanitize_filename(self, filename: str) -> str:
        """Remove or replace characters that are invalid in filenames"""
        name = Path(filename).stem
        invalid_chars = '<>:"/\\|?*'
        for char in invalid_chars:
            name = name.replace(char, '_')
        name = name.strip('. ')
        return name[:200]
