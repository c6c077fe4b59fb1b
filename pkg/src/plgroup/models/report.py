"""
Report models for verification runs.

Reports render to plain text deterministically; identical inputs give
byte-identical output.
"""
from dataclasses import dataclass, field
from typing import Dict, List, Tuple

from src.plgroup.core.plmap import PLMap1P


@dataclass
class CheckResult:
    """Outcome of one named check over a number of trials."""

    anchor: str
    level: int
    trials: int = 0
    passed: int = 0
    failed: int = 0
    counterexamples: List[str] = field(default_factory=list)

    def record(self, ok: bool, counterexample: str = "") -> None:
        """
        Record one trial.

        Args:
            ok: Whether the trial passed
            counterexample: Serialized evidence kept for failures
        """
        self.trials += 1
        if ok:
            self.passed += 1
        else:
            self.failed += 1
            if counterexample:
                self.counterexamples.append(counterexample)

    @property
    def ok(self) -> bool:
        return self.failed == 0

    def render(self) -> str:
        lines = [
            f"LEMMA {self.anchor} n={self.level} trials={self.trials} "
            f"pass={self.passed} fail={self.failed}"
        ]
        for example in self.counterexamples:
            lines.extend(f"  {line}" for line in example.rstrip("\n").splitlines())
        return "\n".join(lines) + "\n"


@dataclass
class SuiteReport:
    """Data model for a full verification suite run."""

    level: int
    seed: int
    iterations: int
    results: List[CheckResult] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return all(result.ok for result in self.results)

    @property
    def failures(self) -> int:
        return sum(result.failed for result in self.results)

    def summary(self) -> str:
        """Trailer line written after the streamed check results."""
        verdict = "pass" if self.ok else "FAIL"
        return (
            f"SUITE n={self.level} seed={self.seed} iterations={self.iterations} "
            f"checks={len(self.results)} fail={self.failures} verdict={verdict}\n"
        )

    def render(self) -> str:
        return "".join(result.render() for result in self.results) + self.summary()


@dataclass
class WeakGeneratorReport:
    """
    Verification report for the weak generating set of Delta_n.

    ``pairs`` holds ``(commutator, conjugator)`` for i = 1 .. 2^n - 2.
    """

    level: int
    pairs: List[Tuple[PLMap1P, PLMap1P]] = field(default_factory=list)
    items: Dict[str, bool] = field(default_factory=dict)
    defects: List[str] = field(default_factory=list)

    def check(self, item: str, ok: bool, defect: str = "") -> None:
        self.items[item] = self.items.get(item, True) and ok
        if not ok:
            self.defects.append(f"{item}: {defect}" if defect else item)

    @property
    def ok(self) -> bool:
        return not self.defects and all(self.items.values())

    def render(self) -> str:
        lines = [f"weak-generators n={self.level} commutators={len(self.pairs)}"]
        lines.extend(
            f"item {name} {'ok' if value else 'FAIL'}" for name, value in self.items.items()
        )
        lines.extend(f"defect {defect}" for defect in self.defects)
        lines.append(f"verdict {'pass' if self.ok else 'FAIL'}")
        return "\n".join(lines) + "\n"
