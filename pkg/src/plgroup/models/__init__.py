"""Value objects returned by constructions and verification runs."""
from src.plgroup.models.factorization import (
    Factor,
    Factorization,
    FactorTag,
    read_manifest,
    write_manifest,
)
from src.plgroup.models.report import CheckResult, SuiteReport, WeakGeneratorReport

__all__ = [
    "CheckResult",
    "Factor",
    "Factorization",
    "FactorTag",
    "SuiteReport",
    "WeakGeneratorReport",
    "read_manifest",
    "write_manifest",
]
