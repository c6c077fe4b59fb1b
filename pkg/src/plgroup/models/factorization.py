"""
Factorization models.

A factorization writes a target element as an ordered product of tagged
factors. Conjugated factors carry the witness ``w`` and core ``p`` with
``element == w⁻¹ p w``. Manifests store a factorization on disk as one
plmap1p file per element plus a text index.
"""
from dataclasses import dataclass, field
from enum import Enum, auto
from pathlib import Path
from typing import List, Optional, Union

from src.plgroup.core.errors import ParseError
from src.plgroup.core.plmap import PLMap1P, compose, invert, parse_plmap, serialize

MANIFEST_HEADER = "factorization v1"


class FactorTag(Enum):
    """Enumeration of factor roles."""

    HEAD = auto()  # fixes a neighbourhood of 0
    CONJUGATED_FPRIME = auto()  # w⁻¹ p w with p in F'
    TRANSLATION_POWER = auto()  # power of x -> x + n

    @property
    def label(self) -> str:
        return {
            FactorTag.HEAD: "head-fixing-0-neighborhood",
            FactorTag.CONJUGATED_FPRIME: "conjugated-Fprime",
            FactorTag.TRANSLATION_POWER: "translation-power",
        }[self]

    @classmethod
    def from_label(cls, label: str) -> "FactorTag":
        for tag in cls:
            if tag.label == label:
                return tag
        raise ValueError(f"unknown factor tag {label!r}")


@dataclass(frozen=True)
class Factor:
    """One factor of a factorization."""

    element: PLMap1P
    tag: FactorTag
    witness: Optional[PLMap1P] = None
    core: Optional[PLMap1P] = None

    def inverse(self) -> "Factor":
        """Inverse factor; a conjugate keeps its witness and inverts its core."""
        core = invert(self.core) if self.core is not None else None
        return Factor(invert(self.element), self.tag, self.witness, core)


@dataclass
class Factorization:
    """Data model for ``target == factor_1 · factor_2 · ...`` (right action)."""

    target: PLMap1P
    level: int
    factors: List[Factor] = field(default_factory=list)
    translation_power: int = 0

    def add_factor(self, factor: Factor) -> None:
        self.factors.append(factor)

    def product(self) -> PLMap1P:
        return compose(*(factor.element for factor in self.factors))

    @property
    def conjugated(self) -> List[Factor]:
        return [f for f in self.factors if f.tag is FactorTag.CONJUGATED_FPRIME]

    @property
    def head(self) -> Optional[Factor]:
        return next((f for f in self.factors if f.tag is FactorTag.HEAD), None)

    def render(self) -> str:
        lines = [
            f"factorization n={self.level} factors={len(self.factors)} "
            f"conjugated={len(self.conjugated)} l={self.translation_power}"
        ]
        lines.extend(
            f"factor {i} {factor.tag.label} k={len(factor.element)}"
            for i, factor in enumerate(self.factors, start=1)
        )
        return "\n".join(lines) + "\n"


def write_manifest(fz: Factorization, directory: Union[str, Path]) -> Path:
    """
    Write every element of fz under directory and return the manifest path.

    Args:
        fz: Factorization to store
        directory: Output directory, created if missing

    Returns:
        Path of ``manifest.txt``
    """
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)

    def dump(name: str, element: PLMap1P) -> str:
        (directory / name).write_text(serialize(element))
        return name

    lines = [
        f"{MANIFEST_HEADER} n={fz.level} factors={len(fz.factors)} l={fz.translation_power}",
        f"target {dump('target.plmap', fz.target)}",
    ]
    for i, factor in enumerate(fz.factors, start=1):
        entry = f"factor {i} {factor.tag.label} {dump(f'factor_{i}.plmap', factor.element)}"
        if factor.witness is not None and factor.core is not None:
            entry += (
                f" {dump(f'witness_{i}.plmap', factor.witness)}"
                f" {dump(f'core_{i}.plmap', factor.core)}"
            )
        lines.append(entry)
    path = directory / "manifest.txt"
    path.write_text("\n".join(lines) + "\n")
    return path


def _header_field(token: str, name: str, line: int) -> int:
    key, _, value = token.partition("=")
    if key != name:
        raise ParseError(f"expected {name}=<int>, got {token!r}", line)
    try:
        return int(value)
    except ValueError as e:
        raise ParseError(f"bad value in {token!r}", line) from e


def read_manifest(path: Union[str, Path]) -> Factorization:
    """
    Load a factorization written by :func:`write_manifest`.

    Element files are resolved relative to the manifest.

    Raises:
        ParseError: If the manifest does not follow the format
    """
    path = Path(path)
    lines = [line.strip() for line in path.read_text().splitlines() if line.strip()]
    if len(lines) < 2:
        raise ParseError("manifest needs a header and a target line")

    header = lines[0].split()
    if " ".join(header[:2]) != MANIFEST_HEADER or len(header) != 5:
        raise ParseError(f"expected '{MANIFEST_HEADER} n=.. factors=.. l=..'", 1)
    level = _header_field(header[2], "n", 1)
    count = _header_field(header[3], "factors", 1)
    power = _header_field(header[4], "l", 1)

    def load(name: str, line: int) -> PLMap1P:
        file = path.parent / name
        if not file.exists():
            raise ParseError(f"missing element file {name}", line)
        return parse_plmap(file.read_text())

    target_line = lines[1].split()
    if len(target_line) != 2 or target_line[0] != "target":
        raise ParseError("expected 'target <file>'", 2)
    fz = Factorization(load(target_line[1], 2), level, translation_power=power)

    for number, line in enumerate(lines[2:], start=3):
        fields = line.split()
        if len(fields) not in (4, 6) or fields[0] != "factor":
            raise ParseError("expected 'factor <i> <tag> <file> [<witness> <core>]'", number)
        try:
            tag = FactorTag.from_label(fields[2])
        except ValueError as e:
            raise ParseError(str(e), number) from e
        witness = core = None
        if len(fields) == 6:
            witness, core = load(fields[4], number), load(fields[5], number)
        fz.add_factor(Factor(load(fields[3], number), tag, witness, core))

    if len(fz.factors) != count:
        raise ParseError(f"header announces {count} factors, found {len(fz.factors)}", 1)
    return fz
