"""Load occurrence positions and scan sequences for exact motif hits."""

from __future__ import annotations

import logging
import math
import re
from dataclasses import dataclass

import numpy as np
from numpy.typing import NDArray

from pointrep.defaults import DEFAULT_SPACER
from pointrep.estimator import ProcessSample

__all__ = [
    "OccurrenceSet",
    "PositionsParseError",
    "read_positions",
    "read_fasta",
    "reverse_complement",
    "scan_fasta",
    "rescale",
    "horizon",
    "to_sample",
]

logger = logging.getLogger(__name__)

_COMPLEMENT = str.maketrans("acgt", "tgca")
_NON_ACGT = re.compile(r"[^acgt]")

# Letter filling the gap between the strands; never part of a motif
_SPACER_BASE = "n"


@dataclass(frozen=True, eq=False)
class OccurrenceSet:
    """Sorted, nonnegative occurrence positions.

    Attributes:
        positions: The positions, in units of ``scale`` bases.
        scale: Bases per unit (1 for bases, 1000 for kilobases).
        source: Free-form label of where the positions came from.

    """

    positions: NDArray[np.float64]
    scale: float = 1.0
    source: str = ""

    def __post_init__(self):
        arr = np.sort(np.asarray(self.positions, dtype=np.float64).ravel())
        if not np.all(np.isfinite(arr)) or (arr.size and arr[0] < 0):
            raise ValueError("positions must be finite and nonnegative")
        if not self.scale > 0:
            raise ValueError("scale must be positive")
        arr.flags.writeable = False
        object.__setattr__(self, "positions", arr)

    def __len__(self) -> int:
        return int(self.positions.size)

    @property
    def unit(self) -> str:
        if math.isclose(self.scale, 1.0):
            return "bases"
        if math.isclose(self.scale, 1000.0):
            return "kilobases"
        return f"{self.scale:g} bases"


class PositionsParseError(ValueError):
    """A line of a positions file is not a nonnegative decimal."""

    def __init__(self, line_number: int, line: str, reason: str = "not a number"):
        self.line_number = line_number
        self.line = line
        super().__init__(f"line {line_number}: {reason}: {line.strip()!r}")


def read_positions(text: str, source: str = "") -> OccurrenceSet:
    """Parse one decimal per line; '#' starts a comment, blank lines are skipped.

    Raises:
        PositionsParseError: On the first malformed or negative entry.

    """
    values: list[float] = []
    for number, line in enumerate(text.splitlines(), start=1):
        content = line.split("#", 1)[0].strip()
        if not content:
            continue
        try:
            value = float(content)
        except ValueError:
            raise PositionsParseError(number, line) from None
        if not math.isfinite(value) or value < 0:
            raise PositionsParseError(number, line, "not a finite nonnegative position")
        values.append(value)
    return OccurrenceSet(np.array(values), source=source)


def read_fasta(text: str) -> str:
    """Concatenate the sequence lines of every record, headers dropped."""
    lines = (line.strip() for line in text.splitlines())
    return "".join(line for line in lines if line and not line.startswith(">"))


def reverse_complement(sequence: str) -> str:
    """Reverse complement; letters other than a, c, g, t become 'n'."""
    return _NON_ACGT.sub(_SPACER_BASE, sequence.lower()).translate(_COMPLEMENT)[::-1]


def _hits(sequence: str, motif: str) -> list[int]:
    """0-based starts of every (possibly overlapping) occurrence."""
    return [m.start() for m in re.finditer(f"(?={motif})", sequence)]


def scan_fasta(
    sequence: str, motif: str, spacer_len: int = DEFAULT_SPACER
) -> OccurrenceSet:
    """1-based motif positions over both strands of ``sequence``.

    The strands are laid out as one virtual sequence: the forward strand
    (length L), ``spacer_len`` non-matching bases, then the reverse
    complement read in its own 5' to 3' direction. Reverse-strand hits
    are therefore reported beyond ``L + spacer_len``.

    """
    motif = motif.strip().lower()
    if not motif:
        raise ValueError("motif must not be empty")
    if _NON_ACGT.search(motif):
        raise ValueError(f"motif must only use a, c, g, t: {motif!r}")
    if spacer_len < 0:
        raise ValueError("spacer_len must be nonnegative")

    forward = sequence.lower()
    virtual = forward + _SPACER_BASE * spacer_len + reverse_complement(forward)
    positions = np.array(_hits(virtual, motif), dtype=np.float64) + 1
    logger.info(
        "motif %s: %d hits over %d virtual bases", motif, positions.size, len(virtual)
    )
    return OccurrenceSet(positions, source=f"motif:{motif}")


def rescale(occ: OccurrenceSet, factor: float) -> OccurrenceSet:
    """Divide positions by ``factor`` (1000 turns bases into kilobases)."""
    if not factor > 0:
        raise ValueError("factor must be positive")
    return OccurrenceSet(occ.positions / factor, occ.scale * factor, occ.source)


def horizon(length: float, factor: float = 1.0) -> int:
    """Smallest integer horizon covering ``length`` bases at ``factor``."""
    if not factor > 0:
        raise ValueError("factor must be positive")
    return math.ceil(length / factor)


def to_sample(
    parents: OccurrenceSet, children: OccurrenceSet, T: float
) -> ProcessSample:
    """Assign roles: the estimator sees ``parents`` as U and ``children`` as N."""
    if not math.isclose(parents.scale, children.scale, rel_tol=1e-12):
        raise ValueError(f"units differ: {parents.unit} vs {children.unit}")
    if parents.positions.size and not T > parents.positions[-1]:
        last = parents.positions[-1]
        raise ValueError(f"T={T:g} must exceed the last parent at {last:g}")
    return ProcessSample(parents.positions, children.positions, T)
