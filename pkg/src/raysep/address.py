"""Symbolic dynamics on external addresses.

An address is an eventually periodic sequence of integer strip symbols,
stored as a preperiod followed by a repeating block.  Instances are always
kept in canonical form, so equality of objects is equality of sequences.
"""
from __future__ import annotations

import functools
import itertools
import math
from dataclasses import dataclass


def _minimal_block(block: tuple[int, ...]) -> tuple[int, ...]:
    n = len(block)
    for d in range(1, n + 1):
        if n % d == 0 and block == block[:d] * (n // d):
            return block[:d]
    return block


def canonical(preperiod, period) -> tuple[tuple[int, ...], tuple[int, ...]]:
    """Reduce ``(preperiod, period)`` to its canonical representation."""
    pre = tuple(int(s) for s in preperiod)
    per = _minimal_block(tuple(int(s) for s in period))
    if not per:
        raise ValueError("period block must be nonempty")
    # absorb trailing preperiod symbols into a rotated period block
    while pre and pre[-1] == per[-1]:
        pre = pre[:-1]
        per = (per[-1],) + per[:-1]
    return pre, per


@functools.total_ordering
@dataclass(frozen=True)
class ExternalAddress:
    """Eventually periodic symbol sequence ``preperiod + period period ...``."""

    preperiod: tuple[int, ...]
    period: tuple[int, ...]

    def __post_init__(self):
        pre, per = canonical(self.preperiod, self.period)
        object.__setattr__(self, "preperiod", pre)
        object.__setattr__(self, "period", per)

    @classmethod
    def periodic(cls, *block: int) -> ExternalAddress:
        return cls((), tuple(block))

    @classmethod
    def parse(cls, text: str) -> ExternalAddress:
        """Parse the text form ``"3|1,2"``; ``"|0"`` is the constant sequence 0."""
        if text.count("|") != 1:
            raise ValueError(f"address {text!r} must contain exactly one '|'")
        left, right = text.split("|")

        def symbols(part):
            part = part.strip()
            if not part:
                return ()
            try:
                return tuple(int(s) for s in part.split(","))
            except ValueError:
                raise ValueError(f"address {text!r} has a non-integer symbol") from None

        period = symbols(right)
        if not period:
            raise ValueError(f"address {text!r} has an empty period block")
        return cls(symbols(left), period)

    def __str__(self) -> str:
        return ",".join(map(str, self.preperiod)) + "|" + ",".join(map(str, self.period))

    @property
    def is_periodic(self) -> bool:
        return not self.preperiod

    @property
    def period_length(self) -> int:
        return len(self.period)

    def symbol(self, k: int) -> int:
        """The ``k``-th symbol (0-based) of the infinite sequence."""
        if k < len(self.preperiod):
            return self.preperiod[k]
        return self.period[(k - len(self.preperiod)) % len(self.period)]

    def symbols(self, n: int) -> tuple[int, ...]:
        return tuple(self.symbol(k) for k in range(n))

    def shift(self) -> ExternalAddress:
        return shift(self)

    def max_abs_symbol(self) -> int:
        return max(abs(s) for s in self.preperiod + self.period)

    def __lt__(self, other):
        if not isinstance(other, ExternalAddress):
            return NotImplemented
        return compare(self, other) < 0


def shift(a: ExternalAddress) -> ExternalAddress:
    """Drop the first symbol."""
    if a.preperiod:
        return ExternalAddress(a.preperiod[1:], a.period)
    return ExternalAddress((), a.period[1:] + a.period[:1])


def compare(a: ExternalAddress, b: ExternalAddress) -> int:
    """Lexicographic order of the infinite sequences: -1, 0 or 1.

    Past ``max(preperiods) + lcm(periods)`` symbols both sequences repeat in
    lockstep, so agreement up to there means equality.
    """
    n = max(len(a.preperiod), len(b.preperiod)) + math.lcm(len(a.period), len(b.period))
    for k in range(n):
        x, y = a.symbol(k), b.symbol(k)
        if x != y:
            return -1 if x < y else 1
    return 0


def enumerate_periodic(p: int, M: int) -> list[ExternalAddress]:
    """All purely periodic addresses with period dividing ``p``, symbols in ``[-M, M]``."""
    if p < 1 or M < 0:
        raise ValueError("need p >= 1 and M >= 0")
    found = {ExternalAddress((), seq) for seq in itertools.product(range(-M, M + 1), repeat=p)}
    return sorted(found, key=functools.cmp_to_key(compare))
