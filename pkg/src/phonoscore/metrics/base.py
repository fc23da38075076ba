"""Shared pieces for the metric implementations."""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field


def ngram_counts(seq, n: int) -> Counter:
    """Multiset of order-n n-grams of a sequence (empty if len(seq) < n)."""
    return Counter(tuple(seq[i : i + n]) for i in range(len(seq) - n + 1))


@dataclass(frozen=True)
class NgramProfile:
    n: int
    counts: Counter = field(hash=False)

    @classmethod
    def from_sequence(cls, seq, n: int) -> "NgramProfile":
        if n < 1:
            raise ValueError("n-gram order must be >= 1")
        return cls(n, ngram_counts(seq, n))

    @property
    def total(self) -> int:
        return sum(self.counts.values())


@dataclass
class MetricScore:
    """A corpus-level metric value, optionally with per-caption scores.

    Values are reported on a 0-100 scale; PER may exceed 100.
    """

    metric: str
    value: float
    per_caption: dict[str, float] | None = None
    notes: tuple[str, ...] = ()
