"""Phoneme error rate: edit distance relative to the reference length."""

from __future__ import annotations

from .base import MetricScore

AGGREGATION_MODES = ("best_reference", "per_pair_average")


def levenshtein(a, b) -> int:
    """Unit-cost insert/delete/substitute edit distance."""
    if len(a) < len(b):
        a, b = b, a
    previous = list(range(len(b) + 1))
    for i, sym_a in enumerate(a, start=1):
        current = [i] + [0] * len(b)
        for j, sym_b in enumerate(b, start=1):
            current[j] = min(
                previous[j] + 1,
                current[j - 1] + 1,
                previous[j - 1] + (sym_a != sym_b),
            )
        previous = current
    return previous[len(b)]


def phoneme_error_rate(candidate, reference) -> float:
    """100 * edit distance / reference length; may exceed 100."""
    if not reference:
        raise ValueError("empty reference")
    return 100.0 * levenshtein(candidate, reference) / len(reference)


def per_aggregate(pairs, mode: str = "best_reference") -> MetricScore:
    """Corpus PER.

    best_reference: mean over pairs of the best (lowest) per-reference rate.
    per_pair_average: mean over every (candidate, reference) expansion.
    """
    pairs = list(pairs)
    if not pairs:
        raise ValueError("empty corpus")
    if mode not in AGGREGATION_MODES:
        raise ValueError(f"unknown PER mode {mode!r}")

    per_caption: dict[str, float] = {}
    if mode == "best_reference":
        for pair in pairs:
            per_caption[pair.image] = min(
                phoneme_error_rate(pair.candidate, ref) for ref in pair.references
            )
        value = sum(per_caption.values()) / len(pairs)
    else:
        expansions: list[float] = []
        for pair in pairs:
            rates = [phoneme_error_rate(pair.candidate, ref) for ref in pair.references]
            expansions.extend(rates)
            per_caption[pair.image] = sum(rates) / len(rates)
        value = sum(expansions) / len(expansions)
    return MetricScore("PER", value, per_caption)
