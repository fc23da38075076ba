"""ROUGE-L: longest-common-subsequence F-measure, recall-weighted."""

from __future__ import annotations

from .base import MetricScore

DEFAULT_BETA = 1.2


def lcs_length(a, b) -> int:
    """Length of the longest common subsequence, by dynamic programming."""
    if not a or not b:
        return 0
    previous = [0] * (len(b) + 1)
    for sym_a in a:
        current = [0] * (len(b) + 1)
        for j, sym_b in enumerate(b, start=1):
            if sym_a == sym_b:
                current[j] = previous[j - 1] + 1
            else:
                current[j] = max(previous[j], current[j - 1])
        previous = current
    return previous[len(b)]


def rouge_l(candidate, references, beta: float = DEFAULT_BETA) -> float:
    """Best F_lcs over the references, scaled to 0-100."""
    if beta <= 0:
        raise ValueError("beta must be > 0")
    best = 0.0
    for ref in references:
        lcs = lcs_length(candidate, ref)
        if lcs == 0:
            continue
        precision = lcs / len(candidate)
        recall = lcs / len(ref)
        f = (1 + beta * beta) * precision * recall / (recall + beta * beta * precision)
        best = max(best, f)
    return 100.0 * best


def rouge_l_corpus(pairs, beta: float = DEFAULT_BETA) -> MetricScore:
    pairs = list(pairs)
    if not pairs:
        raise ValueError("empty corpus")
    per_caption = {
        pair.image: rouge_l(pair.candidate, pair.references, beta) for pair in pairs
    }
    return MetricScore("ROUGE-L", sum(per_caption.values()) / len(pairs), per_caption)
