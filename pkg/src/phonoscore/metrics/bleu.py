"""BLEU over phoneme sequences: pooled corpus mode and per-pair averaging."""

from __future__ import annotations

import math
from collections import Counter

from .base import MetricScore, ngram_counts


def modified_precision(candidate, references, n: int) -> tuple[int, int]:
    """Clipped n-gram matches and total candidate n-grams.

    Each candidate n-gram counts at most as often as it appears in the
    single reference where it is most frequent.
    """
    if n < 1:
        raise ValueError("n-gram order must be >= 1")
    cand = ngram_counts(candidate, n)
    total = sum(cand.values())
    if total == 0:
        return 0, 0
    max_ref: Counter = Counter()
    for ref in references:
        for gram, count in ngram_counts(ref, n).items():
            if count > max_ref[gram]:
                max_ref[gram] = count
    clipped = sum(min(count, max_ref[gram]) for gram, count in cand.items())
    return clipped, total


def closest_reference_length(candidate_len: int, reference_lens) -> int:
    """Reference length closest to the candidate's, ties toward the shorter."""
    lens = list(reference_lens)
    if not lens:
        raise ValueError("empty reference list")
    return min(lens, key=lambda r: (abs(r - candidate_len), r))


def brevity_penalty(candidate_len: int, reference_lens) -> float:
    if candidate_len < 1:
        raise ValueError("candidate length must be >= 1")
    r = closest_reference_length(candidate_len, reference_lens)
    if candidate_len >= r:
        return 1.0
    return math.exp(1.0 - r / candidate_len)


def bleu_corpus(pairs, max_n: int = 4) -> MetricScore:
    """Corpus BLEU: precisions pooled over all pairs, BP from summed lengths.

    Any pooled precision of zero (including orders longer than every
    candidate) makes the whole score zero.
    """
    pairs = list(pairs)
    if not pairs:
        raise ValueError("empty corpus")
    if max_n < 1 or max_n > 8:
        raise ValueError("max_n must be in 1..8")
    clipped = [0] * max_n
    totals = [0] * max_n
    cand_len = 0
    ref_len = 0
    for pair in pairs:
        cand_len += len(pair.candidate)
        ref_len += closest_reference_length(
            len(pair.candidate), (len(r) for r in pair.references)
        )
        for n in range(1, max_n + 1):
            c, t = modified_precision(pair.candidate, pair.references, n)
            clipped[n - 1] += c
            totals[n - 1] += t

    if any(c == 0 for c in clipped):
        value = 0.0
    else:
        log_mean = sum(math.log(c / t) for c, t in zip(clipped, totals)) / max_n
        bp = 1.0 if cand_len >= ref_len else math.exp(1.0 - ref_len / cand_len)
        value = 100.0 * bp * math.exp(log_mean)
    return MetricScore(f"BLEU{max_n}", value)


def bleu_sentence(candidate, references, max_n: int = 4, epsilon: float = 1e-9) -> float:
    """Smoothed sentence BLEU: zero precisions become epsilon/total.

    Only zero precisions are touched, so a candidate identical to its
    reference still scores exactly 100.
    """
    if max_n < 1:
        raise ValueError("max_n must be >= 1")
    if epsilon <= 0:
        raise ValueError("epsilon must be > 0")
    log_sum = 0.0
    for n in range(1, max_n + 1):
        c, t = modified_precision(candidate, references, n)
        if t == 0:
            p = epsilon
        elif c == 0:
            p = epsilon / t
        else:
            p = c / t
        log_sum += math.log(p)
    bp = brevity_penalty(len(candidate), [len(r) for r in references])
    return 100.0 * bp * math.exp(log_sum / max_n)


def bleu_per_pair_average(pairs, max_n: int = 4, epsilon: float = 1e-9) -> MetricScore:
    """Expand each pair into single-reference pairs and average sentence BLEU."""
    pairs = list(pairs)
    if not pairs:
        raise ValueError("empty corpus")
    scores = [
        bleu_sentence(pair.candidate, [ref], max_n, epsilon)
        for pair in pairs
        for ref in pair.references
    ]
    return MetricScore(f"BLEU{max_n}", sum(scores) / len(scores))
