"""Caption metrics over phoneme sequences, all reported on a 0-100 scale."""

from __future__ import annotations

from .base import MetricScore, NgramProfile, ngram_counts
from .bleu import (
    bleu_corpus,
    bleu_per_pair_average,
    bleu_sentence,
    brevity_penalty,
    closest_reference_length,
    modified_precision,
)
from .cider import cider
from .meteor import MeteorParams, chunk_minimal_alignment, meteor, meteor_corpus
from .per import levenshtein, per_aggregate, phoneme_error_rate
from .rouge import lcs_length, rouge_l, rouge_l_corpus

ALL_METRICS = (
    "BLEU1", "BLEU2", "BLEU3", "BLEU4", "BLEU5", "BLEU6", "BLEU7", "BLEU8",
    "METEOR", "ROUGE-L", "CIDEr", "PER",
)

AGGREGATION_MODES = ("multi_ref", "per_pair")


def score_pairs(pairs, metrics=ALL_METRICS, mode: str = "multi_ref",
                epsilon: float = 1e-9) -> dict[str, MetricScore]:
    """Compute the selected metrics over a corpus of evaluation pairs.

    multi_ref scores each candidate against all its references (pooled
    corpus BLEU, best-reference PER); per_pair expands every pair into
    single-reference pairs and averages, matching tools that cannot use
    multiple references. Per-caption BLEU is always smoothed sentence
    BLEU, which is what enters rating correlations.
    """
    pairs = list(pairs)
    if not pairs:
        raise ValueError("empty corpus")
    if mode not in AGGREGATION_MODES:
        raise ValueError(f"unknown aggregation mode {mode!r}")
    unknown = [m for m in metrics if m not in ALL_METRICS]
    if unknown:
        raise ValueError(f"unknown metric(s): {', '.join(unknown)}")

    results: dict[str, MetricScore] = {}
    for name in ALL_METRICS:
        if name not in metrics:
            continue
        if name.startswith("BLEU"):
            order = int(name[4:])
            if mode == "multi_ref":
                score = bleu_corpus(pairs, order)
                score.per_caption = {
                    p.image: bleu_sentence(p.candidate, p.references, order, epsilon)
                    for p in pairs
                }
            else:
                score = bleu_per_pair_average(pairs, order, epsilon)
                score.per_caption = {
                    p.image: sum(
                        bleu_sentence(p.candidate, [ref], order, epsilon)
                        for ref in p.references
                    ) / len(p.references)
                    for p in pairs
                }
        elif name == "PER":
            per_mode = "best_reference" if mode == "multi_ref" else "per_pair_average"
            score = per_aggregate(pairs, per_mode)
        elif name == "ROUGE-L":
            score = rouge_l_corpus(pairs)
        elif name == "METEOR":
            score = meteor_corpus(pairs)
        else:
            score = cider(pairs)
        results[name] = score
    return results
