"""CIDEr: TF-IDF weighted n-gram cosine consensus with the references.

Document frequency of an n-gram is the number of images whose reference
set contains it; an n-gram that never occurs in any reference set keeps
a document frequency of one, giving candidate-only n-grams the maximum
IDF. This is the plain variant: no length penalty, no count clipping.
"""

from __future__ import annotations

import math

from .base import MetricScore, ngram_counts


def _document_frequencies(pairs, max_n: int) -> dict:
    df: dict = {}
    for pair in pairs:
        seen = set()
        for ref in pair.references:
            for n in range(1, max_n + 1):
                seen.update(ngram_counts(ref, n))
        for gram in seen:
            df[gram] = df.get(gram, 0) + 1
    return df


def _tfidf_vector(seq, n: int, idf) -> dict:
    counts = ngram_counts(seq, n)
    total = sum(counts.values())
    if total == 0:
        return {}
    return {gram: (count / total) * idf(gram) for gram, count in counts.items()}


def _cosine(a: dict, b: dict) -> float:
    norm_a = math.sqrt(sum(v * v for v in a.values()))
    norm_b = math.sqrt(sum(v * v for v in b.values()))
    if norm_a == 0.0 or norm_b == 0.0:
        return 0.0
    dot = sum(v * b[g] for g, v in a.items() if g in b)
    return dot / (norm_a * norm_b)


def cider(pairs, max_n: int = 4) -> MetricScore:
    """Corpus CIDEr with per-caption scores.

    Needs the whole corpus up front: IDF weights come from a document
    frequency pass over every image's reference set.
    """
    pairs = list(pairs)
    if not pairs:
        raise ValueError("empty corpus")
    if max_n < 1:
        raise ValueError("max_n must be >= 1")
    n_images = len(pairs)
    df = _document_frequencies(pairs, max_n)

    def idf(gram) -> float:
        return math.log(n_images / max(df.get(gram, 1), 1))

    per_caption: dict[str, float] = {}
    for pair in pairs:
        total = 0.0
        for n in range(1, max_n + 1):
            cand_vec = _tfidf_vector(pair.candidate, n, idf)
            sims = [
                _cosine(cand_vec, _tfidf_vector(ref, n, idf))
                for ref in pair.references
            ]
            total += sum(sims) / len(sims)
        per_caption[pair.image] = 100.0 * total / max_n
    value = sum(per_caption.values()) / n_images
    return MetricScore("CIDEr", value, per_caption)
