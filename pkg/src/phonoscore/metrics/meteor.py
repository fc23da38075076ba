"""METEOR over phoneme sequences with exact symbol matching.

The alignment between candidate and reference is a maximum one-to-one
matching of identical symbols. Among all maximum matchings we pick one
with the fewest chunks, where a chunk is a maximal run of matches that
are contiguous and in the same order on both sides. The chunk-minimal
matching is found exhaustively while the number of distinct maximum
matchings stays within a budget; beyond that a greedy longest-run
search takes over and the result is flagged as heuristic.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import combinations, permutations, product

from .base import MetricScore

MAX_ALTERNATIVES = 2**20


@dataclass(frozen=True)
class MeteorParams:
    recall_weight: float = 9.0
    penalty_gamma: float = 0.5
    penalty_beta: float = 3.0
    max_alternatives: int = MAX_ALTERNATIVES

    def __post_init__(self) -> None:
        if self.recall_weight <= 0:
            raise ValueError("recall_weight must be > 0")
        if not 0 <= self.penalty_gamma <= 1:
            raise ValueError("penalty_gamma must be in [0, 1]")
        if self.penalty_beta < 1:
            raise ValueError("penalty_beta must be >= 1")
        if self.max_alternatives < 1:
            raise ValueError("max_alternatives must be >= 1")


def _positions(seq) -> dict:
    pos: dict = {}
    for i, sym in enumerate(seq):
        pos.setdefault(sym, []).append(i)
    return pos


def count_matching_alternatives(candidate, reference) -> int:
    """Number of distinct maximum one-to-one exact matchings."""
    cpos = _positions(candidate)
    rpos = _positions(reference)
    total = 1
    for sym in cpos.keys() & rpos.keys():
        c, r = len(cpos[sym]), len(rpos[sym])
        m = min(c, r)
        total *= math.comb(c, m) * math.comb(r, m) * math.factorial(m)
    return total


def _chunk_count(matching) -> int:
    # matching: (candidate_pos, reference_pos) pairs sorted by candidate_pos
    chunks = 0
    prev_c = prev_r = None
    for c, r in matching:
        if prev_c is None or c != prev_c + 1 or r != prev_r + 1:
            chunks += 1
        prev_c, prev_r = c, r
    return chunks


def _exhaustive_min_chunks(cpos, rpos) -> int:
    per_symbol = []
    for sym in sorted(cpos.keys() & rpos.keys()):
        m = min(len(cpos[sym]), len(rpos[sym]))
        options = [
            tuple(zip(csub, rsel))
            for csub in combinations(cpos[sym], m)
            for rsel in permutations(rpos[sym], m)
        ]
        per_symbol.append(options)
    best = None
    for combo in product(*per_symbol):
        matching = sorted(pair for group in combo for pair in group)
        chunks = _chunk_count(matching)
        if best is None or chunks < best:
            best = chunks
            if best == 1:
                break
    return best or 0


def _greedy_matching(candidate, reference) -> list:
    """Repeatedly match the longest free common run, leftmost first."""
    n, m = len(candidate), len(reference)
    cfree = [True] * n
    rfree = [True] * m
    pairs: list[tuple[int, int]] = []
    while True:
        best = None  # (-run_length, i, j)
        for i in range(n):
            if not cfree[i]:
                continue
            for j in range(m):
                if not rfree[j] or candidate[i] != reference[j]:
                    continue
                length = 0
                while (
                    i + length < n
                    and j + length < m
                    and cfree[i + length]
                    and rfree[j + length]
                    and candidate[i + length] == reference[j + length]
                ):
                    length += 1
                key = (-length, i, j)
                if best is None or key < best:
                    best = key
        if best is None:
            break
        length, i, j = -best[0], best[1], best[2]
        for k in range(length):
            cfree[i + k] = False
            rfree[j + k] = False
            pairs.append((i + k, j + k))
    return sorted(pairs)


def chunk_minimal_alignment(candidate, reference, max_alternatives: int = MAX_ALTERNATIVES):
    """Return (matches, chunks, exact) for the chunk-minimal maximum matching."""
    cpos = _positions(candidate)
    rpos = _positions(reference)
    matches = sum(
        min(len(cpos[sym]), len(rpos[sym])) for sym in cpos.keys() & rpos.keys()
    )
    if matches == 0:
        return 0, 0, True
    if count_matching_alternatives(candidate, reference) <= max_alternatives:
        return matches, _exhaustive_min_chunks(cpos, rpos), True
    matching = _greedy_matching(candidate, reference)
    return matches, _chunk_count(matching), False


def _score_against(candidate, reference, params: MeteorParams) -> tuple[float, bool]:
    matches, chunks, exact = chunk_minimal_alignment(
        candidate, reference, params.max_alternatives
    )
    if matches == 0:
        return 0.0, exact
    precision = matches / len(candidate)
    recall = matches / len(reference)
    fmean = (
        (params.recall_weight + 1)
        * precision
        * recall
        / (recall + params.recall_weight * precision)
    )
    penalty = params.penalty_gamma * (chunks / matches) ** params.penalty_beta
    return 100.0 * fmean * (1.0 - penalty), exact


def meteor(candidate, references, params: MeteorParams | None = None) -> float:
    """Best METEOR score over the references, scaled to 0-100."""
    score, _ = meteor_detailed(candidate, references, params)
    return score


def meteor_detailed(candidate, references, params: MeteorParams | None = None) -> tuple[float, bool]:
    """Like meteor(), also reporting whether every alignment was exact."""
    params = params or MeteorParams()
    best = 0.0
    all_exact = True
    for ref in references:
        score, exact = _score_against(candidate, ref, params)
        best = max(best, score)
        all_exact = all_exact and exact
    return best, all_exact


def meteor_corpus(pairs, params: MeteorParams | None = None) -> MetricScore:
    pairs = list(pairs)
    if not pairs:
        raise ValueError("empty corpus")
    params = params or MeteorParams()
    per_caption: dict[str, float] = {}
    heuristic_captions = 0
    for pair in pairs:
        score, exact = meteor_detailed(pair.candidate, pair.references, params)
        per_caption[pair.image] = score
        if not exact:
            heuristic_captions += 1
    notes = ()
    if heuristic_captions:
        notes = (
            f"chunk search used the greedy heuristic on {heuristic_captions} caption(s)",
        )
    value = sum(per_caption.values()) / len(pairs)
    return MetricScore("METEOR", value, per_caption, notes)
