"""Phoneme-to-word decoding by cheapest segmentation over a lexicon.

Every (word, pronunciation) entry is an arc whose cost is base**-len(pron),
so longer words are exponentially cheaper than any decomposition into the
shorter words they contain. Every inventory symbol also has a fallback arc
of constant cost that emits an out-of-vocabulary token `<SYM>`, so decoding
always succeeds and OOV positions are flagged instead of corrected by hand.
"""

from __future__ import annotations

from dataclasses import dataclass

from .core import DataError, Lexicon, PhonemeSequence


@dataclass(frozen=True)
class Segment:
    token: str
    phonemes: PhonemeSequence
    is_oov: bool
    cost: float


@dataclass(frozen=True)
class Decoding:
    words: tuple[str, ...]
    segments: tuple[Segment, ...]
    total_cost: float

    @property
    def is_full_sentence(self) -> bool:
        return not any(seg.is_oov for seg in self.segments)

    def phonemes(self) -> PhonemeSequence:
        """Concatenation of the chosen pronunciations; equals the input."""
        out: list[str] = []
        for seg in self.segments:
            out.extend(seg.phonemes)
        return tuple(out)


@dataclass(frozen=True)
class DecodeSummary:
    captions: int
    full_sentences: int
    with_oov: int
    oov_tokens: int


def oov_token(symbol: str) -> str:
    return f"<{symbol}>"


class DecoderGraph:
    """Immutable segmentation graph; safe to share across workers."""

    def __init__(self, lexicon: Lexicon, base: float = 2.0, oov_cost: float = 10.0):
        if base <= 1.0:
            raise DataError("weights must decrease with length: base must be > 1")
        if oov_cost <= base ** -1.0:
            raise DataError("oov_cost must exceed the largest single-word cost")
        self.lexicon = lexicon
        self.base = base
        self.oov_cost = oov_cost
        spans: dict[PhonemeSequence, list[tuple[str, float]]] = {}
        for word, prons in lexicon.entries.items():
            for pron in prons:
                spans.setdefault(pron, []).append((word, base ** -len(pron)))
        self._spans = {pron: tuple(sorted(arcs)) for pron, arcs in spans.items()}
        self._max_span = max((len(p) for p in self._spans), default=0)

    def word_arcs(self, span: PhonemeSequence):
        return self._spans.get(span, ())

    @property
    def max_span(self) -> int:
        return self._max_span


def build_decoder(lexicon: Lexicon, base: float = 2.0, oov_cost: float = 10.0) -> DecoderGraph:
    return DecoderGraph(lexicon, base, oov_cost)


def decode(graph: DecoderGraph, seq: PhonemeSequence) -> Decoding:
    """Cheapest segmentation of seq into word pronunciations and OOV arcs.

    Cost ties break toward fewer OOV tokens, then fewer words, then the
    lexicographically smallest word sequence, which also resolves
    homophones deterministically.
    """
    if not seq:
        raise DataError("cannot decode an empty phoneme sequence")
    length = len(seq)
    # best[i]: (cost, oov_count, word_count, words, segments) covering seq[:i]
    best: list[tuple | None] = [None] * (length + 1)
    best[0] = (0.0, 0, 0, (), ())
    for i in range(1, length + 1):
        sym = seq[i - 1]
        prev = best[i - 1]
        token = oov_token(sym)
        winner = (
            prev[0] + graph.oov_cost,
            prev[1] + 1,
            prev[2] + 1,
            prev[3] + (token,),
            prev[4] + (Segment(token, (sym,), True, graph.oov_cost),),
        )
        for k in range(1, min(graph.max_span, i) + 1):
            span = seq[i - k : i]
            arcs = graph.word_arcs(span)
            if not arcs:
                continue
            prev = best[i - k]
            for word, cost in arcs:
                key = (prev[0] + cost, prev[1], prev[2] + 1, prev[3] + (word,))
                if key < winner[:4]:
                    winner = key + (
                        prev[4] + (Segment(word, span, False, cost),),
                    )
        best[i] = winner
    cost, _, _, words, segments = best[length]
    return Decoding(words, segments, cost)


def decode_corpus(graph: DecoderGraph, captions) -> tuple[list[tuple[str, Decoding]], DecodeSummary]:
    """Decode every caption and tally full-sentence vs OOV-containing ones."""
    results = [(image_id, decode(graph, seq)) for image_id, seq in captions]
    return results, summarize_decodings(dec for _, dec in results)


def summarize_decodings(decodings) -> DecodeSummary:
    captions = full = oov_tokens = 0
    for dec in decodings:
        captions += 1
        n_oov = sum(1 for seg in dec.segments if seg.is_oov)
        oov_tokens += n_oov
        if n_oov == 0:
            full += 1
    return DecodeSummary(captions, full, captions - full, oov_tokens)


def format_decoded_line(image_id: str, decoding: Decoding) -> str:
    return f"{image_id}\t{' '.join(decoding.words)}"
