import random

import pytest

from phonoscore.core import DataError, Lexicon
from phonoscore.lexdecode import (
    build_decoder,
    decode,
    decode_corpus,
    format_decoded_line,
    summarize_decodings,
)

import oracles

# lexicon covering the two example sentences, with "a" ambiguous between
# EY and AX and "inn" as a homophone of "in"
SENTENCE_LEXICON = {
    "a": (("EY",), ("AX",)),
    "group": (("G", "R", "UW", "P"),),
    "of": (("AX", "F"),),
    "skiers": (("S", "K", "IY", "R", "Z"),),
    "are": (("AXR",),),
    "skiing": (("S", "K", "IY", "IX", "NG"),),
    "down": (("D", "AW", "N"),),
    "snowy": (("S", "N", "OW", "IY"),),
    "hill": (("HH", "IH", "L"),),
    "man": (("M", "AE", "N"),),
    "in": (("IH", "N"),),
    "inn": (("IH", "N"),),
    "yellow": (("Y", "EH", "L", "OW"),),
    "shirt": (("SH", "ER", "T"),),
    "is": (("IH", "Z"),),
    "standing": (("S", "T", "AE", "N", "D", "IX", "NG"),),
    "on": (("AA", "N"),),
    "street": (("S", "T", "R", "IY", "T"),),
}

LEFT_PHONES = (
    "EY G R UW P AX F S K IY R Z AXR S K IY IX NG D AW N EY S N OW IY HH IH L"
).split()
RIGHT_PHONES = (
    "EY M AE N IH N EY Y EH L OW SH ER T IH Z S T AE N D IX NG AA N AX S T R IY T"
).split()


def make_graph(entries, base=2.0, oov_cost=10.0):
    return build_decoder(Lexicon(dict(entries)), base, oov_cost)


class TestBuildDecoder:
    def test_word_costs(self):
        graph = make_graph({"man": (("M", "AE", "N"),)})
        [(word, cost)] = graph.word_arcs(("M", "AE", "N"))
        assert (word, cost) == ("man", 0.125)

    def test_single_phoneme_word_cost(self):
        graph = make_graph({"a": (("EY",),)})
        [(_, cost)] = graph.word_arcs(("EY",))
        assert cost == 0.5

    def test_base_must_exceed_one(self):
        with pytest.raises(DataError, match="weights must decrease"):
            make_graph({"a": (("EY",),)}, base=1.0)

    def test_oov_cost_must_exceed_word_costs(self):
        with pytest.raises(DataError, match="oov_cost"):
            make_graph({"a": (("EY",),)}, oov_cost=0.25)


class TestDecode:
    def test_whole_word_beats_decomposition(self):
        graph = make_graph(
            {
                "a": (("AH",),),
                "man": (("M", "AE", "N"),),
                "ma": (("M", "AE"),),
                "n": (("N",),),
            }
        )
        result = decode(graph, ("M", "AE", "N"))
        assert result.words == ("man",)
        assert result.total_cost == 0.125

    def test_exact_word(self):
        graph = make_graph({"dog": (("D", "AO", "G"),)})
        result = decode(graph, ("D", "AO", "G"))
        assert result.words == ("dog",)
        assert result.is_full_sentence

    def test_left_sentence(self):
        graph = make_graph(SENTENCE_LEXICON)
        result = decode(graph, tuple(LEFT_PHONES))
        assert result.words == (
            "a", "group", "of", "skiers", "are", "skiing", "down", "a", "snowy", "hill",
        )
        assert result.is_full_sentence
        assert result.phonemes() == tuple(LEFT_PHONES)

    def test_right_sentence_with_homophone_tiebreak(self):
        graph = make_graph(SENTENCE_LEXICON)
        result = decode(graph, tuple(RIGHT_PHONES))
        # "in" wins over homophone "inn" lexicographically
        assert result.words == (
            "a", "man", "in", "a", "yellow", "shirt", "is", "standing", "on", "a", "street",
        )
        assert result.is_full_sentence
        assert result.phonemes() == tuple(RIGHT_PHONES)

    def test_oov_symbol_becomes_flagged_token(self):
        graph = make_graph({"dog": (("D", "AO", "G"),)})
        result = decode(graph, ("D", "AO", "G", "ZH"))
        assert result.words == ("dog", "<ZH>")
        assert not result.is_full_sentence
        assert result.phonemes() == ("D", "AO", "G", "ZH")

    def test_empty_input_rejected(self):
        graph = make_graph({"a": (("EY",),)})
        with pytest.raises(DataError):
            decode(graph, ())

    def test_round_trip_and_optimality_on_random_instances(self):
        rng = random.Random(71)
        symbols = [f"S{i}" for i in range(8)]
        for _ in range(150):
            n_words = rng.randint(1, 20)
            entries = {}
            for w in range(n_words):
                pron = tuple(rng.choice(symbols) for _ in range(rng.randint(1, 4)))
                entries.setdefault(f"w{w:02d}", []).append(pron)
            entries = {w: tuple(set(ps)) for w, ps in entries.items()}
            graph = make_graph(entries)
            seq = tuple(rng.choice(symbols) for _ in range(rng.randint(1, 12)))
            result = decode(graph, seq)
            assert result.phonemes() == seq
            best = oracles.naive_best_decoding(entries, seq)
            assert result.total_cost == pytest.approx(best[0], abs=1e-12)
            # full tie-break key agrees with exhaustive enumeration
            n_oov = sum(1 for s in result.segments if s.is_oov)
            assert (n_oov, len(result.words), result.words) == best[1:]

    def test_determinism(self):
        graph = make_graph(SENTENCE_LEXICON)
        first = decode(graph, tuple(RIGHT_PHONES))
        second = decode(graph, tuple(RIGHT_PHONES))
        assert first == second

    def test_larger_base_prefers_fewer_words(self):
        entries = {
            "ab": (("A", "B"),),
            "abc": (("A", "B", "C"),),
            "c": (("C",),),
        }
        seq = ("A", "B", "C")
        for base in (1.5, 2.0, 4.0):
            result = decode(make_graph(entries, base=base), seq)
            assert result.words == ("abc",)


class TestDecodeCorpus:
    def test_summary_counts(self):
        graph = make_graph({"dog": (("D", "AO", "G"),)})
        captions = [
            ("i1", ("D", "AO", "G")),
            ("i2", ("D", "AO", "G", "ZH")),
            ("i3", ("ZH", "ZH")),
        ]
        results, summary = decode_corpus(graph, captions)
        assert [image for image, _ in results] == ["i1", "i2", "i3"]
        assert summary.captions == 3
        assert summary.full_sentences == 1
        assert summary.with_oov == 2
        assert summary.oov_tokens == 3

    def test_all_full_sentences(self):
        graph = make_graph(SENTENCE_LEXICON)
        captions = [("L", tuple(LEFT_PHONES)), ("R", tuple(RIGHT_PHONES))]
        _, summary = decode_corpus(graph, captions)
        assert summary.full_sentences == summary.captions == 2

    def test_empty_lexicon_decodes_everything_as_oov(self):
        graph = build_decoder(Lexicon({}))
        results, summary = decode_corpus(graph, [("i", ("D", "AO"))])
        assert results[0][1].words == ("<D>", "<AO>")
        assert summary.full_sentences == 0

    def test_format_decoded_line(self):
        graph = make_graph({"dog": (("D", "AO", "G"),)})
        result = decode(graph, ("D", "AO", "G"))
        assert format_decoded_line("img7", result) == "img7\tdog"

    def test_summarize_empty(self):
        summary = summarize_decodings([])
        assert summary.captions == 0
