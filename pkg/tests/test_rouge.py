import random

import pytest

from phonoscore.core import EvalPair
from phonoscore.metrics import lcs_length, rouge_l, rouge_l_corpus

import oracles

CAND = ("B", "D", "C", "A", "B", "A")
REF = ("A", "B", "C", "B", "D", "A", "B")


class TestLcsLength:
    def test_classic_example(self):
        assert oracles.naive_lcs(CAND, REF) == 4
        assert lcs_length(CAND, REF) == 4

    def test_self(self):
        seq = ("A", "B", "A", "C")
        assert lcs_length(seq, seq) == len(seq)

    def test_disjoint(self):
        assert lcs_length(("A", "B"), ("C", "D")) == 0

    def test_symmetric_and_bounded(self):
        rng = random.Random(31)
        symbols = ["A", "B", "C", "D"]
        for _ in range(100):
            a = tuple(rng.choice(symbols) for _ in range(rng.randint(0, 10)))
            b = tuple(rng.choice(symbols) for _ in range(rng.randint(0, 10)))
            forward = lcs_length(a, b)
            assert forward == lcs_length(b, a)
            assert forward <= min(len(a), len(b))

    def test_matches_brute_force(self):
        rng = random.Random(33)
        symbols = ["A", "B", "C"]
        for _ in range(60):
            a = tuple(rng.choice(symbols) for _ in range(rng.randint(0, 11)))
            b = tuple(rng.choice(symbols) for _ in range(rng.randint(0, 11)))
            assert lcs_length(a, b) == oracles.naive_lcs(a, b)


class TestRougeL:
    def test_identity(self):
        seq = ("A", "B", "C")
        assert rouge_l(seq, [seq]) == pytest.approx(100.0, abs=1e-12)

    def test_worked_example(self):
        # LCS = 4 (checked by brute force above); P = 4/6, R = 4/7, beta = 1.2
        expected = 100.0 * (122.0 / 201.0)
        assert rouge_l(CAND, [REF], beta=1.2) == pytest.approx(expected, abs=1e-9)

    def test_no_overlap(self):
        assert rouge_l(("A",), [("B",)]) == 0.0

    def test_max_over_references(self):
        cand = ("A", "B", "C")
        refs = [("X", "Y"), ("A", "B", "C"), ("A", "C")]
        assert rouge_l(cand, refs) == pytest.approx(100.0, abs=1e-12)

    def test_matches_oracle(self):
        rng = random.Random(35)
        symbols = [f"S{i}" for i in range(10)]
        for _ in range(60):
            cand = tuple(rng.choice(symbols) for _ in range(rng.randint(1, 12)))
            refs = [
                tuple(rng.choice(symbols) for _ in range(rng.randint(1, 12)))
                for _ in range(rng.randint(1, 3))
            ]
            assert rouge_l(cand, refs) == pytest.approx(
                oracles.naive_rouge_l(cand, refs), abs=1e-9
            )

    def test_corpus_is_mean(self):
        pairs = [
            EvalPair("x", ("A", "B"), (("A", "B"),)),
            EvalPair("y", ("A",), (("B",),)),
        ]
        score = rouge_l_corpus(pairs)
        assert score.value == pytest.approx(50.0, abs=1e-12)
        assert score.per_caption == {"x": pytest.approx(100.0), "y": 0.0}
