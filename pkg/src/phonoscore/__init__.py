"""phonoscore: scoring, word decoding and human-rating tools for
phoneme-level image captions."""

from .core import (
    DataError,
    EvalPair,
    Inventory,
    Lexicon,
    PhonemeSequence,
    group_pairs,
    load_inventory,
    parse_caption_file,
    parse_lexicon,
)
from .lexdecode import DecoderGraph, Decoding, build_decoder, decode, decode_corpus
from .metrics import ALL_METRICS, MetricScore, score_pairs

__version__ = "0.1.0"
