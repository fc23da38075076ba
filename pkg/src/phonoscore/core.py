"""Domain types and file parsers shared by the whole toolkit.

Caption and lexicon files are plain UTF-8 text, one record per line:
an image id (or word), a tab, then space-separated phoneme symbols.
Phoneme symbols are short uppercase ARPABET-style tokens validated
against a configurable inventory.
"""

from __future__ import annotations

import logging
import re
from dataclasses import dataclass

log = logging.getLogger(__name__)

PhonemeSequence = tuple[str, ...]

_LABEL_RE = re.compile(r"[A-Z][A-Z0-9]{0,3}$")

# Extended ARPABET: the common two-letter set plus the reduced vowels and
# syllabic consonants (AX, IX, AXR, ...) that phonetic transcripts use.
DEFAULT_SYMBOLS = (
    # vowels
    "AA", "AE", "AH", "AO", "AW", "AY", "EH", "ER", "EY", "IH", "IY",
    "OW", "OY", "UH", "UW",
    # reduced vowels
    "AX", "AXR", "IX", "UX",
    # consonants
    "B", "CH", "D", "DH", "DX", "EL", "EM", "EN", "F", "G", "HH", "JH",
    "K", "L", "M", "N", "NG", "NX", "P", "Q", "R", "S", "SH", "T", "TH",
    "V", "W", "WH", "Y", "Z", "ZH",
)


class DataError(ValueError):
    """Malformed or inconsistent input data."""


@dataclass(frozen=True)
class Inventory:
    """The set of phoneme labels a corpus is allowed to use."""

    symbols: frozenset[str]

    def __post_init__(self) -> None:
        if not self.symbols:
            raise DataError("inventory is empty")
        for label in self.symbols:
            if not _LABEL_RE.match(label):
                raise DataError(
                    f"invalid phoneme label {label!r}: expected 1-4 uppercase characters"
                )

    def __contains__(self, label: str) -> bool:
        return label in self.symbols

    def __len__(self) -> int:
        return len(self.symbols)

    @classmethod
    def default(cls) -> "Inventory":
        return cls(frozenset(DEFAULT_SYMBOLS))

    @classmethod
    def of(cls, symbols) -> "Inventory":
        return cls(frozenset(symbols))


@dataclass(frozen=True)
class EvalPair:
    """One candidate caption with the reference captions for its image."""

    image: str
    candidate: PhonemeSequence
    references: tuple[PhonemeSequence, ...]

    def __post_init__(self) -> None:
        if not self.image:
            raise DataError("empty image id")
        if not self.candidate:
            raise DataError(f"empty candidate for image {self.image}")
        if not self.references:
            raise DataError(f"no references for image {self.image}")
        for ref in self.references:
            if not ref:
                raise DataError(f"empty reference for image {self.image}")


@dataclass(frozen=True)
class Lexicon:
    """word -> alternate pronunciations, words lowercase."""

    entries: dict[str, tuple[PhonemeSequence, ...]]

    def __post_init__(self) -> None:
        for word, prons in self.entries.items():
            if not word or word != word.lower():
                raise DataError(f"lexicon word {word!r} must be non-empty lowercase")
            if not prons:
                raise DataError(f"lexicon word {word!r} has no pronunciations")
            if len(set(prons)) != len(prons):
                raise DataError(f"duplicate pronunciation for {word!r}")
            for pron in prons:
                if not pron:
                    raise DataError(f"empty pronunciation for {word!r}")

    def __len__(self) -> int:
        return len(self.entries)

    def words(self) -> list[str]:
        return sorted(self.entries)

    def pronunciations(self, word: str) -> tuple[PhonemeSequence, ...]:
        return self.entries[word]


def load_inventory(path) -> Inventory:
    """Read an inventory file: one symbol per line, `#` starts a comment."""
    symbols = []
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if not _LABEL_RE.match(line):
                raise DataError(
                    f"{path}: invalid phoneme label {line!r} at line {lineno}"
                )
            symbols.append(line)
    if not symbols:
        raise DataError(f"{path}: inventory file defines no symbols")
    return Inventory(frozenset(symbols))


def parse_caption_file(path, inventory: Inventory | None = None) -> list[tuple[str, PhonemeSequence]]:
    """Parse a caption file into (image_id, phoneme sequence) records.

    Line order is preserved and an image id may appear on several lines
    (multiple references). Unknown symbols and empty fields are errors.
    """
    inventory = inventory or Inventory.default()
    records: list[tuple[str, PhonemeSequence]] = []
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.rstrip("\r\n")
            if not line.strip():
                continue
            if "\t" not in line:
                raise DataError(f"{path}: missing tab separator at line {lineno}")
            image_id, _, phones = line.partition("\t")
            image_id = image_id.strip()
            if not image_id:
                raise DataError(f"{path}: empty image id at line {lineno}")
            tokens = phones.split()
            if not tokens:
                raise DataError(f"{path}: empty phoneme field at line {lineno}")
            for tok in tokens:
                if tok not in inventory:
                    raise DataError(f"{path}: unknown symbol {tok} at line {lineno}")
            records.append((image_id, tuple(tokens)))
    return records


def format_caption_line(image_id: str, seq: PhonemeSequence) -> str:
    return f"{image_id}\t{' '.join(seq)}"


def write_caption_file(path, records) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for image_id, seq in records:
            fh.write(format_caption_line(image_id, seq) + "\n")


def parse_lexicon(path, inventory: Inventory | None = None) -> Lexicon:
    """Parse a lexicon file: word, tab, space-separated phonemes.

    Repeated words accumulate alternate pronunciations; a line repeating an
    existing (word, pronunciation) pair is deduplicated with a warning.
    """
    inventory = inventory or Inventory.default()
    entries: dict[str, list[PhonemeSequence]] = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.rstrip("\r\n")
            if not line.strip():
                continue
            if "\t" not in line:
                raise DataError(f"{path}: missing tab separator at line {lineno}")
            word, _, phones = line.partition("\t")
            word = word.strip().lower()
            if not word:
                raise DataError(f"{path}: empty word at line {lineno}")
            tokens = phones.split()
            if not tokens:
                raise DataError(f"{path}: empty pronunciation for {word!r} at line {lineno}")
            for tok in tokens:
                if tok not in inventory:
                    raise DataError(f"{path}: unknown symbol {tok} at line {lineno}")
            pron = tuple(tokens)
            prons = entries.setdefault(word, [])
            if pron in prons:
                log.warning("%s: duplicate entry for %r at line %d, ignored", path, word, lineno)
            else:
                prons.append(pron)
    return Lexicon({word: tuple(prons) for word, prons in entries.items()})


def group_pairs(candidates, references, max_references: int = 5) -> list[EvalPair]:
    """Join candidate and reference records by image id, in candidate order."""
    by_image: dict[str, list[PhonemeSequence]] = {}
    for image_id, seq in references:
        by_image.setdefault(image_id, []).append(seq)

    seen: set[str] = set()
    duplicates: list[str] = []
    missing: list[str] = []
    oversized: list[str] = []
    pairs: list[EvalPair] = []
    for image_id, seq in candidates:
        if image_id in seen:
            if image_id not in duplicates:
                duplicates.append(image_id)
            continue
        seen.add(image_id)
        refs = by_image.get(image_id)
        if not refs:
            missing.append(image_id)
            continue
        if len(refs) > max_references:
            oversized.append(image_id)
            continue
        pairs.append(EvalPair(image_id, seq, tuple(refs)))

    if duplicates:
        raise DataError(f"duplicate candidate for image id(s): {', '.join(duplicates)}")
    if missing:
        raise DataError(f"no references for image id(s): {', '.join(missing)}")
    if oversized:
        raise DataError(
            f"more than {max_references} references for image id(s): {', '.join(oversized)}"
        )
    return pairs
