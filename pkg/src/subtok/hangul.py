"""Hangul syllable <-> compatibility jamo conversion.

Precomposed syllables U+AC00..U+D7A3 encode a (lead, vowel, tail) triple as::

    code = 0xAC00 + (lead * 21 + vowel) * 28 + tail

Decomposition renders each slot as a *compatibility* jamo (U+3131..U+3163),
where initial and final consonants of the same shape share one codepoint and
compound tails such as ㄳ are a single character.  Composition inverts this with
a greedy automaton that uses one character of lookahead to decide whether a
consonant closes the current syllable or opens the next one.
"""

from typing import Iterable, NamedTuple

from .exceptions import NotHangulSyllable

SYLLABLE_BASE = 0xAC00
SYLLABLE_LAST = 0xD7A3
N_LEADS = 19
N_VOWELS = 21
N_TAILS = 28  # includes the empty tail at index 0
N_SYLLABLES = N_LEADS * N_VOWELS * N_TAILS

LEAD_CHARS = tuple("ㄱㄲㄴㄷㄸㄹㅁㅂㅃㅅㅆㅇㅈㅉㅊㅋㅌㅍㅎ")
VOWEL_CHARS = tuple("ㅏㅐㅑㅒㅓㅔㅕㅖㅗㅘㅙㅚㅛㅜㅝㅞㅟㅠㅡㅢㅣ")
# index 1..27; index 0 (no tail) has no character
TAIL_CHARS = tuple("ㄱㄲㄳㄴㄵㄶㄷㄹㄺㄻㄼㄽㄾㄿㅀㅁㅂㅄㅅㅆㅇㅈㅊㅋㅌㅍㅎ")

_LEAD_INDEX = {c: i for i, c in enumerate(LEAD_CHARS)}
_VOWEL_INDEX = {c: i for i, c in enumerate(VOWEL_CHARS)}
_TAIL_INDEX = {c: i + 1 for i, c in enumerate(TAIL_CHARS)}

JAMO_INVENTORY = frozenset(LEAD_CHARS) | frozenset(VOWEL_CHARS) | frozenset(TAIL_CHARS)


class JamoTriple(NamedTuple):
    lead_index: int
    vowel_index: int
    tail_index: int = 0

    @property
    def codepoint(self) -> int:
        return SYLLABLE_BASE + (self.lead_index * N_VOWELS + self.vowel_index) * N_TAILS + self.tail_index

    def jamo(self) -> tuple:
        """Compatibility jamo for this syllable, 2 or 3 characters."""
        out = (LEAD_CHARS[self.lead_index], VOWEL_CHARS[self.vowel_index])
        if self.tail_index:
            out += (TAIL_CHARS[self.tail_index - 1],)
        return out


def is_syllable(ch: str) -> bool:
    return len(ch) == 1 and SYLLABLE_BASE <= ord(ch) <= SYLLABLE_LAST


def is_jamo(ch: str) -> bool:
    return ch in JAMO_INVENTORY


def decompose_syllable(ch: str) -> JamoTriple:
    if not is_syllable(ch):
        raise NotHangulSyllable(f"{ch!r} is not a precomposed Hangul syllable")
    index = ord(ch) - SYLLABLE_BASE
    lead, rest = divmod(index, N_VOWELS * N_TAILS)
    vowel, tail = divmod(rest, N_TAILS)
    return JamoTriple(lead, vowel, tail)


def decompose(text: str) -> list:
    """Expand every syllable of ``text`` into jamo; other characters pass through."""
    out = []
    for ch in text:
        if SYLLABLE_BASE <= ord(ch) <= SYLLABLE_LAST:
            out.extend(decompose_syllable(ch).jamo())
        else:
            out.append(ch)
    return out


def _syllable(lead, vowel, tail=0):
    return chr(SYLLABLE_BASE + (lead * N_VOWELS + vowel) * N_TAILS + tail)


def compose_jamo(jamo_stream: Iterable[str]) -> str:
    """Recompose runs of compatibility jamo into syllables.

    Anything that cannot start or extend a syllable is copied through, so the
    function is total.  A tail-capable consonant closes the current syllable
    unless the character after it is a vowel, in which case it becomes the
    next syllable's lead.
    """
    chars = list(jamo_stream)
    out = []
    i, n = 0, len(chars)
    while i < n:
        ch = chars[i]
        lead = _LEAD_INDEX.get(ch)
        vowel = _VOWEL_INDEX.get(chars[i + 1]) if lead is not None and i + 1 < n else None
        if vowel is None:
            out.append(ch)
            i += 1
            continue
        i += 2
        tail = _TAIL_INDEX.get(chars[i]) if i < n else None
        if tail is not None and not (i + 1 < n and chars[i + 1] in _VOWEL_INDEX):
            out.append(_syllable(lead, vowel, tail))
            i += 1
        else:
            out.append(_syllable(lead, vowel))
    return "".join(out)
