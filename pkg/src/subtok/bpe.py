"""Byte-pair encoding: deterministic learner, applier and ``@@`` convention.

Learning keeps pair counts up to date incrementally: after each merge only the
words that contained the merged pair are rescanned, and the best pair is found
through a lazily-invalidated heap.  Ties on count go to the lexicographically
smallest ``(left, right)``.  No end-of-word symbol is used, so merges are
position-agnostic within a word.
"""

import heapq
import io
import os
import warnings
from collections import Counter
from dataclasses import dataclass
from typing import Dict, Iterable, List, Mapping, Sequence, Tuple

from .exceptions import FormatError, MarkerCollision
from .tokenize import TokenizedSentence, rule_segment

HEADER = "#merges v1"
CLOSING_PUNCTUATION = frozenset(".,!?;:)]}")

Pair = Tuple[str, str]


class BpeWarning(UserWarning):
    pass


@dataclass(frozen=True)
class BpeConfig:
    num_merges: int = 32000
    continuation_marker: str = "@@"
    pretokenize: bool = False
    min_pair_frequency: int = 2

    def __post_init__(self):
        if not self.continuation_marker or any(c.isspace() for c in self.continuation_marker):
            raise ValueError("continuation_marker must be non-empty and contain no whitespace")
        if self.num_merges < 0:
            raise ValueError("num_merges must be >= 0")
        if self.min_pair_frequency < 0:
            raise ValueError("min_pair_frequency must be >= 0")


class MergeTable:
    """Ordered list of learned merges; rank is the position in the list."""

    _CACHE_LIMIT = 1 << 18

    def __init__(self, merges: Iterable[Pair] = ()):
        self.merges: List[Pair] = []
        self.ranks: Dict[Pair, int] = {}
        produced = set()
        for rank, pair in enumerate(merges):
            left, right = pair = tuple(pair)
            for sym in pair:
                if not isinstance(sym, str) or not sym or " " in sym:
                    raise ValueError(f"merge {rank}: bad symbol {sym!r}")
                if len(sym) > 1 and sym not in produced:
                    raise ValueError(f"merge {rank}: symbol {sym!r} is not produced by an earlier merge")
            if pair in self.ranks:
                raise ValueError(f"merge {rank}: duplicate pair {pair!r}")
            self.ranks[pair] = rank
            self.merges.append(pair)
            produced.add(left + right)
        self._cache: Dict[str, Tuple[str, ...]] = {}

    def __len__(self):
        return len(self.merges)

    def __iter__(self):
        return iter(self.merges)

    def __getitem__(self, i):
        return self.merges[i]

    def __eq__(self, other):
        if isinstance(other, MergeTable):
            return self.merges == other.merges
        return NotImplemented

    def __repr__(self):
        return f"MergeTable({len(self)} merges)"

    def apply(self, word: str) -> Tuple[str, ...]:
        """Cached :func:`apply_bpe_word`."""
        try:
            return self._cache[word]
        except KeyError:
            pass
        out = tuple(_apply(word, self.ranks))
        if len(self._cache) >= self._CACHE_LIMIT:
            self._cache.clear()
        self._cache[word] = out
        return out


# --- counting ---------------------------------------------------------------


def count_words(corpus_lines: Iterable[str], pretokenize: bool = False) -> Dict[str, int]:
    counts = Counter()
    for line in corpus_lines:
        for word in line.split():
            if pretokenize:
                counts.update(rule_segment(word))
            else:
                counts[word] += 1
    return dict(counts)


def _pairs(symbols: Sequence[str]):
    return zip(symbols, symbols[1:])


def count_pairs(wf: Mapping) -> Dict[Pair, int]:
    """Adjacent-pair counts weighted by word frequency.

    Keys of ``wf`` are symbol sequences; a plain string is its characters.
    """
    counts = Counter()
    for symbols, freq in wf.items():
        for pair in _pairs(symbols):
            counts[pair] += freq
    return dict(counts)


def _merge_symbols(symbols: Sequence[str], left: str, right: str) -> List[str]:
    out = []
    i, n = 0, len(symbols)
    while i < n:
        if i + 1 < n and symbols[i] == left and symbols[i + 1] == right:
            out.append(left + right)
            i += 2
        else:
            out.append(symbols[i])
            i += 1
    return out


# --- learning ---------------------------------------------------------------


def learn_bpe_state(wf: Mapping[str, int], cfg: BpeConfig = BpeConfig()):
    """Learn merges and also return each word's final symbol sequence."""
    vocab = sorted(wf)
    words = [list(w) for w in vocab]
    freqs = [wf[w] for w in vocab]

    pair_counts: Dict[Pair, int] = {}
    where: Dict[Pair, set] = {}
    for idx, (symbols, freq) in enumerate(zip(words, freqs)):
        for pair in _pairs(symbols):
            pair_counts[pair] = pair_counts.get(pair, 0) + freq
            where.setdefault(pair, set()).add(idx)
    heap = [(-c, l, r) for (l, r), c in pair_counts.items()]
    heapq.heapify(heap)

    threshold = max(cfg.min_pair_frequency, 1)
    merges = []
    while len(merges) < cfg.num_merges and heap:
        neg, left, right = heapq.heappop(heap)
        best = (left, right)
        if pair_counts.get(best, 0) != -neg:
            continue  # stale entry
        if -neg < threshold:
            break
        merges.append(best)

        changed = {}
        for idx in sorted(where.pop(best, ())):
            symbols = words[idx]
            merged = _merge_symbols(symbols, left, right)
            if len(merged) == len(symbols):
                continue
            freq = freqs[idx]
            delta = Counter(_pairs(merged))
            delta.subtract(Counter(_pairs(symbols)))
            for pair, d in delta.items():
                if d:
                    changed[pair] = pair_counts.get(pair, 0) + d * freq
                    pair_counts[pair] = changed[pair]
                    if d > 0:
                        where.setdefault(pair, set()).add(idx)
            words[idx] = merged
        for pair, count in changed.items():
            if count > 0:
                heapq.heappush(heap, (-count, pair[0], pair[1]))
            else:
                pair_counts.pop(pair, None)
                where.pop(pair, None)
        pair_counts.pop(best, None)

    return MergeTable(merges), {w: tuple(s) for w, s in zip(vocab, words)}


def learn_bpe(wf: Mapping[str, int], cfg: BpeConfig = BpeConfig()) -> MergeTable:
    """Learn up to ``cfg.num_merges`` merges from a word-frequency map.

    Stops early when the best remaining pair occurs fewer than
    ``cfg.min_pair_frequency`` times (or not at all).
    """
    return learn_bpe_state(wf, cfg)[0]


# --- application ------------------------------------------------------------


def _apply(word: str, ranks: Mapping[Pair, int]) -> List[str]:
    symbols = list(word)
    last = -1
    while len(symbols) > 1:
        best_rank = best = None
        for pair in _pairs(symbols):
            rank = ranks.get(pair)
            if rank is not None and rank > last and (best_rank is None or rank < best_rank):
                best_rank, best = rank, pair
        if best is None:
            break
        # Ranks only move forward: a lower-ranked pair that reappears after a
        # later merge is left alone, exactly as the learner left it.
        last = best_rank
        symbols = _merge_symbols(symbols, *best)
    return symbols


def apply_bpe_word(word: str, mt: MergeTable) -> List[str]:
    """Segment one word by replaying merges in rank order."""
    if not word or " " in word:
        raise ValueError("apply_bpe_word expects a non-empty, space-free word")
    return list(mt.apply(word))


def _units(sentence: str, cfg: BpeConfig) -> List[str]:
    units = []
    for word in sentence.split(" "):
        if not word:
            continue
        units.extend(rule_segment(word) if cfg.pretokenize else (word,))
    return units


def tokenize_bpe(sentence: str, mt: MergeTable, cfg: BpeConfig = BpeConfig()) -> TokenizedSentence:
    """Apply BPE per word and mark every non-final subword with the marker."""
    if "\n" in sentence or "\r" in sentence:
        raise ValueError("sentence must not contain line breaks")
    marker = cfg.continuation_marker
    tokens = []
    for unit in _units(sentence, cfg):
        if unit.endswith(marker):
            raise MarkerCollision(f"word {unit!r} already ends with the continuation marker {marker!r}")
        subwords = mt.apply(unit)
        tokens.extend(s + marker for s in subwords[:-1])
        tokens.append(subwords[-1])
    return TokenizedSentence("bpe", tokens)


def detokenize_bpe(ts, cfg: BpeConfig = BpeConfig()) -> str:
    """Join subwords; the marker means "glued to the next token".

    A marker on the final token is dropped with a :class:`BpeWarning`.  With
    ``cfg.pretokenize`` closing punctuation is attached to the preceding word,
    which is a best-effort (lossy) inverse.
    """
    tokens = ts.tokens if isinstance(ts, TokenizedSentence) else list(ts)
    marker = cfg.continuation_marker
    out = []
    glue = True
    for tok in tokens:
        continues = tok.endswith(marker)
        if continues:
            tok = tok[: -len(marker)]
        if out and not glue and not (cfg.pretokenize and tok and set(tok) <= CLOSING_PUNCTUATION):
            out.append(" ")
        out.append(tok)
        glue = continues
    if tokens and glue:
        warnings.warn(f"final token {tokens[-1]!r} ends with {marker!r}; marker dropped", BpeWarning, stacklevel=2)
    return "".join(out)


# --- merge-table files -------------------------------------------------------


def dumps_merges(mt: MergeTable) -> str:
    lines = [HEADER]
    lines.extend(f"{l} {r}" for l, r in mt)
    return "\n".join(lines) + "\n"


def loads_merges(text: str) -> MergeTable:
    if not text:
        raise FormatError("empty file, expected header", 1)
    if not text.endswith("\n"):
        raise FormatError("missing trailing newline", text.count("\n") + 1)
    lines = text[:-1].split("\n")
    if lines[0] != HEADER:
        raise FormatError(f"expected header {HEADER!r}, got {lines[0]!r}", 1)
    merges = []
    seen = {}
    produced = set()
    for lineno, line in enumerate(lines[1:], start=2):
        if "\r" in line:
            raise FormatError("CR character (line endings must be LF)", lineno)
        parts = line.split(" ")
        if len(parts) != 2 or not all(parts):
            raise FormatError(f"expected '<left> <right>', got {line!r}", lineno)
        pair = (parts[0], parts[1])
        if pair in seen:
            raise FormatError(f"duplicate pair {pair!r} (first on line {seen[pair]})", lineno)
        for sym in pair:
            if len(sym) > 1 and sym not in produced:
                raise FormatError(f"symbol {sym!r} not produced by an earlier merge", lineno)
        seen[pair] = lineno
        produced.add(pair[0] + pair[1])
        merges.append(pair)
    return MergeTable(merges)


def save_merges(mt: MergeTable, file) -> None:
    """Write ``mt`` to a path or a text stream."""
    text = dumps_merges(mt)
    if isinstance(file, (str, os.PathLike)):
        with open(file, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        file.write(text)


def load_merges(file) -> MergeTable:
    if isinstance(file, (str, os.PathLike)):
        with open(file, "r", encoding="utf-8", newline="") as fh:
            return loads_merges(fh.read())
    if isinstance(file, io.TextIOBase) or hasattr(file, "read"):
        return loads_merges(file.read())
    raise TypeError(f"cannot load merges from {type(file).__name__}")
