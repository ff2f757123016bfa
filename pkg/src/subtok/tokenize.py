"""Alphabet and morpheme tokenization with exact detokenization.

Both schemes first make spacing explicit: every space becomes a standalone
space-marker token, so detokenization is concatenation plus marker -> space
(and, for the alphabet scheme, jamo recomposition).
"""

import queue
import shlex
import subprocess
import threading
import unicodedata
from dataclasses import dataclass, field
from typing import List, Sequence

from . import hangul
from .exceptions import MarkerCollision, SegmenterFailure

DEFAULT_SPACE_MARKER = "\u2581"
SCHEMES = ("alphabet", "morpheme", "bpe")


@dataclass(frozen=True)
class MarkerConfig:
    """How spaces are made explicit.

    With ``strictness="escape"`` a literal marker in the input is carried as a
    doubled marker inside a token and restored on detokenization, instead of
    raising :class:`MarkerCollision`.
    """

    space_marker: str = DEFAULT_SPACE_MARKER
    strictness: str = "reject"

    def __post_init__(self):
        if len(self.space_marker) != 1 or self.space_marker.isspace():
            raise ValueError("space_marker must be a single non-space character")
        if hangul.is_jamo(self.space_marker) or hangul.is_syllable(self.space_marker):
            raise ValueError("space_marker must not be a Hangul character")
        if self.strictness not in ("reject", "escape"):
            raise ValueError(f"strictness must be 'reject' or 'escape', got {self.strictness!r}")

    @property
    def escaped_marker(self) -> str:
        return self.space_marker * 2


@dataclass
class TokenizedSentence:
    scheme: str
    tokens: List[str] = field(default_factory=list)

    def __post_init__(self):
        if self.scheme not in SCHEMES:
            raise ValueError(f"unknown scheme {self.scheme!r}")
        for tok in self.tokens:
            if not tok or " " in tok:
                raise ValueError(f"invalid token {tok!r}: tokens are non-empty and space-free")

    def __len__(self):
        return len(self.tokens)

    def __iter__(self):
        return iter(self.tokens)

    def to_line(self) -> str:
        return " ".join(self.tokens)

    @classmethod
    def from_line(cls, line: str, scheme: str) -> "TokenizedSentence":
        return cls(scheme, line.split())


def _check_sentence(sentence: str, cfg: MarkerConfig) -> None:
    if "\n" in sentence or "\r" in sentence:
        raise ValueError("sentence must not contain line breaks")
    if cfg.strictness == "reject" and cfg.space_marker in sentence:
        raise MarkerCollision(
            f"input already contains the space marker {cfg.space_marker!r} (U+{ord(cfg.space_marker):04X})"
        )


def mark_spaces(sentence: str, cfg: MarkerConfig = MarkerConfig()) -> str:
    _check_sentence(sentence, cfg)
    if cfg.strictness == "escape":
        sentence = sentence.replace(cfg.space_marker, cfg.escaped_marker)
    return sentence.replace(" ", cfg.space_marker)


def tokenize_alphabet(sentence: str, cfg: MarkerConfig = MarkerConfig()) -> TokenizedSentence:
    """One token per jamo, per non-Hangul character, and per space."""
    _check_sentence(sentence, cfg)
    tokens = []
    for ch in sentence:
        if ch == " ":
            tokens.append(cfg.space_marker)
        elif ch == cfg.space_marker:
            tokens.append(cfg.escaped_marker)
        elif hangul.is_syllable(ch):
            tokens.extend(hangul.decompose_syllable(ch).jamo())
        else:
            tokens.append(ch)
    return TokenizedSentence("alphabet", tokens)


def _unmark(tokens: Sequence[str], cfg: MarkerConfig) -> List[str]:
    marker, escaped = cfg.space_marker, cfg.escaped_marker
    return [" " if t == marker else t.replace(escaped, marker) for t in tokens]


def detokenize_alphabet(ts, cfg: MarkerConfig = MarkerConfig()) -> str:
    tokens = ts.tokens if isinstance(ts, TokenizedSentence) else list(ts)
    # Spaces and restored literal markers are not jamo, so they also act as
    # syllable boundaries for the recomposition.
    return hangul.compose_jamo("".join(_unmark(tokens, cfg)))


# --- morpheme scheme -------------------------------------------------------


def _is_word_char(ch: str) -> bool:
    return ch.isalnum() or unicodedata.category(ch).startswith("M")


def rule_segment(word: str) -> List[str]:
    """Split ``word`` into maximal runs of letters/digits and of other symbols.

    >>> rule_segment("co-op!")
    ['co', '-', 'op', '!']
    """
    if " " in word:
        raise ValueError("rule_segment expects a single space-free word")
    pieces = []
    start = 0
    for i in range(1, len(word)):
        if _is_word_char(word[i]) != _is_word_char(word[i - 1]):
            pieces.append(word[start:i])
            start = i
    if word:
        pieces.append(word[start:])
    return pieces


class Segmenter:
    """Splits one space-free word into morphemes.

    Subclasses implement :meth:`segment`.  ``surface_preserving`` promises that
    the morphemes concatenate back to the word, which is what makes morpheme
    detokenization exact.
    """

    name = "segmenter"
    surface_preserving = True

    def segment(self, word: str) -> List[str]:
        raise NotImplementedError

    def close(self):
        pass

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()


class RuleSegmenter(Segmenter):
    name = "rule"

    def segment(self, word):
        return rule_segment(word)


class IdentitySegmenter(Segmenter):
    name = "identity"

    def segment(self, word):
        return [word]


class ExternalSegmenter(Segmenter):
    """Segmenter backed by a child process speaking the line protocol.

    The parent writes one word per line; the child answers with the word's
    morphemes joined by TAB on a single line and flushes.  One request is in
    flight at a time; create several instances for parallel use.
    """

    def __init__(self, command, timeout=10.0, name=None):
        if isinstance(command, str):
            command = shlex.split(command)
        self.command = list(command)
        self.timeout = timeout
        self.name = name or "external:" + " ".join(self.command)
        self.surface_preserving = True
        self.n_calls = 0
        self.n_non_preserving = 0
        self._lock = threading.Lock()
        self._eof = False
        try:
            self._proc = subprocess.Popen(
                self.command,
                stdin=subprocess.PIPE,
                stdout=subprocess.PIPE,
                encoding="utf-8",
                bufsize=1,
            )
        except OSError as exc:
            raise SegmenterFailure(f"cannot start segmenter {self.command!r}: {exc}") from exc
        self._replies = queue.Queue()
        self._reader = threading.Thread(target=self._read_replies, daemon=True)
        self._reader.start()

    def _read_replies(self):
        for line in self._proc.stdout:
            self._replies.put(line)
        self._replies.put(None)

    def segment(self, word):
        if not word or any(c in word for c in "\t\n\r "):
            raise SegmenterFailure(f"cannot send {word!r}: words must be non-empty without tabs, spaces or newlines")
        with self._lock:
            if self._eof or self._proc.poll() is not None:
                raise SegmenterFailure(f"segmenter exited with status {self._proc.returncode}")
            try:
                self._proc.stdin.write(word + "\n")
                self._proc.stdin.flush()
            except (BrokenPipeError, OSError) as exc:
                raise SegmenterFailure(f"segmenter pipe closed: {exc}") from exc
            try:
                reply = self._replies.get(timeout=self.timeout)
            except queue.Empty:
                self.close()
                raise SegmenterFailure(f"no reply for {word!r} within {self.timeout}s") from None
        if reply is None:
            self._eof = True
            raise SegmenterFailure("segmenter closed its output")
        reply = reply.rstrip("\n").rstrip("\r")
        if not reply:
            raise SegmenterFailure(f"empty reply for {word!r}")
        pieces = reply.split("\t")
        if any(not p or " " in p for p in pieces):
            raise SegmenterFailure(f"malformed reply {reply!r} for {word!r}")
        self.n_calls += 1
        if "".join(pieces) != word:
            self.n_non_preserving += 1
            self.surface_preserving = False
        return pieces

    def close(self):
        proc = getattr(self, "_proc", None)
        if proc is None or proc.poll() is not None:
            return
        try:
            proc.stdin.close()
        except OSError:
            pass
        try:
            proc.wait(timeout=2)
        except subprocess.TimeoutExpired:
            proc.kill()
            proc.wait()

    def __del__(self):
        self.close()


def external_segmenter(command_spec, timeout=10.0) -> ExternalSegmenter:
    """Start a segmenter process from an argv list or a shell-style string."""
    return ExternalSegmenter(command_spec, timeout=timeout)


def get_segmenter(spec) -> Segmenter:
    """Resolve ``"rule"``, ``"identity"``, a command, or a Segmenter instance."""
    if isinstance(spec, Segmenter):
        return spec
    if spec in (None, "rule"):
        return RuleSegmenter()
    if spec == "identity":
        return IdentitySegmenter()
    if isinstance(spec, dict):
        return external_segmenter(spec["command"], timeout=spec.get("timeout", 10.0))
    return external_segmenter(spec)


def tokenize_morpheme(sentence: str, seg: Segmenter = None, cfg: MarkerConfig = MarkerConfig()) -> TokenizedSentence:
    """Segment each space-separated word; one marker token per space."""
    _check_sentence(sentence, cfg)
    seg = seg if seg is not None else RuleSegmenter()
    escape = cfg.strictness == "escape"
    tokens = []
    for i, word in enumerate(sentence.split(" ")):
        if i:
            tokens.append(cfg.space_marker)
        if not word:
            continue
        if escape:
            word = word.replace(cfg.space_marker, cfg.escaped_marker)
        pieces = seg.segment(word)
        if not pieces or any(not p for p in pieces):
            raise SegmenterFailure(f"segmenter {seg.name!r} returned {pieces!r} for {word!r}")
        tokens.extend(pieces)
    return TokenizedSentence("morpheme", tokens)


def detokenize_morpheme(ts, cfg: MarkerConfig = MarkerConfig()) -> str:
    tokens = ts.tokens if isinstance(ts, TokenizedSentence) else list(ts)
    return "".join(_unmark(tokens, cfg))
