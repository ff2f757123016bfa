"""Corpus-level BLEU: clipped n-gram precision and brevity penalty."""

import math
from collections import Counter
from dataclasses import dataclass
from typing import Dict, List, Sequence, Tuple

from .exceptions import EmptyCorpus, LengthMismatch

MAX_ORDER = 4


def ngram_counts(tokens: Sequence[str], n: int) -> Dict[tuple, int]:
    if n < 1:
        raise ValueError("n must be >= 1")
    tokens = tuple(tokens)
    return dict(Counter(tokens[i : i + n] for i in range(len(tokens) - n + 1)))


def _check_aligned(hyps, refs):
    if len(hyps) != len(refs):
        raise LengthMismatch(f"{len(hyps)} hypotheses but {len(refs)} reference sets")
    if not hyps:
        raise EmptyCorpus("no sentences to score")
    for i, rs in enumerate(refs):
        if not rs:
            raise ValueError(f"sentence {i} has no references")


def _clipped(hyp, refs, n):
    counts = ngram_counts(hyp, n)
    if not counts:
        return 0, 0
    max_ref = Counter()
    for ref in refs:
        for gram, c in ngram_counts(ref, n).items():
            if c > max_ref[gram]:
                max_ref[gram] = c
    matched = sum(min(c, max_ref[g]) for g, c in counts.items())
    return matched, sum(counts.values())


def modified_precision(hyps, refs, n) -> Tuple[int, int]:
    """Corpus-wide ``(matched, total)`` n-gram counts with reference clipping.

    ``refs[i]`` is the list of reference token lists for ``hyps[i]``.
    """
    _check_aligned(hyps, refs)
    matched = total = 0
    for hyp, rs in zip(hyps, refs):
        m, t = _clipped(hyp, rs, n)
        matched += m
        total += t
    return matched, total


def brevity_penalty(c: int, r: int) -> float:
    if c > r:
        return 1.0
    if c == 0:
        return 0.0
    return math.exp(1 - r / c)


def effective_ref_length(hyp_len: int, ref_lens: Sequence[int]) -> int:
    """Reference length closest to the hypothesis; ties go to the shorter."""
    return min(ref_lens, key=lambda r: (abs(r - hyp_len), r))


@dataclass(frozen=True)
class BleuReport:
    precisions: Tuple[Tuple[int, int], ...]
    candidate_length: int
    reference_length: int
    brevity_penalty: float
    score: float

    @property
    def precision_ratios(self) -> List[float]:
        return [m / t if t else 0.0 for m, t in self.precisions]

    def format_line(self) -> str:
        ps = " ".join(f"p{i}={m}/{t}" for i, (m, t) in enumerate(self.precisions, start=1))
        return (
            f"BLEU={self.score:.2f} {ps} BP={self.brevity_penalty:.6f} "
            f"c={self.candidate_length} r={self.reference_length}"
        )

    def format_text(self) -> str:
        lines = [f"BLEU          {self.score:.4f}"]
        for i, ((m, t), p) in enumerate(zip(self.precisions, self.precision_ratios), start=1):
            lines.append(f"{i}-gram        {m}/{t} ({100 * p:.2f}%)")
        lines.append(f"BP            {self.brevity_penalty:.6f}")
        lines.append(f"hyp length    {self.candidate_length}")
        lines.append(f"ref length    {self.reference_length}")
        return "\n".join(lines)


def _parse_smoothing(smoothing):
    if smoothing in (None, "none"):
        return None
    if isinstance(smoothing, (int, float)):
        eps = float(smoothing)
    elif isinstance(smoothing, str) and smoothing.startswith("add_epsilon"):
        _, _, arg = smoothing.partition(":")
        eps = float(arg) if arg else 0.1
    elif isinstance(smoothing, tuple) and smoothing[0] == "add_epsilon":
        eps = float(smoothing[1])
    else:
        raise ValueError(f"unknown smoothing {smoothing!r}")
    if eps <= 0:
        raise ValueError("epsilon must be positive")
    return eps


def bleu_corpus(hyps, refs, smoothing=None, max_order: int = MAX_ORDER) -> BleuReport:
    """Corpus BLEU over token lists.

    ``refs[i]`` may be a single token list or a list of alternatives.
    ``smoothing`` is ``None``/``"none"`` or ``"add_epsilon:<eps>"``; smoothing
    replaces a zero match count by ``eps`` and is never applied to non-zero
    counts.
    """
    refs = [r if r and not isinstance(r[0], str) else [r] for r in refs]
    _check_aligned(hyps, refs)
    eps = _parse_smoothing(smoothing)

    stats = [[0, 0] for _ in range(max_order)]
    c = r = 0
    for hyp, rs in zip(hyps, refs):
        c += len(hyp)
        r += effective_ref_length(len(hyp), [len(x) for x in rs])
        for n in range(1, max_order + 1):
            m, t = _clipped(hyp, rs, n)
            stats[n - 1][0] += m
            stats[n - 1][1] += t
    precisions = tuple((m, t) for m, t in stats)
    bp = brevity_penalty(c, r)

    log_sum = 0.0
    for m, t in precisions:
        if m == 0:
            if eps is None:
                log_sum = None
                break
            log_sum += math.log(eps / max(t, 1))
        else:
            log_sum += math.log(m / t)
    if log_sum is None or bp == 0.0:
        score = 0.0
    else:
        score = 100.0 * bp * math.exp(log_sum / max_order)
    return BleuReport(precisions, c, r, bp, min(score, 100.0))


def bleu_text(hyp_lines, ref_line_sets, smoothing=None) -> BleuReport:
    """BLEU on detokenized text lines, split on whitespace."""
    hyps = [h.split() for h in hyp_lines]
    refs = [[r.split() for r in rs] for rs in ref_line_sets]
    return bleu_corpus(hyps, refs, smoothing=smoothing)
