"""BPE learning/application benchmark on a synthetic Zipfian corpus.

    python benchmarks/bench_bpe.py [--chars 5000000] [--merges 10000]

Targets: learning 10,000 merges over ~5M characters in under 60 s, and
applying a 10,000-merge table at 50,000 words/s or more (single thread).
"""

import argparse
import itertools
import random
import time

from subtok.bpe import BpeConfig, count_words, learn_bpe, tokenize_bpe

LEARN_TARGET_S = 60.0
APPLY_TARGET_WPS = 50_000.0

_ONSETS = ["", "b", "c", "d", "f", "g", "h", "k", "l", "m", "n", "p", "r", "s", "t", "v", "w", "st", "tr", "ch", "sh", "th"]
_NUCLEI = ["a", "e", "i", "o", "u", "ai", "ea", "ou", "ie"]
_CODAS = ["", "", "n", "r", "s", "t", "l", "ng", "ck", "st"]
_HANGUL = [chr(0xAC00 + i) for i in range(0, 11172, 37)]


def _word(rng):
    if rng.random() < 0.3:
        return "".join(rng.choice(_HANGUL) for _ in range(rng.randint(1, 4)))
    return "".join(rng.choice(_ONSETS) + rng.choice(_NUCLEI) + rng.choice(_CODAS) for _ in range(rng.randint(1, 4)))


def synthetic_corpus(n_chars=5_000_000, vocab_size=60_000, seed=0):
    """Lines of Zipf-distributed pseudo-words totalling about ``n_chars``."""
    rng = random.Random(seed)
    vocab = list(dict.fromkeys(_word(rng) for _ in range(vocab_size)))
    cum_weights = list(itertools.accumulate(1.0 / (rank + 1) for rank in range(len(vocab))))
    lines, total = [], 0
    while total < n_chars:
        words = rng.choices(vocab, cum_weights=cum_weights, k=20)
        line = " ".join(words)
        lines.append(line)
        total += len(line) + 1
    return lines


def run(n_chars=5_000_000, num_merges=10_000, seed=0):
    lines = synthetic_corpus(n_chars, seed=seed)
    t0 = time.perf_counter()
    wf = count_words(lines)
    mt = learn_bpe(wf, BpeConfig(num_merges=num_merges, min_pair_frequency=2))
    learn_s = time.perf_counter() - t0

    sample = lines[: max(1, len(lines) // 5)]
    n_words = sum(len(s.split()) for s in sample)
    t0 = time.perf_counter()
    for s in sample:
        tokenize_bpe(s, mt)
    apply_s = time.perf_counter() - t0
    return {
        "chars": sum(len(s) + 1 for s in lines),
        "distinct_words": len(wf),
        "merges": len(mt),
        "learn_seconds": learn_s,
        "apply_words": n_words,
        "apply_words_per_second": n_words / apply_s,
    }


def report(result):
    learn_ok = result["learn_seconds"] < LEARN_TARGET_S
    apply_ok = result["apply_words_per_second"] >= APPLY_TARGET_WPS
    return [
        f"{'PASS' if learn_ok else 'MISS'} learn {result['merges']} merges over {result['chars']} chars "
        f"({result['distinct_words']} distinct words) in {result['learn_seconds']:.1f}s (target < {LEARN_TARGET_S:.0f}s)",
        f"{'PASS' if apply_ok else 'MISS'} apply {result['apply_words_per_second']:,.0f} words/s "
        f"(target >= {APPLY_TARGET_WPS:,.0f})",
    ]


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--chars", type=int, default=5_000_000)
    parser.add_argument("--merges", type=int, default=10_000)
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args()
    for line in report(run(args.chars, args.merges, args.seed)):
        print(line)


if __name__ == "__main__":
    main()
