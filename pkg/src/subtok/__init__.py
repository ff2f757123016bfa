"""Tokenization tools for Korean-English machine-translation preprocessing.

Alphabet (jamo), morpheme and BPE tokenizers with exact detokenization, a
deterministic BPE learner, seeded corpus splitting, vocabulary statistics and
corpus BLEU.
"""

from .bpe import (
    BpeConfig,
    MergeTable,
    apply_bpe_word,
    count_pairs,
    count_words,
    detokenize_bpe,
    learn_bpe,
    load_merges,
    save_merges,
    tokenize_bpe,
)
from .corpus import (
    ParallelCorpus,
    PipelineConfig,
    SplitSpec,
    VocabReport,
    read_parallel,
    run_pipeline,
    split_corpus,
    vocab_stats,
)
from .exceptions import (
    BadSpec,
    EmptyCorpus,
    FormatError,
    LengthMismatch,
    MarkerCollision,
    NotHangulSyllable,
    PipelineError,
    SegmenterFailure,
    SubtokError,
)
from .hangul import JamoTriple, compose_jamo, decompose_syllable
from .metrics import BleuReport, bleu_corpus, brevity_penalty, modified_precision, ngram_counts
from .tokenize import (
    ExternalSegmenter,
    MarkerConfig,
    Segmenter,
    TokenizedSentence,
    detokenize_alphabet,
    detokenize_morpheme,
    external_segmenter,
    mark_spaces,
    rule_segment,
    tokenize_alphabet,
    tokenize_morpheme,
)

__version__ = "0.1.0"

_ESTIMATORS = ("AlphabetTokenizer", "BPETokenizer", "MorphemeTokenizer", "make_tokenizer")


def __getattr__(name):
    # scikit-learn is only imported when the estimators are used
    if name in _ESTIMATORS:
        from . import estimators

        return getattr(estimators, name)
    raise AttributeError(f"module {__name__!r} has no attribute {name!r}")
