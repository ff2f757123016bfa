"""scikit-learn style tokenizers.

Each tokenizer maps a list of sentences to a list of token lists with
``transform`` and back with ``inverse_transform``; :class:`BPETokenizer` learns
its merge table in ``fit``.  They follow the estimator conventions
(constructor only stores parameters, fitted state ends with ``_``), so
``get_params``/``set_params``/``clone`` work and they can sit in a
``Pipeline``.
"""

from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from . import bpe
from ._validation import check_positive_int, check_scheme, check_sentences, check_token_lists
from .tokenize import (
    DEFAULT_SPACE_MARKER,
    MarkerConfig,
    Segmenter,
    detokenize_alphabet,
    detokenize_morpheme,
    get_segmenter,
    tokenize_alphabet,
    tokenize_morpheme,
)


class _MarkerMixin:
    def _marker_config(self):
        return MarkerConfig(self.space_marker, self.strictness)


class AlphabetTokenizer(_MarkerMixin, TransformerMixin, BaseEstimator):
    """Jamo/character tokenizer.  Stateless; ``fit`` only checks parameters.

    Parameters
    ----------
    space_marker : str, default "▁"
        Token standing for one space.
    strictness : {"reject", "escape"}, default "reject"
        What to do with input that already contains ``space_marker``.
    """

    def __init__(self, space_marker=DEFAULT_SPACE_MARKER, strictness="reject"):
        self.space_marker = space_marker
        self.strictness = strictness

    def fit(self, X=None, y=None):
        self.marker_config_ = self._marker_config()
        return self

    def transform(self, X):
        cfg = self._marker_config()
        return [tokenize_alphabet(s, cfg).tokens for s in check_sentences(X)]

    def inverse_transform(self, Xt):
        cfg = self._marker_config()
        return [detokenize_alphabet(t, cfg) for t in check_token_lists(Xt)]

    def __sklearn_tags__(self):
        tags = super().__sklearn_tags__()
        tags.requires_fit = False
        return tags


class MorphemeTokenizer(_MarkerMixin, TransformerMixin, BaseEstimator):
    """Word-level morpheme tokenizer with explicit space markers.

    Parameters
    ----------
    segmenter : "rule", "identity", command (str or argv list) or Segmenter
        Commands are started as external line-protocol segmenters on first use.
    space_marker, strictness
        As for :class:`AlphabetTokenizer`.
    """

    def __init__(self, segmenter="rule", space_marker=DEFAULT_SPACE_MARKER, strictness="reject"):
        self.segmenter = segmenter
        self.space_marker = space_marker
        self.strictness = strictness

    def _get_segmenter(self):
        seg = getattr(self, "segmenter_", None)
        if seg is None:
            seg = self.segmenter_ = get_segmenter(self.segmenter)
        return seg

    def fit(self, X=None, y=None):
        self.marker_config_ = self._marker_config()
        self._get_segmenter()
        return self

    def transform(self, X):
        cfg = self._marker_config()
        seg = self._get_segmenter()
        return [tokenize_morpheme(s, seg, cfg).tokens for s in check_sentences(X)]

    def inverse_transform(self, Xt):
        cfg = self._marker_config()
        return [detokenize_morpheme(t, cfg) for t in check_token_lists(Xt)]

    @property
    def surface_preserving_(self):
        return self._get_segmenter().surface_preserving

    def close(self):
        seg = getattr(self, "segmenter_", None)
        if seg is not None and not isinstance(self.segmenter, Segmenter):
            seg.close()
            del self.segmenter_

    def __getstate__(self):
        state = self.__dict__.copy()
        if not isinstance(self.segmenter, Segmenter):
            state.pop("segmenter_", None)
        return state

    def __sklearn_tags__(self):
        tags = super().__sklearn_tags__()
        tags.requires_fit = False
        return tags


class BPETokenizer(TransformerMixin, BaseEstimator):
    """Byte-pair-encoding tokenizer with ``@@`` continuation markers.

    Parameters
    ----------
    num_merges : int, default 32000
    min_pair_frequency : int, default 2
        Learning stops once the best pair is rarer than this.
    continuation_marker : str, default "@@"
    pretokenize : bool, default False
        Split punctuation off words before learning and applying.  Makes
        detokenization lossy.

    Attributes
    ----------
    merges_ : MergeTable
    word_counts_ : dict
        Word frequencies seen by ``fit``.
    """

    def __init__(self, num_merges=32000, min_pair_frequency=2, continuation_marker="@@", pretokenize=False):
        self.num_merges = num_merges
        self.min_pair_frequency = min_pair_frequency
        self.continuation_marker = continuation_marker
        self.pretokenize = pretokenize

    def _config(self):
        check_positive_int(self.num_merges, "num_merges", allow_zero=True)
        check_positive_int(self.min_pair_frequency, "min_pair_frequency", allow_zero=True)
        return bpe.BpeConfig(
            num_merges=self.num_merges,
            continuation_marker=self.continuation_marker,
            pretokenize=bool(self.pretokenize),
            min_pair_frequency=self.min_pair_frequency,
        )

    def fit(self, X, y=None):
        cfg = self._config()
        self.word_counts_ = bpe.count_words(check_sentences(X), pretokenize=cfg.pretokenize)
        self.merges_ = bpe.learn_bpe(self.word_counts_, cfg)
        return self

    def transform(self, X):
        check_is_fitted(self, "merges_")
        cfg = self._config()
        return [bpe.tokenize_bpe(s, self.merges_, cfg).tokens for s in check_sentences(X)]

    def inverse_transform(self, Xt):
        cfg = self._config()
        return [bpe.detokenize_bpe(t, cfg) for t in check_token_lists(Xt)]

    def save_merges(self, path):
        check_is_fitted(self, "merges_")
        bpe.save_merges(self.merges_, path)

    @classmethod
    def from_merges(cls, merges, **params):
        """Build an already-fitted tokenizer from a MergeTable or merge file."""
        est = cls(**params)
        est._config()
        est.merges_ = merges if isinstance(merges, bpe.MergeTable) else bpe.load_merges(merges)
        return est


def make_tokenizer(scheme, **params):
    """Tokenizer estimator for ``scheme`` ("alphabet", "morpheme" or "bpe")."""
    cls = {"alphabet": AlphabetTokenizer, "morpheme": MorphemeTokenizer, "bpe": BPETokenizer}[check_scheme(scheme)]
    return cls(**params)
