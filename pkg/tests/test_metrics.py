import math
import random

import pytest
from hypothesis import given, strategies as st

from subtok.exceptions import EmptyCorpus, LengthMismatch
from subtok.metrics import (
    bleu_corpus,
    bleu_text,
    brevity_penalty,
    effective_ref_length,
    modified_precision,
    ngram_counts,
)

from oracles import brute_ngram_precision

CAT = "the cat is on the mat".split()
SAT = "the cat sat on the mat".split()
TONIGHT = "the cat is on the mat tonight".split()


def test_ngram_counts():
    assert ngram_counts(["a", "b", "a"], 1) == {("a",): 2, ("b",): 1}
    assert ngram_counts(["a", "b", "a"], 2) == {("a", "b"): 1, ("b", "a"): 1}
    assert ngram_counts(["a"], 2) == {}
    with pytest.raises(ValueError):
        ngram_counts(["a"], 0)


def test_modified_precision_clipping():
    hyp = ["the"] * 7
    assert modified_precision([hyp], [[CAT]], 1) == (2, 7)
    assert brute_ngram_precision([hyp], [[CAT]], 1) == (2, 7)


def test_modified_precision_identity_and_disjoint():
    assert modified_precision([CAT], [[CAT]], 2) == (5, 5)
    assert modified_precision([["a", "b"]], [[["c", "d"]]], 1) == (0, 2)


def test_modified_precision_errors():
    with pytest.raises(LengthMismatch):
        modified_precision([CAT], [[CAT], [CAT]], 1)
    with pytest.raises(EmptyCorpus):
        modified_precision([], [], 1)


@pytest.mark.parametrize(
    "c, r, expected",
    [
        (7, 6, 1.0),
        (6, 6, 1.0),
        (3, 6, math.exp(1 - 6 / 3)),
        (0, 6, 0.0),
    ],
)
def test_brevity_penalty(c, r, expected):
    assert brevity_penalty(c, r) == pytest.approx(expected, abs=1e-12)
    assert brevity_penalty(3, 6) == pytest.approx(0.367879, abs=1e-6)


def test_effective_ref_length_ties_to_shorter():
    assert effective_ref_length(5, [4, 6]) == 4
    assert effective_ref_length(5, [7, 6, 3]) == 6


def test_bleu_identity():
    report = bleu_corpus([CAT, TONIGHT], [CAT, TONIGHT])
    assert report.score == 100.0
    assert report.brevity_penalty == 1.0


def test_bleu_zero_fourgram_case():
    report = bleu_corpus([SAT], [CAT])
    assert report.precisions == ((5, 6), (3, 5), (1, 4), (0, 3))
    assert report.score == 0.0
    for n in range(1, 5):
        assert report.precisions[n - 1] == brute_ngram_precision([SAT], [[CAT]], n)


def test_bleu_tonight_case():
    report = bleu_corpus([TONIGHT], [CAT])
    assert report.precisions == ((6, 7), (5, 6), (4, 5), (3, 4))
    assert report.brevity_penalty == 1.0
    assert report.candidate_length == 7 and report.reference_length == 6
    assert report.score == pytest.approx(100 * (3 / 7) ** 0.25, abs=1e-9)
    assert report.score == pytest.approx(80.91, abs=0.01)


def test_bleu_smoothing():
    unsmoothed = bleu_corpus([SAT], [CAT])
    smoothed = bleu_corpus([SAT], [CAT], smoothing="add_epsilon:0.1")
    assert unsmoothed.score == 0.0
    expected = 100 * math.exp((math.log(5 / 6) + math.log(3 / 5) + math.log(1 / 4) + math.log(0.1 / 3)) / 4)
    assert smoothed.score == pytest.approx(expected, rel=1e-12)
    # smoothing never changes non-zero precisions
    assert bleu_corpus([TONIGHT], [CAT], smoothing=0.1).score == bleu_corpus([TONIGHT], [CAT]).score
    with pytest.raises(ValueError):
        bleu_corpus([SAT], [CAT], smoothing="laplace")


def test_bleu_multiple_references():
    hyp = "the cat sat".split()
    refs = [["a", "cat", "sat", "here"], ["the", "cat", "sat"]]
    report = bleu_corpus([hyp], [refs])
    assert report.reference_length == 3
    assert report.precisions[0] == (3, 3)


def test_bleu_short_hypothesis_is_penalised():
    report = bleu_corpus([CAT[:4]], [CAT])
    assert report.brevity_penalty == pytest.approx(math.exp(1 - 6 / 4))


def test_report_line():
    line = bleu_corpus([TONIGHT], [CAT]).format_line()
    assert line == "BLEU=80.91 p1=6/7 p2=5/6 p3=4/5 p4=3/4 BP=1.000000 c=7 r=6"
    assert "BLEU" in bleu_corpus([CAT], [CAT]).format_text()


def test_bleu_text_splits_on_whitespace():
    assert bleu_text(["the cat  is on the mat"], [["the cat is on the mat"]]).score == 100.0


words = st.sampled_from(["the", "cat", "a", "mat", "on", "is", "dog"])
sentence = st.lists(words, min_size=0, max_size=12)


@given(st.lists(st.tuples(sentence, sentence), min_size=1, max_size=8))
def test_precisions_match_brute_force(pairs):
    hyps = [h for h, _ in pairs]
    refs = [[r] for _, r in pairs]
    report = bleu_corpus(hyps, refs)
    for n in range(1, 5):
        m, t = report.precisions[n - 1]
        assert (m, t) == brute_ngram_precision(hyps, refs, n)
        assert 0 <= m <= t
    assert 0.0 <= report.score <= 100.0
    assert 0.0 <= report.brevity_penalty <= 1.0


@given(st.lists(st.lists(words, min_size=4, max_size=12), min_size=1, max_size=8))
def test_identity_property(corpus):
    assert bleu_corpus(corpus, corpus).score == 100.0


@given(st.lists(st.tuples(sentence, sentence), min_size=1, max_size=8), st.randoms(use_true_random=False))
def test_permutation_invariance(pairs, rnd):
    shuffled = list(pairs)
    rnd.shuffle(shuffled)
    a = bleu_corpus([h for h, _ in pairs], [r for _, r in pairs])
    b = bleu_corpus([h for h, _ in shuffled], [r for _, r in shuffled])
    assert a == b


def test_monotone_brevity():
    # same precisions (all matched), shrinking candidate length
    ref = list("abcdefghijklmnop")
    scores = [bleu_corpus([ref[:k]], [ref]).score for k in range(16, 3, -1)]
    assert all(x > y for x, y in zip(scores, scores[1:]))
