import random
import sys

import pytest

sys.path.insert(0, __file__.rsplit("/", 1)[0])

HANGUL_WORDS = ["안녕", "하세요", "한국어", "번역", "뉴스", "각시", "읽다", "값", "닭", "없어요", "힣", "가", "꽃", "많이", "의사"]
LATIN = "abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ0123456789"
PUNCT = ".,!?;:'\"()-[]%&/"


def random_word(rng):
    kind = rng.random()
    if kind < 0.35:
        return "".join(chr(rng.randrange(0xAC00, 0xD7A4)) for _ in range(rng.randint(1, 4)))
    if kind < 0.5:
        return rng.choice(HANGUL_WORDS) + rng.choice(["", "", ".", "?", "을", "는"])
    if kind < 0.85:
        return "".join(rng.choice(LATIN) for _ in range(rng.randint(1, 8))) + rng.choice(["", "", ".", ","])
    return "".join(rng.choice(PUNCT) for _ in range(rng.randint(1, 3)))


def random_sentence(rng, max_words=8):
    """Single-spaced, trimmed, no markers, no standalone jamo."""
    return " ".join(random_word(rng) for _ in range(rng.randint(1, max_words)))


@pytest.fixture
def rng():
    return random.Random(1234)


@pytest.fixture
def identity_command():
    return [sys.executable, "-m", "subtok.echo_segmenter"]
