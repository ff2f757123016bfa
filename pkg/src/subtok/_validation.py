"""Input validation helpers shared by the estimators, CLI and pipeline."""

from collections.abc import Iterable

from .tokenize import SCHEMES


def check_sentences(X, name="X"):
    """Return ``X`` as a list of single-line strings.

    A bare string is rejected: it is almost always a sentence passed where a
    corpus was expected.
    """
    if isinstance(X, (str, bytes)):
        raise TypeError(f"{name} must be an iterable of sentences, not a single string")
    if not isinstance(X, Iterable):
        raise TypeError(f"{name} must be an iterable of sentences, got {type(X).__name__}")
    out = []
    for i, s in enumerate(X):
        if not isinstance(s, str):
            raise TypeError(f"{name}[{i}] is {type(s).__name__}, expected str")
        if "\n" in s or "\r" in s:
            raise ValueError(f"{name}[{i}] contains a line break")
        out.append(s)
    return out


def check_token_lists(Xt, name="Xt"):
    """Return ``Xt`` as a list of token lists; space-joined lines are split."""
    if isinstance(Xt, (str, bytes)):
        raise TypeError(f"{name} must be an iterable of token sequences")
    out = []
    for i, toks in enumerate(Xt):
        if isinstance(toks, str):
            toks = toks.split()
        else:
            toks = list(toks)
            for t in toks:
                if not isinstance(t, str) or not t:
                    raise ValueError(f"{name}[{i}] has an invalid token {t!r}")
        out.append(toks)
    return out


def check_scheme(scheme):
    if scheme not in SCHEMES:
        raise ValueError(f"scheme must be one of {', '.join(SCHEMES)}; got {scheme!r}")
    return scheme


def check_positive_int(value, name, allow_zero=False):
    if isinstance(value, bool) or not isinstance(value, int):
        raise TypeError(f"{name} must be an int, got {type(value).__name__}")
    if value < 0 or (value == 0 and not allow_zero):
        raise ValueError(f"{name} must be {'>= 0' if allow_zero else '> 0'}, got {value}")
    return value
