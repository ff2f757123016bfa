"""Parallel corpora: reading, seeded splitting, vocabulary statistics and the
end-to-end preprocessing pipeline.
"""

import hashlib
import json
import os
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from .bpe import save_merges
from .exceptions import BadSpec, PipelineError, SubtokError
from .tokenize import MarkerConfig

MASK64 = (1 << 64) - 1
SPLIT_NAMES = ("train", "valid", "test")
GENERATOR_NAME = "splitmix64 + Fisher-Yates (descending, rejection-sampled bounds)"
NORMALIZATION = "strip; collapse whitespace runs to one space"


def normalize_line(line: str) -> str:
    return " ".join(line.split())


@dataclass
class ParallelCorpus:
    source_lines: List[str]
    target_lines: List[str]
    provenance: Tuple[str, ...] = ()

    def __post_init__(self):
        if len(self.source_lines) != len(self.target_lines):
            raise ValueError(
                f"source has {len(self.source_lines)} lines but target has {len(self.target_lines)}"
            )

    def __len__(self):
        return len(self.source_lines)

    def subset(self, indices: Sequence[int]) -> "ParallelCorpus":
        return ParallelCorpus(
            [self.source_lines[i] for i in indices],
            [self.target_lines[i] for i in indices],
            self.provenance,
        )


def _read_lines(path) -> List[str]:
    with open(path, encoding="utf-8", newline="") as fh:
        text = fh.read()
    lines = text.split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    return [normalize_line(line) for line in lines]


def read_parallel(source, target=None) -> ParallelCorpus:
    """Read two aligned files, or one ``source<TAB>target`` file when
    ``target`` is None.  Lines are whitespace-normalized."""
    if target is not None:
        return ParallelCorpus(_read_lines(source), _read_lines(target), (str(source), str(target)))
    src, tgt = [], []
    with open(source, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.rstrip("\n").rstrip("\r")
            parts = line.split("\t")
            if len(parts) != 2:
                raise ValueError(f"{source}:{lineno}: expected exactly one TAB, found {len(parts) - 1}")
            src.append(normalize_line(parts[0]))
            tgt.append(normalize_line(parts[1]))
    return ParallelCorpus(src, tgt, (str(source),))


# --- splitting ---------------------------------------------------------------


class SplitMix64:
    """SplitMix64 generator (Steele, Lea & Flood 2014); 64-bit state and output."""

    def __init__(self, seed: int):
        self.state = seed & MASK64

    def next(self) -> int:
        self.state = (self.state + 0x9E3779B97F4A7C15) & MASK64
        z = self.state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
        return z ^ (z >> 31)

    def below(self, bound: int) -> int:
        """Uniform integer in [0, bound) by rejection sampling."""
        limit = (1 << 64) - ((1 << 64) % bound)
        while True:
            x = self.next()
            if x < limit:
                return x % bound


def permutation(n: int, seed: int) -> List[int]:
    rng = SplitMix64(seed)
    perm = list(range(n))
    for i in range(n - 1, 0, -1):
        j = rng.below(i + 1)
        perm[i], perm[j] = perm[j], perm[i]
    return perm


@dataclass(frozen=True)
class SplitSpec:
    """Either ``ratio`` or ``counts`` (three parts each) plus a seed."""

    ratio: Optional[Tuple] = None
    counts: Optional[Tuple[int, int, int]] = None
    seed: int = 0

    def __post_init__(self):
        if (self.ratio is None) == (self.counts is None):
            raise BadSpec("give exactly one of ratio or counts")
        parts = self.ratio if self.ratio is not None else self.counts
        if len(parts) != 3:
            raise BadSpec(f"expected three parts, got {len(parts)}")
        if self.ratio is not None and any(Fraction(p) <= 0 for p in self.ratio):
            raise BadSpec(f"ratio parts must be positive: {self.ratio}")
        if self.counts is not None and any(int(c) != c or c < 0 for c in self.counts):
            raise BadSpec(f"counts must be non-negative integers: {self.counts}")

    @classmethod
    def parse(cls, ratio: str = None, counts: str = None, seed: int = 0) -> "SplitSpec":
        """From CLI-style strings: ``"98:1:1"`` or ``"784000,8000,8000"``."""
        try:
            if ratio is not None:
                return cls(ratio=tuple(Fraction(p) for p in ratio.split(":")), seed=seed)
            if counts is not None:
                return cls(counts=tuple(int(p) for p in counts.split(",")), seed=seed)
        except ValueError as exc:
            raise BadSpec(str(exc)) from exc
        raise BadSpec("give exactly one of ratio or counts")

    def describe(self) -> str:
        if self.ratio is not None:
            return "ratio " + ":".join(str(p) for p in self.ratio)
        return "counts " + ",".join(str(c) for c in self.counts)


def apportion(n: int, weights: Sequence) -> List[int]:
    """Largest-remainder apportionment of ``n`` items.

    Remainder ties go to the earlier part.  A part left empty then takes one
    item from the currently largest part, so every part is non-empty when
    ``n >= len(weights)``.
    """
    weights = [Fraction(w) for w in weights]
    total = sum(weights)
    quotas = [n * w / total for w in weights]
    sizes = [int(q) for q in quotas]  # floor: quotas are non-negative
    leftover = n - sum(sizes)
    order = sorted(range(len(weights)), key=lambda i: (-(quotas[i] - sizes[i]), i))
    for i in order[:leftover]:
        sizes[i] += 1
    for i in range(len(sizes)):
        if sizes[i] == 0:
            donor = max(range(len(sizes)), key=lambda k: (sizes[k], -k))
            if sizes[donor] <= 1:
                raise BadSpec(f"cannot give every part an item with n={n}")
            sizes[donor] -= 1
            sizes[i] = 1
    return sizes


def split_sizes(n: int, spec: SplitSpec) -> List[int]:
    if spec.counts is not None:
        if sum(spec.counts) != n:
            raise BadSpec(f"counts {spec.counts} sum to {sum(spec.counts)}, corpus has {n} lines")
        return list(spec.counts)
    if n < 3:
        raise BadSpec(f"ratio mode needs at least 3 lines, got {n}")
    return apportion(n, spec.ratio)


def split_corpus(n: int, spec: SplitSpec) -> Tuple[List[int], List[int], List[int]]:
    """Disjoint train/valid/test index lists covering ``range(n)``.

    Indices are taken in permuted order and each part is returned sorted, so
    split files keep the original relative order of their lines.
    """
    sizes = split_sizes(n, spec)
    perm = permutation(n, spec.seed)
    parts, start = [], 0
    for size in sizes:
        parts.append(sorted(perm[start : start + size]))
        start += size
    return tuple(parts)


def write_lines(path, lines: Iterable[str]) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for line in lines:
            fh.write(line + "\n")


def write_split(corpus: ParallelCorpus, spec: SplitSpec, prefix) -> Dict[str, str]:
    """Write ``<prefix>.{train,valid,test}.{src,tgt}``; return name -> path."""
    written = {}
    for name, idx in zip(SPLIT_NAMES, split_corpus(len(corpus), spec)):
        part = corpus.subset(idx)
        for side, lines in (("src", part.source_lines), ("tgt", part.target_lines)):
            path = f"{prefix}.{name}.{side}"
            write_lines(path, lines)
            written[f"{name}.{side}"] = path
    return written


# --- vocabulary statistics ----------------------------------------------------


@dataclass
class VocabReport:
    unique_token_count: int
    frequencies: List[Tuple[str, int]]
    total_tokens: int

    def format(self) -> str:
        lines = [f"unique={self.unique_token_count} total={self.total_tokens}"]
        lines.extend(f"{tok}\t{count}" for tok, count in self.frequencies)
        return "\n".join(lines) + "\n"


def vocab_stats(token_lines: Iterable[str]) -> VocabReport:
    counts = Counter()
    for line in token_lines:
        counts.update(line.split())
    freqs = sorted(counts.items(), key=lambda kv: (-kv[1], kv[0]))
    return VocabReport(len(freqs), freqs, sum(counts.values()))


# --- pipeline ------------------------------------------------------------------


@dataclass
class SideConfig:
    scheme: str
    params: Dict = field(default_factory=dict)

    @classmethod
    def from_dict(cls, d) -> "SideConfig":
        d = dict(d)
        scheme = d.pop("scheme")
        params = {}
        if scheme in ("alphabet", "morpheme"):
            marker = d.pop("marker", {})
            cfg = MarkerConfig(**marker)
            params.update(space_marker=cfg.space_marker, strictness=cfg.strictness)
        if scheme == "morpheme":
            params["segmenter"] = d.pop("segmenter", "rule")
        if scheme == "bpe":
            params.update(d.pop("bpe", {}))
        if d:
            raise ValueError(f"unknown keys for {scheme} side: {sorted(d)}")
        return cls(scheme, params)


@dataclass
class PipelineConfig:
    """Everything a pipeline run depends on.

    JSON layout::

        {"source": "ko.txt", "target": "en.txt",       # or "tsv": "pairs.tsv"
         "output_dir": "out",
         "split": {"ratio": "98:1:1"},                  # or {"counts": "800,100,100"}
         "seed": 42,
         "source_side": {"scheme": "bpe", "bpe": {"num_merges": 8000}},
         "target_side": {"scheme": "morpheme", "segmenter": "rule"}}

    Relative paths are resolved against the config file's directory.
    """

    inputs: Tuple[str, ...]
    output_dir: str
    split: SplitSpec
    source_side: SideConfig
    target_side: SideConfig
    raw: Dict = field(default_factory=dict, repr=False)

    @classmethod
    def from_dict(cls, d, base_dir=".", seed=None) -> "PipelineConfig":
        base = Path(base_dir)

        def resolve(p):
            return str(base / p)

        if "tsv" in d:
            inputs = (resolve(d["tsv"]),)
        else:
            inputs = (resolve(d["source"]), resolve(d["target"]))
        for p in inputs:
            if not os.path.exists(p):
                raise FileNotFoundError(p)
        if seed is None:
            seed = d.get("seed", 0)
        split = d.get("split", {"ratio": "98:1:1"})
        spec = SplitSpec.parse(ratio=split.get("ratio"), counts=split.get("counts"), seed=int(seed))
        raw = dict(d, seed=int(seed))
        return cls(
            inputs,
            resolve(d.get("output_dir", "out")),
            spec,
            SideConfig.from_dict(d["source_side"]),
            SideConfig.from_dict(d["target_side"]),
            raw,
        )

    @classmethod
    def from_file(cls, path, seed=None) -> "PipelineConfig":
        with open(path, encoding="utf-8") as fh:
            d = json.load(fh)
        return cls.from_dict(d, base_dir=Path(path).parent, seed=seed)

    def config_hash(self) -> str:
        """Hash of the run-relevant settings; paths and output location excluded."""
        relevant = {k: v for k, v in self.raw.items() if k not in ("source", "target", "tsv", "output_dir")}
        blob = json.dumps(relevant, sort_keys=True, ensure_ascii=False, separators=(",", ":"))
        return hashlib.sha256(blob.encode("utf-8")).hexdigest()


def sha256_file(path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            h.update(chunk)
    return h.hexdigest()


def _stage(name):
    def wrap(fn):
        def run(*args, **kwargs):
            try:
                return fn(*args, **kwargs)
            except PipelineError:
                raise
            except (SubtokError, OSError, ValueError, KeyError) as exc:
                raise PipelineError(name, exc) from exc

        return run

    return wrap


def _tokenize_lines(tokenizer, lines, label):
    out = []
    for lineno, line in enumerate(lines, start=1):
        try:
            out.append(" ".join(tokenizer.transform([line])[0]))
        except (SubtokError, ValueError) as exc:
            raise ValueError(f"{label}: line {lineno}: {exc}") from exc
    return out


def run_pipeline(cfg: PipelineConfig) -> Dict[str, str]:
    """Split, learn BPE on the training part, tokenize, and write a manifest.

    Returns the manifest as an ordered dict of key -> value.  BPE is only ever
    fitted on the training split of its own side.
    """
    from .estimators import make_tokenizer

    out = Path(cfg.output_dir)
    stages = []

    corpus = _stage("read")(lambda: read_parallel(*cfg.inputs))()
    stages.append("read")
    _stage("split")(lambda: out.mkdir(parents=True, exist_ok=True))()
    parts = _stage("split")(split_corpus)(len(corpus), cfg.split)
    stages.append("split")

    outputs = []
    splits = {name: corpus.subset(idx) for name, idx in zip(SPLIT_NAMES, parts)}

    @_stage("write_split")
    def write_texts():
        for name, idx in zip(SPLIT_NAMES, parts):
            write_lines(out / f"{name}.ids", (str(i) for i in idx))
            write_lines(out / f"{name}.src", splits[name].source_lines)
            write_lines(out / f"{name}.tgt", splits[name].target_lines)
            outputs.extend([f"{name}.ids", f"{name}.src", f"{name}.tgt"])

    write_texts()
    stages.append("write_split")

    for side, side_cfg in (("src", cfg.source_side), ("tgt", cfg.target_side)):
        side_lines = {
            name: (part.source_lines if side == "src" else part.target_lines) for name, part in splits.items()
        }
        tokenizer = _stage(f"configure:{side}")(make_tokenizer)(side_cfg.scheme, **side_cfg.params)
        if side_cfg.scheme == "bpe":
            _stage(f"learn_bpe:{side}")(tokenizer.fit)(side_lines["train"])
            _stage(f"learn_bpe:{side}")(save_merges)(tokenizer.merges_, out / f"{side}.merges")
            outputs.append(f"{side}.merges")
            stages.append(f"learn_bpe:{side}")
        else:
            tokenizer.fit()

        @_stage(f"tokenize:{side}")
        def tokenize_side():
            for name in SPLIT_NAMES:
                toks = _tokenize_lines(tokenizer, side_lines[name], f"{name}.{side}")
                write_lines(out / f"{name}.{side}.tok", toks)
                outputs.append(f"{name}.{side}.tok")
                if name == "train":
                    (out / f"{side}.vocab").write_text(vocab_stats(toks).format(), encoding="utf-8", newline="\n")
                    outputs.append(f"{side}.vocab")

        try:
            tokenize_side()
        finally:
            if hasattr(tokenizer, "close"):
                tokenizer.close()
        stages.append(f"tokenize:{side}")

    manifest = {
        "format": "subtok-manifest v1",
        "config_sha256": cfg.config_hash(),
        "seed": str(cfg.split.seed),
        "generator": GENERATOR_NAME,
        "split": cfg.split.describe(),
        "sizes": " ".join(f"{name}={len(idx)}" for name, idx in zip(SPLIT_NAMES, parts)),
        "normalization": NORMALIZATION,
        "source.scheme": cfg.source_side.scheme,
        "target.scheme": cfg.target_side.scheme,
        "stages": ",".join(stages),
    }
    for i, path in enumerate(cfg.inputs):
        manifest[f"input.{i}.sha256"] = sha256_file(path)
    for name in sorted(outputs):
        manifest[f"output.{name}.sha256"] = sha256_file(out / name)
    _stage("manifest")(write_manifest)(out / "manifest.txt", manifest)
    return manifest


def write_manifest(path, manifest: Dict[str, str]) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("# subtok pipeline manifest\n")
        for key, value in manifest.items():
            fh.write(f"{key} = {value}\n")


def read_manifest(path) -> Dict[str, str]:
    manifest = {}
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.rstrip("\n")
            if not line or line.startswith("#"):
                continue
            key, sep, value = line.partition(" = ")
            if not sep:
                raise ValueError(f"bad manifest line {line!r}")
            manifest[key] = value
    return manifest
