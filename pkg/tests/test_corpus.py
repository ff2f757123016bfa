import json
import random

import pytest

from subtok.corpus import (
    PipelineConfig,
    SplitMix64,
    SplitSpec,
    apportion,
    normalize_line,
    permutation,
    read_manifest,
    read_parallel,
    run_pipeline,
    split_corpus,
    split_sizes,
    vocab_stats,
    write_split,
)
from subtok.exceptions import BadSpec, PipelineError
from subtok.tokenize import tokenize_alphabet

from conftest import random_sentence
from oracles import hamilton

RATIO = SplitSpec(ratio=(98, 1, 1), seed=42)


def test_splitmix64_reference_values():
    # first outputs for seed 0 / seed 1234567 from the published reference code
    rng = SplitMix64(0)
    assert [rng.next() for _ in range(3)] == [
        0xE220A8397B1DCDAF,
        0x6E789E6AA1B965F4,
        0x06C45D188009454F,
    ]
    rng = SplitMix64(1234567)
    assert [rng.next() for _ in range(2)] == [6457827717110365317, 3203168211198807973]


def test_below_is_in_range():
    rng = SplitMix64(3)
    assert all(0 <= rng.below(b) < b for b in range(1, 200) for _ in range(5))


def test_permutation_is_a_permutation():
    for n in (0, 1, 2, 17, 1000):
        assert sorted(permutation(n, 5)) == list(range(n))


@pytest.mark.parametrize(
    "n, sizes",
    [
        (1000, [980, 10, 10]),
        (5, [3, 1, 1]),
        (3, [1, 1, 1]),
        (100, [98, 1, 1]),
        (101, [99, 1, 1]),
    ],
)
def test_ratio_sizes(n, sizes):
    assert split_sizes(n, RATIO) == sizes


def test_paper_scale_sizes():
    assert split_sizes(800_000, RATIO) == [784_000, 8_000, 8_000]


def test_apportion_matches_oracle_for_small_n():
    for weights in [(98, 1, 1), (8, 1, 1), (1, 1, 1), (3, 2, 2), (5, 3, 1)]:
        for n in range(3, 400):
            sizes = apportion(n, weights)
            assert sizes == hamilton(n, weights), (n, weights)
            assert sum(sizes) == n and min(sizes) >= 1


def test_counts_mode():
    spec = SplitSpec(counts=(798_000, 1_000, 1_000), seed=1)
    assert split_sizes(800_000, spec) == [798_000, 1_000, 1_000]
    with pytest.raises(BadSpec):
        split_sizes(799_999, spec)


@pytest.mark.parametrize(
    "kwargs",
    [
        dict(ratio=(98, 0, 2)),
        dict(ratio=(98, 1)),
        dict(counts=(1, -1, 2)),
        dict(ratio=(1, 1, 1), counts=(1, 1, 1)),
        dict(),
    ],
)
def test_bad_specs(kwargs):
    with pytest.raises(BadSpec):
        SplitSpec(**kwargs)


def test_ratio_needs_three_lines():
    with pytest.raises(BadSpec):
        split_corpus(2, RATIO)


def test_parse():
    assert SplitSpec.parse(ratio="98:1:1", seed=3).ratio == (98, 1, 1)
    assert SplitSpec.parse(counts="5,1,1").counts == (5, 1, 1)
    assert SplitSpec.parse(ratio="0.8:0.1:0.1").describe() == "ratio 4/5:1/10:1/10"
    with pytest.raises(BadSpec):
        SplitSpec.parse(ratio="a:b:c")


def test_partition_and_determinism():
    rng = random.Random(0)
    for _ in range(300):
        n = rng.randint(3, 300)
        spec = SplitSpec(ratio=(rng.randint(1, 98), rng.randint(1, 5), rng.randint(1, 5)), seed=rng.getrandbits(64))
        parts = split_corpus(n, spec)
        flat = [i for part in parts for i in part]
        assert sorted(flat) == list(range(n))
        assert parts == split_corpus(n, spec)


def test_different_seeds_differ():
    n = 10_000
    perms = {tuple(permutation(n, seed)[:50]) for seed in range(20)}
    assert len(perms) == 20
    a = split_corpus(n, SplitSpec(ratio=(98, 1, 1), seed=1))
    b = split_corpus(n, SplitSpec(ratio=(98, 1, 1), seed=2))
    assert a[2] != b[2]
    # test part looks like a uniform sample: its mean index is near n/2
    mean = sum(a[2]) / len(a[2])
    assert abs(mean - n / 2) < 0.15 * n


def test_negative_and_large_seeds_are_masked():
    assert permutation(50, -1) == permutation(50, 2**64 - 1)


# --- reading and writing ---


def test_normalize_line():
    assert normalize_line("  a \t b  ") == "a b"
    assert normalize_line("") == ""


def test_read_parallel_two_files(tmp_path):
    (tmp_path / "ko").write_text("안녕  하세요\n반가워요\n", encoding="utf-8")
    (tmp_path / "en").write_text(" hello\nnice to meet you\n", encoding="utf-8")
    pc = read_parallel(tmp_path / "ko", tmp_path / "en")
    assert pc.source_lines == ["안녕 하세요", "반가워요"]
    assert pc.target_lines == ["hello", "nice to meet you"]


def test_read_parallel_tsv(tmp_path):
    (tmp_path / "p.tsv").write_text("가\ta\n나\tb\n", encoding="utf-8")
    pc = read_parallel(tmp_path / "p.tsv")
    assert (pc.source_lines, pc.target_lines) == (["가", "나"], ["a", "b"])
    (tmp_path / "bad.tsv").write_text("가\ta\tb\n", encoding="utf-8")
    with pytest.raises(ValueError, match="bad.tsv:1"):
        read_parallel(tmp_path / "bad.tsv")


def test_read_parallel_length_mismatch(tmp_path):
    (tmp_path / "a").write_text("x\ny\n", encoding="utf-8")
    (tmp_path / "b").write_text("x\n", encoding="utf-8")
    with pytest.raises(ValueError):
        read_parallel(tmp_path / "a", tmp_path / "b")


def test_write_split_preserves_alignment(tmp_path):
    src = [f"s{i}" for i in range(50)]
    tgt = [f"t{i}" for i in range(50)]
    (tmp_path / "src").write_text("\n".join(src) + "\n")
    (tmp_path / "tgt").write_text("\n".join(tgt) + "\n")
    pc = read_parallel(tmp_path / "src", tmp_path / "tgt")
    written = write_split(pc, SplitSpec(ratio=(8, 1, 1), seed=9), tmp_path / "out")
    assert sorted(written) == ["test.src", "test.tgt", "train.src", "train.tgt", "valid.src", "valid.tgt"]
    total = 0
    for name in ("train", "valid", "test"):
        s = (tmp_path / f"out.{name}.src").read_text().splitlines()
        t = (tmp_path / f"out.{name}.tgt").read_text().splitlines()
        assert [x[1:] for x in s] == [y[1:] for y in t]
        total += len(s)
    assert total == 50


# --- vocab ---


def test_vocab_stats():
    report = vocab_stats(["a b", "a"])
    assert report.unique_token_count == 2
    assert report.frequencies == [("a", 2), ("b", 1)]
    assert report.total_tokens == 3
    assert report.format() == "unique=2 total=3\na\t2\nb\t1\n"
    assert vocab_stats([]).unique_token_count == 0


def test_vocab_ties_sorted_by_token():
    assert vocab_stats(["b a c a b"]).frequencies == [("a", 2), ("b", 2), ("c", 1)]


def test_alphabet_vocab_bound_on_hangul():
    rng = random.Random(2)
    text = [
        " ".join("".join(chr(rng.randrange(0xAC00, 0xD7A4)) for _ in range(4)) for _ in range(6)) + "."
        for _ in range(2000)
    ]
    report = vocab_stats(tokenize_alphabet(s).to_line() for s in text)
    # 51 compatibility jamo + marker + "."
    assert report.unique_token_count <= 53
    assert report.unique_token_count == 53


# --- pipeline ---


def _toy_corpus(tmp_path, n=100, seed=0):
    rng = random.Random(seed)
    src = [random_sentence(rng) for _ in range(n)]
    tgt = [random_sentence(rng) for _ in range(n)]
    (tmp_path / "src.txt").write_text("\n".join(src) + "\n", encoding="utf-8")
    (tmp_path / "tgt.txt").write_text("\n".join(tgt) + "\n", encoding="utf-8")
    return src, tgt


def _config(tmp_path, out, source_side, target_side, **extra):
    d = {
        "source": "src.txt",
        "target": "tgt.txt",
        "output_dir": out,
        "split": {"ratio": "8:1:1"},
        "seed": 7,
        "source_side": source_side,
        "target_side": target_side,
    }
    d.update(extra)
    path = tmp_path / f"{out}.json"
    path.write_text(json.dumps(d), encoding="utf-8")
    return path


def test_pipeline_bpe_morpheme(tmp_path):
    _toy_corpus(tmp_path)
    cfg = PipelineConfig.from_file(
        _config(tmp_path, "out", {"scheme": "bpe", "bpe": {"num_merges": 50}}, {"scheme": "morpheme"})
    )
    manifest = run_pipeline(cfg)
    out = tmp_path / "out"
    assert len(list(out.glob("*.tok"))) == 6
    assert [p.name for p in out.glob("*.merges")] == ["src.merges"]
    assert (out / "manifest.txt").exists()
    assert manifest["sizes"] == "train=80 valid=10 test=10"
    assert manifest["stages"].split(",") == [
        "read", "split", "write_split", "learn_bpe:src", "tokenize:src", "tokenize:tgt"
    ]
    assert read_manifest(out / "manifest.txt") == manifest
    for name, value in manifest.items():
        if name.startswith("output."):
            assert len(value) == 64


def test_pipeline_alphabet_has_no_merge_table(tmp_path):
    _toy_corpus(tmp_path)
    cfg = PipelineConfig.from_file(_config(tmp_path, "out", {"scheme": "alphabet"}, {"scheme": "alphabet"}))
    run_pipeline(cfg)
    assert not list((tmp_path / "out").glob("*.merges"))


def test_pipeline_token_files_round_trip(tmp_path):
    _toy_corpus(tmp_path)
    cfg = PipelineConfig.from_file(
        _config(tmp_path, "out", {"scheme": "alphabet"}, {"scheme": "morpheme", "segmenter": "identity"})
    )
    run_pipeline(cfg)
    from subtok.tokenize import detokenize_alphabet, detokenize_morpheme

    out = tmp_path / "out"
    for name in ("train", "valid", "test"):
        src = (out / f"{name}.src").read_text(encoding="utf-8").splitlines()
        tok = (out / f"{name}.src.tok").read_text(encoding="utf-8").splitlines()
        assert [detokenize_alphabet(t.split()) for t in tok] == src
        tgt = (out / f"{name}.tgt").read_text(encoding="utf-8").splitlines()
        tok = (out / f"{name}.tgt.tok").read_text(encoding="utf-8").splitlines()
        assert [detokenize_morpheme(t.split()) for t in tok] == tgt


def test_pipeline_ids_trace_alignment(tmp_path):
    src, tgt = _toy_corpus(tmp_path)
    cfg = PipelineConfig.from_file(_config(tmp_path, "out", {"scheme": "alphabet"}, {"scheme": "alphabet"}))
    run_pipeline(cfg)
    out = tmp_path / "out"
    for name in ("train", "valid", "test"):
        ids = [int(x) for x in (out / f"{name}.ids").read_text().split()]
        assert (out / f"{name}.src").read_text(encoding="utf-8").splitlines() == [src[i] for i in ids]
        assert (out / f"{name}.tgt").read_text(encoding="utf-8").splitlines() == [tgt[i] for i in ids]


def test_pipeline_determinism(tmp_path):
    _toy_corpus(tmp_path)
    sides = ({"scheme": "bpe", "bpe": {"num_merges": 80}}, {"scheme": "bpe", "bpe": {"num_merges": 40}})
    run_pipeline(PipelineConfig.from_file(_config(tmp_path, "a", *sides)))
    run_pipeline(PipelineConfig.from_file(_config(tmp_path, "b", *sides)))
    files_a = sorted(p.name for p in (tmp_path / "a").iterdir())
    assert files_a == sorted(p.name for p in (tmp_path / "b").iterdir())
    for name in files_a:
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes(), name


def test_pipeline_stage_errors(tmp_path):
    _toy_corpus(tmp_path)
    (tmp_path / "src.txt").write_text("a ▁ b\n" * 10, encoding="utf-8")
    (tmp_path / "tgt.txt").write_text("x\n" * 10, encoding="utf-8")
    cfg = PipelineConfig.from_file(_config(tmp_path, "out", {"scheme": "alphabet"}, {"scheme": "alphabet"}))
    with pytest.raises(PipelineError) as info:
        run_pipeline(cfg)
    assert info.value.stage == "tokenize:src"
    assert "line 1" in str(info.value)


def test_pipeline_config_errors(tmp_path):
    _toy_corpus(tmp_path)
    with pytest.raises(FileNotFoundError):
        PipelineConfig.from_dict({"source": "nope", "target": "tgt.txt"}, base_dir=tmp_path)
    with pytest.raises(ValueError, match="unknown keys"):
        PipelineConfig.from_file(_config(tmp_path, "o", {"scheme": "alphabet", "bpe": {}}, {"scheme": "alphabet"}))


def test_config_hash_ignores_paths(tmp_path):
    _toy_corpus(tmp_path)
    a = PipelineConfig.from_file(_config(tmp_path, "a", {"scheme": "alphabet"}, {"scheme": "alphabet"}))
    b = PipelineConfig.from_file(_config(tmp_path, "b", {"scheme": "alphabet"}, {"scheme": "alphabet"}))
    c = PipelineConfig.from_file(_config(tmp_path, "c", {"scheme": "alphabet"}, {"scheme": "alphabet"}), seed=8)
    assert a.config_hash() == b.config_hash() != c.config_hash()
