"""Command-line interface: ``subtok <command> ...``.

Exit status is 0 on success, 1 on a data error and 2 on a usage error.  Data
goes to stdout, diagnostics to stderr.  Every file argument accepts ``-``.
"""

import argparse
import io
import os
import sys
import warnings

from . import bpe, corpus, metrics
from .exceptions import SubtokError
from .tokenize import (
    DEFAULT_SPACE_MARKER,
    MarkerConfig,
    TokenizedSentence,
    detokenize_alphabet,
    detokenize_morpheme,
    get_segmenter,
    tokenize_alphabet,
    tokenize_morpheme,
)


class DataError(Exception):
    pass


def _open_in(path):
    if path == "-":
        return io.TextIOWrapper(sys.stdin.buffer, encoding="utf-8", newline="")
    return open(path, encoding="utf-8", newline="")


def write_text(path, text):
    if path == "-":
        sys.stdout.flush()
        sys.stdout.buffer.write(text.encode("utf-8"))
        sys.stdout.buffer.flush()
    else:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)


def read_lines(path):
    with _open_in(path) as fh:
        text = fh.read()
    if not text:
        return []
    lines = text.split("\n")
    if lines[-1] == "":
        lines.pop()
    return [line[:-1] if line.endswith("\r") else line for line in lines]


def write_lines(path, lines):
    write_text(path, "".join(line + "\n" for line in lines))


def _warn(msg):
    print(f"subtok: warning: {msg}", file=sys.stderr)


def _default_seed():
    value = os.environ.get("SUBTOK_SEED")
    if value is None:
        return 0
    try:
        return int(value)
    except ValueError:
        raise SystemExit(f"subtok: SUBTOK_SEED must be an integer, got {value!r}")


def _marker_config(args):
    return MarkerConfig(args.marker, "escape" if args.escape else "reject")


def _bpe_config(args, **extra):
    return bpe.BpeConfig(continuation_marker=args.continuation, pretokenize=args.pretok, **extra)


def _map_lines(lines, fn):
    out = []
    for lineno, line in enumerate(lines, start=1):
        try:
            out.append(fn(line, lineno))
        except (SubtokError, ValueError) as exc:
            raise DataError(f"line {lineno}: {exc}") from exc
    return out


# --- commands -------------------------------------------------------------------


def cmd_tokenize(args, parser):
    if args.scheme == "morpheme" and not args.segmenter:
        parser.error("--scheme morpheme requires --segmenter")
    if args.scheme == "bpe" and not args.merges:
        parser.error("--scheme bpe requires --merges")
    lines = read_lines(args.input)
    if args.scheme == "alphabet":
        cfg = _marker_config(args)
        out = _map_lines(lines, lambda s, _: tokenize_alphabet(s, cfg).to_line())
    elif args.scheme == "morpheme":
        cfg = _marker_config(args)
        with get_segmenter(args.segmenter) as seg:
            out = _map_lines(lines, lambda s, _: tokenize_morpheme(s, seg, cfg).to_line())
            if not seg.surface_preserving:
                _warn(f"segmenter {seg.name!r} is not surface-preserving; detokenization will not be exact")
    else:
        mt = bpe.load_merges(args.merges)
        cfg = _bpe_config(args)
        out = _map_lines(lines, lambda s, _: bpe.tokenize_bpe(s, mt, cfg).to_line())
    write_lines(args.output, out)


def _detokenizer(args):
    if args.scheme == "alphabet":
        cfg = _marker_config(args)
        return lambda line, _: detokenize_alphabet(line.split(), cfg)
    if args.scheme == "morpheme":
        cfg = _marker_config(args)
        return lambda line, _: detokenize_morpheme(line.split(), cfg)
    cfg = _bpe_config(args)

    def detok(line, lineno):
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always", bpe.BpeWarning)
            text = bpe.detokenize_bpe(TokenizedSentence.from_line(line, "bpe"), cfg)
        for w in caught:
            _warn(f"line {lineno}: {w.message}")
        return text

    return detok


def cmd_detokenize(args, parser):
    write_lines(args.output, _map_lines(read_lines(args.input), _detokenizer(args)))


def cmd_learn_bpe(args, parser):
    cfg = _bpe_config(args, num_merges=args.merges, min_pair_frequency=args.min_freq)
    wf = bpe.count_words(read_lines(args.input), pretokenize=cfg.pretokenize)
    mt = bpe.learn_bpe(wf, cfg)
    write_text(args.output, bpe.dumps_merges(mt))
    if len(mt) < cfg.num_merges:
        _warn(f"learned {len(mt)} of {cfg.num_merges} merges (no pair reached --min-freq {cfg.min_pair_frequency})")


def cmd_split(args, parser):
    if (args.ratio is None) == (args.counts is None):
        parser.error("give exactly one of --ratio or --counts")
    if len(args.inputs) not in (1, 2):
        parser.error("split takes SRC TGT or a single TSV file")
    spec = corpus.SplitSpec.parse(ratio=args.ratio, counts=args.counts, seed=args.seed)
    data = corpus.read_parallel(*args.inputs)
    written = corpus.write_split(data, spec, args.out)
    write_lines("-", [written[name] for name in sorted(written)])


def cmd_bleu(args, parser):
    hyps = read_lines(args.hyp)
    ref_files = [read_lines(r) for r in args.refs]
    for path, lines in zip(args.refs, ref_files):
        if len(lines) != len(hyps):
            raise DataError(f"{path} has {len(lines)} lines, {args.hyp} has {len(hyps)}")
    if args.scheme and not args.raw_tokens:
        detok = _detokenizer(args)
        hyps = _map_lines(hyps, detok)
        ref_files = [_map_lines(lines, detok) for lines in ref_files]
    report = metrics.bleu_text(hyps, list(zip(*ref_files)), smoothing=args.smoothing)
    write_lines("-", [report.format_text() if args.format == "text" else report.format_line()])


def cmd_stats(args, parser):
    report = corpus.vocab_stats(read_lines(args.input))
    if args.top is not None:
        report.frequencies = report.frequencies[: args.top]
    write_text("-", report.format())


def cmd_pipeline(args, parser):
    cfg = corpus.PipelineConfig.from_file(args.config, seed=args.seed)
    manifest = corpus.run_pipeline(cfg)
    write_lines("-", [f"{key} = {value}" for key, value in manifest.items()])


# --- parser ------------------------------------------------------------------------


def _add_marker_flags(p):
    p.add_argument("--marker", default=DEFAULT_SPACE_MARKER, help="space-marker character (default U+2581)")
    p.add_argument("--escape", action="store_true", help="escape literal markers in the input instead of failing")


def _add_bpe_flags(p):
    p.add_argument("--continuation", default="@@", help="continuation marker (default @@)")
    p.add_argument("--pretok", action="store_true", help="split punctuation off words first")


def build_parser():
    parser = argparse.ArgumentParser(prog="subtok", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("tokenize", help="tokenize one sentence per line")
    p.add_argument("--scheme", required=True, choices=["alphabet", "morpheme", "bpe"])
    p.add_argument("--segmenter", help="rule, identity, or a command speaking the segmenter line protocol")
    p.add_argument("--merges", help="merge-table file (bpe)")
    _add_marker_flags(p)
    _add_bpe_flags(p)
    p.add_argument("input", nargs="?", default="-")
    p.add_argument("-o", "--output", default="-")
    p.set_defaults(func=cmd_tokenize)

    p = sub.add_parser("detokenize", help="invert tokenize")
    p.add_argument("--scheme", required=True, choices=["alphabet", "morpheme", "bpe"])
    _add_marker_flags(p)
    _add_bpe_flags(p)
    p.add_argument("input", nargs="?", default="-")
    p.add_argument("-o", "--output", default="-")
    p.set_defaults(func=cmd_detokenize)

    p = sub.add_parser("learn-bpe", help="learn a merge table")
    p.add_argument("input", nargs="?", default="-")
    p.add_argument("-o", "--output", default="-", help="merge-table file to write")
    p.add_argument("--merges", type=int, default=32000, help="number of merges (default 32000)")
    p.add_argument("--min-freq", type=int, default=2, help="stop when the best pair is rarer (default 2)")
    _add_bpe_flags(p)
    p.set_defaults(func=cmd_learn_bpe)

    p = sub.add_parser("split", help="seeded train/valid/test split of a parallel corpus")
    p.add_argument("inputs", nargs="+", metavar="FILE", help="SRC TGT, or one TSV file")
    p.add_argument("--ratio", help="e.g. 98:1:1")
    p.add_argument("--counts", help="e.g. 784000,8000,8000")
    p.add_argument("--seed", type=int, default=None, help="shuffle seed (default $SUBTOK_SEED or 0)")
    p.add_argument("-o", "--out", required=True, help="output prefix")
    p.set_defaults(func=cmd_split)

    p = sub.add_parser("bleu", help="corpus BLEU of a hypothesis file against references")
    p.add_argument("hyp")
    p.add_argument("refs", nargs="+")
    p.add_argument("--smoothing", default="none", help="none or add_epsilon:EPS")
    p.add_argument("--scheme", choices=["alphabet", "morpheme", "bpe"], help="inputs are token files; detokenize first")
    p.add_argument("--raw-tokens", action="store_true", help="with --scheme, score the token streams as they are")
    p.add_argument("--format", choices=["line", "text"], default="line")
    _add_marker_flags(p)
    _add_bpe_flags(p)
    p.set_defaults(func=cmd_bleu)

    p = sub.add_parser("stats", help="vocabulary statistics of a token file")
    p.add_argument("input", nargs="?", default="-")
    p.add_argument("--top", type=int, help="only list the N most frequent tokens")
    p.set_defaults(func=cmd_stats)

    p = sub.add_parser("pipeline", help="split, learn, tokenize and write a manifest")
    p.add_argument("config", help="JSON pipeline configuration")
    p.add_argument("--seed", type=int, default=None, help="override the config seed")
    p.set_defaults(func=cmd_pipeline)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "seed", "unset") is None and args.command == "split":
        args.seed = _default_seed()
    if args.command == "pipeline" and args.seed is None and "SUBTOK_SEED" in os.environ:
        args.seed = _default_seed()
    try:
        args.func(args, parser)
    except (DataError, SubtokError, ValueError, OSError, KeyError) as exc:
        print(f"subtok: error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
