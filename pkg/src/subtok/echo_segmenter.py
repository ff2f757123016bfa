"""Minimal segmenter process for the line protocol.

Reads one word per line and answers with the word unchanged (``identity``) or
split into letter/digit and symbol runs (``--rule``).  Useful as a template
for wrapping a real morphological analyzer::

    subtok tokenize --scheme morpheme --segmenter "python -m subtok.echo_segmenter"
"""

import sys

from .tokenize import rule_segment


def main(argv=None):
    argv = sys.argv[1:] if argv is None else argv
    split = rule_segment if "--rule" in argv else (lambda w: [w])
    stdin = open(sys.stdin.fileno(), encoding="utf-8", closefd=False)
    stdout = open(sys.stdout.fileno(), "w", encoding="utf-8", closefd=False)
    for line in stdin:
        stdout.write("\t".join(split(line.rstrip("\n"))) + "\n")
        stdout.flush()


if __name__ == "__main__":
    main()
