"""Command-line entry point: parse, embed, and score exporters.

Exit codes: 0 success, 1 invalid input or flags, 2 backend unavailable
(with a remediation hint on stderr).  All subcommands are offline with the
default surrogate backends and deterministic: identical inputs and flags
produce byte-identical artifacts.
"""

from __future__ import annotations

import argparse
import sys

from . import __version__
from .backends import (
    EMBEDDING_BACKENDS,
    METRIC_BACKENDS,
    PARSER_BACKENDS,
    load_encoder,
    load_metrics,
    load_parser,
)
from .embed import embed_corpus
from .errors import BackendUnavailable, SidecarError
from .manifest import SidecarManifest
from .parse import parse_corpus
from .score import METRIC_NAMES, score_neural


class _CliParser(argparse.ArgumentParser):
    def error(self, message: str):      # argparse would exit(2); keep 2 for backends
        raise SidecarError(message)


def _manifest(args) -> SidecarManifest:
    parser = load_parser(args.parser)
    encoder = load_encoder(args.encoder, args.dim)
    metrics = load_metrics(args.metrics)
    return SidecarManifest(
        parser_model=parser.model_id,
        embedding_model=encoder.model_id,
        embedding_dimension=encoder.dimension,
        metric_models={name: metrics.model_id for name in METRIC_NAMES},
        tool_version=__version__,
    )


def _cmd_parse(args) -> int:
    written, skipped = parse_corpus(
        args.corpus, args.out, load_parser(args.parser), _manifest(args)
    )
    print(args.out)
    if skipped:
        print(f"skipped {len(skipped)} document(s); see {args.out}.skips.json",
              file=sys.stderr)
    return 0


def _cmd_embed(args) -> int:
    embed_corpus(args.corpus, args.out, load_encoder(args.encoder, args.dim),
                 _manifest(args))
    print(args.out)
    return 0


def _cmd_score(args) -> int:
    score_neural(args.candidates, args.corpus, args.out, load_metrics(args.metrics),
                 _manifest(args))
    print(args.out)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = _CliParser(prog="clcts-sidecar", description=__doc__)
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    subs = parser.add_subparsers(dest="subcommand", required=True)

    def add_backend_flags(sub: argparse.ArgumentParser) -> None:
        sub.add_argument("--parser", choices=PARSER_BACKENDS, default="surrogate")
        sub.add_argument("--encoder", choices=EMBEDDING_BACKENDS, default="surrogate")
        sub.add_argument("--metrics", choices=METRIC_BACKENDS, default="surrogate")
        sub.add_argument("--dim", type=int, default=64,
                         help="embedding dimension for the surrogate encoder")

    p = subs.add_parser("parse", help="corpus JSONL to CoNLL-U with doc_id blocks")
    p.add_argument("--corpus", required=True)
    p.add_argument("--out", required=True, help="output .conllu path")
    add_backend_flags(p)
    p.set_defaults(func=_cmd_parse)

    p = subs.add_parser("embed", help="corpus JSONL to sentence-embedding JSONL")
    p.add_argument("--corpus", required=True)
    p.add_argument("--out", required=True, help="output .jsonl path")
    add_backend_flags(p)
    p.set_defaults(func=_cmd_embed)

    p = subs.add_parser("score", help="candidate summaries to a metric score CSV")
    p.add_argument("--candidates", required=True, help="JSONL {doc_id, system_id, summary}")
    p.add_argument("--corpus", required=True)
    p.add_argument("--out", required=True, help="output .csv path")
    add_backend_flags(p)
    p.set_defaults(func=_cmd_score)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except SidecarError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except FileNotFoundError as exc:
        print(f"error: missing input file: {exc.filename}", file=sys.stderr)
        return 1
    except BackendUnavailable as exc:
        print(f"backend unavailable: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    raise SystemExit(main())
