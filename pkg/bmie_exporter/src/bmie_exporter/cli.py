"""Command line for the exporter.

    bmie-export --model <id-or-path> --conllu <path> --out <prefix>
                [--layer L] [--pool mean|first] [--batch B] [--device D]

writes <prefix>.bmie and <prefix>.jsonl.  Exit codes: 0 on success, 1 on
operational failure, 2 on usage errors.
"""

from __future__ import annotations

import argparse
import sys

from .export import AlignmentError, ExportJob, export
from .treebank import TreebankError


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="bmie-export", description=__doc__)
    parser.add_argument("--model", required=True, help="checkpoint name or directory")
    parser.add_argument("--conllu", required=True, help="treebank to embed")
    parser.add_argument("--out", required=True, help="output prefix")
    parser.add_argument("--layer", type=int, default=-1,
                        help="hidden-state index, negative counts from the end (default -1)")
    parser.add_argument("--pool", choices=("mean", "first"), default="mean",
                        help="subword pooling (default mean)")
    parser.add_argument("--batch", type=int, default=8, help="sentences per forward pass")
    parser.add_argument("--device", default="cpu", help="torch device (default cpu)")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code
    job = ExportJob(model=args.model, conllu=args.conllu, out=args.out,
                    layer=args.layer, pool=args.pool,
                    batch_size=args.batch, device=args.device)
    try:
        binary, sidecar = export(job)
    except (AlignmentError, TreebankError, OSError, ValueError) as exc:
        print(f"export failed: {exc}", file=sys.stderr)
        return 1
    print(f"wrote {binary} and {sidecar}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
