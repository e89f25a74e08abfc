"""Command-line surface: reproducible runs over the library's pieces.

Exit codes form the scripting contract: 0 on success, 1 when a check or
runtime validation fails, 2 on usage errors.  Every command takes a
seed, and rerunning a command with the settings recorded in its
manifest reproduces the output files byte for byte.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import os
import sys
from dataclasses import asdict
from datetime import datetime, timezone
from pathlib import Path
from typing import Dict, List, Optional

from . import __version__
from .agents import illustrative_example
from .curves import compare_representations, run_learning_curve, write_curves_csv
from .dataio import (
    ConlluError,
    EmbeddingFormatError,
    SyntheticSpec,
    extract_task_dataset,
    parse_conllu,
    random_type_embeddings,
    read_embeddings,
    sidecar_path,
    synthesize,
    write_embeddings,
)
from .probe import TrainConfig
from .theorems import run_checks, summary_table, write_reports
from .theorems.runner import CHECKS

WORKERS_ENV = "BAYESMI_WORKERS"


class RunFailure(Exception):
    """Operational failure: exit code 1 with the message on stderr."""


class UsageError(Exception):
    """Bad arguments detected after parsing: exit code 2."""


def _resolve_workers(flag: Optional[int]) -> int:
    if flag is not None:
        return max(1, flag)
    env = os.environ.get(WORKERS_ENV)
    if env:
        try:
            return max(1, int(env))
        except ValueError as exc:
            raise RunFailure(f"bad {WORKERS_ENV} value {env!r}: {exc}") from exc
    return os.cpu_count() or 1


def _sha256(path: Path) -> str:
    h = hashlib.sha256()
    with path.open("rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            h.update(chunk)
    return h.hexdigest()


def _write_manifest(out_csv: Path, payload: dict) -> Path:
    manifest = out_csv.with_suffix(out_csv.suffix + ".manifest.json")
    payload = dict(payload)
    payload["version"] = __version__
    payload["timestamp"] = datetime.now(timezone.utc).isoformat()
    manifest.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    return manifest


def _positive_int(text: str) -> int:
    value = int(text)
    if value <= 0:
        raise argparse.ArgumentTypeError(f"must be positive, got {value}")
    return value


def _classes(text: str) -> int:
    value = int(text)
    if value < 2:
        raise argparse.ArgumentTypeError(f"need at least 2 classes, got {value}")
    return value


SPEC_FIELDS = {
    "kind": str,
    "n_labels": int,
    "dim": int,
    "noise_level": float,
    "seed": int,
    "n": int,
}


def parse_spec_string(text: str) -> Dict[str, object]:
    """``key=value`` pairs joined by commas, e.g. kind=noise,dim=16,n=1000."""
    out: Dict[str, object] = {}
    for part in text.split(","):
        part = part.strip()
        if not part:
            continue
        if "=" not in part:
            raise ValueError(f"expected key=value, got {part!r}")
        key, raw = part.split("=", 1)
        key = key.strip()
        if key not in SPEC_FIELDS:
            raise ValueError(f"unknown spec field {key!r}; valid: {sorted(SPEC_FIELDS)}")
        try:
            out[key] = SPEC_FIELDS[key](raw.strip())
        except ValueError as exc:
            raise ValueError(f"bad value for {key!r}: {exc}") from exc
    if "kind" not in out:
        raise ValueError("spec needs at least kind=...")
    return out


def cmd_example(args: argparse.Namespace) -> int:
    summary = illustrative_example(args.classes)
    fields = {
        "classes": args.classes,
        "mi": summary.mi,
        "belief_mi": summary.belief_mi,
        "bayesian_mi_at_d0": summary.bayesian_mi_at_d0,
    }
    if args.format == "json":
        print(json.dumps(fields, sort_keys=True))
    else:
        for key, value in fields.items():
            print(f"{key}: {value}")
    return 0


def cmd_theorems(args: argparse.Namespace) -> int:
    ids = None
    if args.only:
        ids = [part.strip() for part in args.only.split(",") if part.strip()]
        unknown = [i for i in ids if i not in CHECKS]
        if unknown:
            raise UsageError(f"unknown check ids {unknown}; valid ids are {list(CHECKS)}")
    reports = run_checks(ids, seed=args.seed)
    print(summary_table(reports))
    if args.out:
        write_reports(reports, args.out)
        print(f"report written to {args.out}")
    failed = [r for r in reports if not r.passed]
    if failed:
        for report in failed:
            print(f"failing instance for {report.theorem_id}:", file=sys.stderr)
            print(json.dumps(report.failure, indent=2, sort_keys=True, default=str), file=sys.stderr)
        return 1
    return 0


def _load_treebank_datasets(args: argparse.Namespace) -> Dict[str, "object"]:
    conllu_path = Path(args.conllu)
    try:
        records = parse_conllu(conllu_path.read_text(encoding="utf-8"))
    except OSError as exc:
        raise RunFailure(f"cannot read treebank {conllu_path}: {exc}") from exc
    except ConlluError as exc:
        raise RunFailure(f"{conllu_path}: {exc}") from exc
    datasets = {}
    names: List[str] = []
    for emb in args.embeddings:
        emb_path = Path(emb)
        try:
            store = read_embeddings(emb_path)
        except OSError as exc:
            raise RunFailure(f"cannot read embeddings {emb_path}: {exc}") from exc
        except EmbeddingFormatError as exc:
            raise RunFailure(f"{emb_path}: {exc}") from exc
        if not store.alignment:
            raise RunFailure(f"{emb_path}: no alignment sidecar at {sidecar_path(emb_path)}")
        try:
            dataset = extract_task_dataset(records, store, args.task, seed=args.seed)
        except ValueError as exc:
            raise RunFailure(f"{emb_path} with {conllu_path}: {exc}") from exc
        name = emb_path.stem
        if name in datasets:
            name = f"{name}-{len(names)}"
        datasets[name] = dataset
        names.append(name)
    first_name = names[0]
    first = datasets[first_name]
    for name in names[1:]:
        other = datasets[name]
        if other.labels != first.labels or other.n_train != first.n_train:
            raise RunFailure(
                f"embeddings {first_name} and {name} disagree on extracted data "
                f"(labels or coverage differ); curves cannot be paired"
            )
    return datasets


def cmd_curve(args: argparse.Namespace) -> int:
    treebank_mode = args.conllu is not None or args.embeddings
    if args.task == "synthetic":
        if not args.spec or treebank_mode:
            raise UsageError("synthetic task needs --spec and no treebank inputs")
    else:
        if args.spec or not (args.conllu and args.embeddings):
            raise UsageError("treebank tasks need --conllu and --embeddings, and no --spec")

    workers = _resolve_workers(args.workers)
    config = TrainConfig()
    manifest: Dict[str, object] = {
        "command": "curve",
        "task": args.task,
        "seed": args.seed,
        "points": args.points,
        "trials": args.trials,
        "workers": workers,
        "train_config": asdict(config),
        "output": str(args.out),
        "inputs": {},
    }

    if args.task == "synthetic":
        try:
            fields = parse_spec_string(args.spec)
        except ValueError as exc:
            raise UsageError(f"bad --spec: {exc}") from exc
        n = int(fields.pop("n", 1000))
        try:
            spec = SyntheticSpec(**fields)
            dataset, true_mi = synthesize(spec, n)
        except ValueError as exc:
            raise UsageError(f"bad --spec: {exc}") from exc
        manifest["spec"] = {**asdict(spec), "n": n}
        manifest["analytic_mi_bits"] = true_mi
        curves = {
            "synthetic": run_learning_curve(
                dataset,
                n_points=args.points,
                trials=args.trials,
                seed=args.seed,
                config=config,
                repr_id="synthetic",
                workers=workers,
            )
        }
        manifest["datasets"] = {"synthetic": dataset.digest()}
    else:
        datasets = _load_treebank_datasets(args)
        inputs = {str(args.conllu): _sha256(Path(args.conllu))}
        for emb in args.embeddings:
            inputs[str(emb)] = _sha256(Path(emb))
            side = sidecar_path(Path(emb))
            inputs[str(side)] = _sha256(side)
        manifest["inputs"] = inputs
        curves = compare_representations(
            datasets,
            n_points=args.points,
            trials=args.trials,
            seed=args.seed,
            config=config,
            workers=workers,
        )
        manifest["datasets"] = {name: ds.digest() for name, ds in datasets.items()}

    out = Path(args.out)
    write_curves_csv(curves, out)
    manifest_path = _write_manifest(out, manifest)
    print(f"curve written to {out}")
    print(f"manifest written to {manifest_path}")
    return 0


def cmd_gen_random(args: argparse.Namespace) -> int:
    conllu_path = Path(args.conllu)
    try:
        records = parse_conllu(conllu_path.read_text(encoding="utf-8"))
    except OSError as exc:
        raise RunFailure(f"cannot read treebank {conllu_path}: {exc}") from exc
    except ConlluError as exc:
        raise RunFailure(f"{conllu_path}: {exc}") from exc
    if not records:
        raise RunFailure(f"{conllu_path}: treebank holds no tokens")
    store = random_type_embeddings(records, args.dim, args.seed)
    try:
        write_embeddings(store, args.out)
    except OSError as exc:
        raise RunFailure(f"cannot write {args.out}: {exc}") from exc
    print(f"wrote {store.n_vectors} type vectors for {len(store.alignment)} tokens to {args.out}")
    print(f"alignment sidecar at {sidecar_path(args.out)}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="bayesmi",
        description="Exact Bayesian information measures, theorem checks, and probing curves.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_example = sub.add_parser("example", help="biased-agent worked example")
    p_example.add_argument("--classes", type=_classes, default=2)
    p_example.add_argument("--format", choices=("json", "text"), default="text")
    p_example.set_defaults(func=cmd_example)

    p_theorems = sub.add_parser("theorems", help="run the numerical theorem checks")
    p_theorems.add_argument("--only", default=None, help="comma-separated check ids")
    p_theorems.add_argument("--seed", type=int, default=0)
    p_theorems.add_argument("--out", default=None, help="write the JSON report here")
    p_theorems.set_defaults(func=cmd_theorems)

    p_curve = sub.add_parser("curve", help="learning curves of held-out information")
    p_curve.add_argument("--task", choices=("pos", "deprel", "synthetic"), required=True)
    p_curve.add_argument("--embeddings", nargs="*", default=[], help="BMIE files, one per representation")
    p_curve.add_argument("--conllu", default=None)
    p_curve.add_argument("--spec", default=None, help="synthetic spec, e.g. kind=noise,dim=16,n=1000")
    p_curve.add_argument("--points", type=_positive_int, default=50)
    p_curve.add_argument("--trials", type=_positive_int, default=5)
    p_curve.add_argument("--seed", type=int, default=0)
    p_curve.add_argument("--out", required=True, help="CSV output path")
    p_curve.add_argument("--workers", type=_positive_int, default=None,
                         help=f"trial parallelism (default: cpu count, or ${WORKERS_ENV})")
    p_curve.set_defaults(func=cmd_curve)

    p_gen = sub.add_parser("gen-random", help="type-level random vectors for a treebank")
    p_gen.add_argument("--conllu", required=True)
    p_gen.add_argument("--dim", type=_positive_int, required=True)
    p_gen.add_argument("--seed", type=int, default=0)
    p_gen.add_argument("--out", required=True, help="BMIE output path")
    p_gen.set_defaults(func=cmd_gen_random)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 2
    except RunFailure as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
