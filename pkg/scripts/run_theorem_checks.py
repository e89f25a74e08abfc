"""Run every numerical check and print the summary table.

Usage:
    python scripts/run_theorem_checks.py [--only t1,t4] [--seed 0] [--out reports.jsonl]
"""

import argparse
import sys

from bayesmi.theorems import CHECKS, run_checks, summary_table, write_reports


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--only", help="comma-separated check ids (default: all)")
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--out", help="write one JSON report per line here")
    args = parser.parse_args(argv)

    ids = None
    if args.only:
        ids = [t.strip() for t in args.only.split(",") if t.strip()]
        unknown = [t for t in ids if t not in CHECKS]
        if unknown:
            parser.error(f"unknown check ids: {', '.join(unknown)}")

    reports = run_checks(ids, seed=args.seed)
    print(summary_table(reports))
    if args.out:
        write_reports(reports, args.out)
        print(f"reports written to {args.out}")
    failed = [r for r in reports if not r.passed]
    for report in failed:
        print(f"failing instance for {report.theorem_id}: {report.failure}", file=sys.stderr)
    return 1 if failed else 0


if __name__ == "__main__":
    sys.exit(main())
