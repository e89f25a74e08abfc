"""How badly can a probe be misled by a handful of uninformative examples?

Pure-noise features carry nothing about the labels, so any confident probe
prediction is wrong information.  This sweep trains probes on tiny training
sets across feature widths and reports the median envelope per width: the
values sit below zero, and lower-dimensional features hurt more, because
test points in a small space are close to the memorized training points
while high-dimensional noise is nearly orthogonal to them.

Usage:
    python scripts/tiny_data_regime.py [--dims 8,64,512] [--train-size 20]
                                       [--labels 37] [--seeds 10] [--trials 3]
"""

import argparse
import statistics
import sys

from bayesmi.curves import build_plan, envelope_at, run_learning_curve
from bayesmi.dataio import SyntheticSpec, synthesize


def median_envelope(dim, train_size, labels, seeds, trials) -> float:
    envs = []
    for seed in range(seeds):
        spec = SyntheticSpec(kind="noise", n_labels=labels, dim=dim, seed=seed)
        dataset, _ = synthesize(spec, n=1_000)
        plan = build_plan(train_size, n_points=2, trials=trials, seed=seed)
        curve = run_learning_curve(dataset, plan=plan, repr_id=f"d{dim}")
        envs.append(envelope_at(curve, train_size))
    return statistics.median(envs)


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--dims", default="8,64,512",
                        help="comma-separated feature widths")
    parser.add_argument("--train-size", type=int, default=20)
    parser.add_argument("--labels", type=int, default=37)
    parser.add_argument("--seeds", type=int, default=10)
    parser.add_argument("--trials", type=int, default=3)
    args = parser.parse_args(argv)

    dims = [int(d) for d in args.dims.split(",") if d.strip()]
    print(f"median envelope over {args.seeds} seeds, N={args.train_size}, "
          f"{args.labels} labels, {args.trials} trials per size:")
    for dim in dims:
        med = median_envelope(dim, args.train_size, args.labels, args.seeds, args.trials)
        print(f"  dim {dim:>4d}: {med:+.4f} bits")
    return 0


if __name__ == "__main__":
    sys.exit(main())
