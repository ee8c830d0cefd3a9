"""How often is NEF1 satisfied as preferences grow more diverse?

Samples Mallows profiles at several dispersion levels and compares plain
welfare optima with their CRR counterparts.  The default is a quick,
scaled-down sweep; pass --full for ten agents, twenty items and 25 trials
per level (a couple of minutes), and --csv PATH to keep the raw rows.
"""
import argparse

from crralloc import ExperimentConfig, run_experiment

parser = argparse.ArgumentParser()
parser.add_argument("--full", action="store_true")
parser.add_argument("--csv")
parser.add_argument("--jobs", type=int, default=1)
args = parser.parse_args()

objectives = ("UM", "UM-CRR", "RM", "RM-CRR")
if args.full:
    config = ExperimentConfig(objectives=objectives, notions=("NEF1", "EF1"))
else:
    config = ExperimentConfig(
        n=6, m=10, agent_caps=(2, 4), item_caps=(2, 3), trials=8, objectives=objectives, notions=("NEF1", "EF1")
    )

result = run_experiment(config, jobs=args.jobs)
for notion in config.notions:
    print(f"\nmean {notion} fraction")
    print("phi    " + "".join(f"{o:>9s}" for o in objectives))
    for phi in config.phis:
        print(f"{phi:<6.2f} " + "".join(f"{result.mean(phi, o, notion):9.3f}" for o in objectives))

if args.csv:
    with open(args.csv, "w", encoding="utf-8") as fh:
        fh.write(result.to_csv())
    print(f"\nrows written to {args.csv}")
