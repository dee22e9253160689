"""A reduced benchmark sweep: how often GES recovers an inclusion-optimal
class as the sample size grows, and how often that class is also
parameter optimal.

The full desk-scale protocol (sizes 10..163840, 50 replicates) is what
`gesbn experiment --gold w --out results.csv` runs; the published-scale
protocol (17 sizes up to 655360, 100 replicates) is one flag away via
--paper-scale. This demo trims both axes to finish in about a minute.
"""

import sys

from gesbn import ExperimentPlan, run_experiment, summarize
from gesbn.harness import results_csv

sizes = tuple(10 * 4 ** k for k in range(8))  # 10 .. 163840, coarser ladder
replicates = 20

for gold in ("w_structure", "four_cycle"):
    plan = ExperimentPlan(gold=gold, sizes=sizes, replicates=replicates, base_seed=0)
    rows = run_experiment(plan)
    print(f"=== {gold} ({replicates} replicates per size) ===")
    print(f"{'m':>8} {'inclusion-optimal':>18} {'parameter-optimal':>18}")
    for m, (n_incl, n_popt, total) in summarize(rows).items():
        print(f"{m:>8} {n_incl:>11}/{total:<6} {n_popt:>11}/{total:<6}")
    print()

if "--write-csv" in sys.argv:
    plan = ExperimentPlan(gold="w_structure", sizes=sizes, replicates=replicates)
    with open("demo_results.csv", "w") as fh:
        fh.write(results_csv(run_experiment(plan)))
    print("wrote demo_results.csv")
