#!/usr/bin/env python3
"""Full vs cyclic vs stochastic block updates on one quadratic instance.

All three variants share the trace format, so the same audits apply.
The stochastic run is averaged over seeds because its descent inequality
holds in expectation only.  Traces land as CSV files under --out.

Usage:
    python3 scripts/compare_variants.py [--out traces_out]
"""

import argparse
from pathlib import Path

import numpy as np

from iprox import (
    ConstantBeta,
    InstanceSpec,
    ParamSchedule,
    RunConfig,
    descent_audit,
    expectation_descent_audit,
    make_instance,
    run_cyclic,
    run_inertial,
    run_stochastic,
    start_point,
)
from iprox.traceio import write_mean_trace_csv, write_trace_csv

M = 4
ITERS = 2000
SEEDS = range(8)


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--out", default="traces_out", help="directory for trace CSVs")
    args = ap.parse_args()
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)

    spec = InstanceSpec(kind="quadratic", n=32, conditioning=25.0, m=M, seed=7)
    problem = make_instance(spec)
    x0 = start_point(spec, "gaussian", scale=2.0)

    full = run_inertial(
        problem,
        ParamSchedule(beta_rule=ConstantBeta(0.5), c=0.9, variant="full"),
        x0,
        RunConfig(max_iters=ITERS),
    )
    cyc = run_cyclic(
        problem,
        ParamSchedule(beta_rule=ConstantBeta(0.5), c=0.9, variant="cyclic", m=M),
        x0,
        RunConfig(max_iters=ITERS),
    )
    sto_schedule = ParamSchedule(beta_rule=ConstantBeta(0.5), c=0.9,
                                 variant="stochastic", m=M)
    sto = [
        run_stochastic(problem, sto_schedule, x0, RunConfig(max_iters=ITERS, seed=s))
        for s in SEEDS
    ]

    write_trace_csv(out / "full.csv", full)
    write_trace_csv(out / "cyclic.csv", cyc)
    write_mean_trace_csv(out / "stochastic_mean.csv", sto)

    f_star = problem.f_star
    print(f"{'variant':<12} {'F(end) - F*':>14} {'worst slack':>14}")
    print(f"{'full':<12} {full.F[-1] - f_star:>14.3e} {descent_audit(full):>14.3e}")
    print(f"{'cyclic':<12} {cyc.F[-1] - f_star:>14.3e} {descent_audit(cyc):>14.3e}")
    mean_end = float(np.mean([t.F[-1] for t in sto])) - f_star
    print(f"{'stochastic':<12} {mean_end:>14.3e} "
          f"{expectation_descent_audit(sto):>14.3e}")
    print(f"wrote {len(list(out.glob('*.csv')))} CSV files to {out}/")


if __name__ == "__main__":
    main()
