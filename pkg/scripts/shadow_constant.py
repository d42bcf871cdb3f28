"""Fit the constant relating xi of the completed lift to the theta shadow."""

import argparse

from reciprocal_traces.checks import SHADOW_TAUS
from reciprocal_traces.numerics import PrecisionContext
from reciprocal_traces.theta import lowering_and_xi_checks


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--prec", type=int, default=60)
    args = parser.parse_args()
    ctx = PrecisionContext(args.prec)
    report = lowering_and_xi_checks((), (), ctx, SHADOW_TAUS)
    nstr = ctx.mp.nstr
    for row in report.xi_rows:
        print(f"tau = {row['tau']!s:>12}  ratio = {nstr(row['ratio'], 18)}")
    print(f"fitted    {nstr(report.fitted_constant, 18)}  (spread {report.constant_spread:.2e})")
    print(f"predicted {nstr(report.predicted_constant, 18)}")


if __name__ == "__main__":
    main()
