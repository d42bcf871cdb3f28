"""Print tr(D) for D_min <= D <= 0 with rational reconstructions."""

import argparse

from reciprocal_traces.numerics import PrecisionContext
from reciprocal_traces.traces import generating_series


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--dmin", type=int, default=-40)
    parser.add_argument("--prec", type=int, default=60)
    args = parser.parse_args()
    ctx = PrecisionContext(args.prec)
    print(f"{'D':>6}  {'classes':>7}  {'rational':>24}  value")
    for e in generating_series(args.dmin, ctx, reconstruct=True):
        guess = "" if e.rational_guess is None else str(e.rational_guess)
        print(f"{e.D:>6}  {e.class_count:>7}  {guess:>24}  {ctx.mp.nstr(e.value, 25)}")


if __name__ == "__main__":
    main()
