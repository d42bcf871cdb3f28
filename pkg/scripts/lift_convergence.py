"""Quadrature lift at tau versus the Fourier side as the excision radius shrinks."""

import argparse

from reciprocal_traces.cli import parse_tau
from reciprocal_traces.lift_oracle import QuadratureSpec, average_value_integral, fourier_side, regularized_lift
from reciprocal_traces.numerics import PrecisionContext


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--tau", default="0+1i")
    args = parser.parse_args()
    tau = parse_tau(args.tau)
    series = complex(fourier_side(tau, PrecisionContext(40)))
    print(f"Fourier side: {series:.10e}")
    print(f"{'eps':>8}  {'lift':>36}  {'|lift - series|':>15}  {'tr(0) by quadrature':>20}")
    for eps in (0.1, 0.05, 0.025, 0.0125):
        spec = QuadratureSpec(epsilon=eps)
        lift = regularized_lift(tau, spec).value
        avg = average_value_integral(spec).value.real
        print(f"{eps:>8}  {lift:>36.10e}  {abs(lift - series):>15.3e}  {avg:>20.10e}")
    print(f"tr(0) exact: {-1 / 165888:.10e}")


if __name__ == "__main__":
    main()
