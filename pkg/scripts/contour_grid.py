#!/usr/bin/env python3
"""Predicted vs measured iteration counts over the slit annulus.

Draws a log-polar grid on {alpha^2 <= |z| <= 1} (arguments offset off
the branch cut), estimates the iteration count kappa(z) from the
conformal-map formula, then runs the scalar recursion at every node and
records the first step whose normalized error drops under delta.
Prints both distributions and how often they disagree; optionally saves
the per-node grid as CSV.
"""

import argparse
import math
import sys
import warnings

import numpy as np

from zolosqrt.zolofuncs import BranchCutError, ZoloParams, kappa_of, scalar_iterate


def polar_grid(alpha, n_r, n_theta):
    log_r = np.linspace(2.0 * math.log10(alpha), 0.0, n_r)
    j = np.arange(n_theta)
    theta = -math.pi + (j + 0.5) * 2.0 * math.pi / n_theta
    return [(float(lr), float(th)) for lr in log_r for th in theta]


def measured_count(z, p, delta, k_max):
    tr = scalar_iterate(z, p, k_max)
    for k, err in enumerate(tr.normalized_errors):
        if err <= delta:
            return k
    return math.inf


def histogram(counts, k_max):
    total = len(counts)
    lines = []
    for k in range(k_max + 1):
        share = sum(1 for c in counts if math.ceil(c) == k) / total
        lines.append(f"  k={k}: {100.0 * share:5.1f}%")
    stuck = sum(1 for c in counts if not math.isfinite(c) or c > k_max)
    lines.append(f"  >{k_max} or none: {100.0 * stuck / total:5.1f}%")
    return "\n".join(lines)


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--m", type=int, default=8)
    ap.add_argument("--ell", type=int, default=8)
    ap.add_argument("--alpha", type=float, default=1e-5)
    ap.add_argument("--grid", default="40x48", metavar="NRxNTHETA")
    ap.add_argument("--delta", type=float, default=1e-14,
                    help="normalized error target (default 1e-14)")
    ap.add_argument("--k-max", type=int, default=6)
    ap.add_argument("-o", "--output", help="write the per-node CSV here")
    args = ap.parse_args(argv)

    n_r, _, n_theta = args.grid.partition("x")
    n_r, n_theta = int(n_r), int(n_theta)
    p = ZoloParams(args.m, args.ell, args.alpha)

    nodes, predicted, measured = [], [], []
    out_of_region = 0
    for lr, th in polar_grid(args.alpha, n_r, n_theta):
        z = 10.0 ** lr * complex(math.cos(th), math.sin(th))
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always")
            try:
                kp = kappa_of(z, args.alpha, p, args.delta)
            except (ValueError, BranchCutError):
                kp = math.inf
        out_of_region += bool(caught)
        km = measured_count(z, p, args.delta, args.k_max)
        nodes.append((lr, th))
        predicted.append(kp)
        measured.append(km)

    print(f"type ({args.m},{args.ell}), alpha = {args.alpha:g}, "
          f"{n_r}x{n_theta} grid, delta = {args.delta:g}")
    print("predicted kappa (ceil):")
    print(histogram(predicted, args.k_max))
    print("measured count:")
    print(histogram(measured, args.k_max))
    both = [(kp, km) for kp, km in zip(predicted, measured)
            if math.isfinite(kp) and math.isfinite(km)]
    off = sum(1 for kp, km in both if abs(math.ceil(kp) - km) > 1)
    print(f"prediction off by more than one step on {off} of "
          f"{len(both)} comparable nodes; "
          f"{out_of_region} nodes outside the estimate's validity region")

    if args.output:
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write("log10_abs_z,arg_z,kappa_predicted,k_measured\n")
            for (lr, th), kp, km in zip(nodes, predicted, measured):
                fh.write(f"{lr!r},{th!r},{kp!r},{km!r}\n")
        print(f"wrote {args.output}", file=sys.stderr)
    return 0


if __name__ == "__main__":
    sys.exit(main())
