"""Hessian scan of the diagonal matrix p-norm, plus the determinant and large-p checks."""

import argparse
import csv
from math import comb
from pathlib import Path

import numpy as np

from radmean.experiments import DiagonalPoint, determinant_check, matrix_norm_convexity_scan, matrix_pnorm


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--p", default="-0.5,0.25,0.5,0.75,1,2", help="comma-separated exponents")
    ap.add_argument("--grid", default="0.1,3,50", help="lo,hi,n")
    ap.add_argument("--h", type=float, default=1e-4)
    ap.add_argument("--out", default="results/matrix_norm_scan.csv")
    args = ap.parse_args()

    lo, hi, n = args.grid.split(",")
    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    with out.open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["p", "min_eig", "worst_x1", "worst_x2"])
        for p in (float(t) for t in args.p.split(",")):
            rep = matrix_norm_convexity_scan(p, float(lo), float(hi), int(n), args.h)
            w.writerow([p, rep.min_eig, *rep.worst_point])
            print(f"p = {p:5}: min Hessian eigenvalue {rep.min_eig: .3e} at {rep.worst_point}")

    det = determinant_check(DiagonalPoint(2.0, 2.0))
    print(f"p = -2 at diag(2, 2): {det.value:.12g}; |det|^(1/2) = {det.det_pow_plus:.12g}, "
          f"|det|^(-1/2) = {det.det_pow_minus:.12g}")
    v64 = matrix_pnorm(DiagonalPoint(1.0, 0.0), 64.0)
    exact = (comb(64, 32) / 2**64) ** (1 / 64)
    print(f"p = 64 at diag(1, 0): {v64:.6f} (exact {exact:.6f}), {1 - v64:.2%} below the operator norm")
    for p in (256.0, 1024.0, 4096.0):
        print(f"p = {p:.0f}: gap {1 - matrix_pnorm(DiagonalPoint(1.0, 0.0), p):.2%}")
    print(f"wrote {out}")


if __name__ == "__main__":
    main()
