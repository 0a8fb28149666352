#!/usr/bin/env python3
"""Build a WBCD-shaped stand-in from the scikit-learn copy of the diagnostic
breast cancer data: all benign rows plus a seeded sample of malignant rows,
flagged in an `outlier` column. Attributes keep their original units unless
--minmax is given. This is not the curated outlier-detection
version of the dataset; use it only to exercise the evaluate pipeline."""

import argparse
import csv

import numpy as np
from sklearn.datasets import load_breast_cancer


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--output", required=True)
    ap.add_argument("--outliers", type=int, default=10)
    ap.add_argument("--seed", type=int, default=2016)
    ap.add_argument("--minmax", action="store_true", help="scale every attribute to [0, 1]")
    args = ap.parse_args()

    data = load_breast_cancer()
    benign = np.flatnonzero(data.target == 1)
    malignant = np.flatnonzero(data.target == 0)
    picked = np.random.default_rng(args.seed).choice(malignant, size=args.outliers, replace=False)
    rows = np.concatenate([benign, np.sort(picked)])

    x = data.data[rows]
    if args.minmax:
        lo, hi = x.min(axis=0), x.max(axis=0)
        x = (x - lo) / (hi - lo)

    names = [n.replace(" ", "_") for n in data.feature_names]
    with open(args.output, "w", newline="") as f:
        w = csv.writer(f)
        w.writerow(names + ["outlier"])
        for row, i in zip(x, rows):
            w.writerow([repr(float(v)) for v in row] + [int(data.target[i] == 0)])


if __name__ == "__main__":
    main()
