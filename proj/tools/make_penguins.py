#!/usr/bin/env python3
"""Generate data/penguins.csv: a 2,000-row, 6-feature penguin morphometrics table.

Per-species means/spreads follow the published Palmer station summaries; rows
are resampled with a fixed seed so the file is reproducible. About 1% of the
isotope cells are left as NA, mirroring the missing values in the raw data.
"""
import argparse

import numpy as np

SPECIES = {
    # share, mean vector, std vector, correlation between flipper and mass
    "adelie": (0.44, [38.8, 18.3, 190.0, 3700.0, 8.86, -25.80], [2.7, 1.2, 6.5, 460.0, 0.43, 0.60]),
    "chinstrap": (0.20, [48.8, 18.4, 195.8, 3733.0, 9.36, -24.55], [3.3, 1.1, 7.1, 384.0, 0.37, 0.24]),
    "gentoo": (0.36, [47.5, 15.0, 217.2, 5076.0, 8.25, -26.19], [3.1, 1.0, 6.5, 504.0, 0.26, 0.54]),
}
COLUMNS = ["bill_length_mm", "bill_depth_mm", "flipper_length_mm", "body_mass_g", "delta_15n", "delta_13c"]

# within-species correlation structure (bill length, bill depth, flipper, mass)
CORR = np.eye(6)
for (a, b), r in {(0, 1): 0.4, (0, 2): 0.45, (0, 3): 0.55, (1, 2): 0.3, (1, 3): 0.55, (2, 3): 0.7, (4, 5): 0.3}.items():
    CORR[a, b] = CORR[b, a] = r


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--rows", type=int, default=2000)
    ap.add_argument("--seed", type=int, default=20)
    ap.add_argument("--out", default="data/penguins.csv")
    args = ap.parse_args()

    rng = np.random.default_rng(args.seed)
    names = list(SPECIES)
    shares = np.array([SPECIES[n][0] for n in names])
    labels = rng.choice(len(names), size=args.rows, p=shares / shares.sum())

    rows = []
    for k in labels:
        _, mean, std = SPECIES[names[k]]
        cov = np.outer(std, std) * CORR
        rows.append(rng.multivariate_normal(mean, cov))

    with open(args.out, "w", newline="\n") as fh:
        fh.write(",".join(COLUMNS) + "\n")
        for row in rows:
            cells = [f"{row[0]:.1f}", f"{row[1]:.1f}", f"{row[2]:.0f}", f"{row[3]:.0f}", f"{row[4]:.5f}", f"{row[5]:.5f}"]
            for c in (4, 5):
                if rng.random() < 0.01:
                    cells[c] = "NA"
            fh.write(",".join(cells) + "\n")


if __name__ == "__main__":
    main()
