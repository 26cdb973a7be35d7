"""Haar samples of the local spectra with their smallest facet slack.

Writes plot-ready CSV rows ``lam1, lam2, lam3, min_slack, position``.

    python3 scripts/polytope_scan.py --samples 100000 --out polytope_scan.csv
"""

import argparse
import csv
from collections import Counter
from dataclasses import dataclass

import numpy as np

from trireduce.moment import batch_local_spectra, load_facets, polytope_position


@dataclass
class Config:
    samples: int = 100_000
    seed: int = 0
    facets: str = None
    out: str = "polytope_scan.csv"


def run(cfg):
    rng = np.random.default_rng(cfg.seed)
    states = rng.standard_normal((cfg.samples, 8)) + 1j * rng.standard_normal((cfg.samples, 8))
    lam = batch_local_spectra(states)
    facets = load_facets(cfg.facets)
    A = np.array([f.coeffs for f in facets])
    b = np.array([f.rhs for f in facets])
    sign = np.array([1.0 if f.sense == "<=" else -1.0 for f in facets])
    slack = sign * (b - lam @ A.T)
    positions = [polytope_position(l, facets).value for l in lam]
    with open(cfg.out, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["lam1", "lam2", "lam3", "min_slack", "position"])
        for l, s, p in zip(lam, slack.min(axis=1), positions):
            w.writerow([repr(float(x)) for x in l] + [repr(float(s)), p])
    counts = Counter(positions)
    print(f"{cfg.samples} samples: {dict(sorted(counts.items()))}; "
          f"smallest slack {slack.min():.3e} on facet {int(slack.min(axis=0).argmin())}")
    return counts


if __name__ == "__main__":
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--samples", type=int, default=Config.samples)
    p.add_argument("--seed", type=int, default=Config.seed)
    p.add_argument("--facets", default=None)
    p.add_argument("--out", default=Config.out)
    run(Config(**vars(p.parse_args())))
