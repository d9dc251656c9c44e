"""Sweep the causal-route vs normal-ordering comparison over regimes and sizes.

For each regime/statistics pair, draws random branch-field polynomials and
records the largest coefficient difference between the two routes.

    python3 scripts/route_equivalence_sweep.py --samples 200 --points 2 3 4
"""
from __future__ import annotations

import argparse
import json
import time
from dataclasses import asdict, dataclass, field

import numpy as np

from causalwick.causal import causal_normal_form, to_field_values
from causalwick.fields import random_channel_spec, random_real_spec
from causalwick.spectral import default_grid
from causalwick.verify import random_polynomial
from causalwick.wick import normal_form_polynomial


@dataclass
class SweepConfig:
    samples: int = 50
    points: list = field(default_factory=lambda: [2, 4])
    degree: int = 4
    n: int = 1024
    seed: int = 0


CASES = (("real", "bose"), ("semirel", "bose"), ("semirel", "fermi"),
         ("nonrel", "bose"), ("nonrel", "fermi"))


def make_spec(rng, regime, stat):
    if regime == "real":
        return random_real_spec(rng)
    return random_channel_spec(rng, statistics=stat, nonrel=regime == "nonrel")


def run(cfg: SweepConfig):
    rng = np.random.default_rng(cfg.seed)
    rows = []
    for regime, stat in CASES:
        spec = make_spec(rng, regime, stat)
        grid = None if regime == "nonrel" else default_grid(spec.omegas, n=cfg.n)
        for npts in cfg.points:
            t0 = time.perf_counter()
            worst = 0.0
            for _ in range(cfg.samples):
                F = random_polynomial(rng, spec, grid, n_points=npts, degree=cfg.degree)
                causal = to_field_values(causal_normal_form(F, regime, spec, grid))
                worst = max(worst, normal_form_polynomial(F, spec).max_abs_diff(causal))
            rows.append({"regime": regime, "statistics": stat, "points": npts,
                         "max_error": worst, "seconds": round(time.perf_counter() - t0, 3)})
    return rows


def main():
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--samples", type=int, default=SweepConfig.samples)
    p.add_argument("--points", type=int, nargs="+", default=[2, 4])
    p.add_argument("--degree", type=int, default=SweepConfig.degree)
    p.add_argument("--n", type=int, default=SweepConfig.n)
    p.add_argument("--seed", type=int, default=0)
    a = p.parse_args()
    cfg = SweepConfig(a.samples, a.points, a.degree, a.n, a.seed)
    print(json.dumps({"config": asdict(cfg), "rows": run(cfg)}, indent=2))


if __name__ == "__main__":
    main()
