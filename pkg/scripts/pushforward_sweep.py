"""Compare the pushforward series with the definitional series on random semigroups."""

import argparse
import random
import time
from dataclasses import dataclass

from toric_poincare.semigroup import poincare_by_definition, pushforward_Q
from toric_poincare.verify import random_semigroup_spec


@dataclass
class SweepConfig:
    seed: int = 0
    specs: int = 100
    max_box: int = 12


def sweep(cfg: SweepConfig) -> int:
    rng = random.Random(cfg.seed)
    failures = 0
    t0 = time.perf_counter()
    for i in range(cfg.specs):
        spec = random_semigroup_spec(rng)
        box = tuple(rng.randint(cfg.max_box // 2, cfg.max_box) for _ in range(spec.rank))
        q = pushforward_Q(spec, box)
        diff = q.diff(poincare_by_definition(spec, box))
        failures += bool(diff)
        print(f"{i:4d}  d={spec.dimension} gens={len(spec.generators)} r={spec.rank} box={box} "
              f"terms={len(q.terms)} {'ok' if not diff else f'DIFF {list(diff.items())[:3]}'}")
    print(f"{cfg.specs - failures}/{cfg.specs} agree in {time.perf_counter() - t0:.2f} s")
    return failures


if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--seed", type=int, default=SweepConfig.seed)
    ap.add_argument("--specs", type=int, default=SweepConfig.specs)
    ap.add_argument("--max-box", type=int, default=SweepConfig.max_box)
    ns = ap.parse_args()
    raise SystemExit(1 if sweep(SweepConfig(ns.seed, ns.specs, ns.max_box)) else 0)
