"""Sweep random degree-one cochains over the torus.

For each cochain, compare the twisting identity with d^2 = 0 on the attempted
twisted complex, and tabulate the betti numbers of the valid ones.
"""
import argparse
import random
from collections import Counter
from dataclasses import dataclass

from twisted_chains.chains import ChainComplex, betti_list, verify_complex
from twisted_chains.exactq import QMatrix
from twisted_chains.simplicial import torus
from twisted_chains.twisting import (
    GradedEndAlgebra,
    TwistingCochain,
    _labels,
    twisted_differentials,
    twisted_tensor,
    verify_twisting,
)


@dataclass
class SweepConfig:
    count: int = 500
    seed: int = 0
    fiber_dims: tuple = (1, 1)
    entry_range: int = 2


def random_cochain(rng: random.Random, cfg: SweepConfig) -> TwistingCochain:
    alg = GradedEndAlgebra(list(cfg.fiber_dims))
    r = cfg.entry_range
    comps = {}
    for e in ("a", "b", "c"):
        blocks = [QMatrix(d, d, [[rng.randint(-r, r) for _ in range(d)] for _ in range(d)])
                  for d in cfg.fiber_dims]
        comps[e] = alg.from_degree_zero_blocks(blocks)
    return TwistingCochain(torus(), list(cfg.fiber_dims), comps)


def run(cfg: SweepConfig) -> dict:
    rng = random.Random(cfg.seed)
    agree, betti = 0, Counter()
    for _ in range(cfg.count):
        phi = random_cochain(rng, cfg)
        labels = _labels(phi.base, phi.algebra)
        diffs = twisted_differentials(phi, labels)
        lo, hi = min(labels), max(labels)
        cx = ChainComplex(lo, [len(labels.get(n, [])) for n in range(lo, hi + 1)],
                          {n: m for n, m in diffs.items() if lo < n <= hi})
        ok = bool(verify_twisting(phi))
        agree += ok == bool(verify_complex(cx))
        if ok:
            T = twisted_tensor(phi).complex
            betti[tuple(betti_list(T, 0, T.max_degree))] += 1
    return {"count": cfg.count, "agree": agree, "valid": sum(betti.values()), "betti": betti}


def main():
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--count", type=int, default=SweepConfig.count)
    p.add_argument("--seed", type=int, default=SweepConfig.seed)
    p.add_argument("--fiber-dims", type=int, nargs="+", default=list(SweepConfig.fiber_dims))
    p.add_argument("--entry-range", type=int, default=SweepConfig.entry_range)
    a = p.parse_args()
    res = run(SweepConfig(a.count, a.seed, tuple(a.fiber_dims), a.entry_range))
    print(f"{res['agree']}/{res['count']} agree; {res['valid']} valid twisting cochains")
    for b, k in sorted(res["betti"].items()):
        print(f"  betti {list(b)}: {k}")


if __name__ == "__main__":
    main()
