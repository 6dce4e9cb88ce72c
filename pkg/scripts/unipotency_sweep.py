"""Decide unipotency for random conjugated matrices and report filtration lengths."""
import argparse
import random
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction

from twisted_chains.exactq import QMatrix
from twisted_chains.fibration import is_unipotent_matrices


@dataclass
class SweepConfig:
    count: int = 200
    seed: int = 0
    max_dim: int = 4
    planted_fraction: float = 0.5


def invertible(rng: random.Random, n: int) -> QMatrix:
    while True:
        m = QMatrix(n, n, [[rng.randint(-2, 2) for _ in range(n)] for _ in range(n)])
        if m.rank() == n:
            return m


def sample(rng: random.Random, n: int, planted: bool) -> QMatrix:
    diag = [Fraction(1)] * n
    if planted:
        diag[rng.randrange(n)] = rng.choice([Fraction(-1), Fraction(2), Fraction(1, 3)])
    T = QMatrix(n, n, [[diag[i] if i == j else (rng.randint(-2, 2) if j > i else 0)
                        for j in range(n)] for i in range(n)])
    P = invertible(rng, n)
    return P @ T @ P.inverse()


def main():
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--count", type=int, default=SweepConfig.count)
    p.add_argument("--seed", type=int, default=SweepConfig.seed)
    p.add_argument("--max-dim", type=int, default=SweepConfig.max_dim)
    a = p.parse_args()
    cfg = SweepConfig(a.count, a.seed, a.max_dim)
    rng = random.Random(cfg.seed)
    wrong, lengths, witness = 0, Counter(), Counter()
    for _ in range(cfg.count):
        n = rng.randint(1, cfg.max_dim)
        planted = rng.random() < cfg.planted_fraction
        res = is_unipotent_matrices([sample(rng, n, planted)], n)
        wrong += bool(res) == planted
        if res:
            lengths[res.filtration.lengths()] += 1
        else:
            witness[len(res.witness)] += 1
    print(f"{cfg.count - wrong}/{cfg.count} decided as constructed")
    print("filtration lengths:", dict(sorted(lengths.items())))
    print("witness dimensions:", dict(sorted(witness.items())))


if __name__ == "__main__":
    main()
