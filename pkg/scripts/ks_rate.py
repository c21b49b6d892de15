"""How fast does the m = 2 block family approach F(ν) in Kolmogorov distance?

For m = 2 each block reduces to G^2 - 1 - 4G/sqrt(2k) with
G = (chi2_k - k)/sqrt(2k), and blocks are independent.  The reduction is
checked pathwise against the chaos evaluator for small k, then used to
estimate the KS distance for k far beyond what the tensor code can hold.
"""
import argparse

import numpy as np

from gammachaos import target
from gammachaos.chaos import ChaosElement, evaluate
from gammachaos.families import prop41_family
from gammachaos.montecarlo import gaussian_block, ks_statistic, ks_threshold


def reduced(z, nu, k):
    g = ((z * z - 1).reshape(len(z), nu, k).sum(axis=2)) / np.sqrt(2 * k)
    return (g * g - 1 - 4 * g / np.sqrt(2 * k)).sum(axis=1)


def reduced_draws(rng, nu, k, size):
    g = (rng.chisquare(k, size=(size, nu)) - k) / np.sqrt(2 * k)
    return (g * g - 1 - 4 * g / np.sqrt(2 * k)).sum(axis=1)


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--k", default="16,64,256,1024,4096,16384")
    ap.add_argument("--samples", type=int, default=2_000_000)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    for nu in (1, 2):
        for k in (2, 8, 32):
            z = gaussian_block(args.seed, 0, 2000, nu * k)
            err = np.abs(evaluate(ChaosElement(prop41_family(2, nu, k)), z) - reduced(z, nu, k)).max()
            print(f"# reduction check nu={nu} k={k}: max abs err {err:.1e}")

    rng = np.random.default_rng(args.seed)
    print(f"# KS at 1e5 samples must be < {ks_threshold(100_000, 0.05):.5f} (alpha = 0.05)")
    print("nu,k,ks_distance")
    for nu in (1, 2):
        for k in map(int, args.k.split(",")):
            x = reduced_draws(rng, nu, k, args.samples)
            print(f"{nu},{k},{ks_statistic(x, lambda t: target.cdf(nu, t)):.5f}")


if __name__ == "__main__":
    main()
