"""Worst residual per identity over the 20-instance catalogue, for each family.

    python scripts/residual_sweep.py
"""
import argparse
import collections
import time

from kreinq.errors import EmptyZQ
from kreinq.krein_extension import SampleSpec, identity_suite, verify_main_theorem
from kreinq.models import generate, reference_recipes

FAMILIES = ("AlphaType", "VWType", "ProjectorTheta", "Perturbed")


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__.split("\n\n")[0])
    p.add_argument("--families", default=",".join(FAMILIES))
    p.add_argument("--pairs", type=int, default=25)
    p.add_argument("--samples", type=int, default=100)
    args = p.parse_args(argv)

    for kind in args.families.split(","):
        t = time.perf_counter()
        worst = collections.defaultdict(float)
        failures, empty = 0, 0
        for recipe in reference_recipes(kind):
            model, fam = generate(recipe)
            try:
                rep = identity_suite(model, fam, SampleSpec(n_pairs=args.pairs))
                rep = rep.merged(verify_main_theorem(model, fam, n_samples=args.samples))
            except EmptyZQ:
                empty += 1
                continue
            failures += not rep.passed
            for e in rep.entries:
                if e.tolerance > 0:
                    worst[e.identity_name] = max(worst[e.identity_name], e.max_residual)
        print(f"{kind}: {failures} failing, {empty} with empty Z_Q, {time.perf_counter() - t:.1f}s")
        for name, value in worst.items():
            print(f"  {name:32s} {value:.2e}")


if __name__ == "__main__":
    main()
