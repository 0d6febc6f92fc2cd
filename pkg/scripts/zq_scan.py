"""Scan Z_Q on a grid and compare it with rho(A0) cap rho(A_Q) point by point.

    python scripts/zq_scan.py --family VWType --grid=-5,5,-3,3,81,49
"""
import argparse
import collections

from kreinq.config import parse_grid
from kreinq.krein_extension import in_rho_aq, reconstruct_operator
from kreinq.models import FamilyRecipe, ModelRecipe, generate
from kreinq.operator_model import in_rho_a0
from kreinq.weyl_q import ZQLabel, rectangular_grid, scan_zq


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__.split("\n\n")[0])
    p.add_argument("--family", default="AlphaType")
    p.add_argument("--seed", type=int, default=7)
    p.add_argument("--n-h", type=int, default=6)
    p.add_argument("--n-k", type=int, default=2)
    p.add_argument("--grid", default="-5,5,-3,3,81,49")
    p.add_argument("--out", help="write the scan CSV here")
    args = p.parse_args(argv)

    model, fam = generate(ModelRecipe(seed=args.seed, n_h=args.n_h, n_k=args.n_k,
                                      family=FamilyRecipe(kind=args.family)))
    grid = rectangular_grid(*parse_grid(args.grid))
    result = scan_zq(model, fam, grid)
    rec = reconstruct_operator(model, fam)
    rel = model.tol.spec

    mismatches = 0
    for z, label in zip(grid, result.labels):
        expected = in_rho_a0(model, z) and in_rho_aq(rec, z, rel)
        mismatches += expected != (label == ZQLabel.IN_ZQ)
    counts = collections.Counter(str(label) for label in result.labels)
    print(f"{args.family} seed={args.seed} n_h={args.n_h} n_k={args.n_k}: {len(grid)} points, "
          + ", ".join(f"{k}={v}" for k, v in sorted(counts.items())))
    print(f"points where Z_Q and rho(A0) cap rho(A_Q) disagree: {mismatches}")
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(result.to_csv())


if __name__ == "__main__":
    main()
