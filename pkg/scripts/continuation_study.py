"""mu -> 0+ continuation: c_n against c_0 and the gap per unit mu.

The gap column divided by mu stays nearly constant, i.e. the approach of c_n
to c_0 is first order in mu on a fixed grid.
"""
import argparse
import csv
import sys

from srchoquard import constants as cst
from srchoquard import solver as so
from srchoquard.config import parse_config


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--config", default="configs/reference_n2.cfg")
    ap.add_argument("--kmax", type=int, default=8)
    ap.add_argument("--out", default="-")
    args = ap.parse_args(argv)
    cfg = parse_config(args.config)
    prob = cfg.problem()
    ms = cst.mu_star(cfg.dim)
    table = so.continuation_mu(prob, [ms / 2 ** k for k in range(1, args.kmax + 1)], cfg.solve_options())
    out = sys.stdout if args.out == "-" else open(args.out, "w", newline="")
    w = csv.writer(out)
    w.writerow(["mu", "energy", "c0", "gap", "gap_over_mu", "iterations"])
    for m, c, gap, it in table.rows():
        w.writerow([f"{m:.10g}", f"{c:.15f}", f"{table.c0:.15f}", f"{gap:.6e}", f"{gap / m:.6f}", it])
    return 0


if __name__ == "__main__":
    sys.exit(main())
