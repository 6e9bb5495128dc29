"""Fibering maxima of translates of the mu = 0 ground state for several mu.

For mu < 0 the value falls with the shift toward the periodic level; for
mu > 0 it rises.  Both converge to the same limit.
"""
import argparse
import csv
import sys

from srchoquard import solver as so
from srchoquard.config import parse_config


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--config", default="configs/reference_n2.cfg")
    ap.add_argument("--mus", default="-0.2,-0.1,-0.05,0.05,0.1")
    ap.add_argument("--shifts", default="0,1,2,4,6,8")
    ap.add_argument("--out", default="-")
    args = ap.parse_args(argv)
    cfg = parse_config(args.config)
    prob = cfg.problem().with_mu(0.0)
    base = so.ground_state(prob, cfg.init, cfg.solve_options()).field
    shifts = [float(s) for s in args.shifts.split(",")]
    out = sys.stdout if args.out == "-" else open(args.out, "w", newline="")
    w = csv.writer(out)
    w.writerow(["mu"] + [f"z={s:g}" for s in shifts])
    for mu in (float(m) for m in args.mus.split(",")):
        rows = so.nonexistence_probe(prob.with_mu(mu), base, shifts, check_hypotheses=mu < 0)
        w.writerow([mu] + [f"{r.energy:.10f}" for r in rows])
    return 0


if __name__ == "__main__":
    sys.exit(main())
