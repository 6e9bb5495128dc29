"""Energies of the symmetric critical points centred on a node and on a cell corner.

On a coarse grid the corner-centred profile is a saddle: asymmetric
perturbations of it descend to the node-centred state.
"""
import argparse
import sys

import numpy as np

from srchoquard import solver as so
from srchoquard.config import parse_config


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--config", default="configs/reference_n2.cfg")
    ap.add_argument("--seeds", type=int, default=3)
    args = ap.parse_args(argv)
    cfg = parse_config(args.config)
    prob = cfg.problem()
    g = prob.grid
    corner = so.ground_state(prob, so.gaussian(g))
    node = so.ground_state(prob, so.gaussian(g, centre=np.full(g.dim, 0.5 * g.spacing)))
    print(f"corner-centred  E = {corner.energy:.12f}  peak {corner.field.max():.4f}")
    print(f"node-centred    E = {node.energy:.12f}  peak {node.field.max():.4f}")
    for s in range(args.seeds):
        start = so.perturbed(prob, corner.field, np.random.default_rng(s), 0.3)
        res = so.ground_state(prob, start)
        print(f"perturbed corner, seed {s}: E = {res.energy:.12f}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
