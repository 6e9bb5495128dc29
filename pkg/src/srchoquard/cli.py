"""Command-line entry point.

Exit codes: 0 success, 2 validation failure, 3 solver failure, 4 I/O failure.
Every command that writes ``--out X`` also writes ``X.cfg``, the effective
configuration including the seed, so a result can be replayed.
"""
from __future__ import annotations

import argparse
import logging
import math
import os
import sys
from pathlib import Path

import numpy as np

from . import spectral as sp
from .config import RunConfig, parse_config
from .constants import constants_table
from .diagnostics import brezis_lieb_d, energy_split, write_split_csv
from .errors import (ConfigError, ConstraintError, ContinuationError, DomainError, NumericError,
                     ProjectionError, StagnationError, UsageError)
from .nonlinearity import NonlinearitySpec, check_all
from .riesz import RieszPlan
from .solver import (continuation_mu, gaussian, ground_state, nonexistence_probe,
                     radial_defect, write_history_csv)

log = logging.getLogger("srchoquard")

EXIT_OK, EXIT_VALIDATION, EXIT_SOLVER, EXIT_IO = 0, 2, 3, 4


def _floats(text):
    try:
        return [float(s) for s in text.split(",") if s.strip()]
    except ValueError:
        raise UsageError(f"expected a comma-separated list of numbers, got {text!r}") from None


def _writable(*paths):
    for p in paths:
        if p is None:
            continue
        parent = Path(p).resolve().parent
        if not parent.is_dir() or not os.access(parent, os.W_OK):
            raise OSError(f"cannot write to {p}: directory {parent} missing or read-only")


def _sidecar(out, cfg: RunConfig, extra=None):
    text = cfg.emit()
    if extra:
        text += "".join(f"# {k} = {v}\n" for k, v in extra.items())
    Path(str(out) + ".cfg").write_text(text)


def _write_rows(path, header, rows):
    with open(path, "w") as fh:
        fh.write(header + "\n")
        for row in rows:
            fh.write(",".join(_num(v) for v in row) + "\n")


def _num(v):
    if isinstance(v, (int, np.integer)) and not isinstance(v, bool):
        return str(int(v))
    return f"{float(v):.17g}"


def _load(args, **over):
    cfg = parse_config(args.config)
    cli_over = {k: v for k, v in over.items() if v is not None}
    if cli_over:
        cfg = cfg.replace(**cli_over)
    return cfg


# ----------------------------------------------------------------- commands

def cmd_constants(args):
    _writable(args.out)
    rows = constants_table(args.dim_min, args.dim_max, verify=args.verify)
    header = "N,c_n_half,hardy_sharp,mu_star,quadrature_rel_error"
    if args.out:
        _write_rows(args.out, header, rows)
    else:
        print(header)
        for r in rows:
            print(",".join(_num(v) for v in r))
    return EXIT_OK


def cmd_check_nl(args):
    _writable(args.out)
    spec = NonlinearitySpec(args.kind, args.p, args.q, m_break=args.m_break)
    reports = check_all(spec, args.alpha, args.dim, args.u_min, args.u_max, args.samples)
    lines = ["hypothesis,passed,value,detail"]
    for r in reports:
        detail = str(r.detail).replace(",", ";")
        lines.append(f"{r.name},{int(r.passed)},{_num(r.value if r.value is not None else math.nan)},{detail}")
    text = "\n".join(lines) + "\n"
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    bad = [r.name for r in reports if not r.passed]
    if bad:
        print(f"{spec.label()}: failed {', '.join(bad)}", file=sys.stderr)
        return EXIT_VALIDATION
    return EXIT_OK


def cmd_solve(args):
    cfg = _load(args, seed=args.seed, restarts=args.restarts)
    _writable(args.out, args.log, args.csv)
    prob = cfg.problem()
    opts = cfg.solve_options(t_max=args.t_max if args.t_max else cfg.t_max)
    log.info("solve seed %d restarts %d", cfg.seed, cfg.restarts)
    res = ground_state(prob, cfg.init, opts)
    if not res.converged:
        print(f"not converged: grad_norm {res.grad_norm:.3e} after {res.iterations} iterations",
              file=sys.stderr)
        if args.log:
            write_history_csv(args.log, res.history)
        return EXIT_SOLVER
    sp.write_field(args.out, prob.grid, res.field)
    grid2, back = sp.read_field(args.out)
    if grid2 != prob.grid or not np.array_equal(back, res.field):
        raise OSError(f"{args.out} did not round-trip")
    if args.log:
        write_history_csv(args.log, res.history)
    if args.csv:
        sp.write_field_csv(args.csv, prob.grid, res.field)
    _sidecar(args.out, cfg, {"seeds": " ".join(map(str, res.seeds)),
                             "restart_energies": " ".join(_num(e) for e in res.restart_energies)})
    print(f"energy {res.energy:.17g} grad_norm {res.grad_norm:.3e} iterations {res.iterations} "
          f"radial_defect {radial_defect(prob.grid, res.field):.3e}")
    return EXIT_OK


def cmd_continuation(args):
    cfg = _load(args, seed=args.seed)
    _writable(args.out)
    prob = cfg.problem()
    table = continuation_mu(prob, _floats(args.mu_schedule), cfg.solve_options())
    rows = [(m, c, table.c0, gp, it) for m, c, gp, it in table.rows()]
    _write_rows(args.out, "mu,energy,c0,gap,iterations", rows)
    _sidecar(args.out, cfg, {"seed": cfg.seed})
    print(f"c0 {table.c0:.17g} final gap {table.gaps[-1]:.3e}")
    return EXIT_OK


def cmd_probe(args):
    cfg = _load(args, seed=args.seed)
    _writable(args.out)
    prob = cfg.problem()
    if args.base == "gaussian":
        base = gaussian(prob.grid, centre=np.full(prob.grid.dim, 0.5 * prob.grid.spacing))
    else:
        base = ground_state(prob.with_mu(0.0), cfg.init, cfg.solve_options()).field
    rows = nonexistence_probe(prob, base, _floats(args.shifts), check_hypotheses=not args.control)
    _write_rows(args.out, "shift,energy,t_star", [(r.shift, r.energy, r.t_star) for r in rows])
    _sidecar(args.out, cfg, {"seed": cfg.seed, "base": args.base})
    e = [r.energy for r in rows]
    trend = "decreasing" if all(b < a for a, b in zip(e, e[1:])) else "not decreasing"
    print(f"sup_t E over shifts: {trend}")
    return EXIT_OK


def cmd_diagnose(args):
    cfg = _load(args)
    _writable(args.out)
    prob = cfg.problem()
    bump = gaussian(prob.grid, width=args.width)
    seps = _floats(args.separations)
    rep = energy_split(prob, [bump, bump], seps)
    bl = brezis_lieb_d([bump, bump], seps, prob.plan, prob.nl)
    rep.cross_terms, rep.decay_ratios, rep.slope = bl.cross_terms, bl.decay_ratios, bl.slope
    write_split_csv(args.out, rep)
    _sidecar(args.out, cfg, {"width": args.width})
    print(f"cross-term slope {rep.slope:.4f} (reference {-(cfg.dim - cfg.alpha):.4f})")
    return EXIT_OK


def cmd_oracle(args):
    cfg = _load(args, points=args.points)
    _writable(args.out)
    grid = cfg.grid()
    rng = np.random.default_rng(cfg.seed)
    u = sp.band_limited_random(grid, rng, kmax=np.pi * grid.points / grid.box_length / 2,
                               envelope=grid.box_length / 6)
    if args.what == "riesz":
        fast = RieszPlan(grid, cfg.alpha, "fft_kernel").convolve(u)
        slow = RieszPlan(grid, cfg.alpha, "direct").convolve(u)
        err = float(np.max(np.abs(fast - slow)) / np.max(np.abs(slow)))
        header, rows = "check,rel_error", [("riesz_two_path", err)]
    else:
        back = sp.inverse_transform(grid, sp.forward_transform(grid, u))
        err = float(np.max(np.abs(back - u)) / np.max(np.abs(u)))
        pl = abs(sp.l2_inner(grid, u, u) - sp.spectral_quadratic(grid, u, 1.0)) / sp.l2_inner(grid, u, u)
        header, rows = "check,rel_error", [("round_trip", err), ("plancherel", pl)]
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(header + "\n")
            for name, v in rows:
                fh.write(f"{name},{_num(v)}\n")
        _sidecar(args.out, cfg, {"seed": cfg.seed})
    for name, v in rows:
        print(f"{name} {v:.3e}")
    return EXIT_OK


# ------------------------------------------------------------------ parser

def build_parser():
    ap = argparse.ArgumentParser(prog="srchoquard", description=__doc__.splitlines()[0])
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True)

    c = sub.add_parser("constants", help="C(N,1/2) and the sharp Hardy constant, with mu*(N)")
    c.add_argument("--dim-min", type=int, default=2)
    c.add_argument("--dim-max", type=int, default=10)
    c.add_argument("--verify", action="store_true", help="add the quadrature cross-check")
    c.add_argument("--out")
    c.set_defaults(func=cmd_constants)

    n = sub.add_parser("check-nl", help="sample the hypotheses on a built-in nonlinearity")
    n.add_argument("--kind", default="power")
    n.add_argument("--p", type=float, default=3.0)
    n.add_argument("--q", type=float, default=2.5)
    n.add_argument("--alpha", type=float, default=1.5)
    n.add_argument("--dim", type=int, default=2)
    n.add_argument("--m-break", type=float, default=2.0)
    n.add_argument("--u-min", type=float, default=1e-4)
    n.add_argument("--u-max", type=float, default=1e4)
    n.add_argument("--samples", type=int, default=4096)
    n.add_argument("--out")
    n.set_defaults(func=cmd_check_nl)

    s = sub.add_parser("solve", help="ground state by descent on the Nehari manifold")
    s.add_argument("--config", required=True)
    s.add_argument("--out", required=True, help="SRCQ binary field")
    s.add_argument("--log", help="iteration CSV")
    s.add_argument("--csv", help="field as CSV")
    s.add_argument("--seed", type=int)
    s.add_argument("--restarts", type=int)
    s.add_argument("--t-max", type=float)
    s.set_defaults(func=cmd_solve)

    k = sub.add_parser("continuation", help="warm-started solves along a decreasing mu schedule")
    k.add_argument("--config", required=True)
    k.add_argument("--mu-schedule", required=True)
    k.add_argument("--out", required=True)
    k.add_argument("--seed", type=int)
    k.set_defaults(func=cmd_continuation)

    p = sub.add_parser("probe-nonexistence", help="fibering maxima of translated profiles")
    p.add_argument("--config", required=True)
    p.add_argument("--shifts", default="0,2,4,8")
    p.add_argument("--out", required=True)
    p.add_argument("--base", choices=("ground-state", "gaussian"), default="ground-state")
    p.add_argument("--control", action="store_true", help="skip the mu < 0 and (a2) checks")
    p.add_argument("--seed", type=int)
    p.set_defaults(func=cmd_probe)

    d = sub.add_parser("diagnose", help="splitting diagnostics")
    d.add_argument("what", choices=("splitting",))
    d.add_argument("--config", required=True)
    d.add_argument("--separations", default="2,4,8")
    d.add_argument("--width", type=float, default=0.5)
    d.add_argument("--out", required=True)
    d.set_defaults(func=cmd_diagnose)

    o = sub.add_parser("oracle", help="two-path consistency checks")
    o.add_argument("what", choices=("riesz", "spectral"))
    o.add_argument("--config", required=True)
    o.add_argument("--points", type=int, help="override points (the direct path is O(M^2N))")
    o.add_argument("--out")
    o.set_defaults(func=cmd_oracle)
    return ap


def run(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (ConfigError, ConstraintError, DomainError, UsageError) as exc:
        print(f"validation error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except (StagnationError, ProjectionError, ContinuationError, NumericError) as exc:
        print(f"solver failure: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    except OSError as exc:
        print(f"I/O failure: {exc}", file=sys.stderr)
        return EXIT_IO


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
