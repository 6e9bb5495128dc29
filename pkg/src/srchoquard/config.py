"""Line-based ``key = value`` run configuration."""
from __future__ import annotations

import logging
from dataclasses import dataclass, field, fields

from .constants import mu_star
from .errors import ConfigError, ConstraintError, DomainError, UsageError
from .model import ModelParams, Problem, parse_potential
from .nonlinearity import KINDS, NonlinearitySpec
from .solver import SolveOptions
from .spectral import Grid

log = logging.getLogger(__name__)

REQUIRED = ("dim", "mass", "alpha", "p", "q")

# hypothesis name -> config keys it involves
_CHECK_KEYS = {
    "(N): N >= 2": ("dim",),
    "(N): (N-1)p-N < alpha": ("p", "alpha"),
    "(N): alpha < N": ("alpha", "dim"),
    "(N): 2 < q": ("q",),
    "(N): q < 2p": ("q", "p"),
    "(N): q < 2N/(N-1)": ("q", "dim"),
    "(N): p > 2": ("p",),
    "m > 0": ("mass",),
    "(K): K >= 0": ("k_weight",),
    "(V2): essinf V > m": ("potential_periodic", "potential_local", "mass"),
    "coulomb finite and positive": ("coulomb",),
    "(V1): V_p periodic on the grid": ("potential_periodic",),
    "(V1): V_l decays at the box boundary": ("potential_local",),
}


@dataclass
class RunConfig:
    dim: int = None
    mass: float = None
    alpha: float = None
    p: float = None
    q: float = None
    points: int = 64
    box_length: float = 16.0
    mu: float = 0.0
    nonlinearity: str = "power"
    potential_periodic: str = "const:2.0"
    potential_local: str = "zero"
    k_weight: str = "zero"
    coulomb: str = "pointwise"
    convolution: str = "fft_kernel"
    boundary_eps: float = 1e-3
    grad_tol: float = 1e-8
    max_iters: int = 2000
    restarts: int = 1
    seed: int = 0
    step_rule: str = "backtracking"
    precondition_shift: float = 0.0  # 0 selects essinf V - m
    t_max: float = 1e6
    init: str = "gaussian"
    source: str = field(default=None, compare=False, repr=False)
    lines: dict = field(default_factory=dict, compare=False, repr=False)
    warnings: list = field(default_factory=list, compare=False, repr=False)

    # ------------------------------------------------------------ builders
    def grid(self):
        return Grid(self.dim, self.points, self.box_length)

    def params(self):
        return ModelParams(self.dim, self.mass, self.mu, self.alpha, self.p, self.q)

    def nonlinearity_spec(self):
        return parse_nonlinearity(self.nonlinearity, self.p, self.q)

    def problem(self, strict=True):
        return Problem.build(
            self.grid(), self.params(), self.nonlinearity_spec(),
            v_p=self.potential_periodic, v_l=self.potential_local, k=self.k_weight,
            coulomb=self.coulomb, strict=strict, convolution=self.convolution,
        )

    def solve_options(self, **over):
        kw = dict(max_iters=self.max_iters, grad_tol=self.grad_tol, step_rule=self.step_rule,
                  precondition_shift=self.precondition_shift or None, seed=self.seed,
                  restarts=self.restarts, t_max=self.t_max)
        kw.update(over)
        return SolveOptions(**kw)

    def emit(self):
        out = []
        for f in _keys():
            v = getattr(self, f.name)
            out.append(f"{f.name} = {_fmt(v)}")
        return "\n".join(out) + "\n"

    def replace(self, **kw):
        vals = {f.name: getattr(self, f.name) for f in _keys()}
        vals.update(kw)
        return RunConfig(**vals)


def _keys():
    return [f for f in fields(RunConfig) if f.compare]


def _fmt(v):
    if isinstance(v, float):
        return repr(v)  # shortest repr round-trips exactly
    return str(v)


def parse_nonlinearity(text, p, q):
    name, *args = [s.strip() for s in str(text).split(":")]
    if name not in KINDS:
        raise UsageError(f"unknown nonlinearity {name!r}; known: {', '.join(KINDS)}")
    if args and name != "piecewise_sublinear":
        raise UsageError(f"nonlinearity {name!r} takes no parameters")
    if args:
        return NonlinearitySpec(name, p, q, m_break=float(args[0]))
    return NonlinearitySpec(name, p, q)


def _convert(name, raw, typ):
    if typ is int:
        v = float(raw)
        if v != int(v):
            raise ValueError(f"expected an integer, got {raw!r}")
        return int(v)
    if typ is float:
        return float(raw)
    return raw


def parse_text(text, source="<string>", validate=True) -> RunConfig:
    types = {f.name: (int if f.type in ("int", int) else float if f.type in ("float", float) else str)
             for f in _keys()}
    issues, values, lines = [], {}, {}
    for n, line in enumerate(text.splitlines(), start=1):
        body = line.split("#", 1)[0].strip()
        if not body:
            continue
        if "=" not in body:
            issues.append(f"line {n}: expected 'key = value', got {body!r}")
            continue
        key, raw = (s.strip() for s in body.split("=", 1))
        if key not in types:
            issues.append(f"line {n}: unknown key {key!r}")
            continue
        if key in values:
            issues.append(f"line {n}: duplicate key {key!r} (first on line {lines[key]})")
            continue
        try:
            values[key] = _convert(key, raw, types[key])
        except ValueError:
            issues.append(f"line {n}: {key}: cannot read {raw!r} as {types[key].__name__}")
            continue
        lines[key] = n
    for key in REQUIRED:
        if key not in values and not any(f"{key}:" in i for i in issues):
            issues.append(f"missing required key {key!r}")
    if any(i.startswith("missing") for i in issues):
        raise ConfigError(issues)
    cfg = RunConfig(**values)
    cfg.source, cfg.lines = source, lines
    if validate:
        try:
            validate_config(cfg)
        except ConfigError as exc:
            issues.extend(exc.issues)
    if issues:
        raise ConfigError(issues)
    return cfg


def parse_config(path, validate=True) -> RunConfig:
    with open(path) as fh:
        text = fh.read()
    return parse_text(text, str(path), validate)


def _where(cfg, keys):
    locs = [f"line {cfg.lines[k]}" for k in keys if k in cfg.lines]
    return ", ".join(locs) if locs else "default"


def validate_config(cfg: RunConfig):
    """Every violated hypothesis at once, each tagged with its config lines."""
    issues = []
    for key in ("potential_periodic", "potential_local", "k_weight"):
        try:
            parse_potential(getattr(cfg, key))
        except UsageError as exc:
            issues.append(f"{_where(cfg, [key])}: {key}: {exc}")
    try:
        cfg.nonlinearity_spec()
    except (UsageError, DomainError) as exc:
        issues.append(f"{_where(cfg, ['nonlinearity'])}: nonlinearity: {exc}")
    try:
        cfg.grid()
    except UsageError as exc:
        issues.append(f"{_where(cfg, ['points', 'box_length'])}: {exc}")
    for key in ("coulomb", "convolution", "step_rule", "init"):
        allowed = {"coulomb": ("pointwise", "cell"), "convolution": ("fft_kernel", "direct"),
                   "step_rule": ("fixed", "backtracking"), "init": ("gaussian", "two-bump")}[key]
        if getattr(cfg, key) not in allowed:
            issues.append(f"{_where(cfg, [key])}: {key}: {getattr(cfg, key)!r} not in {allowed}")
    if not cfg.grad_tol > 0:
        issues.append(f"{_where(cfg, ['grad_tol'])}: grad_tol must be positive")
    if cfg.restarts < 1:
        issues.append(f"{_where(cfg, ['restarts'])}: restarts must be >= 1")
    if issues:
        raise ConfigError(issues)
    try:
        prob = cfg.problem(strict=False)
    except (ConstraintError, DomainError, UsageError) as exc:
        raise ConfigError([f"{_where(cfg, ['k_weight', 'alpha'])}: {exc}"]) from exc
    report = prob.validate(boundary_eps=cfg.boundary_eps)
    for c in report.failures:
        keys = _CHECK_KEYS.get(c.name, ())
        issues.append(f"{_where(cfg, keys)}: {'/'.join(keys)}: {c.name} violated ({c.message})")
    if issues:
        raise ConfigError(issues)
    if report.mu_below_mu_star is False:
        ms = mu_star(cfg.dim)
        msg = (f"{_where(cfg, ['mu'])}: mu = {cfg.mu:g} exceeds mu*({cfg.dim}) = {ms:.5f}; "
               "coercivity of Q_mu is not guaranteed")
        cfg.warnings.append(msg)
        log.warning(msg)
    return report
