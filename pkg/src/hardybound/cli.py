"""Command-line front end.

    hardybound eigs segment:-1,1@h=1 --n 80 --mode dd
    hardybound bound segment:-1,1@h=1 --z 2+1i --eps 1e-12..1e-2
    hardybound powerlaw segment:-1,1@h=0.5 --z 1.5+0.5i,2+0.5i,3+0.5i --eps 1e-12..1e-3
    hardybound rates --h 0.5,1,2
    hardybound boundary --z 1+1i --eps 1e-6
    hardybound transplant --x 1,2 [--z 2+0.5i --h 0.5]

Exit codes: 0 success, 1 configuration error, 2 numerical failure, 3 I/O error.
"""

from __future__ import annotations

import argparse
import json
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from . import asymptotics, boundary, experiments, spectral
from .continuation import PrecisionFloorError, eps_grid
from .geometry import CurveSpec, halfstrip_exponent, parse_curve
from .io import csv_text, json_text, manifest, write_text

EXIT_OK, EXIT_CONFIG, EXIT_NUMERIC, EXIT_IO = 0, 1, 2, 3
COMMANDS = ("eigs", "bound", "powerlaw", "rates", "boundary", "transplant")
# smallest ε a mode can represent meaningfully
MODE_EPS_FLOOR = {"dd": 1e-16, "f64": 1e-8}


class ConfigError(ValueError):
    pass


@dataclass
class RunConfig:
    command: str
    curve: str | None = None
    z_list: list[complex] = field(default_factory=list)
    eps_grid: dict = field(default_factory=lambda: {"min": 1e-12, "max": 1e-2, "per_decade": 4})
    quad_order: int = 80
    mode: str = "dd"
    output: str = "."
    format: str = "csv"
    jobs: int = 1
    h_list: list[float] = field(default_factory=list)
    x_list: list[float] = field(default_factory=list)

    def validate(self) -> None:
        if self.command not in COMMANDS:
            raise ConfigError(f"unknown command {self.command!r}")
        if self.mode not in MODE_EPS_FLOOR:
            raise ConfigError("mode must be 'f64' or 'dd'")
        if self.format not in ("csv", "json"):
            raise ConfigError("format must be 'csv' or 'json'")
        if self.jobs < 1:
            raise ConfigError("jobs must be ≥ 1")
        g = self.eps_grid
        if not 0 < g["min"] <= g["max"]:
            raise ConfigError("eps range must satisfy 0 < min ≤ max")
        if int(g["per_decade"]) < 1:
            raise ConfigError("per_decade must be ≥ 1")
        if self.command in ("eigs", "bound", "powerlaw"):
            if self.curve is None:
                raise ConfigError(f"{self.command} needs a curve literal")
            c = self.curve_spec()
            if not c.is_interior:
                raise ConfigError("the curve must lie in the open upper half-plane")
            for z in self.z_list:
                if not z.imag > 0:
                    raise ConfigError(f"z = {z} is not in the upper half-plane")
                if c.contains(z, 1e-12):
                    raise ConfigError(f"z = {z} lies on the curve")
            if self.quad_order < 2:
                raise ConfigError("quadrature order must be ≥ 2")
        if self.command in ("bound", "powerlaw") and not self.z_list:
            raise ConfigError(f"{self.command} needs --z")
        if self.command == "boundary":
            if not self.z_list:
                raise ConfigError("boundary needs --z")
            if not g["max"] < 1:
                raise ConfigError("boundary formulas need eps < 1")
            for z in self.z_list:
                if not z.imag > 0:
                    raise ConfigError(f"z = {z} is not in the upper half-plane")

    def curve_spec(self) -> CurveSpec:
        try:
            return parse_curve(self.curve)
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc

    def check_floor(self) -> None:
        if self.command in ("bound", "powerlaw") and self.eps_grid["min"] < MODE_EPS_FLOOR[self.mode]:
            raise PrecisionFloorError(
                f"eps = {self.eps_grid['min']:g} is below the {self.mode} floor "
                f"{MODE_EPS_FLOOR[self.mode]:g}; switch to mode 'dd' or raise eps"
            )

    def eps_values(self) -> np.ndarray:
        g = self.eps_grid
        return eps_grid(g["min"], g["max"], int(g["per_decade"]))

    def as_dict(self) -> dict:
        d = asdict(self)
        d["z_list"] = [[z.real, z.imag] for z in self.z_list]
        return d


# --------------------------------------------------------------------------
# argument parsing
# --------------------------------------------------------------------------


def parse_complex(text: str) -> complex:
    """Parse ``2+1i``, ``1.5+0.5i``, ``-0.3-2j``, ``1i``, ``3``."""
    s = text.strip().replace(" ", "").replace("I", "i").replace("i", "j")
    try:
        return complex(s)
    except ValueError:
        pass
    if s.endswith("j"):
        # forms like "1+j"
        try:
            return complex(s[:-1] + "1j")
        except ValueError:
            pass
    raise ConfigError(f"cannot parse complex number {text!r}")


def parse_z_list(text: str) -> list[complex]:
    return [parse_complex(t) for t in text.split(",") if t.strip()]


def parse_float_list(text: str) -> list[float]:
    try:
        return [float(t) for t in text.split(",") if t.strip()]
    except ValueError as exc:
        raise ConfigError(f"cannot parse number list {text!r}") from exc


def parse_eps(text: str) -> tuple[float, float]:
    """``1e-12..1e-3`` or a single value."""
    try:
        if ".." in text:
            a, b = text.split("..", 1)
            lo, hi = float(a), float(b)
            return min(lo, hi), max(lo, hi)
        v = float(text)
        return v, v
    except ValueError as exc:
        raise ConfigError(f"cannot parse eps range {text!r}") from exc


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ConfigError(message)


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="hardybound", description="Error bounds for analytic continuation in H²(ℍ₊).")
    sub = p.add_subparsers(dest="command", parser_class=_Parser)

    def common(sp, curve: bool):
        if curve:
            sp.add_argument("curve", nargs="?", help="curve literal, e.g. segment:-1,1@h=1")
        sp.add_argument("--config", help="JSON file with run settings; flags override it")
        sp.add_argument("--z", help="comma-separated evaluation points, e.g. 2+1i,3+1i")
        sp.add_argument("--eps", help="eps range min..max or a single value")
        sp.add_argument("--per-decade", type=int, dest="per_decade")
        sp.add_argument("--n", type=int, dest="quad_order", help="quadrature order")
        sp.add_argument("--mode", choices=["f64", "dd"])
        sp.add_argument("--output", "-o", help="output directory")
        sp.add_argument("--format", choices=["csv", "json"])
        sp.add_argument("--jobs", type=int)
        sp.add_argument("--h", dest="h_list", help="comma-separated heights")
        sp.add_argument("--x", dest="x_list", help="comma-separated half-strip distances")

    for name in ("eigs", "bound", "powerlaw"):
        common(sub.add_parser(name), True)
    for name in ("rates", "boundary", "transplant"):
        common(sub.add_parser(name), False)
    return p


def config_from_args(argv) -> RunConfig:
    args = build_parser().parse_args(argv)
    if args.command is None:
        raise ConfigError("missing command; one of " + ", ".join(COMMANDS))
    base: dict = {}
    if args.config:
        text = Path(args.config).read_text(encoding="utf-8")
        try:
            base = json.loads(text)
        except ValueError as exc:
            raise ConfigError(f"invalid config file: {exc}") from exc
        if not isinstance(base, dict):
            raise ConfigError("config file must hold a JSON object")
    cfg = RunConfig(command=args.command)
    # file first
    known = set(RunConfig.__dataclass_fields__)
    for k, v in base.items():
        if k not in known or k == "command":
            raise ConfigError(f"unknown config key {k!r}")
        if k == "z_list":
            v = [parse_complex(x) if isinstance(x, str) else complex(*x) for x in v]
        if k == "eps_grid":
            v = {**cfg.eps_grid, **v}
        setattr(cfg, k, v)
    # flags override
    if getattr(args, "curve", None):
        cfg.curve = args.curve
    if args.z:
        cfg.z_list = parse_z_list(args.z)
    if args.eps:
        lo, hi = parse_eps(args.eps)
        cfg.eps_grid = {**cfg.eps_grid, "min": lo, "max": hi}
    if args.per_decade is not None:
        cfg.eps_grid = {**cfg.eps_grid, "per_decade": args.per_decade}
    for k in ("quad_order", "mode", "output", "format", "jobs"):
        v = getattr(args, k)
        if v is not None:
            setattr(cfg, k, v)
    if args.h_list:
        cfg.h_list = parse_float_list(args.h_list)
    if args.x_list:
        cfg.x_list = parse_float_list(args.x_list)
    cfg.validate()
    return cfg


# --------------------------------------------------------------------------
# commands
# --------------------------------------------------------------------------


def _map(fn, items, jobs: int):
    """Ordered map, optionally over a process pool."""
    items = list(items)
    if jobs <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ProcessPoolExecutor(max_workers=jobs) as ex:
        return list(ex.map(fn, items))


class _Writer:
    def __init__(self, cfg: RunConfig):
        self.dir = Path(cfg.output)
        self.dir.mkdir(parents=True, exist_ok=True)
        self.outputs: dict[str, str] = {}

    def csv(self, name: str, header, rows) -> None:
        self.outputs[name] = write_text(self.dir / name, csv_text(header, rows))

    def json(self, name: str, obj) -> None:
        self.outputs[name] = write_text(self.dir / name, json_text(obj))

    def table(self, cfg: RunConfig, stem: str, header, rows) -> None:
        if cfg.format == "csv":
            self.csv(stem + ".csv", header, rows)
        else:
            self.json(stem + ".json", [dict(zip(header, r)) if not isinstance(r, dict) else r for r in rows])


def cmd_eigs(cfg: RunConfig, w: _Writer) -> dict:
    curve = cfg.curve_spec()
    su = experiments.setup(curve, cfg.quad_order, cfg.mode)
    S = su.S
    header = ["n", "lambda", "ln_lambda"]
    if cfg.z_list:
        S = su.project(cfg.z_list[0])
        header += ["re_pi", "im_pi", "abs_pi_sq"]
    w.table(cfg, "eigs", header, spectral.spectrum_rows(S))
    rates = experiments.rates_block(curve, S)
    w.json("rates.json", rates)
    return {"rank_cutoff": S.rank_cutoff, "noise_floor": S.noise_floor, "sweeps": S.sweeps}


_SOLVE_HEADER = ["zr", "zi", "eps", "re_u", "im_u", "norm_L2_Gamma", "norm_H2", "M",
                 "branch_UB1", "branch_UB2", "eta_star_ratio", "truncation_bound"]


def _solve_row(rec) -> list:
    d = rec.as_dict()
    return [d["z"][0], d["z"][1], d["eps"], d["u_at_z"][0], d["u_at_z"][1], d["norm_L2_Gamma"],
            d["norm_H2"], d["M"], d["branch_UB1"], d["branch_UB2"], d["eta_star_ratio"],
            d["truncation_bound"]]


def cmd_bound(cfg: RunConfig, w: _Writer) -> dict:
    su = experiments.setup(cfg.curve_spec(), cfg.quad_order, cfg.mode)
    eps = cfg.eps_values()
    results = _map(_BoundJob(su, eps), cfg.z_list, cfg.jobs)
    recs = [r for rs in results for r in rs]
    if cfg.format == "csv":
        w.csv("bound.csv", _SOLVE_HEADER, [_solve_row(r) for r in recs])
    else:
        w.json("bound.json", [r.as_dict() for r in recs])
    return {"rank_cutoff": su.S.rank_cutoff,
            "max_truncation_bound": max(r.solution.truncation_bound for r in recs)}


@dataclass
class _BoundJob:
    su: experiments.SpectralSetup
    eps: np.ndarray

    def __call__(self, z):
        return experiments.sweep(self.su.project(z), self.eps)


@dataclass
class _PowerlawJob:
    su: experiments.SpectralSetup
    eps: np.ndarray

    def __call__(self, z):
        return experiments.powerlaw_study(self.su, z, self.eps)


def cmd_powerlaw(cfg: RunConfig, w: _Writer) -> dict:
    su = experiments.setup(cfg.curve_spec(), cfg.quad_order, cfg.mode)
    eps = cfg.eps_values()
    results = _map(_PowerlawJob(su, eps), cfg.z_list, cfg.jobs)
    pts = [[r.z.real, r.z.imag, e, M] for r in results for e, M in r.points]
    w.table(cfg, "powerlaw_points", ["zr", "zi", "eps", "M"], pts)
    fits = []
    for r in results:
        d = r.decay
        fits.append([r.z.real, r.fit.gamma_hat, r.theta, r.fit.r2, r.z.imag, r.fit.intercept,
                     d.alpha_hat if d else None, d.beta_hat if d else None, r.predicted])
    w.table(cfg, "powerlaw_fit",
            ["x", "gamma_hat", "theta", "r2", "y", "intercept", "alpha_hat", "beta_hat", "predicted"], fits)
    flags = {f"{r.z}": r.flags for r in results if r.flags}
    return {"rank_cutoff": su.S.rank_cutoff,
            "max_truncation_bound": max(x.solution.truncation_bound for r in results for x in r.records),
            "flags": flags}


def cmd_rates(cfg: RunConfig, w: _Writer) -> dict:
    hs = cfg.h_list or [1.0]
    rows = []
    for h in hs:
        ri = asymptotics.riemann_invariant(h)
        W = asymptotics.widom_rate(h)
        rows.append([h, asymptotics.moebius_contraction(CurveSpec.segment(-1, 1, h)), ri.m_param, ri.tau,
                     ri.ln_rho, W, 2 * W])
    w.table(cfg, "rates", ["h", "rho1", "m_param", "tau", "ln_rho_Gamma", "W", "two_W"], rows)
    return {}


def cmd_boundary(cfg: RunConfig, w: _Writer) -> dict:
    eps = cfg.eps_grid["min"]
    recs = [boundary.boundary_bound(z, eps) for z in cfg.z_list]
    out = [{"gamma": b.gamma, "rho": b.rho, "bound": b.bound, "B": b.B} for b in recs]
    w.json("boundary.json", out[0] if len(out) == 1 else out)
    if cfg.format == "csv":
        w.csv("boundary.csv", ["zr", "zi", "gamma", "rho"], [[b.z.real, b.z.imag, b.gamma, b.rho] for b in recs])
    extra = {}
    if cfg.h_list:
        study = boundary.h_limit_study(cfg.z_list[0], eps, cfg.h_list)
        w.csv("h_limit.csv", ["h", "M_h", "M_boundary", "gap"],
              [[r.h, r.bound_h, r.bound_boundary, r.gap] for r in study.rows])
        extra["h_limit_flags"] = {str(r.h): list(r.flags) for r in study.rows if r.flags}
    return extra


def cmd_transplant(cfg: RunConfig, w: _Writer) -> dict:
    rows = []
    for x in cfg.x_list or [1.0, 2.0]:
        rows.append(["halfstrip", x, None, float(halfstrip_exponent(x))])
    if cfg.z_list:
        h = cfg.h_list[0] if cfg.h_list else 0.5
        amap = asymptotics.AnnulusMap.for_h(h)
        for z in cfg.z_list:
            rows.append(["segment", z.real, z.imag, asymptotics.theta_exponent(z, h, amap)])
    w.table(cfg, "transplant", ["geometry", "x", "y", "exponent"], rows)
    return {}


_DISPATCH = {
    "eigs": cmd_eigs,
    "bound": cmd_bound,
    "powerlaw": cmd_powerlaw,
    "rates": cmd_rates,
    "boundary": cmd_boundary,
    "transplant": cmd_transplant,
}


def run(cfg: RunConfig) -> int:
    cfg.check_floor()
    w = _Writer(cfg)
    extra = _DISPATCH[cfg.command](cfg, w)
    rec = manifest(cfg.as_dict(), dict(w.outputs), {"mode": cfg.mode, **extra})
    write_text(w.dir / "manifest.json", json_text(rec))
    return EXIT_OK


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else argv
    try:
        cfg = config_from_args(argv)
        return run(cfg)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return EXIT_IO
    except (PrecisionFloorError, ArithmeticError, RuntimeError, np.linalg.LinAlgError, ValueError) as exc:
        print(f"numerical error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
