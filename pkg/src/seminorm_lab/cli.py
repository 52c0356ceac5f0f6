"""``seminorm-lab gen|seminorm|verify|report``."""
from __future__ import annotations

import argparse
import itertools
import json
import math
import sys
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from . import corpus as builtins
from .core import InterpolationParams, interpolation_seminorm, pair_from_table, write_table
from .engine_checks import engine_suite
from .grid.field import GridFunction, GridSpec
from .grid.io import load, write_raw
from .grid.ops import modulus_of_continuity
from .grid.polar import RADIAL_DEPTH, RADIAL_NODES, GridEstimate
from .littlewood_paley import (almost_orthogonality, band_masses, besov_lipschitz_seminorm,
                               besov_seminorm, build_partition, lp_square_seminorm,
                               riesz_seminorm)
from .reports import Check, EquivalenceReport, csv_text, fmt, read_csv, report_rows, svg_loglog
from .screened import (ScreenedParams, equivalence_suite, frequency_split_value,
                       generalized_frequency_seminorm, hl_split_value, k_upper_seminorm,
                       screened_seminorm, strichartz_seminorm)

DEFAULT_SWEEP = {"s": [0.25, 0.5, 0.75], "p": [2.0], "q": [1.0, 2.0, math.inf], "sigma": [1.0]}
KINDS = ("difference", "modulus", "kupper", "besov", "besov-lipschitz", "riesz",
         "strichartz", "frequency", "hl-split", "frequency-split", "k-method")
GRID_KINDS = KINDS[:-1]
SEMINORM_COLUMNS = ("function", "grid", "kind", "s", "p", "q", "sigma",
                    "value", "error", "truncation", "dropped")


class ConfigError(ValueError):
    pass


@dataclass
class RunConfig:
    """Everything a command needs; flags override the JSON document."""

    command: str
    corpus: list = field(default_factory=lambda: ["builtin"])
    grids: list = field(default_factory=lambda: [GridSpec(1, 512, 16.0)])
    sweep: dict = field(default_factory=lambda: {k: list(v) for k, v in DEFAULT_SWEEP.items()})
    kinds: list = field(default_factory=lambda: ["difference", "modulus"])
    depth: int = RADIAL_DEPTH
    out: Path = Path("out")
    seed: int = builtins.DEFAULT_SEED
    slack: float = 0.02
    constant_scale: float = 1.0
    engine_scale: float = 0.2
    items: str = "abcdef"
    refine: bool = True
    plot: bool = False
    pair: str | None = None

    def validate(self):
        for s in self.sweep["s"]:
            if not 0 < s < 1:
                raise ConfigError(f"s = {s} is outside (0, 1)")
        for name in ("p", "q"):
            for v in self.sweep[name]:
                if not v >= 1:
                    raise ConfigError(f"{name} = {v} is below 1")
        for grid in self.grids:
            for sigma in self.sweep["sigma"]:
                if not 0 < sigma <= grid.L / 4:
                    raise ConfigError(f"sigma = {sigma} is outside (0, L/4] for {grid}")
        if self.depth < 1:
            raise ConfigError("depth must be positive")
        unknown = set(self.kinds) - set(KINDS)
        if unknown:
            raise ConfigError(f"unknown seminorm kind(s): {', '.join(sorted(unknown))}")
        return self

    def params(self):
        """Sweep points in a fixed order."""
        sw = self.sweep
        for s, p, q, sigma in itertools.product(sw["s"], sw["p"], sw["q"], sw["sigma"]):
            yield ScreenedParams(s, p, q, sigma)

    @property
    def nodes(self) -> int:
        # keep the node density of the default rule when the depth changes
        return max(8, round(RADIAL_NODES * self.depth / RADIAL_DEPTH))


def _number(text: str) -> float:
    return math.inf if text.strip().lower() in ("inf", "infinity") else float(text)


def parse_sweep(text: str) -> dict:
    """``"s=0.25,0.5;q=1,inf"``: unnamed parameters keep their defaults."""
    out = {}
    for part in filter(None, (p.strip() for p in text.split(";"))):
        name, _, values = part.partition("=")
        name = name.strip()
        if name not in DEFAULT_SWEEP:
            raise ConfigError(f"unknown sweep parameter {name!r}")
        out[name] = [_number(v) for v in values.split(",") if v.strip()]
        if not out[name]:
            raise ConfigError(f"empty sweep for {name}")
    return out


def _sweep_values(raw: dict) -> dict:
    out = {}
    for name, values in raw.items():
        if name not in DEFAULT_SWEEP:
            raise ConfigError(f"unknown sweep parameter {name!r}")
        values = values if isinstance(values, list) else [values]
        out[name] = [_number(str(v)) for v in values]
    return out


def build_config(args: argparse.Namespace) -> RunConfig:
    cfg = RunConfig(args.command)
    doc = {}
    if getattr(args, "config", None):
        try:
            doc = json.loads(Path(args.config).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {args.config}: {exc}") from exc
    if "corpus" in doc:
        cfg.corpus = list(doc["corpus"]) if isinstance(doc["corpus"], list) else [doc["corpus"]]
    if "grid" in doc:
        grids = doc["grid"] if isinstance(doc["grid"], list) else [doc["grid"]]
        cfg.grids = [GridSpec.parse(g) for g in grids]
    if "sweep" in doc:
        cfg.sweep.update(_sweep_values(doc["sweep"]))
    for key in ("kinds", "depth", "seed", "slack", "constant_scale", "engine_scale",
                "items", "refine", "plot", "pair"):
        if key in doc:
            setattr(cfg, key, doc[key])
    if "out" in doc:
        cfg.out = Path(doc["out"])
    # flags win
    if getattr(args, "corpus", None) is not None:
        cfg.corpus = [c for c in args.corpus.split(",") if c]
    if getattr(args, "grid", None):
        cfg.grids = [GridSpec.parse(g) for g in args.grid.split(";")]
    if getattr(args, "sweep", None):
        cfg.sweep.update(parse_sweep(args.sweep))
    if getattr(args, "kinds", None):
        cfg.kinds = [k for k in args.kinds.split(",") if k]
    for key in ("depth", "seed", "slack", "pair"):
        if getattr(args, key, None) is not None:
            setattr(cfg, key, getattr(args, key))
    if getattr(args, "out", None):
        cfg.out = Path(args.out)
    if getattr(args, "plot", False):
        cfg.plot = True
    cfg.kinds = list(cfg.kinds)
    cfg.depth, cfg.seed = int(cfg.depth), int(cfg.seed)
    cfg.slack, cfg.constant_scale = float(cfg.slack), float(cfg.constant_scale)
    return cfg.validate()


@dataclass(frozen=True)
class Entry:
    """One corpus member on one grid; builtins can be resampled on a refined grid."""

    f: GridFunction
    builtin: bool

    @property
    def name(self) -> str:
        return self.f.name

    def refined(self, seed: int) -> GridFunction | None:
        if not self.builtin:
            return None
        return builtins.builtin(self.name, self.f.spec.refined(), seed)


def resolve_corpus(cfg: RunConfig, grid: GridSpec) -> list[Entry]:
    """Builtin names (``builtin`` for all of them) and file paths, in order."""
    out = []
    for token in cfg.corpus:
        if token in ("builtin", "all"):
            out += [Entry(f, True) for f in builtins.corpus(grid, seed=cfg.seed)]
        elif token == "none":
            continue
        elif Path(token).exists():
            f = load(token)
            if f.spec == grid:
                out.append(Entry(f, False))
        else:
            try:
                out.append(Entry(builtins.builtin(token, grid, cfg.seed), True))
            except KeyError:
                # a builtin of another dimension is simply absent from this grid
                if not any(token in builtins.names(g.n) for g in cfg.grids):
                    raise ConfigError(f"{token!r} is neither a builtin nor a file") from None
    return out


def _grid_label(grid: GridSpec) -> str:
    return f"n{grid.n}"


# --------------------------------------------------------------------------- gen

def cmd_gen(cfg: RunConfig) -> int:
    cfg.out.mkdir(parents=True, exist_ok=True)
    for grid in cfg.grids:
        tag = _grid_label(grid)
        for e in resolve_corpus(cfg, grid):
            write_raw(e.f, cfg.out / f"{tag}-{e.name}.snlb")
        part = build_partition(grid)
        table = part.profile_table()
        write_table({"xi": table[:, 0], "psi": table[:, 1]}, cfg.out / f"{tag}-partition.csv")
    print(f"wrote corpus to {cfg.out}")
    return 0


# ---------------------------------------------------------------------- seminorm

def _evaluate(kind: str, f: GridFunction, prm: ScreenedParams, part, cfg: RunConfig) -> GridEstimate:
    opts = {"nodes": cfg.nodes, "depth": cfg.depth}
    if kind in ("difference", "modulus"):
        return screened_seminorm(f, prm, kind, **opts)
    if kind == "kupper":
        return k_upper_seminorm(f, prm, **opts)
    if kind == "besov":
        return besov_seminorm(f, prm.s, prm.p, prm.q, **opts)
    if kind == "besov-lipschitz":
        return besov_lipschitz_seminorm(f, prm.s, prm.p, prm.q, part)
    if kind == "riesz":
        return riesz_seminorm(f, prm.s, prm.p, part)
    if kind == "strichartz":
        return GridEstimate(strichartz_seminorm(f, prm.s))
    if kind == "frequency":
        return generalized_frequency_seminorm(f, prm.s, prm.s, prm.p, prm.q, part)
    if kind == "hl-split":
        return hl_split_value(f, prm.s, prm.p, prm.q)
    if kind == "frequency-split":
        return GridEstimate(frequency_split_value(f, prm.s, prm.p, prm.q, part))
    raise ConfigError(f"unknown seminorm kind {kind!r}")


def _row(name, grid, kind, prm, est: GridEstimate) -> list[str]:
    return [name, str(grid), kind, fmt(prm.s), fmt(prm.p), fmt(prm.q), fmt(prm.sigma),
            fmt(est.value), fmt(est.error), fmt(est.truncation), fmt(est.dropped)]


def cmd_seminorm(cfg: RunConfig) -> int:
    import csv

    rows = []
    grid_kinds = [k for k in cfg.kinds if k != "k-method"]
    for grid in cfg.grids:
        part = build_partition(grid)
        for e in resolve_corpus(cfg, grid):
            f = e.f.centered()
            for prm in cfg.params():
                for kind in grid_kinds:
                    rows.append(_row(e.name, grid, kind, prm, _evaluate(kind, f, prm, part, cfg)))
    if "k-method" in cfg.kinds:
        if not cfg.pair:
            raise ConfigError("kind 'k-method' needs --pair TABLE.csv")
        pair, x = pair_from_table(cfg.pair)
        for prm in cfg.params():
            est = interpolation_seminorm(pair, InterpolationParams(prm.s, prm.q, prm.sigma), x)
            rows.append([Path(cfg.pair).stem, "-", "k-method", fmt(prm.s), fmt(prm.p),
                         fmt(prm.q), fmt(prm.sigma), fmt(est.value), fmt(est.error),
                         fmt(est.tail), fmt(0.0)])
    cfg.out.mkdir(parents=True, exist_ok=True)
    path = cfg.out / "seminorms.csv"
    with path.open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(SEMINORM_COLUMNS)
        w.writerows(rows)
    print(f"{len(rows)} rows -> {path}")
    return 0


# ------------------------------------------------------------------------ verify

def partition_reports(entries, grid: GridSpec, part) -> list:
    tag = f"lp:{_grid_label(grid)}"
    out = [Check(f"{tag}:residual", part.residual(), 1.0, 1e-12)]
    for e in entries:
        f = e.f.centered()
        out.append(Check(f"{tag}:{e.name}:orthogonality", almost_orthogonality(f, part), 1.0, 1e-12))
        out.append(EquivalenceReport(f"{tag}:{e.name}:square-p2",
                                     lp_square_seminorm(f, 2.0, part).value,
                                     float(np.sqrt(np.sum(f.values ** 2) * grid.cell)),
                                     (1 / math.sqrt(3), math.sqrt(3))))
        for j, m in zip(part.bands, band_masses(f, part)):
            # captured mass never exceeds the nonconstant mass; listed for the band report
            out.append(Check(f"{tag}:{e.name}:band={int(j):+d}", float(m), 1.0, 1.0 + 1e-9))
    return out


def verify_checks(cfg: RunConfig) -> list[Check]:
    reports = []
    for grid in cfg.grids:
        entries = resolve_corpus(cfg, grid)
        if not entries:
            continue
        part = build_partition(grid)
        fine_part = build_partition(grid.refined()) if cfg.refine else None
        reports += partition_reports(entries, grid, part)
        for e in entries:
            fine = e.refined(cfg.seed) if cfg.refine else None
            for prm in cfg.params():
                reports += equivalence_suite(e.f, prm, part, fine, fine_part, cfg.slack,
                                             cfg.items, f"{_grid_label(grid)}:{e.name}")
    if reports and cfg.engine_scale > 0:
        reports += engine_suite(cfg.seed, cfg.engine_scale)
    rows = report_rows(reports)
    if cfg.constant_scale != 1.0:
        rows = [replace(c, constant=c.constant * cfg.constant_scale) for c in rows]
    return rows


def _plot(cfg: RunConfig, entries, prm: ScreenedParams, path: Path):
    ts = np.geomspace(prm.sigma * 2.0 ** -12, prm.sigma, 64)
    series = {}
    for e in entries:
        w = modulus_of_continuity(e.f, ts, prm.p)
        series[e.name] = (ts, ts ** -prm.s * w)
    return svg_loglog(series, path, f"t^-s omega_p(t), s={prm.s:g}, p={prm.p:g}", "t",
                      "t^-s omega_p")


def cmd_verify(cfg: RunConfig) -> int:
    rows = verify_checks(cfg)
    cfg.out.mkdir(parents=True, exist_ok=True)
    path = cfg.out / "verify.csv"
    path.write_text(csv_text(rows))
    failed = [c for c in rows if not c.passed]
    if cfg.plot:
        prm = next(cfg.params())
        for grid in cfg.grids:
            entries = resolve_corpus(cfg, grid)
            if entries:
                _plot(cfg, entries, prm, cfg.out / f"modulus-{_grid_label(grid)}.svg")
    for c in failed:
        print(f"FAIL {c.case_id}: {fmt(c.lhs)} > {fmt(c.constant)} * {fmt(c.rhs)}",
              file=sys.stderr)
    print(f"{len(rows) - len(failed)}/{len(rows)} checks passed -> {path}")
    return 1 if failed else 0


# ------------------------------------------------------------------------ report

def summarize(path) -> str:
    """Counts, worst margins and failures of a verification table."""
    checks = read_csv(path)
    failed = [c for c in checks if not c.passed]
    lines = [f"{path}: {len(checks)} checks, {len(failed)} failed"]
    families = {}
    for c in checks:
        fam = c.case_id.split(":")[0] if not c.case_id.startswith(("n1:", "n2:", "n3:")) \
            else c.case_id.split(":")[2]
        margin = c.lhs / (c.constant * c.rhs) if c.constant * c.rhs > 0 else \
            (0.0 if c.lhs == 0 else math.inf)
        n, worst = families.get(fam, (0, 0.0))
        families[fam] = (n + 1, max(worst, margin))
    for fam in sorted(families):
        n, worst = families[fam]
        lines.append(f"  {fam:<28} {n:>6} rows  worst lhs/(constant*rhs) = {worst:.6g}")
    lines += [f"  FAIL {c.case_id}" for c in failed]
    return "\n".join(lines)


def cmd_report(cfg: RunConfig, table: str | None) -> int:
    if table:
        print(summarize(table))
    if cfg.plot:
        cfg.out.mkdir(parents=True, exist_ok=True)
        prm = next(cfg.params())
        for grid in cfg.grids:
            entries = resolve_corpus(cfg, grid)
            if entries:
                path = _plot(cfg, entries, prm, cfg.out / f"modulus-{_grid_label(grid)}.svg")
                print(f"plot -> {path}")
    return 0


# -------------------------------------------------------------------------- main

def make_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="seminorm-lab",
                                 description="Screened Besov seminorms on periodic grids.")
    sub = ap.add_subparsers(dest="command", required=True)
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON run configuration")
    common.add_argument("--out", help="output directory")
    common.add_argument("--seed", type=int)
    common.add_argument("--grid", help="grid spec such as n=1,N=512,L=16; ';' separates several")
    common.add_argument("--corpus", help="comma-separated builtin names, 'builtin', 'none' or files")
    common.add_argument("--sweep", help="for example 's=0.25,0.5;p=2;q=1,inf;sigma=1'")
    common.add_argument("--depth", type=int, help="radial quadrature depth in octaves")
    common.add_argument("--plot", action="store_true", help="also write SVG plots")
    sub.add_parser("gen", parents=[common], help="write the builtin corpus")
    sp = sub.add_parser("seminorm", parents=[common], help="tabulate seminorms")
    sp.add_argument("--kinds", help=f"comma-separated, from {', '.join(KINDS)}")
    sp.add_argument("--pair", help="CSV with columns w0, w1, x for kind k-method")
    vp = sub.add_parser("verify", parents=[common], help="run the equivalence and engine checks")
    vp.add_argument("--slack", type=float)
    rp = sub.add_parser("report", parents=[common], help="summarize a verification table")
    rp.add_argument("table", nargs="?")
    return ap


def main(argv=None) -> int:
    args = make_parser().parse_args(argv)
    try:
        cfg = build_config(args)
        if args.command == "gen":
            return cmd_gen(cfg)
        if args.command == "seminorm":
            return cmd_seminorm(cfg)
        if args.command == "verify":
            return cmd_verify(cfg)
        return cmd_report(cfg, args.table)
    except (ConfigError, OSError, ValueError) as exc:
        print(f"seminorm-lab: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
