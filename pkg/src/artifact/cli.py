"""Command-line front end.

Every command writes a CSV (or JSON) table whose leading ``#`` lines record
the package version, a SHA-256 of the effective configuration and the
configuration itself.  Identical configurations give byte-identical output.
"""
from __future__ import annotations

import argparse
import ast
import hashlib
import json
import math
import operator
import sys
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path

import numpy as np

from . import __version__
from .analytic import (
    EllipticSchedule,
    ModelValidityWarning,
    combined_mean,
    crossover_z_star,
    fidelity_curve,
    longtime_mean_from_z,
    short_time_mean,
)
from .channel import holevo_chi, holevo_chi_graybody
from .dynamics import (
    EvolutionConfig,
    detect_events,
    evolve_coherent_pump,
    evolve_single_pair,
    evolve_two_pair,
    observe_single_pair,
    observe_two_pair,
)
from .entanglement import (
    logneg_bs_scattering,
    logneg_entangled_ic,
    logneg_pair_vs_pair,
    logneg_pump_idler_vs_signal_analytic,
    logneg_pump_idler_vs_signal_entangled_ic,
)
from .fock import ModeSetup, TimeConvention, TruncationPolicy
from .page import effective_dimensions, page_curve, page_information_analytic, page_information_dynamic

COMMANDS = ("evolve", "analytic", "logneg", "holevo", "graybody", "page", "selftest")


class ConfigError(ValueError):
    pass


@dataclass
class RunConfig:
    command: str = "evolve"
    np0: int = 255
    ns0: int = 0
    nsbar0: int | None = None
    alpha_sq: float = 35.0
    coherent: bool = False
    z_grid: str = "0:0.99:0.01"
    theta: list = field(default_factory=lambda: [0.0, math.pi / 8, math.pi / 4, 3 * math.pi / 8, math.pi / 2])
    tau_max: float = 5.0
    dtau: float = 0.01
    tail_eps: float = 1e-12
    page_kind: str = "divisors"
    page_total: int = 291_600
    out: str | None = None
    format: str = "csv"
    workers: int = 1
    seed: int | None = None  # reserved; every computation is deterministic

    def validate(self) -> "RunConfig":
        if self.command not in COMMANDS:
            raise ConfigError(f"command: unknown command {self.command!r}")
        if int(self.np0) != self.np0 or self.np0 < 1:
            raise ConfigError(f"np0: must be an integer >= 1, got {self.np0!r}")
        if int(self.ns0) != self.ns0 or self.ns0 < 0:
            raise ConfigError(f"ns0: must be an integer >= 0, got {self.ns0!r}")
        if self.nsbar0 is not None and (int(self.nsbar0) != self.nsbar0 or self.nsbar0 < 0):
            raise ConfigError(f"nsbar0: must be an integer >= 0, got {self.nsbar0!r}")
        if not self.alpha_sq > 0:
            raise ConfigError("alpha_sq: must be positive")
        if not (self.tau_max >= 0 and self.dtau > 0):
            raise ConfigError("tau_max/dtau: need tau_max >= 0 and dtau > 0")
        if not (0 < self.tail_eps < 1):
            raise ConfigError("tail_eps: must lie in (0, 1)")
        if self.format not in ("csv", "json"):
            raise ConfigError(f"format: expected csv or json, got {self.format!r}")
        if self.page_kind not in ("divisors", "dynamic", "analytic"):
            raise ConfigError(f"page_kind: unknown kind {self.page_kind!r}")
        if self.workers < 1:
            raise ConfigError("workers: must be >= 1")
        parse_z_grid(self.z_grid)
        for t in self.theta:
            if not (0.0 <= float(t) <= math.pi / 2 + 1e-12):
                raise ConfigError(f"theta: {t!r} outside [0, pi/2]")
        self.np0, self.ns0 = int(self.np0), int(self.ns0)
        self.nsbar0 = None if self.nsbar0 is None else int(self.nsbar0)
        self.theta = [float(t) for t in self.theta]
        return self

    def canonical(self) -> dict:
        """Normalized form used for hashing and echoing; ``out`` and
        ``workers`` do not affect results and are left out."""
        d = asdict(self)
        d.pop("out")
        d.pop("workers")
        return dict(sorted(d.items()))

    def digest(self) -> str:
        blob = json.dumps(self.canonical(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(blob.encode()).hexdigest()

    @property
    def policy(self) -> TruncationPolicy:
        return TruncationPolicy(tail_epsilon=self.tail_eps)


def parse_z_grid(spec: str) -> np.ndarray:
    try:
        a, b, step = (float(x) for x in spec.split(":"))
    except ValueError:
        raise ConfigError(f"z_grid: expected a:b:step, got {spec!r}") from None
    if step <= 0 or b < a or a < 0 or b >= 1:
        raise ConfigError(f"z_grid: need 0 <= a <= b < 1 and step > 0, got {spec!r}")
    n = int(math.floor((b - a) / step + 1e-9))
    # round off accumulated step error so grid points print as written
    return np.round(a + step * np.arange(n + 1), 12)


def parse_theta(spec: str) -> list[float]:
    """Comma-separated angles; ``pi`` may appear, e.g. ``0,pi/8,pi/4``."""
    out = []
    for tok in spec.split(","):
        tok = tok.strip()
        try:
            out.append(float(_eval_angle(ast.parse(tok, mode="eval").body)))
        except (SyntaxError, ValueError, TypeError, ZeroDivisionError):
            raise ConfigError(f"theta: cannot parse {tok!r}") from None
    return out


_BINOPS = {ast.Add: operator.add, ast.Sub: operator.sub, ast.Mult: operator.mul, ast.Div: operator.truediv}


def _eval_angle(node):
    if isinstance(node, ast.Constant) and isinstance(node.value, (int, float)):
        return node.value
    if isinstance(node, ast.Name) and node.id == "pi":
        return math.pi
    if isinstance(node, ast.BinOp) and type(node.op) in _BINOPS:
        return _BINOPS[type(node.op)](_eval_angle(node.left), _eval_angle(node.right))
    if isinstance(node, ast.UnaryOp) and isinstance(node.op, ast.USub):
        return -_eval_angle(node.operand)
    raise ValueError("unsupported expression")


# ---------------------------------------------------------------------------
# Output


def _fmt(x) -> str:
    if x is None:
        return "nan"
    if isinstance(x, str):
        return f'"{x}"' if "," in x else x
    if isinstance(x, (bool, np.bool_)):
        return str(int(x))
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return repr(float(x))  # shortest round-trip form


def _json_safe(x):
    if isinstance(x, dict):
        return {k: _json_safe(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_json_safe(v) for v in x]
    if isinstance(x, np.integer):
        return int(x)
    if isinstance(x, (float, np.floating)):
        x = float(x)
        return None if math.isnan(x) else x
    return x


@dataclass
class Table:
    columns: dict
    meta: dict = field(default_factory=dict)
    extra: dict = field(default_factory=dict)  # nested data written alongside (events)


def render(table: Table, cfg: RunConfig) -> str:
    header = {"version": __version__, "config_sha256": cfg.digest(), "config": cfg.canonical()}
    if cfg.format == "json":
        doc = {**header, "meta": table.meta, "columns": {k: list(v) for k, v in table.columns.items()}}
        if table.extra:
            doc["extra"] = table.extra
        return json.dumps(_json_safe(doc), indent=2) + "\n"
    lines = [f"# artifact {__version__}",
             f"# config_sha256 {cfg.digest()}",
             "# config " + json.dumps(_json_safe(cfg.canonical()), sort_keys=True)]
    for k, v in table.meta.items():
        lines.append(f"# {k} " + json.dumps(_json_safe(v)))
    names = list(table.columns)
    lines.append(",".join(names))
    cols = [list(table.columns[n]) for n in names]
    for row in zip(*cols):
        lines.append(",".join(_fmt(x) for x in row))
    return "\n".join(lines) + "\n"


def write_output(table: Table, cfg: RunConfig, stream=None) -> None:
    text = render(table, cfg)
    if cfg.out is None:
        (stream or sys.stdout).write(text)
        if table.extra and cfg.format == "csv":
            (stream or sys.stdout).write("# extra " + json.dumps(_json_safe(table.extra)) + "\n")
        return
    path = Path(cfg.out)
    try:
        path.write_text(text, encoding="utf-8")
        if table.extra and cfg.format == "csv":
            side = path.with_suffix(".events.json")
            side.write_text(json.dumps(_json_safe(table.extra), indent=2) + "\n", encoding="utf-8")
    except OSError as exc:
        raise OSError(f"cannot write {exc.filename or path}: {exc.strerror}") from exc


def _ordered_map(fn, items, workers: int):
    """map() that keeps input order; a process pool when workers > 1."""
    if workers <= 1:
        return [fn(x) for x in items]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


# ---------------------------------------------------------------------------
# Commands


def cmd_evolve(cfg: RunConfig) -> Table:
    if cfg.coherent:
        ec = EvolutionConfig.uniform(cfg.tau_max, cfg.dtau, convention=TimeConvention.RT, policy=cfg.policy)
        run = evolve_coherent_pump(cfg.alpha_sq, cfg.ns0, ec)
        series = run.series
        meta = {"time": "t' = r t", "sectors": [int(run.sectors[0]), int(run.sectors[-1])],
                "discarded_mass": run.discarded_mass}
    else:
        setup = ModeSetup(cfg.np0, cfg.ns0, cfg.nsbar0)
        conv = TimeConvention.TWO_PAIR if setup.two_pair else TimeConvention.SCALED
        ec = EvolutionConfig.uniform(cfg.tau_max, cfg.dtau, convention=conv, policy=cfg.policy)
        if setup.two_pair:
            series = observe_two_pair(evolve_two_pair(setup, ec))
        else:
            series = observe_single_pair(evolve_single_pair(setup, ec))
        meta = {"time": conv.value}
    events = detect_events(series).as_dict()
    return Table(series.columns(), meta, {"events": events})


def cmd_analytic(cfg: RunConfig) -> Table:
    z = parse_z_grid(cfg.z_grid)
    setup = ModeSetup(cfg.np0, cfg.ns0, cfg.nsbar0)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", ModelValidityWarning)
        cross = crossover_z_star(setup)
    limit = crossover_z_star().z_root
    sched = EllipticSchedule.from_setup(setup)
    meta = {"z_star_limit": limit, "z_star_first_order": cross.z_first_order,
            "z_star_root": cross.z_root, "T_q": sched.T_q, "K_exact": sched.quarter_period_exact,
            "k_e": sched.k_e.k_e}
    zs = limit
    cols = {
        "z": z,
        "tau": np.arctanh(np.sqrt(z)),
        "mean_short": [short_time_mean(v, cfg.ns0) for v in z],
        "mean_long": [longtime_mean_from_z(v, cfg.ns0) for v in z],
        "mean_combined": [combined_mean(v, cfg.ns0, zs) for v in z],
        "fidelity": fidelity_curve(z, cfg.ns0, zs),
    }
    return Table(cols, meta)


def _logneg_row(args):
    z, ns0, nsbar0, thetas, tail = args
    pol = TruncationPolicy(tail_epsilon=tail)
    row = [
        logneg_pump_idler_vs_signal_analytic(z, ns0, "short", pol),
        logneg_pump_idler_vs_signal_analytic(z, ns0, "long", pol),
        logneg_pair_vs_pair(z, ns0, nsbar0, "short", pol),
        logneg_pair_vs_pair(z, ns0, nsbar0, "long", pol),
        logneg_entangled_ic(z, ns0, pol),
        logneg_pump_idler_vs_signal_entangled_ic(z, ns0, pol),
    ]
    row += [logneg_bs_scattering(z, th, pol) for th in thetas]
    return row


def cmd_logneg(cfg: RunConfig) -> Table:
    z = parse_z_grid(cfg.z_grid)
    nsbar0 = cfg.nsbar0 or 0
    rows = _ordered_map(_logneg_row, [(float(v), cfg.ns0, nsbar0, cfg.theta, cfg.tail_eps) for v in z],
                        cfg.workers)
    names = ["E_pi_s_short", "E_pi_s_long", "E_pair_short", "E_pair_long", "E_s_c_ent_ic", "E_pi_s_ent_ic"]
    names += [f"E_bs_theta{j}" for j in range(len(cfg.theta))]
    cols = {"z": z, "tau": np.arctanh(np.sqrt(z))}
    for j, n in enumerate(names):
        cols[n] = [r[j] for r in rows]
    return Table(cols, {"theta": cfg.theta})


def _holevo_row(args):
    z, tail = args
    pol = TruncationPolicy(tail_epsilon=tail)
    return [holevo_chi(z, b, policy=pol) for b in ("short", "long", "combined")]


def cmd_holevo(cfg: RunConfig) -> Table:
    z = parse_z_grid(cfg.z_grid)
    rows = _ordered_map(_holevo_row, [(float(v), cfg.tail_eps) for v in z], cfg.workers)
    return Table({"z": z, "chi_short": [r[0] for r in rows], "chi_long": [r[1] for r in rows],
                  "chi_combined": [r[2] for r in rows]})


def _graybody_point(args):
    z, th, tail = args
    return holevo_chi_graybody(z, th, "short", policy=TruncationPolicy(tail_epsilon=tail))


def cmd_graybody(cfg: RunConfig) -> Table:
    z = parse_z_grid(cfg.z_grid)
    pts = [(float(v), th, cfg.tail_eps) for v in z for th in cfg.theta]
    chi = _ordered_map(_graybody_point, pts, cfg.workers)
    return Table({"z": [p[0] for p in pts], "theta": [p[1] for p in pts], "chi": chi})


def cmd_page(cfg: RunConfig) -> Table:
    if cfg.page_kind == "divisors":
        rows = page_curve(cfg.page_total)
        cols = {name: [r[j] for r in rows] for j, name in enumerate(("m", "n", "ln_m", "S_nats", "I_nats"))}
        return Table(cols, {"total": cfg.page_total, "factor_pairs": len(rows)})
    if cfg.page_kind == "analytic":
        z = parse_z_grid(cfg.z_grid)
        return Table({"z": z, "I_bits": page_information_analytic(z, cfg.ns0, policy=cfg.policy)})
    if cfg.coherent:
        ec = EvolutionConfig.uniform(cfg.tau_max, cfg.dtau, convention=TimeConvention.RT, policy=cfg.policy)
        series = evolve_coherent_pump(cfg.alpha_sq, cfg.ns0, ec).series
    else:
        setup = ModeSetup(cfg.np0, cfg.ns0)
        ec = EvolutionConfig.uniform(cfg.tau_max, cfg.dtau, policy=cfg.policy)
        series = observe_single_pair(evolve_single_pair(setup, ec))
    info = page_information_dynamic(series.signal_dists)
    dims = [effective_dimensions(d) for d in series.signal_dists]
    return Table({
        "tau": series.tau_grid,
        "I_bits": info,
        "d_popescu_s": [d[0] for d in dims],
        "d_variance_s": [d[1] for d in dims],
        "d_variance_p": 1.0 + np.sqrt(series.var_p),
    })


def cmd_selftest(cfg: RunConfig) -> Table:
    from .selftest import run_selftest

    results = run_selftest()
    return Table({
        "check": [r.name for r in results],
        "value": [r.value for r in results],
        "reference": [r.reference for r in results],
        "tolerance": [r.tolerance for r in results],
        "passed": [r.passed for r in results],
    })


HANDLERS = {
    "evolve": cmd_evolve,
    "analytic": cmd_analytic,
    "logneg": cmd_logneg,
    "holevo": cmd_holevo,
    "graybody": cmd_graybody,
    "page": cmd_page,
    "selftest": cmd_selftest,
}


# ---------------------------------------------------------------------------
# Argument handling


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="bhpdc", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name)
        # defaults are None so that unset flags fall through to the config file
        p.add_argument("--config", help="JSON file with RunConfig fields")
        p.add_argument("--np0", type=int, default=None)
        p.add_argument("--ns0", type=int, default=None)
        p.add_argument("--nsbar0", type=int, default=None)
        p.add_argument("--alpha-sq", dest="alpha_sq", type=float, default=None)
        p.add_argument("--coherent", action="store_const", const=True, default=None)
        p.add_argument("--z-grid", dest="z_grid", default=None, help="a:b:step")
        p.add_argument("--theta", type=parse_theta, default=None, help="comma list, e.g. 0,pi/8,pi/4")
        p.add_argument("--tau-max", dest="tau_max", type=float, default=None)
        p.add_argument("--dtau", type=float, default=None)
        p.add_argument("--tail-eps", dest="tail_eps", type=float, default=None)
        p.add_argument("--page-kind", dest="page_kind", choices=("divisors", "dynamic", "analytic"), default=None)
        p.add_argument("--page-total", dest="page_total", type=int, default=None)
        p.add_argument("--out", default=None)
        p.add_argument("--format", choices=("csv", "json"), default=None)
        p.add_argument("--workers", type=int, default=None)
        p.add_argument("--seed", type=int, default=None)
    return parser


def resolve_config(ns: argparse.Namespace) -> RunConfig:
    """flags > config file > defaults."""
    merged = {}
    if ns.config:
        try:
            data = json.loads(Path(ns.config).read_text(encoding="utf-8"))
        except OSError as exc:
            raise ConfigError(f"config: cannot read {ns.config}: {exc.strerror}") from exc
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config: {ns.config} is not valid JSON ({exc})") from exc
        known = {f.name for f in fields(RunConfig)}
        for k, v in data.items():
            key = k.replace("-", "_")
            if key not in known:
                raise ConfigError(f"config: unknown field {k!r}")
            merged[key] = v
    for f in fields(RunConfig):
        val = getattr(ns, f.name, None)
        if val is not None:
            merged[f.name] = val
    merged["command"] = ns.command
    return RunConfig(**merged).validate()


def main(argv=None) -> int:
    parser = build_parser()
    ns = parser.parse_args(argv)
    try:
        cfg = resolve_config(ns)
        table = HANDLERS[cfg.command](cfg)
        write_output(table, cfg)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    if cfg.command == "selftest":
        passed = all(table.columns["passed"])
        print(f"# selftest {'PASS' if passed else 'FAIL'}", file=sys.stderr)
        return 0 if passed else 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
