"""Command-line front end: ``ssqn <command> [flags]``.

Exit codes: 0 success, 1 invalid input, 2 verification failure, 3 infeasible
parameters.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

from . import analysis
from .analysis import Curve, Grid, NoRootError, SweepConfig
from .channels import ChannelKind, NoisyChannel
from .closedform import INFEASIBLE, ScenarioClass, gamma_sequence
from .measurements import Strategy, StrategyTag
from .protocol import DEFAULT_FAMILY, Scenario, run_protocol
from .qcore import StateFamily

EXIT_OK = 0
EXIT_INVALID = 1
EXIT_VERIFY_FAILED = 2
EXIT_INFEASIBLE = 3


class UsageError(Exception):
    pass


class InfeasibleError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INVALID, f"{self.prog}: error: {message}\n")


# -- output --------------------------------------------------------------------


def format_value(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, int):
        return str(value)
    if isinstance(value, float):
        return f"{value:.12g}"
    return str(value)


def render_rows(rows: Sequence[dict], fmt: str) -> str:
    if fmt == "jsonl":
        return "".join(json.dumps(row) + "\n" for row in rows)
    buf = io.StringIO()
    if rows:
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(rows[0].keys())
        for row in rows:
            writer.writerow(format_value(v) for v in row.values())
    return buf.getvalue()


def _emit(text: str, out: str | None) -> None:
    if out is None:
        sys.stdout.write(text)
    else:
        Path(out).write_text(text)


# -- configuration ---------------------------------------------------------------

# key -> default; every key can come from --config or from a flag
DEFAULTS = {
    "state": None,
    "strategy": None,
    "channel": "noiseless",
    "p": 1.0,
    "theta": None,
    "epsilon": None,
    "n": None,
    "gamma": None,
    "grid": None,
    "format": "csv",
    "out": None,
    "seed": 0,
    "tolerance": 1e-10,
    "draws": 200,
    "sharp_last": False,
    "kind": "count",
    "workers": 1,
    "margin": 0.0,
}


@dataclass(frozen=True)
class ExperimentConfig:
    state: StateFamily | None
    strategy: StrategyTag | None
    channels: tuple[ChannelKind, ...]
    p: float
    theta: float | None
    epsilon: float | None
    n: int | None
    gamma: tuple[float, ...] | None
    grid: Grid | None
    format: str
    out: str | None
    seed: int
    tolerance: float
    draws: int
    sharp_last: bool
    kind: str
    workers: int
    margin: float

    @property
    def channel(self) -> ChannelKind:
        if len(self.channels) != 1:
            raise UsageError("this command takes a single --channel")
        return self.channels[0]

    def require(self, *names: str) -> None:
        missing = [n for n in names if getattr(self, n) is None]
        if missing:
            raise UsageError("missing " + ", ".join(f"--{m.replace('_', '-')}" for m in missing))

    def thetas(self) -> tuple[float, ...]:
        if self.grid is not None and self.theta is not None:
            raise UsageError("give either --theta or --grid, not both")
        if self.grid is not None:
            return self.grid.values()
        if self.theta is None:
            raise UsageError("missing --theta or --grid")
        return (self.theta,)


def _field(name: str, value, convert):
    try:
        return convert(value)
    except (TypeError, ValueError) as exc:
        raise UsageError(f"field {name!r}: {exc}") from None


def _float_list(value) -> tuple[float, ...]:
    if isinstance(value, (list, tuple)):
        return tuple(float(v) for v in value)
    return tuple(float(v) for v in str(value).split(",") if v.strip())


def _channel_list(value) -> tuple[ChannelKind, ...]:
    items = value if isinstance(value, (list, tuple)) else str(value).split(",")
    return tuple(ChannelKind(str(v).strip()) for v in items)


def _grid(value) -> Grid:
    if isinstance(value, dict):
        return Grid(float(value["start"]), float(value["stop"]), int(value["points"]), bool(value.get("log", False)))
    return Grid.parse(str(value))


def _load_file(path: str) -> dict:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise UsageError(f"cannot read config {path}: {exc.strerror}") from None
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise UsageError(f"{path}:{exc.lineno}:{exc.colno}: {exc.msg}") from None
    if not isinstance(data, dict):
        raise UsageError(f"{path}: expected a JSON object at the top level")
    data = {k.replace("-", "_"): v for k, v in data.items()}
    unknown = sorted(set(data) - set(DEFAULTS) - {"name"})
    if unknown:
        raise UsageError(f"{path}: unknown field(s) {', '.join(unknown)}")
    return data


def build_config(args: argparse.Namespace) -> ExperimentConfig:
    """Merge defaults, the optional JSON file and explicit flags (flags win)."""
    merged = dict(DEFAULTS)
    if getattr(args, "config", None):
        merged.update({k: v for k, v in _load_file(args.config).items() if k in DEFAULTS})
    for key in DEFAULTS:
        value = getattr(args, key, None)
        if value is not None:
            merged[key] = value

    def opt(name, convert):
        value = merged[name]
        return None if value is None else _field(name, value, convert)

    fmt = merged["format"]
    if fmt not in ("csv", "jsonl"):
        raise UsageError(f"field 'format': expected csv or jsonl, got {fmt!r}")
    cfg = ExperimentConfig(
        state=opt("state", StateFamily),
        strategy=opt("strategy", StrategyTag),
        channels=_field("channel", merged["channel"], _channel_list),
        p=_field("p", merged["p"], float),
        theta=opt("theta", float),
        epsilon=opt("epsilon", float),
        n=opt("n", int),
        gamma=opt("gamma", _float_list),
        grid=opt("grid", _grid),
        format=fmt,
        out=merged["out"],
        seed=_field("seed", merged["seed"], int),
        tolerance=_field("tolerance", merged["tolerance"], float),
        draws=_field("draws", merged["draws"], int),
        sharp_last=bool(merged["sharp_last"]),
        kind=str(merged["kind"]),
        workers=_field("workers", merged["workers"], int),
        margin=_field("margin", merged["margin"], float),
    )
    if not 0.0 <= cfg.p <= 1.0:
        raise UsageError(f"field 'p': {cfg.p} outside [0, 1]")
    if cfg.n is not None and cfg.n < 1:
        raise UsageError("field 'n': must be >= 1")
    if cfg.epsilon is not None and not cfg.epsilon > 0:
        raise UsageError("field 'epsilon': must be positive")
    if cfg.margin < 0:
        raise UsageError("field 'margin': must be >= 0")
    if cfg.draws < 1:
        raise UsageError("field 'draws': must be >= 1")
    if not cfg.channels:
        raise UsageError("field 'channel': empty")
    return cfg


# -- commands ----------------------------------------------------------------------


def _scenario_class(cfg: ExperimentConfig, kind: ChannelKind | None = None) -> ScenarioClass:
    cfg.require("strategy")
    return ScenarioClass(cfg.strategy, kind or cfg.channel)


def cmd_simulate(cfg: ExperimentConfig) -> int:
    cfg.require("strategy", "theta")
    cls = _scenario_class(cfg)
    n = cfg.n or (len(cfg.gamma) if cfg.gamma else 1)
    if cfg.gamma is not None:
        if cfg.epsilon is not None:
            raise UsageError("give either --gamma or --epsilon, not both")
        gammas = cfg.gamma
    else:
        cfg.require("epsilon")
        seq = gamma_sequence(cls, cfg.theta, cfg.epsilon, cfg.p, n)
        if seq.n_feasible < n:
            shown = ", ".join("Infeasible" if g is INFEASIBLE else f"{g:.6g}" for g in seq.gammas)
            raise InfeasibleError(f"no sharpness <= 1 for observer {seq.n_feasible + 1}: ({shown})")
        gammas = tuple(seq.gammas)
    state = cfg.state or DEFAULT_FAMILY[cls.tag]
    scenario = Scenario(state, Strategy(cls.tag, cfg.theta, tuple(gammas)), NoisyChannel(cls.kind, cfg.p), n)
    trace = run_protocol(scenario)
    rows = [
        {
            "state": state.value,
            "strategy": cls.tag.value,
            "channel": cls.kind.value,
            "p": cfg.p,
            "theta": cfg.theta,
            "k": k,
            "gamma": gammas[k - 1],
            "witness": value,
            "violates": value > analysis.CLASSICAL_BOUND + cfg.margin,
        }
        for k, value in enumerate(trace.values, start=1)
    ]
    _emit(render_rows(rows, cfg.format), cfg.out)
    return EXIT_OK


def cmd_count(cfg: ExperimentConfig) -> int:
    cfg.require("strategy", "epsilon")
    curves = tuple(Curve(f"{cfg.strategy.value}-{k.value}", _scenario_class(cfg, k), cfg.epsilon, cfg.p) for k in cfg.channels)
    config = SweepConfig("count", cfg.thetas(), curves, n_max=cfg.n or 5, sharp_last=cfg.sharp_last, workers=cfg.workers)
    _emit(render_rows(analysis.sweep(config), cfg.format), cfg.out)
    return EXIT_OK


def cmd_double_violation(cfg: ExperimentConfig) -> int:
    cls = _scenario_class(cfg)
    rows = []
    for theta in cfg.thetas():
        try:
            sol = analysis.solve_double_violation(cls, theta, cfg.p)
        except NoRootError as exc:
            if cfg.grid is None:
                raise InfeasibleError(str(exc)) from None
            rows.append({"theta": theta, "epsilon": None, "gamma1": None, "witness1": None, "witness2": None, "violating": None})
            continue
        rows.append(
            {
                "theta": theta,
                "epsilon": sol.epsilon,
                "gamma1": sol.gamma1,
                "witness1": sol.witness1,
                "witness2": sol.witness2,
                "violating": min(sol.witness1, sol.witness2) > analysis.CLASSICAL_BOUND + cfg.margin,
            }
        )
    _emit(render_rows(rows, cfg.format), cfg.out)
    return EXIT_OK


def cmd_sweep(cfg: ExperimentConfig) -> int:
    cfg.require("strategy", "grid")
    if cfg.kind not in ("count", "double-violation"):
        raise UsageError(f"field 'kind': expected count or double-violation, got {cfg.kind!r}")
    curves = tuple(Curve(f"{cfg.strategy.value}-{k.value}", _scenario_class(cfg, k), cfg.epsilon, cfg.p) for k in cfg.channels)
    if cfg.kind == "count":
        cfg.require("epsilon")
        config = SweepConfig("count", cfg.thetas(), curves, n_max=cfg.n or 5, sharp_last=cfg.sharp_last, workers=cfg.workers)
    else:
        config = SweepConfig(
            "double-violation", cfg.thetas(), curves, solve_class=curves[0].cls, p=cfg.p, workers=cfg.workers, margin=cfg.margin
        )
    _emit(render_rows(analysis.sweep(config), cfg.format), cfg.out)
    return EXIT_OK


def reproduce(name: str, out_dir: Path, fmt: str = "csv") -> list[Path]:
    """Write the dataset(s) for ``name`` into ``out_dir`` and return the paths."""
    out_dir.mkdir(parents=True, exist_ok=True)
    if name in analysis.TABLES:
        datasets = {"": analysis.table_rows(name)}
    elif name in analysis.FIGURES:
        datasets = {suffix: analysis.sweep(config) for suffix, config in analysis.figure_sweeps(name).items()}
    else:
        choices = ", ".join(analysis.FIGURES + analysis.TABLES)
        raise UsageError(f"unknown dataset {name!r}; choose from {choices}")
    written = []
    for suffix, rows in datasets.items():
        path = out_dir / f"{name}{suffix}.{fmt}"
        path.write_text(render_rows(rows, fmt))
        written.append(path)
    return written


def cmd_reproduce(cfg: ExperimentConfig, name: str) -> int:
    for path in reproduce(name, Path(cfg.out or "."), cfg.format):
        print(path)
    return EXIT_OK


def verification_report(tolerance: float, draws: int, seed: int) -> tuple[str, bool]:
    results = analysis.run_verification(tolerance=tolerance, draws=draws, seed=seed)
    lines = [
        "ssqn verification report",
        f"seed: {seed}",
        f"draws: {draws}",
        f"tolerance: {tolerance:g}",
        "",
    ]
    width = max(len(r.name) for r in results)
    for r in results:
        status = "PASS" if r.passed else "FAIL"
        lines.append(f"{status}  {r.name:<{width}}  max_dev={r.deviation:.3e}  limit={r.limit:.1e}")
    n_pass = sum(r.passed for r in results)
    ok = n_pass == len(results)
    lines += ["", f"{n_pass}/{len(results)} checks passed", "result: " + ("PASS" if ok else "FAIL")]
    return "\n".join(lines) + "\n", ok


def cmd_verify(cfg: ExperimentConfig) -> int:
    text, ok = verification_report(cfg.tolerance, cfg.draws, cfg.seed)
    _emit(text, cfg.out)
    return EXIT_OK if ok else EXIT_VERIFY_FAILED


# -- argument parsing ----------------------------------------------------------------


def _common(parser: argparse.ArgumentParser) -> None:
    # defaults stay None so that unset flags do not override the config file
    parser.add_argument("--config", help="JSON object with any of the flag names as keys")
    parser.add_argument("--format", choices=("csv", "jsonl"))
    parser.add_argument("--out", help="output file (directory for reproduce)")


def _scenario_flags(parser: argparse.ArgumentParser, grid: bool = True) -> None:
    parser.add_argument("--state", choices=[s.value for s in StateFamily])
    parser.add_argument("--strategy", choices=[t.value for t in StrategyTag])
    parser.add_argument("--channel", help="phase-flip, bit-flip, depolarizing or noiseless (comma list for count/sweep)")
    parser.add_argument("--p", type=float, help="channel parameter")
    parser.add_argument("--theta", type=float)
    parser.add_argument("--epsilon", type=float)
    parser.add_argument("--n", type=int, help="number of sequential observers")
    parser.add_argument("--gamma", help="comma-separated sharpness values")
    parser.add_argument("--margin", type=float, help="report a violation only above 2 + margin (default 0)")
    if grid:
        parser.add_argument("--grid", help="theta grid start:stop:points[:log]")
        parser.add_argument("--workers", type=int, help="parallel worker processes")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="ssqn", description="Sequential nonlocality sharing through noisy channels.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("simulate", help="density-matrix run of one scenario")
    _common(p)
    _scenario_flags(p, grid=False)

    p = sub.add_parser("count", help="number of violating observers per theta")
    _common(p)
    _scenario_flags(p)
    p.add_argument("--sharp-last", action="store_const", const=True, dest="sharp_last", help="let the last counted observer measure sharply")

    p = sub.add_parser("double-violation", help="solve for the margin giving a sharp second observer")
    _common(p)
    _scenario_flags(p)

    p = sub.add_parser("sweep", help="count or double-violation rows over a theta grid")
    _common(p)
    _scenario_flags(p)
    p.add_argument("--kind", choices=("count", "double-violation"))
    p.add_argument("--sharp-last", action="store_const", const=True, dest="sharp_last")

    p = sub.add_parser("reproduce", help="write a named figure or table dataset")
    p.add_argument("name", choices=analysis.FIGURES + analysis.TABLES)
    _common(p)

    p = sub.add_parser("verify", help="run every numerical check and print a report")
    _common(p)
    p.add_argument("--tolerance", type=float)
    p.add_argument("--draws", type=int)
    p.add_argument("--seed", type=int)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = build_config(args)
        if args.command == "simulate":
            return cmd_simulate(cfg)
        if args.command == "count":
            return cmd_count(cfg)
        if args.command == "double-violation":
            return cmd_double_violation(cfg)
        if args.command == "sweep":
            return cmd_sweep(cfg)
        if args.command == "reproduce":
            return cmd_reproduce(cfg, args.name)
        return cmd_verify(cfg)
    except InfeasibleError as exc:
        print(f"ssqn: infeasible: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except (UsageError, ValueError, IndexError) as exc:
        print(f"ssqn: error: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
