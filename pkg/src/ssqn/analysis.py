"""Observer counting, double-violation solving, sweeps and cross-checks."""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .channels import ChannelKind, NoisyChannel
from .closedform import INFEASIBLE, ScenarioClass, closed_trace, closed_witness, gamma_sequence, required_sharpness
from .measurements import SEQUENTIAL_AXES as SEQ_AXES, Strategy, StrategyTag
from .protocol import DEFAULT_FAMILY, Scenario, run_protocol

CLASSICAL_BOUND = 2.0

# (theta, epsilon, gamma_1) reference rows at gamma_2 = 1
BELL_DOUBLE_VIOLATION_REFERENCE = (
    (0.01, 7.3073, 0.0415),
    (0.05, 3.5089, 0.1127),
    (0.1, 2.3351, 0.1669),
    (0.15, 1.7397, 0.2059),
    (0.2, 1.3525, 0.2360),
    (0.25, 1.0711, 0.2602),
    (0.3, 0.8533, 0.2800),
    (0.35, 0.6775, 0.2966),
    (0.4, 0.5317, 0.3105),
    (0.45, 0.4080, 0.3223),
    (0.5, 0.3014, 0.3323),
    (0.55, 0.2084, 0.3410),
    (0.6, 0.1263, 0.3481),
    (0.65, 0.0533, 0.3549),
)
GHZ_DOUBLE_VIOLATION_REFERENCE = (
    (0.8, 0.1123, 0.278067),
    (0.82, 0.2559, 0.2757),
    (0.84, 0.4324, 0.2728),
    (0.86, 0.6550, 0.2694),
    (0.88, 0.9447, 0.2652),
    (0.9, 1.3385, 0.2598),
    (0.92, 1.9071, 0.2528),
    (0.94, 2.8065, 0.2430),
    (0.96, 4.4712, 0.2280),
    (0.98, 8.8196, 0.2004),
    (0.995, 27.9752, 0.1456),
    (0.999, 92.6573, 0.0938),
)
BELL_DOUBLE_VIOLATION_CLASS = ScenarioClass(StrategyTag.MS1, ChannelKind.PHASE_FLIP)
GHZ_DOUBLE_VIOLATION_CLASS = ScenarioClass(StrategyTag.MS3, ChannelKind.BIT_FLIP)


class NoRootError(ValueError):
    """The double-violation equation has no root in the search bracket."""


@dataclass(frozen=True)
class CountResult:
    theta: float
    epsilon: float
    p: float
    cls: ScenarioClass
    count: int


def count_violating_observers(
    cls: ScenarioClass,
    theta: float,
    epsilon: float,
    p: float,
    n_max: int,
    sharp_last: bool = False,
) -> CountResult:
    """Number of sequential observers whose sharpness stays within [0, 1].

    With ``sharp_last`` the observer after the feasible run may still count if a
    projective measurement (sharpness 1) already beats the classical bound.
    """
    if n_max < 1:
        raise ValueError("n_max must be >= 1")
    seq = gamma_sequence(cls, theta, epsilon, p, n_max)
    count = seq.n_feasible
    if sharp_last and count < n_max:
        if required_sharpness(cls, count + 1, theta, seq.finite(), p) < 1.0:
            count += 1
    return CountResult(theta, epsilon, p, cls, count)


@dataclass(frozen=True)
class DoubleViolationSolution:
    theta: float
    epsilon: float
    gamma1: float
    witness1: float
    witness2: float
    residual: float = 0.0

    @property
    def violating(self) -> bool:
        return self.witness1 > CLASSICAL_BOUND and self.witness2 > CLASSICAL_BOUND


def _bisect(f, lo: float, hi: float, max_iter: int) -> float:
    flo = f(lo)
    for _ in range(max_iter):
        mid = 0.5 * (lo + hi)
        if mid in (lo, hi):
            break
        fmid = f(mid)
        if fmid == 0.0:
            return mid
        if (fmid < 0) == (flo < 0):
            lo, flo = mid, fmid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def double_violation_witnesses(cls: ScenarioClass, theta: float, gamma1: float, p: float) -> tuple[float, float]:
    """Witness values of observers 1 and 2 with the second one measuring sharply."""
    gammas = (gamma1, 1.0)
    return closed_witness(cls, 1, theta, gammas, p), closed_witness(cls, 2, theta, gammas, p)


def solve_double_violation(
    cls: ScenarioClass,
    theta: float,
    p: float,
    eps_bounds: tuple[float, float] = (1e-12, 1e4),
    max_iter: int = 200,
    residual_tol: float = 1e-10,
) -> DoubleViolationSolution:
    """Find the margin epsilon for which the second observer's sharpness is exactly 1."""
    unit1 = required_sharpness(cls, 1, theta, (), p)
    if not 0.0 < unit1 < math.inf:
        raise NoRootError(f"first observer cannot violate at theta={theta}")
    lo, hi = eps_bounds
    hi = min(hi, 1.0 / unit1 - 1.0)  # keep gamma_1 <= 1

    def excess(eps: float) -> float:
        g1 = (1 + eps) * unit1
        return (1 + eps) * required_sharpness(cls, 2, theta, (g1,), p) - 1.0

    if not hi > lo:
        raise NoRootError(f"no admissible epsilon at theta={theta}")
    f_lo, f_hi = excess(lo), excess(hi)
    if f_lo > 0 or f_hi < 0:
        raise NoRootError(
            f"gamma_2(eps) - 1 does not change sign on [{lo:g}, {hi:g}] at theta={theta} "
            f"(values {f_lo:.3g}, {f_hi:.3g})"
        )
    eps = _bisect(excess, lo, hi, max_iter)
    residual = excess(eps)
    if abs(residual) >= residual_tol:
        raise NoRootError(f"bisection stalled with residual {residual:.3e} at theta={theta}")
    gamma1 = (1 + eps) * unit1
    w1, w2 = double_violation_witnesses(cls, theta, gamma1, p)
    return DoubleViolationSolution(theta, eps, gamma1, w1, w2, residual)


# -- sweeps ------------------------------------------------------------------


@dataclass(frozen=True)
class Grid:
    start: float
    stop: float
    points: int
    log: bool = False

    def __post_init__(self):
        if self.points < 1:
            raise ValueError("a grid needs at least one point")
        if self.log and (self.start <= 0 or self.stop <= 0):
            raise ValueError("log grids need positive bounds")

    @classmethod
    def parse(cls, text: str) -> "Grid":
        """Parse ``start:stop:points[:log]``."""
        parts = text.split(":")
        if len(parts) not in (3, 4) or (len(parts) == 4 and parts[3] not in ("log", "lin")):
            raise ValueError(f"grid must look like start:stop:points[:log], got {text!r}")
        try:
            start, stop, points = float(parts[0]), float(parts[1]), int(parts[2])
        except ValueError as exc:
            raise ValueError(f"bad grid {text!r}: {exc}") from None
        return cls(start, stop, points, len(parts) == 4 and parts[3] == "log")

    def values(self) -> tuple[float, ...]:
        if self.points == 1:
            return (self.start,)
        if self.log:
            return tuple(float(x) for x in np.geomspace(self.start, self.stop, self.points))
        return tuple(float(x) for x in np.linspace(self.start, self.stop, self.points))


@dataclass(frozen=True)
class Curve:
    label: str
    cls: ScenarioClass
    epsilon: float | None = None
    p: float = 1.0


@dataclass(frozen=True)
class SweepConfig:
    """``kind='count'`` counts observers per curve; ``kind='double-violation'``
    solves ``solve_class`` per theta and evaluates every curve at that solution."""

    kind: str
    thetas: tuple[float, ...]
    curves: tuple[Curve, ...]
    n_max: int = 5
    sharp_last: bool = False
    solve_class: ScenarioClass | None = None
    p: float = 1.0
    workers: int = 1
    margin: float = 0.0  # status columns report "violation" only above 2 + margin

    def __post_init__(self):
        if self.margin < 0:
            raise ValueError("margin must be >= 0")
        if self.kind not in ("count", "double-violation"):
            raise ValueError(f"unknown sweep kind {self.kind!r}")
        if not self.thetas:
            raise ValueError("empty theta grid")
        if not self.curves:
            raise ValueError("no curves requested")
        if self.kind == "count" and any(c.epsilon is None for c in self.curves):
            raise ValueError("count sweeps need epsilon on every curve")
        if self.kind == "double-violation" and self.solve_class is None:
            raise ValueError("double-violation sweeps need a class to solve")


def _curve_fields(curve: Curve) -> dict:
    return {"curve": curve.label, "strategy": curve.cls.tag.value, "channel": curve.cls.kind.value, "p": curve.p}


def _count_row(curve: Curve, theta: float, n_max: int, sharp_last: bool) -> dict:
    res = count_violating_observers(curve.cls, theta, curve.epsilon, curve.p, n_max, sharp_last)
    return {**_curve_fields(curve), "epsilon": curve.epsilon, "theta": theta, "count": res.count}


def _double_violation_rows(config: SweepConfig, theta: float) -> list[dict]:
    try:
        sol = solve_double_violation(config.solve_class, theta, config.p)
    except NoRootError:
        sol = None
    rows = []
    for curve in config.curves:
        row = {**_curve_fields(curve), "theta": theta}
        if sol is None:
            row.update(epsilon=None, gamma1=None, witness1=None, witness2=None, status="no-root")
        else:
            w1, w2 = double_violation_witnesses(curve.cls, theta, sol.gamma1, curve.p)
            status = "double-violation" if min(w1, w2) > CLASSICAL_BOUND + config.margin else "no-double-violation"
            row.update(epsilon=sol.epsilon, gamma1=sol.gamma1, witness1=w1, witness2=w2, status=status)
        rows.append(row)
    return rows


def _sweep_point(args) -> list[dict]:
    config, theta = args
    if config.kind == "count":
        return [_count_row(c, theta, config.n_max, config.sharp_last) for c in config.curves]
    return _double_violation_rows(config, theta)


def sweep(config: SweepConfig) -> list[dict]:
    """Rows grouped by curve, each group in grid order."""
    jobs = [(config, theta) for theta in config.thetas]
    if config.workers > 1:
        with ProcessPoolExecutor(max_workers=config.workers) as pool:
            per_theta = list(pool.map(_sweep_point, jobs, chunksize=16))
    else:
        per_theta = [_sweep_point(j) for j in jobs]
    n_curves = len(config.curves)
    return [per_theta[i][c] for c in range(n_curves) for i in range(len(per_theta))]


# -- closed form vs simulation -------------------------------------------------


def random_parameters(cls: ScenarioClass, rng: np.random.Generator, n: int = 5) -> tuple[float, tuple[float, ...], float]:
    """Draw (theta, gammas, p) uniformly from the valid closed-form domain."""
    lo, hi, _ = cls.tag.theta_bounds
    theta = float(lo + (hi - lo) * (1.0 - rng.random()))  # in (lo, hi]
    gammas = tuple(float(g) for g in rng.random(n))
    if cls.kind is ChannelKind.NOISELESS:
        p = 1.0
    elif cls.kind is ChannelKind.DEPOLARIZING:
        p = float(rng.random())
    else:
        p = float(0.5 + 0.5 * (1.0 - rng.random()))  # in (1/2, 1]
    return theta, gammas, p


def simulate_trace(cls: ScenarioClass, theta: float, gammas: Sequence[float], p: float, n: int) -> tuple[float, ...]:
    scenario = Scenario(DEFAULT_FAMILY[cls.tag], Strategy(cls.tag, theta, tuple(gammas)), NoisyChannel(cls.kind, p), n)
    return run_protocol(scenario).values


@dataclass
class VerificationReport:
    tolerance: float
    draws: int
    seed: int
    deviations: dict[str, float] = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(d < self.tolerance for d in self.deviations.values())

    def failures(self) -> list[str]:
        return [name for name, d in self.deviations.items() if not d < self.tolerance]


def all_classes() -> tuple[ScenarioClass, ...]:
    return tuple(ScenarioClass(tag, kind) for tag in StrategyTag for kind in ChannelKind)


def verify_closed_vs_sim(
    classes: Iterable[ScenarioClass] | None = None,
    draws: int = 200,
    tolerance: float = 1e-10,
    seed: int = 0,
    n: int = 5,
) -> VerificationReport:
    """Largest |closed form - simulation| per class over seeded random draws."""
    if draws < 1:
        raise ValueError("draws must be >= 1")
    classes = all_classes() if classes is None else tuple(classes)
    rng = np.random.default_rng(seed)
    report = VerificationReport(tolerance, draws, seed)
    for cls in classes:
        worst = 0.0
        for _ in range(draws):
            theta, gammas, p = random_parameters(cls, rng, n)
            sim = simulate_trace(cls, theta, gammas, p, n)
            closed = closed_trace(cls, theta, gammas, p, n)
            worst = max(worst, max(abs(a - b) for a, b in zip(sim, closed)))
        report.deviations[str(cls)] = worst
    return report


def sequence_violates(cls: ScenarioClass, theta: float, epsilon: float, p: float, n: int) -> bool:
    """True when every finite entry of the constructed sequence gives a witness above 2."""
    seq = gamma_sequence(cls, theta, epsilon, p, n)
    finite = seq.finite()
    return all(closed_witness(cls, k, theta, finite, p) > CLASSICAL_BOUND for k in range(1, len(finite) + 1))


def is_infeasible(value) -> bool:
    return value is INFEASIBLE


# -- named datasets ------------------------------------------------------------


def _cls(tag: str, kind: str) -> ScenarioClass:
    return ScenarioClass(StrategyTag(tag), ChannelKind(kind))


def _count_curves(p: float, immune: tuple[str, str], mirror: tuple[str, str], leaky: tuple[str, str], noiseless_eps: float) -> tuple[Curve, ...]:
    (t_imm, k_imm), (t_mir, k_mir), (t_leak, k_leak) = immune, mirror, leaky
    return (
        Curve(f"{t_imm}-noiseless-eps{noiseless_eps:g}", _cls(t_imm, "noiseless"), noiseless_eps, 1.0),
        Curve(f"{t_imm}-{k_imm}-eps0.1", _cls(t_imm, k_imm), 0.1, p),
        Curve(f"{t_mir}-{k_mir}-eps0.1", _cls(t_mir, k_mir), 0.1, p),
        Curve(f"{t_imm}-{k_imm}-eps2", _cls(t_imm, k_imm), 2.0, p),
        Curve(f"{t_leak}-{k_leak}-eps0.1", _cls(t_leak, k_leak), 0.1, p),
        Curve(f"{t_imm}-depolarizing-eps0.1", _cls(t_imm, "depolarizing"), 0.1, p),
    )


def _panels(solve: ScenarioClass, p: float, entries) -> dict[str, tuple[Curve, ...]]:
    return {suffix: (Curve(f"{tag}-{kind}", _cls(tag, kind), None, p),) for suffix, (tag, kind) in entries}


FIGURES = ("fig2", "fig4", "fig5", "fig6", "fig7")
TABLES = ("table1", "table2")


def figure_sweeps(name: str) -> dict[str, SweepConfig]:
    """Sweep configurations behind a named figure, keyed by output-file suffix
    (empty for single-file figures, ``a``..``d`` for panel figures)."""
    if name == "fig2":
        thetas = Grid(1e-7, 0.785, 400, log=True).values()
        curves = _count_curves(0.95, ("ms1", "phase-flip"), ("ms2", "bit-flip"), ("ms1", "bit-flip"), 0.1)
        return {"": SweepConfig("count", thetas, curves)}
    if name == "fig4":
        thetas = Grid(0.001, 0.999, 999).values()
        curves = _count_curves(0.85, ("ms3", "bit-flip"), ("ms4", "phase-flip"), ("ms3", "phase-flip"), 1.0)
        return {"": SweepConfig("count", thetas, curves)}
    if name == "fig5":
        thetas = Grid(1e-7, 0.785, 400, log=True).values()
        curves = _count_curves(0.9, ("ms5", "phase-flip"), ("ms6", "bit-flip"), ("ms5", "bit-flip"), 1.0)
        return {"": SweepConfig("count", thetas, curves)}
    if name == "fig6":
        thetas = Grid(0.01, 0.65, 65).values()
        solve, p = BELL_DOUBLE_VIOLATION_CLASS, 0.9
        entries = (("a", ("ms1", "phase-flip")), ("b", ("ms1", "bit-flip")), ("c", ("ms1", "depolarizing")), ("d", ("ms2", "bit-flip")))
    elif name == "fig7":
        thetas = Grid(0.8, 0.999, 200).values()
        solve, p = GHZ_DOUBLE_VIOLATION_CLASS, 0.8
        entries = (("a", ("ms3", "bit-flip")), ("b", ("ms3", "phase-flip")), ("c", ("ms3", "depolarizing")), ("d", ("ms4", "phase-flip")))
    else:
        raise ValueError(f"unknown figure {name!r}; choose from {', '.join(FIGURES)}")
    return {
        suffix: SweepConfig("double-violation", thetas, curves, solve_class=solve, p=p)
        for suffix, curves in _panels(solve, p, entries).items()
    }


def table_rows(name: str) -> list[dict]:
    """Solver output next to the reference values for ``table1`` or ``table2``."""
    if name == "table1":
        cls, p, ref = BELL_DOUBLE_VIOLATION_CLASS, 0.9, BELL_DOUBLE_VIOLATION_REFERENCE
    elif name == "table2":
        cls, p, ref = GHZ_DOUBLE_VIOLATION_CLASS, 0.8, GHZ_DOUBLE_VIOLATION_REFERENCE
    else:
        raise ValueError(f"unknown table {name!r}; choose from {', '.join(TABLES)}")
    rows = []
    for theta, eps_ref, g_ref in ref:
        sol = solve_double_violation(cls, theta, p)
        rows.append(
            {
                "theta": theta,
                "epsilon": sol.epsilon,
                "gamma1": sol.gamma1,
                "witness1": sol.witness1,
                "witness2": sol.witness2,
                "epsilon_reference": eps_ref,
                "gamma1_reference": g_ref,
                "epsilon_error": abs(sol.epsilon - eps_ref),
                "gamma1_error": abs(sol.gamma1 - g_ref),
            }
        )
    return rows


# -- verification suite ----------------------------------------------------------

TABLE_TOLERANCE = 5e-4


@dataclass(frozen=True)
class CheckResult:
    name: str
    deviation: float
    limit: float

    @property
    def passed(self) -> bool:
        return self.deviation < self.limit


def _random_density(rng: np.random.Generator, nqubits: int) -> np.ndarray:
    dim = 2**nqubits
    g = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    rho = g @ g.conj().T
    return rho / np.trace(rho).real


def _paired_sim_check(name, left, right, draws, rng, tolerance) -> CheckResult:
    worst = 0.0
    for _ in range(draws):
        theta, gammas, p = random_parameters(left, rng)
        a = simulate_trace(left, theta, gammas, p, 5)
        b = simulate_trace(right, theta, gammas, p, 5)
        worst = max(worst, max(abs(x - y) for x, y in zip(a, b)))
    return CheckResult(name, worst, tolerance)


_SWAPPED_PAIRS = (
    ("ms4", "phase-flip", "ms3", "bit-flip"),
    ("ms4", "bit-flip", "ms3", "phase-flip"),
    ("ms4", "depolarizing", "ms3", "depolarizing"),
    ("ms6", "bit-flip", "ms5", "phase-flip"),
    ("ms6", "phase-flip", "ms5", "bit-flip"),
    ("ms6", "depolarizing", "ms5", "depolarizing"),
    ("ms2", "bit-flip", "ms1", "phase-flip"),
)


def _lueders_transfer_check(rng, draws, tolerance) -> CheckResult:
    from .protocol import luders_superop
    from .qcore import PAULI, apply_local_map

    worst = 0.0
    for tag in StrategyTag:
        sharp, weak = "xyz".index(SEQ_AXES[tag][0]), "xyz".index(SEQ_AXES[tag][1])
        for _ in range(max(1, draws // 20)):
            g = float(rng.random())
            strategy = Strategy(tag, tag.theta_bounds[1], (g,))
            superop = luders_superop(strategy, 1)
            expected = np.full(3, math.sqrt(1 - g * g) / 2)
            expected[sharp] = (1 + math.sqrt(1 - g * g)) / 2
            expected[weak] = 0.5
            for i, axis in enumerate("xyz"):
                image = apply_local_map(PAULI[axis], superop, 0, 1)
                for j, other in enumerate("xyz"):
                    coeff = np.trace(PAULI[other] @ image).real / 2
                    target = expected[i] if i == j else 0.0
                    worst = max(worst, abs(coeff - target))
                worst = max(worst, abs(np.trace(image)))
    return CheckResult("lueders map vs axis coefficients", worst, tolerance)


def _channel_trace_check(rng, draws, tolerance) -> CheckResult:
    from .channels import apply_channel_qubit
    from .qcore import DensityMatrix

    worst = 0.0
    for kind in ChannelKind:
        for _ in range(max(1, draws // 20)):
            n = int(rng.integers(2, 4))
            rho = DensityMatrix(_random_density(rng, n), n)
            out = apply_channel_qubit(rho, NoisyChannel(kind, float(rng.random())), int(rng.integers(0, n)))
            worst = max(worst, abs(out.trace() - 1))
            worst = max(worst, float(np.abs(out.mat - out.mat.conj().T).max()))
            worst = max(worst, max(0.0, -float(np.linalg.eigvalsh(out.mat).min())))
    return CheckResult("channel trace preservation", worst, tolerance)


def _p1_agreement_check(rng, draws, tolerance) -> CheckResult:
    worst = 0.0
    for tag in StrategyTag:
        for _ in range(max(1, draws // 10)):
            theta, gammas, _ = random_parameters(_cls(tag.value, "noiseless"), rng)
            traces = [simulate_trace(_cls(tag.value, k.value), theta, gammas, 1.0, 5) for k in ChannelKind]
            traces += [closed_trace(_cls(tag.value, k.value), theta, gammas, 1.0, 5) for k in ChannelKind]
            for t in traces[1:]:
                worst = max(worst, max(abs(x - y) for x, y in zip(t, traces[0])))
    return CheckResult("channel kinds agree at p=1", worst, tolerance)


def _bound_checks(tolerance) -> list[CheckResult]:
    from .protocol import MERMIN_MAX, TSIRELSON

    bell = simulate_trace(_cls("ms1", "noiseless"), math.pi / 4, (1.0,), 1.0, 1)[0]
    ghz = simulate_trace(_cls("ms3", "noiseless"), 1.0, (1.0,), 1.0, 1)[0]
    return [
        CheckResult("tsirelson point", abs(bell - TSIRELSON), tolerance),
        CheckResult("mermin maximum", abs(ghz - MERMIN_MAX), tolerance),
    ]


def _interior_thetas(tag: StrategyTag, points: int = 40) -> np.ndarray:
    lo, hi, _ = tag.theta_bounds
    return np.linspace(lo, hi, points + 2)[1:-1]


def _sequence_property_checks() -> list[CheckResult]:
    ratio_bad = absorb_bad = violate_bad = monotone_bad = 0
    for cls in all_classes():
        for theta in _interior_thetas(cls.tag):
            for p in (0.6, 0.9, 1.0):
                prev_count = None
                for eps in (0.01, 0.1, 1.0, 2.0):
                    seq = gamma_sequence(cls, float(theta), eps, p, 6)
                    finite = seq.finite()
                    ratio_bad += sum(1 for a, b in zip(finite, finite[1:]) if not b / a > 2)
                    absorb_bad += sum(1 for g in seq.gammas[seq.n_feasible:] if g is not INFEASIBLE)
                    violate_bad += sum(
                        1 for k in range(1, len(finite) + 1)
                        if not closed_witness(cls, k, float(theta), finite, p) > CLASSICAL_BOUND
                    )
                    if prev_count is not None and seq.n_feasible > prev_count:
                        monotone_bad += 1
                    prev_count = seq.n_feasible
    return [
        CheckResult("sharpness ratio above 2", ratio_bad, 1),
        CheckResult("infeasible absorption", absorb_bad, 1),
        CheckResult("constructed sequences violate", violate_bad, 1),
        CheckResult("count non-increasing in epsilon", monotone_bad, 1),
    ]


def _limit_trend_check() -> CheckResult:
    """For immune classes gamma_k shrinks towards 0 as theta approaches its limit."""
    bad = 0
    limits = {
        "chsh": np.geomspace(1e-2, 1e-8, 13),
        "w": np.geomspace(1e-2, 1e-8, 13),
        "ghz": 1 - np.geomspace(1e-2, 1e-8, 13),
    }
    for cls in all_classes():
        if not cls.is_immune:
            continue
        for k in (1, 2, 3):
            vals = []
            for theta in limits[cls.family]:
                seq = gamma_sequence(cls, float(theta), 0.1, 0.9, k)
                g = seq.gammas[k - 1]
                vals.append(math.inf if g is INFEASIBLE else g)
            bad += sum(1 for a, b in zip(vals, vals[1:]) if not b < a)
            bad += 0 if vals[-1] < 1e-3 else 1
    return CheckResult("sharpness vanishes at the theta limit", bad, 1)


def _table_checks() -> list[CheckResult]:
    out = []
    for name in TABLES:
        rows = table_rows(name)
        dev = max(max(r["epsilon_error"], r["gamma1_error"]) for r in rows)
        out.append(CheckResult(f"{name} reproduction", dev, TABLE_TOLERANCE))
    sign_bad = 0
    for (solve, p, ref), swapped in (
        ((BELL_DOUBLE_VIOLATION_CLASS, 0.9, BELL_DOUBLE_VIOLATION_REFERENCE), _cls("ms1", "bit-flip")),
        ((GHZ_DOUBLE_VIOLATION_CLASS, 0.8, GHZ_DOUBLE_VIOLATION_REFERENCE), _cls("ms3", "phase-flip")),
    ):
        for theta, _, _ in ref:
            sol = solve_double_violation(solve, theta, p)
            _, w2_swapped = double_violation_witnesses(swapped, theta, sol.gamma1, p)
            sign_bad += (not sol.violating) + (not w2_swapped < CLASSICAL_BOUND)
    out.append(CheckResult("double violation signs", sign_bad, 1))
    return out


def run_verification(tolerance: float = 1e-10, draws: int = 200, seed: int = 0) -> list[CheckResult]:
    """Every numerical invariant, in a fixed order.

    ``tolerance`` governs the identities that should hold to rounding error;
    reproduction of tabulated values uses a fixed 5e-4 and the combinatorial
    properties count violations (limit 1, so any violation fails).
    """
    if draws < 1:
        raise ValueError("draws must be >= 1")
    rng = np.random.default_rng(seed)
    report = verify_closed_vs_sim(draws=draws, tolerance=tolerance, seed=seed)
    results = [CheckResult(f"closed vs simulation {name}", dev, tolerance) for name, dev in report.deviations.items()]
    for lt, lk, rt, rk in _SWAPPED_PAIRS:
        results.append(
            _paired_sim_check(f"equivalence {lt}/{lk} = {rt}/{rk}", _cls(lt, lk), _cls(rt, rk), draws, rng, tolerance)
        )
    results.append(_p1_agreement_check(rng, draws, tolerance))
    results.append(_channel_trace_check(rng, draws, tolerance))
    results.append(_lueders_transfer_check(rng, draws, tolerance))
    results.extend(_bound_checks(tolerance))
    results.extend(_sequence_property_checks())
    results.append(_limit_trend_check())
    results.extend(_table_checks())
    return results
