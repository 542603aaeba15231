"""Sequential sharing of CHSH and Mermin nonlocality through noisy qubit channels."""

from .analysis import (
    CountResult,
    DoubleViolationSolution,
    Grid,
    NoRootError,
    SweepConfig,
    count_violating_observers,
    run_verification,
    solve_double_violation,
    sweep,
    verify_closed_vs_sim,
)
from .channels import ChannelKind, NoisyChannel, apply_channel_qubit
from .closedform import INFEASIBLE, ScenarioClass, closed_trace, closed_witness, gamma_sequence
from .measurements import Strategy, StrategyTag
from .protocol import Scenario, WitnessTrace, run_protocol
from .qcore import DensityMatrix, StateFamily, make_state

__version__ = "0.1.0"

__all__ = [
    "ChannelKind",
    "CountResult",
    "DensityMatrix",
    "DoubleViolationSolution",
    "Grid",
    "INFEASIBLE",
    "NoRootError",
    "NoisyChannel",
    "Scenario",
    "ScenarioClass",
    "StateFamily",
    "Strategy",
    "StrategyTag",
    "SweepConfig",
    "WitnessTrace",
    "apply_channel_qubit",
    "closed_trace",
    "closed_witness",
    "count_violating_observers",
    "gamma_sequence",
    "make_state",
    "run_protocol",
    "run_verification",
    "solve_double_violation",
    "sweep",
    "verify_closed_vs_sim",
]
