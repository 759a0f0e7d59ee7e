"""Dicke-state preparation by shuttle-mediated collision sequences."""

from .errors import CapacityError, ConfigError, DickeError, DomainError, ExcitationError, RepresentationError
from .noise import KrausChannel, NoiseConfig, make_channel, run_noisy_trace, run_trajectories
from .optimizer import (
    Box,
    ControlSolution,
    OptimizerConfig,
    lbfgsb_minimize,
    loss,
    multistart_optimize,
    optimize_phases,
    refine_optimize,
    sweep_noise,
)
from .protocol import ProtocolSpec, dicke_state, round_schedule, run_trace, state_after
from .subspace import DensityState, PureState, SubspaceBasis, get_basis

__all__ = [
    "Box",
    "CapacityError",
    "ConfigError",
    "ControlSolution",
    "DensityState",
    "DickeError",
    "DomainError",
    "ExcitationError",
    "KrausChannel",
    "NoiseConfig",
    "OptimizerConfig",
    "ProtocolSpec",
    "PureState",
    "RepresentationError",
    "SubspaceBasis",
    "dicke_state",
    "get_basis",
    "lbfgsb_minimize",
    "loss",
    "make_channel",
    "multistart_optimize",
    "optimize_phases",
    "refine_optimize",
    "round_schedule",
    "run_noisy_trace",
    "run_trace",
    "run_trajectories",
    "state_after",
    "sweep_noise",
]
