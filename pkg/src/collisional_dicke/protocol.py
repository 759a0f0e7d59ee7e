"""Collision schedules, round evolution and fidelity against the Dicke target.

Qubit layout for a target with n qubits and m excitations: shuttles occupy
indices ``0..m-1``, register r the next ``ceil((n-m)/2)`` indices and
register s the remainder. The initial state excites every shuttle.

A round is, by default, the pass of a single shuttle through both registers;
consecutive rounds cycle through the shuttles ``A_1, ..., A_m, A_1, ...``.
With ``round_unit="cycle"`` one round instead comprises the passes of all m
shuttles.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import NamedTuple

import numpy as np

from .collisions import apply_partial_swap, partial_swap_rows
from .errors import DomainError
from .subspace import PureState, SubspaceBasis, get_basis, subspace_dim

INTERLEAVED = "interleaved"
FACTORED = "shuttle-then-intra"
_VARIANT_ALIASES = {
    "interleaved": INTERLEAVED,
    "shuttle-then-intra": FACTORED,
    "factored": FACTORED,
}

SHUTTLE = "shuttle"
INTRA = "intra"

SHUTTLE_PASS = "shuttle"
CYCLE = "cycle"
ROUND_UNITS = (SHUTTLE_PASS, CYCLE)

PHASE = "phase"
MAGNITUDE = "magnitude"
FIDELITY_KINDS = (PHASE, MAGNITUDE)

DOUBLING_MAX_DIM = 96


def normalize_variant(name: str) -> str:
    try:
        return _VARIANT_ALIASES[name]
    except KeyError:
        raise DomainError(f"unknown schedule variant {name!r}") from None


@dataclass(frozen=True)
class ProtocolSpec:
    """Target ``|D_n^(m)>`` together with the register split and schedule order."""

    n: int
    m: int
    schedule_variant: str = INTERLEAVED
    round_unit: str = SHUTTLE_PASS

    def __post_init__(self):
        if not (1 <= self.m < self.n):
            raise DomainError(f"need 1 <= m < n, got n={self.n}, m={self.m}")
        object.__setattr__(self, "schedule_variant", normalize_variant(self.schedule_variant))
        if self.round_unit not in ROUND_UNITS:
            raise DomainError(f"unknown round unit {self.round_unit!r}")

    @property
    def period(self) -> int:
        """Number of distinct consecutive rounds before the sequence repeats."""
        return self.m if self.round_unit == SHUTTLE_PASS else 1

    @property
    def l_r(self) -> int:
        return math.ceil((self.n - self.m) / 2)

    @property
    def l_s(self) -> int:
        return self.n - self.m - self.l_r

    @property
    def shuttles(self) -> list[int]:
        return list(range(self.m))

    @property
    def register_r(self) -> list[int]:
        return list(range(self.m, self.m + self.l_r))

    @property
    def register_s(self) -> list[int]:
        return list(range(self.m + self.l_r, self.n))

    @property
    def basis(self) -> SubspaceBasis:
        return get_basis(self.n, self.m)

    def with_variant(self, variant: str) -> ProtocolSpec:
        return ProtocolSpec(self.n, self.m, variant, self.round_unit)


class Event(NamedTuple):
    qubit_a: int
    qubit_b: int
    kind: str


@dataclass(frozen=True)
class Schedule:
    """Ordered collisions making up one round."""

    events: tuple[Event, ...]

    def __len__(self) -> int:
        return len(self.events)

    def __iter__(self):
        return iter(self.events)

    def to_records(self) -> list[dict]:
        return [
            {"step": i, "kind": e.kind, "qubit_a": e.qubit_a, "qubit_b": e.qubit_b}
            for i, e in enumerate(self.events)
        ]

    def to_json(self, **kwargs) -> str:
        return json.dumps(self.to_records(), **kwargs)

    @classmethod
    def from_json(cls, text: str) -> Schedule:
        rows = sorted(json.loads(text), key=lambda r: r["step"])
        return cls(tuple(Event(int(r["qubit_a"]), int(r["qubit_b"]), r["kind"]) for r in rows))


def _chain(register: list[int]) -> list[Event]:
    return [Event(a, b, INTRA) for a, b in zip(register[:-1], register[1:])]


def _shuttle_pass(spec: ProtocolSpec, shuttle: int) -> list[Event]:
    r_reg, s_reg = spec.register_r, spec.register_s
    chain_r, chain_s = _chain(r_reg), _chain(s_reg)
    events: list[Event] = []
    for k in range(max(len(r_reg), len(s_reg))):
        if k < len(r_reg):
            events.append(Event(shuttle, r_reg[k], SHUTTLE))
            events.extend(chain_r)
        if k < len(s_reg):
            events.append(Event(shuttle, s_reg[k], SHUTTLE))
            events.extend(chain_s)
    return events


@lru_cache(maxsize=None)
def round_schedule(spec: ProtocolSpec, round_index: int = 1) -> Schedule:
    """Collision sequence of round ``round_index`` (1-based).

    Interleaved order for a shuttle pass: visit ``r_k`` then run the
    nearest-neighbour chain of register r, visit ``s_k`` then run the chain of
    register s, for k = 1, 2, ... (steps are skipped once a register is
    exhausted). The shuttle-then-intra variant performs the same collisions
    of the round with every shuttle event first.
    """
    if round_index < 1:
        raise DomainError("rounds are numbered from 1")
    if spec.round_unit == SHUTTLE_PASS:
        events = _shuttle_pass(spec, (round_index - 1) % spec.m)
    else:
        events = [e for a in spec.shuttles for e in _shuttle_pass(spec, a)]
    if spec.schedule_variant == FACTORED:
        events = [e for e in events if e.kind == SHUTTLE] + [e for e in events if e.kind == INTRA]
    return Schedule(tuple(events))


def cycle_schedule(spec: ProtocolSpec) -> Schedule:
    """Concatenated schedules of one period (every shuttle passes once)."""
    return Schedule(tuple(e for r in range(1, spec.period + 1) for e in round_schedule(spec, r)))


def initial_state(spec: ProtocolSpec) -> PureState:
    """All shuttles excited, both registers in the ground state."""
    return PureState.basis_state(spec.basis, (1 << spec.m) - 1)


def _gamma(event: Event, gamma_in: float, gamma_sh: float) -> float:
    return gamma_sh if event.kind == SHUTTLE else gamma_in


def apply_round(
    state: PureState,
    spec: ProtocolSpec,
    gamma_in: float,
    gamma_sh: float,
    round_index: int = 1,
    inplace: bool = False,
) -> PureState:
    """Apply every collision of one round, event by event."""
    if state.basis != spec.basis:
        raise DomainError(f"state lives on {state.basis}, spec needs {spec.basis}")
    out = state if inplace else state.copy()
    for event in round_schedule(spec, round_index):
        apply_partial_swap(out, event.qubit_a, event.qubit_b, _gamma(event, gamma_in, gamma_sh), inplace=True)
    return out


def round_unitary(spec: ProtocolSpec, gamma_in: float, gamma_sh: float, round_index: int = 1) -> np.ndarray:
    """Dense ``dim x dim`` matrix of one round on the excitation sector."""
    basis = spec.basis
    u = np.eye(basis.dim, dtype=complex)
    for event in round_schedule(spec, round_index):
        perm = basis.swap_permutation(event.qubit_a, event.qubit_b)
        u = partial_swap_rows(u, perm, _gamma(event, gamma_in, gamma_sh))
    return u


def round_unitaries(spec: ProtocolSpec, gamma_in: float, gamma_sh: float) -> list[np.ndarray]:
    """One matrix per round of a period; round r uses entry ``(r - 1) % period``."""
    return [round_unitary(spec, gamma_in, gamma_sh, r) for r in range(1, spec.period + 1)]


def evolve_rounds(unitaries, psi0: np.ndarray, rounds: int) -> np.ndarray:
    """Row ``r-1`` holds the state after r rounds, for r = 1..rounds.

    ``unitaries`` is a single round matrix or a list of per-round matrices
    applied cyclically (see :func:`round_unitaries`). With W the product over
    one period, the vectors ``W^k psi0`` are generated by doubling
    (``[V, W^b V]`` with ``W^b`` obtained by squaring), so the work is a few
    matrix-matrix products instead of one matrix-vector product per round.
    Above ``DOUBLING_MAX_DIM`` the squarings cost more than they save and the
    rounds are applied one by one.
    """
    if isinstance(unitaries, np.ndarray) and unitaries.ndim == 2:
        unitaries = [unitaries]
    if rounds < 1:
        raise DomainError("need at least one round")
    period = len(unitaries)
    if psi0.shape[0] > DOUBLING_MAX_DIM:
        out = np.empty((rounds, psi0.shape[0]), dtype=complex)
        np.matmul(unitaries[0], psi0, out=out[0])
        for r in range(1, rounds):
            np.matmul(unitaries[r % period], out[r - 1], out=out[r])
        return out
    # prefix[j] advances a period start by j + 1 rounds
    prefix = [np.asarray(unitaries[0])]
    for u in unitaries[1:]:
        prefix.append(u @ prefix[-1])
    cycles = -(-rounds // period)
    cols = np.asarray(psi0, dtype=complex).reshape(-1, 1)
    power = prefix[-1]
    while cols.shape[1] < cycles:
        cols = np.concatenate([cols, power @ cols], axis=1)
        if cols.shape[1] < cycles:
            power = power @ power
    cols = cols[:, :cycles]
    out = np.empty((cycles, period, cols.shape[0]), dtype=complex)
    for j, p in enumerate(prefix):
        out[:, j, :] = (p @ cols).T
    return out.reshape(cycles * period, -1)[:rounds]


def target_amplitudes(n: int, m: int) -> float:
    """Common amplitude ``1/sqrt(C(n, m))`` of every term of the Dicke target."""
    if not (0 < m < n):
        raise DomainError(f"need 0 < m < n, got n={n}, m={m}")
    return 1.0 / math.sqrt(subspace_dim(n, m))


def dicke_state(n: int, m: int) -> PureState:
    basis = get_basis(n, m)
    return PureState(basis, np.full(basis.dim, 1.0 / math.sqrt(basis.dim), dtype=complex))


def _amps(state) -> np.ndarray:
    return state.amplitudes if isinstance(state, PureState) else np.asarray(state)


def fidelity_phase(state) -> float | np.ndarray:
    """``|<D|psi>|^2`` against the uniform real target.

    Accepts a :class:`PureState` or an array whose last axis holds amplitudes.
    """
    a = _amps(state)
    return np.abs(a.sum(axis=-1)) ** 2 / a.shape[-1]


def fidelity_magnitude(state) -> float | np.ndarray:
    """Overlap after optimally absorbing every relative phase, ``(sum |a_i|)^2 / C``."""
    a = _amps(state)
    return np.abs(a).sum(axis=-1) ** 2 / a.shape[-1]


def fidelity(state, kind: str = PHASE):
    if kind == PHASE:
        return fidelity_phase(state)
    if kind == MAGNITUDE:
        return fidelity_magnitude(state)
    raise DomainError(f"unknown fidelity kind {kind!r}")


@dataclass
class FidelityTrace:
    """Per-round fidelities ``values[r-1]`` for rounds r = 1..R."""

    values: np.ndarray
    kind: str = PHASE
    stderr: np.ndarray | None = None
    best_round: int = field(init=False)
    best_value: float = field(init=False)

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        if self.values.size == 0:
            raise DomainError("a trace needs at least one round")
        if np.isnan(self.values).any():
            raise FloatingPointError("NaN fidelity in trace")
        idx = int(np.argmax(self.values))  # first maximum = smallest round
        self.best_round = idx + 1
        self.best_value = float(self.values[idx])

    @property
    def rounds(self) -> int:
        return int(self.values.size)


def run_trace(
    spec: ProtocolSpec, gamma_in: float, gamma_sh: float, rounds: int, fidelity_kind: str = PHASE
) -> FidelityTrace:
    """Fidelity after each of ``rounds`` rounds of the noiseless protocol."""
    if rounds < 1:
        raise DomainError("need at least one round")
    states = evolve_rounds(round_unitaries(spec, gamma_in, gamma_sh), initial_state(spec).amplitudes, rounds)
    values = np.clip(fidelity(states, fidelity_kind), 0.0, 1.0)
    return FidelityTrace(values, fidelity_kind)


def state_after(spec: ProtocolSpec, gamma_in: float, gamma_sh: float, rounds: int) -> PureState:
    """State after ``rounds`` rounds (``rounds=0`` returns the initial state)."""
    psi = initial_state(spec)
    if rounds == 0:
        return psi
    us = round_unitaries(spec, gamma_in, gamma_sh)
    return PureState(spec.basis, evolve_rounds(us, psi.amplitudes, rounds)[-1])
