"""Imperfect collision dynamics: gate dropout, Kraus channels, trajectories.

Two density-matrix engines are provided.

* A dense reference engine acting on :class:`DensityState` objects, one
  collision or channel at a time (``engine="reference"``).
* A sector-block engine (default). Collisions, gate dropout, dephasing,
  depolarizing and amplitude damping all keep a density matrix that starts
  inside one excitation sector block-diagonal across sectors, so only the
  entries ``rho[x, y]`` with ``popcount(x) == popcount(y)`` are stored. Each
  collision or channel is then a sparse gather-and-combine over that support,
  and for small supports a whole round is folded into one dense transfer
  matrix that is iterated round after round.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .collisions import apply_partial_swap_dm, rz_phase_factors
from .errors import CapacityError, DomainError, RepresentationError
from .protocol import (
    MAGNITUDE,
    PHASE,
    SHUTTLE,
    FidelityTrace,
    evolve_rounds,
    ProtocolSpec,
    round_schedule,
)
from .subspace import FULL, SUBSPACE, DensityState, PureState, get_basis

IDENTITY = "identity"
DEPHASING = "dephasing"
DEPOLARIZING = "depolarizing"
AMPLITUDE_DAMPING = "amplitude_damping"
CHANNEL_LABELS = (IDENTITY, DEPHASING, DEPOLARIZING, AMPLITUDE_DAMPING)

PER_ROUND = "per_round_all_qubits"
PER_COLLISION = "per_collision_participants"
POLICIES = (PER_ROUND, PER_COLLISION)

DENSITY_MATRIX = "density_matrix"
REFERENCE = "reference"
TRAJECTORIES = "trajectories"
ENGINES = (DENSITY_MATRIX, REFERENCE, TRAJECTORIES)

FULL_SPACE_MAX_QUBITS = 12
# largest support folded into a per-round transfer matrix
TRANSFER_MAX_SUPPORT = 700

_I2 = np.eye(2, dtype=complex)
_X = np.array([[0, 1], [1, 0]], dtype=complex)
_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
_Z = np.array([[1, 0], [0, -1]], dtype=complex)


@dataclass(frozen=True)
class KrausChannel:
    """Single-qubit CPTP map ``rho -> sum_k K rho K^dagger``."""

    label: str
    q: float
    operators: tuple[np.ndarray, ...] = field(compare=False)

    @property
    def excitation_preserving(self) -> bool:
        """True when every operator is diagonal in the computational basis."""
        return all(abs(k[0, 1]) == 0 and abs(k[1, 0]) == 0 for k in self.operators)

    def completeness_error(self) -> float:
        total = sum(k.conj().T @ k for k in self.operators)
        return float(np.max(np.abs(total - _I2)))

    def superoperator(self) -> np.ndarray:
        """4x4 matrix ``M[(a', c'), (a, c)] = sum_k K[a', a] conj(K[c', c])``."""
        return sum(np.kron(k, k.conj()) for k in self.operators)


def make_channel(label: str, q: float = 0.0) -> KrausChannel:
    """Kraus set for one of the supported single-qubit noise channels.

    Args:
        label: ``"dephasing"``, ``"depolarizing"``, ``"amplitude_damping"`` or
            ``"identity"``.
        q: decoherence probability in [0, 1] (ignored for identity).
    """
    q = float(q)
    if not 0.0 <= q <= 1.0:
        raise DomainError(f"decoherence probability {q} outside [0, 1]")
    if label == IDENTITY:
        ops = (_I2.copy(),)
    elif label == DEPHASING:
        ops = (math.sqrt(1 - q) * _I2, math.sqrt(q) * _Z)
    elif label == DEPOLARIZING:
        ops = (
            math.sqrt(1 - 3 * q / 4) * _I2,
            math.sqrt(q) * _X / 2,
            math.sqrt(q) * _Y / 2,
            math.sqrt(q) * _Z / 2,
        )
    elif label == AMPLITUDE_DAMPING:
        ops = (
            np.array([[1, 0], [0, math.sqrt(1 - q)]], dtype=complex),
            np.array([[0, math.sqrt(q)], [0, 0]], dtype=complex),
        )
    else:
        raise DomainError(f"unknown channel {label!r}")
    # zero-weight operators carry no information
    ops = tuple(k for k in ops if np.any(k != 0)) or (np.zeros((2, 2), dtype=complex),)
    return KrausChannel(label, q, ops)


def apply_channel(rho: DensityState, qubit: int, channel: KrausChannel) -> DensityState:
    """Apply a single-qubit channel to ``qubit`` of ``rho``.

    Diagonal (excitation-preserving) channels may act on the subspace
    representation; the others need the full 2^n representation.
    """
    n = rho.basis.n
    if not 0 <= qubit < n:
        raise DomainError(f"qubit {qubit} out of range for n={n}")
    sup = channel.superoperator()
    if rho.representation == SUBSPACE:
        if not channel.excitation_preserving:
            raise RepresentationError(
                f"{channel.label} changes the excitation number; lift the state with to_full()"
            )
        b = rho.basis.bits[:, qubit]
        # diagonal channel: rho_xy *= sum_k K[b_x, b_x] conj(K[b_y, b_y])
        factor = sup.reshape(2, 2, 2, 2)[b[:, None], b[None, :], b[:, None], b[None, :]]
        return DensityState(SUBSPACE, rho.matrix * factor, rho.basis)
    lo = 1 << qubit
    hi = 1 << (n - 1 - qubit)
    t = rho.matrix.reshape(hi, 2, lo, hi, 2, lo)
    out = np.einsum("xyac,iajkcl->ixjkyl", sup.reshape(2, 2, 2, 2), t)
    return DensityState(FULL, out.reshape(rho.matrix.shape), rho.basis)


def apply_missing_collision(
    rho: DensityState, qubit_a: int, qubit_b: int, gamma: float, p_miss: float
) -> DensityState:
    """Collision that is skipped with probability ``p_miss``.

    ``(1 - p_miss) U rho U^dagger + p_miss rho``; both branches conserve the
    excitation number so either representation is accepted.
    """
    if not 0.0 <= p_miss <= 1.0:
        raise DomainError(f"p_miss {p_miss} outside [0, 1]")
    hit = apply_partial_swap_dm(rho, qubit_a, qubit_b, gamma)
    return DensityState(rho.representation, (1 - p_miss) * hit.matrix + p_miss * rho.matrix, rho.basis)


@dataclass(frozen=True)
class NoiseConfig:
    """Imperfection model attached to a collision protocol.

    Attributes:
        p_miss: dropout probability of every shuttle collision.
        channel: Kraus channel label, or ``None`` for no decoherence.
        q: decoherence probability of ``channel``.
        policy: when the channel acts. ``per_round_all_qubits`` applies it to
            every qubit after each round; ``per_collision_participants``
            applies it to both participants after each collision.
        engine: ``density_matrix``, ``reference`` or ``trajectories``.
        trajectories: sample count for the trajectory engine.
        seed: base seed; trajectory i uses ``seed + i``.
        drop_intra: let intra-register collisions drop out too.
    """

    p_miss: float = 0.0
    channel: str | None = None
    q: float = 0.0
    policy: str = PER_ROUND
    engine: str = DENSITY_MATRIX
    trajectories: int = 1000
    seed: int = 0
    drop_intra: bool = False

    def __post_init__(self):
        if not 0.0 <= self.p_miss <= 1.0:
            raise DomainError(f"p_miss {self.p_miss} outside [0, 1]")
        if not 0.0 <= self.q <= 1.0:
            raise DomainError(f"q {self.q} outside [0, 1]")
        if self.channel is not None and self.channel not in CHANNEL_LABELS:
            raise DomainError(f"unknown channel {self.channel!r}")
        if self.policy not in POLICIES:
            raise DomainError(f"unknown policy {self.policy!r}")
        if self.engine not in ENGINES:
            raise DomainError(f"unknown engine {self.engine!r}")
        if self.engine == TRAJECTORIES and self.trajectories < 1:
            raise DomainError("need at least one trajectory")

    def kraus(self) -> KrausChannel | None:
        if self.channel is None:
            return None
        return make_channel(self.channel, self.q)

    @property
    def is_noiseless(self) -> bool:
        return self.p_miss == 0 and (self.channel in (None, IDENTITY) or self.q == 0)

    def describe(self) -> str:
        parts = []
        if self.p_miss:
            parts.append(f"pmiss={self.p_miss:g}")
        if self.channel not in (None, IDENTITY):
            parts.append(f"{self.channel}={self.q:g}")
        return ",".join(parts) or "none"

    def with_level(self, axis: str, level: float) -> NoiseConfig:
        """Copy with the strength along ``axis`` (``pmiss`` or a channel) replaced."""
        fields = dict(self.__dict__)
        if axis == "pmiss":
            fields["p_miss"] = level
        else:
            fields["channel"] = axis
            fields["q"] = level
        return NoiseConfig(**fields)


def _sectors_for(spec: ProtocolSpec, noise: NoiseConfig) -> tuple[int, ...]:
    ch = noise.channel
    if ch in (None, IDENTITY, DEPHASING) or noise.q == 0:
        return (spec.m,)
    if ch == AMPLITUDE_DAMPING:
        return tuple(range(spec.m + 1))
    return tuple(range(spec.n + 1))


class SectorEngine:
    """Support and gather tables of a block-diagonal density matrix.

    The support is the union over ``sectors`` of all pairs (x, y) with
    ``popcount(x) == popcount(y) == k``, stored sector after sector in
    row-major order of the subspace ranks. Index ``size`` is a sentinel for
    entries outside the support, which are identically zero.
    """

    def __init__(self, n: int, sectors: tuple[int, ...]):
        self.n = n
        self.sectors = tuple(sorted(sectors))
        self.bases = {k: get_basis(n, k) for k in self.sectors}
        offsets = {}
        rows, cols = [], []
        pos = 0
        for k in self.sectors:
            b = self.bases[k]
            offsets[k] = pos
            rows.append(np.repeat(b.masks, b.dim))
            cols.append(np.tile(b.masks, b.dim))
            pos += b.dim * b.dim
        self.offsets = offsets
        self.size = pos
        self.x = np.concatenate(rows)
        self.y = np.concatenate(cols)
        self._swap: dict = {}
        self._kraus: dict = {}

    def locate(self, x: np.ndarray, y: np.ndarray) -> np.ndarray:
        """Support index of each pair (x, y), or the sentinel ``size``."""
        out = np.full(x.shape, self.size, dtype=np.int64)
        px = _popcount(x)
        py = _popcount(y)
        for k in self.sectors:
            b = self.bases[k]
            sel = (px == k) & (py == k)
            out[sel] = self.offsets[k] + b.index_of(x[sel]) * b.dim + b.index_of(y[sel])
        return out

    def sector_slice(self, k: int) -> slice:
        d = self.bases[k].dim
        return slice(self.offsets[k], self.offsets[k] + d * d)

    def swap_tables(self, a: int, b: int):
        key = (min(a, b), max(a, b))
        tab = self._swap.get(key)
        if tab is None:
            mask = (1 << a) | (1 << b)
            px = self.x ^ (((self.x >> a) ^ (self.x >> b)) & 1) * mask
            py = self.y ^ (((self.y >> a) ^ (self.y >> b)) & 1) * mask
            tab = (self.locate(px, py), self.locate(px, self.y), self.locate(self.x, py))
            self._swap[key] = tab
        return tab

    def kraus_tables(self, j: int):
        tab = self._kraus.get(j)
        if tab is None:
            bx = (self.x >> j) & 1
            by = (self.y >> j) & 1
            code = 2 * bx + by
            clear = ~np.int64(1 << j)
            srcs = []
            for a in (0, 1):
                for c in (0, 1):
                    sx = (self.x & clear) | (a << j)
                    sy = (self.y & clear) | (c << j)
                    srcs.append(self.locate(sx, sy))
            tab = (code, srcs)
            self._kraus[j] = tab
        return tab

    def initial_vector(self, mask: int) -> np.ndarray:
        v = np.zeros(self.size + 1, dtype=complex)
        v[self.locate(np.array([mask]), np.array([mask]))[0]] = 1.0
        return v

    def trace(self, v: np.ndarray) -> complex:
        total = 0j
        for k in self.sectors:
            d = self.bases[k].dim
            total += v[self.sector_slice(k)].reshape(d, d).trace()
        return total

    def block(self, v: np.ndarray, k: int) -> np.ndarray:
        d = self.bases[k].dim
        return v[self.sector_slice(k)].reshape(d, d)


def _popcount(x: np.ndarray) -> np.ndarray:
    x = np.asarray(x, dtype=np.int64)
    count = np.zeros(x.shape, dtype=np.int64)
    while np.any(x):
        count += x & 1
        x = x >> 1
    return count


@lru_cache(maxsize=64)
def _engine(n: int, sectors: tuple[int, ...]) -> SectorEngine:
    return SectorEngine(n, sectors)


def _round_ops(spec: ProtocolSpec, r: int, gamma_in, gamma_sh, noise: NoiseConfig, channel):
    """Operation list of round r: ("swap", a, b, gamma, p) or ("kraus", j, M)."""
    ops = []
    sup = channel.superoperator() if channel is not None else None
    for e in round_schedule(spec, r):
        gamma = gamma_sh if e.kind == SHUTTLE else gamma_in
        droppable = e.kind == SHUTTLE or noise.drop_intra
        ops.append(("swap", e.qubit_a, e.qubit_b, gamma, noise.p_miss if droppable else 0.0))
        if sup is not None and noise.policy == PER_COLLISION:
            ops.append(("kraus", e.qubit_a, sup))
            ops.append(("kraus", e.qubit_b, sup))
    if sup is not None and noise.policy == PER_ROUND:
        ops.extend(("kraus", j, sup) for j in range(spec.n))
    return ops


def _apply_ops(engine: SectorEngine, ops, v: np.ndarray) -> np.ndarray:
    """Apply an operation list to ``v`` (support vector or matrix of columns).

    The last row of ``v`` is the zero sentinel and is preserved.
    """
    for op in ops:
        if op[0] == "swap":
            _, a, b, gamma, p = op
            i_pp, i_p0, i_0p = engine.swap_tables(a, b)
            c, s = math.cos(gamma), math.sin(gamma)
            keep = (1 - p) * c * c + p
            w = 1 - p
            body = keep * v[:-1] + (w * s * s) * v[i_pp] + (1j * w * c * s) * (v[i_p0] - v[i_0p])
        else:
            _, j, sup = op
            code, srcs = engine.kraus_tables(j)
            body = 0
            for col, src in enumerate(srcs):
                coef = sup[:, col][code]
                if not np.any(coef):
                    continue
                if v.ndim == 2:
                    coef = coef[:, None]
                body = body + coef * v[src]
        v = np.concatenate([body, v[-1:]], axis=0)
    return v


def _check_capacity(spec: ProtocolSpec, sectors) -> None:
    if len(sectors) > 1 and spec.n > FULL_SPACE_MAX_QUBITS:
        raise CapacityError(
            f"excitation-changing noise on {spec.n} qubits exceeds the {FULL_SPACE_MAX_QUBITS}-qubit guard"
        )


def _readout_weights(spec: ProtocolSpec, rz_angles, rz_sign: int) -> np.ndarray:
    """Weights w with F = sum_xy w_xy rho_xy over the target sector."""
    basis = spec.basis
    if rz_angles is None:
        f = np.ones(basis.dim, dtype=complex)
    else:
        f = rz_phase_factors(basis, rz_angles, rz_sign)
    return (np.outer(f, f.conj()) / basis.dim).ravel()


def evolve_density(
    spec: ProtocolSpec, gamma_in: float, gamma_sh: float, rounds: int, noise: NoiseConfig
) -> tuple[SectorEngine, np.ndarray]:
    """Support vectors after each round, shape ``(rounds, size + 1)``."""
    if rounds < 1:
        raise DomainError("need at least one round")
    sectors = _sectors_for(spec, noise)
    _check_capacity(spec, sectors)
    engine = _engine(spec.n, sectors)
    channel = noise.kraus()
    if channel is not None and noise.q == 0:
        channel = None
    period = spec.period
    ops = [_round_ops(spec, r, gamma_in, gamma_sh, noise, channel) for r in range(1, period + 1)]
    v = engine.initial_vector((1 << spec.m) - 1)
    if engine.size <= TRANSFER_MAX_SUPPORT:
        eye = np.eye(engine.size + 1, dtype=complex)
        transfer = [_apply_ops(engine, o, eye) for o in ops]
        out = evolve_rounds(transfer, v, rounds)
    else:
        out = np.empty((rounds, engine.size + 1), dtype=complex)
        for r in range(rounds):
            v = _apply_ops(engine, ops[r % period], v)
            out[r] = v
    return engine, out


def _trace_values(spec, engine, vectors, fidelity_kind, rz_angles, rz_sign) -> np.ndarray:
    block = vectors[:, engine.sector_slice(spec.m)]
    if fidelity_kind == PHASE:
        vals = (block @ _readout_weights(spec, rz_angles, rz_sign)).real
    elif fidelity_kind == MAGNITUDE:
        # phase-insensitive surrogate; equals the magnitude fidelity on pure states
        vals = np.abs(block).sum(axis=1) / spec.basis.dim
    else:
        raise DomainError(f"unknown fidelity kind {fidelity_kind!r}")
    return np.clip(vals, 0.0, 1.0)


def run_noisy_trace(
    spec: ProtocolSpec,
    gamma_in: float,
    gamma_sh: float,
    rounds: int,
    noise: NoiseConfig,
    fidelity_kind: str = PHASE,
    rz_angles=None,
    rz_sign: int = -1,
) -> FidelityTrace:
    """Per-round fidelity of the noisy protocol with the Dicke target.

    The phase fidelity is ``<D| R rho R^dagger |D>`` where R is the optional
    readout rotation given by ``rz_angles``. The magnitude kind returns
    ``sum_xy |rho_xy| / C`` over the target sector, which coincides with the
    phase-insensitive fidelity for pure states.
    """
    if noise.engine == TRAJECTORIES:
        if noise.channel not in (None, IDENTITY) and noise.q > 0:
            raise DomainError("the trajectory engine only unravels gate dropout")
        return run_trajectories(
            spec, gamma_in, gamma_sh, rounds, noise.p_miss, noise.trajectories, noise.seed,
            drop_intra=noise.drop_intra, rz_angles=rz_angles, rz_sign=rz_sign,
        )
    if noise.engine == REFERENCE:
        return run_noisy_trace_reference(
            spec, gamma_in, gamma_sh, rounds, noise, fidelity_kind, rz_angles, rz_sign
        )
    engine, vectors = evolve_density(spec, gamma_in, gamma_sh, rounds, noise)
    vals = _trace_values(spec, engine, vectors, fidelity_kind, rz_angles, rz_sign)
    return FidelityTrace(vals, fidelity_kind)


def noisy_block_after(
    spec: ProtocolSpec, gamma_in: float, gamma_sh: float, rounds: int, noise: NoiseConfig
) -> np.ndarray:
    """Target-sector block of rho after ``rounds`` rounds (trace may be < 1)."""
    engine, vectors = evolve_density(spec, gamma_in, gamma_sh, rounds, noise)
    return engine.block(vectors[-1], spec.m).copy()


def density_trace_norms(spec, gamma_in, gamma_sh, rounds, noise) -> np.ndarray:
    """Total trace of rho after each round (all stored sectors)."""
    engine, vectors = evolve_density(spec, gamma_in, gamma_sh, rounds, noise)
    diag = np.concatenate(
        [engine.offsets[k] + np.arange(engine.bases[k].dim) * (engine.bases[k].dim + 1) for k in engine.sectors]
    )
    return vectors[:, diag].sum(axis=1)


def run_noisy_trace_reference(
    spec: ProtocolSpec,
    gamma_in: float,
    gamma_sh: float,
    rounds: int,
    noise: NoiseConfig,
    fidelity_kind: str = PHASE,
    rz_angles=None,
    rz_sign: int = -1,
    check: bool = False,
) -> FidelityTrace:
    """Step-by-step dense evolution of a :class:`DensityState`.

    Uses the subspace representation for excitation-preserving noise and the
    full 2^n representation otherwise. ``check`` asserts trace, Hermiticity
    and positivity after every round.
    """
    channel = noise.kraus()
    if channel is not None and noise.q == 0:
        channel = None
    psi0 = PureState.basis_state(spec.basis, (1 << spec.m) - 1)
    if channel is None or channel.excitation_preserving:
        rho = DensityState.from_pure(psi0, SUBSPACE)
    else:
        if spec.n > FULL_SPACE_MAX_QUBITS:
            raise CapacityError(f"full-space density matrix of {spec.n} qubits exceeds the guard")
        rho = DensityState.from_pure(psi0, FULL)
    masks = spec.basis.masks
    w = _readout_weights(spec, rz_angles, rz_sign).reshape(spec.basis.dim, spec.basis.dim)
    values = np.empty(rounds)
    for r in range(rounds):
        for e in round_schedule(spec, r % spec.period + 1):
            gamma = gamma_sh if e.kind == SHUTTLE else gamma_in
            p = noise.p_miss if (e.kind == SHUTTLE or noise.drop_intra) else 0.0
            rho = apply_missing_collision(rho, e.qubit_a, e.qubit_b, gamma, p)
            if channel is not None and noise.policy == PER_COLLISION:
                rho = apply_channel(rho, e.qubit_a, channel)
                rho = apply_channel(rho, e.qubit_b, channel)
        if channel is not None and noise.policy == PER_ROUND:
            for j in range(spec.n):
                rho = apply_channel(rho, j, channel)
        if check:
            rho.check()
        block = rho.matrix if rho.representation == SUBSPACE else rho.matrix[np.ix_(masks, masks)]
        if fidelity_kind == PHASE:
            values[r] = float(np.sum(w * block).real)
        else:
            values[r] = float(np.abs(block).sum() / spec.basis.dim)
    return FidelityTrace(np.clip(values, 0.0, 1.0), fidelity_kind)


def run_trajectories(
    spec: ProtocolSpec,
    gamma_in: float,
    gamma_sh: float,
    rounds: int,
    p_miss: float,
    count: int,
    seed: int = 0,
    drop_intra: bool = False,
    rz_angles=None,
    rz_sign: int = -1,
) -> FidelityTrace:
    """Monte-Carlo unravelling of gate dropout into pure-state trajectories.

    Trajectory i draws its dropout coins from ``default_rng(seed + i)``, so
    results do not depend on how trajectories are batched. The returned trace
    holds the sample mean of the (optionally Rz-rotated) phase fidelity and
    its standard error ``std / sqrt(count)``.
    """
    if count < 1:
        raise DomainError("need at least one trajectory")
    if not 0.0 <= p_miss <= 1.0:
        raise DomainError(f"p_miss {p_miss} outside [0, 1]")
    if rounds < 1:
        raise DomainError("need at least one round")
    basis = spec.basis
    period = spec.period
    schedules = [round_schedule(spec, r) for r in range(1, period + 1)]
    drops = [[e.kind == SHUTTLE or drop_intra for e in s] for s in schedules]
    per_round = [sum(d) for d in drops]
    # coins laid out round after round, in schedule order
    coin_counts = [per_round[r % period] for r in range(rounds)]
    total = sum(coin_counts)
    miss = np.empty((count, total), dtype=bool)
    for i in range(count):
        miss[i] = np.random.default_rng(seed + i).random(total) < p_miss
    f = np.ones(basis.dim, dtype=complex) if rz_angles is None else rz_phase_factors(basis, rz_angles, rz_sign)
    psi = np.zeros((count, basis.dim), dtype=complex)
    psi[:, 0] = 1.0
    values = np.empty((rounds, count))
    k = 0
    for r in range(rounds):
        sched = schedules[r % period]
        for e, droppable in zip(sched, drops[r % period]):
            perm = basis.swap_permutation(e.qubit_a, e.qubit_b)
            gamma = gamma_sh if e.kind == SHUTTLE else gamma_in
            new = math.cos(gamma) * psi + 1j * math.sin(gamma) * psi[:, perm]
            if droppable:
                hit = ~miss[:, k]
                psi = np.where(hit[:, None], new, psi)
                k += 1
            else:
                psi = new
        values[r] = np.abs(psi @ f) ** 2 / basis.dim
    mean = np.clip(values.mean(axis=1), 0.0, 1.0)
    if count > 1:
        stderr = values.std(axis=1, ddof=1) / math.sqrt(count)
    else:
        stderr = np.zeros(rounds)
    return FidelityTrace(mean, PHASE, stderr=stderr)


SWEEP_COLUMNS = ("n", "m", "channel", "q_or_pmiss", "gamma_in", "gamma_sh", "best_round", "fidelity", "stderr")


def write_sweep_csv(rows, path, extra_columns: tuple[str, ...] = ()) -> None:
    """Write sweep rows (mappings) with the standard column order."""
    columns = SWEEP_COLUMNS + tuple(extra_columns)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.DictWriter(fh, fieldnames=columns, lineterminator="\n", extrasaction="ignore")
        writer.writeheader()
        for row in rows:
            writer.writerow({k: _fmt(row.get(k, "")) for k in columns})


def _fmt(value):
    if isinstance(value, float):
        return f"{value:.12g}"
    return value
