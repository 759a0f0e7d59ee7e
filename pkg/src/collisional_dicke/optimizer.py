"""Controller synthesis: min-over-rounds loss, projected L-BFGS, multistart.

Stage one searches the collision strengths ``(gamma_in, gamma_sh)`` for the
smallest value of ``min_r (1 - F_r)`` over ``r = 1..R_max``, starting a
bound-constrained local search from every point of a uniform grid. Stage two
fixes the best round and aligns the relative phases with one Rz rotation per
qubit.
"""

from __future__ import annotations

import math
import os
from collections import deque
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Callable, NamedTuple

import numpy as np

from .collisions import rz_phase_factors
from .errors import ConfigError, DomainError
from .noise import NoiseConfig, evolve_density, noisy_block_after, run_noisy_trace
from .protocol import (
    FIDELITY_KINDS,
    MAGNITUDE,
    ProtocolSpec,
    evolve_rounds,
    fidelity,
    initial_state,
    round_unitaries,
    state_after,
)

WORKERS_ENV = "DICKE_WORKERS"
SHORT_CIRCUIT = 1e-12


@dataclass(frozen=True)
class Box:
    """Per-coordinate bounds ``lo <= x <= hi``.

    The default is the collision-strength box, coordinates ordered
    ``(gamma_in, gamma_sh)``; ``gamma_sh`` stays away from zero because a
    vanishing shuttle coupling never moves an excitation into the registers.
    """

    lo: tuple[float, ...] = (0.0, 0.01)
    hi: tuple[float, ...] = (math.pi, math.pi)

    def __post_init__(self):
        lo = tuple(float(v) for v in self.lo)
        hi = tuple(float(v) for v in self.hi)
        if len(lo) != len(hi) or not lo:
            raise DomainError("lo and hi need the same non-zero length")
        if any(not a < b for a, b in zip(lo, hi)):
            raise DomainError(f"need lo < hi per coordinate, got {lo} and {hi}")
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)

    @classmethod
    def cube(cls, dim: int, lo: float, hi: float) -> Box:
        return cls((lo,) * dim, (hi,) * dim)

    @property
    def dim(self) -> int:
        return len(self.lo)

    def clip(self, x) -> np.ndarray:
        return np.clip(np.asarray(x, dtype=float), self.lo, self.hi)

    def contains(self, x) -> bool:
        x = np.asarray(x, dtype=float)
        return bool(np.all(x >= self.lo) and np.all(x <= self.hi))


def _default_workers() -> int:
    value = os.environ.get(WORKERS_ENV, "1")
    try:
        return max(1, int(value))
    except ValueError:
        raise ConfigError(f"{WORKERS_ENV}={value!r} is not an integer") from None


@dataclass(frozen=True)
class OptimizerConfig:
    """Settings of the two-stage controller search.

    Attributes:
        grid_spacing: spacing of the multistart grid in radians.
        rounds_max: rounds simulated per loss evaluation; ``None`` means
            ``200 * m``.
        maxiter: local-solver iteration cap.
        ftol: relative objective decrease that stops the local solver.
        pgtol: projected-gradient tolerance of the local solver.
        fd_step: finite-difference step in radians.
        memory_pairs: number of stored curvature pairs.
        workers: parallel processes; ``None`` reads ``DICKE_WORKERS``.
        fidelity_kind: ``magnitude`` (default) or ``phase`` loss.
        jitter: extra seeded starts per grid point (0 disables).
        seed: base seed for jittered starts and phase-alignment starts.
        phase_starts: random starts of the phase alignment besides zero.
        align_candidates: number of distinct stage-one optima that get a
            phase alignment; the best aligned one becomes the solution.
        align_rounds: rounds per candidate that get a phase alignment, the
            incumbent round plus the next best by stage-one fidelity.
        box: collision-strength bounds.
    """

    grid_spacing: float = 0.2
    rounds_max: int | None = None
    maxiter: int = 100
    ftol: float = 1e-6
    pgtol: float = 1e-10
    fd_step: float = 1e-4
    memory_pairs: int = 10
    workers: int | None = None
    fidelity_kind: str = MAGNITUDE
    jitter: int = 0
    seed: int = 0
    phase_starts: int = 2
    align_candidates: int = 256
    align_rounds: int = 16
    box: Box = field(default_factory=Box)

    def __post_init__(self):
        if not self.grid_spacing > 0:
            raise ConfigError("grid_spacing must be positive")
        if self.rounds_max is not None and self.rounds_max < 1:
            raise ConfigError("rounds_max must be at least 1")
        if not self.ftol > 0:
            raise ConfigError("ftol must be positive")
        if self.maxiter < 0 or self.memory_pairs < 1 or not self.fd_step > 0:
            raise ConfigError("maxiter >= 0, memory_pairs >= 1 and fd_step > 0 required")
        if self.fidelity_kind not in FIDELITY_KINDS:
            raise ConfigError(f"unknown fidelity kind {self.fidelity_kind!r}")
        if self.jitter < 0 or self.phase_starts < 0:
            raise ConfigError("jitter and phase_starts must be non-negative")
        if self.align_candidates < 1 or self.align_rounds < 1:
            raise ConfigError("align_candidates and align_rounds must be at least 1")
        if self.workers is not None and self.workers < 1:
            raise ConfigError("workers must be at least 1")

    def resolved_rounds(self, spec: ProtocolSpec) -> int:
        return self.rounds_max if self.rounds_max is not None else 200 * spec.m

    def resolved_workers(self) -> int:
        return self.workers if self.workers is not None else _default_workers()


@dataclass(frozen=True)
class ControlSolution:
    """Synthesized controller.

    ``history`` holds the incumbent loss after each completed start and is
    excluded from equality.
    """

    gamma_in: float
    gamma_sh: float
    best_round: int
    loss: float
    rz_angles: tuple[float, ...] | None = None
    fidelity_phase_aligned: float | None = None
    starts: int = 0
    history: tuple[float, ...] = field(default=(), compare=False, repr=False)

    @property
    def gammas(self) -> tuple[float, float]:
        return (self.gamma_in, self.gamma_sh)


class LocalResult(NamedTuple):
    x: np.ndarray
    fun: float
    nit: int
    reason: str
    nfev: int


# ---------------------------------------------------------------- loss


def _min_loss(values: np.ndarray) -> tuple[float, int]:
    """Smallest ``1 - F_r`` and its earliest round.

    Rounds after the first one with ``1 - F_r < SHORT_CIRCUIT`` are ignored.
    """
    if np.isnan(values).any():
        raise FloatingPointError("NaN fidelity in loss evaluation")
    losses = 1.0 - np.clip(values, 0.0, 1.0)
    hit = np.flatnonzero(losses < SHORT_CIRCUIT)
    if hit.size:
        losses = losses[: hit[0] + 1]
    idx = int(np.argmin(losses))
    return float(losses[idx]), idx + 1


class LossFunction:
    """Picklable ``x = (gamma_in, gamma_sh) -> min_r (1 - F_r)``."""

    def __init__(self, spec: ProtocolSpec, config: OptimizerConfig, noise: NoiseConfig | None = None):
        self.spec = spec
        self.config = config
        self.noise = None if noise is None or noise.is_noiseless else noise
        self.rounds = config.resolved_rounds(spec)
        self.nfev = 0

    def evaluate(self, x) -> tuple[float, int]:
        """Loss and earliest round achieving it, with x clamped to the box."""
        gin, gsh = (float(v) for v in self.config.box.clip(x))
        self.nfev += 1
        if self.noise is not None:
            trace = run_noisy_trace(self.spec, gin, gsh, self.rounds, self.noise, self.config.fidelity_kind)
            return _min_loss(trace.values)
        return self._noiseless(gin, gsh)

    def _noiseless(self, gin: float, gsh: float) -> tuple[float, int]:
        states = evolve_rounds(round_unitaries(self.spec, gin, gsh), initial_state(self.spec).amplitudes, self.rounds)
        return _min_loss(fidelity(states, self.config.fidelity_kind))

    def __call__(self, x) -> float:
        return self.evaluate(x)[0]


def loss(
    gamma_in: float,
    gamma_sh: float,
    spec: ProtocolSpec,
    config: OptimizerConfig | None = None,
    noise: NoiseConfig | None = None,
) -> tuple[float, int]:
    """``min_{1 <= r <= R} (1 - F_r)`` and the earliest round attaining it."""
    return LossFunction(spec, config or OptimizerConfig(), noise).evaluate((gamma_in, gamma_sh))


# ---------------------------------------------------------------- local solver


def finite_diff_gradient(
    f: Callable, x, fd_step: float = 1e-4, box: Box | None = None, fx: float | None = None
) -> np.ndarray:
    """Central differences, falling back to one-sided ones next to a bound."""
    x = np.asarray(x, dtype=float)
    h = float(fd_step)
    grad = np.empty_like(x)
    for i in range(x.size):
        up = x.copy()
        dn = x.copy()
        up[i] += h
        dn[i] -= h
        up_ok = box is None or up[i] <= box.hi[i]
        dn_ok = box is None or dn[i] >= box.lo[i]
        if up_ok and dn_ok:
            grad[i] = (f(up) - f(dn)) / (2 * h)
        else:
            f0 = f(x) if fx is None else fx
            grad[i] = (f(up) - f0) / h if up_ok else (f0 - f(dn)) / h
    return grad


def _two_loop(g: np.ndarray, pairs) -> np.ndarray:
    q = g.copy()
    alphas = []
    for s, y, rho in reversed(pairs):
        a = rho * (s @ q)
        alphas.append(a)
        q -= a * y
    if pairs:
        s, y, _ = pairs[-1]
        q *= (s @ y) / (y @ y)
    for (s, y, rho), a in zip(pairs, reversed(alphas)):
        b = rho * (y @ q)
        q += (a - b) * s
    return q


def lbfgsb_minimize(
    f: Callable,
    x0,
    box: Box,
    config: OptimizerConfig | None = None,
    grad: Callable | None = None,
    max_linesearch: int = 30,
) -> LocalResult:
    """Projected limited-memory BFGS with Armijo backtracking.

    Trial points are clipped to ``box``. Coordinates sitting on a bound with
    the gradient pushing outward are frozen for the step. Stops on the
    iteration cap, on a relative decrease below ``ftol``, on a projected
    gradient below ``pgtol`` or when the line search fails.

    Args:
        f: objective.
        x0: start point, clipped into the box.
        box: bounds.
        config: supplies ``maxiter``, ``ftol``, ``pgtol``, ``fd_step`` and
            ``memory_pairs``.
        grad: analytic gradient; finite differences are used when omitted.
        max_linesearch: backtracking halvings before giving up.

    Returns:
        The best point visited with its value, the iteration count, the
        termination reason and the number of objective evaluations.
    """
    cfg = config or OptimizerConfig()
    lo, hi = np.asarray(box.lo), np.asarray(box.hi)
    nfev = 0

    def fun(z):
        nonlocal nfev
        nfev += 1
        return float(f(z))

    x = box.clip(x0)
    fx = fun(x)
    if not math.isfinite(fx):
        raise FloatingPointError(f"objective is not finite at the start point {x}")

    def gradient(z, fz):
        if grad is not None:
            return np.asarray(grad(z), dtype=float)
        return finite_diff_gradient(fun, z, cfg.fd_step, box, fz)

    g = gradient(x, fx)
    pairs: deque = deque(maxlen=cfg.memory_pairs)
    reason = "maxiter"
    nit = 0
    for nit in range(1, cfg.maxiter + 1):
        pg = np.clip(x - g, lo, hi) - x
        if np.max(np.abs(pg)) < cfg.pgtol:
            reason = "pgtol"
            nit -= 1
            break
        free = ~(((x <= lo) & (g > 0)) | ((x >= hi) & (g < 0)))
        d = -_two_loop(np.where(free, g, 0.0), pairs) * free
        if not g @ d < 0:
            pairs.clear()
            d = -g * free
        t = 1.0 if pairs else min(1.0, 1.0 / max(np.max(np.abs(d)), 1e-300))
        accepted = False
        for _ in range(max_linesearch):
            xt = np.clip(x + t * d, lo, hi)
            step = xt - x
            slope = g @ step
            if not np.any(step) or slope >= 0:
                if pairs and not accepted:
                    # curvature information led off the feasible descent cone
                    pairs.clear()
                    d = -g * free
                    t = min(1.0, 1.0 / max(np.max(np.abs(d)), 1e-300))
                    continue
                break
            ft = fun(xt)
            if math.isfinite(ft) and ft <= fx + 1e-4 * slope:
                accepted = True
                break
            t *= 0.5
        if not accepted:
            reason = "linesearch"
            nit -= 1
            break
        gt = gradient(xt, ft)
        s, y = xt - x, gt - g
        sy = s @ y
        if sy > 1e-10 * (y @ y):
            pairs.append((s, y, 1.0 / sy))
        decrease = fx - ft
        scale = max(abs(fx), abs(ft), 1.0)
        x, fx, g = xt, ft, gt
        if decrease <= cfg.ftol * scale:
            reason = "ftol"
            break
    return LocalResult(x, fx, nit, reason, nfev)


# ---------------------------------------------------------------- multistart


def grid_axis(lo: float, hi: float, spacing: float) -> np.ndarray:
    """Points ``lo + k * spacing`` inside ``[lo, hi]``."""
    count = int(math.floor((hi - lo) / spacing + 1e-9)) + 1
    return np.minimum(lo + spacing * np.arange(count), hi)


def grid_points(box: Box, spacing: float) -> np.ndarray:
    """Multistart grid, ``gamma_in`` major, shape ``(k, 2)``."""
    if any(spacing > h - l for l, h in zip(box.lo, box.hi)):
        raise ConfigError(f"grid spacing {spacing} exceeds the box width")
    axes = [grid_axis(l, h, spacing) for l, h in zip(box.lo, box.hi)]
    mesh = np.meshgrid(*axes, indexing="ij")
    return np.stack([m.ravel() for m in mesh], axis=1)


def start_points(config: OptimizerConfig, seeds=()) -> np.ndarray:
    """Grid points, then seeded jitter around each, then explicit seeds."""
    box = config.box
    grid = grid_points(box, config.grid_spacing)
    parts = [grid]
    if config.jitter:
        rng = np.random.default_rng(config.seed)
        half = config.grid_spacing / 2
        noise = rng.uniform(-half, half, size=(grid.shape[0], config.jitter, 2))
        parts.append(box.clip((grid[:, None, :] + noise).reshape(-1, 2)))
    if len(seeds):
        parts.append(box.clip(np.asarray(seeds, dtype=float).reshape(-1, 2)))
    return np.concatenate(parts)


class StartResult(NamedTuple):
    x0: tuple[float, float]
    x: tuple[float, float]
    loss: float
    best_round: int
    nit: int
    reason: str


_WORKER_LOSS: LossFunction | None = None


def _init_worker(spec, config, noise):
    global _WORKER_LOSS
    _WORKER_LOSS = LossFunction(spec, config, noise)


def _run_start(x0) -> StartResult:
    lf = _WORKER_LOSS
    res = lbfgsb_minimize(lf, x0, lf.config.box, lf.config)
    value, best_round = lf.evaluate(res.x)
    x = lf.config.box.clip(res.x)
    return StartResult(tuple(map(float, x0)), (float(x[0]), float(x[1])), value, best_round, res.nit, res.reason)


def _key(r: StartResult):
    return (r.loss, r.best_round, r.x[0], r.x[1])


def run_starts(spec, config, noise, starts: np.ndarray) -> list[StartResult]:
    """Local searches from every start, in start order."""
    workers = min(config.resolved_workers(), len(starts))
    if workers <= 1:
        _init_worker(spec, config, noise)
        return [_run_start(x0) for x0 in starts]
    chunk = max(1, len(starts) // (4 * workers))
    with ProcessPoolExecutor(workers, initializer=_init_worker, initargs=(spec, config, noise)) as pool:
        return list(pool.map(_run_start, list(starts), chunksize=chunk))


def _candidates(results: list[StartResult], count: int) -> list[StartResult]:
    """Best ``count`` results with distinct (rounded) controllers."""
    chosen, seen = [], set()
    for r in sorted(results, key=_key):
        tag = (round(r.x[0], 6), round(r.x[1], 6), r.best_round)
        if tag in seen:
            continue
        seen.add(tag)
        chosen.append(r)
        if len(chosen) == count:
            break
    return chosen


def multistart_optimize(
    spec: ProtocolSpec,
    config: OptimizerConfig | None = None,
    noise: NoiseConfig | None = None,
    seeds=(),
    align: bool = True,
) -> ControlSolution:
    """Grid multistart of the local solver followed by phase alignment.

    Args:
        spec: target and schedule.
        config: optimizer settings.
        noise: optional imperfection model; the loss is then evaluated
            within the noisy dynamics.
        seeds: extra ``(gamma_in, gamma_sh)`` starts, e.g. a coarser
            incumbent.
        align: run the Rz phase alignment on the best candidates.

    Returns:
        Without alignment, the incumbent under the tie-break (smaller loss,
        earlier round, lexicographically smaller strengths). With alignment,
        the best phase-aligned controller among the ``align_candidates``
        best distinct local optima, each tried at ``align_rounds`` rounds.
    """
    config = config or OptimizerConfig()
    starts = start_points(config, seeds)
    results = run_starts(spec, config, noise, starts)
    history = []
    best = None
    for r in results:
        if best is None or _key(r) < _key(best):
            best = r
        history.append(best.loss)
    base = ControlSolution(best.x[0], best.x[1], best.best_round, best.loss, starts=len(starts), history=tuple(history))
    if not align:
        return base
    return align_candidates(spec, _candidates(results, config.align_candidates), config, noise, base)


def refine_optimize(spec: ProtocolSpec, coarse: ControlSolution, config: OptimizerConfig, noise=None) -> ControlSolution:
    """Finer-grid multistart seeded with a coarser incumbent."""
    return multistart_optimize(spec, config, noise, seeds=[coarse.gammas])


# ---------------------------------------------------------------- phase alignment


def aligned_fidelity(block: np.ndarray, basis, thetas, sign: int = -1) -> float:
    """``<D| R rho R^dagger |D>`` for a sector block or amplitude vector."""
    f = rz_phase_factors(basis, thetas, sign)
    if block.ndim == 1:
        return float(abs(f @ block) ** 2 / basis.dim)
    return float((f @ block @ f.conj()).real / basis.dim)


def _phase_objective(block: np.ndarray, basis, sign: int):
    bits = basis.bits.astype(float)
    dim = basis.dim
    pure = block.ndim == 1

    def value_and_grad(theta):
        f = np.exp(sign * 1j * (bits @ theta))
        if pure:
            fa = f * block
            z = fa.sum()
            val = abs(z) ** 2 / dim
            grad = 2 * (np.conj(z) * (sign * 1j) * (bits.T @ fa)).real / dim
        else:
            left = f * (block @ f.conj())  # f_x sum_y rho_xy conj(f_y)
            val = left.sum().real / dim
            # d/dtheta_j of f_x rho_xy conj(f_y) = i s (b_xj - b_yj) (...)
            grad = 2 * ((sign * 1j) * (bits.T @ left)).real / dim
        return -val, -grad

    return value_and_grad


def optimize_phases_block(
    block: np.ndarray, basis, config: OptimizerConfig | None = None, sign: int = -1
) -> tuple[np.ndarray, float]:
    """Maximize the aligned fidelity of a state vector or sector block over Rz angles."""
    cfg = config or OptimizerConfig()
    n = basis.n
    box = Box.cube(n, -math.pi, math.pi)
    obj = _phase_objective(np.asarray(block, dtype=complex), basis, sign)
    cache: dict = {}

    def f(theta):
        key = theta.tobytes()
        if key not in cache:
            cache.clear()
            cache[key] = obj(theta)
        return cache[key][0]

    def g(theta):
        f(theta)
        return cache[theta.tobytes()][1]

    local_cfg = replace(cfg, ftol=min(cfg.ftol, 1e-12), maxiter=max(cfg.maxiter, 200))
    rng = np.random.default_rng(cfg.seed)
    inits = [np.zeros(n)] + [rng.uniform(-math.pi, math.pi, n) for _ in range(cfg.phase_starts)]
    best_x, best_f = None, math.inf
    for x0 in inits:
        res = lbfgsb_minimize(f, x0, box, local_cfg, grad=g)
        if res.fun < best_f:
            best_x, best_f = res.x, res.fun
    fid = min(max(-best_f, 0.0), 1.0)
    return best_x, fid


def optimize_phases(
    spec: ProtocolSpec,
    gamma_in: float,
    gamma_sh: float,
    r_star: int,
    config: OptimizerConfig | None = None,
    sign: int = -1,
) -> tuple[np.ndarray, float]:
    """Rz angles on ``[-pi, pi]^n`` maximizing the phase fidelity at round ``r_star``.

    Multi-start from zero plus ``config.phase_starts`` seeded random points,
    with the analytic gradient of the aligned fidelity. The zero start
    guarantees the result is never below the unaligned phase fidelity.
    """
    psi = state_after(spec, gamma_in, gamma_sh, r_star)
    return optimize_phases_block(psi.amplitudes, spec.basis, config, sign)


def align_controller(spec, gamma_in, gamma_sh, r_star, config, noise=None, sign: int = -1):
    """Phase alignment of the pure or noisy state at ``r_star``."""
    if noise is None or noise.is_noiseless:
        return optimize_phases(spec, gamma_in, gamma_sh, r_star, config, sign)
    block = noisy_block_after(spec, gamma_in, gamma_sh, r_star, noise)
    return optimize_phases_block(block, spec.basis, config, sign)


def _trace_states(spec, gammas, config, noise):
    """Stage-one fidelity per round and a getter for the state at a round."""
    rounds = config.resolved_rounds(spec)
    if noise is None or noise.is_noiseless:
        states = evolve_rounds(round_unitaries(spec, *gammas), initial_state(spec).amplitudes, rounds)
        values = fidelity(states, config.fidelity_kind)
        return values, lambda r: states[r - 1]
    engine, vectors = evolve_density(spec, gammas[0], gammas[1], rounds, noise)
    block = vectors[:, engine.sector_slice(spec.m)]
    if config.fidelity_kind == MAGNITUDE:
        values = np.abs(block).sum(axis=1) / spec.basis.dim
    else:
        values = block.sum(axis=1).real / spec.basis.dim
    return values, lambda r: engine.block(vectors[r - 1], spec.m)


def _align_rounds(values: np.ndarray, best_round: int, count: int) -> list[int]:
    order = np.argsort(-values, kind="stable") + 1
    picked = [best_round]
    for r in order:
        if len(picked) >= count:
            break
        if int(r) != best_round:
            picked.append(int(r))
    return picked


def align_candidates(spec, candidates, config, noise=None, base: ControlSolution | None = None, sign: int = -1):
    """Phase-align every candidate at its best rounds; keep the best aligned one.

    Ties go to the better stage-one key, then to the earlier round.
    """
    best = None
    for c in candidates:
        values, state_at = _trace_states(spec, c.x, config, noise)
        for r in _align_rounds(values, c.best_round, config.align_rounds):
            angles, fid = optimize_phases_block(state_at(r), spec.basis, config, sign)
            key = (-fid, _key(c), r)
            if best is None or key < best[0]:
                value = float(min(max(1.0 - values[r - 1], 0.0), 1.0))
                best = (key, c, r, value, angles, fid)
    _, c, r, value, angles, fid = best
    base = base or ControlSolution(c.x[0], c.x[1], c.best_round, c.loss)
    return replace(
        base,
        gamma_in=c.x[0],
        gamma_sh=c.x[1],
        best_round=r,
        loss=value,
        rz_angles=tuple(float(a) for a in angles),
        fidelity_phase_aligned=fid,
    )


# ---------------------------------------------------------------- sweeps


@dataclass(frozen=True)
class SweepEntry:
    """One noise level: re-optimized controller and frozen noiseless baseline."""

    axis: str
    level: float
    noise: NoiseConfig
    solution: ControlSolution
    baseline: ControlSolution


def evaluate_frozen(spec, reference: ControlSolution, config: OptimizerConfig, noise: NoiseConfig) -> ControlSolution:
    """Noiseless-optimal strengths under ``noise``, with the same phase alignment."""
    value, best_round = loss(reference.gamma_in, reference.gamma_sh, spec, config, noise)
    frozen = StartResult(reference.gammas, reference.gammas, value, best_round, 0, "frozen")
    return align_candidates(spec, [frozen], config, noise)


def sweep_noise(
    spec: ProtocolSpec,
    config: OptimizerConfig,
    axis: str,
    levels,
    base_noise: NoiseConfig | None = None,
    reference: ControlSolution | None = None,
) -> list[SweepEntry]:
    """Re-optimize the controller within the noisy dynamics at each level.

    Every noisy multistart is additionally seeded with the noiseless
    incumbent ``reference`` (computed when omitted), so the re-optimized
    controller is never worse than the frozen one under the loss. A zero
    level reproduces the noiseless multistart.

    Args:
        spec: target and schedule.
        config: optimizer settings shared by all levels.
        axis: ``pmiss`` or a channel label.
        levels: strengths in [0, 1].
        base_noise: other noise settings (policy, engine, fixed dropout).
        reference: noiseless solution used as seed and frozen baseline.
    """
    base_noise = base_noise or NoiseConfig()
    if reference is None:
        reference = multistart_optimize(spec, config)
    out = []
    for level in levels:
        level = float(level)
        if not 0.0 <= level <= 1.0:
            raise DomainError(f"noise level {level} outside [0, 1]")
        noise = base_noise.with_level(axis, level)
        if noise.is_noiseless:
            solution = reference
            baseline = reference
        else:
            baseline = evaluate_frozen(spec, reference, config, noise)
            solution = multistart_optimize(spec, config, noise, seeds=[reference.gammas])
            if solution.fidelity_phase_aligned < baseline.fidelity_phase_aligned:
                # the frozen controller is itself a feasible candidate
                solution = replace(baseline, starts=solution.starts, history=solution.history)
        out.append(SweepEntry(axis, level, noise, solution, baseline))
    return out


def landscape(spec: ProtocolSpec, config: OptimizerConfig, noise: NoiseConfig | None = None) -> list[dict]:
    """Loss and best round on every grid point, without local refinement."""
    lf = LossFunction(spec, config, noise)
    rows = []
    for gin, gsh in grid_points(config.box, config.grid_spacing):
        value, best_round = lf.evaluate((gin, gsh))
        rows.append({"gamma_in": float(gin), "gamma_sh": float(gsh), "loss": value, "best_round": best_round})
    return rows
