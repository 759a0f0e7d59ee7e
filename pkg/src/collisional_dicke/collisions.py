"""Partial-SWAP collisions and local Rz phase rotations.

A collision between qubits a and b with strength gamma is the two-qubit
unitary ``cos(gamma) I + i sin(gamma) SWAP``. SWAP permutes computational
basis states, so on any excitation sector (or on the full space) the
collision reads ``cos(gamma) psi + i sin(gamma) psi[perm]`` where ``perm``
exchanges bits a and b. Masks with equal bits at a and b are fixed points of
``perm`` and therefore pick up the phase ``exp(i gamma)``, which is kept.
"""

from __future__ import annotations

from functools import lru_cache

import numpy as np

from .errors import DomainError
from .subspace import FULL, SUBSPACE, DensityState, PureState, SubspaceBasis


@lru_cache(maxsize=256)
def full_swap_permutation(n: int, a: int, b: int) -> np.ndarray:
    """Permutation of the 2^n computational indices exchanging bits a and b."""
    if a == b:
        raise DomainError("a collision needs two distinct qubits")
    if not (0 <= a < n and 0 <= b < n):
        raise DomainError(f"qubits ({a}, {b}) out of range for n={n}")
    x = np.arange(1 << n, dtype=np.int64)
    differ = ((x >> a) ^ (x >> b)) & 1
    perm = x ^ (differ * ((1 << a) | (1 << b)))
    perm.setflags(write=False)
    return perm


def _perm_for(basis: SubspaceBasis, representation: str, a: int, b: int) -> np.ndarray:
    if representation == FULL:
        return full_swap_permutation(basis.n, int(a), int(b))
    return basis.swap_permutation(a, b)


def partial_swap_rows(matrix: np.ndarray, perm: np.ndarray, gamma: float) -> np.ndarray:
    """Left-multiply ``matrix`` (vector or stack of columns) by the collision."""
    out = matrix[perm]
    out *= 1j * np.sin(gamma)
    out += np.cos(gamma) * matrix
    return out


def apply_partial_swap(
    state: PureState, qubit_a: int, qubit_b: int, gamma: float, inplace: bool = False
) -> PureState:
    """Apply one partial-SWAP collision to a subspace state.

    Args:
        state: state on a fixed excitation sector.
        qubit_a, qubit_b: distinct qubit indices.
        gamma: collision strength in radians.
        inplace: overwrite ``state.amplitudes`` instead of returning a copy.

    Returns:
        The evolved state (``state`` itself when ``inplace``).
    """
    perm = state.basis.swap_permutation(qubit_a, qubit_b)
    new = partial_swap_rows(state.amplitudes, perm, gamma)
    if inplace:
        state.amplitudes[:] = new
        return state
    return PureState(state.basis, new)


def apply_partial_swap_dm(
    rho: DensityState, qubit_a: int, qubit_b: int, gamma: float, inplace: bool = False
) -> DensityState:
    """Conjugate a density matrix by the collision, ``U rho U^dagger``."""
    perm = _perm_for(rho.basis, rho.representation, qubit_a, qubit_b)
    new = conjugate_partial_swap(rho.matrix, perm, gamma)
    if inplace:
        rho.matrix[:] = new
        return rho
    return DensityState(rho.representation, new, rho.basis)


def conjugate_partial_swap(matrix: np.ndarray, perm: np.ndarray, gamma: float) -> np.ndarray:
    # U = cI + isP with P a real symmetric permutation, so
    # U rho U^+ = c^2 rho + s^2 P rho P + ics (P rho - rho P)
    c, s = np.cos(gamma), np.sin(gamma)
    p_rho = matrix[perm, :]
    rho_p = matrix[:, perm]
    return c * c * matrix + s * s * p_rho[:, perm] + 1j * c * s * (p_rho - rho_p)


def rz_phase_factors(basis: SubspaceBasis, thetas, sign: int = -1) -> np.ndarray:
    """Per-mask phase ``exp(sign * i * sum_{j excited} theta_j)``."""
    thetas = np.asarray(thetas, dtype=float)
    if thetas.shape != (basis.n,):
        raise DomainError(f"expected {basis.n} angles, got shape {thetas.shape}")
    if sign not in (-1, 1):
        raise DomainError("sign must be +1 or -1")
    return np.exp(sign * 1j * (basis.bits @ thetas))


def apply_rz_phases(state: PureState, thetas, sign: int = -1, inplace: bool = False) -> PureState:
    """Apply one local z rotation per qubit, dropping the global phase.

    With ``sign=-1`` (default) the amplitude of mask x is multiplied by
    ``exp(-i sum_{j in x} theta_j)``. This is the action of
    ``diag(exp(i theta/2), exp(-i theta/2))`` per qubit, i.e. ``Rz(-theta)``.
    With ``sign=+1`` the factor is ``exp(+i sum theta_j)``, the action of the
    textbook ``Rz(theta) = diag(exp(-i theta/2), exp(i theta/2))`` and of the
    phase gate ``diag(1, exp(i theta))``. On a fixed excitation sector the
    two textbook forms differ only by a global phase.
    """
    factors = rz_phase_factors(state.basis, thetas, sign)
    if inplace:
        state.amplitudes *= factors
        return state
    return PureState(state.basis, state.amplitudes * factors)


def apply_rz_phases_dm(rho: DensityState, thetas, sign: int = -1) -> DensityState:
    """Conjugate a density matrix by the same diagonal rotation."""
    if rho.representation == SUBSPACE:
        d = rz_phase_factors(rho.basis, thetas, sign)
    else:
        n = rho.basis.n
        x = np.arange(1 << n)
        bits = (x[:, None] >> np.arange(n)) & 1
        d = np.exp(sign * 1j * (bits @ np.asarray(thetas, dtype=float)))
    return DensityState(rho.representation, d[:, None] * rho.matrix * d.conj()[None, :], rho.basis)
