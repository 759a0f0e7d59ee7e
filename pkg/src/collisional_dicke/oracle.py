"""Brute-force full-space reference for the collision protocol.

Every collision is assembled as a dense ``2^n x 2^n`` matrix from Pauli
Kronecker products, ``SWAP = (I + XX + YY + ZZ) / 2``, without touching the
subspace indexing or the permutation shortcut used by the fast engine.
"""

from __future__ import annotations

from functools import reduce

import numpy as np

from .errors import CapacityError
from .protocol import SHUTTLE, ProtocolSpec, round_schedule

ORACLE_MAX_QUBITS = 8

_I = np.eye(2, dtype=complex)
_X = np.array([[0, 1], [1, 0]], dtype=complex)
_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
_Z = np.array([[1, 0], [0, -1]], dtype=complex)


def _two_site(n: int, a: int, b: int, op_a: np.ndarray, op_b: np.ndarray) -> np.ndarray:
    # qubit 0 is the least significant bit, i.e. the rightmost Kronecker factor
    factors = [_I] * n
    factors[n - 1 - a] = op_a
    factors[n - 1 - b] = op_b
    return reduce(np.kron, factors)


def dense_partial_swap(n: int, a: int, b: int, gamma: float) -> np.ndarray:
    dim = 1 << n
    swap = 0.5 * (
        np.eye(dim, dtype=complex)
        + _two_site(n, a, b, _X, _X)
        + _two_site(n, a, b, _Y, _Y)
        + _two_site(n, a, b, _Z, _Z)
    )
    return np.cos(gamma) * np.eye(dim) + 1j * np.sin(gamma) * swap


def full_space_oracle(spec: ProtocolSpec, gamma_in: float, gamma_sh: float, rounds: int) -> np.ndarray:
    """Full-space state after ``rounds`` rounds computed with dense matrices."""
    if spec.n > ORACLE_MAX_QUBITS:
        raise CapacityError(f"oracle limited to {ORACLE_MAX_QUBITS} qubits, got {spec.n}")
    u_rounds = []
    for r in range(1, spec.period + 1):
        u = np.eye(1 << spec.n, dtype=complex)
        for event in round_schedule(spec, r):
            g = gamma_sh if event.kind == SHUTTLE else gamma_in
            u = dense_partial_swap(spec.n, event.qubit_a, event.qubit_b, g) @ u
        u_rounds.append(u)
    psi = np.zeros(1 << spec.n, dtype=complex)
    psi[(1 << spec.m) - 1] = 1.0  # shuttles are the m lowest qubits
    for r in range(rounds):
        psi = u_rounds[r % spec.period] @ psi
    return psi
