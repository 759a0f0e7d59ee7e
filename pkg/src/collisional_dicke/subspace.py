"""Fixed-excitation subspace: combinadic indexing and state containers.

Basis states of the m-excitation manifold of n qubits are n-bit integers
with popcount m, ordered by ascending integer value. Qubit 0 is the least
significant bit. For a fixed popcount, ascending order coincides with
colexicographic order of the set-bit positions, so the rank of a mask with
set bits p_0 < p_1 < ... < p_{m-1} is sum_i C(p_i, i + 1).
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import CapacityError, DomainError, ExcitationError

MAX_QUBITS = 20
MAX_FULL_QUBITS = 14


def subspace_dim(n: int, m: int) -> int:
    """Number of n-qubit basis states carrying exactly m excitations."""
    if n < 0 or m < 0 or m > n:
        raise DomainError(f"need 0 <= m <= n, got n={n}, m={m}")
    return math.comb(n, m)


def popcount(x: int) -> int:
    return bin(x).count("1")


def rank(mask: int, basis: SubspaceBasis) -> int:
    """Zero-based position of ``mask`` among the basis masks in ascending order."""
    mask = int(mask)
    if mask < 0 or mask >= 1 << basis.n:
        raise DomainError(f"mask {mask:#b} does not fit in {basis.n} qubits")
    if popcount(mask) != basis.m:
        raise ExcitationError(f"mask {mask:#b} has popcount {popcount(mask)}, expected {basis.m}")
    index = 0
    k = 0
    pos = 0
    while mask:
        if mask & 1:
            k += 1
            index += math.comb(pos, k)
        mask >>= 1
        pos += 1
    return index


def unrank(index: int, basis: SubspaceBasis) -> int:
    """Inverse of :func:`rank`."""
    index = int(index)
    if not 0 <= index < basis.dim:
        raise DomainError(f"index {index} outside [0, {basis.dim})")
    mask = 0
    pos = basis.n - 1
    for k in range(basis.m, 0, -1):
        # largest position p with C(p, k) <= index
        while math.comb(pos, k) > index:
            pos -= 1
        index -= math.comb(pos, k)
        mask |= 1 << pos
        pos -= 1
    return mask


class SubspaceBasis:
    """Indexing structures for the m-excitation manifold of n qubits.

    Instances are treated as immutable and may be shared across workers.
    Use :func:`get_basis` to reuse cached instances.
    """

    def __init__(self, n: int, m: int):
        if n < 1:
            raise DomainError(f"need at least one qubit, got n={n}")
        if n > MAX_QUBITS:
            raise CapacityError(f"n={n} exceeds the supported maximum of {MAX_QUBITS} qubits")
        self.n = int(n)
        self.m = int(m)
        self.dim = subspace_dim(n, m)
        masks = sorted(sum(1 << p for p in c) for c in itertools.combinations(range(n), m))
        self.masks = np.asarray(masks, dtype=np.int64)
        self.masks.setflags(write=False)
        # occupation table: bits[i, j] = bit j of masks[i]
        self.bits = ((self.masks[:, None] >> np.arange(n)) & 1).astype(np.int8)
        self.bits.setflags(write=False)
        self._table = np.full(1 << n, -1, dtype=np.int64)
        self._table[self.masks] = np.arange(self.dim)
        self._perms: dict[tuple[int, int], np.ndarray] = {}

    def __repr__(self) -> str:
        return f"SubspaceBasis(n={self.n}, m={self.m}, dim={self.dim})"

    def __eq__(self, other: object) -> bool:
        return isinstance(other, SubspaceBasis) and (self.n, self.m) == (other.n, other.m)

    def __hash__(self) -> int:
        return hash((self.n, self.m))

    def index_of(self, masks) -> np.ndarray:
        """Vectorized rank lookup; entries not in the manifold map to -1."""
        return self._table[np.asarray(masks, dtype=np.int64)]

    def swap_permutation(self, a: int, b: int) -> np.ndarray:
        """Rank permutation induced by exchanging the bits of qubits ``a`` and ``b``.

        Masks with equal bits at ``a`` and ``b`` are fixed points. The
        permutation is an involution and symmetric in ``(a, b)``.
        """
        a, b = int(a), int(b)
        if a == b:
            raise DomainError("a collision needs two distinct qubits")
        if not (0 <= a < self.n and 0 <= b < self.n):
            raise DomainError(f"qubits ({a}, {b}) out of range for n={self.n}")
        key = (min(a, b), max(a, b))
        perm = self._perms.get(key)
        if perm is None:
            x = self.masks
            differ = ((x >> a) ^ (x >> b)) & 1
            swapped = x ^ (differ * ((1 << a) | (1 << b)))
            perm = self._table[swapped]
            perm.setflags(write=False)
            self._perms[key] = perm
        return perm


@lru_cache(maxsize=None)
def get_basis(n: int, m: int) -> SubspaceBasis:
    return SubspaceBasis(n, m)


@dataclass
class PureState:
    """Complex amplitude vector over a :class:`SubspaceBasis`."""

    basis: SubspaceBasis
    amplitudes: np.ndarray

    def __post_init__(self):
        self.amplitudes = np.asarray(self.amplitudes, dtype=complex)
        if self.amplitudes.shape != (self.basis.dim,):
            raise DomainError(
                f"expected {self.basis.dim} amplitudes, got shape {self.amplitudes.shape}"
            )

    @classmethod
    def basis_state(cls, basis: SubspaceBasis, mask: int) -> PureState:
        amps = np.zeros(basis.dim, dtype=complex)
        amps[rank(mask, basis)] = 1.0
        return cls(basis, amps)

    def copy(self) -> PureState:
        return PureState(self.basis, self.amplitudes.copy())

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))


SUBSPACE = "subspace"
FULL = "full"


@dataclass
class DensityState:
    """Density matrix either on one excitation sector or on the full 2^n space.

    Args:
        representation: ``"subspace"`` (dim x dim over ``basis``) or ``"full"``.
        matrix: complex Hermitian matrix.
        basis: the excitation sector the state was prepared in. For the
            full representation it is kept to locate the target sector.
    """

    representation: str
    matrix: np.ndarray
    basis: SubspaceBasis

    def __post_init__(self):
        self.matrix = np.asarray(self.matrix, dtype=complex)
        if self.representation == SUBSPACE:
            size = self.basis.dim
        elif self.representation == FULL:
            size = 1 << self.basis.n
        else:
            raise DomainError(f"unknown representation {self.representation!r}")
        if self.matrix.shape != (size, size):
            raise DomainError(f"expected a {size}x{size} matrix, got {self.matrix.shape}")

    @property
    def n(self) -> int:
        return self.basis.n

    @classmethod
    def from_pure(cls, state: PureState, representation: str = SUBSPACE) -> DensityState:
        if representation == SUBSPACE:
            vec = state.amplitudes
        else:
            vec = embed_full(state)
        return cls(representation, np.outer(vec, vec.conj()), state.basis)

    def copy(self) -> DensityState:
        return DensityState(self.representation, self.matrix.copy(), self.basis)

    def trace(self) -> complex:
        return complex(np.trace(self.matrix))

    def to_full(self) -> DensityState:
        if self.representation == FULL:
            return self.copy()
        _check_full_capacity(self.basis.n)
        size = 1 << self.basis.n
        full = np.zeros((size, size), dtype=complex)
        idx = self.basis.masks
        full[np.ix_(idx, idx)] = self.matrix
        return DensityState(FULL, full, self.basis)

    def check(self, atol: float = 1e-10, eig_tol: float = 1e-8) -> None:
        """Raise ``AssertionError`` unless trace, Hermiticity and positivity hold."""
        rho = self.matrix
        assert abs(np.trace(rho) - 1) < atol, f"trace {np.trace(rho)} != 1"
        assert np.max(np.abs(rho - rho.conj().T)) < atol, "matrix is not Hermitian"
        lam = np.linalg.eigvalsh((rho + rho.conj().T) / 2)
        assert lam.min() >= -eig_tol, f"negative eigenvalue {lam.min()}"


def _check_full_capacity(n: int, limit: int = MAX_FULL_QUBITS) -> None:
    if n > limit:
        raise CapacityError(f"full-space representation of {n} qubits exceeds the {limit}-qubit guard")


def embed_full(state: PureState) -> np.ndarray:
    """Lift a subspace state to a length-2^n vector (zero outside the sector)."""
    _check_full_capacity(state.basis.n)
    full = np.zeros(1 << state.basis.n, dtype=complex)
    full[state.basis.masks] = state.amplitudes
    return full


def project_full(vector: np.ndarray, basis: SubspaceBasis) -> PureState:
    """Restrict a full-space vector to the amplitudes of ``basis``."""
    vector = np.asarray(vector)
    if vector.shape != (1 << basis.n,):
        raise DomainError(f"expected a vector of length {1 << basis.n}")
    return PureState(basis, vector[basis.masks].astype(complex))
