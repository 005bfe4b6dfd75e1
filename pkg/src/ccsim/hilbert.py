"""Truncated Fock-space and qubit operator algebra on dense matrices.

A composite space is an ordered list of bosonic modes (each truncated at
a per-mode cutoff) followed by a number of two-level systems.  Basis
indices are little-endian within each group: the occupation of mode 0
varies fastest, qubit bits sit above all mode digits, and qubit 0 is
the least significant bit.  Concretely, with mode dimensions
``d_m = cutoff_m + 1``,

    index = n_0 + d_0*(n_1 + d_1*(n_2 + ...)) + mode_volume * qubit_bits

where ``qubit_bits = sum(level_q << q)`` and level 0 is the qubit
ground state ``|g>``, level 1 the excited state ``|e>``.
``basis_occupation`` / ``basis_index`` are the two directions of this
mapping and are the reference for basis indices reported in CSV output.

Everything is dense and immutable: spaces are a few thousand dimensions
at most, and dense matrices keep exponentials and eigendecompositions
simple and reproducible.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

DEFAULT_DIMENSION_LIMIT = 4096

PAULI_KINDS = ("z", "plus", "minus")


class SpaceError(ValueError):
    """Raised for invalid space declarations or mismatched operands."""


@dataclass(frozen=True)
class SpaceDescriptor:
    """Shape of a composite Hilbert space: bosonic modes, then qubits."""

    mode_cutoffs: tuple[int, ...]
    qubit_count: int

    def __post_init__(self):
        if any(int(c) != c or c < 1 for c in self.mode_cutoffs):
            raise SpaceError(f"mode cutoffs must be positive integers, got {self.mode_cutoffs}")
        if self.qubit_count < 0:
            raise SpaceError(f"qubit count must be non-negative, got {self.qubit_count}")

    @property
    def mode_count(self) -> int:
        return len(self.mode_cutoffs)

    @property
    def mode_dims(self) -> tuple[int, ...]:
        return tuple(c + 1 for c in self.mode_cutoffs)

    @property
    def mode_volume(self) -> int:
        return math.prod(self.mode_dims)

    @property
    def dimension(self) -> int:
        return self.mode_volume * 2**self.qubit_count

    @property
    def factor_dims(self) -> tuple[int, ...]:
        """Dimensions of all tensor factors, modes first, then qubits."""
        return self.mode_dims + (2,) * self.qubit_count

    def check_mode(self, mode: int) -> None:
        if not 0 <= mode < self.mode_count:
            raise SpaceError(f"mode index {mode} out of range for {self.mode_count} modes")

    def check_qubit(self, qubit: int) -> None:
        if not 0 <= qubit < self.qubit_count:
            raise SpaceError(f"qubit index {qubit} out of range for {self.qubit_count} qubits")


def make_space(
    mode_cutoffs: Sequence[int],
    qubit_count: int = 0,
    dimension_limit: int = DEFAULT_DIMENSION_LIMIT,
) -> SpaceDescriptor:
    """Build a space descriptor, enforcing the total-dimension limit."""
    space = SpaceDescriptor(tuple(int(c) for c in mode_cutoffs), int(qubit_count))
    if space.dimension > dimension_limit:
        raise SpaceError(
            f"space dimension {space.dimension} exceeds limit {dimension_limit}"
        )
    return space


@dataclass(frozen=True)
class Operator:
    """Dense complex square matrix tagged with its space."""

    space: SpaceDescriptor
    matrix: np.ndarray

    def __post_init__(self):
        mat = np.array(self.matrix, dtype=complex)
        dim = self.space.dimension
        if mat.shape != (dim, dim):
            raise SpaceError(f"matrix shape {mat.shape} does not match space dimension {dim}")
        mat.setflags(write=False)
        object.__setattr__(self, "matrix", mat)

    def dag(self) -> "Operator":
        return Operator(self.space, self.matrix.conj().T)

    def _check_same_space(self, other: "Operator") -> None:
        if self.space != other.space:
            raise SpaceError(f"operands live on different spaces: {self.space} vs {other.space}")

    def __add__(self, other: "Operator") -> "Operator":
        self._check_same_space(other)
        return Operator(self.space, self.matrix + other.matrix)

    def __sub__(self, other: "Operator") -> "Operator":
        self._check_same_space(other)
        return Operator(self.space, self.matrix - other.matrix)

    def __neg__(self) -> "Operator":
        return Operator(self.space, -self.matrix)

    def __mul__(self, scalar: complex) -> "Operator":
        return Operator(self.space, self.matrix * scalar)

    __rmul__ = __mul__

    def __matmul__(self, other: "Operator") -> "Operator":
        self._check_same_space(other)
        return Operator(self.space, self.matrix @ other.matrix)

    def is_hermitian(self, tol: float = 1e-12) -> bool:
        return bool(np.linalg.norm(self.matrix - self.matrix.conj().T) <= tol * max(1.0, np.linalg.norm(self.matrix)))


@dataclass(frozen=True)
class Subspace:
    """Ordered selection of computational-basis indices of a space."""

    space: SpaceDescriptor
    basis_indices: tuple[int, ...]

    def __post_init__(self):
        idx = tuple(int(i) for i in self.basis_indices)
        dim = self.space.dimension
        if len(set(idx)) != len(idx):
            raise SpaceError("subspace indices must be distinct")
        if any(i < 0 or i >= dim for i in idx):
            raise SpaceError("subspace index out of range")
        object.__setattr__(self, "basis_indices", idx)

    @property
    def dimension(self) -> int:
        return len(self.basis_indices)

    def projector(self) -> Operator:
        mat = np.zeros((self.space.dimension,) * 2, dtype=complex)
        for i in self.basis_indices:
            mat[i, i] = 1.0
        return Operator(self.space, mat)

    def restrict(self, op: Operator | np.ndarray) -> np.ndarray:
        """Matrix of the operator compressed onto the subspace basis."""
        idx = np.array(self.basis_indices)
        return mat_or(op)[np.ix_(idx, idx)]

    def embed(self, block: np.ndarray, into: np.ndarray) -> None:
        """Scatter a subspace-sized block into a full-space matrix in place."""
        idx = np.array(self.basis_indices)
        into[np.ix_(idx, idx)] = block


def mat_or(op) -> np.ndarray:
    return op.matrix if isinstance(op, Operator) else np.asarray(op, dtype=complex)


def identity(space: SpaceDescriptor) -> Operator:
    return Operator(space, np.eye(space.dimension, dtype=complex))


def zero(space: SpaceDescriptor) -> Operator:
    return Operator(space, np.zeros((space.dimension,) * 2, dtype=complex))


def _embed_factor(space: SpaceDescriptor, factor: int, local: np.ndarray) -> Operator:
    """Tensor-embed a single-factor matrix, identity on all other factors.

    Factor 0 is least significant, so the full matrix is the Kronecker
    product of the factors in reverse order.
    """
    dims = space.factor_dims
    full = local if factor == 0 else np.eye(dims[0], dtype=complex)
    for f in range(1, len(dims)):
        piece = local if f == factor else np.eye(dims[f], dtype=complex)
        full = np.kron(piece, full)
    return Operator(space, full)


def annihilator(space: SpaceDescriptor, mode: int) -> Operator:
    """Truncated annihilation operator: <n-1|a|n> = sqrt(n) up to the cutoff."""
    space.check_mode(mode)
    dim = space.mode_dims[mode]
    local = np.diag(np.sqrt(np.arange(1, dim, dtype=float)), k=1).astype(complex)
    return _embed_factor(space, mode, local)


def creator(space: SpaceDescriptor, mode: int) -> Operator:
    return annihilator(space, mode).dag()


def number_op(space: SpaceDescriptor, mode: int) -> Operator:
    a = annihilator(space, mode)
    return a.dag() @ a


_PAULI_LOCAL = {
    # Basis order [|g>, |e>]; sigma_z|e> = +|e>, sigma_z|g> = -|g>.
    "z": np.array([[-1, 0], [0, 1]], dtype=complex),
    "plus": np.array([[0, 0], [1, 0]], dtype=complex),   # |e><g|
    "minus": np.array([[0, 1], [0, 0]], dtype=complex),  # |g><e|
}


def pauli(space: SpaceDescriptor, qubit: int, which: str) -> Operator:
    """Embedded sigma_z, sigma_plus = |e><g| or sigma_minus = |g><e|."""
    space.check_qubit(qubit)
    if which not in _PAULI_LOCAL:
        raise SpaceError(f"unknown Pauli kind {which!r}, expected one of {PAULI_KINDS}")
    return _embed_factor(space, space.mode_count + qubit, _PAULI_LOCAL[which])


def charge_boson(space: SpaceDescriptor, mode_a: int, mode_b: int) -> Operator:
    """Charge operator for one particle/antiparticle mode pair: a†a - b†b."""
    space.check_mode(mode_a)
    space.check_mode(mode_b)
    if mode_a == mode_b:
        raise SpaceError("charge operator needs two distinct modes")
    return number_op(space, mode_a) - number_op(space, mode_b)


def charge_fermion(space: SpaceDescriptor, q1: int, q2: int) -> Operator:
    """Pseudo-spin charge operator: sigma1+ sigma1- - sigma2+ sigma2-."""
    space.check_qubit(q1)
    space.check_qubit(q2)
    if q1 == q2:
        raise SpaceError("charge operator needs two distinct qubits")
    n1 = pauli(space, q1, "plus") @ pauli(space, q1, "minus")
    n2 = pauli(space, q2, "plus") @ pauli(space, q2, "minus")
    return n1 - n2


def basis_occupation(space: SpaceDescriptor, index: int) -> tuple[tuple[int, ...], tuple[int, ...]]:
    """Decompose a basis index into (mode occupations, qubit levels)."""
    if not 0 <= index < space.dimension:
        raise SpaceError(f"basis index {index} out of range")
    occ = []
    rem = index
    for d in space.mode_dims:
        occ.append(rem % d)
        rem //= d
    levels = [(rem >> q) & 1 for q in range(space.qubit_count)]
    return tuple(occ), tuple(levels)


def basis_index(
    space: SpaceDescriptor,
    occupations: Sequence[int],
    qubit_levels: Sequence[int] = (),
) -> int:
    """Inverse of :func:`basis_occupation`."""
    if len(occupations) != space.mode_count:
        raise SpaceError("need one occupation per mode")
    if len(qubit_levels) != space.qubit_count:
        raise SpaceError("need one level per qubit")
    index = 0
    stride = 1
    for n, d in zip(occupations, space.mode_dims):
        if not 0 <= n < d:
            raise SpaceError(f"occupation {n} exceeds cutoff {d - 1}")
        index += n * stride
        stride *= d
    for q, level in enumerate(qubit_levels):
        if level not in (0, 1):
            raise SpaceError("qubit level must be 0 (g) or 1 (e)")
        index += level * space.mode_volume * 2**q
    return index


def basis_vector(
    space: SpaceDescriptor,
    occupations: Sequence[int],
    qubit_levels: Sequence[int] = (),
) -> np.ndarray:
    vec = np.zeros(space.dimension, dtype=complex)
    vec[basis_index(space, occupations, qubit_levels)] = 1.0
    return vec


def total_n_subspace(space: SpaceDescriptor, modes: Sequence[int], n_total: int) -> Subspace:
    """All basis states whose Fock occupation summed over `modes` equals n_total."""
    for m in modes:
        space.check_mode(m)
    if n_total < 0:
        raise SpaceError("total excitation number must be non-negative")
    indices = []
    for i in range(space.dimension):
        occ, _ = basis_occupation(space, i)
        if sum(occ[m] for m in modes) == n_total:
            indices.append(i)
    return Subspace(space, tuple(indices))


def qubit_level_subspace(space: SpaceDescriptor, qubit: int, level) -> Subspace:
    """All basis states with the given qubit fixed to |g> (0) or |e> (1)."""
    space.check_qubit(qubit)
    if isinstance(level, str):
        level = {"g": 0, "e": 1}[level]
    if level not in (0, 1):
        raise SpaceError("qubit level must be 0/'g' or 1/'e'")
    indices = tuple(
        i for i in range(space.dimension)
        if basis_occupation(space, i)[1][qubit] == level
    )
    return Subspace(space, indices)


def commutator(a: Operator, b: Operator) -> Operator:
    return a @ b - b @ a


def anticommutator(a: Operator, b: Operator) -> Operator:
    return a @ b + b @ a
