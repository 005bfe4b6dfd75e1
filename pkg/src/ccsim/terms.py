"""Time-dependent Hamiltonians as finite lists of oscillating terms.

A term list represents H(t) = sum_j A_j * Op_j * exp(i nu_j t) with
complex amplitudes A_j and real angular frequencies nu_j (1/s, hbar=1).
Hermiticity is a structural invariant: for every term the conjugate
partner (Op†, conj(A), -nu) must be present, except for static terms
(nu = 0) whose amplitude-weighted operator is itself Hermitian.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass
from typing import Iterable

import numpy as np

from .hilbert import Operator, SpaceDescriptor, SpaceError


class PairingError(ValueError):
    """Raised when a term list violates the conjugate-pairing invariant."""


@dataclass(frozen=True)
class HamiltonianTerm:
    """One contribution A * Op * exp(i nu t)."""

    op: Operator
    amplitude: complex
    frequency: float
    tag: str | None = None

    def conjugate_partner(self) -> "HamiltonianTerm":
        return HamiltonianTerm(
            self.op.dag(),
            complex(self.amplitude).conjugate(),
            -self.frequency,
            adjoint_tag(self.tag),
        )


@dataclass(frozen=True)
class TermList:
    """Finite set of oscillating terms sharing one space."""

    space: SpaceDescriptor
    terms: tuple[HamiltonianTerm, ...]

    def __post_init__(self):
        for t in self.terms:
            if t.op.space != self.space:
                raise SpaceError("all terms must live on the term list's space")

    def __len__(self) -> int:
        return len(self.terms)

    def __iter__(self):
        return iter(self.terms)

    @property
    def is_static(self) -> bool:
        return all(t.frequency == 0.0 for t in self.terms)

    @property
    def max_abs_frequency(self) -> float:
        return max((abs(t.frequency) for t in self.terms), default=0.0)

    def matrix_at(self, t: float) -> np.ndarray:
        """Dense H(t)."""
        dim = self.space.dimension
        mat = np.zeros((dim, dim), dtype=complex)
        for term in self.terms:
            mat += term.amplitude * np.exp(1j * term.frequency * t) * term.op.matrix
        return mat

    def static_matrix(self) -> np.ndarray:
        if not self.is_static:
            raise ValueError("term list has oscillating terms; no static matrix")
        return self.matrix_at(0.0)

    def frequency_components(self) -> dict[float, np.ndarray]:
        """Amplitude-weighted operator sum per distinct frequency."""
        dim = self.space.dimension
        comps: dict[float, np.ndarray] = {}
        for term in self.terms:
            acc = comps.setdefault(term.frequency, np.zeros((dim, dim), dtype=complex))
            acc += term.amplitude * term.op.matrix
        return comps

    def pairing_defect(self) -> float:
        """Largest Frobenius mismatch between M_nu and M_{-nu}†.

        Zero (to rounding) exactly when H(t) is Hermitian for all t.
        """
        comps = self.frequency_components()
        worst = 0.0
        for nu, mat in comps.items():
            partner = comps.get(-nu)
            if partner is None:
                worst = max(worst, float(np.linalg.norm(mat)))
            else:
                worst = max(worst, float(np.linalg.norm(mat - partner.conj().T)))
        return worst

    def require_hermitian_pairing(self, tol: float = 1e-9) -> None:
        scale = max((abs(t.amplitude) * np.linalg.norm(t.op.matrix) for t in self.terms), default=1.0)
        defect = self.pairing_defect()
        if defect > tol * max(1.0, scale):
            raise PairingError(
                f"term list is not conjugate-paired: defect {defect:.3e} "
                f"exceeds {tol:.1e} * scale {scale:.3e}"
            )

    def scaled(self, factor: float) -> "TermList":
        """All amplitudes multiplied by a real factor (pairing-preserving)."""
        return TermList(
            self.space,
            tuple(
                HamiltonianTerm(t.op, t.amplitude * factor, t.frequency, t.tag)
                for t in self.terms
            ),
        )


def term_list(
    space: SpaceDescriptor,
    entries: Iterable[tuple],
    validate: bool = True,
) -> TermList:
    """Assemble a term list from (op, amplitude, frequency[, tag]) tuples."""
    terms = []
    for entry in entries:
        op, amp, nu = entry[0], entry[1], entry[2]
        tag = entry[3] if len(entry) > 3 else None
        terms.append(HamiltonianTerm(op, complex(amp), float(nu), tag))
    tl = TermList(space, tuple(terms))
    if validate:
        tl.require_hermitian_pairing()
    return tl


def paired_term_list(space: SpaceDescriptor, half_entries: Iterable[tuple]) -> TermList:
    """Build a term list from half the terms, adding conjugate partners.

    Entries with zero amplitude are dropped entirely, so scheme builders
    with switched-off couplings produce shorter lists.
    """
    terms: list[HamiltonianTerm] = []
    for entry in half_entries:
        op, amp, nu = entry[0], complex(entry[1]), float(entry[2])
        tag = entry[3] if len(entry) > 3 else None
        if amp == 0:
            continue
        base = HamiltonianTerm(op, amp, nu, tag)
        terms.append(base)
        terms.append(base.conjugate_partner())
    return TermList(space, tuple(terms))


_ADJOINT_FACTOR = {"a": "adag", "adag": "a", "sp": "sm", "sm": "sp", "sz": "sz"}


def adjoint_tag(tag: str | None) -> str | None:
    """Adjoint of an operator-product tag like ``a(x)*sp(s)``.

    Factors are reversed and each ladder name is conjugated.  Tags not
    in this factored form are dropped (None) rather than guessed.
    """
    if tag is None:
        return None
    factors = tag.split("*")
    out = []
    for f in reversed(factors):
        name, sep, rest = f.partition("(")
        if not sep or name not in _ADJOINT_FACTOR or not rest.endswith(")"):
            return None
        out.append(_ADJOINT_FACTOR[name] + "(" + rest)
    return "*".join(out)


def canonical_term_key(term: HamiltonianTerm) -> tuple:
    """Deterministic ordering key: frequency, amplitude, tag, matrix hash."""
    digest = hashlib.sha256(np.ascontiguousarray(term.op.matrix).tobytes()).hexdigest()
    amp = complex(term.amplitude)
    return (term.frequency, amp.real, amp.imag, term.tag or "", digest)


def sort_terms(tl: TermList) -> TermList:
    return TermList(tl.space, tuple(sorted(tl.terms, key=canonical_term_key)))
