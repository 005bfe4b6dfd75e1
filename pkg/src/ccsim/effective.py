"""Second-order static effective Hamiltonians from oscillating term lists.

Given H(t) = sum_j A_j Op_j e^{i nu_j t} with all nu_j nonzero, the
time-averaged second-order Hamiltonian is assembled from the product

    H_eff(t) = -i H(t) * V(t),      V(t) = antiderivative of H(t),

where each term integrates to (A/(i nu)) Op e^{i nu t} (integration
constant dropped).  Every pairwise product oscillates at nu_j + nu_k;
products within `resonance_tol` of zero are kept as static terms, the
rest are discarded and counted.  The kept sum is Hermitized term by
term, (M + M†)/2, which is required because the product form is not
manifestly Hermitian term by term.

Only exactly resonant products carry the schemes here; off-resonant
static cross terms (nu_j != -nu_k but slow) are dropped and reported,
not approximated.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .evolve import (
    fidelity_unitary_phase_insensitive,
    propagate_static,
    propagate_static_operator,
    propagate_timedep,
)
from .hilbert import Operator, SpaceDescriptor
from .terms import (
    HamiltonianTerm,
    TermList,
    adjoint_tag,
    canonical_term_key,
    sort_terms,
)

DEFAULT_RESONANCE_REL_TOL = 1e-9


class DerivationError(ValueError):
    """Raised when a term list cannot be integrated or averaged."""


@dataclass(frozen=True)
class EffectiveResult:
    """Output of the averaging engine.

    static_terms keeps one entry per distinct surviving operator
    product (frequency 0, conjugate-paired); dropped_terms records the
    discarded oscillating products with their frequencies.
    """

    static_terms: TermList
    dropped_terms: tuple[HamiltonianTerm, ...]
    resonance_tol: float

    @property
    def static_operator(self) -> Operator:
        mat = self.static_terms.static_matrix()
        return Operator(self.static_terms.space, (mat + mat.conj().T) / 2)

    @property
    def dropped_count(self) -> int:
        return len(self.dropped_terms)


def integrate_terms(h: TermList) -> TermList:
    """Term-wise antiderivative: (Op, A, nu) -> (Op, A/(i nu), nu).

    Static terms have no oscillating antiderivative under the
    dropped-lower-limit convention and are rejected.
    """
    for k, term in enumerate(h.terms):
        if term.frequency == 0.0:
            name = term.tag or f"term #{k}"
            raise DerivationError(
                f"cannot integrate zero-frequency term {name}; "
                "the averaging rule applies to purely oscillating Hamiltonians"
            )
    return TermList(
        h.space,
        tuple(
            HamiltonianTerm(t.op, t.amplitude / (1j * t.frequency), t.frequency, t.tag)
            for t in h.terms
        ),
    )


def effective_hamiltonian(h: TermList, resonance_tol: float | None = None) -> EffectiveResult:
    """Average -i H(t) * integral(H) keeping resonant products as static terms."""
    if resonance_tol is None:
        resonance_tol = DEFAULT_RESONANCE_REL_TOL * h.max_abs_frequency
    if resonance_tol < 0:
        raise DerivationError("resonance tolerance must be non-negative")

    ordered = sort_terms(h)
    integrated = integrate_terms(ordered)

    kept: list[HamiltonianTerm] = []
    dropped: list[HamiltonianTerm] = []
    for tj in ordered.terms:
        for vk in integrated.terms:
            amp = -1j * tj.amplitude * vk.amplitude
            freq = tj.frequency + vk.frequency
            op = tj.op @ vk.op
            tag = f"{tj.tag}*{vk.tag}" if tj.tag and vk.tag else None
            if abs(freq) <= resonance_tol:
                kept.append(HamiltonianTerm(op, amp, 0.0, tag))
            else:
                dropped.append(HamiltonianTerm(op, amp, freq, tag))

    static = _hermitize_terms(h.space, kept)
    return EffectiveResult(static, tuple(dropped), float(resonance_tol))


def _hermitize_terms(space: SpaceDescriptor, kept: list[HamiltonianTerm]) -> TermList:
    """Symmetrize (M + M†)/2 at the term level, merging equal products.

    Each kept product contributes half its amplitude on its own operator
    and half of the conjugate amplitude on the adjoint operator, so the
    resulting list is closed under conjugation term by term.
    """
    halves: list[HamiltonianTerm] = []
    for t in kept:
        halves.append(HamiltonianTerm(t.op, t.amplitude / 2, 0.0, t.tag))
        halves.append(
            HamiltonianTerm(
                t.op.dag(),
                (complex(t.amplitude) / 2).conjugate(),
                0.0,
                adjoint_tag(t.tag),
            )
        )

    merged: dict[bytes, HamiltonianTerm] = {}
    order: list[bytes] = []
    for t in halves:
        key = np.ascontiguousarray(np.round(t.op.matrix, 12)).tobytes() + (t.tag or "").encode()
        if key in merged:
            prev = merged[key]
            merged[key] = HamiltonianTerm(prev.op, prev.amplitude + t.amplitude, 0.0, prev.tag)
        else:
            merged[key] = t
            order.append(key)

    terms = [merged[k] for k in order if merged[k].amplitude != 0]
    terms.sort(key=canonical_term_key)
    return TermList(space, tuple(terms))


def validate_effective(
    h_full: TermList,
    h_eff: TermList | Operator,
    t_final: float,
    steps: int | None = None,
) -> float:
    """Phase-insensitive distance between exact and effective propagation.

    Runs the time-ordered propagator of the oscillating Hamiltonian and
    compares it against exp(-i H_eff t_final); returns 1 - |Tr(U†V)|/d.
    """
    if isinstance(h_eff, Operator):
        if h_eff.space != h_full.space:
            raise DerivationError("full and effective Hamiltonians must share a space")
        u_eff = propagate_static_operator(h_eff, t_final)
    else:
        if h_eff.space != h_full.space:
            raise DerivationError("full and effective Hamiltonians must share a space")
        u_eff = propagate_static(h_eff, t_final)
    result = propagate_timedep(h_full, t_final, steps)
    return 1.0 - fidelity_unitary_phase_insensitive(result.propagator, u_eff)
