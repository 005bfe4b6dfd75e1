"""Propagators and unitary comparison metrics.

All matrix exponentials go through Hermitian eigendecomposition,
U = V exp(-i E t) V†, so every propagator factor is unitary up to
eigensolver rounding.  Time-dependent term lists are integrated with
the exponential-midpoint rule,

    U <- exp(-i H(t_mid) dt) U,

which is second-order accurate in dt and preserves unitarity exactly
per step.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .hilbert import Operator, SpaceDescriptor, Subspace
from .terms import TermList

DEFAULT_UNITARITY_BOUND = 1e-8
STEPS_PER_PERIOD = 200


class EvolutionError(ValueError):
    """Raised for invalid propagation requests."""


def _expm_minus_i(space: SpaceDescriptor, hmat: np.ndarray, t: float) -> np.ndarray:
    w, v = np.linalg.eigh((hmat + hmat.conj().T) / 2)
    return v @ (np.exp(-1j * w * t)[:, None] * v.conj().T)


def propagate_static(h: TermList, t: float) -> Operator:
    """exp(-i H t) for a static, Hermitian term list."""
    if not h.is_static:
        raise EvolutionError("term list has oscillating terms; use propagate_timedep")
    h.require_hermitian_pairing()
    return Operator(h.space, _expm_minus_i(h.space, h.static_matrix(), t))


def propagate_static_operator(h: Operator, t: float) -> Operator:
    """exp(-i H t) for a Hermitian operator."""
    return Operator(h.space, _expm_minus_i(h.space, h.matrix, t))


def default_step_count(h: TermList, t_final: float) -> int:
    """Resolve the fastest oscillation with at least 200 points per period."""
    periods = abs(t_final) * h.max_abs_frequency / (2 * math.pi)
    return int(math.ceil(STEPS_PER_PERIOD * max(1.0, periods)))


@dataclass(frozen=True)
class EvolutionResult:
    """Propagator plus bookkeeping from a time-dependent integration."""

    propagator: Operator
    sample_times: tuple[float, ...]
    sampled_states: tuple[np.ndarray, ...] | None
    unitarity_defect: float
    steps: int
    failed: bool = False


def propagate_timedep(
    h: TermList,
    t_final: float,
    steps: int | None = None,
    psi0: np.ndarray | None = None,
    unitarity_bound: float = DEFAULT_UNITARITY_BOUND,
    t_start: float = 0.0,
) -> EvolutionResult:
    """Exponential-midpoint propagation of an oscillating term list."""
    if steps is None:
        steps = default_step_count(h, t_final - t_start)
    if steps < 1:
        raise EvolutionError("need at least one step")
    h.require_hermitian_pairing()

    dim = h.space.dimension
    u = np.eye(dim, dtype=complex)
    dt = (t_final - t_start) / steps
    eye = np.eye(dim)
    defect = 0.0
    samples = [psi0.astype(complex)] if psi0 is not None else None
    times = [t_start]
    for k in range(steps):
        t_mid = t_start + (k + 0.5) * dt
        u = _expm_minus_i(h.space, h.matrix_at(t_mid), dt) @ u
        defect = max(defect, float(np.linalg.norm(u.conj().T @ u - eye)))
        times.append(t_start + (k + 1) * dt)
        if samples is not None:
            samples.append(u @ samples[0])
    return EvolutionResult(
        propagator=Operator(h.space, u),
        sample_times=tuple(times),
        sampled_states=tuple(samples) if samples is not None else None,
        unitarity_defect=defect,
        steps=steps,
        failed=defect > unitarity_bound,
    )


def propagate_folded(
    h: TermList,
    t_final: float,
    steps_per_period: int = 4096,
    unitarity_bound: float = DEFAULT_UNITARITY_BOUND,
) -> EvolutionResult:
    """Midpoint propagation exploiting time periodicity of the Hamiltonian.

    Requires all term frequencies to share one magnitude, so H has
    period T = 2 pi / |nu|; the propagator over [0, t] is then
    U(rem) @ U(T)^m with m full periods folded by repeated squaring.
    """
    freqs = {abs(t.frequency) for t in h.terms}
    freqs.discard(0.0)
    if len(freqs) != 1:
        raise EvolutionError(
            "folded propagation needs a single oscillation frequency magnitude"
        )
    nu = freqs.pop()
    period = 2 * math.pi / nu
    m = int(t_final // period)
    remainder = t_final - m * period

    total_steps = 0
    defect = 0.0
    if m > 0:
        res_t = propagate_timedep(h, period, steps_per_period, unitarity_bound=unitarity_bound)
        defect = res_t.unitarity_defect
        total_steps += res_t.steps
        u = _matrix_power(res_t.propagator.matrix, m)
    else:
        u = np.eye(h.space.dimension, dtype=complex)
    if remainder > 0:
        rem_steps = max(1, int(math.ceil(steps_per_period * remainder / period)))
        res_r = propagate_timedep(h, remainder, rem_steps, unitarity_bound=unitarity_bound)
        defect = max(defect, res_r.unitarity_defect)
        total_steps += res_r.steps
        u = res_r.propagator.matrix @ u

    eye = np.eye(h.space.dimension)
    defect = max(defect, float(np.linalg.norm(u.conj().T @ u - eye)))
    return EvolutionResult(
        propagator=Operator(h.space, u),
        sample_times=(0.0, t_final),
        sampled_states=None,
        unitarity_defect=defect,
        steps=total_steps,
        failed=defect > unitarity_bound,
    )


def _matrix_power(mat: np.ndarray, n: int) -> np.ndarray:
    out = np.eye(mat.shape[0], dtype=complex)
    base = mat
    while n:
        if n & 1:
            out = base @ out
        base = base @ base
        n >>= 1
    return out


def fidelity_unitary_phase_insensitive(
    u: Operator,
    v: Operator,
    sub: Subspace | None = None,
) -> float:
    """|Tr(U†V)| / d, equal to 1 exactly when U = e^{i phi} V.

    With a subspace both operators are compressed onto it first; for
    invariant subspaces this is the per-sector fidelity.
    """
    if u.space != v.space:
        raise EvolutionError("fidelity needs operators on the same space")
    if sub is None:
        um, vm = u.matrix, v.matrix
    else:
        um, vm = sub.restrict(u), sub.restrict(v)
    d = um.shape[0]
    return float(abs(np.trace(um.conj().T @ vm)) / d)


@dataclass(frozen=True)
class SectorComparison:
    """Per-sector phase-insensitive fidelity with leakage bookkeeping."""

    fidelity: float
    leakage: float
    leakage_ok: bool


def subspace_leakage(u: Operator, sub: Subspace) -> float:
    """Frobenius norm of the block mapping the subspace out of itself."""
    idx = np.array(sub.basis_indices)
    comp = np.setdiff1d(np.arange(u.space.dimension), idx)
    if comp.size == 0:
        return 0.0
    return float(np.linalg.norm(u.matrix[np.ix_(comp, idx)]))


def sectorwise_compare(
    u: Operator,
    v: Operator,
    sectors: list[Subspace],
    leakage_tol: float = 1e-8,
) -> list[SectorComparison]:
    """Phase-insensitive fidelity per sector.

    Sectors must be disjoint.  Leakage beyond the tolerance flags the
    sector but its fidelity is still reported.
    """
    seen: set[int] = set()
    for sub in sectors:
        overlap = seen.intersection(sub.basis_indices)
        if overlap:
            raise EvolutionError(f"sectors are not disjoint (index {min(overlap)})")
        seen.update(sub.basis_indices)

    out = []
    for sub in sectors:
        leak = max(subspace_leakage(u, sub), subspace_leakage(v, sub))
        fid = fidelity_unitary_phase_insensitive(u, v, sub)
        out.append(SectorComparison(fid, leak, leak <= leakage_tol))
    return out
