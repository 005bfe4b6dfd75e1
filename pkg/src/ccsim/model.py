"""Builders for the three engineered charge-conjugation schemes.

Each scheme comes in two flavours: the rotating-wave interaction-picture
Hamiltonian (oscillating term list) and the static effective Hamiltonian
the scheme is driven with.  The ideal targets are the two-mode bosonic
charge-conjugation unitary

    C = exp[-(i pi/2) (a†b + b†a - p (a†a + b†b))],   p = +-1,

and its two-qubit pseudo-spin analogue.  Both preserve the total
excitation number, so they are built block-by-block over total-N
sectors by Hermitian eigendecomposition; each block is exact even on a
truncated space.

All frequencies are angular, in 1/s, with hbar = 1.
"""

from __future__ import annotations

import cmath
import math
import warnings
from dataclasses import dataclass

import numpy as np

from . import hilbert
from .hilbert import Operator, SpaceDescriptor, total_n_subspace
from .terms import HamiltonianTerm, TermList, paired_term_list

WEAK_COUPLING_RATIO = 0.1


class ModelError(ValueError):
    """Raised for parameter or space-shape violations in scheme builders."""


# ---------------------------------------------------------------------------
# parameter records


@dataclass(frozen=True)
class BosonCavityParams:
    """Single ion in a cavity, driven by one laser.

    Omega: laser Rabi coupling (complex, 1/s); eta_l: Lamb-Dicke
    parameter of the laser; lambda_a: cavity coupling (complex, 1/s);
    omega0/omega_l/omega_f/nu: atomic, laser, cavity and trap angular
    frequencies.
    """

    Omega: complex
    eta_l: float
    lambda_a: complex
    omega0: float
    omega_l: float
    omega_f: float
    nu: float

    @property
    def detuning_laser(self) -> float:
        return self.omega0 - self.omega_l - self.nu

    @property
    def detuning_cavity(self) -> float:
        return self.omega0 - self.omega_f

    def weak_coupling_ratio(self) -> float:
        couplings = max(abs(self.eta_l * self.Omega), abs(self.lambda_a))
        detunings = min(abs(self.detuning_laser), abs(self.detuning_cavity))
        if detunings == 0:
            return math.inf
        return couplings / detunings


@dataclass(frozen=True)
class TwoAxisParams:
    """Single ion in a two-dimensional trap driven along both axes."""

    eta_x: float
    eta_y: float
    Omega_x: complex
    Omega_y: complex
    nu_x: float
    nu_y: float
    omega_x: float
    omega_y: float
    omega0: float

    @property
    def delta_x(self) -> float:
        return self.omega_x - self.omega0 + self.nu_x

    @property
    def delta_y(self) -> float:
        return self.omega_y - self.omega0 + self.nu_y


@dataclass(frozen=True)
class FermionParams:
    """Two identical two-level ions sharing one cavity mode.

    lam: ion-cavity coupling (complex, 1/s); delta: detuning between the
    ionic transition and the cavity mode; tau: pulse duration (s).
    """

    lam: complex
    delta: float
    tau: float = 0.0

    def __post_init__(self):
        if self.delta == 0:
            raise ModelError("fermionic scheme needs a nonzero detuning")


# ---------------------------------------------------------------------------
# scheme Hamiltonians


def _require_shape(space: SpaceDescriptor, modes: int, qubits: int, what: str) -> None:
    if space.mode_count < modes or space.qubit_count < qubits:
        raise ModelError(
            f"{what} needs at least {modes} mode(s) and {qubits} qubit(s), "
            f"got {space.mode_count} and {space.qubit_count}"
        )


def _warn_if_strong(ratio: float, what: str) -> None:
    if ratio > WEAK_COUPLING_RATIO:
        warnings.warn(
            f"{what}: coupling/detuning ratio {ratio:.3g} exceeds "
            f"{WEAK_COUPLING_RATIO}; the effective description degrades",
            stacklevel=3,
        )


def boson_cavity_rwa(space: SpaceDescriptor, params: BosonCavityParams) -> TermList:
    """Rotating-wave Hamiltonian of the ion-in-cavity scheme.

    i eta_l Omega b sigma+ at frequency (omega0 - omega_l - nu) plus
    lambda_a a sigma+ at (omega0 - omega_f), with conjugate partners.
    Mode 0 is the cavity (a), mode 1 the vibration (b), qubit 0 the ion.
    """
    _require_shape(space, 2, 1, "boson cavity scheme")
    _warn_if_strong(params.weak_coupling_ratio(), "boson cavity scheme")
    a = hilbert.annihilator(space, 0)
    b = hilbert.annihilator(space, 1)
    sp = hilbert.pauli(space, 0, "plus")
    return paired_term_list(
        space,
        [
            (b @ sp, 1j * params.eta_l * params.Omega, params.detuning_laser, "a(b)*sp(q)"),
            (a @ sp, params.lambda_a, params.detuning_cavity, "a(a)*sp(q)"),
        ],
    )


def boson_cavity_eff(
    space: SpaceDescriptor,
    params: BosonCavityParams,
    corrected_detunings: bool = False,
):
    """Static effective Hamiltonian of the ion-in-cavity scheme.

    H_eff = omega_a a†a + omega_b b†b + g a†b + g* b†a with

        omega_a = |lambda_a|^2 / (omega0 - nu)
        omega_b = eta_l^2 |Omega|^2 / (omega_l - omega0)
        g       = i Omega eta_l lambda_a* / (omega0 - nu)

    exactly as printed in the source scheme.  Those denominators do not
    match the oscillation frequencies of the rotating-wave Hamiltonian;
    `corrected_detunings` substitutes the detunings that do appear
    there, (omega0 - omega_f) for the cavity coupling and
    (omega_l + nu - omega0) for the laser one, keeping the printed
    signs and numerators.

    Returns (term list, {"omega_a", "omega_b", "g"}).
    """
    _require_shape(space, 2, 1, "boson cavity scheme")
    if corrected_detunings:
        den_a = params.detuning_cavity
        den_b = params.omega_l + params.nu - params.omega0
    else:
        den_a = params.omega0 - params.nu
        den_b = params.omega_l - params.omega0
    if den_a == 0 or den_b == 0:
        raise ModelError("effective coefficients need nonzero detuning denominators")
    omega_a = abs(params.lambda_a) ** 2 / den_a
    omega_b = params.eta_l**2 * abs(params.Omega) ** 2 / den_b
    g = 1j * params.Omega * params.eta_l * np.conj(params.lambda_a) / den_a

    a = hilbert.annihilator(space, 0)
    b = hilbert.annihilator(space, 1)
    entries = [
        (a.dag() @ a, omega_a, "adag(a)*a(a)"),
        (b.dag() @ b, omega_b, "adag(b)*a(b)"),
        (a.dag() @ b, g, "adag(a)*a(b)"),
        (b.dag() @ a, np.conj(g), "adag(b)*a(a)"),
    ]
    tl = TermList(
        space,
        tuple(
            HamiltonianTerm(op, complex(amp), 0.0, tag)
            for op, amp, tag in entries
            if amp != 0
        ),
    )
    derived = {"omega_a": omega_a, "omega_b": omega_b, "g": g}
    return tl, derived


def boson_beamsplitter(
    space: SpaceDescriptor,
    g: complex,
    mode_a: int = 0,
    mode_b: int = 1,
) -> TermList:
    """Static mode-mixing Hamiltonian g a†b + g* b†a."""
    space.check_mode(mode_a)
    space.check_mode(mode_b)
    if mode_a == mode_b:
        raise ModelError("beam splitter needs two distinct modes")
    a = hilbert.annihilator(space, mode_a)
    b = hilbert.annihilator(space, mode_b)
    terms = []
    if g != 0:
        terms = [
            HamiltonianTerm(a.dag() @ b, complex(g), 0.0, "adag(a)*a(b)"),
            HamiltonianTerm(b.dag() @ a, complex(g).conjugate(), 0.0, "adag(b)*a(a)"),
        ]
    return TermList(space, tuple(terms))


def two_axis_rwa(
    space: SpaceDescriptor,
    params: TwoAxisParams,
    with_rabi: bool = False,
) -> TermList:
    """Rotating-wave Hamiltonian of the two-axis vibrational scheme.

    -i eta_x a sigma+ at -delta_x and -i eta_y b sigma+ at -delta_y plus
    conjugates, with delta_alpha = omega_alpha - omega0 + nu_alpha.  The
    printed amplitudes carry no Rabi factor; `with_rabi` multiplies each
    coupling by its Omega_alpha for dimensional consistency.
    """
    _require_shape(space, 2, 1, "two axis scheme")
    a = hilbert.annihilator(space, 0)
    b = hilbert.annihilator(space, 1)
    sp = hilbert.pauli(space, 0, "plus")
    amp_x = -1j * params.eta_x * (params.Omega_x if with_rabi else 1.0)
    amp_y = -1j * params.eta_y * (params.Omega_y if with_rabi else 1.0)
    return paired_term_list(
        space,
        [
            (a @ sp, amp_x, -params.delta_x, "a(x)*sp(s)"),
            (b @ sp, amp_y, -params.delta_y, "a(y)*sp(s)"),
        ],
    )


def two_axis_eff(space: SpaceDescriptor, params: TwoAxisParams) -> TermList:
    """Static effective Hamiltonian of the two-axis scheme.

    (eta_x^2/delta) a†a + (eta_y^2/delta) b†b
    + (eta_x eta_y/delta)(a†b + b†a), requiring delta_x = delta_y != 0.
    Acts as identity on the ion's internal state.
    """
    _require_shape(space, 2, 1, "two axis scheme")
    if params.delta_x != params.delta_y:
        raise ModelError(
            f"effective form needs equal detunings, got {params.delta_x} and {params.delta_y}"
        )
    delta = params.delta_x
    if delta == 0:
        raise ModelError("effective form needs a nonzero detuning")
    a = hilbert.annihilator(space, 0)
    b = hilbert.annihilator(space, 1)
    entries = [
        (a.dag() @ a, params.eta_x**2 / delta, "adag(x)*a(x)"),
        (b.dag() @ b, params.eta_y**2 / delta, "adag(y)*a(y)"),
        (a.dag() @ b, params.eta_x * params.eta_y / delta, "adag(x)*a(y)"),
        (b.dag() @ a, params.eta_x * params.eta_y / delta, "adag(y)*a(x)"),
    ]
    return TermList(
        space,
        tuple(
            HamiltonianTerm(op, complex(c), 0.0, tag) for op, c, tag in entries if c != 0
        ),
    )


def fermion_interaction(space: SpaceDescriptor, params: FermionParams) -> TermList:
    """Interaction-picture Hamiltonian of the two-ion scheme.

    lam a sigma1+ and lam a sigma2+ at frequency delta, plus conjugates.
    Mode 0 is the shared cavity; qubits 0 and 1 are the two ions.
    """
    _require_shape(space, 1, 2, "two ion scheme")
    a = hilbert.annihilator(space, 0)
    sp1 = hilbert.pauli(space, 0, "plus")
    sp2 = hilbert.pauli(space, 1, "plus")
    return paired_term_list(
        space,
        [
            (a @ sp1, params.lam, params.delta, "a(c)*sp(q1)"),
            (a @ sp2, params.lam, params.delta, "a(c)*sp(q2)"),
        ],
    )


def fermion_eff(space: SpaceDescriptor, params: FermionParams) -> TermList:
    """Static effective Hamiltonian of the two-ion scheme.

    (|lam|^2/delta) [sigma1+ sigma1- + sigma2+ sigma2-
                     + a†a (sigma1_z + sigma2_z)
                     + sigma1+ sigma2- + sigma1- sigma2+].

    |lam|^2 rather than lam^2: for complex couplings Hermiticity forces
    the modulus, and for the real couplings of identical ions the two
    coincide.
    """
    _require_shape(space, 1, 2, "two ion scheme")
    chi = abs(params.lam) ** 2 / params.delta
    n_cav = hilbert.number_op(space, 0)
    sp1 = hilbert.pauli(space, 0, "plus")
    sm1 = hilbert.pauli(space, 0, "minus")
    sp2 = hilbert.pauli(space, 1, "plus")
    sm2 = hilbert.pauli(space, 1, "minus")
    sz1 = hilbert.pauli(space, 0, "z")
    sz2 = hilbert.pauli(space, 1, "z")
    entries = [
        (sp1 @ sm1, "sp(q1)*sm(q1)"),
        (sp2 @ sm2, "sp(q2)*sm(q2)"),
        (n_cav @ sz1, "adag(c)*a(c)*sz(q1)"),
        (n_cav @ sz2, "adag(c)*a(c)*sz(q2)"),
        (sp1 @ sm2, "sp(q1)*sm(q2)"),
        (sm1 @ sp2, "sm(q1)*sp(q2)"),
    ]
    return TermList(
        space,
        tuple(HamiltonianTerm(op, complex(chi), 0.0, tag) for op, tag in entries),
    )


# ---------------------------------------------------------------------------
# ideal and engineered target unitaries


def _expm_minus_i_blockwise(
    space: SpaceDescriptor,
    generator: Operator,
    sectors,
) -> Operator:
    """exp(-i G) assembled per invariant sector by eigendecomposition."""
    full = np.zeros((space.dimension,) * 2, dtype=complex)
    for sub in sectors:
        if sub.dimension == 0:
            continue
        block = sub.restrict(generator)
        w, v = np.linalg.eigh((block + block.conj().T) / 2)
        sub.embed(v @ np.diag(np.exp(-1j * w)) @ v.conj().T, full)
    return Operator(space, full)


def mode_pair_sectors(space: SpaceDescriptor, mode_a: int, mode_b: int):
    """Total-N subspaces of a mode pair, N = 0 .. sum of cutoffs."""
    n_max = space.mode_cutoffs[mode_a] + space.mode_cutoffs[mode_b]
    return [total_n_subspace(space, [mode_a, mode_b], n) for n in range(n_max + 1)]


def ideal_C_boson(
    space: SpaceDescriptor,
    mode_a: int = 0,
    mode_b: int = 1,
    p: int = 1,
) -> Operator:
    """Two-mode charge-conjugation unitary for one mode pair.

    exp[-(i pi/2)(a†b + b†a - p(a†a + b†b))], computed separately on
    each total-N sector (the generator preserves total excitation even
    after truncation, so every block is exact).
    """
    space.check_mode(mode_a)
    space.check_mode(mode_b)
    if mode_a == mode_b:
        raise ModelError("charge conjugation needs two distinct modes")
    if space.mode_cutoffs[mode_a] != space.mode_cutoffs[mode_b]:
        raise ModelError(
            "mode cutoffs must be equal; a swap on unequal truncations is not unitary"
        )
    if p not in (1, -1):
        raise ModelError("p must be +1 or -1")
    a = hilbert.annihilator(space, mode_a)
    b = hilbert.annihilator(space, mode_b)
    mixing = a.dag() @ b + b.dag() @ a
    total_n = a.dag() @ a + b.dag() @ b
    gen = (math.pi / 2) * (mixing - p * total_n)
    return _expm_minus_i_blockwise(space, gen, mode_pair_sectors(space, mode_a, mode_b))


def ideal_C_fermion(space: SpaceDescriptor, q1: int = 0, q2: int = 1) -> Operator:
    """Pseudo-spin charge-conjugation unitary on two qubits.

    exp[-(i pi/2)(s1+ s2- + s2+ s1- - s1+ s1- - s2+ s2-)].
    """
    space.check_qubit(q1)
    space.check_qubit(q2)
    if q1 == q2:
        raise ModelError("charge conjugation needs two distinct qubits")
    sp1 = hilbert.pauli(space, q1, "plus")
    sm1 = hilbert.pauli(space, q1, "minus")
    sp2 = hilbert.pauli(space, q2, "plus")
    sm2 = hilbert.pauli(space, q2, "minus")
    gen = (math.pi / 2) * (sp1 @ sm2 + sp2 @ sm1 - sp1 @ sm1 - sp2 @ sm2)
    mat = gen.matrix
    w, v = np.linalg.eigh((mat + mat.conj().T) / 2)
    return Operator(space, v @ np.diag(np.exp(-1j * w)) @ v.conj().T)


def engineered_C_fermion(
    space: SpaceDescriptor,
    sign_number: int = 1,
    sign_exchange: int = 1,
    q1: int = 0,
    q2: int = 1,
) -> Operator:
    """Engineered two-qubit conjugation unitary with its sign freedom.

    exp{-(i pi/2)[s_n (s1+ s1- + s2+ s2-) + s_x (s1+ s2- + s1- s2+)]}
    for s_n, s_x = +-1; all four sign pairs are legitimate pulses.
    """
    if sign_number not in (1, -1) or sign_exchange not in (1, -1):
        raise ModelError("sign choices must be +1 or -1")
    sp1 = hilbert.pauli(space, q1, "plus")
    sm1 = hilbert.pauli(space, q1, "minus")
    sp2 = hilbert.pauli(space, q2, "plus")
    sm2 = hilbert.pauli(space, q2, "minus")
    gen = (math.pi / 2) * (
        sign_number * (sp1 @ sm1 + sp2 @ sm2)
        + sign_exchange * (sp1 @ sm2 + sm1 @ sp2)
    )
    mat = gen.matrix
    w, v = np.linalg.eigh((mat + mat.conj().T) / 2)
    return Operator(space, v @ np.diag(np.exp(-1j * w)) @ v.conj().T)


def beamsplitter_pulse(
    space: SpaceDescriptor,
    area: complex,
    mode_a: int = 0,
    mode_b: int = 1,
) -> Operator:
    """Mode-mixing pulse exp(area a†b - area* b†a) for a complex pulse area.

    This is the exponent-level convention for the engineered
    conjugation pulse: area = (pi/2) e^{i 3pi/2} gives exactly
    exp[-(i pi/2)(a†b + b†a)], the full-swap pulse whose total-N blocks
    match the ideal conjugation up to one phase per sector.  In the
    Hamiltonian convention U = exp(-i H tau) with H = g a†b + g* b†a the
    same pulse corresponds to the real coupling g = i*area/tau.
    """
    space.check_mode(mode_a)
    space.check_mode(mode_b)
    a = hilbert.annihilator(space, mode_a)
    b = hilbert.annihilator(space, mode_b)
    area = complex(area)
    # area a†b - area* b†a = -i H with Hermitian H = i(area a†b - area* b†a)
    h = 1j * (area * (a.dag() @ b).matrix - area.conjugate() * (b.dag() @ a).matrix)
    w, v = np.linalg.eigh((h + h.conj().T) / 2)
    return Operator(space, v @ np.diag(np.exp(-1j * w)) @ v.conj().T)


def pulse_area_phase() -> complex:
    """The engineered pulse area (pi/2) e^{i 3pi/2}."""
    return (math.pi / 2) * cmath.exp(1j * 3 * math.pi / 2)
