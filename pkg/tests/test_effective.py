import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ccsim import hilbert
from ccsim.effective import (
    DerivationError,
    effective_hamiltonian,
    integrate_terms,
    validate_effective,
)
from ccsim.hilbert import make_space, qubit_level_subspace
from ccsim.model import (
    FermionParams,
    TwoAxisParams,
    fermion_eff,
    fermion_interaction,
    two_axis_eff,
    two_axis_rwa,
)
from ccsim.terms import HamiltonianTerm, TermList, paired_term_list


def ta_params(delta, eta_x=0.1, eta_y=0.1):
    omega0, nu = 1e9, 1e6
    return TwoAxisParams(
        eta_x=eta_x,
        eta_y=eta_y,
        Omega_x=1e5,
        Omega_y=1e5,
        nu_x=nu,
        nu_y=nu,
        omega_x=omega0 - nu + delta,
        omega_y=omega0 - nu + delta,
        omega0=omega0,
    )


def jc_pair(space, amp, freq):
    a = hilbert.annihilator(space, 0)
    sp = hilbert.pauli(space, 0, "plus")
    return paired_term_list(space, [(a @ sp, amp, freq, "a(m)*sp(q)")])


class TestIntegrate:
    def test_antiderivative_rule(self):
        space = make_space([2], 1)
        tl = jc_pair(space, 2.0, 1e4)
        out = integrate_terms(tl)
        by_freq = {t.frequency: t.amplitude for t in out}
        assert by_freq[1e4] == pytest.approx(2.0 / (1j * 1e4))
        assert by_freq[-1e4] == pytest.approx(2.0 / (-1j * 1e4))

    def test_pairing_preserved(self):
        space = make_space([2], 1)
        out = integrate_terms(jc_pair(space, 1 + 3j, 7e3))
        out.require_hermitian_pairing()

    def test_zero_frequency_rejected_with_name(self):
        space = make_space([2], 1)
        n = hilbert.number_op(space, 0)
        tl = TermList(space, tuple(jc_pair(space, 1.0, 5.0).terms) + tuple(
            paired_term_list(space, [(n, 1.0, 0.0, "adag(m)*a(m)")]).terms
        ))
        with pytest.raises(DerivationError, match="adag"):
            integrate_terms(tl)


class TestTwoAxisOracle:
    @pytest.mark.parametrize("seed", [0, 1, 2, 3])
    def test_reproduces_static_form_on_ground_sector(self, seed):
        rng = np.random.default_rng(seed)
        delta = float(rng.uniform(1e3, 1e5))
        eta_x = float(rng.uniform(0.05, 0.2))
        eta_y = float(rng.uniform(0.05, 0.2))
        space = make_space([3, 3], 1)
        p = ta_params(delta, eta_x, eta_y)

        derived = effective_hamiltonian(two_axis_rwa(space, p)).static_operator
        target = two_axis_eff(space, p).static_matrix()

        gg = qubit_level_subspace(space, 0, "g")
        got = gg.restrict(derived)
        want = gg.restrict(target)
        scale = np.abs(want).max()
        assert np.abs(got - want).max() <= 1e-10 * scale

    def test_dropped_terms_oscillate_fast(self):
        space = make_space([2, 2], 1)
        res = effective_hamiltonian(two_axis_rwa(space, ta_params(1e4)))
        assert res.dropped_count == 8
        assert all(abs(t.frequency) > res.resonance_tol for t in res.dropped_terms)

    def test_excited_sector_holds_counterpart(self):
        # The same derivation fixes the dressed dynamics of the excited
        # state: -(1/delta) L L† on the |e> sector.
        space = make_space([3, 3], 1)
        p = ta_params(2e4)
        derived = effective_hamiltonian(two_axis_rwa(space, p)).static_operator
        ee = qubit_level_subspace(space, 0, "e")
        a = hilbert.annihilator(space, 0)
        b = hilbert.annihilator(space, 1)
        ell = p.eta_x * a.matrix + p.eta_y * b.matrix
        want = ee.restrict(-(ell @ ell.conj().T) / p.delta_x)
        assert np.abs(ee.restrict(derived) - want).max() <= 1e-12 * np.abs(want).max()


def below_cutoff_subspace(space, mode):
    """Basis states with the mode's occupation strictly below its cutoff.

    There the truncated ladder products still satisfy a a† = a†a + 1,
    so derived effective Hamiltonians match their closed forms exactly.
    """
    cutoff = space.mode_cutoffs[mode]
    idx = [
        i
        for i in range(space.dimension)
        if hilbert.basis_occupation(space, i)[0][mode] < cutoff
    ]
    return hilbert.Subspace(space, tuple(idx))


class TestFermionOracle:
    @pytest.mark.parametrize("seed", [10, 11, 12])
    def test_reproduces_static_form_including_photon_term(self, seed):
        rng = np.random.default_rng(seed)
        lam = rng.uniform(5e4, 2e5) * np.exp(1j * rng.uniform(0, 2 * np.pi))
        delta = float(rng.uniform(5e5, 5e6)) * float(rng.choice([1.0, -1.0]))
        space = make_space([3], 2)
        p = FermionParams(lam=complex(lam), delta=delta)

        derived = effective_hamiltonian(fermion_interaction(space, p)).static_operator
        target = fermion_eff(space, p).static_matrix()
        sub = below_cutoff_subspace(space, 0)
        got = sub.restrict(derived)
        want = sub.restrict(target)
        scale = np.abs(want).max()
        assert np.abs(got - want).max() <= 1e-10 * scale

    def test_photon_number_cross_term_present(self):
        space = make_space([2], 2)
        p = FermionParams(lam=1e5, delta=1e6)
        derived = effective_hamiltonian(fermion_interaction(space, p)).static_operator
        chi = abs(p.lam) ** 2 / p.delta
        # <1,e,g|H|1,e,g>: qubit part 1, photon part n*(sz1+sz2) = 0.
        v = hilbert.basis_vector(space, [1], [1, 0])
        got = v.conj() @ derived.matrix @ v
        assert got == pytest.approx(chi)
        # <1,e,e|H|1,e,e>: qubit part 2, photon part 1*(+2).
        v2 = hilbert.basis_vector(space, [1], [1, 1])
        got2 = v2.conj() @ derived.matrix @ v2
        assert got2 == pytest.approx(4 * chi)


class TestDispersiveCommutatorOracle:
    @pytest.mark.parametrize("amp,freq", [(1.0, 1e4), (0.5 - 2j, 7e3), (3j, -2e4)])
    def test_single_pair_matches_commutator_rule(self, amp, freq):
        # Independent oracle: for H = A e^{i nu t} + h.c. the static
        # average is [A_op, A_op†] |amp|^2 / nu, computed here without
        # touching the product-expansion engine.
        space = make_space([3], 1)
        a = hilbert.annihilator(space, 0)
        sp = hilbert.pauli(space, 0, "plus")
        coupling = a @ sp
        tl = paired_term_list(space, [(coupling, amp, freq)])
        derived = effective_hamiltonian(tl).static_operator.matrix

        comm = hilbert.commutator(coupling, coupling.dag()).matrix
        want = (abs(amp) ** 2 / freq) * comm
        assert np.abs(derived - want).max() <= 1e-12 * max(1.0, np.abs(want).max())


class TestEngineProperties:
    def test_output_exactly_hermitian_and_static(self):
        space = make_space([2, 2], 1)
        res = effective_hamiltonian(two_axis_rwa(space, ta_params(1e4)))
        assert res.static_terms.is_static
        m = res.static_operator.matrix
        assert np.array_equal(m, m.conj().T)
        res.static_terms.require_hermitian_pairing()

    def test_basis_independence(self):
        space = make_space([2], 1)
        rng = np.random.default_rng(7)
        z = rng.standard_normal((6, 6)) + 1j * rng.standard_normal((6, 6))
        q, _ = np.linalg.qr(z)
        u = hilbert.Operator(space, q)

        tl = jc_pair(space, 1.3 - 0.2j, 9e3)
        rotated = TermList(
            space,
            tuple(
                type(t)(u.dag() @ t.op @ u, t.amplitude, t.frequency, None)
                for t in tl.terms
            ),
        )
        direct = effective_hamiltonian(tl).static_operator.matrix
        via_rotated = effective_hamiltonian(rotated).static_operator.matrix
        assert np.abs(q.conj().T @ direct @ q - via_rotated).max() <= 1e-9 * np.abs(direct).max()

    @given(st.floats(0.1, 10.0))
    @settings(max_examples=20, deadline=None)
    def test_amplitude_scaling_is_quadratic(self, s):
        space = make_space([2], 1)
        tl = jc_pair(space, 0.7 + 0.1j, 1e4)
        base = effective_hamiltonian(tl).static_operator.matrix
        scaled = effective_hamiltonian(tl.scaled(s)).static_operator.matrix
        assert np.abs(scaled - s**2 * base).max() <= 1e-9 * np.abs(base).max() * s**2

    def test_unpaired_nonresonant_input_gives_empty_static(self):
        # A lone sigma+ term has only the self-product at twice its
        # frequency; nothing survives the resonance filter.
        space = make_space([], 1)
        sp = hilbert.pauli(space, 0, "plus")
        tl = TermList(space, (HamiltonianTerm(sp, 1.0, 5.0, "sp(q)"),))
        res = effective_hamiltonian(tl)
        assert len(res.static_terms) == 0
        assert res.dropped_count == 1

    def test_determinism(self):
        space = make_space([2, 2], 1)
        tl = two_axis_rwa(space, ta_params(1e4))
        r1 = effective_hamiltonian(tl)
        r2 = effective_hamiltonian(tl)
        assert [t.tag for t in r1.static_terms] == [t.tag for t in r2.static_terms]
        assert np.array_equal(r1.static_operator.matrix, r2.static_operator.matrix)


class TestValidateEffective:
    def test_static_input_matches_itself(self):
        space = make_space([2, 2], 1)
        eff = two_axis_eff(space, ta_params(1e4))
        dist = validate_effective(eff, eff, t_final=1e-3, steps=8)
        assert dist <= 1e-9

    def test_distance_shrinks_with_detuning(self):
        space = make_space([2, 2], 1)
        dists = []
        for delta in (2.0, 20.0, 200.0):
            p = ta_params(delta)
            full = two_axis_rwa(space, p)
            h_eff = effective_hamiltonian(full).static_operator
            tau = (np.pi / 2) * delta / (p.eta_x * p.eta_y)
            steps = 600 * max(1, int(tau * delta / (2 * np.pi)))
            # keep runtime sane: fold by propagating exactly one period
            from ccsim.evolve import propagate_folded, propagate_static_operator
            from ccsim.evolve import fidelity_unitary_phase_insensitive as fid

            u_full = propagate_folded(full, tau, steps_per_period=2048).propagator
            u_eff = propagate_static_operator(h_eff, tau)
            dists.append(1.0 - fid(u_full, u_eff))
        assert dists[0] > dists[1] > dists[2]

    def test_two_axis_golden_distance(self, golden):
        space = make_space([2, 2], 1)
        p = ta_params(1.0)  # ratio eta/delta = 0.1
        full = two_axis_rwa(space, p)
        h_eff = effective_hamiltonian(full).static_operator
        tau = (np.pi / 2) * 1.0 / (p.eta_x * p.eta_y)
        from ccsim.evolve import propagate_folded, propagate_static_operator
        from ccsim.evolve import fidelity_unitary_phase_insensitive as fid

        u_full = propagate_folded(full, tau, steps_per_period=4096).propagator
        u_eff = propagate_static_operator(h_eff, tau)
        dist = 1.0 - fid(u_full, u_eff)
        assert dist == pytest.approx(golden("two_axis_effective_distance", dist), abs=1e-6)
