import numpy as np
import pytest

from hyperghz.analyzer import SPIN1, SPIN2, Classification, analyze_exhaustive, run_hgsa
from hyperghz.cavity import (
    CavityParams,
    InteractionMode,
    double_sided_coeffs,
    single_sided_coeffs,
    solve_pi_half_detuning,
)
from hyperghz.generator import (
    HERALDS,
    after_cavity1,
    chain_reference,
    herald_branches,
    initial_state,
    run_hgsg,
    sample_heralds,
    spatial_mode_birth,
)
from hyperghz.states import (
    MINUS,
    PLUS,
    CompositionError,
    basis_state,
    fidelity,
    make_hyper_ghz,
    path,
    pol,
    project_unnormalized,
    qubit_state,
    tensor,
)
from oracle import ket


def physical_mode(ratio=2.0, ks=0.05):
    p = CavityParams.from_ratio(ratio, ks, 0.1)
    return InteractionMode.physical(double_sided_coeffs(p), single_sided_coeffs(p))


class TestSpatialModeBirth:
    def test_single_photon_example(self):
        s = tensor(basis_state(pol("A"), 0), basis_state(path("A"), 0), qubit_state(SPIN1, PLUS))
        out = spatial_mode_birth(s, "A")
        # reflection flips R to L in mode 1; transmission keeps R and moves to mode 2
        want = (ket([1, 0, 0]) - ket([0, 1, 1])) / np.sqrt(2)
        np.testing.assert_allclose(out.amplitudes, want, atol=1e-15)

    def test_norm_preserved(self):
        st = after_cavity1()
        assert abs(st.norm() - 1) < 1e-12

    def test_missing_spin(self):
        s = tensor(basis_state(pol("A"), 0), basis_state(path("A"), 0))
        with pytest.raises(CompositionError):
            spatial_mode_birth(s, "A")

    def test_chain_branchwise(self):
        """After three passes each spin-1 branch matches the reference up to its own phase."""
        got, ref = after_cavity1(), chain_reference()
        for vec in (PLUS, MINUS):
            g = project_unnormalized(got, qubit_state(SPIN1, vec))
            r = project_unnormalized(ref, qubit_state(SPIN1, vec))
            assert abs(g.norm_squared() - 0.5) < 1e-12
            assert abs(fidelity(g.normalized(), r.normalized()) - 1) < 1e-12

    def test_spin2_untouched(self):
        st = after_cavity1()
        assert abs(project_unnormalized(st, qubit_state(SPIN2, PLUS)).norm_squared() - 1) < 1e-12

    def test_initial_state(self):
        s = initial_state()
        assert s.n == 8 and abs(s.norm() - 1) < 1e-15


class TestHeralds:
    def test_table(self):
        assert HERALDS[("-", "+'")] == Classification(1, 1, 1, 1)
        assert HERALDS[("+", "-'")] == Classification(1, -1, 1, 1)

    def test_exact_probabilities_and_fidelity(self):
        branches, lost = herald_branches()
        assert len(branches) == 4 and lost < 1e-12
        for b in branches:
            assert abs(b.probability - 0.25) < 1e-12
            assert abs(b.fidelity - 1) < 1e-9

    def test_heralded_states_reanalyze(self):
        for b in herald_branches()[0]:
            assert all(br.label == b.label for br in analyze_exhaustive(b.state))

    def test_heralded_state_example(self):
        branches = {(b.spin1, b.spin2): b for b in herald_branches()[0]}
        b = branches[("-", "+'")]
        assert abs(fidelity(b.state, make_hyper_ghz(1, "+", 1, "+")) - 1) < 1e-12

    @pytest.mark.parametrize("seed", range(8))
    def test_run_hgsg(self, seed):
        r = run_hgsg(seed)
        assert not r.failed
        assert r.heralded_label == HERALDS[(r.spin1_outcome, r.spin2_outcome)]
        assert abs(r.fidelity - 1) < 1e-9
        assert run_hgsa(r.heralded_state, seed=seed)[1] == r.heralded_label

    def test_run_hgsg_deterministic(self):
        assert run_hgsg(5).heralded_label == run_hgsg(5).heralded_label

    def test_sampled_counts(self):
        shots = 4000
        counts = sample_heralds(shots, seed=3)
        assert counts[None] == 0 and sum(counts.values()) == shots
        sigma = np.sqrt(shots * 0.25 * 0.75)
        for key, c in counts.items():
            if key is not None:
                assert abs(c - shots / 4) < 4 * sigma


class TestPhysical:
    def test_loss_reported(self):
        branches, lost = herald_branches(physical_mode())
        total = sum(b.probability for b in branches)
        assert 0 < lost < 1 and abs(total + lost - 1) < 1e-12
        assert all(0 <= b.fidelity <= 1 + 1e-12 for b in branches)

    def test_strong_coupling_approaches_ideal(self):
        p = CavityParams(g=1e3, kappa_s=0.0, gamma=0.1)
        single = single_sided_coeffs(p.at(solve_pi_half_detuning(p)))
        mode = InteractionMode.physical(double_sided_coeffs(p), single)
        branches, lost = herald_branches(mode)
        assert lost < 1e-4
        assert all(b.fidelity > 1 - 1e-4 for b in branches)

    def test_failure_outcome(self):
        mode = physical_mode(ratio=0.3, ks=0.5)
        results = [run_hgsg(seed, mode) for seed in range(60)]
        assert any(r.failed for r in results)
        assert all(r.heralded_state is None for r in results if r.failed)
