import time

import numpy as np
import pytest

from hyperghz.analyzer import Classification, all_labels
from hyperghz.states import PureState, fidelity, make_hyper_ghz, path, pol, reorder
from hyperghz.swapping import (
    ANALYZED,
    REMOTE,
    build_network_state,
    dof_schmidt_rank,
    expansion_state,
    network_order,
    project_123,
    remote_expected,
    six_photon_pol,
    six_photon_spatial,
    verify_swap_table,
)
from oracle import ghz_vector

# Leading kets of the six-photon family, written out (0 = R or mode 1).
SIX_PHOTON_LEADING = {1: "000000", 2: "000011", 3: "001100", 4: "110000"}


@pytest.fixture(scope="module")
def network():
    return build_network_state()


@pytest.fixture(scope="module")
def report(network):
    return verify_swap_table(network)


def remote_by_contraction(network, label):
    """Remote amplitudes from a plain tensor contraction over photons 1..3."""
    t = network.amplitudes.reshape((2,) * 18)
    # axes: pol 1..9 then path 1..9; analyzed photons sit at 0..2 and 9..11
    analyzed = make_hyper_ghz(label.i, label.pol_sign, label.j, label.spat_sign, ANALYZED)
    a = analyzed.amplitudes.reshape((2,) * 6)
    out = np.tensordot(a.conj(), t, axes=([0, 1, 2, 3, 4, 5], [0, 1, 2, 9, 10, 11]))
    return out.reshape(-1)


class TestNetwork:
    def test_support_and_norm(self, network):
        amps = network.amplitudes
        assert amps.size == 2**18
        nz = np.flatnonzero(np.abs(amps) > 1e-15)
        assert nz.size == 64
        np.testing.assert_allclose(np.abs(amps[nz]), 1 / 8, atol=1e-15)
        assert abs(network.norm() - 1) < 1e-12

    def test_first_triple_factorizes(self, network):
        first = [pol(p) for p in ("1", "4", "5")] + [path(p) for p in ("1", "4", "5")]
        rest = [s for s in network.subsystems if s not in first]
        m = reorder(network, first + rest).amplitudes.reshape(64, -1)
        u, sv, _ = np.linalg.svd(m)
        assert sv[1] < 1e-12
        want = make_hyper_ghz(1, "+", 1, "+", ("1", "4", "5")).amplitudes
        assert abs(abs(np.vdot(want, u[:, 0])) - 1) < 1e-12

    def test_expansion_identity(self, network):
        err = np.max(np.abs(network.amplitudes - expansion_state().amplitudes))
        assert err < 1e-10


class TestSixPhotonBases:
    @pytest.mark.parametrize("maker", [six_photon_pol, six_photon_spatial])
    def test_against_written_kets(self, maker):
        for i, word in SIX_PHOTON_LEADING.items():
            for sign in (1, -1):
                want = ghz_vector([int(c) for c in word], sign)
                np.testing.assert_allclose(maker(i, sign).amplitudes, want, atol=1e-15)

    @pytest.mark.parametrize("maker", [six_photon_pol, six_photon_spatial])
    def test_orthonormal(self, maker):
        vecs = np.array([maker(i, s).amplitudes for i in range(1, 5) for s in (1, -1)])
        np.testing.assert_allclose(vecs.conj() @ vecs.T, np.eye(8), atol=1e-12)


class TestProjection:
    def test_first_term(self, network):
        prob, remote = project_123(network, Classification(1, 1, 1, 1))
        assert abs(prob - 1 / 64) < 1e-12
        assert abs(fidelity(remote, remote_expected(Classification(1, 1, 1, 1))) - 1) < 1e-9

    @pytest.mark.parametrize("text", ["2:-:3:+", "4:+:1:-", "3:-:2:-"])
    def test_against_contraction(self, network, text):
        lab = Classification.parse(text)
        prob, remote = project_123(network, lab)
        raw = remote_by_contraction(network, lab)
        assert abs(np.vdot(raw, raw).real - prob) < 1e-12
        want = remote_expected(lab)
        order = reorder(want, remote.subsystems)
        assert abs(abs(np.vdot(order.amplitudes, raw / np.linalg.norm(raw))) - 1) < 1e-9

    def test_remote_is_mismatched_for_other_label(self, network):
        _, remote = project_123(network, Classification(2, -1, 3, 1))
        assert fidelity(remote, remote_expected(Classification(3, -1, 2, 1))) < 1e-12


class TestReport:
    def test_all_rows(self, report):
        assert report.ok and not report.failures
        assert len(report.rows) == 64
        assert abs(report.total_probability - 1) < 1e-9
        assert {r.schmidt_rank for r in report.rows} == {1}

    def test_csv(self, report):
        lines = report.csv_lines()
        assert lines[0] == "label,probability,remote_fidelity"
        assert len(lines) == 65
        assert lines[1] == "1:+:1:+,0.015625000,1.000000000"

    def test_runtime(self):
        start = time.perf_counter()
        verify_swap_table()
        assert time.perf_counter() - start < 30


def test_entangled_dofs_have_rank_two():
    a = make_hyper_ghz(1, 1, 1, 1, ("X", "Y"))
    b = make_hyper_ghz(2, -1, 2, 1, ("X", "Y"))
    mixed = PureState(a.subsystems, a.amplitudes + b.amplitudes)
    assert dof_schmidt_rank(mixed.normalized()) == 2
    assert dof_schmidt_rank(a) == 1
