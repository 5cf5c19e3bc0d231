"""Hyperentanglement swapping across three GHZ triples.

Triples (1,4,5), (2,6,7) and (3,8,9) each start in Psi1+ x Phi1+.  A
complete analysis of photons 1, 2, 3 leaves photons 4..9 in a six-photon
GHZ pair whose indices and signs equal the analysis label.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .analyzer import Classification, all_labels
from .states import (
    Kind,
    PureState,
    fidelity,
    ghz_pattern,
    make_hyper_ghz,
    make_pol_ghz,
    make_spatial_ghz,
    path,
    pol,
    product,
    project,
    reorder,
    tensor,
)

TRIPLES = (("1", "4", "5"), ("2", "6", "7"), ("3", "8", "9"))
ANALYZED = ("1", "2", "3")
REMOTE = ("4", "5", "6", "7", "8", "9")

FIDELITY_TOL = 1e-9
PROB_TOL = 1e-12


def network_order() -> tuple:
    photons = ANALYZED + REMOTE
    return tuple(pol(p) for p in photons) + tuple(path(p) for p in photons)


def build_network_state() -> PureState:
    net = product(make_hyper_ghz(1, 1, 1, 1, t) for t in TRIPLES)
    return reorder(net, network_order())


def six_photon_pattern(index: int) -> tuple[int, ...]:
    """Leading ket on photons 4..9: each bit of the three-photon pattern, doubled."""
    return tuple(b for b in ghz_pattern(index, 3) for _ in range(2))


def six_photon_pol(index: int, sign) -> PureState:
    return make_pol_ghz(index, sign, REMOTE, pattern=six_photon_pattern(index))


def six_photon_spatial(index: int, sign) -> PureState:
    return make_spatial_ghz(index, sign, REMOTE, pattern=six_photon_pattern(index))


def remote_expected(label: Classification) -> PureState:
    return tensor(six_photon_pol(label.i, label.pol_sign),
                  six_photon_spatial(label.j, label.spat_sign))


def project_123(state: PureState, label: Classification) -> tuple[float, PureState | None]:
    return project(state, make_hyper_ghz(label.i, label.pol_sign, label.j, label.spat_sign,
                                         ANALYZED))


def expansion_state() -> PureState:
    """Network state rebuilt as (1/8) sum over labels of analyzed x remote terms."""
    acc = np.zeros(2 ** 18, dtype=complex)
    for lab in all_labels(3):
        term = tensor(make_hyper_ghz(lab.i, lab.pol_sign, lab.j, lab.spat_sign, ANALYZED),
                      remote_expected(lab))
        acc += reorder(term, network_order()).amplitudes
    acc /= 8
    return PureState(network_order(), acc)


def dof_schmidt_rank(state: PureState, tol: float = 1e-9) -> int:
    """Schmidt rank across the polarization / spatial cut of a photon state."""
    pols = [s for s in state.subsystems if s.kind is Kind.POL]
    rest = [s for s in state.subsystems if s not in pols]
    m = reorder(state, pols + rest).amplitudes.reshape(2 ** len(pols), -1)
    sv = np.linalg.svd(m, compute_uv=False)
    return int(np.sum(sv > tol * sv[0]))


@dataclass(frozen=True)
class SwapRow:
    label: Classification
    probability: float
    remote_fidelity: float
    schmidt_rank: int

    @property
    def ok(self) -> bool:
        return (abs(self.probability - 1 / 64) <= PROB_TOL
                and abs(self.remote_fidelity - 1) <= FIDELITY_TOL
                and self.schmidt_rank == 1)


@dataclass(frozen=True)
class SwapReport:
    rows: list[SwapRow]
    total_probability: float
    expansion_error: float

    @property
    def ok(self) -> bool:
        return (all(r.ok for r in self.rows) and abs(self.total_probability - 1) <= 1e-9
                and self.expansion_error <= 1e-10)

    @property
    def failures(self) -> list[SwapRow]:
        return [r for r in self.rows if not r.ok]

    def csv_lines(self) -> list[str]:
        lines = ["label,probability,remote_fidelity"]
        for r in self.rows:
            lines.append(f"{r.label},{r.probability:.9f},{r.remote_fidelity:.9f}")
        return lines


def verify_swap_table(network: PureState | None = None) -> SwapReport:
    network = network or build_network_state()
    rows = []
    for lab in all_labels(3):
        prob, remote = project_123(network, lab)
        if remote is None:
            rows.append(SwapRow(lab, prob, 0.0, 0))
            continue
        rows.append(SwapRow(lab, prob, fidelity(remote, remote_expected(lab)),
                            dof_schmidt_rank(remote)))
    err = float(np.max(np.abs(network.amplitudes - expansion_state().amplitudes)))
    return SwapReport(rows, sum(r.probability for r in rows), err)
