"""Passive optical elements acting on a single photon."""

from __future__ import annotations

import numpy as np

from .states import PureState, apply_joint, path, pol

_S = 1 / np.sqrt(2)

QWP = np.array([[1, 1], [1, -1]], dtype=complex) * _S
QWP1 = np.array([[1, 1], [-1, 1]], dtype=complex) * _S
WP = np.diag([1, 1j]).astype(complex)
# R keeps its path, L swaps path (pol most significant)
CPBS = np.array([[1, 0, 0, 0],
                 [0, 1, 0, 0],
                 [0, 0, 0, 1],
                 [0, 0, 1, 0]], dtype=complex)

for _m in (QWP, QWP1, WP, CPBS):
    _m.setflags(write=False)


def qwp(state: PureState, photon) -> PureState:
    """Hadamard: R -> (R+L)/sqrt2, L -> (R-L)/sqrt2."""
    return apply_joint(QWP, state, [pol(photon)])


def qwp1(state: PureState, photon) -> PureState:
    """R -> (R-L)/sqrt2, L -> (R+L)/sqrt2."""
    return apply_joint(QWP1, state, [pol(photon)])


def wp(state: PureState, photon) -> PureState:
    """L picks up a factor i."""
    return apply_joint(WP, state, [pol(photon)])


def cpbs_route(state: PureState, photon) -> PureState:
    return apply_joint(CPBS, state, [pol(photon), path(photon)])


def on_all(element, state: PureState, photons) -> PureState:
    for ph in photons:
        state = element(state, ph)
    return state
