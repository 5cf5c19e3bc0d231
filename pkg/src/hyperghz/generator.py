"""Heralded generation of hyperentangled GHZ states from three |R> photons."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import cavity, optics
from .analyzer import SPIN1, SPIN2, Classification
from .cavity import InteractionMode
from .states import (
    MINUS,
    MINUS_PRIME,
    PLUS,
    PLUS_PRIME,
    PureState,
    basis_state,
    fidelity,
    make_hyper_ghz,
    path,
    pol,
    product,
    project_unnormalized,
    qubit_state,
    tensor,
)

PHOTONS = ("A", "B", "C")

# (spin 1, spin 2) outcome -> heralded (i, pol_sign, j, spat_sign)
HERALDS: dict[tuple[str, str], Classification] = {
    ("-", "+'"): Classification(1, 1, 1, 1),
    ("-", "-'"): Classification(1, -1, 1, -1),
    ("+", "+'"): Classification(1, 1, 1, -1),
    ("+", "-'"): Classification(1, -1, 1, 1),
}

_SPIN1_VEC = {"+": PLUS, "-": MINUS}
_SPIN2_VEC = {"+'": PLUS_PRIME, "-'": MINUS_PRIME}


def initial_state(photons: Sequence[str] = PHOTONS) -> PureState:
    """Photons in |R> at the entry port, both spins in |+>."""
    parts = []
    for p in photons:
        parts += [basis_state(pol(p), 0), basis_state(path(p), 0)]
    parts += [qubit_state(SPIN1, PLUS), qubit_state(SPIN2, PLUS)]
    return product(parts)


def spatial_mode_birth(state: PureState, photon, spin1=SPIN1,
                       mode: InteractionMode | None = None) -> PureState:
    """Send one photon through cavity 1; reflection leaves it in mode 1, transmission in mode 2."""
    return cavity.double_sided_interaction(state, photon, path(photon), spin1,
                                           mode or InteractionMode.ideal())


def after_cavity1(mode: InteractionMode | None = None,
                  photons: Sequence[str] = PHOTONS) -> PureState:
    st = initial_state(photons)
    for p in photons:
        st = spatial_mode_birth(st, p, SPIN1, mode)
    return st


def evolve(mode: InteractionMode | None = None, photons: Sequence[str] = PHOTONS) -> PureState:
    mode = mode or InteractionMode.ideal()
    st = after_cavity1(mode, photons)
    st = optics.on_all(optics.qwp, st, photons)
    st = optics.on_all(optics.wp, st, photons)
    for p in photons:
        st = cavity.single_sided_interaction(st, p, SPIN2, mode)
    return optics.on_all(optics.qwp1, st, photons)


@dataclass(frozen=True)
class HeraldBranch:
    spin1: str
    spin2: str
    probability: float
    state: PureState | None
    label: Classification
    fidelity: float


def herald_branches(mode: InteractionMode | None = None) -> tuple[list[HeraldBranch], float]:
    """Exact herald probabilities and photon states, plus the probability lost to scattering."""
    final = evolve(mode)
    branches = []
    for (s1, s2), label in HERALDS.items():
        proj = project_unnormalized(final, tensor(qubit_state(SPIN1, _SPIN1_VEC[s1]),
                                                  qubit_state(SPIN2, _SPIN2_VEC[s2])))
        prob = proj.norm_squared()
        state = proj.normalized() if prob > 0 else None
        fid = fidelity(state, label.state(PHOTONS)) if state is not None else 0.0
        branches.append(HeraldBranch(s1, s2, prob, state, label, fid))
    lost = max(0.0, 1.0 - sum(b.probability for b in branches))
    return branches, lost


@dataclass(frozen=True)
class GenerationResult:
    spin1_outcome: str | None
    spin2_outcome: str | None
    heralded_state: PureState | None
    heralded_label: Classification | None
    probability: float
    fidelity: float

    @property
    def failed(self) -> bool:
        return self.heralded_label is None


def run_hgsg(seed=0, mode: InteractionMode | None = None) -> GenerationResult:
    """One heralded generation attempt; in physical mode the photon may be lost."""
    branches, lost = herald_branches(mode)
    probs = np.array([b.probability for b in branches] + [lost])
    k = int(np.random.default_rng(seed).choice(len(probs), p=probs / probs.sum()))
    if k == len(branches):
        return GenerationResult(None, None, None, None, lost, 0.0)
    b = branches[k]
    return GenerationResult(b.spin1, b.spin2, b.state, b.label, b.probability, b.fidelity)


def sample_heralds(shots: int, seed=0, mode: InteractionMode | None = None) -> dict:
    """Outcome counts over ``shots`` attempts from one seeded generator."""
    branches, lost = herald_branches(mode)
    keys = [(b.spin1, b.spin2) for b in branches] + [None]
    probs = np.array([b.probability for b in branches] + [lost])
    draws = np.random.default_rng(seed).choice(len(keys), size=shots, p=probs / probs.sum())
    counts = np.bincount(draws, minlength=len(keys))
    return {key: int(c) for key, c in zip(keys, counts)}


def chain_reference() -> PureState:
    """Expected joint state right after cavity 1, up to a global phase per spin-1 branch.

    1/2 |+>_2 [ |->_1 (Psi1- Phi1- - Psi1+ Phi1+) + |+>_1 (Psi1+ Phi1- - Psi1- Phi1+) ]
    """
    def hyp(s, t):
        return make_hyper_ghz(1, s, 1, t, PHOTONS).amplitudes

    minus_part = hyp(-1, -1) - hyp(1, 1)
    plus_part = hyp(1, -1) - hyp(-1, 1)
    amps = 0.5 * (np.kron(np.kron(minus_part, MINUS), PLUS)
                  + np.kron(np.kron(plus_part, PLUS), PLUS))
    subs = make_hyper_ghz(1, 1, 1, 1, PHOTONS).subsystems + (SPIN1, SPIN2)
    return PureState(subs, amps)
