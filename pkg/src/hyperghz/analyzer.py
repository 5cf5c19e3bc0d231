"""Complete analyzer for polarization-spatial hyperentangled GHZ states.

Stage 1 swaps the two degrees of freedom and writes the relative sign of
the input pair onto spin 1.  Stage 2 writes the (post-swap) polarization
sign onto spin 2.  After Hadamards on every polarization qubit the
computational outcomes of polarization and path reveal the two GHZ
indices.
"""

from __future__ import annotations

import string
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Sequence

import numpy as np

from . import cavity, optics
from .cavity import InteractionMode
from .states import (
    MINUS,
    PLUS,
    Basis,
    Kind,
    CompositionError,
    PureState,
    apply_joint,
    enumerate_outcomes,
    ghz_count,
    ghz_index_of,
    ghz_pattern,
    make_hyper_ghz,
    measure,
    path,
    pol,
    project_unnormalized,
    qubit_state,
    spin,
    tensor,
)

SPIN1 = spin("1")
SPIN2 = spin("2")
PRECONDITION_TOL = 1e-10


def default_photons(n: int = 3) -> tuple[str, ...]:
    if not 2 <= n <= 26:
        raise ValueError(f"photon count must be in 2..26, got {n}")
    return tuple(string.ascii_uppercase[:n])


def sign_char(s: int) -> str:
    return "+" if s > 0 else "-"


def parse_sign(c) -> int:
    if c in ("+", 1):
        return 1
    if c in ("-", -1):
        return -1
    raise ValueError(f"sign must be '+' or '-', got {c!r}")


@dataclass(frozen=True, order=True)
class Classification:
    i: int
    pol_sign: int
    j: int
    spat_sign: int

    def __post_init__(self):
        for s in (self.pol_sign, self.spat_sign):
            if s not in (1, -1):
                raise ValueError(f"signs must be +1 or -1, got {s}")

    def __str__(self) -> str:
        return f"{self.i}:{sign_char(self.pol_sign)}:{self.j}:{sign_char(self.spat_sign)}"

    @classmethod
    def parse(cls, text: str, n: int = 3) -> "Classification":
        parts = text.strip().split(":")
        if len(parts) != 4:
            raise ValueError(f"expected i:sign:j:sign, got {text!r}")
        top = ghz_count(n)
        try:
            i, j = int(parts[0]), int(parts[2])
        except ValueError:
            raise ValueError(f"indices must be integers in 1..{top}, got {text!r}") from None
        for idx in (i, j):
            if not 1 <= idx <= top:
                raise ValueError(f"index {idx} out of range; valid indices are 1..{top}")
        return cls(i, parse_sign(parts[1]), j, parse_sign(parts[3]))

    def state(self, photons: Sequence[str] = ("A", "B", "C")) -> PureState:
        return make_hyper_ghz(self.i, self.pol_sign, self.j, self.spat_sign, photons)


def all_labels(n: int = 3) -> list[Classification]:
    k = ghz_count(n)
    return [Classification(i, s, j, t)
            for i in range(1, k + 1) for s in (1, -1)
            for j in range(1, k + 1) for t in (1, -1)]


@dataclass(frozen=True)
class AnalysisRecord:
    spin1: str
    spin2: str
    pol: tuple[str, ...]
    path: tuple[int, ...]

    @property
    def n(self) -> int:
        return len(self.pol)

    def as_dict(self, label: Classification | None = None) -> dict[str, str]:
        d = {
            "spin1": self.spin1,
            "spin2": self.spin2,
            "pol": "".join(self.pol),
            "path": ",".join(map(str, self.path)),
        }
        if label is not None:
            d.update(i=str(label.i), pol_sign=sign_char(label.pol_sign),
                     j=str(label.j), spat_sign=sign_char(label.spat_sign))
        return d


# ---------------------------------------------------------------- stage 1

def _eps(index: int, n: int) -> int:
    return -1 if sum(ghz_pattern(index, n)) % 2 else 1


@lru_cache(maxsize=8)
def stage1_matrix(n: int = 3) -> np.ndarray:
    """Explicit DOF-swap unitary on (pol x n, path x n, spin1).

    |Psi_i^s>|Phi_j^t>|m> -> phase |Psi_j^-t>|Phi_i^-s>|m'>, where the spin
    value m' equals m flipped between |+> and |-> exactly when s == t and
    the phase is -eps_i eps_j t with eps_k the parity of the number of
    L's in the leading ket of index k.
    """
    photons = default_photons(n)
    k = ghz_count(n)
    dim = 2 ** (2 * n + 1)
    u = np.zeros((dim, dim), dtype=complex)
    spins = (PLUS, MINUS)
    for i in range(1, k + 1):
        for j in range(1, k + 1):
            phase_ij = -_eps(i, n) * _eps(j, n)
            for s in (1, -1):
                for t in (1, -1):
                    src = make_hyper_ghz(i, s, j, t, photons).amplitudes
                    dst = make_hyper_ghz(j, -t, i, -s, photons).amplitudes
                    for m in (0, 1):
                        m_out = 1 - m if s == t else m
                        u += phase_ij * t * np.outer(
                            np.kron(dst, spins[m_out]), np.kron(src, spins[m]).conj()
                        )
    u.setflags(write=False)
    return u


def _stage_targets(photons: Sequence[str], spin_sub) -> list:
    return [pol(p) for p in photons] + [path(p) for p in photons] + [spin_sub]


def _require_plus(state: PureState, spin_sub) -> None:
    if spin_sub not in state:
        raise CompositionError(f"{spin_sub} is not part of the state")
    leak = project_unnormalized(state, qubit_state(spin_sub, MINUS)).norm_squared()
    if leak > PRECONDITION_TOL * max(state.norm_squared(), 1.0):
        raise ValueError(f"{spin_sub} must be prepared in |+>, found |->-weight {leak:.3e}")


def stage1_swap(state: PureState, photons: Sequence[str] = ("A", "B", "C")) -> PureState:
    _require_plus(state, SPIN1)
    return apply_joint(stage1_matrix(len(photons)), state, _stage_targets(photons, SPIN1))


def stage1_primitive(state: PureState, photons: Sequence[str] = ("A", "B", "C"),
                     mode: InteractionMode | None = None) -> PureState:
    """Stage 1 built from cavity-1 scattering, each photon's path serving as its port."""
    mode = mode or InteractionMode.ideal()
    for p in photons:
        state = cavity.double_sided_interaction(state, p, path(p), SPIN1, mode)
    return state


# ---------------------------------------------------------------- stage 2

def stage2_phase(state: PureState, photons: Sequence[str] = ("A", "B", "C"),
                 mode: InteractionMode | None = None, check: bool = True) -> PureState:
    if check:
        _require_plus(state, SPIN2)
    mode = mode or InteractionMode.ideal()
    for p in photons:
        state = optics.wp(state, p)
        state = cavity.single_sided_interaction(state, p, SPIN2, mode)
    return state


def spin2_readout(n: int) -> tuple[Basis, str]:
    """Basis for spin 2 and the outcome label flagging a + polarization sign.

    Each photon in stage 2 rotates spin 2 by a quarter turn, so after n
    photons the + sign leaves spin 2 in (up + (-i)^n down)/sqrt2.
    """
    return {
        0: (Basis.PLUS_MINUS, "+"),
        1: (Basis.PLUS_MINUS_PRIME, "-'"),
        2: (Basis.PLUS_MINUS, "-"),
        3: (Basis.PLUS_MINUS_PRIME, "+'"),
    }[n % 4]


# ---------------------------------------------------------------- decode

def decode_rule(record: AnalysisRecord) -> Classification:
    """Generating rule behind the lookup table."""
    n = record.n
    _, plus_label = spin2_readout(n)
    spat_sign = -1 if record.spin2 == plus_label else 1
    pol_sign = spat_sign if record.spin1 == "-" else -spat_sign
    j = ghz_index_of([0 if x == "R" else 1 for x in record.pol])
    i = ghz_index_of([b - 1 for b in record.path])
    return Classification(i, pol_sign, j, spat_sign)


def all_records(n: int = 3) -> list[AnalysisRecord]:
    basis, _ = spin2_readout(n)
    s2 = [basis.outcome_label(0), basis.outcome_label(1)]
    out = []
    for s1 in ("+", "-"):
        for sp2 in s2:
            for pbits in np.ndindex(*(2,) * n):
                for qbits in np.ndindex(*(2,) * n):
                    out.append(AnalysisRecord(
                        s1, sp2, tuple("RL"[b] for b in pbits), tuple(b + 1 for b in qbits)
                    ))
    return out


@lru_cache(maxsize=4)
def decode_table(n: int = 3) -> dict[AnalysisRecord, Classification]:
    return {r: decode_rule(r) for r in all_records(n)}


def decode(record: AnalysisRecord) -> Classification:
    try:
        return decode_table(record.n)[record]
    except KeyError:
        raise ValueError(f"malformed analysis record {record}") from None


# ---------------------------------------------------------------- pipeline

TraceHook = Callable[[str, PureState], None]


def evolve(state: PureState, photons: Sequence[str] = ("A", "B", "C"),
           mode: InteractionMode | None = None, primitive_stage1: bool = False,
           trace: TraceHook | None = None) -> PureState:
    """Everything before the terminal measurements (the final Hadamards included).

    The Hadamards act only on photons, so applying them before the spin
    readout does not change any outcome statistics.
    """
    mode = mode or InteractionMode.ideal()
    emit = trace or (lambda *_: None)
    st = tensor(state, qubit_state(SPIN1, PLUS))
    emit("input", st)
    if primitive_stage1 or not mode.is_ideal:
        st = stage1_primitive(st, photons, mode)
    else:
        st = stage1_swap(st, photons)
    emit("stage1", st)
    st = optics.on_all(optics.qwp, st, photons)
    emit("qwp", st)
    st = tensor(st, qubit_state(SPIN2, PLUS))
    st = stage2_phase(st, photons, mode)
    emit("stage2", st)
    st = optics.on_all(optics.qwp, st, photons)
    emit("hadamard", st)
    return st


def _measured(photons: Sequence[str]):
    n = len(photons)
    basis2, _ = spin2_readout(n)
    subs = [SPIN1, SPIN2] + [pol(p) for p in photons] + [path(p) for p in photons]
    bases = [Basis.PLUS_MINUS, basis2] + [Basis.COMPUTATIONAL] * (2 * n)
    return subs, bases


def _record(outcome: Sequence[int], n: int) -> AnalysisRecord:
    basis2, _ = spin2_readout(n)
    return AnalysisRecord(
        Basis.PLUS_MINUS.outcome_label(outcome[0]),
        basis2.outcome_label(outcome[1]),
        tuple("RL"[b] for b in outcome[2:2 + n]),
        tuple(b + 1 for b in outcome[2 + n:]),
    )


def run_hgsa(state: PureState, seed=0, photons: Sequence[str] | None = None,
             mode: InteractionMode | None = None, primitive_stage1: bool = False,
             trace: TraceHook | None = None) -> tuple[AnalysisRecord, Classification]:
    """Single sampled run of the analyzer on ``state``."""
    photons = tuple(photons or state.owners(Kind.POL))
    final = evolve(state, photons, mode, primitive_stage1, trace)
    rng = np.random.default_rng(seed)
    subs, bases = _measured(photons)
    outcome = []
    for sub, basis in zip(subs, bases):
        m = measure(final, sub, basis, rng)
        outcome.append(m.result)
        final = m.post_state
    rec = _record(outcome, len(photons))
    if trace:
        trace("measured", final)
    return rec, decode(rec)


@dataclass(frozen=True)
class AnalysisBranch:
    record: AnalysisRecord
    probability: float
    label: Classification


def analyze_exhaustive(state: PureState, photons: Sequence[str] | None = None,
                       mode: InteractionMode | None = None,
                       primitive_stage1: bool = False) -> list[AnalysisBranch]:
    """Every measurement branch above 1e-12 with its absolute probability."""
    photons = tuple(photons or state.owners(Kind.POL))
    final = evolve(state, photons, mode, primitive_stage1)
    subs, bases = _measured(photons)
    out = []
    for br in enumerate_outcomes(final, subs, bases):
        rec = _record(br.outcome, len(photons))
        out.append(AnalysisBranch(rec, br.probability, decode(rec)))
    return out
