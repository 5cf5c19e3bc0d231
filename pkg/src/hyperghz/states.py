"""Dense state vectors over labelled two-level subsystems.

Every photon carries a polarization qubit (basis order R, L) and a
spatial-mode qubit (basis order x1, x2); every quantum-dot electron carries
a spin qubit (basis order up, down).  A :class:`PureState` is an immutable
amplitude vector together with the ordered tuple of subsystem labels, the
first label being the most significant index.
"""

from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

UNITARY_TOL = 1e-10
PROB_TOL = 1e-9
BRANCH_CUTOFF = 1e-12

SQRT1_2 = 1 / np.sqrt(2)


class CompositionError(ValueError):
    """Raised when subsystems clash or are missing."""


class Kind(enum.Enum):
    POL = "P"
    PATH = "S"
    SPIN = "spin"


@dataclass(frozen=True)
class Subsystem:
    kind: Kind
    owner: str

    def basis_labels(self) -> tuple[str, str]:
        if self.kind is Kind.POL:
            return ("R", "L")
        if self.kind is Kind.SPIN:
            return ("↑", "↓")
        stem = self.owner.lower() if self.owner.isalpha() else f"{self.owner}:"
        return (f"{stem}1", f"{stem}2")

    def __str__(self) -> str:
        return f"{self.kind.value}[{self.owner}]"


def pol(owner) -> Subsystem:
    return Subsystem(Kind.POL, str(owner))


def path(owner) -> Subsystem:
    return Subsystem(Kind.PATH, str(owner))


def spin(owner) -> Subsystem:
    return Subsystem(Kind.SPIN, str(owner))


class Basis(enum.Enum):
    """Single-qubit measurement bases.

    Outcome 0 of ``PLUS_MINUS`` is (up + down)/sqrt2 and outcome 0 of
    ``PLUS_MINUS_PRIME`` is (up + i down)/sqrt2.
    """

    COMPUTATIONAL = "Z"
    PLUS_MINUS = "X"
    PLUS_MINUS_PRIME = "Y"

    @property
    def vectors(self) -> np.ndarray:
        """Columns are the outcome vectors, outcome 0 first."""
        return _BASIS_VECTORS[self]

    def outcome_label(self, k: int) -> str:
        return _BASIS_LABELS[self][k]


_BASIS_VECTORS = {
    Basis.COMPUTATIONAL: np.eye(2, dtype=complex),
    Basis.PLUS_MINUS: np.array([[1, 1], [1, -1]], dtype=complex) * SQRT1_2,
    Basis.PLUS_MINUS_PRIME: np.array([[1, 1], [1j, -1j]], dtype=complex) * SQRT1_2,
}
_BASIS_LABELS = {
    Basis.COMPUTATIONAL: ("0", "1"),
    Basis.PLUS_MINUS: ("+", "-"),
    Basis.PLUS_MINUS_PRIME: ("+'", "-'"),
}

PLUS = _BASIS_VECTORS[Basis.PLUS_MINUS][:, 0]
MINUS = _BASIS_VECTORS[Basis.PLUS_MINUS][:, 1]
PLUS_PRIME = _BASIS_VECTORS[Basis.PLUS_MINUS_PRIME][:, 0]
MINUS_PRIME = _BASIS_VECTORS[Basis.PLUS_MINUS_PRIME][:, 1]


@dataclass(frozen=True, eq=False)
class PureState:
    subsystems: tuple[Subsystem, ...]
    amplitudes: np.ndarray

    def __post_init__(self):
        subs = tuple(self.subsystems)
        if len(set(subs)) != len(subs):
            raise CompositionError(f"duplicate subsystem labels in {[str(s) for s in subs]}")
        amps = np.array(self.amplitudes, dtype=complex).reshape(-1)
        if amps.size != 2 ** len(subs):
            raise CompositionError(
                f"{amps.size} amplitudes do not match {len(subs)} subsystems"
            )
        amps.setflags(write=False)
        object.__setattr__(self, "subsystems", subs)
        object.__setattr__(self, "amplitudes", amps)

    @property
    def n(self) -> int:
        return len(self.subsystems)

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def norm_squared(self) -> float:
        return float(np.vdot(self.amplitudes, self.amplitudes).real)

    def normalized(self) -> "PureState":
        nrm = self.norm()
        if nrm == 0:
            raise ValueError("cannot normalize a zero-norm state")
        return PureState(self.subsystems, self.amplitudes / nrm)

    def tensor(self) -> np.ndarray:
        return self.amplitudes.reshape((2,) * self.n)

    def index(self, sub: Subsystem) -> int:
        try:
            return self.subsystems.index(sub)
        except ValueError:
            raise CompositionError(f"subsystem {sub} not present") from None

    def __contains__(self, sub) -> bool:
        return sub in self.subsystems

    def amplitude(self, values: dict[Subsystem, int]) -> complex:
        """Amplitude of the basis ket fixed by ``values`` (must cover every subsystem)."""
        if set(values) != set(self.subsystems):
            raise CompositionError("amplitude lookup must fix every subsystem")
        return complex(self.tensor()[tuple(values[s] for s in self.subsystems)])

    def owners(self, kind: Kind) -> list[str]:
        return [s.owner for s in self.subsystems if s.kind is kind]

    def __str__(self) -> str:
        return format_ket(self)


def basis_state(sub: Subsystem, value: int) -> PureState:
    amps = np.zeros(2, dtype=complex)
    amps[value] = 1
    return PureState((sub,), amps)


def qubit_state(sub: Subsystem, vector) -> PureState:
    return PureState((sub,), np.asarray(vector, dtype=complex))


def tensor(a: PureState, b: PureState, *more: PureState) -> PureState:
    """Tensor product; subsystem order is ``a`` followed by ``b`` (and ``more``)."""
    out = a
    for nxt in (b, *more):
        clash = set(out.subsystems) & set(nxt.subsystems)
        if clash:
            raise CompositionError(f"subsystems {sorted(map(str, clash))} appear in both factors")
        out = PureState(out.subsystems + nxt.subsystems, np.kron(out.amplitudes, nxt.amplitudes))
    return out


def product(states: Iterable[PureState]) -> PureState:
    states = list(states)
    if not states:
        raise ValueError("empty product")
    if len(states) == 1:
        return states[0]
    return tensor(*states)


def reorder(state: PureState, order: Sequence[Subsystem]) -> PureState:
    order = tuple(order)
    if sorted(order, key=str) != sorted(state.subsystems, key=str):
        raise CompositionError("reorder must be a permutation of the subsystems")
    perm = [state.index(s) for s in order]
    return PureState(order, np.transpose(state.tensor(), perm).reshape(-1))


def apply_joint(matrix, state: PureState, targets: Sequence[Subsystem]) -> PureState:
    """Apply a 2^k x 2^k matrix to the named subsystems (first target most significant)."""
    targets = tuple(targets)
    k = len(targets)
    if len(set(targets)) != k:
        raise CompositionError("target subsystems must be distinct")
    matrix = np.asarray(matrix, dtype=complex)
    if matrix.shape != (2**k, 2**k):
        raise CompositionError(f"matrix shape {matrix.shape} does not act on {k} subsystems")
    axes = [state.index(t) for t in targets]
    op = matrix.reshape((2,) * (2 * k))
    moved = np.tensordot(op, state.tensor(), axes=(list(range(k, 2 * k)), axes))
    # tensordot puts the k output axes first
    out = np.moveaxis(moved, list(range(k)), axes)
    return PureState(state.subsystems, out.reshape(-1))


def inner(a: PureState, b: PureState) -> complex:
    """<a|b>, matching subsystems by label."""
    if set(a.subsystems) != set(b.subsystems):
        raise CompositionError("inner product needs identical subsystem sets")
    b = reorder(b, a.subsystems)
    return complex(np.vdot(a.amplitudes, b.amplitudes))


def fidelity(a: PureState, b: PureState) -> float:
    """|<a|b>|^2 / (|a|^2 |b|^2); equals 1 iff the states agree up to a global phase."""
    return abs(inner(a, b)) ** 2 / (a.norm_squared() * b.norm_squared())


def same_up_to_phase(a: PureState, b: PureState, tol: float = UNITARY_TOL) -> bool:
    return abs(fidelity(a, b) - 1) < tol


def project(state: PureState, target: PureState) -> tuple[float, PureState | None]:
    """Contract ``state`` with <target| over target's subsystems.

    Returns the branch probability and the renormalized remainder, or
    ``(0.0, None)`` when the branch is empty.
    """
    axes = [state.index(s) for s in target.subsystems]
    rest = tuple(s for s in state.subsystems if s not in target.subsystems)
    tgt = np.conj(target.tensor())
    amps = np.tensordot(tgt, state.tensor(), axes=(list(range(target.n)), axes)).reshape(-1)
    prob = float(np.vdot(amps, amps).real)
    if not rest:
        raise CompositionError("projection would leave no subsystems")
    if prob <= BRANCH_CUTOFF:
        return 0.0, None
    return prob, PureState(rest, amps / np.sqrt(prob))


def project_unnormalized(state: PureState, target: PureState) -> PureState:
    axes = [state.index(s) for s in target.subsystems]
    rest = tuple(s for s in state.subsystems if s not in target.subsystems)
    tgt = np.conj(target.tensor())
    amps = np.tensordot(tgt, state.tensor(), axes=(list(range(target.n)), axes))
    return PureState(rest, amps.reshape(-1))


@dataclass(frozen=True)
class MeasurementOutcome:
    subsystem: Subsystem
    basis: Basis
    result: int
    probability: float
    post_state: PureState

    @property
    def label(self) -> str:
        if self.basis is Basis.COMPUTATIONAL:
            return self.subsystem.basis_labels()[self.result]
        return self.basis.outcome_label(self.result)


def _rng(seed) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


def _projector(basis: Basis, k: int) -> np.ndarray:
    v = basis.vectors[:, k]
    return np.outer(v, v.conj())


def measure(state: PureState, subsystem: Subsystem, basis: Basis = Basis.COMPUTATIONAL,
            rng_seed=0) -> MeasurementOutcome:
    """Projective measurement of one subsystem with a seeded Born-rule draw.

    The reported probability is the squared norm of the projected component.
    A lossy (sub-normalized) state is sampled conditional on survival.  The
    measured subsystem stays in the post-state, collapsed onto the outcome
    vector.
    """
    if state.norm_squared() <= 0:
        raise ValueError("cannot measure a zero-norm state")
    projected = [apply_joint(_projector(basis, k), state, [subsystem]) for k in (0, 1)]
    probs = np.array([p.norm_squared() for p in projected])
    k = int(_rng(rng_seed).choice(2, p=probs / probs.sum()))
    post = projected[k].normalized()
    return MeasurementOutcome(subsystem, basis, k, float(probs[k]), post)


@dataclass(frozen=True)
class Branch:
    outcome: tuple[int, ...]
    probability: float
    post_state: PureState


def enumerate_outcomes(state: PureState, subsystems: Sequence[Subsystem],
                       bases: Sequence[Basis] | Basis = Basis.COMPUTATIONAL) -> list[Branch]:
    """All joint outcomes with probability above 1e-12.

    Probabilities are absolute (they sum to the squared norm of ``state``);
    post-states are renormalized projections that keep the measured
    subsystems.
    """
    subsystems = tuple(subsystems)
    if isinstance(bases, Basis):
        bases = [bases] * len(subsystems)
    if len(set(subsystems)) != len(subsystems):
        raise CompositionError("measured subsystems must be distinct")
    if len(bases) != len(subsystems):
        raise ValueError("one basis per measured subsystem")
    # rotate each measured qubit so the outcome vectors become |0>, |1>
    rotated = state
    for sub, basis in zip(subsystems, bases):
        if basis is not Basis.COMPUTATIONAL:
            rotated = apply_joint(basis.vectors.conj().T, rotated, [sub])
    axes = [rotated.index(s) for s in subsystems]
    t = np.moveaxis(rotated.tensor(), axes, list(range(len(axes))))
    t = t.reshape(2 ** len(axes), -1)
    probs = np.einsum("ij,ij->i", t, t.conj()).real
    branches = []
    for flat, p in enumerate(probs):
        if p <= BRANCH_CUTOFF:
            continue
        outcome = tuple(int(b) for b in np.unravel_index(flat, (2,) * len(axes)))
        post = state
        for sub, basis, k in zip(subsystems, bases, outcome):
            post = apply_joint(_projector(basis, k), post, [sub])
        branches.append(Branch(outcome, float(p), post.normalized()))
    return branches


def _ghz_patterns(n: int) -> list[tuple[int, ...]]:
    """Leading ket of each GHZ index for n qubits (0 = R / x1, 1 = L / x2)."""
    if n < 2:
        raise ValueError("GHZ families need at least two photons")
    if n == 3:
        return [(0, 0, 0), (0, 0, 1), (0, 1, 0), (1, 0, 0)]
    return [(0,) + bits for bits in itertools.product((0, 1), repeat=n - 1)]


def ghz_pattern(index: int, n: int = 3) -> tuple[int, ...]:
    patterns = _ghz_patterns(n)
    if not 1 <= index <= len(patterns):
        raise ValueError(f"GHZ index must be in 1..{len(patterns)} for {n} photons, got {index}")
    return patterns[index - 1]


def ghz_index_of(bits: Sequence[int]) -> int:
    """Index of the GHZ family whose two kets include ``bits``."""
    bits = tuple(int(b) for b in bits)
    comp = tuple(1 - b for b in bits)
    for k, pat in enumerate(_ghz_patterns(len(bits)), start=1):
        if pat in (bits, comp):
            return k
    raise ValueError(f"no GHZ index for {bits}")  # pragma: no cover


def ghz_count(n: int) -> int:
    return len(_ghz_patterns(n))


def _sign(sign) -> int:
    if sign in (1, "+", +1.0):
        return 1
    if sign in (-1, "-", -1.0):
        return -1
    raise ValueError(f"sign must be + or -, got {sign!r}")


def _ghz(subs: Sequence[Subsystem], pattern: Sequence[int], sign: int) -> PureState:
    t = np.zeros((2,) * len(subs), dtype=complex)
    t[tuple(pattern)] = SQRT1_2
    t[tuple(1 - b for b in pattern)] = sign * SQRT1_2
    return PureState(tuple(subs), t.reshape(-1))


def make_pol_ghz(i: int, sign, photons: Sequence = ("A", "B", "C"),
                 pattern: Sequence[int] | None = None) -> PureState:
    """Polarization GHZ state (|x> +/- |x-bar>)/sqrt2 for GHZ index ``i``.

    ``pattern`` overrides the leading ket, which is how the six-photon
    states with paired photons are built.
    """
    s = _sign(sign)
    pat = ghz_pattern(i, len(photons)) if pattern is None else tuple(pattern)
    return _ghz([pol(p) for p in photons], pat, s)


def make_spatial_ghz(j: int, sign, photons: Sequence = ("A", "B", "C"),
                     pattern: Sequence[int] | None = None) -> PureState:
    s = _sign(sign)
    pat = ghz_pattern(j, len(photons)) if pattern is None else tuple(pattern)
    return _ghz([path(p) for p in photons], pat, s)


def make_hyper_ghz(i: int, pol_sign, j: int, spat_sign,
                   photons: Sequence = ("A", "B", "C")) -> PureState:
    return tensor(make_pol_ghz(i, pol_sign, photons), make_spatial_ghz(j, spat_sign, photons))


def _ket_groups(subsystems: Sequence[Subsystem]) -> list[list[int]]:
    """Positions grouped per photon (polarization before path), spins last, one each."""
    photon_groups: dict[str, list[int]] = {}
    spins = []
    for k, s in enumerate(subsystems):
        if s.kind is Kind.SPIN:
            spins.append([k])
        else:
            photon_groups.setdefault(s.owner, []).append(k)
    groups = [sorted(g, key=lambda k: subsystems[k].kind is Kind.PATH)
              for g in photon_groups.values()]
    return groups + spins


def format_ket(state: PureState, tol: float = 1e-9, max_terms: int = 64) -> str:
    """Render as e.g. ``0.5|R a1⟩|R b1⟩|R c1⟩ + ...``: one ket per photon, then spins."""
    t = state.amplitudes
    nz = np.flatnonzero(np.abs(t) > tol)
    if nz.size == 0:
        return "0"
    groups = _ket_groups(state.subsystems)
    terms = []
    for flat in nz[:max_terms]:
        bits = np.unravel_index(flat, (2,) * state.n)
        kets = "".join(
            "|" + " ".join(state.subsystems[k].basis_labels()[bits[k]] for k in g) + "⟩"
            for g in groups
        )
        terms.append(f"{_fmt_complex(t[flat])}{kets}")
    out = " + ".join(terms).replace("+ -", "- ")
    if nz.size > max_terms:
        out += f" + ... ({nz.size - max_terms} more)"
    return out


def _fmt_complex(z: complex) -> str:
    re, im = round(z.real, 6), round(z.imag, 6)
    if abs(im) < 1e-9:
        return f"{re:g}"
    if abs(re) < 1e-9:
        return f"{im:g}i"
    return f"({re:g}{im:+g}i)"
