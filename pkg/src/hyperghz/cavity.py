"""Spin-cavity units: input-output coefficients and photon-spin scattering maps.

All rates and frequencies are in units of the cavity decay rate kappa and
measured from the cavity resonance (omega_c = 0).

Double-sided unit
    Each photon has a polarization qubit, a *port* qubit (0 = the side the
    photon enters from, 1 = the opposite side) and interacts with one spin.
    With R = 0, L = 1 and up = 0, the photon is coupled to the dot exactly
    when ``pol ^ port ^ spin == 0``.  A reflected photon keeps its port and
    has its circular polarization flipped (its propagation direction
    reverses); a transmitted photon keeps its polarization and changes port.

Single-sided unit
    One port only.  The photon is always reflected with its polarization
    flipped.  The photon is coupled when ``pol ^ spin == 1`` and picks up
    ``r_h'`` (coupled) or ``r_0'`` (uncoupled).
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.optimize import brentq, newton

from .states import PureState, Subsystem, apply_joint, path, pol, spin

ROOT_TOL = 1e-9
SCAN_SPAN = 5.0
SCAN_STEP = 0.01


class ConditionUnsatisfiable(RuntimeError):
    """No detuning in the search window meets the requested condition."""


@dataclass(frozen=True)
class CavityParams:
    g: float
    kappa_s: float = 0.0
    gamma: float = 0.1
    omega: float = 0.0
    kappa: float = 1.0
    omega_c: float = 0.0
    omega_x: float = 0.0

    def __post_init__(self):
        if self.g < 0:
            raise ValueError(f"g must be non-negative, got {self.g}")
        if self.kappa <= 0:
            raise ValueError(f"kappa must be positive, got {self.kappa}")
        if self.kappa_s < 0:
            raise ValueError(f"kappa_s must be non-negative, got {self.kappa_s}")
        if self.gamma <= 0:
            raise ValueError(f"gamma must be positive, got {self.gamma}")

    def at(self, omega: float) -> "CavityParams":
        return CavityParams(self.g, self.kappa_s, self.gamma, omega,
                            self.kappa, self.omega_c, self.omega_x)

    @classmethod
    def from_ratio(cls, g_over_ktot: float, kappa_s: float, gamma: float = 0.1,
                   omega: float = 0.0) -> "CavityParams":
        """Build from g/(kappa + kappa_s) with kappa = 1."""
        return cls(g=g_over_ktot * (1.0 + kappa_s), kappa_s=kappa_s, gamma=gamma, omega=omega)


@dataclass(frozen=True)
class DoubleSidedCoeffs:
    r_h: complex
    t_h: complex
    r_0: complex
    t_0: complex


@dataclass(frozen=True)
class SingleSidedCoeffs:
    r_h_prime: complex
    r_0_prime: complex


IDEAL_DOUBLE = DoubleSidedCoeffs(r_h=1, t_h=0, r_0=0, t_0=-1)
IDEAL_SINGLE = SingleSidedCoeffs(r_h_prime=1, r_0_prime=1j)


class InteractionMode:
    """Either ideal truth-table scattering or physical scattering with given coefficients."""

    class Kind(enum.Enum):
        IDEAL = "ideal"
        PHYSICAL = "physical"

    __slots__ = ("kind", "double", "single")

    def __init__(self, kind: "InteractionMode.Kind", double: DoubleSidedCoeffs = IDEAL_DOUBLE,
                 single: SingleSidedCoeffs = IDEAL_SINGLE):
        self.kind = kind
        self.double = double
        self.single = single

    @classmethod
    def ideal(cls) -> "InteractionMode":
        return cls(cls.Kind.IDEAL)

    @classmethod
    def physical(cls, double: DoubleSidedCoeffs, single: SingleSidedCoeffs) -> "InteractionMode":
        return cls(cls.Kind.PHYSICAL, double, single)

    @property
    def is_ideal(self) -> bool:
        return self.kind is self.Kind.IDEAL

    def __repr__(self) -> str:
        if self.is_ideal:
            return "InteractionMode.ideal()"
        return f"InteractionMode.physical({self.double}, {self.single})"


def _dipole(p: CavityParams) -> complex:
    return 1j * (p.omega_x - p.omega) + p.gamma / 2


def double_sided_coeffs(p: CavityParams) -> DoubleSidedCoeffs:
    d = _dipole(p)
    c = 1j * (p.omega_c - p.omega) + p.kappa + p.kappa_s / 2
    t_h = -p.kappa * d / (d * c + p.g**2)
    r_h = 1 + t_h
    t_0 = -p.kappa / c
    r_0 = (1j * (p.omega_c - p.omega) + p.kappa_s / 2) / c
    return DoubleSidedCoeffs(complex(r_h), complex(t_h), complex(r_0), complex(t_0))


def single_sided_coeffs(p: CavityParams) -> SingleSidedCoeffs:
    d = _dipole(p)
    c = 1j * (p.omega_c - p.omega) + p.kappa / 2 + p.kappa_s / 2
    r_h = 1 - p.kappa * d / (d * c + p.g**2)
    # the g = 0 limit of r_h; a lossless empty cavity reflects everything
    r_0 = (1j * (p.omega_c - p.omega) - p.kappa / 2 + p.kappa_s / 2) / c
    return SingleSidedCoeffs(complex(r_h), complex(r_0))


@lru_cache(maxsize=64)
def _double_matrix(c: DoubleSidedCoeffs) -> np.ndarray:
    m = np.zeros((8, 8), dtype=complex)
    for p in (0, 1):
        for s in (0, 1):
            for sp in (0, 1):
                coupled = (p ^ s ^ sp) == 0
                r, t = (c.r_h, c.t_h) if coupled else (c.r_0, c.t_0)
                src = 4 * p + 2 * s + sp
                m[4 * (1 - p) + 2 * s + sp, src] += r
                m[4 * p + 2 * (1 - s) + sp, src] += t
    m.setflags(write=False)
    return m


@lru_cache(maxsize=64)
def _single_matrix(c: SingleSidedCoeffs) -> np.ndarray:
    m = np.zeros((4, 4), dtype=complex)
    for p in (0, 1):
        for sp in (0, 1):
            coupled = (p ^ sp) == 1
            m[2 * (1 - p) + sp, 2 * p + sp] = c.r_h_prime if coupled else c.r_0_prime
    m.setflags(write=False)
    return m


def double_sided_matrix(c: DoubleSidedCoeffs = IDEAL_DOUBLE) -> np.ndarray:
    """8x8 scattering matrix on (pol, port, spin), pol most significant."""
    return _double_matrix(c)


def single_sided_matrix(c: SingleSidedCoeffs = IDEAL_SINGLE) -> np.ndarray:
    """4x4 scattering matrix on (pol, spin)."""
    return _single_matrix(c)


def _port(photon, direction) -> Subsystem:
    if direction is None:
        return path(photon)
    return direction if isinstance(direction, Subsystem) else path(direction)


def _spin(s) -> Subsystem:
    return s if isinstance(s, Subsystem) else spin(s)


def ideal_double_sided_interaction(state: PureState, photon, direction, spin_owner) -> PureState:
    return physical_double_sided_interaction(state, photon, direction, spin_owner, IDEAL_DOUBLE)


def physical_double_sided_interaction(state: PureState, photon, direction, spin_owner,
                                      c: DoubleSidedCoeffs) -> PureState:
    """Scatter one photon off a double-sided unit; lossy output is not renormalized."""
    targets = [pol(photon), _port(photon, direction), _spin(spin_owner)]
    return apply_joint(double_sided_matrix(c), state, targets)


def ideal_single_sided_interaction(state: PureState, photon, spin_owner) -> PureState:
    return physical_single_sided_interaction(state, photon, spin_owner, IDEAL_SINGLE)


def physical_single_sided_interaction(state: PureState, photon, spin_owner,
                                      c: SingleSidedCoeffs) -> PureState:
    return apply_joint(single_sided_matrix(c), state, [pol(photon), _spin(spin_owner)])


def double_sided_interaction(state, photon, direction, spin_owner, mode: InteractionMode):
    return physical_double_sided_interaction(state, photon, direction, spin_owner, mode.double)


def single_sided_interaction(state, photon, spin_owner, mode: InteractionMode):
    return physical_single_sided_interaction(state, photon, spin_owner, mode.single)


# ---------------------------------------------------------------- detuning solvers

def _scan_grid(lo: float, hi: float, kappa: float) -> np.ndarray:
    n = int(round((hi - lo) / (SCAN_STEP * kappa)))
    return np.linspace(lo, hi, n + 1)


def balance_residual(p: CavityParams, omega: float) -> float:
    c = double_sided_coeffs(p.at(omega))
    return abs(c.t_0) - abs(c.r_h)


def balanced_roots(p: CavityParams) -> list[float]:
    """Every omega in [0, 5kappa] with |t_0(omega)| = |r_h(omega)|, ascending."""
    if p.g <= 0:
        raise ValueError("balanced detuning needs g > 0")
    f = lambda w: balance_residual(p, w)  # noqa: E731
    grid = _scan_grid(0.0, SCAN_SPAN * p.kappa, p.kappa)
    vals = np.array([f(w) for w in grid])
    roots = [0.0] if vals[0] == 0 else []
    for k in range(len(grid) - 1):
        if vals[k + 1] == 0:
            roots.append(float(grid[k + 1]))
        elif vals[k] * vals[k + 1] < 0:
            roots.append(float(brentq(f, grid[k], grid[k + 1], xtol=1e-14, rtol=1e-15)))
    return roots


def solve_balanced_detuning(p: CavityParams) -> float:
    """Smallest omega >= 0 with |t_0(omega)| = |r_h(omega)|."""
    roots = balanced_roots(p)
    if roots:
        return roots[0]
    grid = _scan_grid(0.0, SCAN_SPAN * p.kappa, p.kappa)
    res = np.array([abs(balance_residual(p, w)) for w in grid])
    best = int(np.argmin(res))
    raise ConditionUnsatisfiable(
        f"|t0| = |r_h| has no root in [0, {SCAN_SPAN}kappa]; "
        f"min residual {res[best]:.3e} at omega = {grid[best]:.3f}"
    )


def phase_gap(p: CavityParams, omega: float) -> float:
    """arg r_0' - arg r_h' - pi/2, wrapped into [-pi, pi)."""
    c = single_sided_coeffs(p.at(omega))
    d = np.angle(c.r_0_prime) - np.angle(c.r_h_prime) - math.pi / 2
    return float((d + math.pi) % (2 * math.pi) - math.pi)


def pi_half_roots(p: CavityParams) -> list[float]:
    """Every detuning in [-5kappa, 5kappa] where the phase gap crosses zero."""
    f = lambda w: phase_gap(p, w)  # noqa: E731
    grid = _scan_grid(-SCAN_SPAN * p.kappa, SCAN_SPAN * p.kappa, p.kappa)
    vals = np.array([f(w) for w in grid])
    roots = []
    for k in range(len(grid) - 1):
        a, b = vals[k], vals[k + 1]
        if a == 0:
            roots.append(float(grid[k]))
        elif a * b < 0 and abs(a - b) < math.pi:  # skip the +-pi wrap
            roots.append(float(brentq(f, grid[k], grid[k + 1], xtol=1e-14, rtol=1e-15)))
    return roots


def solve_pi_half_detuning(p: CavityParams) -> float:
    """Detuning where r_0' leads r_h' by pi/2.

    When several detunings qualify, the one with the most nearly equal
    reflection magnitudes is returned, since that is where the phase gate
    is least distorted.
    """
    if p.g <= 0:
        raise ValueError("pi/2 detuning needs g > 0")
    roots = pi_half_roots(p)
    if not roots:
        f = lambda w: phase_gap(p, w)  # noqa: E731
        for guess in (p.kappa / 2, -p.kappa / 2):
            try:
                w = float(newton(f, guess, tol=1e-13, maxiter=100))
            except (RuntimeError, OverflowError):
                continue
            if abs(f(w)) < ROOT_TOL:
                roots = [w]
                break
    if not roots:
        grid = _scan_grid(-SCAN_SPAN * p.kappa, SCAN_SPAN * p.kappa, p.kappa)
        gaps = [phase_gap(p, w) + math.pi / 2 for w in grid]
        raise ConditionUnsatisfiable(
            f"phase difference arg(r0')-arg(r_h') spans [{min(gaps):.4f}, {max(gaps):.4f}] rad "
            f"on [-{SCAN_SPAN}, {SCAN_SPAN}]kappa and never reaches pi/2"
        )

    def imbalance(w):
        c = single_sided_coeffs(p.at(w))
        return abs(abs(c.r_h_prime) - abs(c.r_0_prime))

    return min(roots, key=imbalance)
