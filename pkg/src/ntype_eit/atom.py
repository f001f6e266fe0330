"""Rotating-frame Hamiltonian of the N-type atom and its eigenstructure.

Levels are indexed 0..3 for |1>..|4>: |1> and |3> are ground levels,
|2> and |4> excited.  The coupling field (Rabi frequency ``omega_a``)
drives |1>-|2>, the probe (``omega_b``) drives |3>-|2> and the driving
field (``omega_c``) drives |3>-|4>.
"""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "ParameterError",
    "SystemParams",
    "Eigensystem",
    "DarkState",
    "DarkStateReport",
    "DressedStates",
    "build_hamiltonian",
    "lambda_dark_state",
    "resonant_eigensystem",
    "quartic_residual",
    "detuned_cubic_residual",
    "dark_detunings",
    "detuned_dark_state",
    "dark_state_report",
    "dressed_states",
]

EIGEN_TOL = 1e-10
EXACT_TOL = 1e-12

RABI_FIELDS = ("omega_a", "omega_b", "omega_c")
DETUNING_FIELDS = ("delta_a", "delta_b", "delta_c")
DAMPING_FIELDS = ("gamma_a", "gamma_b", "gamma_c")


class ParameterError(ValueError):
    """Invalid physical parameters."""


@dataclass(frozen=True)
class SystemParams:
    """Drive and damping parameters in units of the reference rate gamma.

    ``gamma_a`` is the |2>->|1> decay, ``gamma_b`` the |2>->|3> decay and
    ``gamma_c`` the |4>->|3> decay.
    """

    omega_a: float = 0.0
    omega_b: float = 0.0
    omega_c: float = 0.0
    delta_a: float = 0.0
    delta_b: float = 0.0
    delta_c: float = 0.0
    gamma_a: float = 1.0
    gamma_b: float = 1.0
    gamma_c: float = 1.0

    def __post_init__(self):
        for name in RABI_FIELDS + DETUNING_FIELDS + DAMPING_FIELDS:
            value = getattr(self, name)
            try:
                value = float(value)
            except (TypeError, ValueError):
                raise ParameterError(f"{name} must be a real number, got {value!r}") from None
            if not math.isfinite(value):
                raise ParameterError(f"{name} must be finite, got {value}")
            if name not in DETUNING_FIELDS and value < 0:
                raise ParameterError(f"{name} must be non-negative, got {value}")
            object.__setattr__(self, name, value)

    def replace(self, **changes) -> "SystemParams":
        return dataclasses.replace(self, **changes)

    def as_dict(self) -> dict:
        return dataclasses.asdict(self)

    @classmethod
    def from_dict(cls, data: dict) -> "SystemParams":
        unknown = set(data) - {f.name for f in dataclasses.fields(cls)}
        if unknown:
            raise ParameterError(f"unknown parameter(s): {', '.join(sorted(unknown))}")
        return cls(**data)

    @property
    def resonant(self) -> bool:
        return self.delta_a == 0 and self.delta_b == 0 and self.delta_c == 0


def build_hamiltonian(params: SystemParams) -> np.ndarray:
    """Return the 4x4 rotating-frame Hamiltonian (hbar = 1, real Rabi frequencies)."""
    p = params
    h = np.zeros((4, 4), dtype=complex)
    h[0, 0] = p.delta_a
    h[2, 2] = p.delta_b
    h[3, 3] = p.delta_b - p.delta_c
    h[0, 1] = h[1, 0] = -0.5 * p.omega_a
    h[2, 1] = h[1, 2] = -0.5 * p.omega_b
    h[2, 3] = h[3, 2] = -0.5 * p.omega_c
    return h


def lambda_dark_state(omega_a: float, omega_b: float) -> np.ndarray:
    """Three-level dark state cos(theta)|1> - sin(theta)|3>, tan(theta) = omega_a/omega_b."""
    if omega_a < 0 or omega_b < 0:
        raise ParameterError("Rabi frequencies must be non-negative")
    if omega_a == 0 and omega_b == 0:
        raise ParameterError("dark state undefined when both Rabi frequencies vanish")
    theta = math.atan2(omega_a, omega_b)
    psi = np.zeros(4, dtype=complex)
    psi[0] = math.cos(theta)
    psi[2] = -math.sin(theta)
    return psi


@dataclass
class Eigensystem:
    """Eigenpairs of a Hamiltonian; ``eigenvectors[:, i]`` belongs to ``eigenvalues[i]``."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    hamiltonian: np.ndarray
    mixing_angles: list[tuple[float, float]] | None = None

    def residuals(self) -> np.ndarray:
        """``||H v - lambda v||`` for each pair."""
        h, v, lam = self.hamiltonian, self.eigenvectors, self.eigenvalues
        return np.linalg.norm(h @ v - v * lam, axis=0)

    def orthonormality_error(self) -> float:
        v = self.eigenvectors
        return float(np.abs(v.conj().T @ v - np.eye(v.shape[1])).max())

    def lower_weights(self) -> np.ndarray:
        """Population on the ground pair {|1>, |3>} for each eigenvector."""
        v = self.eigenvectors
        return np.abs(v[0]) ** 2 + np.abs(v[2]) ** 2


def quartic_residual(lam, omega_a: float, omega_b: float, omega_c: float):
    """Relative residual of the resonant eigenvalue quartic.

    (2l - Wa)(2l + Wa)(4l^2 - Wb^2 - Wc^2) = Wa^2 Wb^2, normalised by the
    summed magnitude of its terms.
    """
    lam = np.asarray(lam, dtype=float)
    a2, b2, c2 = omega_a**2, omega_b**2, omega_c**2
    l2 = 4 * lam**2
    lhs = (l2 - a2) * (l2 - b2 - c2)
    scale = (l2 + a2) * (l2 + b2 + c2) + a2 * b2
    with np.errstate(invalid="ignore", divide="ignore"):
        rel = np.abs(lhs - a2 * b2) / scale
    return np.where(scale > 0, rel, 0.0)


def detuned_cubic_residual(lam, omega_a: float, omega_b: float, omega_c: float, branch: int):
    """Relative residual of the cubic obeyed by the three non-dark eigenvalues
    when delta_b = branch * omega_c / 2 (delta_a = delta_c = 0)."""
    s = _branch_sign(branch)
    lam = np.asarray(lam, dtype=float)
    a2, b2 = omega_a**2, omega_b**2
    terms = [
        8 * lam**3,
        -s * 8 * omega_c * lam**2,
        -(2 * a2 + 2 * b2) * lam,
        s * (2 * a2 + b2) * omega_c,
    ]
    scale = sum(np.abs(t) for t in terms)
    with np.errstate(invalid="ignore", divide="ignore"):
        rel = np.abs(sum(terms)) / scale
    return np.where(scale > 0, rel, 0.0)


def _arctan_ratio(num: float, den: float) -> float:
    # arctan(num/den) with den -> 0 mapped to +-pi/2
    if den == 0:
        return math.copysign(math.pi / 2, num) if num != 0 else math.pi / 2
    return math.atan(num / den)


def resonant_eigensystem(params: SystemParams, *, tol: float = 1e-8) -> Eigensystem:
    """Diagonalise the fully resonant Hamiltonian and attach the mixing angles.

    Each non-zero eigenvalue splits its population equally between the ground
    pair and the excited pair, with cos/sin weights set by the two mixing
    angles. Raises ``ArithmeticError`` if a numerical eigenvalue misses the
    quartic by more than ``tol`` (relative).
    """
    if not params.resonant:
        raise ParameterError("resonant_eigensystem requires delta_a = delta_b = delta_c = 0")
    h = build_hamiltonian(params)
    lam, vecs = np.linalg.eigh(h)
    wa, wb, wc = params.omega_a, params.omega_b, params.omega_c

    res = quartic_residual(lam, wa, wb, wc)
    if np.any(res > tol):
        raise ArithmeticError(f"eigenvalues violate the resonant quartic (max residual {res.max():.3g})")

    angles = []
    for li in lam:
        theta1 = _arctan_ratio(wa * wb, wb**2 + wc**2 - 4 * li**2)
        theta2 = _arctan_ratio(wc * wb, wc**2 - 4 * li**2)
        angles.append((theta1, theta2))
    return Eigensystem(eigenvalues=lam, eigenvectors=vecs, hamiltonian=h, mixing_angles=angles)


def _branch_sign(branch) -> int:
    if branch in (1, "+", "plus"):
        return 1
    if branch in (-1, "-", "minus"):
        return -1
    raise ValueError(f"branch must be '+' or '-', got {branch!r}")


def dark_detunings(delta_c: float, omega_c: float) -> tuple[float, float]:
    """Probe detunings at which the Hamiltonian has a zero eigenvalue.

    Roots of delta_b^2 - delta_c delta_b - omega_c^2/4 = 0, returned as
    ``(plus, minus)`` with ``plus >= minus``.
    """
    if not (math.isfinite(delta_c) and math.isfinite(omega_c)):
        raise ParameterError("detuning and Rabi frequency must be finite")
    root = math.hypot(delta_c, omega_c)
    if delta_c == 0:
        return 0.5 * root, -0.5 * root
    # the small root comes from the product of roots to avoid cancellation
    big = 0.5 * (delta_c + math.copysign(root, delta_c))
    small = -0.25 * omega_c**2 / big
    return (big, small) if big > small else (small, big)


@dataclass
class DarkState:
    """One zero-energy eigenvector of the Hamiltonian."""

    branch: int
    detuning: float
    state: np.ndarray
    level2_leakage: float
    residual: float

    @property
    def ratios(self) -> tuple[complex, complex]:
        """(c1/c3, c4/c3) component ratios."""
        c = self.state
        return c[0] / c[2], c[3] / c[2]


@dataclass
class DarkStateReport:
    detunings: tuple[float, float]
    states: tuple[np.ndarray, np.ndarray]
    level2_leakage: tuple[float, float]
    residuals: tuple[float, float]
    dressed_angle: float
    generalized_rabi: float


def _null_vector(h: np.ndarray) -> tuple[np.ndarray, float]:
    _, s, vh = np.linalg.svd(h)
    if s[-2] <= EXACT_TOL * max(s[0], 1.0):
        raise ArithmeticError("Hamiltonian null space is not one-dimensional")
    return vh[-1].conj(), float(s[-1])


def _fix_phase(psi: np.ndarray) -> np.ndarray:
    # |3> component real positive; falls back to the largest component
    ref = psi[2] if abs(psi[2]) > EXACT_TOL else psi[np.argmax(np.abs(psi))]
    psi = psi * (abs(ref) / ref)
    return psi / np.linalg.norm(psi)


def detuned_dark_state(params: SystemParams, branch="+") -> DarkState:
    """Dark state of the four-level system on the chosen zero-energy branch.

    ``params.delta_b`` is replaced by the branch detuning from
    :func:`dark_detunings`; ``delta_a`` must be zero.
    """
    s = _branch_sign(branch)
    if params.delta_a != 0:
        raise ParameterError("detuned dark states require delta_a = 0")
    if params.omega_a == 0:
        raise ParameterError("omega_a = 0: ground-state ratio -omega_b/omega_a is undefined")
    plus, minus = dark_detunings(params.delta_c, params.omega_c)
    detuning = plus if s > 0 else minus
    p = params.replace(delta_b=detuning)
    h = build_hamiltonian(p)

    if p.omega_c == 0 and detuning == 0:
        psi = lambda_dark_state(p.omega_a, p.omega_b)
    else:
        psi, _ = _null_vector(h)
    psi = _fix_phase(psi)
    return DarkState(
        branch=s,
        detuning=detuning,
        state=psi,
        level2_leakage=float(abs(psi[1])),
        residual=float(np.linalg.norm(h @ psi)),
    )


def dark_state_report(params: SystemParams) -> DarkStateReport:
    plus = detuned_dark_state(params, "+")
    minus = detuned_dark_state(params, "-")
    if params.delta_c == 0 and params.omega_c == 0:
        angle = math.pi / 4
    else:
        angle = dressed_states(params.delta_c, params.omega_c).angle
    return DarkStateReport(
        detunings=(plus.detuning, minus.detuning),
        states=(plus.state, minus.state),
        level2_leakage=(plus.level2_leakage, minus.level2_leakage),
        residuals=(plus.residual, minus.residual),
        dressed_angle=angle,
        generalized_rabi=math.hypot(params.delta_c, params.omega_c),
    )


@dataclass
class DressedStates:
    """|3>,|4> dressed by the driving field.

    ``energies`` are the probe detunings at which |3'> and |4'> come into
    two-photon resonance with |1>; as a set they equal :func:`dark_detunings`.
    """

    angle: float
    energies: tuple[float, float]
    state3: np.ndarray
    state4: np.ndarray
    generalized_rabi: float


def dressed_states(delta_c: float, omega_c: float) -> DressedStates:
    """Rotate |3>,|4> into the eigenbasis of the driving-field block.

    |3'> = cos(t)|3> - sin(t)|4>, |4'> = sin(t)|3> + cos(t)|4> with
    tan(2t) = omega_c/delta_c for the coupling sign used by
    :func:`build_hamiltonian`; t = pi/4 at delta_c = 0.
    """
    if delta_c == 0 and omega_c == 0:
        raise ParameterError("dressing angle undefined for delta_c = omega_c = 0")
    angle = math.pi / 4 if delta_c == 0 else 0.5 * math.atan(omega_c / delta_c)
    c, s = math.cos(angle), math.sin(angle)
    state3 = np.array([0, 0, c, -s], dtype=complex)
    state4 = np.array([0, 0, s, c], dtype=complex)
    # block of H at delta_b = 0, sign-flipped: eigenvalues are the resonant delta_b
    block = np.array([[0.0, 0.5 * omega_c], [0.5 * omega_c, delta_c]])
    e3 = float(np.array([c, -s]) @ block @ np.array([c, -s]))
    e4 = float(np.array([s, c]) @ block @ np.array([s, c]))
    return DressedStates(
        angle=angle,
        energies=(e3, e4),
        state3=state3,
        state4=state4,
        generalized_rabi=math.hypot(delta_c, omega_c),
    )
