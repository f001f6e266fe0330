"""Optical Bloch equations in Lindblad form.

Density matrices are vectorised by stacking columns (Fortran order), so
``vec(A X B) = (B^T kron A) vec(X)``.  Radiative decay runs through three
jump operators: |2>->|1> at ``gamma_a``, |2>->|3> at ``gamma_b`` and
|4>->|3> at ``gamma_c``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numba
import numpy as np
from scipy.integrate import RK45

from ntype_eit.atom import SystemParams, build_hamiltonian

__all__ = [
    "DegenerateSteadyStateError",
    "Liouvillian",
    "DensityMatrix",
    "EvolutionResult",
    "jump_operators",
    "dephasing_table",
    "coherence_decay_rates",
    "build_liouvillian",
    "steady_state",
    "evolve_to_steady",
    "vec",
    "unvec",
]

DIM = 4
IDENTITY = np.eye(DIM)
# trace functional on column-stacked vectors
TRACE_ROW = IDENTITY.reshape(-1, order="F")
STABILITY_FRACTION = 1.5


class DegenerateSteadyStateError(ArithmeticError):
    """The Liouvillian kernel is not one-dimensional."""

    def __init__(self, message, kernel_dim=None, singular_values=None):
        super().__init__(message)
        self.kernel_dim = kernel_dim
        self.singular_values = singular_values


def vec(rho: np.ndarray) -> np.ndarray:
    return np.asarray(rho).reshape(-1, order="F")


def unvec(v: np.ndarray) -> np.ndarray:
    return np.asarray(v).reshape(DIM, DIM, order="F")


def _ket_bra(i: int, j: int) -> np.ndarray:
    op = np.zeros((DIM, DIM))
    op[i, j] = 1.0
    return op


def jump_operators(params: SystemParams) -> list[tuple[float, np.ndarray]]:
    return [
        (params.gamma_a, _ket_bra(0, 1)),
        (params.gamma_b, _ket_bra(2, 1)),
        (params.gamma_c, _ket_bra(2, 3)),
    ]


def dephasing_table(params: SystemParams) -> dict[tuple[int, int], float]:
    """Coherence decay rates Gamma_ij for purely radiative damping (1-based keys)."""
    g2 = params.gamma_a + params.gamma_b
    gc = params.gamma_c
    return {
        (1, 2): 0.5 * g2,
        (1, 3): 0.0,
        (1, 4): 0.5 * gc,
        (2, 3): 0.5 * g2,
        (2, 4): 0.5 * (g2 + gc),
        (3, 4): 0.5 * gc,
    }


def _dissipator(rate: float, c: np.ndarray) -> np.ndarray:
    cdc = c.conj().T @ c
    return rate * (
        np.kron(c.conj(), c) - 0.5 * np.kron(IDENTITY, cdc) - 0.5 * np.kron(cdc.T, IDENTITY)
    )


@dataclass
class Liouvillian:
    matrix: np.ndarray
    params: SystemParams

    @property
    def degenerate(self) -> bool:
        """True when there is no damping at all, so no unique steady state is expected."""
        p = self.params
        return p.gamma_a == 0 and p.gamma_b == 0 and p.gamma_c == 0

    def apply(self, rho: np.ndarray) -> np.ndarray:
        return unvec(self.matrix @ vec(rho))


def build_liouvillian(params: SystemParams) -> Liouvillian:
    """L = -i(I kron H - H^T kron I) + sum_k D[c_k] on column-stacked rho."""
    h = build_hamiltonian(params)
    mat = -1j * (np.kron(IDENTITY, h) - np.kron(h.T, IDENTITY))
    for rate, c in jump_operators(params):
        if rate:
            mat = mat + _dissipator(rate, c)
    return Liouvillian(matrix=mat, params=params)


def coherence_decay_rates(liouvillian: Liouvillian) -> dict[tuple[int, int], float]:
    """Read -Re<ij|L|ij> for every coherence |i><j|, i < j (1-based keys).

    At zero drive each coherence is an eigenvector of L, so this is its decay rate.
    """
    rates = {}
    for i in range(DIM):
        for j in range(i + 1, DIM):
            k = j * DIM + i
            rates[(i + 1, j + 1)] = -float(liouvillian.matrix[k, k].real)
    return rates


@dataclass
class DensityMatrix:
    matrix: np.ndarray

    @property
    def rho23(self) -> complex:
        """Probe coherence <2|rho|3>."""
        return complex(self.matrix[1, 2])

    @property
    def populations(self) -> np.ndarray:
        return self.matrix.diagonal().real.copy()

    def element(self, i: int, j: int) -> complex:
        """1-based accessor, ``element(2, 3) == rho23``."""
        return complex(self.matrix[i - 1, j - 1])

    def hermiticity_error(self) -> float:
        return float(np.abs(self.matrix - self.matrix.conj().T).max())

    def trace_error(self) -> float:
        return float(abs(np.trace(self.matrix) - 1))

    def min_eigenvalue(self) -> float:
        herm = 0.5 * (self.matrix + self.matrix.conj().T)
        return float(np.linalg.eigvalsh(herm).min())

    def is_physical(self, tol: float = 1e-10, psd_tol: float = 1e-9) -> bool:
        return (
            self.hermiticity_error() <= tol
            and self.trace_error() <= tol
            and self.min_eigenvalue() >= -psd_tol
        )

    @classmethod
    def pure(cls, psi) -> "DensityMatrix":
        psi = np.asarray(psi, dtype=complex)
        psi = psi / np.linalg.norm(psi)
        return cls(np.outer(psi, psi.conj()))

    @classmethod
    def basis(cls, level: int) -> "DensityMatrix":
        """|level><level| with 1-based level index."""
        m = np.zeros((DIM, DIM), dtype=complex)
        m[level - 1, level - 1] = 1.0
        return cls(m)


def kernel_dimension(liouvillian: Liouvillian, rtol: float = 1e-13) -> tuple[int, np.ndarray]:
    s = np.linalg.svd(liouvillian.matrix, compute_uv=False)
    scale = s[0] if s[0] > 0 else 1.0
    return int(np.sum(s <= rtol * scale)), s


def steady_state(
    liouvillian: Liouvillian,
    *,
    residual_tol: float = 1e-10,
    kernel_rtol: float = 1e-13,
) -> DensityMatrix:
    """Unit-trace null vector of L.

    The rho_11 equation is swapped for the trace condition and the 16x16
    system is solved by LU.
    """
    dim, s = kernel_dimension(liouvillian, kernel_rtol)
    if liouvillian.degenerate or dim > 1:
        raise DegenerateSteadyStateError(
            f"steady state is not unique (kernel dimension {dim})",
            kernel_dim=dim,
            singular_values=s,
        )
    a = liouvillian.matrix.copy()
    a[0, :] = TRACE_ROW
    b = np.zeros(DIM * DIM, dtype=complex)
    b[0] = 1.0
    try:
        x = np.linalg.solve(a, b)
    except np.linalg.LinAlgError as exc:
        raise DegenerateSteadyStateError(f"trace-replaced system is singular: {exc}") from exc
    residual = np.linalg.norm(liouvillian.matrix @ x)
    if residual > residual_tol:
        raise DegenerateSteadyStateError(
            f"steady-state residual {residual:.3g} exceeds {residual_tol:g}", kernel_dim=dim, singular_values=s
        )
    return DensityMatrix(unvec(x))


@dataclass
class EvolutionResult:
    state: DensityMatrix
    time: float
    converged: bool
    steps: int
    derivative_norm: float
    max_trace_error: float
    max_hermiticity_error: float
    rejected_steps: int = field(default=0)


@numba.njit(cache=True)
def _matvec(m, y, out):
    n = y.shape[0]
    for i in range(n):
        acc = 0j
        for j in range(n):
            acc += m[i, j] * y[j]
        out[i] = acc


@numba.njit(cache=True)
def _dopri(mat, y0, t_max, h0, h_max, deriv_tol, rtol, atol, max_steps, a, b, e):
    """Adaptive Dormand-Prince 5(4) for dy/dt = mat @ y.

    Stops when ||mat @ y|| <= deriv_tol, t reaches t_max or max_steps accepted
    steps have been taken.  Tracks the worst trace and Hermiticity drift of
    the unvectorised state over accepted steps.
    """
    n = y0.shape[0]
    dim = int(np.sqrt(n) + 0.5)
    ns = b.shape[0]
    k = np.empty((ns + 1, n), dtype=np.complex128)
    y = y0.copy()
    y_new = np.empty(n, dtype=np.complex128)
    tmp = np.empty(n, dtype=np.complex128)
    _matvec(mat, y, k[0])
    t = 0.0
    h = h0
    steps = 0
    rejected = 0
    trace_err = 0.0
    herm_err = 0.0
    fnorm = np.sqrt(np.sum(np.abs(k[0]) ** 2))
    while fnorm > deriv_tol and t < t_max and steps < max_steps:
        h = min(h, h_max, t_max - t)
        for s in range(1, ns):
            for i in range(n):
                acc = 0j
                for r in range(s):
                    acc += a[s, r] * k[r, i]
                tmp[i] = y[i] + h * acc
            _matvec(mat, tmp, k[s])
        for i in range(n):
            acc = 0j
            for r in range(ns):
                acc += b[r] * k[r, i]
            y_new[i] = y[i] + h * acc
        _matvec(mat, y_new, k[ns])
        err_sq = 0.0
        for i in range(n):
            acc = 0j
            for r in range(ns + 1):
                acc += e[r] * k[r, i]
            sc = atol + rtol * max(abs(y[i]), abs(y_new[i]))
            err_sq += (abs(h * acc) / sc) ** 2
        err_norm = np.sqrt(err_sq / n)
        if err_norm <= 1.0:
            t += h
            steps += 1
            y[:] = y_new
            k[0, :] = k[ns]
            fnorm = np.sqrt(np.sum(np.abs(k[0]) ** 2))
            tr = 0j
            for i in range(dim):
                tr += y[i * dim + i]
            trace_err = max(trace_err, abs(tr - 1.0))
            for i in range(dim):
                for j in range(i + 1, dim):
                    d = abs(y[j * dim + i] - np.conj(y[i * dim + j]))
                    herm_err = max(herm_err, d)
            factor = 10.0 if err_norm == 0.0 else min(10.0, max(0.2, 0.9 * err_norm ** -0.2))
        else:
            rejected += 1
            factor = min(1.0, max(0.2, 0.9 * err_norm ** -0.2))
        h *= factor
    return y, t, fnorm, steps, rejected, trace_err, herm_err


def evolve_to_steady(
    params: SystemParams,
    rho0,
    t_max: float = 1e6,
    dt: float = 0.01,
    *,
    deriv_tol: float = 1e-10,
    rtol: float = 1e-12,
    atol: float = 1e-14,
    max_steps: int = 5_000_000,
) -> EvolutionResult:
    """Time-evolve the master equation until ``||drho/dt|| <= deriv_tol``.

    Independent of :func:`steady_state`: the integrator only applies L to
    vectors.  ``converged`` is False when ``t_max`` or ``max_steps`` ran out
    first; the last state is returned either way.
    """
    rho0 = np.asarray(getattr(rho0, "matrix", rho0), dtype=complex)
    mat = np.ascontiguousarray(build_liouvillian(params).matrix)
    # well inside the real-axis stability interval so stiff modes keep decaying
    norm = np.linalg.norm(mat, 2)
    h_max = STABILITY_FRACTION / norm if norm > 0 else float(t_max)
    y, t, fnorm, steps, rejected, trace_err, herm_err = _dopri(
        mat, vec(rho0).copy(), float(t_max), float(dt), h_max, float(deriv_tol), float(rtol), float(atol),
        int(max_steps), RK45.A, RK45.B, RK45.E,
    )
    return EvolutionResult(
        state=DensityMatrix(unvec(y)),
        time=float(t),
        converged=bool(fnorm <= deriv_tol),
        steps=int(steps),
        derivative_norm=float(fnorm),
        max_trace_error=float(trace_err),
        max_hermiticity_error=float(herm_err),
        rejected_steps=int(rejected),
    )
