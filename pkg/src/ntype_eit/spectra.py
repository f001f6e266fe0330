"""Parameter sweeps of the probe coherence and transparency-window detection."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np
from scipy.signal import find_peaks, peak_widths

from ntype_eit import analytic
from ntype_eit.atom import SystemParams, dark_detunings
from ntype_eit.bloch import build_liouvillian, steady_state

log = logging.getLogger(__name__)

__all__ = [
    "AXES",
    "METHODS",
    "SweepSpec",
    "Feature",
    "Spectrum",
    "GammaScan",
    "CollapseReport",
    "evaluate_point",
    "detect_features",
    "sweep",
    "gamma_c_scan",
    "collapse_analysis",
]

AXES = ("delta_b", "gamma_c", "omega_c")
METHODS = ("numeric", "analytic_full", "analytic_approx")
DEFAULT_POINTS = 2001
WINDOW_THRESHOLD = 0.1


@dataclass(frozen=True)
class SweepSpec:
    base: SystemParams
    axis: str = "delta_b"
    range: tuple[float, float] = (-10.0, 10.0)
    n_points: int = DEFAULT_POINTS
    method: str = "numeric"

    def __post_init__(self):
        if self.axis not in AXES:
            raise ValueError(f"axis must be one of {AXES}, got {self.axis!r}")
        if self.method not in METHODS:
            raise ValueError(f"method must be one of {METHODS}, got {self.method!r}")
        lo, hi = (float(v) for v in self.range)
        if not lo < hi:
            raise ValueError(f"sweep range must satisfy min < max, got {self.range}")
        if int(self.n_points) != self.n_points or self.n_points < 2:
            raise ValueError(f"n_points must be an integer >= 2, got {self.n_points}")
        object.__setattr__(self, "range", (lo, hi))
        object.__setattr__(self, "n_points", int(self.n_points))

    def grid(self) -> np.ndarray:
        return np.linspace(self.range[0], self.range[1], self.n_points)

    def as_dict(self) -> dict:
        return {
            "axis": self.axis,
            "range": list(self.range),
            "n_points": self.n_points,
            "method": self.method,
        }


@dataclass
class Feature:
    """A local extremum of Im rho_23.

    ``depth`` is the topographic prominence, ``width`` the full width at half
    prominence (both in axis units).
    """

    location: float
    value: float
    depth: float
    width: float

    def as_dict(self) -> dict:
        return {"location": self.location, "value": self.value, "depth": self.depth, "width": self.width}


@dataclass
class Spectrum:
    axis_name: str
    axis: np.ndarray
    rho23: np.ndarray
    windows: list[Feature] = field(default_factory=list)
    peaks: list[Feature] = field(default_factory=list)
    failures: list[tuple[float, str]] = field(default_factory=list)

    @property
    def absorption(self) -> np.ndarray:
        return self.rho23.imag

    @property
    def samples(self) -> list[tuple[float, float, float]]:
        return [(float(x), float(r.real), float(r.imag)) for x, r in zip(self.axis, self.rho23)]

    @property
    def window_locations(self) -> list[float]:
        return [w.location for w in self.windows]

    @property
    def peak_locations(self) -> list[float]:
        return [p.location for p in self.peaks]


def evaluate_point(params: SystemParams, method: str = "numeric") -> complex:
    if method == "numeric":
        return steady_state(build_liouvillian(params)).rho23
    return analytic.evaluate(method, analytic.NormalizedPoint.from_params(params))


def _refine(x: np.ndarray, y: np.ndarray, i: int) -> tuple[float, float]:
    """Vertex of the parabola through samples i-1, i, i+1 (uniform grid)."""
    y0, y1, y2 = y[i - 1], y[i], y[i + 1]
    curv = y0 - 2 * y1 + y2
    if curv == 0:
        return float(x[i]), float(y1)
    h = x[i + 1] - x[i]
    offset = 0.5 * (y0 - y2) / curv
    return float(x[i] + offset * h), float(y1 - 0.125 * (y0 - y2) ** 2 / curv)


def detect_features(
    x: np.ndarray, y: np.ndarray, threshold: float = WINDOW_THRESHOLD
) -> tuple[list[Feature], list[Feature]]:
    """Find transparency windows (dips) and absorption peaks of ``y``.

    An extremum counts when its prominence exceeds ``threshold`` times the
    global maximum of ``y``.  Non-finite samples are dropped first.
    """
    ok = np.isfinite(y)
    x, y = np.asarray(x)[ok], np.asarray(y)[ok]
    if y.size < 3:
        return [], []
    ymax = float(np.max(np.abs(y)))
    if ymax == 0:
        return [], []
    min_prominence = threshold * ymax
    step = x[1] - x[0]

    def collect(signal, sign):
        idx, props = find_peaks(signal, prominence=min_prominence)
        if idx.size == 0:
            return []
        widths = peak_widths(signal, idx, rel_height=0.5, prominence_data=(
            props["prominences"], props["left_bases"], props["right_bases"]))[0]
        out = []
        for i, prom, w in zip(idx, props["prominences"], widths):
            loc, val = _refine(x, signal, i)
            out.append(Feature(location=loc, value=sign * val, depth=float(prom), width=float(w * step)))
        return out

    return collect(-y, -1.0), collect(y, 1.0)


def sweep(spec: SweepSpec) -> Spectrum:
    """Evaluate rho_23 along ``spec.axis``; failed points become NaN and are logged."""
    grid = spec.grid()
    values = np.empty(grid.size, dtype=complex)
    failures = []
    for k, v in enumerate(grid):
        try:
            values[k] = evaluate_point(spec.base.replace(**{spec.axis: float(v)}), spec.method)
        except (ArithmeticError, ValueError) as exc:
            values[k] = complex(np.nan, np.nan)
            failures.append((float(v), str(exc)))
    if failures:
        log.warning("%d of %d sweep points failed", len(failures), grid.size)
    windows, peaks = detect_features(grid, values.imag)
    return Spectrum(spec.axis, grid, values, windows, peaks, failures)


@dataclass
class GammaScan:
    gammas: np.ndarray
    rho23: np.ndarray
    at_detuning: float
    slope: float | None
    r_squared: float | None
    fit_mask: np.ndarray
    flagged: list[tuple[float, str]]

    @property
    def absorption(self) -> np.ndarray:
        return self.rho23.imag


def _zero_intercept_fit(x: np.ndarray, y: np.ndarray) -> tuple[float, float]:
    # R^2 for a line through the origin is uncentred: 1 - SSR / sum(y^2)
    slope = float(x @ y / (x @ x))
    ssr = float(np.sum((y - slope * x) ** 2))
    return slope, 1.0 - ssr / float(y @ y)


def gamma_c_scan(
    base: SystemParams,
    gammas,
    at_detuning: float,
    small_max: float = 0.5,
) -> GammaScan:
    """Absorption at a fixed probe detuning as gamma_c varies.

    A zero-intercept line is fitted over the finite entries with
    0 < gamma_c <= ``small_max``; fewer than three such points gives no fit.
    gamma_c = 0 entries are flagged and left out of the fit.
    """
    gammas = np.asarray(sorted(float(g) for g in gammas))
    values = np.empty(gammas.size, dtype=complex)
    flagged = []
    for k, g in enumerate(gammas):
        if g == 0:
            flagged.append((g, "gamma_c = 0: steady state may be non-unique; see collapse_analysis"))
        try:
            values[k] = evaluate_point(base.replace(gamma_c=g, delta_b=at_detuning))
        except ArithmeticError as exc:
            values[k] = complex(np.nan, np.nan)
            flagged.append((g, str(exc)))
    mask = (gammas > 0) & (gammas <= small_max) & np.isfinite(values.imag)
    slope = r2 = None
    if mask.sum() >= 3:
        slope, r2 = _zero_intercept_fit(gammas[mask], values.imag[mask])
    return GammaScan(gammas, values, float(at_detuning), slope, r2, mask, flagged)


@dataclass
class CollapseReport:
    small: Spectrum
    reference: Spectrum
    gamma_c_small: float
    gamma_c_ref: float
    ratio: float
    pointwise_max_ratio: float
    contrast_small: float
    contrast_ref: float
    depth_small: float
    depth_ref: float
    window_detuning: float
    degenerate: list[tuple[float, str]]


def _window_contrast(params: SystemParams, spectrum: Spectrum, detuning: float) -> tuple[float, float]:
    """(peak / dip, peak - dip) of Im rho_23 with the dip taken at ``detuning``."""
    dip = evaluate_point(params.replace(delta_b=detuning)).imag
    peak = float(np.nanmax(spectrum.absorption))
    return peak / dip, peak - dip


def collapse_analysis(
    base: SystemParams,
    gamma_c_small: float = 1e-7,
    gamma_c_ref: float = 0.1,
    detuning_range: tuple[float, float] = (-20.0, 20.0),
    n_points: int = DEFAULT_POINTS,
) -> CollapseReport:
    """Compare absorption spectra for a nearly stable |4> against a reference decay.

    ``ratio`` is max Im rho_23 at ``gamma_c_small`` over max Im rho_23 at
    ``gamma_c_ref``.  For each spectrum the window is probed at the upper
    dark detuning: ``contrast_*`` is peak/dip and ``depth_*`` is peak - dip.
    A collapsed window keeps a large peak/dip ratio (both numbers go to
    zero) while its depth shrinks with the overall absorption.
    """
    specs = [
        SweepSpec(base.replace(gamma_c=g), "delta_b", detuning_range, n_points)
        for g in (gamma_c_small, gamma_c_ref)
    ]
    small, ref = (sweep(s) for s in specs)
    with np.errstate(divide="ignore", invalid="ignore"):
        pointwise = np.nanmax(small.absorption / ref.absorption)
    ratio = float(np.nanmax(small.absorption) / np.nanmax(ref.absorption))
    window = dark_detunings(base.delta_c, base.omega_c)[0]
    contrast_small, depth_small = _window_contrast(specs[0].base, small, window)
    contrast_ref, depth_ref = _window_contrast(specs[1].base, ref, window)
    return CollapseReport(
        small=small,
        reference=ref,
        gamma_c_small=gamma_c_small,
        gamma_c_ref=gamma_c_ref,
        ratio=ratio,
        pointwise_max_ratio=float(pointwise),
        contrast_small=contrast_small,
        contrast_ref=contrast_ref,
        depth_small=depth_small,
        depth_ref=depth_ref,
        window_detuning=window,
        degenerate=small.failures + ref.failures,
    )
