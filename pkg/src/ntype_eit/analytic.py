"""Closed-form probe coherence rho_23 for the resonantly pumped N system.

Everything here assumes delta_a = delta_c = 0 and is written in normalised
units: g_i = Omega_i/gamma, delta_b = Delta_b/gamma, Gamma = gamma_c/gamma.

Two of the printed expressions have alternative readings, selected with
``variant``:

``rho23_full``
    ``"verbatim"`` uses the printed correction term 16/g_c^2 [E+ - E-]^2
    in the denominator.  That term grows like g_c^0 delta_b^2 and swamps the
    result; ``"inverted"`` (default) uses 1/(16 g_c^2) instead, which is the
    reading that tracks the master-equation solution.

``rho23_approx``
    ``"verbatim"`` keeps ``i + 4 delta_b`` in the numerator of f(x);
    ``"shifted"`` (default) uses ``i + 4x``, i.e. the detuning measured from
    the shifted window.  This matches the large-g_c limit of the exact
    weak-probe coherence up to the constant term of E (1 here, 3/2 in the
    limit), a few-percent effect.
"""

from __future__ import annotations

from dataclasses import dataclass

from ntype_eit.atom import ParameterError, SystemParams

__all__ = [
    "NormalizedPoint",
    "FULL_VARIANTS",
    "APPROX_VARIANTS",
    "rho23_full",
    "rho23_approx",
    "im_rho23_resonant",
    "im_rho23_window",
    "im_rho23_peak",
    "resonant_regime",
    "ClosedForms",
    "closed_forms",
    "evaluate",
]

FULL_VARIANTS = ("inverted", "verbatim")
APPROX_VARIANTS = ("shifted", "verbatim")


@dataclass(frozen=True)
class NormalizedPoint:
    g_a: float
    g_b: float
    g_c: float
    delta_b: float
    Gamma: float = 1.0

    @classmethod
    def from_params(cls, params: SystemParams) -> "NormalizedPoint":
        return cls(
            g_a=params.omega_a,
            g_b=params.omega_b,
            g_c=params.omega_c,
            delta_b=params.delta_b,
            Gamma=params.gamma_c,
        )

    @property
    def delta_plus(self) -> float:
        return self.delta_b - 0.5 * self.g_c

    @property
    def delta_minus(self) -> float:
        return self.delta_b + 0.5 * self.g_c

    @property
    def kappa(self) -> float:
        if self.g_a <= 0:
            raise ParameterError("kappa = g_c/g_a needs g_a > 0")
        return self.g_c / self.g_a

    @property
    def zeta(self) -> float:
        if self.g_a <= 0:
            raise ParameterError("zeta = g_b/g_a needs g_a > 0")
        return self.g_b / self.g_a


def _E(x, g_a):
    return 1 - 2 * g_a**2 + 2 * (1j + 2 * x) * (2j + 2 * x)


def rho23_full(point: NormalizedPoint, variant: str = "inverted") -> complex:
    """Weak-probe rho_23 for equal damping rates and g_a >> g_b."""
    if variant not in FULL_VARIANTS:
        raise ValueError(f"variant must be one of {FULL_VARIANTS}, got {variant!r}")
    g_a, g_b, g_c = point.g_a, point.g_b, point.g_c
    if g_c <= 0:
        raise ParameterError("rho23_full divides by g_c; use the numerical solver for g_c = 0")
    dp, dm = point.delta_plus, point.delta_minus

    def A(x):
        return -g_c * (1 + g_c**2) * (4 * x + 1j)

    def B(x):
        return (1 - 2j * x) * (1 - g_c**2)

    ep, em = _E(dp, g_a), _E(dm, g_a)
    numerator = (A(dp) + B(dp)) * em + (A(dm) - B(dm)) * ep - (ep + em)
    weight = 16 / g_c**2 if variant == "verbatim" else 1 / (16 * g_c**2)
    denominator = ep * em + weight * (ep - em) ** 2
    return complex(g_b / (2 * g_c * (1 + 2 * g_c**2)) * numerator / denominator)


def rho23_approx(point: NormalizedPoint, variant: str = "shifted") -> complex:
    """Large-g_c form: the average of two shifted three-level EIT profiles."""
    if variant not in APPROX_VARIANTS:
        raise ValueError(f"variant must be one of {APPROX_VARIANTS}, got {variant!r}")
    g_a, g_b, delta_b = point.g_a, point.g_b, point.delta_b

    def f(x):
        shift = x if variant == "shifted" else delta_b
        return -0.5 * g_b * (1j + 4 * shift) / _E(x, g_a)

    return complex(0.5 * (f(point.delta_plus) + f(point.delta_minus)))


def im_rho23_resonant(kappa: float, zeta: float, g_a: float) -> float:
    """Absorption on two-photon resonance (delta_b = 0) for small gamma_c."""
    return zeta * kappa**2 * g_a / (4 * kappa**2 + (kappa**2 - 1) ** 2 * g_a**2)


def im_rho23_window(kappa: float, zeta: float, g_a: float, Gamma: float) -> float:
    """Residual absorption inside a detuned window, delta_b = +-g_c/2."""
    if g_a == 0:
        raise ParameterError("g_a must be non-zero")
    k2 = kappa**2
    num = Gamma * zeta * (12 * k2 + (1 - 3 * k2 + 4 * k2**2) * g_a**2)
    den = 32 * k2 * g_a + 2 * (1 - 4 * k2) ** 2 * g_a**3
    return num / den


def im_rho23_peak(kappa: float, zeta: float, g_a: float, Gamma: float) -> float:
    """Height of the absorption peaks at delta_b = +-(g_c +- g_a)/2."""
    if g_a == 0:
        raise ParameterError("g_a must be non-zero")
    kk = kappa + kappa**2
    num = Gamma * zeta * (2 * (1 + 2 * kappa) ** 2 + 4 * kk**2 * g_a**2)
    den = 8 * kk**2 * g_a * (4 * Gamma + zeta**2 * g_a**2)
    return num / den


def resonant_regime(kappa: float, zeta: float, g_a: float, Gamma: float, small: float = 0.1) -> bool:
    """kappa >= 1, g_a >= 1, zeta << 1 (taken as zeta <= ``small``) and Gamma <= zeta."""
    return kappa >= 1 and g_a >= 1 and zeta <= small and Gamma <= zeta


@dataclass
class ClosedForms:
    point: NormalizedPoint
    full: complex | None
    approx: complex
    resonant: float | None
    window: float | None
    peak: float | None
    large_gc_regime: bool
    small_gamma_regime: bool


def closed_forms(point: NormalizedPoint) -> ClosedForms:
    """Evaluate every closed form at ``point`` together with regime flags.

    Expressions that are undefined at the point come back as ``None``.
    """
    full = rho23_full(point) if point.g_c > 0 else None
    if point.g_a > 0:
        k, z = point.kappa, point.zeta
        resonant = im_rho23_resonant(k, z, point.g_a)
        window = im_rho23_window(k, z, point.g_a, point.Gamma)
        peak = im_rho23_peak(k, z, point.g_a, point.Gamma) if k > 0 else None
        small = resonant_regime(k, z, point.g_a, point.Gamma)
    else:
        resonant = window = peak = None
        small = False
    return ClosedForms(
        point=point,
        full=full,
        approx=rho23_approx(point),
        resonant=resonant,
        window=window,
        peak=peak,
        large_gc_regime=point.g_c >= 10 and point.g_a <= 0.5 * point.g_c and point.g_b <= 0.1 * point.g_a,
        small_gamma_regime=small,
    )


def evaluate(method: str, point: NormalizedPoint) -> complex:
    if method == "analytic_full":
        return rho23_full(point)
    if method == "analytic_approx":
        return rho23_approx(point)
    raise ValueError(f"unknown analytic method {method!r}")
