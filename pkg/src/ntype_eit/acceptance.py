"""End-to-end acceptance checks, each returning measured vs expected values.

Every check is deterministic (fixed RNG seeds) and runs in seconds.  The
frozen regression numbers below were produced by this toolkit and guard
against silent drift in the solver or the closed forms.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass

import numpy as np

from ntype_eit import analytic
from ntype_eit.atom import (
    SystemParams,
    dark_detunings,
    detuned_dark_state,
    quartic_residual,
    resonant_eigensystem,
)
from ntype_eit.bloch import (
    DensityMatrix,
    build_liouvillian,
    coherence_decay_rates,
    dephasing_table,
    evolve_to_steady,
    steady_state,
)
from ntype_eit.spectra import SweepSpec, collapse_analysis, gamma_c_scan, sweep

__all__ = ["CheckResult", "CHECKS", "ALIASES", "run_checks", "format_result"]

SEED = 20240613
FIG_BASE = SystemParams(omega_a=2.0, omega_b=0.2, omega_c=10.0)

# frozen regression numbers
GAMMA_SLOPE = 0.006233504366638864
GAMMA_SLOPE_RTOL = 1e-6
INSET_FULL_ENVELOPE = 0.027
INSET_APPROX_ENVELOPE = 0.06


@dataclass
class CheckResult:
    name: str
    passed: bool
    measured: str
    expected: str
    detail: str = ""
    seconds: float = 0.0


def _random_drive(rng):
    return rng.uniform(0.1, 10), rng.uniform(0.01, 1), rng.uniform(0.1, 20)


def check_dark_states() -> CheckResult:
    rng = np.random.default_rng(SEED)
    worst_leak = worst_res = 0.0
    for _ in range(100):
        wa, wb, wc = _random_drive(rng)
        params = SystemParams(omega_a=wa, omega_b=wb, omega_c=wc, delta_c=rng.uniform(-10, 10))
        for branch in "+-":
            dark = detuned_dark_state(params, branch)
            worst_leak = max(worst_leak, dark.level2_leakage)
            worst_res = max(worst_res, dark.residual)
    ok = worst_leak <= 1e-10 and worst_res <= 1e-10
    return CheckResult(
        "dark_states", ok,
        f"max |<2|psi>| = {worst_leak:.2e}, max ||H psi|| = {worst_res:.2e}",
        "both <= 1e-10 over 100 cases x 2 branches, < 1 s",
    )


def check_symmetric_detunings() -> CheckResult:
    bad = []
    for wc in (0.0, 0.1, 1.0, 2.0, 5.0, 10.0, 20.0, 1 / 3, math.pi):
        plus, minus = dark_detunings(0.0, wc)
        if plus != wc / 2 or minus != -wc / 2:
            bad.append((wc, plus, minus))
    return CheckResult(
        "symmetric_detunings", not bad,
        "exact" if not bad else f"mismatches: {bad}",
        "dark_detunings(0, W) == (W/2, -W/2) bit-exactly",
    )


def check_quartic() -> CheckResult:
    rng = np.random.default_rng(SEED + 1)
    worst = 0.0
    for _ in range(100):
        wa, wb, wc = _random_drive(rng)
        eig = resonant_eigensystem(SystemParams(omega_a=wa, omega_b=wb, omega_c=wc), tol=math.inf)
        worst = max(worst, float(quartic_residual(eig.eigenvalues, wa, wb, wc).max()))
    return CheckResult("quartic", worst <= 1e-8, f"max relative residual {worst:.2e}", "<= 1e-8 over 100 triples")


def check_oracle(n_cases: int = 60) -> CheckResult:
    rng = np.random.default_rng(SEED + 2)
    worst = 0.0
    unconverged = 0
    rho0 = DensityMatrix.basis(1)
    for _ in range(n_cases):
        o, d, g = rng.uniform(0, 10, 3), rng.uniform(-10, 10, 3), rng.uniform(0.1, 2, 3)
        params = SystemParams(*o, *d, *g)
        direct = steady_state(build_liouvillian(params)).matrix
        evolved = evolve_to_steady(params, rho0, deriv_tol=1e-12)
        unconverged += not evolved.converged
        worst = max(worst, float(np.abs(direct - evolved.state.matrix).max()))
    ok = worst <= 1e-8 and unconverged == 0
    return CheckResult(
        "oracle", ok,
        f"max elementwise difference {worst:.2e} over {n_cases} cases, {unconverged} unconverged",
        "<= 1e-8 on >= 50 cases, < 30 s",
    )


def _near(locations, target, tol):
    return any(abs(x - target) <= tol for x in locations)


def check_three_windows() -> CheckResult:
    driven = sweep(SweepSpec(FIG_BASE, "delta_b", (-10, 10), 2001))
    bare = sweep(SweepSpec(FIG_BASE.replace(omega_c=0.0), "delta_b", (-10, 10), 2001))
    wins, bare_wins = driven.window_locations, bare.window_locations
    ok = (
        len(wins) == 3
        and all(_near(wins, t, 0.1) for t in (-5, 0, 5))
        and len(bare_wins) == 1
        and abs(bare_wins[0]) <= 0.05
    )
    return CheckResult(
        "three_windows", ok,
        f"g_c=10 windows {[round(w, 4) for w in wins]}; g_c=0 windows {[round(w, 4) for w in bare_wins]}",
        "{-5, 0, 5} within 0.1; single window at 0 within 0.05",
    )


def inset_deviations() -> dict[str, float]:
    """Max |Im analytic - Im numeric| over delta_b in [-10, 10], relative to the numeric peak."""
    grid = np.linspace(-10, 10, 2001)
    numeric = sweep(SweepSpec(FIG_BASE, "delta_b", (-10, 10), 2001)).absorption
    peak = float(numeric.max())
    forms = {
        "full/verbatim": lambda p: analytic.rho23_full(p, "verbatim"),
        "full/inverted": lambda p: analytic.rho23_full(p, "inverted"),
        "approx/verbatim": lambda p: analytic.rho23_approx(p, "verbatim"),
        "approx/shifted": lambda p: analytic.rho23_approx(p, "shifted"),
    }
    out = {}
    for name, fn in forms.items():
        values = np.array([
            fn(analytic.NormalizedPoint.from_params(FIG_BASE.replace(delta_b=d))).imag for d in grid
        ])
        out[name] = float(np.abs(values - numeric).max() / peak)
    return out


def check_inset() -> CheckResult:
    dev = inset_deviations()
    passing = [k for k in ("full/verbatim", "full/inverted") if dev[k] <= 0.05]
    chosen = passing[0] if passing else None
    frozen = dev["full/inverted"] <= INSET_FULL_ENVELOPE and dev["approx/shifted"] <= INSET_APPROX_ENVELOPE
    listing = ", ".join(f"{k} {v:.4f}" for k, v in dev.items())
    return CheckResult(
        "fig3_inset", chosen is not None and frozen,
        f"max deviation / numeric peak: {listing}",
        f"<= 0.05 for the full form (frozen envelopes: full/inverted <= {INSET_FULL_ENVELOPE}, "
        f"approx/shifted <= {INSET_APPROX_ENVELOPE})",
        detail=f"passing variant: {chosen}" if chosen else "no full-form variant passes",
    )


def check_gamma_linear() -> CheckResult:
    scan = gamma_c_scan(FIG_BASE, [0.05, 0.1, 0.2, 0.3, 0.5], at_detuning=FIG_BASE.omega_c / 2)
    slope_ok = scan.slope is not None and math.isclose(scan.slope, GAMMA_SLOPE, rel_tol=GAMMA_SLOPE_RTOL)
    ok = slope_ok and scan.r_squared is not None and scan.r_squared >= 0.99
    return CheckResult(
        "gamma_c_linear", ok,
        f"R^2 = {scan.r_squared:.5f}, slope = {scan.slope:.10g}",
        f"R^2 >= 0.99, slope = {GAMMA_SLOPE:.10g} (frozen)",
        detail="Im rho_23 at delta_b=5: " + ", ".join(f"{v:.4e}" for v in scan.absorption),
    )


def check_collapse() -> CheckResult:
    rep = collapse_analysis(SystemParams(omega_a=2.0, omega_b=0.2, omega_c=20.0))
    return CheckResult(
        "collapse", rep.pointwise_max_ratio < 0.02,
        f"max pointwise ratio {rep.pointwise_max_ratio:.4f}, ratio of maxima {rep.ratio:.4f}",
        "Im rho_23(gamma_c=1e-7) < 2% of Im rho_23(gamma_c=0.1) at every sampled delta_b",
        detail=(
            f"window depth (peak - dip) {rep.depth_small:.3e} vs {rep.depth_ref:.3e}; "
            f"peak/dip {rep.contrast_small:.1f} vs {rep.contrast_ref:.1f}"
        ),
    )


def check_lambda_limit() -> CheckResult:
    params = FIG_BASE.replace(omega_c=0.0)
    value = steady_state(build_liouvillian(params)).rho23.imag
    return CheckResult("lambda_limit", abs(value) <= 1e-6, f"Im rho_23(0) = {value:.2e}", "|Im rho_23| <= 1e-6")


def check_dephasing() -> CheckResult:
    rng = np.random.default_rng(SEED + 3)
    worst = 0.0
    for _ in range(20):
        g = rng.uniform(0.01, 3, 3)
        params = SystemParams(gamma_a=g[0], gamma_b=g[1], gamma_c=g[2])
        got = coherence_decay_rates(build_liouvillian(params))
        want = dephasing_table(params)
        worst = max(worst, max(abs(got[k] - want[k]) / max(want[k], 1.0) for k in want))
    eps = np.finfo(float).eps
    return CheckResult(
        "dephasing", worst <= 4 * eps,
        f"max relative difference {worst:.1e}",
        f"<= machine epsilon level ({4 * eps:.1e})",
    )


def check_symmetry() -> CheckResult:
    worst = 0.0
    grid = np.linspace(-10, 10, 401)
    for wc in (0.0, 2.0, 5.0, 10.0):
        spec = sweep(SweepSpec(FIG_BASE.replace(omega_c=wc), "delta_b", (-10, 10), grid.size))
        worst = max(worst, float(np.abs(spec.absorption - spec.absorption[::-1]).max()))
    return CheckResult("symmetry", worst <= 1e-8, f"max |Im(d) - Im(-d)| = {worst:.2e}", "<= 1e-8")


CHECKS = {
    "dark_states": check_dark_states,
    "symmetric_detunings": check_symmetric_detunings,
    "quartic": check_quartic,
    "oracle": check_oracle,
    "three_windows": check_three_windows,
    "fig3_inset": check_inset,
    "gamma_c_linear": check_gamma_linear,
    "collapse": check_collapse,
    "lambda_limit": check_lambda_limit,
    "dephasing": check_dephasing,
    "symmetry": check_symmetry,
}

ALIASES = {"fig3": "three_windows", "fig5": "gamma_c_linear"}

# wall-clock budgets in seconds
BUDGETS = {"dark_states": 1.0, "oracle": 30.0}


def run_checks(name: str = "all") -> list[CheckResult]:
    """Run one check (by name or alias) or all of them; unknown names raise KeyError."""
    if name == "all":
        names = list(CHECKS)
    else:
        key = ALIASES.get(name, name)
        if key not in CHECKS:
            raise KeyError(name)
        names = [key]
    results = []
    for key in names:
        start = time.perf_counter()
        result = CHECKS[key]()
        result.seconds = time.perf_counter() - start
        budget = BUDGETS.get(key)
        if budget is not None and result.seconds > budget:
            result.passed = False
            result.detail = (result.detail + "; " if result.detail else "") + f"over {budget:g} s budget"
        results.append(result)
    return results


def format_result(r: CheckResult) -> str:
    line = f"{'PASS' if r.passed else 'FAIL'}  {r.name:<20} measured: {r.measured} | expected: {r.expected}"
    if r.detail:
        line += f" | {r.detail}"
    return line + f" ({r.seconds:.2f} s)"
