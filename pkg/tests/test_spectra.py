import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from ntype_eit.atom import SystemParams
from ntype_eit.spectra import (
    SweepSpec,
    _refine,
    _zero_intercept_fit,
    collapse_analysis,
    detect_features,
    evaluate_point,
    gamma_c_scan,
    sweep,
)

FIG = SystemParams(omega_a=2.0, omega_b=0.2, omega_c=10.0)


def lorentzian(x, x0, w):
    return 1 / (1 + ((x - x0) / w) ** 2)


class TestSweepSpec:
    def test_grid(self):
        spec = SweepSpec(FIG, range=(-1, 1), n_points=5)
        np.testing.assert_array_equal(spec.grid(), [-1, -0.5, 0, 0.5, 1])
        assert spec.as_dict() == {"axis": "delta_b", "range": [-1.0, 1.0], "n_points": 5, "method": "numeric"}

    @pytest.mark.parametrize("kwargs", [
        {"axis": "delta_q"}, {"method": "magic"}, {"range": (1, 1)}, {"range": (2, -2)},
        {"n_points": 1}, {"n_points": 2.5},
    ])
    def test_invalid(self, kwargs):
        with pytest.raises(ValueError):
            SweepSpec(FIG, **kwargs)


class TestFeatureDetection:
    def test_refine_exact_on_parabola(self):
        x = np.linspace(0, 1, 11)
        y = 3 * (x - 0.437) ** 2 - 2
        i = int(np.argmin(y))
        loc, val = _refine(x, y, i)
        assert loc == pytest.approx(0.437, abs=1e-12)
        assert val == pytest.approx(-2, abs=1e-12)

    def test_synthetic_dips(self):
        x = np.linspace(-10, 10, 2001)
        y = lorentzian(x, -4.0, 1.5) + lorentzian(x, 4.0, 1.5) - 0.8 * lorentzian(x, 4.13, 0.2)
        windows, peaks = detect_features(x, y)
        # the valley between the two broad lines counts as well
        assert len(windows) == 2
        np.testing.assert_allclose([w.location for w in windows], [0.0, 4.13], atol=0.02)
        assert min(w.depth for w in windows) > 0.1
        assert len(peaks) == 3

    @given(st.floats(-8, 8), st.floats(0.3, 2))
    def test_single_peak_location(self, x0, w):
        x = np.linspace(-10, 10, 4001)
        y = lorentzian(x, x0, w)
        windows, peaks = detect_features(x, y)
        assert windows == []
        assert len(peaks) == 1
        assert peaks[0].location == pytest.approx(x0, abs=1e-3)
        # full width at half prominence above the higher of the two edge bases
        level = 0.5 * (1 + max(y[0], y[-1]))
        assert peaks[0].width == pytest.approx(2 * w * np.sqrt(1 / level - 1), rel=0.01)

    def test_threshold_filters_ripples(self):
        x = np.linspace(-5, 5, 1001)
        y = lorentzian(x, 0, 2) + 0.01 * np.sin(20 * x)
        windows, peaks = detect_features(x, y)
        assert windows == [] and len(peaks) == 1

    def test_nan_and_flat(self):
        x = np.linspace(0, 1, 5)
        assert detect_features(x, np.zeros(5)) == ([], [])
        assert detect_features(x, np.full(5, np.nan)) == ([], [])


class TestSweep:
    def test_three_windows(self):
        spec = sweep(SweepSpec(FIG, n_points=2001))
        assert len(spec.windows) == 3
        np.testing.assert_allclose(sorted(spec.window_locations), [-5, 0, 5], atol=0.1)
        assert spec.failures == []

    def test_single_window_without_drive(self):
        spec = sweep(SweepSpec(FIG.replace(omega_c=0), n_points=2001))
        assert len(spec.windows) == 1 and abs(spec.windows[0].location) <= 0.05

    @pytest.mark.parametrize("wc", [0.0, 2.0, 5.0, 10.0])
    def test_symmetric_spectrum(self, wc):
        spec = sweep(SweepSpec(FIG.replace(omega_c=wc), n_points=401))
        np.testing.assert_allclose(spec.absorption, spec.absorption[::-1], atol=1e-12)

    @pytest.mark.parametrize("wc,gamma_c", [(10, 0.01), (20, 0.01)])
    def test_peaks_at_dressed_lines(self, wc, gamma_c):
        spec = sweep(SweepSpec(FIG.replace(omega_c=wc, gamma_c=gamma_c), range=(-15, 15), n_points=3001))
        expected = sorted(s * (wc + t * 2.0) / 2 for s in (1, -1) for t in (1, -1))
        assert len(spec.peaks) == 4
        np.testing.assert_allclose(sorted(spec.peak_locations), expected, atol=0.02)

    def test_other_axes(self):
        spec = sweep(SweepSpec(FIG.replace(delta_b=5.0), axis="gamma_c", range=(0.1, 1), n_points=4))
        assert spec.axis_name == "gamma_c"
        assert spec.absorption[0] == pytest.approx(evaluate_point(FIG.replace(delta_b=5.0, gamma_c=0.1)).imag)

    def test_analytic_method(self):
        spec = sweep(SweepSpec(FIG, method="analytic_full", n_points=201))
        num = sweep(SweepSpec(FIG, n_points=201))
        assert np.abs(spec.absorption - num.absorption).max() < 0.05 * num.absorption.max()

    def test_failures_become_nan(self):
        undamped = FIG.replace(gamma_a=0, gamma_b=0, gamma_c=0)
        spec = sweep(SweepSpec(undamped, n_points=5))
        assert len(spec.failures) == 5
        assert np.isnan(spec.absorption).all()
        assert spec.windows == []

    def test_samples(self):
        spec = sweep(SweepSpec(FIG, n_points=3))
        assert [s[0] for s in spec.samples] == [-10.0, 0.0, 10.0]


class TestGammaScan:
    def test_zero_intercept_fit_exact_line(self):
        x = np.array([1.0, 2.0, 3.0])
        slope, r2 = _zero_intercept_fit(x, 0.5 * x)
        assert slope == 0.5 and r2 == 1.0

    def test_frozen_slope(self):
        scan = gamma_c_scan(FIG, [0.05, 0.1, 0.2, 0.3, 0.5], at_detuning=5.0)
        assert scan.slope == pytest.approx(0.006233504366638864, rel=1e-6)
        assert 0.98 < scan.r_squared < 0.99
        assert scan.fit_mask.all()

    def test_absorption_grows_with_gamma_c(self):
        scan = gamma_c_scan(FIG, [0.05, 0.1, 0.2, 0.3, 0.5, 1.0], at_detuning=5.0)
        assert np.all(np.diff(scan.absorption) > 0)
        assert not scan.fit_mask[-1]

    def test_zero_flagged_and_excluded(self):
        scan = gamma_c_scan(FIG, [0.0, 0.1, 0.2, 0.3], at_detuning=5.0)
        assert scan.flagged and scan.flagged[0][0] == 0.0
        assert not scan.fit_mask[0]
        assert scan.slope is not None

    def test_too_few_points(self):
        scan = gamma_c_scan(FIG, [0.1, 0.2], at_detuning=5.0)
        assert scan.slope is None and scan.r_squared is None


@pytest.fixture(scope="module")
def report():
    return collapse_analysis(SystemParams(omega_a=2.0, omega_b=0.2, omega_c=20.0), n_points=801)


class TestCollapse:
    def test_overall_absorption_drops(self, report):
        assert report.ratio == pytest.approx(0.0237, abs=0.001)
        assert report.depth_small < 0.05 * report.depth_ref

    def test_resonant_line_unchanged(self, report):
        # on two-photon resonance the absorption does not depend on gamma_c
        assert report.pointwise_max_ratio == pytest.approx(1.0, abs=0.01)

    def test_window_location(self, report):
        assert report.window_detuning == 10.0
        assert report.gamma_c_small == 1e-7 and report.degenerate == []
