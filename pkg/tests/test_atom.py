import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ntype_eit.atom import (
    ParameterError,
    SystemParams,
    build_hamiltonian,
    dark_detunings,
    dark_state_report,
    detuned_cubic_residual,
    detuned_dark_state,
    dressed_states,
    lambda_dark_state,
    quartic_residual,
    resonant_eigensystem,
)

rabi = st.floats(0.01, 20)
detuning = st.floats(-10, 10)


def params_strategy():
    return st.builds(
        SystemParams,
        omega_a=rabi, omega_b=rabi, omega_c=rabi,
        delta_a=detuning, delta_b=detuning, delta_c=detuning,
    )


class TestSystemParams:
    def test_defaults(self):
        p = SystemParams()
        assert (p.gamma_a, p.gamma_b, p.gamma_c) == (1.0, 1.0, 1.0)
        assert p.resonant

    @pytest.mark.parametrize("field", ["omega_a", "omega_b", "omega_c", "gamma_a", "gamma_b", "gamma_c"])
    def test_negative_rejected(self, field):
        with pytest.raises(ParameterError, match=field):
            SystemParams(**{field: -0.1})

    def test_negative_detuning_allowed(self):
        assert SystemParams(delta_b=-3).delta_b == -3.0

    @pytest.mark.parametrize("bad", [math.nan, math.inf, "x"])
    def test_non_finite_rejected(self, bad):
        with pytest.raises(ParameterError):
            SystemParams(omega_a=bad)

    def test_dict_round_trip(self):
        p = SystemParams(1, 2, 3, 0.5, -0.5, 1.5, 0.2, 0.3, 0.4)
        assert SystemParams.from_dict(p.as_dict()) == p

    def test_unknown_key(self):
        with pytest.raises(ParameterError, match="omega_d"):
            SystemParams.from_dict({"omega_d": 1.0})


class TestHamiltonian:
    def test_layout(self):
        h = build_hamiltonian(SystemParams(2, 0.2, 10, 0.3, 1.0, 4.0))
        expected = np.array([
            [0.3, -1.0, 0, 0],
            [-1.0, 0, -0.1, 0],
            [0, -0.1, 1.0, -5.0],
            [0, 0, -5.0, -3.0],
        ])
        np.testing.assert_array_equal(h, expected)

    @given(params_strategy())
    def test_hermitian(self, p):
        h = build_hamiltonian(p)
        assert np.array_equal(h, h.conj().T)


class TestLambdaDarkState:
    def test_annihilated_by_couplings(self):
        psi = lambda_dark_state(2.0, 0.2)
        h = build_hamiltonian(SystemParams(omega_a=2.0, omega_b=0.2))
        assert np.linalg.norm(h @ psi) < 1e-15
        assert psi[0].real > 0 and psi[2].real < 0

    def test_both_zero(self):
        with pytest.raises(ParameterError):
            lambda_dark_state(0, 0)


class TestDarkDetunings:
    @pytest.mark.parametrize("wc", [0.0, 0.3, 1.0, 7.0, 10.0, 20.0, math.pi])
    def test_symmetric_anchor_exact(self, wc):
        assert dark_detunings(0.0, wc) == (wc / 2, -wc / 2)

    @given(detuning, st.floats(0, 20))
    def test_against_polynomial_roots(self, dc, wc):
        plus, minus = dark_detunings(dc, wc)
        roots = np.sort(np.roots([1.0, -dc, -wc**2 / 4]).real)[::-1]
        assert plus >= minus
        np.testing.assert_allclose([plus, minus], roots, atol=1e-9 * max(1, abs(dc), wc))

    def test_small_root_not_cancelled(self):
        # naive (dc - sqrt(dc^2 + wc^2))/2 loses every digit here
        plus, minus = dark_detunings(1e8, 1e-4)
        assert minus == pytest.approx(-0.25e-8 / 1e8, rel=1e-12)
        assert plus == pytest.approx(1e8)

    @given(detuning, st.floats(0.01, 20), st.floats(0.1, 10))
    def test_scaling(self, dc, wc, s):
        base = np.array(dark_detunings(dc, wc))
        scaled = np.array(dark_detunings(s * dc, s * wc))
        np.testing.assert_allclose(scaled, s * base, rtol=1e-10, atol=1e-12)

    def test_non_finite(self):
        with pytest.raises(ParameterError):
            dark_detunings(math.nan, 1.0)


class TestDetunedDarkState:
    @settings(max_examples=200)
    @given(st.floats(0.1, 10), st.floats(0.01, 1), st.floats(0.1, 20), detuning, st.sampled_from("+-"))
    def test_dark(self, wa, wb, wc, dc, branch):
        dark = detuned_dark_state(SystemParams(omega_a=wa, omega_b=wb, omega_c=wc, delta_c=dc), branch)
        assert dark.level2_leakage <= 1e-10
        assert dark.residual <= 1e-10
        assert np.linalg.norm(dark.state) == pytest.approx(1.0)

    @given(st.floats(0.1, 10), st.floats(0.01, 1), st.floats(0.1, 20), detuning, st.sampled_from("+-"))
    def test_component_ratios(self, wa, wb, wc, dc, branch):
        dark = detuned_dark_state(SystemParams(omega_a=wa, omega_b=wb, omega_c=wc, delta_c=dc), branch)
        r1, r4 = dark.ratios
        assert r1 == pytest.approx(-wb / wa, rel=1e-8)
        assert r4 == pytest.approx(2 * dark.detuning / wc, rel=1e-8, abs=1e-10)
        assert dark.state[2].imag == 0 and dark.state[2].real > 0

    def test_detuning_replaced(self):
        dark = detuned_dark_state(SystemParams(2, 0.2, 10, delta_b=123.0), "-")
        assert dark.detuning == -5.0

    def test_lambda_limit(self):
        dark = detuned_dark_state(SystemParams(2, 0.2, 0.0), "+")
        np.testing.assert_allclose(np.abs(dark.state), np.abs(lambda_dark_state(2, 0.2)))

    def test_requires_resonant_coupling(self):
        with pytest.raises(ParameterError):
            detuned_dark_state(SystemParams(2, 0.2, 10, delta_a=1.0))

    def test_requires_coupling(self):
        with pytest.raises(ParameterError):
            detuned_dark_state(SystemParams(0, 0.2, 10))

    def test_bad_branch(self):
        with pytest.raises(ValueError):
            detuned_dark_state(SystemParams(2, 0.2, 10), "up")

    def test_report(self):
        rep = dark_state_report(SystemParams(2, 0.2, 10))
        assert rep.detunings == (5.0, -5.0)
        assert rep.dressed_angle == math.pi / 4
        assert rep.generalized_rabi == 10.0
        assert max(rep.residuals) < 1e-12


def quartic_roots(wa, wb, wc):
    return np.sort(np.roots([16, 0, -4 * (wa**2 + wb**2 + wc**2), 0, wa**2 * wc**2]).real)


class TestResonantEigensystem:
    @given(st.floats(0.1, 10), st.floats(0.01, 1), st.floats(0.1, 20))
    def test_eigenvalues_match_companion_roots(self, wa, wb, wc):
        eig = resonant_eigensystem(SystemParams(omega_a=wa, omega_b=wb, omega_c=wc))
        np.testing.assert_allclose(eig.eigenvalues, quartic_roots(wa, wb, wc), atol=1e-9 * (wa + wb + wc))
        assert quartic_residual(eig.eigenvalues, wa, wb, wc).max() < 1e-12

    @given(st.floats(0.1, 10), st.floats(0.01, 1), st.floats(0.1, 20))
    def test_equal_ground_excited_split(self, wa, wb, wc):
        eig = resonant_eigensystem(SystemParams(omega_a=wa, omega_b=wb, omega_c=wc))
        np.testing.assert_allclose(eig.lower_weights(), 0.5, atol=1e-10)
        assert eig.orthonormality_error() < 1e-12
        assert eig.residuals().max() < 1e-12

    def test_mixing_angles(self):
        eig = resonant_eigensystem(SystemParams(2.0, 0.7, 5.0))
        for k, (t1, t2) in enumerate(eig.mixing_angles):
            c = eig.eigenvectors[:, k]
            assert abs(c[2] / c[0]) == pytest.approx(abs(math.tan(t1)), rel=1e-8)
            assert abs(c[3] / c[1]) == pytest.approx(abs(math.tan(t2)), rel=1e-8)

    def test_rejects_detuned(self):
        with pytest.raises(ParameterError):
            resonant_eigensystem(SystemParams(2, 0.2, 10, delta_b=1.0))

    def test_residual_is_relative(self):
        assert quartic_residual(0.0, 0.0, 0.0, 0.0) == 0.0
        assert quartic_residual(1.0, 1.0, 1.0, 1.0) > 0.1


class TestDetunedCubic:
    @pytest.mark.parametrize("branch", [1, -1])
    @given(wa=st.floats(0.1, 10), wb=st.floats(0.01, 1), wc=st.floats(0.1, 20))
    def test_non_dark_eigenvalues(self, branch, wa, wb, wc):
        h = build_hamiltonian(SystemParams(omega_a=wa, omega_b=wb, omega_c=wc, delta_b=branch * wc / 2))
        lam = np.linalg.eigvalsh(h)
        rest = np.delete(lam, np.argmin(np.abs(lam)))
        assert detuned_cubic_residual(rest, wa, wb, wc, branch).max() < 1e-10


class TestDressedStates:
    @given(detuning.filter(lambda d: d != 0), st.floats(0.01, 20))
    def test_against_two_level_diagonalisation(self, dc, wc):
        d = dressed_states(dc, wc)
        block = np.array([[0, 0.5 * wc], [0.5 * wc, dc]])
        for state, energy in zip((d.state3, d.state4), d.energies):
            v = state[2:].real
            np.testing.assert_allclose(block @ v, energy * v, atol=1e-10 * (abs(dc) + wc))
        assert sorted(d.energies) == pytest.approx(sorted(dark_detunings(dc, wc)), abs=1e-9 * (abs(dc) + wc))
        assert abs(d.energies[0] - d.energies[1]) == pytest.approx(d.generalized_rabi)

    def test_resonant_angle(self):
        d = dressed_states(0.0, 10.0)
        assert d.angle == math.pi / 4
        assert sorted(d.energies) == pytest.approx([-5.0, 5.0])

    def test_orthonormal(self):
        d = dressed_states(3.0, 4.0)
        basis = np.column_stack([d.state3, d.state4])
        np.testing.assert_allclose(basis.conj().T @ basis, np.eye(2), atol=1e-15)

    def test_undefined(self):
        with pytest.raises(ParameterError):
            dressed_states(0.0, 0.0)
