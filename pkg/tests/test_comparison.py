import mpmath
import numpy as np
import pytest
from hypothesis import given, strategies as st

from auxma import ArgumentError, ComparisonVariant, PremiseViolation, ScalarField
from auxma.core import monge_ampere
from auxma.estimates import (
    build_phi,
    build_profile,
    choose_constants,
    critical_scale,
    epsilon_control,
    exponential_integrability,
    growth_constant,
    linfty_from_profile,
    measured_lemma_constant,
    tau,
    verify_nonpositive,
)
from auxma.objects import SublevelProfile
from auxma.solvers import normalize_density, solve_auxiliary, solve_cma

positive = st.floats(min_value=0.05, max_value=20.0)


@given(st.integers(min_value=1, max_value=5), positive, positive, positive)
def test_kahler_constants_are_consistent(n, a, gamma, A):
    consts = choose_constants(ComparisonVariant.KAHLER_LEMMA3, a, n, gamma, A)
    assert consts.b == pytest.approx(n / (n + a), rel=1e-15)
    assert consts.epsilon * consts.b * consts.Lambda ** (consts.b - 1) == pytest.approx(1.0, rel=1e-12)


@given(st.integers(min_value=1, max_value=4), positive, positive, positive)
def test_energy_form_gives_the_same_numbers(n, a, gamma, A):
    lemma = choose_constants(ComparisonVariant.KAHLER_LEMMA3, a, n, gamma, A)
    energy = choose_constants(ComparisonVariant.ENERGY_SECTION4, a, n, gamma, A)
    assert energy.epsilon == pytest.approx(lemma.epsilon, rel=1e-12)
    assert energy.Lambda == pytest.approx(lemma.Lambda, rel=1e-10)


def test_kahler_constants_in_extended_precision():
    with mpmath.workdps(40):
        n, a, gamma = 2, 1, mpmath.mpf(1) / 4
        b = mpmath.mpf(n) / (n + a)
        epsilon = (n * b * gamma ** (mpmath.mpf(1) / n)) ** (-mpmath.mpf(n) / (a + n))
        Lambda = (epsilon * b) ** (1 / (1 - b))

    consts = choose_constants(ComparisonVariant.KAHLER_LEMMA3, 1.0, 2, 0.25, 1.0)
    assert consts.epsilon == pytest.approx(float(epsilon), rel=1e-14)
    assert consts.Lambda == pytest.approx(float(Lambda), rel=1e-13)


@pytest.mark.parametrize("n, a", [(1, 1.0), (2, 1.0), (3, 0.5)])
def test_doubling_the_mass_scales_epsilon(n, a):
    gamma = n ** (-n)
    first = choose_constants(ComparisonVariant.KAHLER_LEMMA3, a, n, gamma, 1.3)
    second = choose_constants(ComparisonVariant.KAHLER_LEMMA3, a, n, gamma, 2.6)
    assert second.epsilon / first.epsilon == pytest.approx(2.0 ** (1.0 / (a + n)), rel=1e-14)


def test_symplectic_constants_for_surfaces():
    A = 0.8
    consts = choose_constants(ComparisonVariant.SYMPLECTIC_SECTION12, 1.0, 1, 1.0, A, extras={"C_J": 0.3, "C_2": 1.5})
    assert consts.b == pytest.approx(2.0 / 3.0)
    assert consts.epsilon == pytest.approx(1.5 ** (2.0 / 3.0) * A ** (1.0 / 3.0), rel=1e-14)
    assert consts.Lambda == pytest.approx((2.0 / 3.0) * (10 * 0.3 * 1.5) ** 3 * A, rel=1e-14)


def test_symplectic_constants_need_extras():
    with pytest.raises(ArgumentError):
        choose_constants(ComparisonVariant.SYMPLECTIC_SECTION12, 1.0, 1, 1.0, 1.0, extras={"C_J": 0.3})


def test_constants_reject_nonpositive_inputs():
    with pytest.raises(ArgumentError):
        choose_constants(ComparisonVariant.KAHLER_LEMMA3, 1.0, 2, 0.25, 0.0)
    with pytest.raises(ArgumentError):
        choose_constants(ComparisonVariant.KAHLER_LEMMA3, -1.0, 2, 0.25, 1.0)


def test_trivial_comparison_is_nonpositive(torus2):
    zero = ScalarField.zeros(torus2)
    consts = choose_constants(ComparisonVariant.KAHLER_LEMMA3, 1.0, 2, 0.25, 1.0)
    Phi = build_phi(zero, zero, consts)
    assert np.allclose(Phi.values, -consts.epsilon * consts.Lambda**consts.b)
    assert verify_nonpositive(Phi).passed
    assert critical_scale(zero, zero, consts) == 0.0


def test_failed_check_carries_diagnostics(torus1, smooth):
    phi = smooth(torus1).max_normalized()
    Phi = ScalarField.constant(torus1, 1.0) - phi
    report = verify_nonpositive(Phi, phi=phi, psi=phi)
    assert not report.passed
    assert set(report.diagnostics) == {"lambda", "grad_psi", "psi", "phi"}
    assert report.diagnostics["grad_psi"].shape == (2,)


def test_negative_shift_base_is_rejected(torus1):
    zero = ScalarField.zeros(torus1)
    consts = choose_constants(ComparisonVariant.KAHLER_LEMMA3, 1.0, 1, 1.0, 1.0)
    with pytest.raises(ArgumentError):
        build_phi(zero, zero, consts, q=-10.0 * (1.0 + consts.Lambda))


@pytest.fixture
def comparison_instance(torus1, smooth):
    spec = monge_ampere(1)
    density = normalize_density(smooth(torus1, amplitude=0.4), 1)
    phi, report = solve_cma(torus1, spec, density.k)
    k = density.k * report.rescale
    psi, A, _ = solve_auxiliary(torus1, ScalarField(torus1, tau(64, -phi.values)), k)
    consts = choose_constants(ComparisonVariant.KAHLER_LEMMA3, 1.0, 1, spec.gamma, A)
    return phi, psi, consts


def test_halving_epsilon_breaks_a_tight_comparison(torus1):
    # ε(-ψ + Λ)^b = 1 for these constants, so φ ≡ -0.75 has θ = 0.75
    consts = choose_constants(ComparisonVariant.KAHLER_LEMMA3, 1.0, 1, 1.0, 1.0)
    phi, psi = ScalarField.constant(torus1, -0.75), ScalarField.zeros(torus1)
    assert verify_nonpositive(build_phi(phi, psi, consts)).passed

    control = epsilon_control(phi, psi, consts)
    assert control.applicable
    assert control.passed
    assert control.critical_scale == pytest.approx(0.75, rel=1e-12)
    assert control.perturbed.max_value == pytest.approx(0.25, rel=1e-12)


def test_a_control_that_holds_is_flagged(torus1):
    consts = choose_constants(ComparisonVariant.KAHLER_LEMMA3, 1.0, 1, 1.0, 1.0)
    phi, psi = ScalarField.constant(torus1, -0.75), ScalarField.zeros(torus1)
    control = epsilon_control(phi, psi, consts, factor=0.9)
    assert control.applicable
    assert not control.passed
    assert control.perturbed.passed


def test_control_of_a_trivial_comparison_is_not_applicable(torus1):
    zero = ScalarField.zeros(torus1)
    consts = choose_constants(ComparisonVariant.KAHLER_LEMMA3, 1.0, 1, 1.0, 1.0)
    control = epsilon_control(zero, zero, consts)
    assert not control.applicable
    assert not control.passed
    with pytest.raises(ArgumentError):
        epsilon_control(zero, zero, consts, factor=1.0)


def test_comparison_function_is_nonpositive(comparison_instance):
    phi, psi, consts = comparison_instance
    report = verify_nonpositive(build_phi(phi, psi, consts), phi=phi, psi=psi)
    assert report.passed


def test_epsilon_below_the_critical_scale_fails(comparison_instance):
    phi, psi, consts = comparison_instance
    theta = critical_scale(phi, psi, consts)
    assert theta > 0

    tight = build_phi(phi, psi, consts.with_epsilon(theta * consts.epsilon))
    assert tight.values.max() == pytest.approx(0.0, abs=1e-12)
    assert not verify_nonpositive(build_phi(phi, psi, consts.with_epsilon(0.5 * theta * consts.epsilon))).passed


def test_measured_lemma_constant_bounds_the_depth(comparison_instance):
    phi, psi, consts = comparison_instance
    c = measured_lemma_constant(phi, psi, consts)
    exponent = consts.n / (consts.n + consts.a)
    bound = c * consts.A ** (1.0 / (consts.a + consts.n)) * (-psi.values + consts.Lambda) ** exponent
    assert np.all(-phi.values <= bound + 1e-12)


def test_linfty_of_zero_potential(torus1):
    zero = ScalarField.zeros(torus1)
    bound = linfty_from_profile(build_profile(zero, s_grid=[0.0, 1.0]), delta0=0.5, phi=zero)
    assert bound.S0 == 0.0
    assert bound.B0 == 0.0
    assert bound.passed


def test_linfty_bounds_the_sup(comparison_instance):
    phi, _, _ = comparison_instance
    bound = linfty_from_profile(build_profile(phi), delta0=0.5, phi=phi)
    assert bound.passed
    assert bound.S0 >= -phi.values.min()


def test_linfty_uses_the_measured_growth_constant():
    profile = SublevelProfile(np.array([0.0, 1.0, 2.0]), np.array([1.0, 0.5, 0.0]), np.array([1.0, 0.2, 0.0]))
    bound = linfty_from_profile(profile, delta0=1.0)
    assert bound.measured_B0
    assert bound.B0 == growth_constant(profile, 1.0) == 1.0
    assert bound.S0 == pytest.approx(4.0)
    # the step reading of the samples would need twice as much
    assert bound.minimal_B0 == pytest.approx(2.0)

    supplied = linfty_from_profile(profile, delta0=1.0, B0=2.0)
    assert not supplied.measured_B0
    assert supplied.S0 == pytest.approx(8.0)


def test_linfty_default_constant_on_a_solved_instance(comparison_instance):
    phi, _, _ = comparison_instance
    profile = build_profile(phi)
    bound = linfty_from_profile(profile, delta0=0.5, phi=phi)
    assert bound.B0 == growth_constant(profile, 0.5)
    assert np.isfinite(bound.minimal_B0)
    assert bound.passed


def test_linfty_needs_a_vanishing_profile():
    profile = SublevelProfile(np.array([0.0, 1.0, 2.0]), np.array([1.0, 0.5, 0.5]), np.array([1.0, 0.5, 0.2]))
    with pytest.raises(PremiseViolation):
        linfty_from_profile(profile, delta0=1.0)


def test_linfty_rejects_a_too_small_constant():
    profile = SublevelProfile(np.array([0.0, 1.0, 2.0]), np.array([1.0, 0.5, 0.0]), np.array([1.0, 0.2, 0.0]))
    with pytest.raises(PremiseViolation):
        linfty_from_profile(profile, delta0=1.0, B0=1e-3)


def test_exponential_integrability_of_zero_family(torus1):
    report = exponential_integrability([ScalarField.zeros(torus1)], [0.5, 1.0, 4.0])
    assert np.allclose(report.integrals, 1.0)
    assert report.alpha_proxy == 4.0
    assert report.monotone


def test_exponential_integrability_is_monotone(comparison_instance):
    _, psi, _ = comparison_instance
    report = exponential_integrability([psi], [0.5, 1.0, 2.0, 4.0, 8.0])
    assert report.monotone
    assert np.all(report.integrals >= 1.0)


def test_exponential_integrability_rejects_positive_potentials(torus1):
    with pytest.raises(ArgumentError):
        exponential_integrability([ScalarField.constant(torus1, 1.0)], [1.0])
