import numpy as np
import pytest
from hypothesis import given, strategies as st

from auxma import ArgumentError, ConeViolation, OperatorKind
from auxma.core import cone_margin, f_eval, f_gradient, hessian, in_cone, measure_gamma, monge_ampere, operator_spec, pma, sigma

SPECS = [
    ("ma-2", lambda: monge_ampere(2)),
    ("ma-3", lambda: monge_ampere(3)),
    ("sigma-1-3", lambda: hessian(3, 1)),
    ("sigma-2-3", lambda: hessian(3, 2)),
    ("pma-2-3", lambda: pma(3, 2)),
]


def _cone_points(spec, rng, count: int) -> np.ndarray:
    points = 1.0 + 0.4 * rng.standard_normal((4 * count, spec.n))
    return points[in_cone(spec, points)][:count]


def test_monge_ampere_at_identity():
    value, member = f_eval(monge_ampere(2), np.array([1.0, 1.0]))
    assert member and value == pytest.approx(1.0)


def test_sigma_2_at_identity():
    value, _ = f_eval(hessian(2, 2), np.array([1.0, 1.0]))
    assert value == pytest.approx(1.0)


def test_monge_ampere_is_a_geometric_mean():
    value, _ = f_eval(monge_ampere(2), np.array([1.0, 4.0]))
    assert value == pytest.approx(2.0, rel=1e-14)


def test_monge_ampere_gradient_and_gamma():
    spec = monge_ampere(2)
    grad, margin = f_gradient(spec, np.array([1.0, 1.0]))
    assert np.allclose(grad, [0.5, 0.5])
    assert spec.gamma == pytest.approx(0.25)
    assert margin == pytest.approx(0.0, abs=1e-15)


def test_outside_the_cone_is_flagged():
    value, member = f_eval(monge_ampere(2), np.array([-1.0, 2.0]))
    assert not member and np.isnan(value)
    with pytest.raises(ConeViolation):
        f_gradient(monge_ampere(2), np.array([-1.0, 2.0]))


def test_wrong_eigenvalue_count():
    with pytest.raises(ArgumentError):
        f_eval(monge_ampere(2), np.ones(3))


@pytest.mark.parametrize("name, make", SPECS)
def test_euler_relation(name, make, rng):
    spec = make()
    lam = _cone_points(spec, rng, 100)
    value, _ = f_eval(spec, lam)
    grad, _ = f_gradient(spec, lam)
    assert np.abs((lam * grad).sum(axis=-1) - value).max() < 1e-12


@pytest.mark.parametrize("name, make", SPECS)
def test_gradient_matches_central_differences(name, make, rng):
    spec = make()
    lam = _cone_points(spec, rng, 20)
    grad, _ = f_gradient(spec, lam)
    step = 1e-6
    for j in range(spec.n):
        e = np.zeros(spec.n)
        e[j] = step
        forward, _ = f_eval(spec, lam + e)
        backward, _ = f_eval(spec, lam - e)
        assert np.allclose((forward - backward) / (2 * step), grad[:, j], atol=1e-6)


@pytest.mark.parametrize("name, make", SPECS)
def test_structural_margin_nonnegative_on_samples(name, make, rng):
    spec = make()
    lam = _cone_points(spec, rng, 200)
    lam = lam / np.linalg.norm(lam, axis=-1, keepdims=True)
    _, margin = f_gradient(spec, np.vstack([np.ones(spec.n), lam]))
    assert margin[0] >= -1e-14


@given(st.lists(st.floats(min_value=0.05, max_value=20.0), min_size=3, max_size=3), st.floats(min_value=0.1, max_value=10.0))
def test_operators_are_one_homogeneous(lam, scale):
    lam = np.array(lam)
    for _, make in SPECS[1:]:
        spec = make()
        value, _ = f_eval(spec, lam)
        scaled, _ = f_eval(spec, scale * lam)
        assert scaled == pytest.approx(scale * value, rel=1e-12)


def test_cone_margin_sign(rng):
    spec = hessian(3, 2)
    lam = 2.0 * rng.standard_normal((500, 3))
    margin = cone_margin(spec, lam)
    assert np.all((margin > 0) == in_cone(spec, lam))


def test_cone_margin_is_the_shift_to_the_boundary():
    spec = monge_ampere(2)
    assert cone_margin(spec, np.array([0.5, 3.0])) == pytest.approx(0.5)
    assert cone_margin(pma(3, 2), np.array([1.0, 2.0, 5.0])) == pytest.approx(1.5)


def test_sigma_values():
    lam = np.array([1.0, 2.0, 3.0])
    assert sigma(lam, 1) == pytest.approx(6.0)
    assert sigma(lam, 2) == pytest.approx(11.0)
    assert sigma(lam, 3) == pytest.approx(6.0)


def test_measure_gamma_is_exact_for_monge_ampere():
    assert measure_gamma(OperatorKind.MONGE_AMPERE, 3, 3) == pytest.approx(3.0**-3)
    assert measure_gamma(OperatorKind.HESSIAN, 3, 2) > 0


def test_operator_spec_requires_degree():
    with pytest.raises(ArgumentError):
        operator_spec(OperatorKind.HESSIAN, 3)
    with pytest.raises(ArgumentError):
        operator_spec(OperatorKind.PMA, 2, 3)
    assert operator_spec("monge_ampere", 2).degree == 2
