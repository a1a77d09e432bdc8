import math
from itertools import product

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sphsum.ensembles import DPE, GUE, LUE, PE, Fixed, as_pe, joint_eigen_density, matrix_density, transform_of
from sphsum.spherical import spherical_phi
from sphsum.transform import (
    DetRatioForm,
    DimensionTooLargeError,
    GaussianFactor,
    InconsistentTransformError,
    NumericForm,
    ProductForm,
    evaluate,
    forward_numeric,
    identity,
    inverse,
    inverse_with_residue,
    multiply,
    plancherel_constant,
)
from sphsum.weights import gaussian, laguerre_weight

PE_MIXED = PE((gaussian(), laguerre_weight(0.5, 1.0), gaussian(coeffs=[0.0, 0.0, 1.0], sigma=1.3)))
REPS = [GUE(2), LUE(2, 0.0), LUE(3, 1.5), as_pe(LUE(2, 1.0)), PE_MIXED, DPE(gaussian(sigma=0.7), 3), Fixed((0.0, 1.0, 2.5))]


@pytest.mark.parametrize("ens", REPS, ids=lambda e: type(e).__name__)
def test_normalized_at_origin(ens):
    assert evaluate(transform_of(ens), np.zeros(ens.n)) == pytest.approx(1.0, abs=1e-8)


coords = st.floats(-2.5, 2.5, allow_nan=False)


@settings(max_examples=25, deadline=None)
@given(st.lists(coords, min_size=3, max_size=3), st.sampled_from(REPS[2:]))
def test_symmetries(s, ens):
    s = np.array(s[: ens.n])
    rep = transform_of(ens)
    v = evaluate(rep, s)
    assert abs(v - evaluate(rep, s[::-1])) < 1e-7
    assert abs(evaluate(rep, -s) - np.conj(v)) < 1e-7


def test_closed_values():
    assert evaluate(transform_of(GUE(2)), [1.0, 2.0]) == pytest.approx(math.exp(-2.5))
    assert evaluate(transform_of(LUE(2, 0.0)), [1.0, 1.0]) == pytest.approx(1 / (1 + 1j) ** 4)
    # the same coincident point through the det-ratio form of the LUE weights
    assert evaluate(transform_of(as_pe(LUE(2, 0.0))), [1.0, 1.0]) == pytest.approx(1 / (1 + 1j) ** 4, abs=1e-10)


def test_forward_numeric_points():
    assert forward_numeric(GUE(1), [2.0]) == pytest.approx(math.exp(-2), abs=1e-12)
    assert forward_numeric(GUE(2), [0.7, -0.3]) == pytest.approx(math.exp(-0.29), abs=1e-10)
    rng = np.random.default_rng(4)
    s = rng.uniform(-2, 2, (4, 2))
    np.testing.assert_allclose(forward_numeric(LUE(2, 1.0), s), np.prod((1 + 1j * s) ** -3.0, axis=1), atol=1e-10)


@pytest.mark.parametrize("ens", [PE_MIXED, DPE(gaussian(sigma=0.7), 3), Fixed((0.0, 1.0, 2.5))], ids=lambda e: type(e).__name__)
def test_forward_numeric_matches_structured(ens):
    rng = np.random.default_rng(5)
    s = rng.uniform(-2, 2, (5, ens.n))
    np.testing.assert_allclose(forward_numeric(ens, s), evaluate(transform_of(ens), s), atol=1e-8)


def test_forward_numeric_dimension_limit():
    with pytest.raises(DimensionTooLargeError):
        forward_numeric(GUE(4), np.zeros(4))


def test_orbit_transform_is_phi():
    rep = transform_of(Fixed((0.5, -1.0)))
    s = np.array([0.3, 1.2])
    assert evaluate(rep, s) == pytest.approx(spherical_phi(s, [-0.5, 1.0]))
    assert evaluate(transform_of(Fixed((2.0, 2.0))), s) == pytest.approx(np.exp(-1j * 2.0 * s.sum()))


def test_multiply_rules():
    g = transform_of(GUE(2))
    gg = multiply(g, g)
    assert isinstance(gg, ProductForm)
    s = np.array([0.4, -1.1])
    assert evaluate(gg, s) == pytest.approx(math.exp(-np.sum(s**2)))
    pe = transform_of(PE_MIXED)
    gp = multiply(transform_of(GUE(3)), pe)
    assert isinstance(gp, DetRatioForm)
    s3 = np.array([0.4, -1.1, 0.9])
    assert evaluate(gp, s3) == pytest.approx(evaluate(pe, s3) * math.exp(-np.sum(s3**2) / 2))
    assert multiply(identity(3), pe) is pe
    assert multiply(pe, identity(3)) is pe
    with pytest.raises(ValueError):
        multiply(g, pe)


def test_inverse_scalar_gaussian():
    assert inverse(transform_of(GUE(1)), [0.0]) == pytest.approx(1 / math.sqrt(2 * math.pi))
    assert inverse(transform_of(GUE(1)), [0.0], method="numeric") == pytest.approx(1 / math.sqrt(2 * math.pi))


def test_inverse_gue_plus_gue_grid():
    g = np.linspace(-3, 3, 5)
    x = np.array(list(product(g, g)))
    n = 2
    f = np.exp(-np.sum(x**2, axis=1) / 4) / (2 ** (n / 2) * math.pi ** (n * n / 2) * 2 ** (n * n / 2))
    ref = math.pi / 2 * f * (x[:, 1] - x[:, 0]) ** 2
    rep = multiply(transform_of(GUE(2)), transform_of(GUE(2)))
    for method in ("auto", "numeric"):
        np.testing.assert_allclose(inverse(rep, x, method=method), ref, atol=1e-10)


@pytest.mark.parametrize("ens", [GUE(2), LUE(2, 1.5), PE_MIXED], ids=lambda e: type(e).__name__)
def test_round_trip_joint_and_matrix(ens):
    rng = np.random.default_rng(6)
    x = np.sort(rng.uniform(0.2, 3.0, (4, ens.n)), axis=1)
    rep = transform_of(ens)
    np.testing.assert_allclose(inverse(rep, x), joint_eigen_density(ens, x), atol=1e-9)
    np.testing.assert_allclose(inverse(rep, x, kind="matrix"), matrix_density(ens, x), atol=1e-9)


def test_numeric_inverse_lue_matrix_kind():
    x = np.array([[0.5, 2.0], [1.0, 1.0]])
    val, res = inverse_with_residue(transform_of(LUE(2, 0.0)), x, kind="matrix", method="numeric")
    np.testing.assert_allclose(val, matrix_density(LUE(2, 0.0), x), atol=1e-9)
    assert np.max(res) < 1e-9


def test_numeric_form_inversion():
    rep = NumericForm(lambda s: np.exp(-np.sum(s**2) / 2), 2, gaussian_width=1.0)
    x = np.array([0.3, -0.8])
    assert inverse(rep, x) == pytest.approx(joint_eigen_density(GUE(2), x), abs=1e-10)
    x1 = NumericForm(lambda s: np.exp(-s[0] ** 2 / 2), 1, gaussian_width=1.0)
    assert inverse(x1, [0.5]) == pytest.approx(math.exp(-0.125) / math.sqrt(2 * math.pi), abs=1e-10)


def test_inconsistent_transform_detected():
    rep = NumericForm(lambda s: 1j * np.exp(-s[0] ** 2 / 2), 1, gaussian_width=1.0)
    with pytest.raises(InconsistentTransformError):
        inverse(rep, [0.0])


def test_numeric_inverse_limits():
    rep = multiply(transform_of(Fixed((0.0, 1.0, 2.0))), transform_of(GUE(3)))
    with pytest.raises(DimensionTooLargeError):
        inverse(rep, [0.0, 1.0, 2.0])
    with pytest.raises(DimensionTooLargeError):
        inverse(NumericForm(lambda s: 1.0, 2), [0.0, 1.0])


def test_gaussian_factor_rejects_bad_variance():
    with pytest.raises(ValueError):
        GaussianFactor(0.0)


def test_plancherel_constant_small_n():
    assert plancherel_constant(1) == pytest.approx(1 / (2 * math.pi))
    assert plancherel_constant(2) == pytest.approx(1 / (8 * math.pi**3))


def test_multiplication_commutes_and_associates():
    a, b, c = (transform_of(e) for e in (GUE(2), LUE(2, 0.5), as_pe(LUE(2, 1.0))))
    s = np.random.default_rng(8).uniform(-2, 2, (10, 2))
    np.testing.assert_allclose(evaluate(multiply(a, b), s), evaluate(multiply(b, a), s), atol=1e-10)
    np.testing.assert_allclose(
        evaluate(multiply(multiply(a, b), c), s), evaluate(multiply(a, multiply(b, c)), s), atol=1e-10
    )
