import math

import numpy as np
import pytest
from scipy import integrate

from sphsum.ensembles import DPE, GUE, LUE, PE, Fixed, as_pe, joint_eigen_density, transform_of
from sphsum.sums import (
    CapabilityError,
    add_dpe,
    add_dpe_pe,
    add_gue,
    add_lue,
    fixed_shift_ensemble,
    lue_fixed_shift_density,
    shift_normalization,
    sum_density,
    summed_ensemble,
)
from sphsum.transform import evaluate, multiply
from sphsum.weights import box, gaussian, laguerre_weight

Y = np.linspace(-4, 8, 25)


def test_add_gue_scalar():
    g = add_gue(PE((gaussian(),))).weights[0]
    np.testing.assert_allclose(g(Y), math.sqrt(math.pi) * np.exp(-(Y**2) / 4), atol=1e-9)


def test_add_gue_box_value():
    g = add_gue(PE((box(-1.0, 1.0),))).weights[0]
    ref = integrate.quad(lambda t: math.exp(-t * t / 2), -1, 1)[0]
    assert g(np.array([0.0]))[0] == pytest.approx(ref, abs=1e-9)


def test_add_lue_scalar():
    g = add_lue(PE((laguerre_weight(0.0, 0.0),)), 0.0).weights[0]
    np.testing.assert_allclose(g(Y), np.where(Y > 0, Y * np.exp(-np.abs(Y)), 0.0), atol=1e-9)


@pytest.mark.parametrize("alpha", [0.0, 1.0])
def test_theorem_consistency_n2(alpha):
    pe = PE((gaussian(), gaussian(coeffs=[0.3, 1.0])))
    s = np.random.default_rng(1).uniform(-2, 2, (5, 2))
    for x_ens, summed in ((GUE(2), add_gue(pe)), (LUE(2, alpha), add_lue(pe, alpha))):
        lhs = evaluate(transform_of(summed), s)
        rhs = evaluate(multiply(transform_of(x_ens), transform_of(pe)), s)
        np.testing.assert_allclose(lhs, rhs, atol=1e-6)


def test_add_dpe_gaussians():
    d = add_dpe(gaussian(), gaussian(), 2)
    assert isinstance(d, DPE)
    np.testing.assert_allclose(d.w(Y), math.sqrt(math.pi) * np.exp(-(Y**2) / 4), atol=1e-9)
    s = np.array([0.5, -1.2])
    assert evaluate(transform_of(d), s) == pytest.approx(math.exp(-np.sum(s**2)), abs=1e-8)


def test_add_dpe_pe_special_cases():
    pe = as_pe(LUE(2, 0.5))
    a, b = add_dpe_pe(gaussian(), pe), add_gue(pe)
    for wa, wb in zip(a.weights, b.weights):
        np.testing.assert_allclose(wa(Y), wb(Y), atol=1e-8)
    a, b = add_dpe_pe(laguerre_weight(1.0, 2.0), pe), add_lue(pe, 1.0)
    for wa, wb in zip(a.weights, b.weights):
        np.testing.assert_allclose(wa(Y), wb(Y), atol=1e-8)


def test_scalar_sums():
    y = np.linspace(0.1, 8, 9)[:, None]
    np.testing.assert_allclose(sum_density(LUE(1), LUE(1), y), y[:, 0] * np.exp(-y[:, 0]), atol=1e-10)
    x = np.linspace(-4, 4, 9)[:, None]
    np.testing.assert_allclose(sum_density(GUE(1), GUE(1), x), np.exp(-x[:, 0] ** 2 / 4) / math.sqrt(4 * math.pi), atol=1e-10)


def test_routes_agree():
    x = np.array([[0.4, 1.9], [-1.0, 2.5]])
    for a, b in ((GUE(2), LUE(2, 1.0)), (LUE(2, 0.0), LUE(2, 0.5))):
        inv = sum_density(a, b, x, method="inversion")
        cor = sum_density(a, b, x, method="corollary")
        np.testing.assert_allclose(inv, cor, atol=1e-9)


def test_fixed_plus_gue_routes_agree():
    # corollary (shifted Gaussians) against 2-d numeric inversion of phi * exp(-s^2/2)
    x = np.array([[0.0, 1.5], [-0.7, 2.2]])
    a, b = Fixed((0.0, 1.0)), GUE(2)
    cor, path = sum_density(a, b, x, return_path=True)
    assert path == "fixed_shift"
    inv = sum_density(a, b, x, method="inversion")
    np.testing.assert_allclose(inv, cor, atol=1e-8)


def test_summed_ensemble_paths():
    pe = as_pe(LUE(2, 0.0))
    assert summed_ensemble(pe, LUE(2, 1.0))[1] == "add_lue"
    assert summed_ensemble(LUE(2, 1.0), GUE(2))[1] == "add_gue"
    assert summed_ensemble(DPE(gaussian(), 2), pe)[1] == "add_dpe_pe"
    assert summed_ensemble(Fixed((0.0, 1.0)), LUE(2))[1] == "fixed_shift"
    with pytest.raises(CapabilityError):
        summed_ensemble(pe, pe)
    with pytest.raises(CapabilityError):
        summed_ensemble(Fixed((0.0, 1.0)), Fixed((1.0, 2.0)))
    with pytest.raises(ValueError):
        sum_density(GUE(2), GUE(3), [0.0, 0.0])


def test_marginal_is_normalized():
    x = np.linspace(-8, 30, 4001)
    m = sum_density(GUE(2), LUE(2, 1.0), x, kind="marginal")
    assert integrate.simpson(m, x=x) == pytest.approx(1.0, abs=1e-6)


def test_shift_density_scalar_cases():
    y = np.array([[-0.5], [0.3], [2.0]])
    np.testing.assert_allclose(lue_fixed_shift_density([0.0], 0.0, y), np.where(y[:, 0] > 0, np.exp(-y[:, 0]), 0.0))
    c = 1.7
    np.testing.assert_allclose(
        lue_fixed_shift_density([c], 0.0, y + c), np.where(y[:, 0] > 0, np.exp(-y[:, 0]), 0.0)
    )


@pytest.mark.parametrize("x,alpha", [((0.0, 1.0), 0.0), ((0.0, 1.0), 1.0), ((-0.5, 2.0), 0.5)])
def test_shift_constant_by_quadrature(x, alpha):
    closed = 1.0 / (2 * math.gamma(alpha + 2) ** 2)
    assert shift_normalization(x, alpha) == pytest.approx(closed, rel=1e-8)


def test_shift_density_confluent():
    y = np.array([1.3, 2.9])
    lim = lue_fixed_shift_density([0.5, 0.5], 1.0, y)
    near = lue_fixed_shift_density([0.5 - 5e-6, 0.5 + 5e-6], 1.0, y, cluster_tol=1e-9)
    assert lim == pytest.approx(near, rel=1e-7)


@pytest.mark.parametrize("x", [(0.0, 1.0), (0.5, 0.5)])
def test_fixed_shift_ensemble_matches_formula(x):
    y = np.array([[0.8, 2.1], [1.1, 3.5], [0.6, 0.9]])
    pe = fixed_shift_ensemble(x, LUE(2, 1.0))
    np.testing.assert_allclose(joint_eigen_density(pe, y), lue_fixed_shift_density(x, 1.0, y), rtol=1e-8)


def test_fixed_shift_unsupported():
    with pytest.raises(CapabilityError):
        fixed_shift_ensemble((0.0, 1.0), as_pe(GUE(2)))


def test_sum_density_commutes():
    x = np.array([[0.4, 1.9], [-1.0, 2.5], [0.2, 0.3]])
    for a, b in ((GUE(2), LUE(2, 1.0)), (Fixed((0.0, 1.0)), LUE(2, 0.0)), (as_pe(LUE(2, 0.5)), GUE(2))):
        np.testing.assert_allclose(sum_density(a, b, x), sum_density(b, a, x), atol=1e-8)


def test_smoothing_preserves_nonnegativity():
    pe = as_pe(LUE(2, 0.5))
    y = np.linspace(-3, 15, 73)
    for summed in (add_gue(pe), add_lue(pe, 1.0)):
        for g in summed.weights:
            assert np.all(g(y) >= -1e-12)


def test_shift_constant_independent_of_x():
    assert shift_normalization((0.0, 1.0), 1.0) == pytest.approx(shift_normalization((-2.0, 3.5), 1.0), rel=1e-6)
