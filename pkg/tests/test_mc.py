import math

import numpy as np
import pytest
from scipy import stats

from sphsum.ensembles import GUE, LUE, Fixed, as_pe
from sphsum.mc import (
    Histogram,
    UnsamplableError,
    kernel_marginal,
    ks_distance,
    marginal_cdf,
    sample_ensemble,
    sample_gue,
    sample_lue,
    sample_sum,
)
from sphsum.spherical import haar_unitary


def _within_3se(values, target):
    return abs(values.mean() - target) < 3 * values.std() / math.sqrt(len(values))


def test_gue_moments():
    x = sample_gue(1, seed=1, size=100_000)[:, 0]
    sq = (x - x.mean()) ** 2
    assert _within_3se(sq, 1.0)
    tr = np.sum(sample_gue(2, seed=2, size=50_000) ** 2, axis=1)
    assert _within_3se(tr, 4.0)
    assert sample_gue(3, seed=3).shape == (3,)


def test_lue_moments():
    assert _within_3se(sample_lue(1, 0, seed=4, size=50_000)[:, 0], 1.0)
    assert _within_3se(np.sum(sample_lue(2, 1, seed=5, size=50_000), axis=1), 6.0)
    with pytest.raises(UnsamplableError):
        sample_lue(2, 0.5, seed=0)


def test_seed_determinism_and_workers():
    a = sample_sum(GUE(2), LUE(2, 1.0), seed=7, size=25_000)
    b = sample_sum(GUE(2), LUE(2, 1.0), seed=7, size=25_000, workers=4)
    assert np.array_equal(a, b)
    assert not np.array_equal(a, sample_sum(GUE(2), LUE(2, 1.0), seed=8, size=25_000))


def test_unitary_invariance():
    rng = np.random.default_rng(0)
    g = rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3))
    h = (g + g.conj().T) / 2
    u = haar_unitary(3, seed=1)
    np.testing.assert_allclose(np.linalg.eigvalsh(u @ h @ u.conj().T), np.linalg.eigvalsh(h), atol=1e-12)


def test_unsamplable():
    with pytest.raises(UnsamplableError):
        sample_ensemble(as_pe(GUE(2)), 10)
    with pytest.raises(ValueError):
        sample_sum(GUE(2), GUE(3), seed=0, size=10)


def test_ks_null_across_seeds():
    hits = sum(ks_distance(stats.norm.rvs(size=10_000, random_state=s), stats.norm.cdf) < 0.02 for s in range(40))
    assert hits >= 40 * 0.99 - 1e-9


def test_ks_power_and_extremes():
    x = stats.norm.rvs(size=10_000, random_state=0)
    assert ks_distance(x + 1.0, stats.norm.cdf) > 0.1
    assert ks_distance(x + 50, lambda t: np.zeros_like(t)) > 0.99
    with pytest.raises(ValueError):
        ks_distance(x[:50], stats.norm.cdf)


def test_scalar_lue_sum_is_gamma2():
    y = sample_sum(LUE(1), LUE(1), seed=3, size=50_000)
    assert ks_distance(y, stats.gamma(2).cdf) < 0.02


def test_gue_plus_gue_marginal():
    # X + Y ~ sqrt(2) GUE: marginal density is the GUE one rescaled
    y = sample_sum(GUE(2), GUE(2), seed=21, size=50_000)
    dens, (lo, hi) = kernel_marginal(GUE(2))
    cdf = marginal_cdf(lambda t: dens(t / math.sqrt(2)) / math.sqrt(2), math.sqrt(2) * lo, math.sqrt(2) * hi)
    assert ks_distance(y, cdf) < 0.02


def test_fixed_sampler_spectrum():
    y = sample_ensemble(Fixed((0.0, 1.0, 3.0)), 5, seed=0)
    np.testing.assert_allclose(y, np.tile([0.0, 1.0, 3.0], (5, 1)), atol=1e-12)


def test_histogram_merge_laws():
    rng = np.random.default_rng(0)
    edges = np.linspace(-4, 4, 21)
    h = [Histogram.from_samples(rng.standard_normal(500), edges) for _ in range(3)]
    ab_c = h[0].merge(h[1]).merge(h[2])
    a_bc = h[0].merge(h[1].merge(h[2]))
    assert np.array_equal(ab_c.counts, a_bc.counts)
    assert np.array_equal(h[0].merge(h[1]).counts, h[1].merge(h[0]).counts)
    assert np.array_equal(Histogram.empty(edges).merge(h[0]).counts, h[0].counts)
    with pytest.raises(ValueError):
        h[0].merge(Histogram.empty(np.linspace(0, 1, 3)))


def test_histogram_density_rows():
    h = Histogram.from_samples(np.random.default_rng(1).exponential(size=2000))
    widths = np.diff(h.edges)
    assert np.sum(h.density() * widths) == pytest.approx(1.0)
    assert len(h.rows()) == len(widths)
