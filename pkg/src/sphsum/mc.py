"""Matrix-level Monte Carlo: the independent oracle for every analytic density.

Sampling is split into fixed-size chunks, each driven by its own child of
``SeedSequence(seed)``, so results depend on the seed only (not on the
number of workers).
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
from scipy import integrate, stats

from .ensembles import GUE, LUE, Fixed, as_pe
from .spherical import haar_unitary

__all__ = [
    "UnsamplableError",
    "sample_gue",
    "sample_lue",
    "sample_sum",
    "sample_ensemble",
    "ks_distance",
    "Histogram",
    "marginal_cdf",
    "kernel_marginal",
]

CHUNK = 10_000


class UnsamplableError(ValueError):
    """No matrix-level sampler for this ensemble."""


def _gue_matrices(n, rng, count):
    g = rng.standard_normal((count, n, n)) + 1j * rng.standard_normal((count, n, n))
    return (g + np.conj(np.swapaxes(g, -1, -2))) / 2


def _lue_matrices(n, alpha, rng, count):
    cols = n + alpha
    g = (rng.standard_normal((count, n, cols)) + 1j * rng.standard_normal((count, n, cols))) / math.sqrt(2)
    return g @ np.conj(np.swapaxes(g, -1, -2))


def _int_alpha(alpha):
    a = float(alpha)
    if a < 0 or a != int(a):
        raise UnsamplableError(f"LUE sampling needs a nonnegative integer alpha, got {alpha}")
    return int(a)


def _matrices(ens, rng, count):
    if isinstance(ens, GUE):
        return _gue_matrices(ens.n, rng, count)
    if isinstance(ens, LUE):
        return _lue_matrices(ens.n, _int_alpha(ens.alpha), rng, count)
    if isinstance(ens, Fixed):
        u = haar_unitary(ens.n, seed=rng, size=count)
        d = np.asarray(ens.eigenvalues)
        return (u * d[None, None, :]) @ np.conj(np.swapaxes(u, -1, -2))
    raise UnsamplableError(f"no matrix sampler for {type(ens).__name__}")


def _run(job, size, seed, workers):
    counts = [CHUNK] * (size // CHUNK) + ([size % CHUNK] if size % CHUNK else [])
    seeds = np.random.SeedSequence(seed).spawn(len(counts))
    tasks = [(c, np.random.default_rng(s)) for c, s in zip(counts, seeds)]
    if workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            parts = list(pool.map(lambda t: job(*t), tasks))
    else:
        parts = [job(*t) for t in tasks]
    return np.concatenate(parts, axis=0)


def _spectra(mats):
    return np.linalg.eigvalsh(mats)


def sample_ensemble(ens, size, seed=None, workers=1):
    """``size`` sorted spectra, shape ``(size, n)``."""
    if size < 1:
        raise ValueError("size must be positive")
    _matrices(ens, np.random.default_rng(0), 1)  # fail early if unsamplable
    return _run(lambda c, rng: _spectra(_matrices(ens, rng, c)), size, seed, workers)


def sample_gue(n, seed=None, size=None, workers=1):
    """Eigenvalues of GUE matrices (density ``prop. exp(-Tr X**2 / 2)``).

    Returns shape ``(n,)`` when ``size`` is None, else ``(size, n)``.
    """
    if n < 1:
        raise ValueError("n must be positive")
    out = sample_ensemble(GUE(n), 1 if size is None else size, seed, workers)
    return out[0] if size is None else out


def sample_lue(n, alpha, seed=None, size=None, workers=1):
    """Eigenvalues of ``G G*``, ``G`` an ``n x (n + alpha)`` complex Gaussian matrix."""
    if n < 1:
        raise ValueError("n must be positive")
    _int_alpha(alpha)
    out = sample_ensemble(LUE(n, alpha), 1 if size is None else size, seed, workers)
    return out[0] if size is None else out


def sample_sum(a, b, seed=None, size=None, workers=1):
    """Eigenvalues of ``X + Y`` with ``X ~ a``, ``Y ~ b`` independent at matrix level."""
    if a.n != b.n:
        raise ValueError("dimension mismatch")
    for e in (a, b):
        _matrices(e, np.random.default_rng(0), 1)

    def job(c, rng):
        return _spectra(_matrices(a, rng, c) + _matrices(b, rng, c))

    out = _run(job, 1 if size is None else size, seed, workers)
    return out[0] if size is None else out


def ks_distance(samples, cdf):
    """Sup-distance between the empirical CDF of ``samples`` and ``cdf``."""
    samples = np.asarray(samples, dtype=float).ravel()
    if len(samples) < 100:
        raise ValueError("need at least 100 samples")
    return float(stats.kstest(samples, cdf).statistic)


@dataclass
class Histogram:
    """Counts on fixed bin edges; ``merge`` is commutative and associative."""

    edges: np.ndarray
    counts: np.ndarray

    @classmethod
    def from_samples(cls, samples, edges=None):
        samples = np.asarray(samples, dtype=float).ravel()
        if edges is None:
            edges = np.histogram_bin_edges(samples, bins="fd")
        counts, _ = np.histogram(samples, bins=edges)
        return cls(np.asarray(edges, dtype=float), counts.astype(np.int64))

    @classmethod
    def empty(cls, edges):
        return cls(np.asarray(edges, dtype=float), np.zeros(len(edges) - 1, dtype=np.int64))

    def merge(self, other):
        if not np.array_equal(self.edges, other.edges):
            raise ValueError("cannot merge histograms with different edges")
        return Histogram(self.edges, self.counts + other.counts)

    @property
    def total(self):
        return int(self.counts.sum())

    def density(self):
        return self.counts / (max(self.total, 1) * np.diff(self.edges))

    def rows(self):
        """``(bin_left, bin_right, density)`` tuples."""
        return list(zip(self.edges[:-1], self.edges[1:], self.density()))


def marginal_cdf(density, lo, hi, points=20001):
    """CDF of a one-dimensional density on ``[lo, hi]`` by cumulative quadrature."""
    x = np.linspace(lo, hi, points)
    f = np.asarray(density(x), dtype=float)
    c = integrate.cumulative_simpson(f, x=x, initial=0.0)
    return lambda t: np.interp(t, x, c, left=0.0, right=c[-1])


def kernel_marginal(ens):
    """One-point density ``K(x, x) / n`` and a support interval for ``ens``."""
    from .biorth import build_biorth, kernel

    pe = as_pe(ens)
    k = kernel(build_biorth(pe))
    spans = [w.span for w in pe.weights]
    return k.marginal, (min(s[0] for s in spans), max(s[1] for s in spans))
