"""Spherical functions of the pair (U(n) x| Herm(n), U(n)).

``spherical_phi`` uses the Harish-Chandra/Itzykson-Zuber determinant with
two-dimensional Hermite divided differences, so coincident entries of ``s``
or ``x`` are handled as limits.  ``spherical_phi_mc`` averages
``exp(i Tr(S U X U*))`` over Haar unitaries and is kept independent of the
determinantal code path.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from .detkit import DEFAULT_CLUSTER_TOL, _abs_tol, divided_differences

__all__ = ["spherical_phi", "haar_unitary", "spherical_phi_mc", "i_power"]

_QUADRANT = (1.0 + 0j, 1j, -1.0 + 0j, -1j)


def i_power(k):
    """``1j ** k`` for integer ``k`` without floating point phase error."""
    return _QUADRANT[k % 4]


def _as_vector(v, name):
    v = np.asarray(v, dtype=float)
    if v.ndim == 0:
        v = v[None]
    if v.ndim != 1 or len(v) == 0:
        raise ValueError(f"{name} must be a non-empty vector")
    if not np.all(np.isfinite(v)):
        raise ValueError(f"{name} has non-finite entries")
    return v


def _mixed_exp(a, b, s, x):
    """d^a/ds^a d^b/dx^b exp(i s x)."""
    acc = 0.0
    for l in range(min(a, b) + 1):
        acc = acc + (
            math.comb(b, l)
            * (math.factorial(a) // math.factorial(a - l))
            * x ** (a - l)
            * (1j * s) ** (b - l)
        )
    return i_power(a) * acc * np.exp(1j * s * x)


def spherical_phi(s, x, cluster_tol=DEFAULT_CLUSTER_TOL):
    """Bounded spherical function ``phi_s`` at a matrix with eigenvalues ``x``.

    Parameters
    ----------
    s, x : array_like, shape (n,)
        Spectral parameter and eigenvalues.  Entries may coincide.

    Returns
    -------
    complex
    """
    s = _as_vector(s, "s")
    x = _as_vector(x, "x")
    n = len(s)
    if len(x) != n:
        raise ValueError(f"dimension mismatch: len(s)={n}, len(x)={len(x)}")
    s = np.sort(s)
    x = np.sort(x)
    tol_s = _abs_tol(s, cluster_tol)
    tol_x = _abs_tol(x, cluster_tol)

    # x first: G[a][k, j] = (d_s^a e^{i s_j .})[x_0..x_k]
    g = {}

    def s_values(a):
        if a not in g:
            g[a] = divided_differences(
                x, lambda b: _mixed_exp(a, b, s[None, :], x[:, None]), tol_x
            ).T
        return g[a]

    table = divided_differences(s, s_values, tol_s)
    ratio = np.linalg.det(table)
    m = n * (n - 1) // 2
    pref = math.prod(math.factorial(j) for j in range(n))
    return complex(pref * i_power(-m) * ratio)


def haar_unitary(n, seed=None, size=None):
    """Haar-distributed unitary matrices.

    QR decomposition of a standard complex Gaussian matrix, with the columns
    rephased by the signs of ``diag(R)`` so the law is exactly Haar.

    Parameters
    ----------
    n : int
    seed : int, SeedSequence or Generator, optional
    size : int, optional
        Number of matrices; ``None`` returns a single ``(n, n)`` matrix.
    """
    if n < 1:
        raise ValueError("n must be positive")
    rng = np.random.default_rng(seed)
    shape = (n, n) if size is None else (size, n, n)
    z = (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / np.sqrt(2.0)
    q, r = np.linalg.qr(z)
    d = np.diagonal(r, axis1=-2, axis2=-1)
    ph = d / np.abs(d)
    return q * ph[..., None, :]


def _phi_chunk(s, x, count, seed):
    u = haar_unitary(len(s), seed=seed, size=count)
    tr = np.einsum("j,k,njk->n", s, x, np.abs(u) ** 2)
    c, si = np.cos(tr), np.sin(tr)
    return count, c.sum(), si.sum(), (c**2).sum(), (si**2).sum()


def spherical_phi_mc(s, x, samples=100_000, seed=None, workers=1, chunk=25_000):
    """Monte Carlo estimate of ``phi_s(X)`` from Haar samples.

    The sample budget is cut into chunks, each driven by its own child of
    ``SeedSequence(seed)``; results are merged by count-weighted averaging,
    so the estimate does not depend on ``workers``.

    Returns
    -------
    estimate : complex
    stderr : float
    """
    s = _as_vector(s, "s")
    x = _as_vector(x, "x")
    if len(s) != len(x):
        raise ValueError("dimension mismatch")
    if samples < 1:
        raise ValueError("samples must be positive")
    # scalar S or scalar X: the integrand does not depend on U
    if np.ptp(s) == 0:
        return complex(np.exp(1j * s[0] * x.sum())), 0.0
    if np.ptp(x) == 0:
        return complex(np.exp(1j * x[0] * s.sum())), 0.0
    counts = [chunk] * (samples // chunk) + ([samples % chunk] if samples % chunk else [])
    seeds = np.random.SeedSequence(seed).spawn(len(counts))
    jobs = list(zip(counts, seeds))
    if workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            parts = list(pool.map(lambda a: _phi_chunk(s, x, *a), jobs))
    else:
        parts = [_phi_chunk(s, x, *a) for a in jobs]
    tot = np.sum(parts, axis=0)
    nsum, csum, ssum, c2, s2 = tot
    mc, ms = csum / nsum, ssum / nsum
    var = (c2 / nsum - mc**2) + (s2 / nsum - ms**2)
    stderr = math.sqrt(max(var, 0.0) * nsum / max(nsum - 1, 1) / nsum)
    return complex(mc, ms), stderr
