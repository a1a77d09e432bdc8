"""Sums of independent unitarily invariant matrices.

Structured routes (the polynomial-ensemble corollaries) turn a sum into a
new polynomial ensemble whose weights are convolutions; the generic route
multiplies spherical transforms and inverts.  Results carry a ``kind``:

* ``"joint"``: symmetric joint eigenvalue density on R^n;
* ``"matrix"``: the invariant matrix density at spectrum ``x``;
* ``"marginal"``: one-point density (integrating to 1) from the kernel
  diagonal, ``K(x, x) / n``; ``x`` is then a 1-d grid.
"""

from __future__ import annotations

import logging
import math

import numpy as np
from scipy import special

from .detkit import DEFAULT_CLUSTER_TOL, _abs_tol, cluster_ids, det_ratio, vandermonde
from .ensembles import (
    DPE,
    GUE,
    LUE,
    PE,
    Fixed,
    as_pe,
    joint_eigen_density,
    matrix_density,
    moment_matrix,
    transform_of,
)
from .quadrature import graded_unit_rule, integrate_intervals
from .transform import inverse, multiply
from .weights import Shifted, Weight, convolve, gaussian, laguerre_weight

__all__ = [
    "CapabilityError",
    "add_gue",
    "add_lue",
    "add_dpe",
    "add_dpe_pe",
    "summed_ensemble",
    "sum_density",
    "lue_fixed_shift_density",
    "shift_normalization",
    "fixed_shift_ensemble",
    "averaged_shift_density",
]

log = logging.getLogger(__name__)


class CapabilityError(ValueError):
    """No implemented route covers the requested combination."""


def _pe(pe) -> PE:
    if not isinstance(pe, PE):
        pe = as_pe(pe)
    return pe


def add_gue(pe) -> PE:
    """PE + GUE: weights ``g_k = exp(-x**2/2) * f_k``."""
    pe = _pe(pe)
    g = gaussian()
    return PE(tuple(convolve(g, f) for f in pe.weights))


def add_lue(pe, alpha) -> PE:
    """PE + LUE(alpha): weights ``g_k(y) = int_0^inf x**(alpha+n-1) e**-x f_k(y-x) dx``."""
    pe = _pe(pe)
    kern = laguerre_weight(alpha, alpha + pe.n - 1)
    return PE(tuple(convolve(kern, f) for f in pe.weights))


def add_dpe(w1: Weight, w2: Weight, n: int) -> DPE:
    """DPE(w1) + DPE(w2) = DPE(w1 * w2)."""
    return DPE(convolve(w1, w2), n)


def add_dpe_pe(w: Weight, pe) -> PE:
    """DPE(w) + PE(w_1..w_n) = PE(w * w_1, ..., w * w_n)."""
    pe = _pe(pe)
    return PE(tuple(convolve(w, f) for f in pe.weights))


def _dpe_generator(ens):
    if isinstance(ens, GUE):
        return gaussian()
    if isinstance(ens, LUE):
        return laguerre_weight(ens.alpha, ens.alpha + ens.n - 1)
    if isinstance(ens, DPE):
        return ens.w
    return None


def fixed_shift_ensemble(x_fixed, other) -> PE:
    """Spectrum of ``diag(x_fixed) + Y`` as a PE in ``y``, ``Y`` GUE/LUE/DPE.

    Weights ``w(y - x_k)`` with ``w`` the derivative-type generator of ``Y``
    (for LUE(alpha): ``t**(alpha+n-1) e**-t`` on ``t >= 0``).  A cluster of
    ``r`` equal entries contributes ``w, w', ..., w^(r-1)`` shifted to it.
    """
    if isinstance(other, (int, float)):
        other = LUE(len(x_fixed), float(other))
    w = _dpe_generator(other)
    if w is None:
        raise CapabilityError(f"no fixed-shift form for {other!r}")
    x = np.sort(np.asarray(x_fixed, dtype=float))
    if len(x) != other.n:
        raise ValueError("dimension mismatch")
    ids = cluster_ids(x, _abs_tol(x, 1e-12))
    weights = []
    for i, c in enumerate(x):
        order = int(np.sum(ids[:i] == ids[i]))
        weights.append(Shifted(w.derivative(order), c))
    return PE(tuple(weights))


def summed_ensemble(a, b):
    """Polynomial ensemble of the sum via a corollary, with the route name."""
    if isinstance(b, Fixed):
        a, b = b, a
    if isinstance(a, Fixed):
        if isinstance(b, Fixed):
            raise CapabilityError("sum of two fixed matrices is not an ensemble")
        return fixed_shift_ensemble(a.eigenvalues, b), "fixed_shift"
    # smoothing side: prefer GUE, then DPE, then LUE
    rank = {GUE: 0, DPE: 1, LUE: 2}
    cands = sorted((e for e in (a, b) if type(e) in rank), key=lambda e: rank[type(e)])
    if not cands:
        raise CapabilityError("PE + PE has no corollary route")
    kern = cands[0]
    other = b if kern is a else a
    if isinstance(kern, GUE):
        return add_gue(other), "add_gue"
    if isinstance(kern, LUE):
        return add_lue(other, kern.alpha), "add_lue"
    return add_dpe_pe(kern.w, other), "add_dpe_pe"


def _auto_route(a, b):
    product = (GUE, LUE, DPE)
    if isinstance(a, Fixed) or isinstance(b, Fixed):
        other = b if isinstance(a, Fixed) else a
        return "corollary" if isinstance(other, product) else "inversion"
    if isinstance(a, product) and isinstance(b, product):
        return "inversion"
    if isinstance(a, PE) and isinstance(b, PE):
        return "inversion"
    return "corollary"


def sum_density(a, b, x, kind="joint", method="auto", return_path=False):
    """Density of the spectrum of ``X + Y``, ``X ~ a``, ``Y ~ b`` independent.

    Parameters
    ----------
    method : {"auto", "corollary", "inversion"}
        ``"corollary"`` builds the summed polynomial ensemble; ``"inversion"``
        inverts the product of transforms.  ``"auto"`` inverts products of
        product forms and uses the corollaries otherwise.
    """
    if a.n != b.n:
        raise ValueError(f"dimension mismatch: {a.n} vs {b.n}")
    if kind == "marginal":
        method = "corollary"
    route = _auto_route(a, b) if method == "auto" else method
    if route == "corollary":
        ens, path = summed_ensemble(a, b)
        if kind == "joint":
            val = joint_eigen_density(ens, x)
        elif kind == "matrix":
            val = matrix_density(ens, x)
        elif kind == "marginal":
            from .biorth import build_biorth, kernel

            val = kernel(build_biorth(ens)).diag(x) / ens.n
        else:
            raise ValueError(f"unknown kind {kind!r}")
    elif route == "inversion":
        path = "inversion"
        rep = multiply(transform_of(a), transform_of(b))
        val = inverse(rep, x, kind=kind)
    else:
        raise ValueError(f"unknown method {method!r}")
    log.info("sum_density path: %s", path)
    return (val, path) if return_path else val


# -- the fixed-matrix shift of an LUE ---------------------------------------


def _shift_constant(n, alpha):
    return 1.0 / (math.factorial(n) * special.gamma(alpha + n) ** n)


def lue_fixed_shift_density(x_fixed, alpha, y, cluster_tol=DEFAULT_CLUSTER_TOL):
    """Joint eigenvalue density of ``diag(x_fixed) + L``, ``L ~ LUE(alpha)``:

        C Delta(y) / Delta(x) det[(y_j - x_k)_+**p exp(-(y_j - x_k))],  p = alpha + n - 1,

    with ``C = 1 / (n! Gamma(alpha + n)**n)``.  Coincident entries of
    ``x_fixed`` are handled as limits (divided differences in ``x``).
    """
    x = np.asarray(x_fixed, dtype=float)
    n = len(x)
    yb = np.atleast_2d(np.asarray(y, dtype=float))
    single = np.ndim(y) <= 1
    if yb.shape[-1] != n:
        raise ValueError("dimension mismatch")
    phi = laguerre_weight(alpha, alpha + n - 1)
    c = _shift_constant(n, alpha)
    if len(set(cluster_ids(np.sort(x), _abs_tol(x, cluster_tol)))) == n:
        # distinct entries: plain determinant, whole batch at once
        mats = phi(yb[:, :, None] - x[None, None, :])
        out = c * vandermonde(yb) * np.linalg.det(mats) / vandermonde(x)
        return float(out[0]) if single else out
    out = np.empty(len(yb))
    for b, row in enumerate(yb):

        def values(m, row=row):
            # d^m/dx^m phi(y_j - x) at every x node, functions indexed by j
            d = phi.derivative(m)(row[None, :] - x[:, None])
            return (-1) ** m * d

        out[b] = c * vandermonde(row) * det_ratio(x, values, cluster_tol)
    return float(out[0]) if single else out


def _piecewise_rule(cuts, tail, panels=8):
    """Nodes/weights on [cuts[0], cuts[-1] + tail], graded at every cut."""
    edges = list(cuts) + [cuts[-1] + tail]
    xs, ws = [], []
    u, wu = graded_unit_rule(panels)
    for a, b in zip(edges[:-1], edges[1:]):
        if b - a <= 0:
            continue
        xs.append(a + (b - a) * u)
        ws.append((b - a) * wu)
    return np.concatenate(xs), np.concatenate(ws)


def shift_normalization(x_fixed, alpha, panels=8):
    """Fit the constant of :func:`lue_fixed_shift_density` by quadrature.

    Integrates ``Delta(y)/Delta(x) det[...]`` over ``R^n`` (``n <= 2``) on
    a tensor grid with panels split at every ``x_k`` and returns the
    reciprocal, for comparison with the closed form.
    """
    x = np.sort(np.asarray(x_fixed, dtype=float))
    n = len(x)
    if n > 2:
        raise ValueError("quadrature fit implemented for n <= 2")
    p = alpha + n - 1
    tail = 60.0 + 4 * p
    t, w = _piecewise_rule(np.unique(x), tail, panels)
    grids = np.meshgrid(*([t] * n), indexing="ij")
    yy = np.stack([g.ravel() for g in grids], axis=-1)
    ww = np.prod(np.meshgrid(*([w] * n), indexing="ij"), axis=0).ravel()
    dens = lue_fixed_shift_density(x, alpha, yy) / _shift_constant(n, alpha)
    return 1.0 / float(np.sum(ww * dens))


def _smoothed_columns(pe, alpha, yv, panels=24):
    """``int f_k(t) phi(y - t) dt`` by direct quadrature (no tables)."""
    n = pe.n
    phi = laguerre_weight(alpha, alpha + n - 1)
    out = np.empty((len(yv), n))
    for k, f in enumerate(pe.weights):
        lo, hi = f.span
        a = np.full(len(yv), lo)
        b = np.minimum(hi, yv)
        vals = np.zeros(len(yv))
        ok = b > a
        if np.any(ok):
            yy = yv[ok, None]
            vals[ok] = integrate_intervals(lambda t: f(t) * phi(yy - t), a[ok], b[ok], panels)
        out[:, k] = vals
    return out


def averaged_shift_density(pe, alpha, y):
    """Average :func:`lue_fixed_shift_density` over ``X ~ pe`` (Andreief).

    ``C n! Delta(y) det[int f_k(t) phi(y_j - t) dt] / Z_X`` with
    ``Z_X = n! det M``; every integral is a fresh quadrature, so this route
    shares no tables with :func:`add_lue`.
    """
    pe = _pe(pe)
    n = pe.n
    yb = np.atleast_2d(np.asarray(y, dtype=float))
    single = np.ndim(y) <= 1
    z = math.factorial(n) * np.linalg.det(moment_matrix(pe.weights))
    out = np.empty(len(yb))
    for b, row in enumerate(yb):
        g = _smoothed_columns(pe, alpha, row)
        out[b] = _shift_constant(n, alpha) * math.factorial(n) * vandermonde(row) * np.linalg.det(g) / z
    return float(out[0]) if single else out
