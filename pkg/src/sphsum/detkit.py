"""Determinant kernels: Vandermonde products, confluent-safe ratios
``det[g_j(v_k)] / Vandermonde(v)`` and the Andreief identity.

The ratio is evaluated through the Newton form

    det[g_j(v_k)] / Delta(v) = det[g_j[v_1, ..., v_k]]

where ``g[v_1, ..., v_k]`` is a divided difference.  Differences over a
cluster of close nodes are expanded in derivatives at the cluster instead of
formed as difference quotients, so the result is continuous (and accurate)
through coincident and nearly coincident nodes.
"""

from __future__ import annotations

import math

import numpy as np

from .quadrature import QuadratureError, QuadratureRule

__all__ = [
    "MissingDerivativeError",
    "vandermonde",
    "cluster_ids",
    "divided_differences",
    "det_ratio",
    "derivative_values",
    "confluent_det_ratio",
    "andreief_det",
]

DEFAULT_CLUSTER_TOL = 1e-3
TAYLOR_TERMS = 8


class MissingDerivativeError(ValueError):
    """A confluent node cluster needs a derivative the function cannot supply."""


def vandermonde(v):
    """Vandermonde determinant ``prod_{j<k} (v_k - v_j)`` along the last axis."""
    v = np.asarray(v, dtype=float)
    n = v.shape[-1]
    out = np.ones(v.shape[:-1])
    for j in range(n):
        for k in range(j + 1, n):
            out = out * (v[..., k] - v[..., j])
    return out if out.ndim else float(out)


def cluster_ids(nodes, tol):
    """Greedy cluster labels for sorted ``nodes``: a new cluster starts once a
    node is more than ``tol`` away from the first node of the current one."""
    ids = np.zeros(len(nodes), dtype=int)
    anchor = nodes[0] if len(nodes) else 0.0
    for i in range(1, len(nodes)):
        if nodes[i] - anchor > tol:
            ids[i] = ids[i - 1] + 1
            anchor = nodes[i]
        else:
            ids[i] = ids[i - 1]
    return ids


def _abs_tol(nodes, cluster_tol):
    return cluster_tol * max(1.0, float(np.max(np.abs(nodes))) if len(nodes) else 1.0)


def max_multiplicity(nodes, cluster_tol=DEFAULT_CLUSTER_TOL):
    nodes = np.sort(np.asarray(nodes, dtype=float))
    ids = cluster_ids(nodes, _abs_tol(nodes, cluster_tol))
    return int(np.bincount(ids).max()) if len(ids) else 0


def _complete_homogeneous(d, rmax):
    """h_r(d_0, ..., d_k) for r = 0..rmax."""
    h = np.zeros(rmax + 1)
    h[0] = 1.0
    for dj in d:
        for r in range(1, rmax + 1):
            h[r] += dj * h[r - 1]
    return h


def divided_differences(nodes, values, tol, extra=TAYLOR_TERMS):
    """Top row of the Hermite divided-difference table.

    Parameters
    ----------
    nodes : (n,) sorted array
    values : callable
        ``values(m)`` returns the m-th derivative at every node, an array of
        shape ``(n, ...)``.
    tol : float
        Absolute cluster tolerance.  Differences over nodes that all lie in
        one cluster come from the Taylor expansion at the first node,
        ``f[z_i..z_{i+k}] = sum_r f^{(k+r)}(z_i) / (k+r)! * h_r(z - z_i)``,
        truncated after ``extra`` correction terms (fewer if higher
        derivatives are unavailable).  Exactly repeated nodes reduce to the
        classical ``f^{(k)} / k!`` entry.

    Returns
    -------
    (n, ...) array whose entry ``k`` is ``f[z_0, ..., z_k]``.
    """
    nodes = np.asarray(nodes, dtype=float)
    n = len(nodes)
    ids = cluster_ids(nodes, tol)
    cache = {}

    def deriv(m, required=True):
        if m not in cache:
            try:
                cache[m] = np.asarray(values(m))
            except MissingDerivativeError:
                if required:
                    raise
                cache[m] = None
        return cache[m]

    level = deriv(0)
    top = [level[0]]
    for k in range(1, n):
        same = ids[k:] == ids[: n - k]
        denom = np.where(same, 1.0, nodes[k:] - nodes[: n - k])
        shape = (n - k,) + (1,) * (level.ndim - 1)
        quot = (level[1:] - level[:-1]) / denom.reshape(shape)
        for i in np.nonzero(same)[0]:
            d = nodes[i : i + k + 1] - nodes[i]
            acc = deriv(k)[i] / math.factorial(k)
            if np.any(d):
                h = _complete_homogeneous(d, extra)
                for r in range(1, extra + 1):
                    dv = deriv(k + r, required=False)
                    if dv is None:
                        break
                    acc = acc + dv[i] * (h[r] / math.factorial(k + r))
            quot[i] = acc
        level = quot
        top.append(level[0])
    return np.stack(top)


def det_ratio(nodes, values, cluster_tol=DEFAULT_CLUSTER_TOL):
    """``det[g_j(v_k)] / Delta(v)`` from derivative tables.

    ``values(m)`` must return an array ``(n_nodes, n_funcs, ...)`` with the
    m-th derivatives of every function at every node.  Extra trailing axes
    are carried through as a batch.
    """
    nodes = np.asarray(nodes, dtype=float)
    order = np.argsort(nodes, kind="stable")
    snodes = nodes[order]
    tol = _abs_tol(snodes, cluster_tol)
    table = divided_differences(snodes, lambda m: np.asarray(values(m))[order], tol)
    # table[k, j, ...] = g_j[v_0..v_k]; move to (..., j, k)
    mat = np.moveaxis(np.moveaxis(table, 0, -1), 0, -2)
    return np.linalg.det(mat)


def _fd_weights(deriv, npts):
    offsets = np.arange(npts) - (npts - 1) / 2
    a = np.vander(offsets, npts, increasing=True).T
    rhs = np.zeros(npts)
    rhs[deriv] = math.factorial(deriv)
    return offsets, np.linalg.solve(a, rhs)


def fd_derivative(func, order, x, scale=1.0):
    """Central finite difference of fourth-order accuracy."""
    if order == 0:
        return func(x)
    npts = 2 * ((order + 1) // 2) + 3
    offsets, w = _fd_weights(order, npts)
    h = np.finfo(float).eps ** (1.0 / (order + 4)) * scale
    x = np.asarray(x, dtype=float)
    acc = 0.0
    for o, c in zip(offsets, w):
        acc = acc + c * np.asarray(func(x + o * h))
    return acc / h**order


def derivative_values(func, order, x, allow_fd=True):
    """``func^{(order)}(x)`` using ``func.derivative(order)`` when available."""
    if order == 0:
        return np.asarray(func(x))
    maxd = getattr(func, "max_derivative", None)
    if maxd is not None and order > maxd:
        raise MissingDerivativeError(
            f"derivative of order {order} requested, only {maxd} available"
        )
    if hasattr(func, "derivative"):
        return np.asarray(func.derivative(order)(x))
    if isinstance(func, np.polynomial.polynomial.ABCPolyBase):
        return np.asarray(func.deriv(order)(x))
    if not allow_fd:
        raise MissingDerivativeError(
            f"{func!r} has no derivative access and finite differences are disabled"
        )
    return np.asarray(fd_derivative(func, order, x))


def confluent_det_ratio(g, v, cluster_tol=DEFAULT_CLUSTER_TOL, allow_fd=True):
    """Evaluate ``det[g_j(v_k)] / Delta_n(v)`` continuously in ``v``.

    ``g`` is a sequence of n callables.  A callable may expose
    ``derivative(m)`` (returning a callable) and ``max_derivative``, or be
    a numpy polynomial (exact ``deriv``); other plain
    callables fall back to finite differences unless ``allow_fd`` is false.
    """
    v = np.asarray(v, dtype=float).ravel()
    if len(g) != len(v):
        raise ValueError(f"need {len(v)} functions, got {len(g)}")

    def values(m):
        return np.stack(
            [np.broadcast_to(derivative_values(gj, m, v, allow_fd), v.shape) for gj in g],
            axis=1,
        )

    val = det_ratio(v, values, cluster_tol)
    return complex(val) if np.iscomplexobj(val) else float(val)


def andreief_det(f, g, quad: QuadratureRule, rtol=1e-10):
    """``n! det[ integral f_j(x) g_k(x) dx ]`` by the given rule.

    The rule is refined once and the two results compared; a mismatch
    beyond ``rtol`` raises :class:`QuadratureError`.
    """
    n = len(f)
    if len(g) != n:
        raise ValueError("families must have equal length")

    def gram(rule):
        x, w = rule.nodes_weights()
        fv = np.array([np.asarray(fj(x)) * np.ones_like(x) for fj in f])
        gv = np.array([np.asarray(gk(x)) * np.ones_like(x) for gk in g])
        return (fv * w) @ gv.T

    m1 = gram(quad)
    m2 = gram(quad.refined())
    scale = np.max(np.abs(m2)) or 1.0
    if np.max(np.abs(m2 - m1)) > rtol * scale:
        raise QuadratureError("Gram matrix did not converge under refinement")
    val = math.factorial(n) * np.linalg.det(m2)
    return float(np.real_if_close(val)) if np.isrealobj(val) else complex(val)
