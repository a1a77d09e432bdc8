"""Quadrature rules used throughout the package.

Three decay classes cover every integral we need: Gaussian decay on the
full line (Gauss-Hermite), exponential decay on a half line (generalized
Gauss-Laguerre) and finite intervals (composite Gauss-Legendre, optionally
graded towards endpoint singularities).
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from functools import lru_cache

import numpy as np
from scipy import special

__all__ = [
    "QuadratureError",
    "QuadratureRule",
    "hermite",
    "laguerre",
    "legendre",
    "integrate_adaptive",
    "graded_unit_rule",
    "integrate_intervals",
]


class QuadratureError(RuntimeError):
    """Adaptive refinement did not reach the requested tolerance."""


@lru_cache(maxsize=64)
def _hermite_nodes(order):
    t, w = special.roots_hermite(order)
    with np.errstate(divide="ignore"):
        logw = np.log(w)
    return t, w, logw


@lru_cache(maxsize=64)
def _laguerre_nodes(order, alpha):
    t, w = special.roots_genlaguerre(order, alpha)
    with np.errstate(divide="ignore"):
        logw = np.log(w)
    return t, w, logw


@lru_cache(maxsize=64)
def _legendre_nodes(order):
    return np.polynomial.legendre.leggauss(order)


@dataclass(frozen=True)
class QuadratureRule:
    """A one-dimensional quadrature rule.

    ``kind`` is one of ``"hermite"``, ``"laguerre"``, ``"legendre"``.

    * hermite: absorbs ``exp(-(x - center)**2 / (2 scale**2))``
    * laguerre: absorbs ``u**alpha exp(-u)`` with ``u = (x - center) / scale``
    * legendre: composite rule on ``interval`` split into ``panels`` panels
    """

    kind: str
    order: int = 64
    center: float = 0.0
    scale: float = 1.0
    alpha: float = 0.0
    interval: tuple[float, float] = (-1.0, 1.0)
    panels: int = 1

    def __post_init__(self):
        if self.kind not in ("hermite", "laguerre", "legendre"):
            raise ValueError(f"unknown quadrature kind {self.kind!r}")
        if self.order < 1:
            raise ValueError("order must be positive")

    def weighted(self):
        """Nodes and weights integrating ``g * rho`` where rho is the absorbed factor."""
        if self.kind == "hermite":
            t, w, _ = _hermite_nodes(self.order)
            c = np.sqrt(2.0) * self.scale
            return self.center + c * t, c * w
        if self.kind == "laguerre":
            t, w, _ = _laguerre_nodes(self.order, float(self.alpha))
            return self.center + self.scale * t, self.scale * w
        return self.nodes_weights()

    def nodes_weights(self):
        """Nodes and weights with ``sum(w * f(x)) ~ integral of f dx``."""
        if self.kind == "hermite":
            t, _, logw = _hermite_nodes(self.order)
            c = np.sqrt(2.0) * self.scale
            return self.center + c * t, c * np.exp(logw + t**2)
        if self.kind == "laguerre":
            t, _, logw = _laguerre_nodes(self.order, float(self.alpha))
            with np.errstate(divide="ignore"):
                lt = np.log(t)
            w = self.scale * np.exp(logw + t - self.alpha * lt)
            return self.center + self.scale * t, w
        u, wu = _legendre_nodes(self.order)
        a, b = self.interval
        edges = np.linspace(a, b, self.panels + 1)
        half = 0.5 * np.diff(edges)
        mid = 0.5 * (edges[1:] + edges[:-1])
        x = (mid[:, None] + half[:, None] * u[None, :]).ravel()
        w = (half[:, None] * wu[None, :]).ravel()
        return x, w

    def log_density(self, x):
        """Logarithm of the absorbed factor rho at ``x`` (``-inf`` off support)."""
        x = np.asarray(x, dtype=float)
        if self.kind == "hermite":
            return -((x - self.center) ** 2) / (2 * self.scale**2)
        if self.kind == "laguerre":
            u = (x - self.center) / self.scale
            with np.errstate(divide="ignore", invalid="ignore"):
                out = self.alpha * np.log(u) - u
            return np.where(u > 0, out, -np.inf)
        return np.zeros_like(x)

    def refined(self):
        """Same rule at twice the order (twice the panels for legendre)."""
        if self.kind == "legendre":
            return replace(self, panels=2 * self.panels)
        return replace(self, order=2 * self.order)

    def integrate(self, f, weighted=False):
        x, w = self.weighted() if weighted else self.nodes_weights()
        return np.tensordot(w, f(x), axes=(0, 0))


def hermite(order=64, center=0.0, scale=1.0):
    return QuadratureRule("hermite", order=order, center=center, scale=scale)


def laguerre(order=64, center=0.0, scale=1.0, alpha=0.0):
    return QuadratureRule("laguerre", order=order, center=center, scale=scale, alpha=alpha)


def legendre(a, b, order=16, panels=1):
    return QuadratureRule("legendre", order=order, interval=(a, b), panels=panels)


def integrate_adaptive(f, rule, rtol=1e-10, atol=0.0, max_doublings=4, weighted=False):
    """Integrate with ``rule``, doubling until two successive results agree."""
    prev = rule.integrate(f, weighted=weighted)
    for _ in range(max_doublings):
        rule = rule.refined()
        cur = rule.integrate(f, weighted=weighted)
        err = np.max(np.abs(cur - prev))
        if err <= atol + rtol * np.max(np.abs(cur)):
            return cur
        prev = cur
    raise QuadratureError(f"no convergence: last change {err:.3e}")


@lru_cache(maxsize=128)
def graded_unit_rule(panels, order=16, levels=14, ratio=0.18):
    """Composite Gauss-Legendre rule on [0, 1], graded towards both ends.

    The outermost uniform panel at each end is replaced by a geometric mesh
    so that algebraic endpoint singularities such as ``u**p`` with ``p > -1``
    are integrated to near machine precision.
    """
    u, wu = _legendre_nodes(order)
    inner = np.linspace(0.0, 1.0, max(panels, 2) + 1)
    left = inner[1] * ratio ** np.arange(levels, -1, -1)
    left = np.concatenate([[0.0], left])
    right = 1.0 - left[::-1]
    edges = np.unique(np.concatenate([left, inner[1:-1], right]))
    half = 0.5 * np.diff(edges)
    mid = 0.5 * (edges[1:] + edges[:-1])
    x = (mid[:, None] + half[:, None] * u[None, :]).ravel()
    w = (half[:, None] * wu[None, :]).ravel()
    return x, w


def integrate_intervals(f, a, b, panels, order=16, chunk=2_000_000):
    """Vectorized integral of ``f`` over a batch of intervals ``[a_i, b_i]``.

    ``f`` receives an array of shape ``(m, q)`` of abscissae (one row per
    interval) and must return values of the same shape.  Empty intervals
    (``b <= a``) contribute zero.
    """
    a = np.atleast_1d(np.asarray(a, dtype=float))
    b = np.atleast_1d(np.asarray(b, dtype=float))
    u, wu = graded_unit_rule(int(panels), order)
    length = np.clip(b - a, 0.0, None)
    out = None
    step = max(1, chunk // len(u))
    for start in range(0, len(a), step):
        sl = slice(start, start + step)
        t = a[sl, None] + length[sl, None] * u[None, :]
        vals = f(t)
        part = (vals * wu[None, :]).sum(axis=1) * length[sl]
        if out is None:
            out = np.empty(len(a), dtype=part.dtype)
        elif part.dtype != out.dtype:
            out = out.astype(np.result_type(out, part))
        out[sl] = part
    return out
