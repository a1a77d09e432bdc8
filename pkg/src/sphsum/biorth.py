"""Biorthogonal systems of polynomial ensembles and their transformation
under addition of an LUE matrix.

For a polynomial ensemble with weights ``w_1..w_n`` a biorthogonal system
is a pair of families ``p_j`` (monic, degree ``j``) and
``q_k in span{w_l}`` with ``integral p_j q_k = delta_jk``; the correlation
kernel is ``K(x, y) = sum_k p_k(x) q_k(y)``.

Adding an independent ``LUE(alpha)`` matrix maps the system to
``P_k = sum_j (-1)**j binom(alpha+n, j) p_k^(j)`` and
``Q_k = Gamma(alpha+n)**-1 int_0^inf x**(alpha+n-1) e**-x q_k(y - x) dx``.
``P`` inverts the smoothing operator
``L p = sum_j binom(alpha+n+j-1, j) p^(j)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Sequence

import numpy as np
from scipy import special

from .ensembles import PE, DegenerateEnsembleError, as_pe, moment_matrix
from .quadrature import QuadratureError, graded_unit_rule
from .weights import LinearCombination, Weight, convolve, laguerre_weight

__all__ = [
    "MonicPolynomial",
    "gbinom",
    "smoothing_L",
    "inverse_coeffs",
    "chu_vandermonde_residuals",
    "transform_P",
    "transform_Q",
    "BiorthSystem",
    "build_biorth",
    "biorth_residual",
    "KernelRep",
    "kernel",
    "transformed_kernel",
]


class MonicPolynomial:
    """Polynomial with coefficients low to high and leading coefficient 1.

    Coefficients may be ``Fraction`` for exact arithmetic.
    """

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Sequence):
        c = list(coeffs)
        while len(c) > 1 and c[-1] == 0:
            c.pop()
        if not c or c[-1] != 1:
            raise ValueError(f"leading coefficient must be exactly 1, got {c[-1] if c else None}")
        self.coeffs = tuple(c)

    @property
    def degree(self):
        return len(self.coeffs) - 1

    @property
    def exact(self):
        return all(isinstance(c, (int, Fraction)) for c in self.coeffs)

    def __repr__(self):
        return f"MonicPolynomial({list(self.coeffs)})"

    def __eq__(self, other):
        return isinstance(other, MonicPolynomial) and self.coeffs == other.coeffs

    def __hash__(self):
        return hash(self.coeffs)

    def __call__(self, x):
        if isinstance(x, (int, Fraction)):
            acc = 0
            for c in reversed(self.coeffs):
                acc = acc * x + c
            return acc
        x = np.asarray(x, dtype=float)
        acc = np.zeros(x.shape)
        for c in reversed(self.coeffs):
            acc = acc * x + float(c)
        return acc

    def derivative_coeffs(self, j):
        """Coefficients of the ``j``-th derivative (not monic)."""
        c = list(self.coeffs)
        for _ in range(j):
            c = [k * c[k] for k in range(1, len(c))]
        return c


def _falling(a, j):
    out = 1
    for l in range(j):
        out = out * (a - l)
    return out


def gbinom(a, j):
    """``binom(a, j)`` for any real (or rational) ``a`` and integer ``j >= 0``."""
    f = _falling(a, j)
    if isinstance(f, (int, Fraction)):
        return Fraction(f) / math.factorial(j)
    return f / math.factorial(j)


def _apply(p: MonicPolynomial, coeff: Callable[[int], object]):
    """``sum_j coeff(j) p^(j)``."""
    out = [0] * (p.degree + 1)
    for j in range(p.degree + 1):
        a = coeff(j)
        for i, c in enumerate(p.derivative_coeffs(j)):
            out[i] = out[i] + a * c
    # j = 0 leaves the leading term untouched; keep it exact
    out[-1] = p.coeffs[-1]
    return MonicPolynomial(out)


def _check(alpha, n):
    if alpha + n <= 0:
        raise ValueError("need alpha + n > 0")


def smoothing_L(p: MonicPolynomial, alpha, n) -> MonicPolynomial:
    """``L p = sum_j binom(alpha+n+j-1, j) p^(j)``."""
    _check(alpha, n)
    return _apply(p, lambda j: gbinom(alpha + n + j - 1, j))


def inverse_coeffs(alpha, n, kmax):
    """``a_k = (-1)**k binom(alpha+n, k)`` for ``k = 0..kmax``."""
    _check(alpha, n)
    return [(-1) ** k * gbinom(alpha + n, k) for k in range(kmax + 1)]


def chu_vandermonde_residuals(alpha, n, kmax):
    """``sum_{j<=k} a_{k-j} binom(alpha+n+j-1, j)`` for ``k = 1..kmax`` (all zero)."""
    a = inverse_coeffs(alpha, n, kmax)
    return [sum(a[k - j] * gbinom(alpha + n + j - 1, j) for j in range(k + 1)) for k in range(1, kmax + 1)]


def transform_P(p: MonicPolynomial, alpha, n) -> MonicPolynomial:
    """``P = sum_j (-1)**j binom(alpha+n, j) p^(j)``, so that ``L P = p``."""
    a = inverse_coeffs(alpha, n, p.degree)
    return _apply(p, lambda j: a[j])


def _smoothing_kernel(alpha, n):
    p = alpha + n - 1
    return laguerre_weight(alpha, p), 1.0 / special.gamma(alpha + n)


def transform_Q(q: Weight, alpha, n, tol=1e-10) -> Weight:
    """``Q(y) = Gamma(alpha+n)**-1 int_0^inf x**(alpha+n-1) e**-x q(y-x) dx``.

    Tabulated; a linear combination of weights is transformed term by term.
    """
    _check(alpha, n)
    kern, c = _smoothing_kernel(alpha, n)
    if isinstance(q, LinearCombination):
        return LinearCombination(c * q.coeffs, [convolve(kern, w, tol) for w in q.weights])
    return LinearCombination([c], [convolve(kern, q, tol)])


# -- systems and kernels ----------------------------------------------------


def _doolittle(m):
    """``M = L U`` with unit lower ``L``; no pivoting (monic normalization)."""
    n = len(m)
    lo = np.eye(n)
    up = np.zeros((n, n))
    scale = np.max(np.abs(m)) or 1.0
    for i in range(n):
        for k in range(i, n):
            up[i, k] = m[i, k] - lo[i, :i] @ up[:i, k]
        if abs(up[i, i]) <= 1e-14 * scale:
            raise DegenerateEnsembleError("moment matrix has a vanishing leading minor")
        for j in range(i + 1, n):
            lo[j, i] = (m[j, i] - lo[j, :i] @ up[:i, i]) / up[i, i]
    return lo, up


@dataclass(frozen=True)
class BiorthSystem:
    """``p_j(x) = sum_i A[j, i] x**i``; ``q_k = sum_l B[k, l] w_l``."""

    base: PE
    A: np.ndarray
    B: np.ndarray

    @property
    def n(self):
        return self.base.n

    @property
    def polys(self):
        out = []
        for j in range(self.n):
            c = list(self.A[j, : j + 1])
            c[-1] = 1.0
            out.append(MonicPolynomial(c))
        return out

    @property
    def duals(self):
        return [LinearCombination(self.B[k], self.base.weights) for k in range(self.n)]

    def p_values(self, x):
        x = np.atleast_1d(np.asarray(x, dtype=float))
        return self.A @ np.vander(x, self.n, increasing=True).T

    def q_values(self, y):
        y = np.atleast_1d(np.asarray(y, dtype=float))
        return self.B @ np.array([w(y) for w in self.base.weights])


def build_biorth(pe) -> BiorthSystem:
    """Biorthogonal system from the LU factorization ``M = L U`` of the
    moment matrix ``M[j, k] = int x**j w_k``: ``A = L**-1``, ``B = U**-T``."""
    pe = pe if isinstance(pe, PE) else as_pe(pe)
    lo, up = _doolittle(moment_matrix(pe.weights))
    a = np.linalg.solve(lo, np.eye(pe.n))
    b = np.linalg.solve(up, np.eye(pe.n)).T
    return BiorthSystem(pe, np.tril(a), b)


def _span_of(weights):
    spans = [w.span for w in weights]
    lo, hi = min(s[0] for s in spans), max(s[1] for s in spans)
    cuts = {lo, hi}
    for w in weights:
        cuts.update(b for b in w.breakpoints if lo < b < hi)
    return sorted(cuts), min(w.length_scale for w in weights)


def _integrate_pieces(fn, cuts, length_scale, rtol=1e-11, max_doublings=6):
    """Integral over ``[cuts[0], cuts[-1]]`` with graded panels between cuts."""

    def at(factor):
        total = 0.0
        for a, b in zip(cuts[:-1], cuts[1:]):
            panels = factor * (int(np.ceil((b - a) * 2.0 / length_scale)) + 2)
            u, w = graded_unit_rule(panels)
            total = total + (b - a) * np.tensordot(w, fn(a + (b - a) * u), axes=(0, 0))
        return total

    prev = at(1)
    factor = 1
    for _ in range(max_doublings):
        factor *= 2
        cur = at(factor)
        if np.max(np.abs(cur - prev)) <= rtol * max(1.0, np.max(np.abs(cur))):
            return cur
        prev = cur
    raise QuadratureError("kernel quadrature did not converge")


def biorth_residual(system: BiorthSystem):
    """``max |int p_j q_k - delta_jk|`` by quadrature (not through moments)."""
    cuts, ls = _span_of(system.base.weights)
    gram = _integrate_pieces(
        lambda x: np.einsum("jx,kx->xjk", system.p_values(x), system.q_values(x)), cuts, ls
    )
    return float(np.max(np.abs(gram - np.eye(system.n))))


class KernelRep:
    """``K(x, y) = sum_k P_k(x) Q_k(y)`` from two value functions returning ``(n, len)``."""

    def __init__(self, pfun, qfun, n, dual_weights, label="kernel"):
        self.pfun, self.qfun, self.n = pfun, qfun, n
        self._weights = list(dual_weights)
        self.label = label

    def __repr__(self):
        return f"KernelRep({self.label}, n={self.n})"

    def __call__(self, x, y):
        """Matrix ``K(x_i, y_j)``."""
        return self.pfun(x).T @ self.qfun(y)

    def diag(self, x):
        x = np.atleast_1d(np.asarray(x, dtype=float))
        return np.sum(self.pfun(x) * self.qfun(x), axis=0)

    def _cuts(self):
        return _span_of(self._weights)

    def trace(self):
        """``int K(x, x) dx`` (equals ``n`` for a valid system)."""
        cuts, ls = self._cuts()
        return float(_integrate_pieces(self.diag, cuts, ls))

    def gram(self):
        """``int P_j Q_k``: the identity for a biorthogonal pair."""
        cuts, ls = self._cuts()
        return _integrate_pieces(
            lambda x: np.einsum("jx,kx->xjk", self.pfun(x), self.qfun(x)), cuts, ls
        )

    def reproducing_error(self, xs, ys):
        """``max |int K(x, t) K(t, y) dt - K(x, y)|`` over the given points."""
        xs = np.atleast_1d(xs)
        ys = np.atleast_1d(ys)
        px, qy = self.pfun(xs), self.qfun(ys)
        g = self.gram()
        lhs = px.T @ g @ qy
        return float(np.max(np.abs(lhs - self(xs, ys))))

    def marginal(self, x):
        """One-point density ``K(x, x) / n``."""
        return self.diag(x) / self.n


def kernel(system: BiorthSystem) -> KernelRep:
    return KernelRep(system.p_values, system.q_values, system.n, system.base.weights, "K^X")


def transformed_kernel(system: BiorthSystem, alpha, tol=1e-10) -> KernelRep:
    """``K^Y(x, y) = sum_k P_k(x) Q_k(y)`` for ``Y = X + LUE(alpha)``.

    ``Q_k`` share their convolution tables across ``k``: each is the same
    combination of the smoothed base weights as ``q_k`` is of the weights.
    """
    n = system.n
    kern, c = _smoothing_kernel(alpha, n)
    smoothed = [convolve(kern, w, tol) for w in system.base.weights]
    big_p = [transform_P(p, alpha, n) for p in system.polys]
    pc = np.zeros((n, n))
    for k, p in enumerate(big_p):
        pc[k, : p.degree + 1] = [float(v) for v in p.coeffs]

    def pfun(x):
        x = np.atleast_1d(np.asarray(x, dtype=float))
        return pc @ np.vander(x, n, increasing=True).T

    def qfun(y):
        y = np.atleast_1d(np.asarray(y, dtype=float))
        return c * (system.B @ np.array([g(y) for g in smoothed]))

    return KernelRep(pfun, qfun, n, smoothed, "K^Y")
