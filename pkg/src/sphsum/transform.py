"""Spherical transforms: representations, forward quadrature, products and
inversion.

Conventions, with ``m = n(n-1)/2``:

    f^(s) = (pi i)**m / (n! Delta(s)) * integral f(x) det[exp(-i s_j x_k)] Delta(x) dx

    f(x)  = (pi i)**(-m) / ((2 pi)**n n! Delta(x))
            * integral f^(s) det[exp(i s_j x_k)] Delta(s) ds

where ``f`` is the matrix density as a function of the spectrum.  A
transform of the shape ``c det[h_k(s_j)] / Delta(s)`` inverts, by the
Andreief identity, to a single determinant of one-dimensional integrals
``I_k(x) = integral h_k(s) exp(i s x) ds``.
"""

from __future__ import annotations

import logging
import math
import warnings
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from numpy.polynomial import hermite_e
from scipy import integrate

from .detkit import DEFAULT_CLUSTER_TOL, det_ratio, fd_derivative, vandermonde
from .ensembles import DPE, GUE, LUE, PE, Fixed, as_pe, log_matrix_density, moment_matrix, weyl_constant
from .quadrature import QuadratureError, QuadratureRule, hermite, laguerre
from .spherical import i_power, spherical_phi

__all__ = [
    "DimensionTooLargeError",
    "InconsistentTransformError",
    "SpectralFunction",
    "GaussianFactor",
    "PowerFactor",
    "PhaseFactor",
    "FourierOf",
    "ProductFn",
    "MonomialTimes",
    "CallableSpectral",
    "ConstantOne",
    "ProductForm",
    "DetRatioForm",
    "NumericForm",
    "identity",
    "orbit_transform",
    "evaluate",
    "multiply",
    "forward_numeric",
    "inverse",
    "inverse_with_residue",
    "plancherel_constant",
]

log = logging.getLogger(__name__)

GENERIC_MAX_N = 3
NUMERIC_INVERSE_MAX_N = 2


class DimensionTooLargeError(ValueError):
    """The requested generic (tensor quadrature) path is limited to small n."""


class InconsistentTransformError(ArithmeticError):
    """An inverted density has a large imaginary part."""


def _m(n):
    return n * (n - 1) // 2


# -- one-dimensional spectral functions -------------------------------------


class SpectralFunction:
    """A complex function of one real variable ``s`` with derivative access.

    ``gaussian_width`` is ``w`` when the function decays like
    ``exp(-w**2 s**2 / 2)``; ``None`` means algebraic decay.
    """

    gaussian_width = None

    def __call__(self, s):
        return self.deriv(s, 0)

    def deriv(self, s, j):
        raise NotImplementedError

    def derivative(self, j):
        return _Derived(self, j)

    def inverse_fourier(self, x, j=0):
        """``integral (i s)**j h(s) exp(i s x) ds`` in closed form, if known."""
        raise NotImplementedError

    @property
    def has_inverse(self):
        return False


class _Derived:
    def __init__(self, base, j):
        self.base, self.j = base, j

    def __call__(self, s):
        return self.base.deriv(np.asarray(s, dtype=float), self.j)


def _combine_widths(a, b):
    if a is None:
        return b
    if b is None:
        return a
    return math.hypot(a, b)


class ConstantOne(SpectralFunction):
    def deriv(self, s, j):
        s = np.asarray(s, dtype=float)
        return np.full(s.shape, 1.0 + 0j) if j == 0 else np.zeros(s.shape, complex)

    def __repr__(self):
        return "ConstantOne()"


class GaussianFactor(SpectralFunction):
    """``exp(-var * s**2 / 2)``."""

    def __init__(self, var=1.0):
        if var <= 0:
            raise ValueError("variance must be positive")
        self.var = float(var)
        self.gaussian_width = math.sqrt(self.var)

    def __repr__(self):
        return f"GaussianFactor({self.var})"

    def deriv(self, s, j):
        r = self.gaussian_width
        t = r * np.asarray(s, dtype=float)
        he = hermite_e.hermeval(t, [0.0] * j + [1.0]) if j else 1.0
        return ((-r) ** j * he * np.exp(-(t**2) / 2)).astype(complex)


class PowerFactor(SpectralFunction):
    """``(1 + i s)**(-p)`` (principal branch)."""

    def __init__(self, p):
        self.p = float(p)

    def __repr__(self):
        return f"PowerFactor({self.p})"

    def deriv(self, s, j):
        z = 1 + 1j * np.asarray(s, dtype=float)
        c = math.prod(-self.p - l for l in range(j))
        return c * i_power(j) * z ** (-self.p - j)


class PhaseFactor(SpectralFunction):
    """``exp(-i c s)``: transform of a point mass at ``c``."""

    def __init__(self, c):
        self.c = float(c)

    def __repr__(self):
        return f"PhaseFactor({self.c})"

    def deriv(self, s, j):
        return (-1j * self.c) ** j * np.exp(-1j * self.c * np.asarray(s, dtype=float))


class FourierOf(SpectralFunction):
    """``scale * F w(s)`` for a weight ``w``."""

    def __init__(self, w, scale=1.0):
        self.w = w
        self.scale = scale
        self.gaussian_width = w.fourier_decay

    def __repr__(self):
        return f"FourierOf({self.w!r}, scale={self.scale})"

    def deriv(self, s, j):
        return self.scale * self.w.fourier_derivative(np.asarray(s, dtype=float), j)

    @property
    def has_inverse(self):
        return True

    def inverse_fourier(self, x, j=0):
        # inverse of F w is 2 pi w; (i s)^j corresponds to d^j/dx^j
        return 2 * math.pi * self.scale * self.w.derivative(j)(x)


class ProductFn(SpectralFunction):
    def __init__(self, a, b):
        self.a, self.b = a, b
        self.gaussian_width = _combine_widths(a.gaussian_width, b.gaussian_width)

    def __repr__(self):
        return f"ProductFn({self.a!r}, {self.b!r})"

    def deriv(self, s, j):
        return sum(math.comb(j, l) * self.a.deriv(s, l) * self.b.deriv(s, j - l) for l in range(j + 1))


class MonomialTimes(SpectralFunction):
    """``s**k h(s)``."""

    def __init__(self, k, h):
        self.k, self.h = k, h
        self.gaussian_width = h.gaussian_width

    def __repr__(self):
        return f"MonomialTimes({self.k}, {self.h!r})"

    def deriv(self, s, j):
        s = np.asarray(s, dtype=float)
        acc = 0
        for l in range(min(j, self.k) + 1):
            c = math.comb(j, l) * math.perm(self.k, l)
            acc = acc + c * s ** (self.k - l) * self.h.deriv(s, j - l)
        return acc

    @property
    def has_inverse(self):
        return self.h.has_inverse

    def inverse_fourier(self, x, j=0):
        # s^k = (-i)^k (i s)^k
        return i_power(-self.k) * self.h.inverse_fourier(x, j + self.k)


class CallableSpectral(SpectralFunction):
    """Wrap a vectorized callable; derivatives by finite differences."""

    def __init__(self, fn, gaussian_width=None):
        self.fn = fn
        self.gaussian_width = gaussian_width

    def deriv(self, s, j):
        f = lambda t: np.asarray(self.fn(t), dtype=complex)
        return fd_derivative(f, j, np.asarray(s, dtype=float))


# -- representations --------------------------------------------------------


@dataclass(frozen=True)
class ProductForm:
    """``prod_j factor(s_j)``."""

    factor: SpectralFunction
    n: int

    @property
    def gaussian_width(self):
        return self.factor.gaussian_width


@dataclass(frozen=True)
class DetRatioForm:
    """``prefactor * det[h_k(s_j)] / Delta(s)``."""

    h: tuple
    prefactor: complex = 1.0

    @property
    def n(self):
        return len(self.h)

    @property
    def gaussian_width(self):
        widths = [h.gaussian_width for h in self.h]
        return None if any(w is None for w in widths) else min(widths)


@dataclass(frozen=True)
class NumericForm:
    """Opaque ``s -> complex`` on R^n."""

    fn: Callable
    n: int
    gaussian_width: float | None = None
    label: str = field(default="numeric", compare=False)


def identity(n):
    """Transform of the point mass at the zero matrix."""
    return ProductForm(ConstantOne(), n)


def orbit_transform(eigenvalues):
    """Transform of the point mass on the orbit of ``diag(eigenvalues)``: ``phi_s(-x)``."""
    x = np.asarray(eigenvalues, dtype=float)
    if np.ptp(x) == 0:
        if x[0] == 0:
            return identity(len(x))
        return ProductForm(PhaseFactor(x[0]), len(x))
    return NumericForm(lambda s: spherical_phi(s, -x), len(x), None, label="orbit")


def _s_batch(rep, s):
    s = np.asarray(s, dtype=float)
    single = s.ndim <= 1
    s = np.atleast_2d(s)
    if s.shape[-1] != rep.n:
        raise ValueError(f"dimension mismatch: rep has n={rep.n}, s has {s.shape[-1]}")
    return s, single


def _det_ratio_row(h, row, cluster_tol=DEFAULT_CLUSTER_TOL):
    def values(m):
        return np.stack([np.broadcast_to(hk.deriv(row, m), row.shape) for hk in h], axis=1)

    return det_ratio(row, values, cluster_tol)


def evaluate(rep, s):
    """Value of the transform at ``s`` (shape ``(n,)`` or a batch ``(B, n)``)."""
    sb, single = _s_batch(rep, s)
    if isinstance(rep, ProductForm):
        out = np.prod(rep.factor(sb), axis=-1).astype(complex)
    elif isinstance(rep, DetRatioForm):
        out = np.array([rep.prefactor * _det_ratio_row(rep.h, row) for row in sb], dtype=complex)
    elif isinstance(rep, NumericForm):
        out = np.array([complex(rep.fn(row)) for row in sb])
    else:
        raise TypeError(f"unknown representation {rep!r}")
    return complex(out[0]) if single else out


def multiply(a, b):
    """Transform of the sum of independent invariant matrices."""
    if a.n != b.n:
        raise ValueError(f"dimension mismatch: {a.n} vs {b.n}")
    for x, y in ((a, b), (b, a)):
        if isinstance(x, ProductForm) and isinstance(x.factor, ConstantOne):
            return y
    if isinstance(a, ProductForm) and isinstance(b, ProductForm):
        return ProductForm(ProductFn(a.factor, b.factor), a.n)
    if isinstance(a, DetRatioForm) and isinstance(b, ProductForm):
        a, b = b, a
    if isinstance(a, ProductForm) and isinstance(b, DetRatioForm):
        return DetRatioForm(tuple(ProductFn(a.factor, h) for h in b.h), b.prefactor)
    width = _combine_widths(a.gaussian_width, b.gaussian_width)
    return NumericForm(lambda s: evaluate(a, s) * evaluate(b, s), a.n, width, label="product")


def plancherel_constant(n):
    """``c`` in ``integral |f(X)|**2 dX = c * integral |f^(s)|**2 Delta(s)**2 ds``.

    Taken as a positive real number: ``1 / ((2 pi)**n pi**m prod_{j=0}^{n} j!)``.
    """
    return 1.0 / ((2 * math.pi) ** n * math.pi ** _m(n) * math.prod(math.factorial(j) for j in range(n + 1)))


# -- forward transform by quadrature ----------------------------------------


def _default_rule(ens):
    if isinstance(ens, GUE):
        return hermite(order=32)
    return laguerre(order=32, alpha=float(ens.alpha))


def _generic_forward(ens, sb, rule: QuadratureRule, rtol):
    n = ens.n
    pref = i_power(_m(n)) * math.pi ** _m(n) / math.factorial(n)

    def at_order(r):
        t, w = r.weighted()
        grids = np.meshgrid(*([t] * n), indexing="ij")
        x = np.stack([g.ravel() for g in grids], axis=-1)
        wt = np.prod(np.meshgrid(*([w] * n), indexing="ij"), axis=0).ravel()
        # f / prod(rho): bounded, smooth
        g = np.exp(log_matrix_density(ens, x) - np.sum(r.log_density(x), axis=-1))
        base = wt * g * vandermonde(x)
        xt = x.T  # (n, Q)
        out = []
        for row in sb:

            def values(mm):
                return ((-1j * xt) ** mm)[None, :, :] * np.exp(-1j * row[:, None, None] * xt[None, :, :])

            out.append(pref * np.sum(base * det_ratio(row, values)))
        return np.array(out)

    prev = at_order(rule)
    for _ in range(4):
        rule = QuadratureRule(**{**rule.__dict__, "order": rule.order + 16})
        cur = at_order(rule)
        if np.max(np.abs(cur - prev)) <= rtol * max(1.0, np.max(np.abs(cur))):
            return cur
        prev = cur
    raise QuadratureError("tensor quadrature for the forward transform did not settle")


def _andreief_forward(weights, sb):
    n = len(weights)
    det_m = np.linalg.det(np.array([[w.numeric_moment(j) for w in weights] for j in range(n)]))
    pref = i_power(_m(n)) * math.prod(math.factorial(j) for j in range(n)) / det_m
    out = []
    for row in sb:

        def values(mm):
            return np.stack([w.numeric_fourier(row, mm) for w in weights], axis=1)

        out.append(pref * det_ratio(row, values))
    return np.array(out)


def forward_numeric(ens, s, quad: QuadratureRule | None = None, rtol=1e-10):
    """The spherical transform by direct quadrature, independent of closed forms.

    Polynomial ensembles (including DPE) take the Andreief route: one
    determinant of numerically computed Fourier integrals of the weights.
    GUE and LUE integrate their matrix density on a tensor grid (``n <= 3``),
    using ``quad`` (default: Gauss-Hermite or generalized Gauss-Laguerre
    matched to the density) as the base rule.
    """
    n = ens.n
    sb = np.atleast_2d(np.asarray(s, dtype=float))
    single = np.ndim(s) <= 1
    if sb.shape[-1] != n:
        raise ValueError("dimension mismatch")
    if isinstance(ens, (PE, DPE)):
        out = _andreief_forward(as_pe(ens).weights, sb)
    elif isinstance(ens, (GUE, LUE)):
        if n > GENERIC_MAX_N:
            raise DimensionTooLargeError(f"generic forward transform limited to n <= {GENERIC_MAX_N}")
        out = _generic_forward(ens, sb, quad or _default_rule(ens), rtol)
    elif isinstance(ens, Fixed):
        out = np.array([spherical_phi(row, -np.asarray(ens.eigenvalues)) for row in sb])
    else:
        raise TypeError(f"unknown ensemble {ens!r}")
    return complex(out[0]) if single else out


# -- inversion --------------------------------------------------------------


def _columns(rep):
    if isinstance(rep, ProductForm):
        return [MonomialTimes(k, rep.factor) for k in range(rep.n)], 1.0
    if isinstance(rep, DetRatioForm):
        return list(rep.h), rep.prefactor
    raise TypeError("only product and det-ratio forms have columns")


class _HermiteColumns:
    """``integral (i s)**j h_k(s) exp(i s x) ds`` by Gauss-Hermite with doubling."""

    def __init__(self, cols, width, rtol=1e-12, order=64, max_order=1024):
        self.cols, self.width, self.rtol = cols, width, rtol
        self.order, self.max_order = order, max_order
        self._hv = {}

    def _h(self, order):
        if order not in self._hv:
            s, w = hermite(order=order, scale=1.0 / self.width).nodes_weights()
            hv = np.array([np.asarray(h(s), dtype=complex) for h in self.cols])
            self._hv[order] = (s, w * hv)
        return self._hv[order]

    def _at(self, order, x, j):
        s, wh = self._h(order)
        ph = np.exp(1j * np.multiply.outer(s, x)) * ((1j * s) ** j)[:, None]
        return wh @ ph  # (k, len(x))

    def __call__(self, x, j=0):
        x = np.atleast_1d(np.asarray(x, dtype=float))
        order = self.order
        prev = self._at(order, x, j)
        while order < self.max_order:
            order *= 2
            cur = self._at(order, x, j)
            scale = max(np.max(np.abs(cur)), 1e-300)
            if np.max(np.abs(cur - prev)) <= self.rtol * max(scale, 1e-3):
                self.order = max(self.order, order // 2)
                return cur
            prev = cur
        raise QuadratureError("Gauss-Hermite inversion did not converge")


class _FourierColumns:
    """Same integrals for algebraically decaying columns, by QAWF.

    ``I(x) = integral_0^inf E(s) cos(s x) ds + i integral_0^inf O(s) sin(s x) ds``
    with ``E = h(s) + h(-s)``, ``O = h(s) - h(-s)``.
    """

    def __init__(self, cols, epsabs=1e-13):
        self.cols = cols
        self.epsabs = epsabs
        self._cache = {}

    def _one(self, k, x):
        key = (k, x)
        if key in self._cache:
            return self._cache[key]
        h = self.cols[k]
        at = lambda s: complex(np.asarray(h(np.array([s]))).reshape(-1)[0])
        ev = lambda s: at(s) + at(-s)
        od = lambda s: at(s) - at(-s)
        kw = dict(limlst=200, limit=400, epsabs=self.epsabs)
        with warnings.catch_warnings():
            # QAWF flags slow cycles near s = 0; its extrapolated result is still accurate
            warnings.simplefilter("ignore", integrate.IntegrationWarning)
            val = self._integrate(ev, od, x, kw)
        self._cache[key] = val
        return val

    def _integrate(self, ev, od, x, kw):
        if x == 0:
            kw0 = dict(limit=400, epsabs=self.epsabs)
            re = integrate.quad(lambda s: ev(s).real, 0, np.inf, **kw0)[0]
            im = integrate.quad(lambda s: ev(s).imag, 0, np.inf, **kw0)[0]
            val = complex(re, im)
        else:
            a = abs(x)
            sgn = 1.0 if x > 0 else -1.0
            c_re = integrate.quad(lambda s: ev(s).real, 0, np.inf, weight="cos", wvar=a, **kw)[0]
            c_im = integrate.quad(lambda s: ev(s).imag, 0, np.inf, weight="cos", wvar=a, **kw)[0]
            s_re = integrate.quad(lambda s: od(s).real, 0, np.inf, weight="sin", wvar=a, **kw)[0]
            s_im = integrate.quad(lambda s: od(s).imag, 0, np.inf, weight="sin", wvar=a, **kw)[0]
            val = complex(c_re, c_im) + 1j * sgn * complex(s_re, s_im)
        return val

    def __call__(self, x, j=0):
        x = np.atleast_1d(np.asarray(x, dtype=float))
        if j == 0:
            return np.array([[self._one(k, float(xi)) for xi in x] for k in range(len(self.cols))])
        f = lambda xx: self(xx, 0)
        return fd_derivative(f, j, x)


class _AnalyticColumns:
    def __init__(self, cols):
        self.cols = cols

    def __call__(self, x, j=0):
        x = np.atleast_1d(np.asarray(x, dtype=float))
        return np.array([np.asarray(h.inverse_fourier(x, j), dtype=complex) for h in self.cols])


def _column_engine(cols, width, method):
    if method == "auto" and all(h.has_inverse for h in cols):
        return _AnalyticColumns(cols)
    if width is not None:
        return _HermiteColumns(cols, width)
    return _FourierColumns(cols)


def _invert_columns(rep, xb, kind, method, cluster_tol):
    n = rep.n
    cols, c = _columns(rep)
    engine = _column_engine(cols, rep.gaussian_width, method)
    uniq, inv = np.unique(xb, return_inverse=True)
    table0 = engine(uniq, 0)  # (k, U)
    inv = inv.reshape(xb.shape)
    out = np.empty(len(xb), dtype=complex)
    tables = {0: table0}

    def table(j):
        if j not in tables:
            tables[j] = engine(uniq, j)
        return tables[j]

    m = _m(n)
    for b, row in enumerate(xb):
        idx = inv[b]
        if kind == "joint":
            mat = table0[:, idx]  # (k, l)
            val = i_power(-m) * c * np.linalg.det(mat) * vandermonde(row)
            out[b] = val / ((2 * math.pi) ** n * math.prod(math.factorial(j) for j in range(1, n + 1)))
        else:

            def values(mm, idx=idx):
                return table(mm)[:, idx].T  # (nodes=l, funcs=k)

            ratio = det_ratio(row, values, cluster_tol)
            out[b] = i_power(-m) * c * ratio / (math.pi**m * (2 * math.pi) ** n)
    return out


def _invert_numeric(rep, xb, kind, quad=None, rtol=1e-10):
    n = rep.n
    if n > NUMERIC_INVERSE_MAX_N:
        raise DimensionTooLargeError(f"numeric inversion limited to n <= {NUMERIC_INVERSE_MAX_N}")
    if n == 1:
        col = CallableSpectral(lambda s: evaluate(rep, np.atleast_1d(s)[:, None]), rep.gaussian_width)
        return _invert_columns(DetRatioForm((col,)), xb, kind, "numeric", DEFAULT_CLUSTER_TOL)
    if rep.gaussian_width is None:
        raise DimensionTooLargeError("numeric inversion at n = 2 needs Gaussian decay")
    m = _m(n)
    order = quad.order if quad is not None else 48
    prev = None
    while order <= 384:
        t, w = hermite(order=order, scale=1.0 / rep.gaussian_width).nodes_weights()
        s1, s2 = np.meshgrid(t, t, indexing="ij")
        ss = np.stack([s1.ravel(), s2.ravel()], axis=-1)
        ww = np.outer(w, w).ravel()
        keep = ww > 0
        fh = np.zeros(len(ww), complex)
        fh[keep] = evaluate(rep, ss[keep])
        base = ww * fh * vandermonde(ss)
        vals = []
        for row in xb:
            ph = np.exp(1j * ss @ row)
            if kind == "joint":
                j = np.sum(base * ph) * vandermonde(row)
                vals.append(i_power(-m) * j / ((2 * math.pi) ** n * 2.0))
            else:
                if abs(row[1] - row[0]) > 1e-6 * max(1.0, np.max(np.abs(row))):
                    j = np.sum(base * ph) / vandermonde(row)
                else:
                    j = np.sum(base * ph * 1j * ss[:, 1])
                vals.append(i_power(-m) * j / (math.pi**m * (2 * math.pi) ** n))
        cur = np.array(vals)
        if prev is not None and np.max(np.abs(cur - prev)) <= rtol * max(1.0, np.max(np.abs(cur))):
            return cur
        prev = cur
        order *= 2
    raise QuadratureError("two-dimensional inversion did not converge")


def inverse_with_residue(rep, x, quad=None, kind="joint", method="auto", cluster_tol=DEFAULT_CLUSTER_TOL):
    """Invert ``rep`` at ``x``; returns ``(density, imaginary residue)``.

    Parameters
    ----------
    kind : {"joint", "matrix"}
        Symmetric joint eigenvalue density, or the matrix density ``f``.
    method : {"auto", "numeric"}
        ``"auto"`` uses closed-form inverse Fourier transforms of the columns
        when every column is the transform of a known weight.  ``"numeric"``
        always integrates: Gauss-Hermite for Gaussian decay, QAWF otherwise.
    """
    if kind not in ("joint", "matrix"):
        raise ValueError("kind must be 'joint' or 'matrix'")
    xb = np.atleast_2d(np.asarray(x, dtype=float))
    single = np.ndim(x) <= 1
    if xb.shape[-1] != rep.n:
        raise ValueError("dimension mismatch")
    if isinstance(rep, NumericForm):
        out = _invert_numeric(rep, xb, kind, quad)
    else:
        out = _invert_columns(rep, xb, kind, method, cluster_tol)
    val, res = out.real, np.abs(out.imag)
    if single:
        return float(val[0]), float(res[0])
    return val, res


def inverse(rep, x, quad=None, kind="joint", method="auto", residue_tol=1e-6):
    """Density with spherical transform ``rep`` at spectrum ``x``.

    Raises :class:`InconsistentTransformError` when the imaginary residue
    exceeds ``residue_tol`` (relative to ``max(1, |density|)``).
    """
    val, res = inverse_with_residue(rep, x, quad=quad, kind=kind, method=method)
    bad = np.asarray(res) > residue_tol * np.maximum(1.0, np.abs(val))
    if np.any(bad):
        raise InconsistentTransformError(f"imaginary residue {np.max(res):.2e} in inverted density")
    return val
