"""Scalar weight functions: the building blocks of every ensemble.

A :class:`Weight` knows its support, can be evaluated, differentiated and
Fourier transformed with the convention

    F w(s) = integral w(x) exp(-i s x) dx.

Parametric families (Gaussian times polynomial, Gamma-type half-line
terms) carry closed forms for derivatives, Fourier transforms and moments.
Tabulated weights and convolutions are evaluated from piecewise cubic
splines and transformed numerically.
"""

from __future__ import annotations

import logging
import math
from functools import cached_property

import numpy as np
from numpy.polynomial import hermite_e, polynomial as P
from scipy import special
from scipy.interpolate import CubicSpline, make_interp_spline
from scipy.optimize import brentq

from .detkit import MissingDerivativeError, fd_derivative
from .quadrature import QuadratureError, graded_unit_rule, integrate_intervals

__all__ = [
    "Weight",
    "GaussianPoly",
    "GammaPoly",
    "TableWeight",
    "CallableWeight",
    "Convolution",
    "Shifted",
    "LinearCombination",
    "gaussian",
    "laguerre_weight",
    "box",
    "fourier",
    "convolve",
    "weight_from_json",
]

log = logging.getLogger(__name__)

# relative size below which a weight is treated as zero when truncating
_TAIL = 1e-20
# convolution tables use quintic splines: few nodes at 1e-10 accuracy
_TABLE_DEGREE = 5


class Weight:
    """Base class.  Subclasses set the attributes below and ``__call__``."""

    support = "full"  # "full" | "half" | "compact"
    origin = 0.0  # left edge of a half-line support
    decay_class = "gaussian"  # "gaussian" | "exponential" | "compact"
    nonneg = False
    length_scale = 1.0
    max_derivative = None
    #: derivatives up to this order carry no boundary point masses
    smooth_order = math.inf
    #: Gaussian width of the Fourier transform, None for algebraic decay
    fourier_decay = None
    breakpoints: tuple = ()

    def __call__(self, x):
        raise NotImplementedError

    @property
    def span(self):
        """Interval outside of which the weight is negligible."""
        raise NotImplementedError

    def derivative(self, k):
        if k == 0:
            return self
        if self.max_derivative is not None and k > self.max_derivative:
            raise MissingDerivativeError(f"{type(self).__name__} has no derivative of order {k}")
        return _FDDerivative(self, k)

    # -- Fourier side -------------------------------------------------------

    @property
    def fourier_closed(self):
        return False

    def _closed_fourier(self, s, order):
        raise NotImplementedError

    def fourier(self, s):
        """``integral w(x) exp(-i s x) dx``."""
        return self.fourier_derivative(s, 0)

    def fourier_derivative(self, s, order):
        """``d^order/ds^order`` of the Fourier transform."""
        if self.fourier_closed:
            return self._closed_fourier(np.asarray(s, dtype=float), order)
        return self.numeric_fourier(s, order)

    def numeric_fourier(self, s, order=0, rtol=1e-11):
        """Fourier transform (or its s-derivative) by panel quadrature."""
        s = np.asarray(s, dtype=float)
        flat = np.atleast_1d(s).ravel()
        smax = float(np.max(np.abs(flat))) if flat.size else 0.0

        def integrand(x):
            ph = np.exp(-1j * np.multiply.outer(x, flat))
            return (self(x) * (-1j * x) ** order)[:, None] * ph

        val = self._span_integral(integrand, freq=smax, rtol=rtol)
        return val.reshape(s.shape) if s.ndim else complex(val[0])

    def moment(self, j):
        """``integral x**j w(x) dx``."""
        if self.fourier_closed:
            return float(np.real(self._closed_fourier(np.zeros(1), j)[0] * 1j**j))
        return self.numeric_moment(j)

    def numeric_moment(self, j, rtol=1e-12):
        return float(self._span_integral(lambda x: (x**j * self(x))[:, None], rtol=rtol)[0])

    def mass(self):
        return self.moment(0)

    @cached_property
    def l1_norm(self):
        # only a reference scale; |w| has kinks at sign changes, so keep it loose
        return float(self._span_integral(lambda x: np.abs(self(x))[:, None], rtol=1e-4, ref=0.0)[0])

    def _span_integral(self, integrand, freq=0.0, rtol=1e-11, max_doublings=7, ref=None):
        a, b = self.span
        length = b - a
        panels = int(np.ceil(length * max(2.0 / self.length_scale, freq / 2.0))) + 2
        prev = None
        floor = self._ref_scale() if ref is None else ref
        for _ in range(max_doublings):
            u, w = graded_unit_rule(panels)
            x = a + length * u
            vals = integrand(x)
            cur = length * np.tensordot(w, vals, axes=(0, 0))
            if prev is not None:
                # relative to the L1 norm of the integrand, so zero integrals converge too
                l1 = length * np.max(np.tensordot(w, np.abs(vals), axes=(0, 0)))
                scale = max(l1, floor)
                if np.max(np.abs(cur - prev)) <= rtol * scale:
                    return cur
            prev = cur
            panels *= 2
        raise QuadratureError(f"span integral of {self!r} did not converge")

    def _ref_scale(self):
        return 0.0

    def validate_fourier(self, grid=None, tol=1e-6):
        """Max deviation between the closed-form and the numeric transform."""
        if not self.fourier_closed:
            return 0.0
        grid = np.linspace(-4, 4, 17) if grid is None else np.asarray(grid, dtype=float)
        err = np.max(np.abs(self.fourier(grid) - self.numeric_fourier(grid)))
        if err > tol:
            raise AssertionError(f"closed-form Fourier transform off by {err:.2e}")
        return float(err)

    def to_json(self):
        raise NotImplementedError(f"{type(self).__name__} has no JSON form")


def _first_below(p, floor=_TAIL):
    """Smallest t > max(p, 0) with t**p exp(-t) below ``floor`` times its max."""
    if p <= 0:
        return -math.log(floor) + 1.0
    peak = p * math.log(p) - p
    g = lambda t: p * math.log(t) - t - (peak + math.log(floor))
    hi = 2 * p + 60
    while g(hi) > 0:
        hi *= 2
    return brentq(g, p, hi)


class GaussianPoly(Weight):
    """``P(x) exp(-x**2 / (2 sigma**2))`` with polynomial coefficients low to high."""

    support = "full"
    decay_class = "gaussian"

    def __init__(self, coeffs=(1.0,), sigma=1.0):
        c = np.trim_zeros(np.asarray(coeffs, dtype=float), "b")
        self.coeffs = c if c.size else np.zeros(1)
        self.sigma = float(sigma)
        if self.sigma <= 0:
            raise ValueError("sigma must be positive")
        self.length_scale = self.sigma
        self.fourier_decay = self.sigma
        self.nonneg = len(self.coeffs) == 1 and self.coeffs[0] >= 0

    def __repr__(self):
        return f"GaussianPoly({self.coeffs.tolist()}, sigma={self.sigma})"

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        return P.polyval(x, self.coeffs) * np.exp(-(x**2) / (2 * self.sigma**2))

    @property
    def span(self):
        m = len(self.coeffs) - 1
        r = self.sigma * (math.sqrt(-2 * math.log(_TAIL)) + 2.0 * math.sqrt(m))
        return (-r, r)

    def derivative(self, k):
        c = self.coeffs
        for _ in range(k):
            c = P.polysub(P.polyder(c), P.polymulx(c) / self.sigma**2)
        return GaussianPoly(c, self.sigma) if k else self

    @property
    def fourier_closed(self):
        return True

    def _closed_fourier(self, s, order):
        # (-i)^order * F[x^order P](s); F[x^m g](s) = sig sqrt(2pi) (-i sig)^m He_m(sig s) g^(s)
        sig = self.sigma
        c = P.polymul(self.coeffs, [0.0] * order + [1.0]) if order else self.coeffs
        t = sig * s
        acc = np.zeros(np.shape(s), dtype=complex)
        for m, cm in enumerate(c):
            if cm == 0:
                continue
            he = hermite_e.hermeval(t, [0.0] * m + [1.0])
            acc = acc + cm * (-1j * sig) ** m * he
        return (-1j) ** order * sig * math.sqrt(2 * math.pi) * acc * np.exp(-(t**2) / 2)

    def to_json(self):
        return {"family": "gaussian", "sigma": self.sigma, "coeffs": self.coeffs.tolist()}


class GammaPoly(Weight):
    """Half-line weight ``sum_i c_i t**p_i exp(-t)``, ``t = x - origin >= 0``.

    Evaluates to exactly zero for ``x < origin``.
    """

    support = "half"
    decay_class = "exponential"

    def __init__(self, terms, origin=0.0):
        merged = {}
        for c, p in terms:
            if c != 0:
                merged[float(p)] = merged.get(float(p), 0.0) + float(c)
        self.terms = tuple((c, p) for p, c in sorted(merged.items()) if c != 0) or ((0.0, 0.0),)
        self.origin = float(origin)
        pmin = min(p for _, p in self.terms)
        self.pmin = pmin
        self.smooth_order = max(0, math.ceil(pmin + 1) - 1)
        self.nonneg = all(c >= 0 for c, _ in self.terms)
        self.breakpoints = (self.origin,)

    def __repr__(self):
        return f"GammaPoly({list(self.terms)}, origin={self.origin})"

    def __call__(self, x):
        t = np.asarray(x, dtype=float) - self.origin
        pos = t > 0
        tp = np.where(pos, t, 1.0)
        acc = np.zeros(np.shape(t))
        for c, p in self.terms:
            acc = acc + c * tp**p
        out = np.where(pos, acc * np.exp(-tp), 0.0)
        # value at the edge itself: right limit when finite
        at0 = t == 0
        if np.any(at0):
            edge = sum(c for c, p in self.terms if p == 0)
            if any(p < 0 for c, p in self.terms):
                edge = np.inf
            out = np.where(at0, edge, out)
        return out

    @property
    def span(self):
        return (self.origin, self.origin + max(_first_below(p) for _, p in self.terms))

    def derivative(self, k):
        terms = list(self.terms)
        for _ in range(k):
            nxt = []
            for c, p in terms:
                if p != 0:
                    nxt.append((c * p, p - 1))
                nxt.append((-c, p))
            terms = nxt
        return GammaPoly(terms, self.origin) if k else self

    @property
    def fourier_closed(self):
        return self.pmin > -1

    def _closed_fourier(self, s, order):
        z = 1 + 1j * s
        acc = np.zeros(np.shape(s), dtype=complex)
        o = self.origin
        for c, p in self.terms:
            for l in range(order + 1):
                coef = math.comb(order, l) * o ** (order - l)
                if coef == 0:
                    continue
                acc = acc + c * coef * special.gamma(p + l + 1) * z ** (-(p + l + 1))
        return (-1j) ** order * acc * np.exp(-1j * s * o)

    def to_json(self):
        if len(self.terms) == 1 and self.terms[0][0] == 1.0:
            return {"family": "laguerre", "p": self.terms[0][1], "origin": self.origin}
        return {
            "family": "poly_exp",
            "base": "exponential",
            "terms": [list(t) for t in self.terms],
            "origin": self.origin,
        }


class _Pieces:
    """Piecewise spline of degree ``k``, zero outside its pieces."""

    def __init__(self, splines, edges, k=3):
        self.splines = list(splines)
        self.edges = np.asarray(edges, dtype=float)
        self.k = k

    def __call__(self, x, nu=0):
        x = np.asarray(x, dtype=float)
        out = np.zeros(x.shape)
        idx = np.searchsorted(self.edges, x, side="right") - 1
        for i, sp in enumerate(self.splines):
            m = idx == i
            if i == len(self.splines) - 1:
                m |= x == self.edges[-1]
            if np.any(m):
                out[m] = sp(x[m], nu)
        return out


class _SplineWeight(Weight):
    fourier_decay = None

    def __init__(self, pieces, support, origin, nu=0, nonneg=False):
        self._pieces = pieces
        self.support = support
        self.origin = origin
        self.nu = nu
        self.nonneg = nonneg
        self.decay_class = "compact" if support == "compact" else "exponential"
        self.breakpoints = tuple(pieces.edges)
        self.max_derivative = pieces.k - nu
        # spline derivatives of a tabulated density carry no boundary masses
        self.smooth_order = 0 if support == "half" else pieces.k - nu

    def __call__(self, x):
        return self._pieces(x, self.nu)

    @property
    def span(self):
        return (float(self._pieces.edges[0]), float(self._pieces.edges[-1]))

    def derivative(self, k):
        if k == 0:
            return self
        if k > self.max_derivative:
            raise MissingDerivativeError(f"tabulated weight has no derivative of order {k}")
        return _SplineWeight(self._pieces, self.support, self.origin, self.nu + k)

    def _ref_scale(self):
        return self.l1_norm if self.nu == 0 else 0.0


class TableWeight(_SplineWeight):
    """Tabulated weight from sorted ``(x, w(x))`` pairs with cubic interpolation."""

    def __init__(self, x, w, support="full"):
        x = np.asarray(x, dtype=float)
        w = np.asarray(w, dtype=float)
        if x.ndim != 1 or x.shape != w.shape or len(x) < 4:
            raise ValueError("need at least four (x, w) pairs")
        if np.any(np.diff(x) <= 0):
            raise ValueError("table abscissae must be strictly increasing")
        self.x, self.w = x, w
        origin = float(x[0]) if support == "half" else 0.0
        super().__init__(_Pieces([CubicSpline(x, w)], [x[0], x[-1]]), support, origin, nonneg=bool(np.all(w >= 0)))

    def __repr__(self):
        return f"TableWeight({len(self.x)} points on [{self.x[0]}, {self.x[-1]}])"

    def to_json(self):
        return {"family": "table", "x": self.x.tolist(), "w": self.w.tolist(), "support": self.support}


class CallableWeight(Weight):
    """Wrap an arbitrary vectorized function.  Derivatives by finite differences.

    The function must be smooth inside ``span``; reduced smoothness is only
    allowed at the ends of the span (e.g. an indicator of an interval).
    """

    def __init__(self, fn, span, support="full", nonneg=False, length_scale=1.0, name=None, json_spec=None):
        self.fn = fn
        self.json_spec = json_spec
        self._span = (float(span[0]), float(span[1]))
        self.support = support
        self.origin = self._span[0] if support in ("half", "compact") else 0.0
        self.decay_class = "compact" if support == "compact" else "gaussian"
        self.nonneg = nonneg
        self.length_scale = length_scale
        self.smooth_order = 0 if support != "full" else math.inf
        self.breakpoints = self._span if support == "compact" else ()
        self.name = name or getattr(fn, "__name__", "fn")

    def __repr__(self):
        return f"CallableWeight({self.name}, span={self._span})"

    def to_json(self):
        if self.json_spec is None:
            return super().to_json()
        return dict(self.json_spec)

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        lo, hi = self._span
        inside = (x >= lo) & (x <= hi) if self.support != "full" else np.ones(x.shape, bool)
        return np.where(inside, self.fn(x), 0.0)

    @property
    def span(self):
        return self._span

    def _ref_scale(self):
        return self.l1_norm


class _FDDerivative(Weight):
    def __init__(self, base, k):
        self.base, self.k = base, k
        self.support, self.origin = base.support, base.origin
        self.length_scale = base.length_scale
        self.decay_class = base.decay_class
        self.breakpoints = base.breakpoints

    def __call__(self, x):
        return fd_derivative(self.base, self.k, x, self.base.length_scale)

    @property
    def span(self):
        return self.base.span


class LinearCombination(Weight):
    """``sum_l c_l w_l``."""

    def __init__(self, coeffs, weights):
        self.coeffs = np.asarray(coeffs, dtype=float)
        self.weights = tuple(weights)
        if len(self.coeffs) != len(self.weights):
            raise ValueError("coefficient / weight count mismatch")
        sup = {w.support for w in self.weights}
        self.support = "full" if "full" in sup else ("half" if "half" in sup else "compact")
        self.origin = min(w.origin for w in self.weights)
        self.length_scale = min(w.length_scale for w in self.weights)
        self.smooth_order = min(w.smooth_order for w in self.weights)
        decays = [w.fourier_decay for w in self.weights]
        self.fourier_decay = None if any(d is None for d in decays) else min(decays)
        self.decay_class = self.weights[0].decay_class
        self.nonneg = all(w.nonneg for w in self.weights) and bool(np.all(self.coeffs >= 0))
        self.breakpoints = tuple(sorted({b for w in self.weights for b in w.breakpoints}))
        md = [w.max_derivative for w in self.weights if w.max_derivative is not None]
        self.max_derivative = min(md) if md else None

    def __repr__(self):
        return f"LinearCombination({self.coeffs.tolist()}, {list(self.weights)})"

    def __call__(self, x):
        return sum(c * w(x) for c, w in zip(self.coeffs, self.weights))

    @property
    def span(self):
        spans = [w.span for w in self.weights]
        return (min(s[0] for s in spans), max(s[1] for s in spans))

    def derivative(self, k):
        if k == 0:
            return self
        return LinearCombination(self.coeffs, [w.derivative(k) for w in self.weights])

    @property
    def fourier_closed(self):
        return all(w.fourier_closed for w in self.weights)

    def _closed_fourier(self, s, order):
        return sum(c * w._closed_fourier(s, order) for c, w in zip(self.coeffs, self.weights))

    def _ref_scale(self):
        return max(abs(c) * w._ref_scale() for c, w in zip(self.coeffs, self.weights))


class Shifted(Weight):
    """``w(x - c)``."""

    def __init__(self, w, c):
        self.w, self.c = w, float(c)
        self.support, self.decay_class = w.support, w.decay_class
        self.origin = w.origin + self.c if w.support != "full" else 0.0
        self.nonneg, self.length_scale = w.nonneg, w.length_scale
        self.smooth_order, self.max_derivative = w.smooth_order, w.max_derivative
        self.fourier_decay = w.fourier_decay
        self.breakpoints = tuple(b + self.c for b in w.breakpoints)

    def __repr__(self):
        return f"Shifted({self.w!r}, {self.c})"

    def __call__(self, x):
        return self.w(np.asarray(x, dtype=float) - self.c)

    @property
    def span(self):
        a, b = self.w.span
        return (a + self.c, b + self.c)

    def derivative(self, k):
        return Shifted(self.w.derivative(k), self.c) if k else self

    @property
    def fourier_closed(self):
        return self.w.fourier_closed

    def _closed_fourier(self, s, order):
        # d^j/ds^j [exp(-i s c) F w(s)] by Leibniz
        ph = np.exp(-1j * s * self.c)
        return sum(
            math.comb(order, l) * (-1j * self.c) ** (order - l) * self.w._closed_fourier(s, l)
            for l in range(order + 1)
        ) * ph

    def _ref_scale(self):
        return self.w._ref_scale()


class Convolution(Weight):
    """``(w1 * w2)(y) = integral w1(y - t) w2(t) dt``.

    Values come from a piecewise cubic spline built on first use; the grid
    on each smooth piece is doubled until the spline reproduces fresh
    quadrature values at the midpoints within ``tol`` (relative to the peak).
    """

    def __init__(self, w1, w2, tol=1e-10, max_points=1 << 15):
        self.w1, self.w2 = w1, w2
        self.tol = tol
        self.max_points = max_points
        sup = {w1.support, w2.support}
        if sup == {"compact"}:
            self.support = "compact"
        elif "full" in sup:
            self.support = "full"
        else:
            self.support = "half"
        self.origin = w1.origin + w2.origin if self.support != "full" else 0.0
        self.length_scale = min(w1.length_scale, w2.length_scale)
        self.decay_class = "gaussian" if "gaussian" in (w1.decay_class, w2.decay_class) else w1.decay_class
        self.nonneg = w1.nonneg and w2.nonneg
        d1, d2 = w1.fourier_decay, w2.fourier_decay
        if d1 is not None and d2 is not None:
            self.fourier_decay = math.hypot(d1, d2)
        else:
            self.fourier_decay = d1 if d1 is not None else d2
        lo, hi = self.span
        bps = {b1 + b2 for b1 in w1.breakpoints for b2 in w2.breakpoints}
        bps |= {b + e for b in w1.breakpoints for e in w2.span if w2.support != "full"}
        bps |= {b + e for b in w2.breakpoints for e in w1.span if w1.support != "full"}
        self.breakpoints = tuple(sorted(b for b in bps if lo <= b <= hi))
        self.smooth_order = max(w1.smooth_order, w2.smooth_order)
        self._pieces = None

    def __repr__(self):
        return f"Convolution({self.w1!r}, {self.w2!r})"

    @property
    def span(self):
        a1, b1 = self.w1.span
        a2, b2 = self.w2.span
        return (a1 + a2, b1 + b2)

    def direct(self, y, panels=None):
        """Convolution values by quadrature, bypassing the spline table."""
        y = np.atleast_1d(np.asarray(y, dtype=float))
        a1, b1 = self.w1.span
        a2, b2 = self.w2.span
        lo = np.maximum(a2, y - b1)
        hi = np.minimum(b2, y - a1)
        if panels is None:
            panels = int(np.ceil(max(float(np.max(hi - lo)), 0.0) / self.length_scale)) + 2
        out = np.zeros(len(y))
        ok = np.nonzero(hi > lo)[0]
        step = max(1, 2_000_000 // len(graded_unit_rule(panels)[0]))
        for st in range(0, len(ok), step):
            idx = ok[st : st + step]
            yy = y[idx, None]
            out[idx] = integrate_intervals(
                lambda t: self.w1(yy - t) * self.w2(t), lo[idx], hi[idx], panels, chunk=10**12
            )
        return out

    def _check_panels(self, ygrid):
        """Pick a panel count at which doubling changes nothing."""
        panels = None
        probe = ygrid[:: max(1, len(ygrid) // 25)]
        base = self.direct(probe)
        a1, b1 = self.w1.span
        a2, b2 = self.w2.span
        width = max(b2 - a2, b1 - a1)
        panels = int(np.ceil(width / self.length_scale)) + 2
        for _ in range(5):
            finer = self.direct(probe, panels=2 * panels)
            scale = np.max(np.abs(finer)) or 1.0
            if np.max(np.abs(finer - base)) <= 1e-12 * scale:
                return panels
            base, panels = finer, 2 * panels
        log.warning("convolution quadrature not settled for %r", self)
        return panels

    def _materialize(self):
        lo, hi = self.span
        cuts = sorted({lo, hi, *self.breakpoints})
        length = hi - lo
        npts0 = 256
        panels = self._check_panels(np.linspace(lo, hi, 200))
        grids = []
        for a, b in zip(cuts[:-1], cuts[1:]):
            if b - a <= 1e-14 * max(1.0, length):
                continue
            m = max(16, int(np.ceil(npts0 * (b - a) / length)))
            x = np.linspace(a, b, m + 1)
            grids.append([x, self.direct(x, panels)])
        peak = max(np.max(np.abs(v)) for _, v in grids) or 1.0
        done = [False] * len(grids)
        while not all(done):
            for i, (x, v) in enumerate(grids):
                if done[i]:
                    continue
                sp = make_interp_spline(x, v, k=_TABLE_DEGREE)
                mid = 0.5 * (x[1:] + x[:-1])
                vm = self.direct(mid, panels)
                err = np.max(np.abs(sp(mid) - vm))
                xx = np.empty(2 * len(x) - 1)
                vv = np.empty_like(xx)
                xx[0::2], xx[1::2] = x, mid
                vv[0::2], vv[1::2] = v, vm
                grids[i] = [xx, vv]
                if err <= self.tol * peak:
                    done[i] = True
                elif len(xx) > self.max_points:
                    log.warning("convolution table for %r stopped at error %.2e", self, err / peak)
                    done[i] = True
        self._pieces = _Pieces(
            [make_interp_spline(x, v, k=_TABLE_DEGREE) for x, v in grids],
            [grids[0][0][0]] + [x[-1] for x, _ in grids],
            _TABLE_DEGREE,
        )

    def __call__(self, x):
        if self._pieces is None:
            self._materialize()
        return self._pieces(x)

    def derivative(self, k):
        if k == 0:
            return self
        if self.w1.smooth_order >= k and self.w1.max_derivative is None:
            return Convolution(self.w1.derivative(k), self.w2, self.tol)
        if self.w2.smooth_order >= k and self.w2.max_derivative is None:
            return Convolution(self.w1, self.w2.derivative(k), self.tol)
        if self._pieces is None:
            self._materialize()
        return _SplineWeight(self._pieces, self.support, self.origin).derivative(k)

    def _ref_scale(self):
        return self.l1_norm


def gaussian(sigma=1.0, coeffs=(1.0,)):
    """``P(x) exp(-x**2 / (2 sigma**2))``; plain Gaussian by default."""
    return GaussianPoly(coeffs, sigma)


def laguerre_weight(alpha, p=None, origin=0.0):
    """``(x - origin)**p exp(-(x - origin))`` on ``x >= origin``.

    ``alpha`` is the LUE parameter the kernel belongs to; the exponent ``p``
    defaults to ``alpha`` (the smoothing kernel of an n x n LUE has
    ``p = alpha + n - 1``).
    """
    if alpha <= -1:
        raise ValueError("alpha must exceed -1")
    p = alpha if p is None else p
    if p <= -1:
        raise ValueError("p must exceed -1")
    return GammaPoly([(1.0, p)], origin)


def box(a=-1.0, b=1.0):
    """Indicator of ``[a, b]``."""
    spec = {"family": "box", "a": float(a), "b": float(b)}
    return CallableWeight(
        lambda x: np.ones(np.shape(x)), (a, b), support="compact", nonneg=True, name="box", json_spec=spec
    )


def fourier(w: Weight, s):
    """``integral w(x) exp(-i s x) dx``."""
    return w.fourier(s)


def convolve(w1: Weight, w2: Weight, tol=1e-10):
    return Convolution(w1, w2, tol=tol)


def weight_from_json(spec):
    """Build a weight from its JSON description."""
    fam = spec.get("family")
    if fam == "gaussian":
        return GaussianPoly(spec.get("coeffs", [1.0]), spec.get("sigma", 1.0))
    if fam == "laguerre":
        return laguerre_weight(spec.get("alpha", spec["p"]), spec["p"], spec.get("origin", 0.0))
    if fam == "poly_exp":
        if spec.get("base", "exponential") == "gaussian":
            return GaussianPoly(spec["coeffs"], spec.get("sigma", 1.0))
        return GammaPoly([tuple(t) for t in spec["terms"]], spec.get("origin", 0.0))
    if fam == "table":
        return TableWeight(spec["x"], spec["w"], spec.get("support", "full"))
    if fam == "box":
        return box(spec.get("a", -1.0), spec.get("b", 1.0))
    raise ValueError(f"unknown weight family {fam!r}")
