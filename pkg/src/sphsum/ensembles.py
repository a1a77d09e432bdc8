"""Unitarily invariant ensembles and their densities.

Every ensemble is a small immutable description.  Densities are returned
at two levels:

* matrix level, ``f(X)`` for a Hermitian ``X`` with spectrum ``x``;
* eigenvalue level, the symmetric joint density on ``R^n`` (integrating to
  one over unordered tuples), related to ``f`` by the Weyl factor
  ``pi**m / prod_{j=1}^{n} j! * Delta(x)**2`` with ``m = n(n-1)/2``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np
from scipy import special

from .detkit import confluent_det_ratio, vandermonde
from .weights import GaussianPoly, Weight, laguerre_weight, weight_from_json

__all__ = [
    "DegenerateEnsembleError",
    "GUE",
    "LUE",
    "PE",
    "DPE",
    "Fixed",
    "as_pe",
    "joint_eigen_density",
    "matrix_density",
    "log_matrix_density",
    "weyl_constant",
    "moment_matrix",
    "pe_normalization",
    "PENormalization",
    "transform_of",
    "ensemble_from_json",
]


class DegenerateEnsembleError(ValueError):
    """The weights of a polynomial ensemble are linearly dependent."""


def _m(n):
    return n * (n - 1) // 2


def weyl_constant(n):
    """``pi**m / prod_{j=1}^{n} j!``: joint density = constant * f * Delta**2."""
    return math.pi ** _m(n) / math.prod(math.factorial(j) for j in range(1, n + 1))


@dataclass(frozen=True)
class GUE:
    n: int

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("n must be positive")


@dataclass(frozen=True)
class LUE:
    n: int
    alpha: float = 0.0

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("n must be positive")
        if self.alpha <= -1:
            raise ValueError("alpha must exceed -1")


@dataclass(frozen=True)
class PE:
    """Polynomial ensemble ``Delta(x) det[w_k(x_j)] / Z_n``."""

    weights: tuple

    def __post_init__(self):
        object.__setattr__(self, "weights", tuple(self.weights))
        if not self.weights:
            raise ValueError("need at least one weight")

    @property
    def n(self):
        return len(self.weights)


@dataclass(frozen=True)
class DPE:
    """Polynomial ensemble of derivative type: weights ``w, w', ..., w^(n-1)``."""

    w: Weight
    n: int

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("n must be positive")
        if self.w.smooth_order < self.n - 1:
            raise ValueError(
                f"generator has {self.w.smooth_order} clean derivatives, {self.n - 1} needed"
            )


@dataclass(frozen=True)
class Fixed:
    """Point mass on the orbit ``{U diag(eigenvalues) U*}``."""

    eigenvalues: tuple

    def __post_init__(self):
        object.__setattr__(self, "eigenvalues", tuple(float(v) for v in self.eigenvalues))

    @property
    def n(self):
        return len(self.eigenvalues)


def as_pe(ens) -> PE:
    """Express GUE, LUE and DPE as polynomial ensembles with explicit weights.

    GUE: ``x**(k-1) exp(-x**2/2)``; LUE: ``x**(alpha+k-1) exp(-x)`` on
    ``x >= 0``; DPE: the derivatives of the generator.
    """
    if isinstance(ens, PE):
        return ens
    if isinstance(ens, GUE):
        return PE(tuple(GaussianPoly([0.0] * k + [1.0]) for k in range(ens.n)))
    if isinstance(ens, LUE):
        return PE(tuple(laguerre_weight(ens.alpha, ens.alpha + k) for k in range(ens.n)))
    if isinstance(ens, DPE):
        return PE(tuple(ens.w.derivative(k) for k in range(ens.n)))
    raise TypeError(f"{type(ens).__name__} has no polynomial-ensemble form")


# -- normalization ----------------------------------------------------------


def moment_matrix(weights: Sequence[Weight]):
    """``M[j, k] = integral x**j w_k(x) dx`` for ``j, k < n``."""
    n = len(weights)
    return np.array([[w.moment(j) for w in weights] for j in range(n)])


class PENormalization(NamedTuple):
    """``Z''_n`` split into modulus and phase (a multiple of pi/2)."""

    modulus: float
    phase: float

    @property
    def value(self):
        quarter = round(self.phase / (math.pi / 2)) % 4
        return self.modulus * (1.0 + 0j, 1j, -1.0 + 0j, -1j)[quarter]


def _checked_det(mat):
    det = np.linalg.det(mat)
    scale = math.prod(max(np.linalg.norm(row), 1e-300) for row in mat)
    if not np.isfinite(det) or abs(det) <= 1e-13 * scale:
        raise DegenerateEnsembleError("moment matrix is singular: weights are linearly dependent")
    return float(det)


def pe_normalization(weights) -> PENormalization:
    """``Z''_n = (-i)**m det M / prod_{j<n} j!``, the value at ``s = 0`` of
    ``det[F w_k(s_j)] / Delta(s)``.  Dividing by it normalizes the
    transform of a polynomial ensemble to one at the origin."""
    weights = tuple(weights.weights) if isinstance(weights, PE) else tuple(weights)
    n = len(weights)
    det = _checked_det(moment_matrix(weights))
    mod = abs(det) / math.prod(math.factorial(j) for j in range(n))
    phase = (-_m(n) % 4) * math.pi / 2 + (math.pi if det < 0 else 0.0)
    return PENormalization(mod, math.remainder(phase, 2 * math.pi))


def _pe_eigen_normalizer(weights):
    """``Z_n = n! det M``: integral of ``Delta(x) det[w_k(x_j)]`` over R^n."""
    return math.factorial(len(weights)) * _checked_det(moment_matrix(weights))


def _dpe_eigen_normalizer(w: Weight, n):
    # M is triangular after integrating by parts: diagonal (-1)^(k) k! m_0
    m0 = w.mass()
    if m0 == 0:
        raise DegenerateEnsembleError("DPE generator has zero mass")
    sign = (-1) ** _m(n)
    return math.factorial(n) * sign * math.prod(math.factorial(j) for j in range(n)) * m0**n


# -- densities --------------------------------------------------------------


def _as_batch(x, n):
    x = np.asarray(x, dtype=float)
    single = x.ndim <= 1
    x = np.atleast_2d(x)
    if x.shape[-1] != n:
        raise ValueError(f"expected {n} eigenvalues, got {x.shape[-1]}")
    return x, single


def _lue_log_norm(n, alpha):
    return _m(n) * math.log(math.pi) + sum(special.gammaln(alpha + j) for j in range(1, n + 1))


def log_matrix_density(ens, x):
    """``log f(X)`` for GUE and LUE (``-inf`` outside the support)."""
    x, single = _as_batch(x, ens.n)
    n = ens.n
    if isinstance(ens, GUE):
        out = -0.5 * np.sum(x**2, axis=-1) - 0.5 * n * math.log(2) - 0.5 * n * n * math.log(math.pi)
    elif isinstance(ens, LUE):
        pos = np.all(x > 0, axis=-1)
        xs = np.where(x > 0, x, 1.0)
        out = np.sum(ens.alpha * np.log(xs) - xs, axis=-1) - _lue_log_norm(n, ens.alpha)
        out = np.where(pos, out, -np.inf)
    else:
        raise TypeError("closed-form log density only for GUE and LUE")
    return float(out[0]) if single else out


def matrix_density(ens, x):
    """Unitarily invariant matrix density at any matrix with spectrum ``x``.

    Polynomial ensembles use the confluent ratio ``det[w_k(x_j)] / Delta(x)``
    so coincident eigenvalues give the finite limit.
    """
    if isinstance(ens, (GUE, LUE)):
        return np.exp(log_matrix_density(ens, x))
    if isinstance(ens, Fixed):
        raise TypeError("a fixed matrix has no density")
    pe = as_pe(ens)
    xb, single = _as_batch(x, pe.n)
    z = _normalizer(ens)
    c = 1.0 / (weyl_constant(pe.n) * z)
    out = np.array([c * confluent_det_ratio(pe.weights, row) for row in xb])
    return float(out[0]) if single else out


def _normalizer(ens):
    if isinstance(ens, DPE):
        return _dpe_eigen_normalizer(ens.w, ens.n)
    return _pe_eigen_normalizer(as_pe(ens).weights)


def joint_eigen_density(ens, x):
    """Normalized symmetric joint eigenvalue density on ``R^n``."""
    n = ens.n
    xb, single = _as_batch(x, n)
    if isinstance(ens, (GUE, LUE)):
        out = weyl_constant(n) * np.exp(log_matrix_density(ens, xb)) * vandermonde(xb) ** 2
    elif isinstance(ens, Fixed):
        raise TypeError("a fixed matrix has no density")
    else:
        pe = as_pe(ens)
        z = _normalizer(ens)
        cols = np.stack([w(xb) for w in pe.weights], axis=-1)  # (B, j, k)
        out = vandermonde(xb) * np.linalg.det(cols) / z
    return float(out[0]) if single else out


# -- transforms -------------------------------------------------------------


def transform_of(ens):
    """Structured spherical transform of ``ens`` (see :mod:`sphsum.transform`)."""
    from . import transform as T

    if isinstance(ens, GUE):
        return T.ProductForm(T.GaussianFactor(1.0), ens.n)
    if isinstance(ens, LUE):
        return T.ProductForm(T.PowerFactor(ens.alpha + ens.n), ens.n)
    if isinstance(ens, DPE):
        return T.ProductForm(T.FourierOf(ens.w, scale=1.0 / ens.w.mass()), ens.n)
    if isinstance(ens, PE):
        z = pe_normalization(ens.weights)
        return T.DetRatioForm(tuple(T.FourierOf(w) for w in ens.weights), 1.0 / z.value)
    if isinstance(ens, Fixed):
        return T.orbit_transform(ens.eigenvalues)
    raise TypeError(f"unknown ensemble {ens!r}")


def ensemble_from_json(spec):
    """Build an ensemble from ``{"variant": "gue"|"lue"|"pe"|"dpe"|"fixed", ...}``."""
    if not isinstance(spec, dict):
        raise ValueError("ensemble description must be a JSON object")
    var = str(spec.get("variant", "")).lower()
    if var == "gue":
        return GUE(int(spec["n"]))
    if var == "lue":
        return LUE(int(spec["n"]), float(spec.get("alpha", 0.0)))
    if var == "pe":
        ws = tuple(weight_from_json(w) for w in spec["weights"])
        if "n" in spec and int(spec["n"]) != len(ws):
            raise ValueError("n does not match the number of weights")
        return PE(ws)
    if var == "dpe":
        return DPE(weight_from_json(spec["w"]), int(spec["n"]))
    if var == "fixed":
        return Fixed(tuple(spec["eigenvalues"]))
    raise ValueError(f"unknown ensemble variant {var!r}")
