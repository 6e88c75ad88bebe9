"""Truncated real power-series algebra to a fixed order.

Everything here is plain coefficient arithmetic: Cauchy products,
composition, functional inversion, square roots, reciprocals, and the
free moment/cumulant recursions. Coefficients are doubles; order K is
kept small (default 16), so the O(K^3)-ish loops below are negligible.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import (
    BranchUndefinedError,
    CompositionUndefinedError,
    InvalidInputError,
    NotInvertibleError,
)

DEFAULT_ORDER = 16


def _freeze(a):
    a = np.asarray(a, dtype=float).copy()
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class TruncatedSeries:
    """Power series c_0 + c_1 z + ... + c_K z^K truncated at order K."""

    coeffs: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "coeffs", _freeze(np.atleast_1d(self.coeffs)))

    @property
    def order(self) -> int:
        return len(self.coeffs) - 1

    @classmethod
    def from_coeffs(cls, coeffs, order=None) -> "TruncatedSeries":
        """Build a series, zero-padding or truncating to the given order."""
        c = np.asarray(coeffs, dtype=float).ravel()
        if order is not None:
            out = np.zeros(order + 1)
            n = min(len(c), order + 1)
            out[:n] = c[:n]
            c = out
        return cls(c)

    @classmethod
    def zero(cls, order=DEFAULT_ORDER):
        return cls(np.zeros(order + 1))

    @classmethod
    def one(cls, order=DEFAULT_ORDER):
        c = np.zeros(order + 1)
        c[0] = 1.0
        return cls(c)

    @classmethod
    def identity(cls, order=DEFAULT_ORDER):
        """The series z."""
        c = np.zeros(order + 1)
        if order >= 1:
            c[1] = 1.0
        return cls(c)

    def truncate(self, order) -> "TruncatedSeries":
        return TruncatedSeries.from_coeffs(self.coeffs, order)

    def __add__(self, other):
        a, b = _align(self, other)
        return TruncatedSeries(a + b)

    def __sub__(self, other):
        a, b = _align(self, other)
        return TruncatedSeries(a - b)

    def __neg__(self):
        return TruncatedSeries(-self.coeffs)

    def __mul__(self, other):
        if np.isscalar(other):
            return TruncatedSeries(self.coeffs * other)
        a, b = _align(self, other)
        return TruncatedSeries(np.convolve(a, b)[: len(a)])

    __rmul__ = __mul__

    def shift_down(self) -> "TruncatedSeries":
        """Divide by z; requires a vanishing constant term.

        The result drops to order K-1 because the top coefficient of the
        quotient is not determined by a truncation at order K.
        """
        if abs(self.coeffs[0]) > 1e-12:
            raise InvalidInputError("cannot divide by z: constant term is nonzero")
        return TruncatedSeries(self.coeffs[1:])

    def __call__(self, x):
        """Evaluate the truncated polynomial at a number (Horner)."""
        acc = 0.0
        for c in self.coeffs[::-1]:
            acc = acc * x + c
        return acc


def _align(a: TruncatedSeries, b: TruncatedSeries):
    """Pad the shorter operand; results keep the longer order."""
    if not isinstance(b, TruncatedSeries):
        raise InvalidInputError(f"expected TruncatedSeries, got {type(b)!r}")
    k = max(a.order, b.order)
    pa = np.zeros(k + 1)
    pa[: len(a.coeffs)] = a.coeffs
    pb = np.zeros(k + 1)
    pb[: len(b.coeffs)] = b.coeffs
    return pa, pb


def compose(f: TruncatedSeries, g: TruncatedSeries) -> TruncatedSeries:
    """Coefficients of f(g(z)) to the common order; g must vanish at 0."""
    if abs(g.coeffs[0]) > 1e-12:
        raise CompositionUndefinedError(
            f"inner series has constant term {g.coeffs[0]!r}; composition is undefined"
        )
    k = max(f.order, g.order)
    g = g.truncate(k)
    acc = TruncatedSeries.zero(k)
    for c in f.coeffs[::-1]:
        new = (acc * g).coeffs.copy()
        new[0] += c
        acc = TruncatedSeries(new)
    return acc


def lagrange_invert(f: TruncatedSeries) -> TruncatedSeries:
    """Compositional inverse g with f(g(z)) = z; needs c_0 = 0, c_1 != 0."""
    if abs(f.coeffs[0]) > 1e-12:
        raise NotInvertibleError("series with nonzero constant term has no inverse at 0")
    k = f.order
    if k < 1 or f.coeffs[1] == 0.0:
        raise NotInvertibleError("vanishing linear coefficient: series not invertible")
    c1 = f.coeffs[1]
    g = np.zeros(k + 1)
    g[1] = 1.0 / c1
    # Triangular solve: [z^m] f(g) = delta_{m,1}. The k >= 2 terms of f only
    # involve g_1..g_{m-1}, so each g_m appears linearly through f_1 * g_m.
    for m in range(2, k + 1):
        gpart = TruncatedSeries.from_coeffs(g, m)
        power = gpart
        acc = 0.0
        for j in range(2, m + 1):
            power = power * gpart
            acc += f.coeffs[j] * power.coeffs[m]
        g[m] = -acc / c1
    return TruncatedSeries(g)


def sqrt_series(f: TruncatedSeries) -> TruncatedSeries:
    """Series g with g*g = f and g(0) = +sqrt(f(0)); needs f(0) > 0."""
    if f.coeffs[0] <= 0.0:
        raise BranchUndefinedError(
            f"square root branch undefined for constant term {f.coeffs[0]!r}"
        )
    k = f.order
    g = np.zeros(k + 1)
    g[0] = np.sqrt(f.coeffs[0])
    for m in range(1, k + 1):
        conv = np.dot(g[1:m], g[m - 1 : 0 : -1]) if m >= 2 else 0.0
        g[m] = (f.coeffs[m] - conv) / (2.0 * g[0])
    return TruncatedSeries(g)


def reciprocal(f: TruncatedSeries) -> TruncatedSeries:
    """Series g with f*g = 1; needs f(0) != 0."""
    if f.coeffs[0] == 0.0:
        raise NotInvertibleError("reciprocal undefined: constant term is zero")
    k = f.order
    g = np.zeros(k + 1)
    g[0] = 1.0 / f.coeffs[0]
    for m in range(1, k + 1):
        g[m] = -np.dot(f.coeffs[1 : m + 1], g[m - 1 :: -1]) / f.coeffs[0]
    return TruncatedSeries(g)


@dataclass(frozen=True, eq=False)
class MomentSequence:
    """Raw moments tau_1..tau_K of a probability measure."""

    values: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "values", _freeze(np.atleast_1d(self.values)))

    @property
    def order(self) -> int:
        return len(self.values)

    def psi_series(self) -> TruncatedSeries:
        """Moment generating series sum_n tau_n z^n (no constant term)."""
        return TruncatedSeries(np.concatenate(([0.0], self.values)))


@dataclass(frozen=True, eq=False)
class CumulantSequence:
    """Free cumulants kappa_1..kappa_K of a probability measure."""

    values: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "values", _freeze(np.atleast_1d(self.values)))

    @property
    def order(self) -> int:
        return len(self.values)

    def r_series(self) -> TruncatedSeries:
        """R-transform series sum_n kappa_n z^n (no constant term)."""
        return TruncatedSeries(np.concatenate(([0.0], self.values)))

    @classmethod
    def from_series(cls, s: TruncatedSeries) -> "CumulantSequence":
        if abs(s.coeffs[0]) > 1e-12:
            raise InvalidInputError("an R series must vanish at 0")
        return cls(s.coeffs[1:])


def _moment_poly_powers(tau_full, n):
    """[z^m] M(z)^k for M = 1 + sum tau_j z^j, k = 1..n, truncated at z^(n-1)."""
    m_part = np.concatenate(([1.0], tau_full[1:n]))
    powers = []
    p = m_part.copy()
    for _ in range(n):
        powers.append(p)
        p = np.convolve(p, m_part)[:n]
    return powers


def cumulants_to_moments(kappa: CumulantSequence) -> MomentSequence:
    """Run the free moment-cumulant recursion forward.

    tau_n = sum_{k=1}^{n} kappa_k [z^{n-k}] M(z)^k with M = 1 + sum tau_j z^j,
    which is the generating-function form of summing over non-crossing
    partitions by the block containing 1.
    """
    kv = kappa.values
    n_max = len(kv)
    tau = np.zeros(n_max + 1)
    tau[0] = 1.0
    for n in range(1, n_max + 1):
        powers = _moment_poly_powers(tau, n)
        tau[n] = sum(kv[k - 1] * powers[k - 1][n - k] for k in range(1, n + 1))
    return MomentSequence(tau[1:])


def moments_to_cumulants(tau: MomentSequence) -> CumulantSequence:
    """Invert the free moment-cumulant recursion (exact inverse of the above)."""
    tv = tau.values
    n_max = len(tv)
    tau_full = np.concatenate(([1.0], tv))
    kappa = np.zeros(n_max)
    for n in range(1, n_max + 1):
        powers = _moment_poly_powers(tau_full, n)
        acc = sum(kappa[k - 1] * powers[k - 1][n - k] for k in range(1, n))
        # k = n term is kappa_n * [z^0] M^n = kappa_n
        kappa[n - 1] = tau_full[n] - acc
    return CumulantSequence(kappa)
