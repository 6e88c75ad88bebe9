"""Cauchy transforms, R/S-transforms, and Stieltjes inversion.

A CauchyField wraps an upper-half-plane evaluator for G(z) = int d mu / (z-x)
(closed form, quadrature over a gridded measure, or fixed-point backed).
Series transforms live on top of the moment machinery: the R-transform is
the cumulant series, the S-transform comes from Lagrange inversion of the
moment series, and symmetric measures get the two-branch square-root form
with an explicit z^(-1/2) prefactor so identities stay pure series.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import (
    DegenerateMeasureError,
    InvalidInputError,
    InvalidParameterError,
    InversionFailedError,
    NotInvertibleError,
    OutOfDomainError,
    SUndefinedError,
)
from .measures import MeasureSpec, DensityPart, normalized_measure, moments
from .series import (
    CumulantSequence,
    MomentSequence,
    TruncatedSeries,
    cumulants_to_moments,
    lagrange_invert,
    moments_to_cumulants,
    reciprocal,
    sqrt_series,
)

DEFAULT_EPS_SCHEDULE = (1e-2, 5e-3, 2.5e-3)
ATOM_DETECT_THRESHOLD = 1e-3


@dataclass(frozen=True)
class CauchyField:
    """Evaluator for a Cauchy transform on the upper half-plane.

    `eval` accepts complex scalars or arrays with Im z > 0. Evaluation is
    logically pure (no mutable caching), so fields are safe to share across
    threads. `support` is the hull of the underlying measure, used for
    far-field checks and grid construction.
    """

    eval: callable
    kind: str
    support: tuple

    def __call__(self, z):
        return self.eval(np.asarray(z, dtype=complex))

    def eval_anywhere(self, z):
        """Evaluate at any z off the real support, reflecting G(conj z) = conj G(z).

        Points on the real axis are taken as upper boundary values, which is
        fine away from the support (the integrand is regular there).
        """
        z = np.asarray(z, dtype=complex)
        upper = np.where(z.imag >= 0.0, z, np.conj(z))
        g = self.eval(upper)
        return np.where(z.imag >= 0.0, g, np.conj(g))


def _sqrt_two_cuts(z, a, b):
    """sqrt((z-a)(z-b)) with principal roots per factor.

    This branch behaves like z at infinity and keeps the cut on [a, b],
    which is what makes G ~ 1/z for the closed forms below.
    """
    return np.sqrt(z - a) * np.sqrt(z - b)


def field_from_measure(mu: MeasureSpec) -> CauchyField:
    """Quadrature-backed Cauchy transform (exact for atomic measures)."""
    atoms = mu.atoms
    d = mu.density
    if d is not None:
        grid = d.grid
        weights = np.full(len(grid), d.spacing)
        weights[0] = weights[-1] = d.spacing / 2.0
        weights = weights * d.values

    def evaluate(z):
        z = np.asarray(z, dtype=complex)
        g = np.zeros_like(z)
        for x, w in atoms:
            g = g + w / (z - x)
        if d is not None:
            zz = z.reshape(z.shape + (1,))
            # chunk the grid axis to bound temporaries
            out = np.zeros_like(z)
            for sl in range(0, len(grid), 1024):
                block = slice(sl, sl + 1024)
                out = out + np.sum(weights[block] / (zz - grid[block]), axis=-1)
            g = g + out
        return g

    return CauchyField(evaluate, "quadrature", mu.support())


def cauchy_eval(mu: MeasureSpec, z):
    """Cauchy transform of mu at z with Im z > 0."""
    z = np.asarray(z, dtype=complex)
    if np.any(z.imag <= 0.0):
        raise OutOfDomainError("cauchy_eval needs Im z > 0")
    return field_from_measure(mu)(z)


def semicircle_field(t: float) -> CauchyField:
    """Closed-form G for the centered semicircle of variance t."""
    if t <= 0.0:
        raise InvalidParameterError("semicircle time must be positive")
    r = 2.0 * np.sqrt(t)

    def evaluate(z):
        z = np.asarray(z, dtype=complex)
        return (z - _sqrt_two_cuts(z, -r, r)) / (2.0 * t)

    return CauchyField(evaluate, "closed_form", (-r, r))


def marcenko_pastur_field(lam: float, t: float) -> CauchyField:
    """Closed-form G for the two-parameter Marcenko-Pastur law."""
    if lam < 0.0 or t <= 0.0:
        raise InvalidParameterError("need lam >= 0 and t > 0")
    if lam == 0.0:
        return dirac_field(0.0)
    s = np.sqrt(lam)
    xm = t * (1.0 - s) ** 2
    xp = t * (1.0 + s) ** 2

    def evaluate(z):
        z = np.asarray(z, dtype=complex)
        return (z + t * (1.0 - lam) - _sqrt_two_cuts(z, xm, xp)) / (2.0 * t * z)

    return CauchyField(evaluate, "closed_form", (0.0, xp))


def dirac_field(b: float) -> CauchyField:
    def evaluate(z):
        return 1.0 / (np.asarray(z, dtype=complex) - b)

    return CauchyField(evaluate, "closed_form", (b, b))


def bernoulli_field(a: float) -> CauchyField:
    if a <= 0.0:
        raise InvalidParameterError("bernoulli displacement must be positive")

    def evaluate(z):
        z = np.asarray(z, dtype=complex)
        return z / (z * z - a * a)

    return CauchyField(evaluate, "closed_form", (-a, a))


def cauchy_from_square_pushforward(nu_field: CauchyField) -> CauchyField:
    """Cauchy transform of the symmetrization: G(z) = z G_nu(z^2).

    z^2 leaves the upper half-plane when Re z < 0; those points are
    recovered by the Schwarz reflection of the half-line field.
    """
    def evaluate(z):
        z = np.asarray(z, dtype=complex)
        return z * nu_field.eval_anywhere(z * z)

    lo, hi = nu_field.support
    r = float(np.sqrt(max(hi, 0.0)))
    return CauchyField(evaluate, nu_field.kind, (-r, r))


# ---------------------------------------------------------------------------
# Series transforms
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class STransformSeries:
    """S-transform as z^z_power times a power series.

    Standard-branch transforms have z_power 0. Symmetric measures carry
    z_power -1/2 (their S-transform behaves like 1/sqrt(z) at the origin),
    so products and identities reduce to plain series algebra after the
    prefactors are cleared.
    """

    series: TruncatedSeries
    z_power: float = 0.0
    branch: str = "standard"


def r_series(mu: MeasureSpec, order: int) -> CumulantSequence:
    """Free cumulants of mu to the given order."""
    return moments_to_cumulants(moments(mu, order))


def s_from_moments(tau: MomentSequence) -> TruncatedSeries:
    """Standard-branch S series from raw moments (needs tau_1 != 0).

    chi is the compositional inverse of Psi(z) = sum tau_n z^n and
    S = (1+z) chi(z) / z.
    """
    psi = tau.psi_series()
    try:
        chi = lagrange_invert(psi)
    except NotInvertibleError as exc:
        raise SUndefinedError(
            "S-transform standard branch undefined: first moment vanishes"
        ) from exc
    chi_over_z = chi.shift_down()
    one_plus_z = TruncatedSeries.from_coeffs([1.0, 1.0], chi_over_z.order)
    return one_plus_z * chi_over_z


def s_symmetric_from_even_moments(tau_sq: MomentSequence) -> STransformSeries:
    """Positive-root symmetric S from the moments of the squared measure."""
    s_nu = s_from_moments(tau_sq)
    one_plus_z = TruncatedSeries.from_coeffs([1.0, 1.0], s_nu.order)
    return STransformSeries(sqrt_series(one_plus_z * s_nu), -0.5, "symmetric_plus")


def s_series(mu: MeasureSpec, order: int) -> STransformSeries:
    """S-transform series of mu (standard or symmetric positive branch)."""
    zero_mass = sum(w for x, w in mu.atoms if abs(x) <= 1e-12)
    if zero_mass >= 1.0 - 1e-12:
        raise DegenerateMeasureError("S-transform undefined: unit mass at the origin")
    if mu.domain == "symmetric":
        tau = moments(mu, 2 * order + 2)
        tau_sq = MomentSequence(tau.values[1::2][: order + 1])
        return s_symmetric_from_even_moments(tau_sq)
    tau = moments(mu, order + 1)
    if abs(tau.values[0]) < 1e-12:
        raise SUndefinedError(
            "S-transform undefined: tau_1 = 0 for a non-symmetric measure"
        )
    return STransformSeries(s_from_moments(tau), 0.0, "standard")


def free_add(a: CumulantSequence, b: CumulantSequence) -> CumulantSequence:
    """Free additive convolution at the cumulant level."""
    if a.order != b.order:
        raise InvalidInputError(f"cumulant orders differ: {a.order} vs {b.order}")
    return CumulantSequence(a.values + b.values)


def free_mult(a: STransformSeries, b: STransformSeries) -> STransformSeries:
    """Free multiplicative convolution at the S-transform level."""
    branch = a.branch if a.branch == b.branch else f"{a.branch}*{b.branch}"
    return STransformSeries(a.series * b.series, a.z_power + b.z_power, branch)


def moments_from_s(s: STransformSeries, order: int) -> MomentSequence:
    """Invert a standard-branch S series back to raw moments."""
    if s.z_power != 0.0:
        raise InvalidInputError("only standard-branch S series invert to moments")
    k = s.series.order
    if order > k:
        raise InvalidInputError("requested moment order exceeds the series order")
    one_plus_z = TruncatedSeries.from_coeffs([1.0, 1.0], k)
    chi = (s.series * reciprocal(one_plus_z)) * TruncatedSeries.identity(k + 1)
    # chi has c0 = 0; Psi is its compositional inverse
    psi = lagrange_invert(chi.truncate(k + 1))
    return MomentSequence(psi.coeffs[1 : order + 1])


# ---------------------------------------------------------------------------
# Stieltjes inversion
# ---------------------------------------------------------------------------

def _neville_extrapolate(eps, rows):
    """Polynomial extrapolation of rows (one per eps) to eps = 0."""
    tableau = [np.asarray(r, dtype=float) for r in rows]
    xs = list(eps)
    n = len(xs)
    for level in range(1, n):
        nxt = []
        for i in range(n - level):
            x0, x1 = xs[i], xs[i + level]
            nxt.append((x0 * tableau[i + 1] - x1 * tableau[i]) / (x0 - x1))
        tableau = nxt
    return tableau[0]


def stieltjes_invert(
    field: CauchyField,
    grid,
    eps_schedule=DEFAULT_EPS_SCHEDULE,
    atom_probes=None,
    extrapolation_order=1,
    domain="real",
) -> MeasureSpec:
    """Recover a measure from its Cauchy transform.

    The density is -Im G(x + i eps)/pi extrapolated to eps = 0 over the
    tail of the schedule; atoms appear where eps |Im G| stabilizes at a
    positive level instead of decaying linearly in eps.
    """
    grid = np.asarray(grid, dtype=float)
    eps = [float(e) for e in eps_schedule]
    if len(eps) < 2 or any(b >= a for a, b in zip(eps, eps[1:])):
        raise InvalidParameterError("eps_schedule must be decreasing with >= 2 entries")
    spacing = np.diff(grid)
    if np.max(np.abs(spacing - spacing[0])) > 1e-9 * spacing[0]:
        raise InvalidParameterError("density grid must be uniform")

    im_rows = []
    for e in eps:
        g = field(grid + 1j * e)
        im_rows.append(g.imag)

    n_ext = min(extrapolation_order + 1, len(eps))
    density = -_neville_extrapolate(eps[-n_ext:], im_rows[-n_ext:]) / np.pi

    probes = grid if atom_probes is None else np.asarray(atom_probes, dtype=float)
    a_rows = []
    for e in eps[-3:]:
        a_rows.append(-e * field(probes + 1j * e).imag)
    a_prev, a_fin = a_rows[-2], a_rows[-1]
    e_prev, e_fin = eps[-2], eps[-1]
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = np.where(a_prev > 0, a_fin / a_prev, 0.0)
    flagged = (a_fin > ATOM_DETECT_THRESHOLD) & (ratio > 0.6)

    atoms = []
    idx = np.flatnonzero(flagged)
    if len(idx):
        # group contiguous flagged probes and keep each group's peak
        splits = np.flatnonzero(np.diff(idx) > 1)
        for chunk in np.split(idx, splits + 1):
            peak = chunk[np.argmax(a_fin[chunk])]
            # linear-in-eps extrapolation removes the density background
            w = a_fin[peak] + (a_fin[peak] - a_prev[peak]) * e_fin / (e_prev - e_fin)
            loc = probes[peak]
            if w > ATOM_DETECT_THRESHOLD:
                atoms.append((float(loc), float(min(w, 1.0))))

    # blank the density near detected atoms (the pole dominates Im G there)
    # and drop extrapolation dust that would dilute atom weights
    density = np.maximum(density, 0.0)
    for loc, _ in atoms:
        density[np.abs(grid - loc) <= 8.0 * eps[-1]] = 0.0
    if np.any(density > 0):
        density[density < 1e-7 * density.max()] = 0.0

    part = DensityPart(grid[0], grid[-1], density) if np.any(density > 0) else None
    mass = sum(w for _, w in atoms) + (part.mass() if part is not None else 0.0)
    if abs(mass - 1.0) > 1e-2:
        raise InversionFailedError(
            f"recovered mass {mass!r} deviates from 1 by more than 1e-2"
        )
    return normalized_measure(tuple(atoms), part, domain)
