"""Initial-value evolution for the three log-gas hydrodynamic families.

The pointwise layer solves each family's functional equation at z in the
upper half-plane by damped fixed-point iteration with continuation in t
(warm starts select the physical branch from t = 0). The series layer
implements the exact evolution laws for R-transforms, the square-root lift
between half-line and symmetric R-transforms, and the S-transform identity
verifiers; those are exact maps on truncated coefficient sequences.
"""

from __future__ import annotations

from dataclasses import dataclass, field as _field

import numpy as np

from .errors import (
    EvolutionFailedError,
    InvalidDomainError,
    InvalidInputError,
    InvalidParameterError,
    SolverFailedError,
    SUndefinedError,
)
from .measures import (
    DensityPart,
    MeasureSpec,
    moments,
    normalized_measure,
)
from .series import (
    CumulantSequence,
    MomentSequence,
    TruncatedSeries,
    compose,
    cumulants_to_moments,
    moments_to_cumulants,
    reciprocal,
    sqrt_series,
)
from .transforms import (
    DEFAULT_EPS_SCHEDULE,
    CauchyField,
    STransformSeries,
    field_from_measure,
    s_from_moments,
    stieltjes_invert,
)

FAMILIES = ("dyson", "wishart", "chiral")


@dataclass(frozen=True)
class EvolutionProblem:
    """A family tag, its parameter, and the initial data."""

    family: str
    initial_measure: MeasureSpec
    initial_field: CauchyField = None
    lam: float = 1.0

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise InvalidParameterError(f"unknown family {self.family!r}")
        if self.family in ("wishart", "chiral") and self.lam < 0.0:
            raise InvalidParameterError("lambda must be >= 0")
        if self.family == "wishart" and self.initial_measure.domain != "nonneg":
            raise InvalidDomainError("wishart evolution needs a half-line initial measure")
        if self.family == "chiral" and self.initial_measure.domain != "symmetric":
            raise InvalidDomainError("chiral evolution needs a symmetric initial measure")
        if self.initial_field is None:
            object.__setattr__(self, "initial_field", field_from_measure(self.initial_measure))


@dataclass
class Diagnostics:
    max_residual: float = 0.0
    continuation_steps: int = 0
    failures: list = _field(default_factory=list)
    branch_flags: list = _field(default_factory=list)


@dataclass(frozen=True)
class EvolutionResult:
    t: float
    z_grid: np.ndarray
    g_values: np.ndarray
    recovered: MeasureSpec
    diagnostics: Diagnostics


def _hard_tol(g):
    return 1e-13 * np.maximum(1.0, np.abs(g))


def _accept_tol(g):
    # numerical floor of the map evaluation; well below the 1e-10 budget
    return 2e-11 * np.maximum(1.0, np.abs(g))


def _damped_iterate(phi, z, g0, max_iter=6000):
    """Damped fixed point g <- (1-theta) g + theta phi(z, g), vectorized.

    theta starts at 0.5 and halves for points whose residual has been
    non-monotone over ten consecutive iterations. Points whose best
    residual stops improving for 60 iterations are frozen at their best
    iterate (the map's numerical floor). Returns the best iterate, its
    residual, and an acceptance mask.
    """
    z = np.asarray(z, dtype=complex)
    g = np.array(g0, dtype=complex)
    n = g.size
    zf = z.ravel()
    gf = g.ravel().astype(complex)
    theta = np.full(n, 0.5)
    best_r = np.full(n, np.inf)
    best_g = gf.copy()
    worse = np.zeros(n, dtype=int)
    stall = np.zeros(n, dtype=int)
    done = np.zeros(n, dtype=bool)
    for _ in range(max_iter):
        act = np.flatnonzero(~done)
        if len(act) == 0:
            break
        target = phi(zf[act], gf[act])
        resid = np.abs(gf[act] - target)
        grew = resid >= best_r[act]
        improved = resid < 0.99 * best_r[act]
        rec = resid < best_r[act]
        best_r[act] = np.where(rec, resid, best_r[act])
        best_g[act] = np.where(rec, gf[act], best_g[act])
        stall[act] = np.where(improved, 0, stall[act] + 1)
        worse[act] = np.where(grew, worse[act] + 1, 0)
        halve = worse[act] >= 10
        th = np.where(halve, np.maximum(theta[act] / 2.0, 1.0 / 256.0), theta[act])
        theta[act] = th
        worse[act] = np.where(halve, 0, worse[act])
        gf[act] = (1.0 - th) * gf[act] + th * target
        finished = (resid <= _hard_tol(gf[act])) | (stall[act] >= 60)
        done[act[finished]] = True
    ok = (best_r <= _accept_tol(best_g)) & np.isfinite(best_g)
    return best_g.reshape(g.shape), best_r.reshape(g.shape), ok.reshape(g.shape)


def _continuation_solve(phi_at, g0_field, t, z, max_refine=8, diag=None):
    """March the fixed point from t = 0 to t with step halving on failure.

    phi_at(s) returns the map phi(z, g) of the family's functional equation
    at time s. Points that still fail at the finest step are frozen as NaN
    and reported through diag.failures.
    """
    z = np.asarray(z, dtype=complex).ravel()
    g = np.asarray(g0_field.eval_anywhere(z), dtype=complex)
    if t == 0.0:
        if diag is not None:
            diag.continuation_steps += 1
        return g, np.zeros(len(z))
    dt = min(0.1, t / 10.0)
    t_cur = 0.0
    refinements = 0
    failed = np.zeros(len(z), dtype=bool)
    resid = np.zeros(len(z))
    while t_cur < t - 1e-14:
        s = min(t_cur + dt, t)
        phi = phi_at(s)
        g_try, r_try, ok = _damped_iterate(phi, z, g)
        ok = ok & np.isfinite(g_try) & ((g_try.imag < 1e-12) | failed)
        bad = ~ok & ~failed
        if bad.any():
            if refinements < max_refine:
                dt /= 2.0
                refinements += 1
                continue
            failed |= bad
        keep = ~failed
        g[keep] = g_try[keep]
        resid[keep] = r_try[keep]
        t_cur = s
        if diag is not None:
            diag.continuation_steps += 1
    g[failed] = np.nan
    if diag is not None:
        diag.failures.extend(np.flatnonzero(failed).tolist())
        finite = resid[~failed]
        if len(finite):
            diag.max_residual = max(diag.max_residual, float(np.max(finite)))
    return g, resid


def _dyson_phi(g0_field, t):
    def phi(z, g):
        return g0_field.eval_anywhere(z - t * g)

    return phi


def _wishart_phi(g0_field, lam, t):
    def phi(z, g):
        u = (1.0 - t * g) * ((1.0 - lam) * t + (1.0 - t * g) * z)
        gu = g0_field.eval_anywhere(u)
        return 1.0 / (t + 1.0 / gu)

    return phi


def _chiral_phi(g0_field, lam, t):
    """Direct fixed-point map of the chiral functional equation.

    The square root is taken on the Im >= 0 branch, which continuation from
    t = 0 (where sqrt(D) = z) selects.
    """

    def phi(z, g):
        w = 1.0 - (t / z) * g
        d = w * ((1.0 - lam) * t + w * z * z)
        s = np.sqrt(d)
        s = np.where(s.imag < 0.0, -s, s)
        gs = g0_field.eval_anywhere(s)
        return 1.0 / (t / z + s / (z * gs))

    return phi


def dyson_values(g0_field, t, z, diag=None):
    """Solve the dyson functional equation at each z in the array."""
    g, _ = _continuation_solve(lambda s: _dyson_phi(g0_field, s), g0_field, t, np.asarray(z, complex), diag=diag)
    return g


def wishart_values(g0_field, lam, t, z, diag=None):
    g, _ = _continuation_solve(
        lambda s: _wishart_phi(g0_field, lam, s), g0_field, t, np.asarray(z, complex), diag=diag
    )
    return g


def pushforward_field_of_initial(g0_field) -> CauchyField:
    """Half-line field of mu^(2) from a symmetric field: G_nu(w) = G_mu(sqrt w)/sqrt w."""

    def evaluate(w):
        w = np.asarray(w, dtype=complex)
        root = np.sqrt(w)  # principal: maps C+ into the first quadrant
        return g0_field.eval_anywhere(root) / root

    lo, hi = g0_field.support
    r = max(abs(lo), abs(hi))
    return CauchyField(evaluate, g0_field.kind, (0.0, r * r))


def chiral_values(g0_field, lam, t, z, diag=None):
    """Chiral solve via the square-push-forward reduction G(z) = z G_m(z^2)."""
    z = np.asarray(z, dtype=complex).ravel()
    nu_field = pushforward_field_of_initial(g0_field)
    zeta = z * z
    upper = zeta.imag >= 0.0
    out = np.empty_like(zeta)
    if upper.any():
        out[upper] = wishart_values(nu_field, lam, t, zeta[upper], diag=diag)
    if (~upper).any():
        out[~upper] = np.conj(wishart_values(nu_field, lam, t, np.conj(zeta[~upper]), diag=diag))
    return z * out


def chiral_values_direct(g0_field, lam, t, z, diag=None):
    """Direct fixed point on the chiral functional equation (verifier path)."""
    g, _ = _continuation_solve(
        lambda s: _chiral_phi(g0_field, lam, s), g0_field, t, np.asarray(z, complex), diag=diag
    )
    return g


def _scalar(fn, z):
    out = fn(np.asarray([z], dtype=complex))
    val = complex(out[0])
    if not np.isfinite(val.real) or not np.isfinite(val.imag):
        raise SolverFailedError("fixed-point solve failed", z=z)
    return val


def solve_dyson_point(g0_field: CauchyField, t: float, z: complex) -> complex:
    """G_{w_t}(z) from G_{w_0} via the dyson functional equation."""
    if t < 0.0:
        raise InvalidParameterError("time must be >= 0")
    return _scalar(lambda zz: dyson_values(g0_field, t, zz), z)


def solve_wishart_point(g0_field: CauchyField, lam: float, t: float, z: complex) -> complex:
    """G_{m_{lam,t}}(z) from G_{m_{lam,0}}."""
    if t < 0.0 or lam < 0.0:
        raise InvalidParameterError("need t >= 0 and lambda >= 0")
    return _scalar(lambda zz: wishart_values(g0_field, lam, t, zz), z)


def solve_chiral_point(g0_field: CauchyField, lam: float, t: float, z: complex) -> complex:
    """G_{w_{lam,t}}(z) from a symmetric G_{w_{lam,0}} (push-forward reduction)."""
    if t < 0.0 or lam < 0.0:
        raise InvalidParameterError("need t >= 0 and lambda >= 0")
    return _scalar(lambda zz: chiral_values(g0_field, lam, t, zz), z)


def evolve(
    problem: EvolutionProblem,
    t: float,
    x_grid,
    eps_schedule=DEFAULT_EPS_SCHEDULE,
    extrapolation_order=1,
    atom_probes=None,
) -> EvolutionResult:
    """Solve the family's functional equation over the grid and invert.

    The solver runs at z = x + i eps for every eps in the schedule; the
    density comes from Richardson extrapolation, atoms from the eps|Im G|
    limit. More than 1 percent of failed grid points aborts the run.
    """
    x_grid = np.asarray(x_grid, dtype=float)
    if t == 0.0:
        g = problem.initial_field(x_grid + 1j * eps_schedule[-1])
        return EvolutionResult(0.0, x_grid + 1j * eps_schedule[-1], g,
                               problem.initial_measure, Diagnostics())

    diag = Diagnostics()
    fam = problem.family
    g0 = problem.initial_field

    if fam == "dyson":
        solve = lambda z: dyson_values(g0, t, z, diag=diag)
        domain = "real"
    elif fam == "wishart":
        solve = lambda z: wishart_values(g0, problem.lam, t, z, diag=diag)
        domain = "nonneg"
    else:
        solve = lambda z: chiral_values(g0, problem.lam, t, z, diag=diag)
        domain = "symmetric"

    field = CauchyField(solve, "fixed_point", problem.initial_field.support)

    if atom_probes is None and fam == "wishart" and problem.lam < 1.0:
        # log-spaced probes near the origin pick up the max(0, 1-lam) atom
        lo_edge = t * (1.0 - np.sqrt(problem.lam)) ** 2
        probes = np.concatenate(([0.0], np.geomspace(eps_schedule[-1] / 10.0,
                                                     max(lo_edge / 2.0, eps_schedule[-1]), 12)))
        atom_probes = np.unique(np.concatenate((probes, x_grid)))

    recovered = stieltjes_invert(
        field, x_grid, eps_schedule,
        atom_probes=atom_probes, extrapolation_order=extrapolation_order,
        domain="real",
    )
    if fam == "chiral" and recovered.density is not None:
        vals = 0.5 * (recovered.density.values + recovered.density.values[::-1])
        density = DensityPart(recovered.density.lo, recovered.density.hi, vals)
        atoms = recovered.atoms
        recovered = normalized_measure(atoms, density, "symmetric")
    elif fam == "wishart":
        recovered = MeasureSpec(recovered.atoms, recovered.density, "nonneg")

    n_failed = len(set(diag.failures))
    if n_failed > 0.01 * len(x_grid) * len(eps_schedule):
        raise EvolutionFailedError(f"{n_failed} grid points failed to converge")

    zf = x_grid + 1j * eps_schedule[-1]
    return EvolutionResult(t, zf, field(zf), recovered, diag)


def subordination_residual(g0_field: CauchyField, t: float, z, g_t=None):
    """|G_t(z) - G_0(omega_t(z))| with omega_t = z - t G_t(z), plus Im omega."""
    z = np.asarray(z, dtype=complex)
    if g_t is None:
        g_t = dyson_values(g0_field, t, z)
    omega = z - t * g_t
    return np.abs(g_t - g0_field.eval_anywhere(omega)), omega.imag


# ---------------------------------------------------------------------------
# Series-level evolution
# ---------------------------------------------------------------------------

def r_evolve_dyson(r0: CumulantSequence, t: float) -> CumulantSequence:
    """Dyson flow adds the semicircle R-transform: kappa_2 += t."""
    v = np.array(r0.values, dtype=float)
    if len(v) < 2:
        v = np.concatenate((v, np.zeros(2 - len(v))))
    v[1] += t
    return CumulantSequence(v)


def _geom(t, order):
    """Series z/(1 - t z) = sum t^(n-1) z^n."""
    c = np.zeros(order + 1)
    for n in range(1, order + 1):
        c[n] = t ** (n - 1)
    return TruncatedSeries(c)


def r_evolve_wishart(r0: CumulantSequence, lam: float, t: float) -> CumulantSequence:
    """R_t(z) = R_0(z/(1-tz))/(1-tz) + lam t z/(1-tz) on truncated series."""
    k = r0.order
    geom = _geom(t, k)
    inv = reciprocal(TruncatedSeries.from_coeffs([1.0, -t], k))
    out = compose(r0.r_series(), geom) * inv + (lam * t) * geom
    return CumulantSequence(out.coeffs[1:])


def chiral_fundamental_r(lam: float, t: float, order: int) -> CumulantSequence:
    """R of the chiral fundamental solution: (-1 + t z^2 + sqrt(1 + 2(2 lam - 1) t z^2 + t^2 z^4))/2."""
    poly = np.zeros(order + 1)
    poly[0] = 1.0
    if order >= 2:
        poly[2] = 2.0 * (2.0 * lam - 1.0) * t
    if order >= 4:
        poly[4] = t * t
    s = sqrt_series(TruncatedSeries(poly))
    base = np.zeros(order + 1)
    base[0] = -1.0
    if order >= 2:
        base[2] = t
    out = 0.5 * (s + TruncatedSeries(base))
    return CumulantSequence(out.coeffs[1:])


def lemma31_r_lift(r_nu: CumulantSequence, order: int) -> CumulantSequence:
    """Symmetric R from the half-line R via R_mu(z) = R_nu(z^2/(R_mu(z)+1)).

    Iterating the right-hand side fixes two more orders per pass because the
    substituted argument has valuation 2.
    """
    rn = r_nu.r_series().truncate(order)
    one = TruncatedSeries.one(order)
    z2 = TruncatedSeries.from_coeffs([0.0, 0.0, 1.0], order)
    r = TruncatedSeries.zero(order)
    for _ in range(order // 2 + 2):
        arg = z2 * reciprocal(one + r)
        r = compose(rn, arg)
    return CumulantSequence(r.coeffs[1:])


def lemma31_r_residual(r_mu: CumulantSequence, r_nu: CumulantSequence) -> float:
    """Coefficient residual of Lemma-type identity R_mu(z) = R_nu(z^2/(R_mu+1))."""
    order = r_mu.order
    one = TruncatedSeries.one(order)
    z2 = TruncatedSeries.from_coeffs([0.0, 0.0, 1.0], order)
    rm = r_mu.r_series().truncate(order)
    arg = z2 * reciprocal(one + rm)
    rhs = compose(r_nu.r_series().truncate(order), arg)
    return float(np.max(np.abs((rm - rhs).coeffs)))


def verify_chiral_r_identity(r_t: CumulantSequence, r_0: CumulantSequence,
                             lam: float, t: float) -> float:
    """Coefficient residual of the implicit chiral R-transform evolution law."""
    for r in (r_t, r_0):
        if np.max(np.abs(r.values[0::2])) > 1e-12:
            raise InvalidInputError("chiral R identity needs symmetric cumulant sequences")
    order = min(r_t.order, r_0.order)
    rt = r_t.r_series().truncate(order)
    r0s = r_0.r_series().truncate(order)
    one = TruncatedSeries.one(order)
    tz2 = TruncatedSeries.from_coeffs([0.0, 0.0, t], order)
    c = 1.0 - lam
    lhs = rt + c * tz2 * reciprocal(one + rt)
    rf = chiral_fundamental_r(lam, t, order).r_series().truncate(order)
    inner = one - c * (reciprocal(one + rt) - reciprocal(one + rt - tz2))
    arg = TruncatedSeries.identity(order) * sqrt_series(inner)
    rhs = rf + c * tz2 * reciprocal(one + rf) + compose(r0s, arg)
    return float(np.max(np.abs((lhs - rhs).coeffs)))


def explicit_wa(a: float, t: float, order: int):
    """Closed-form R and S of the dyson flow started from the two-point measure.

    R(z) = (2 t z^2 - 1 + sqrt(1 + 4 a^2 z^2))/2 and S(z) = (t z)^(-1/2) times
    a square-root bracket; both are returned as truncated series (the S with
    its z^(-1/2) prefactor).
    """
    if a <= 0.0 or t < 0.0:
        raise InvalidParameterError("need a > 0 and t >= 0")
    poly = np.zeros(order + 1)
    poly[0] = 1.0
    if order >= 2:
        poly[2] = 4.0 * a * a
    s = sqrt_series(TruncatedSeries(poly))
    base = np.zeros(order + 1)
    base[0] = -1.0
    if order >= 2:
        base[2] = 2.0 * t
    kappa = CumulantSequence((0.5 * (s + TruncatedSeries(base))).coeffs[1:])

    if t == 0.0:
        return kappa, None
    ratio = a * a / t
    cc = 4.0 * ratio / (1.0 + ratio) ** 2
    wk = order + 2
    root = sqrt_series(TruncatedSeries.from_coeffs([1.0, cc], wk))
    # bracket = 1 + (1 + a^2/t)/(2z) * (1 - sqrt(1 + cc z))
    bracket = TruncatedSeries.one(wk - 1) + (0.5 * (1.0 + ratio)) * (
        TruncatedSeries.one(wk) - root
    ).shift_down()
    series = (1.0 / np.sqrt(t)) * sqrt_series(bracket).truncate(order)
    return kappa, STransformSeries(series, -0.5, "symmetric_plus")


def explicit_ma(lam: float, b: float, t: float, order: int):
    """Closed-form R and S of the wishart flow started from a point mass at b."""
    if lam < 0.0 or b <= 0.0 or t < 0.0:
        raise InvalidParameterError("need lam >= 0, b > 0, t >= 0")
    num = TruncatedSeries.from_coeffs([0.0, lam * t + b, -lam * t * t], order)
    den = reciprocal(TruncatedSeries.from_coeffs([1.0, -2.0 * t, t * t], order))
    kappa = CumulantSequence((num * den).coeffs[1:])

    if t == 0.0:
        return kappa, None
    ratio = b / t
    cc = 4.0 * ratio / (lam + ratio) ** 2
    wk = order + 2
    root = sqrt_series(TruncatedSeries.from_coeffs([1.0, cc], wk))
    # bracket = 1 + (lam + b/t)/(2z) * (1 - sqrt(1 + cc z))
    bracket = TruncatedSeries.one(wk - 1) + (0.5 * (lam + ratio)) * (
        TruncatedSeries.one(wk) - root
    ).shift_down()
    if lam == 0.0:
        # bracket vanishes at 0 and the lam + z prefactor degenerates to z
        cleaned = bracket.coeffs.copy()
        cleaned[0] = 0.0
        series = (1.0 / t) * TruncatedSeries(cleaned).shift_down().truncate(order)
    else:
        series = bracket.truncate(order) * reciprocal(
            TruncatedSeries.from_coeffs([t * lam, t], order)
        )
    return kappa, STransformSeries(series, 0.0, "standard")


# ---------------------------------------------------------------------------
# S-transform identity verification (Theorem-level residuals)
# ---------------------------------------------------------------------------

def _one_plus_z(order):
    return TruncatedSeries.from_coeffs([1.0, 1.0], order)


def _dyson_s_residual_series(a_or_s, b_init, t, symmetric):
    """Residual series of the dyson S identity after prefactor clearing."""
    if symmetric:
        a = a_or_s
        q = t * (a * a)
        comp = compose(b_init, TruncatedSeries.identity(q.order) * (TruncatedSeries.one(q.order) - q))
        return a - sqrt_series(TruncatedSeries.one(q.order) - q) * comp
    s = a_or_s
    q = TruncatedSeries.from_coeffs([0.0, t], s.order) * (s * s)
    one = TruncatedSeries.one(s.order)
    comp = compose(b_init, TruncatedSeries.identity(s.order) * (one - q))
    return s - (one - q) * comp


def _wishart_s_residual_series(s_m, s_m_init, lam, t):
    order = s_m.order
    one = TruncatedSeries.one(order)
    f1 = one - TruncatedSeries.from_coeffs([0.0, t], order) * s_m
    f2 = one - TruncatedSeries.from_coeffs([t * lam, t], order) * s_m
    comp = compose(s_m_init, TruncatedSeries.identity(order) * f2)
    return s_m - f1 * f2 * comp


def _chiral_s_residual_series(a, b_init, lam, t):
    """Residual series of the chiral S identity (Theorem-level (iv))."""
    order = a.order
    one = TruncatedSeries.one(order)
    r = (a * a) * TruncatedSeries.from_coeffs([t * lam, t], order) * reciprocal(_one_plus_z(order))
    p = t * (a * a)
    zf = TruncatedSeries.identity(order) * reciprocal(_one_plus_z(order))
    ratio = (one - zf * r) * reciprocal(one - zf * p)
    comp = compose(b_init, TruncatedSeries.identity(order) * (one - r))
    return sqrt_series(ratio) * a - sqrt_series(one - r) * comp


def _symmetric_a_series(tau_even: MomentSequence):
    """A(z) with S_sym = z^(-1/2) A(z), from the squared measure's moments."""
    s_nu = s_from_moments(tau_even)
    return sqrt_series(_one_plus_z(s_nu.order) * s_nu)


def verify_s_identities(problem: EvolutionProblem, t: float, order: int) -> dict:
    """Residuals of the applicable S-transform evolution identities.

    Everything is computed on the exact series side: the initial measure's
    moments feed the R-level evolution maps, and the S-transforms of the
    evolved measures are reconstructed through the moment/Lagrange route,
    so each residual checks a genuinely different identity path.
    """
    out = {}
    fam = problem.family
    if fam == "dyson":
        mu0 = problem.initial_measure
        symmetric = mu0.domain == "symmetric"
        k_mom = 2 * order + 2 if symmetric else order + 1
        tau0 = moments(mu0, k_mom)
        r0 = moments_to_cumulants(tau0)
        rt = r_evolve_dyson(r0, t)
        tau_t = cumulants_to_moments(rt)
        if symmetric:
            a_t = _symmetric_a_series(MomentSequence(tau_t.values[1::2][: order + 1]))
            b_0 = _symmetric_a_series(MomentSequence(tau0.values[1::2][: order + 1]))
            res = _dyson_s_residual_series(a_t, b_0, t, True)
        else:
            if abs(tau0.values[0]) < 1e-12:
                raise SUndefinedError("dyson S identity needs tau_1 != 0 or symmetry")
            s_t = s_from_moments(MomentSequence(tau_t.values[: order + 1]))
            b_0 = s_from_moments(MomentSequence(tau0.values[: order + 1]))
            res = _dyson_s_residual_series(s_t, b_0, t, False)
        out["ii"] = float(np.max(np.abs(res.coeffs)))
        return out

    lam = problem.lam
    if fam == "wishart":
        nu0_tau = moments(problem.initial_measure, order + 1)
    else:
        full = moments(problem.initial_measure, 2 * order + 2)
        nu0_tau = MomentSequence(full.values[1::2][: order + 1])
    r_nu0 = moments_to_cumulants(nu0_tau)
    r_nut = r_evolve_wishart(CumulantSequence(np.copy(r_nu0.values)), lam, t)
    tau_nut = cumulants_to_moments(r_nut)
    s_m = s_from_moments(MomentSequence(tau_nut.values[: order + 1]))

    # chiral side through the square-root lift
    r_wt = lemma31_r_lift(r_nut, 2 * order + 2)
    tau_wt = cumulants_to_moments(r_wt)
    a_t = _symmetric_a_series(MomentSequence(tau_wt.values[1::2][: order + 1]))

    res_i = a_t - sqrt_series(_one_plus_z(s_m.order) * s_m)
    out["i"] = float(np.max(np.abs(res_i.coeffs)))

    if abs(nu0_tau.values[0]) > 1e-12:
        s_m0 = s_from_moments(MomentSequence(nu0_tau.values[: order + 1]))
        res_iii = _wishart_s_residual_series(s_m, s_m0, lam, t)
        out["iii"] = float(np.max(np.abs(res_iii.coeffs)))
        if lam > 0.0:
            b_0 = _symmetric_a_series(nu0_tau)
            res_iv = _chiral_s_residual_series(a_t, b_0, lam, t)
            out["iv"] = float(np.max(np.abs(res_iv.coeffs)))
            if lam == 1.0:
                res_ii = _dyson_s_residual_series(a_t, b_0, t, True)
                out["iv_minus_ii"] = float(np.max(np.abs((res_iv - res_ii).coeffs)))
                out["ii"] = float(np.max(np.abs(res_ii.coeffs)))
    return out
