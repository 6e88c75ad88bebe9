"""Compactly supported probability measures: atoms plus a gridded density.

A measure is a finite atom list plus an optional absolutely continuous part
sampled on a uniform grid. Densities in this problem family have square-root
edges, occasionally an inverse-square-root edge touching the support
boundary, and a plain trapezoid rule integrates those with O(h^1.5) bias.
Construction therefore models each edge zone in a transformed variable
(rho^2 for vanishing edges, rho*sqrt(x-e) for divergent ones, both linear
between nodes to high accuracy), integrates the model exactly, and folds the
trapezoid defect into the one or two nodes nearest the edge. Stored grids
then trapezoid-integrate to the exact mass while every other sample stays
pointwise analytic; `density_evaluator` exposes the same edge models for
off-grid queries.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .errors import InvalidDomainError, InvalidInputError, InvalidParameterError
from .series import MomentSequence

DEFAULT_GRID = 4096
ATOM_MERGE_TOL = 1e-12
MASS_TOL = 1e-9
_ZONE_CELLS = 256

DOMAIN_REAL = "real"
DOMAIN_NONNEG = "nonneg"
DOMAIN_SYMMETRIC = "symmetric"
_DOMAINS = (DOMAIN_REAL, DOMAIN_NONNEG, DOMAIN_SYMMETRIC)


def _freeze(a):
    a = np.asarray(a, dtype=float).copy()
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class DensityPart:
    """Density samples on the uniform grid linspace(lo, hi, len(values))."""

    lo: float
    hi: float
    values: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "lo", float(self.lo))
        object.__setattr__(self, "hi", float(self.hi))
        object.__setattr__(self, "values", _freeze(self.values))
        if not self.lo < self.hi:
            raise InvalidParameterError("density needs support_lo < support_hi")
        if len(self.values) < 8:
            raise InvalidParameterError("density grid too small")
        if np.min(self.values) < -1e-12:
            raise InvalidParameterError("density values must be non-negative")

    @property
    def grid(self):
        return np.linspace(self.lo, self.hi, len(self.values))

    @property
    def spacing(self):
        return (self.hi - self.lo) / (len(self.values) - 1)

    def mass(self):
        return float(np.trapezoid(self.values, dx=self.spacing))


@dataclass(frozen=True, eq=False)
class MeasureSpec:
    """Canonical compactly supported probability measure."""

    atoms: tuple
    density: DensityPart | None
    domain: str

    def __post_init__(self):
        object.__setattr__(self, "atoms", _merge_atoms(self.atoms))
        if self.domain not in _DOMAINS:
            raise InvalidParameterError(f"unknown domain tag {self.domain!r}")
        mass = self.total_mass()
        if abs(mass - 1.0) > MASS_TOL:
            raise InvalidParameterError(f"total mass {mass!r} is not 1 within {MASS_TOL}")
        for x, w in self.atoms:
            if not 0.0 < w <= 1.0 + 1e-12:
                raise InvalidParameterError(f"atom weight {w!r} outside (0, 1]")
        if self.domain == DOMAIN_NONNEG:
            if any(x < -1e-12 for x, _ in self.atoms):
                raise InvalidDomainError("nonneg measure has an atom at a negative point")
            if self.density is not None and self.density.lo < -1e-12:
                raise InvalidDomainError("nonneg measure has density mass below 0")
        if self.domain == DOMAIN_SYMMETRIC:
            _check_symmetry(self)

    def total_mass(self):
        m = sum(w for _, w in self.atoms)
        if self.density is not None:
            m += self.density.mass()
        return float(m)

    def atom_mass(self):
        return float(sum(w for _, w in self.atoms))

    def support(self):
        """Hull [lo, hi] of atoms and density support."""
        pts = [x for x, _ in self.atoms]
        if self.density is not None:
            pts += [self.density.lo, self.density.hi]
        return min(pts), max(pts)

    def to_json(self) -> str:
        doc = {"atoms": [[x, w] for x, w in self.atoms], "domain": self.domain}
        if self.density is not None:
            doc["density"] = {
                "lo": self.density.lo,
                "hi": self.density.hi,
                "values": [float(v) for v in self.density.values],
            }
        return json.dumps(doc)

    @classmethod
    def from_json(cls, text: str) -> "MeasureSpec":
        try:
            doc = json.loads(text)
        except json.JSONDecodeError as exc:
            raise InvalidInputError(f"measure JSON is unparsable: {exc}") from exc
        if "domain" not in doc:
            raise InvalidInputError("measure JSON lacks a 'domain' tag")
        atoms = tuple((float(x), float(w)) for x, w in doc.get("atoms", []))
        density = None
        if doc.get("density") is not None:
            d = doc["density"]
            density = DensityPart(float(d["lo"]), float(d["hi"]), np.asarray(d["values"], float))
        return normalized_measure(atoms, density, doc["domain"])


def _merge_atoms(atoms):
    """Sort atoms, merge locations within 1e-12, drop zero weights."""
    items = sorted((float(x), float(w)) for x, w in atoms)
    merged = []
    for x, w in items:
        if merged and abs(x - merged[-1][0]) <= ATOM_MERGE_TOL:
            ox, ow = merged[-1]
            merged[-1] = ((ox * ow + x * w) / (ow + w), ow + w)
        else:
            merged.append((x, w))
    return tuple((x, w) for x, w in merged if w > 0.0)


def _check_symmetry(mu: MeasureSpec):
    for x, w in mu.atoms:
        match = [wm for xm, wm in mu.atoms if abs(xm + x) <= 1e-12]
        if not match or abs(match[0] - w) > 1e-12:
            raise InvalidDomainError(f"symmetric measure lacks the mirror of atom at {x}")
    d = mu.density
    if d is not None:
        if abs(d.lo + d.hi) > 1e-12 * max(1.0, abs(d.hi)):
            raise InvalidDomainError("symmetric density support is not centered")
        if np.max(np.abs(d.values - d.values[::-1])) > 1e-12:
            raise InvalidDomainError("symmetric density values are not mirror-invariant")


def normalized_measure(atoms, density, domain) -> MeasureSpec:
    """Build a MeasureSpec, rescaling weights/values onto total mass 1.

    For externally supplied data (JSON input, inversion output); the mass
    must already be within 1 percent of 1, otherwise the input is broken
    rather than silently fixable.
    """
    mass = sum(w for _, w in atoms) + (density.mass() if density is not None else 0.0)
    if abs(mass - 1.0) > 1e-2:
        raise InvalidInputError(f"measure mass {mass!r} too far from 1 to renormalize")
    scale = 1.0 / mass
    atoms = tuple((x, w * scale) for x, w in atoms)
    if density is not None:
        density = DensityPart(density.lo, density.hi, density.values * scale)
    return MeasureSpec(atoms, density, domain)


# ---------------------------------------------------------------------------
# Edge zones: transformed-linear density models near support edges
# ---------------------------------------------------------------------------

def _support_runs(values):
    """Contiguous index runs where the density is effectively positive."""
    finite = np.where(np.isfinite(values), values, np.inf)
    vmax = float(np.max(np.where(np.isfinite(values), values, 0.0)))
    pos = finite > max(vmax, 1.0) * 1e-13
    runs = []
    start = None
    for i, p in enumerate(pos):
        if p and start is None:
            start = i
        elif not p and start is not None:
            runs.append((start, i - 1))
            start = None
    if start is not None:
        runs.append((start, len(values) - 1))
    return runs


class _EdgeZone:
    """One edge of one support run, in left-edge orientation.

    kind "sqrt": rho vanishes like sqrt(x - e); rho^2 is interpolated
    linearly between raw nodes (exact for semicircle-type profiles).
    kind "invsqrt": rho diverges like 1/sqrt(x - e); rho*sqrt(x - e) is
    interpolated linearly. Nodes holding mass corrections are excluded
    from the model: corrections live in a ghost node just outside the
    support (sqrt) or in the two boundary nodes (invsqrt).
    """

    def __init__(self, kind, e, xs, ws, lo, hi, win, dump, quad=None):
        self.kind = kind
        self.e = e
        self.xs = xs          # abscissae of model nodes (increasing)
        self.ws = ws          # transformed values at those nodes
        self.lo = lo          # evaluation span in left-edge orientation
        self.hi = hi
        self.win = win        # (index_lo, index_hi) of the correction window
        self.dump = dump      # node indices receiving the mass correction
        self.quad = quad      # (x_ref, a, b, c): leading rho^2 segment

    def value(self, x):
        x = np.asarray(x, dtype=float)
        w = np.interp(x, self.xs, self.ws)
        # np.interp clamps; extend the first segment down to the edge.
        left = x < self.xs[0]
        if np.any(left):
            slope = (self.ws[1] - self.ws[0]) / (self.xs[1] - self.xs[0])
            w = np.where(left, self.ws[0] + slope * (x - self.xs[0]), w)
        if self.kind == "sqrt":
            if self.quad is not None:
                # Curvature matters where the leading segment extrapolates
                # toward the edge; the quadratic is exact for semicircle-
                # and Marcenko-Pastur-type rho^2 profiles near the edge.
                x_ref, a, b, c = self.quad
                xi = x - x_ref
                w = np.where(x <= self.xs[1], a + b * xi + c * xi * xi, w)
            return np.sqrt(np.maximum(w, 0.0))
        d = np.maximum(x - self.e, 0.0)
        with np.errstate(divide="ignore"):
            out = w / np.sqrt(d)
        return np.where(d > 0.0, out, np.inf)

    def integrals(self, win_lo, win_hi):
        """(mass, first moment) of the model over [max(e, win_lo), win_hi].

        Integrated with the substitution x = e + s^2, which turns each
        linear-in-transform segment into a low-degree polynomial in s;
        8-point Gauss-Legendre per segment is then exact.
        """
        gl_x, gl_w = np.polynomial.legendre.leggauss(8)
        a0 = max(self.e, win_lo)
        breaks = np.concatenate(([a0], self.xs, [win_hi]))
        breaks = np.unique(np.clip(breaks, a0, win_hi))
        mass = 0.0
        mom = 0.0
        for a, b in zip(breaks[:-1], breaks[1:]):
            if b <= a:
                continue
            sa, sb = np.sqrt(a - self.e), np.sqrt(b - self.e)
            s = 0.5 * (sb - sa) * gl_x + 0.5 * (sb + sa)
            x = self.e + s * s
            f = self.value(x) * 2.0 * s * 0.5 * (sb - sa)
            mass += np.dot(gl_w, f)
            mom += np.dot(gl_w, f * x)
        return mass, mom


def _left_edge_zone(u, v, i0, i1, raw):
    """Build the edge model for the left end of the run [i0, i1], or None.

    With raw=True (pre-correction samples) every run node is a genuine
    sample and the model anchors at the run start; with raw=False (stored
    arrays) the run's first node is the ghost/surrogate holding the mass
    correction, so the model starts one node further in.
    """
    n = len(u)
    h = u[1] - u[0]
    # Cap at half the run so the left and right zones never overlap.
    zone_end = min(i0 + (i1 - i0) // 2 - 1, i0 + _ZONE_CELLS)
    divergent = i0 == 0 and n > 5 and (
        not np.isfinite(v[0])
        or (v[1] > 0 and v[2] > 0 and v[0] > 1.3 * v[1] and v[1] > 1.15 * v[2])
    )
    if divergent:
        k0 = 2  # nodes 0 and 1 carry the mass surrogate
        if zone_end <= k0 + 1 or v[k0] <= 0.0 or v[k0 + 1] <= 0.0:
            return None
        e = u[0]
        xs = u[k0 : zone_end + 1]
        ws = v[k0 : zone_end + 1] * np.sqrt(xs - e)
        # The factored-sqrt model is globally accurate, so the correction
        # window spans the whole zone (the 1/sqrt trapezoid bias decays
        # only like k^(-5/2) away from the edge).
        return _EdgeZone("invsqrt", e, xs, ws, u[0], u[zone_end], (0, zone_end), (0, 1))
    if raw:
        # Need a zero node before the run to hold the ghost correction.
        if i0 < 1:
            return None
        k0 = i0
    else:
        k0 = i0 + 1  # run starts at the ghost node
    if zone_end <= k0 + 2 or v[k0] <= 0.0 or v[k0 + 1] <= 0.0 or v[k0 + 2] <= 0.0:
        return None
    p0, p1, p2 = v[k0] ** 2, v[k0 + 1] ** 2, v[k0 + 2] ** 2
    if p1 <= p0:
        return None
    # Quadratic rho^2 through the first three nodes; its root below the
    # first node locates the edge.
    c = (p2 - 2.0 * p1 + p0) / (2.0 * h * h)
    b = (p1 - p0) / h - c * h
    floor = u[k0 - 1] if k0 > 0 else u[0] - h
    e = None
    if abs(c) > 1e-300:
        disc = b * b - 4.0 * c * p0
        if disc >= 0.0:
            roots = [(-b + np.sqrt(disc)) / (2.0 * c), (-b - np.sqrt(disc)) / (2.0 * c)]
            cands = [r for r in roots if -2.5 * h <= r < 0.0]
            if cands:
                e = u[k0] + max(cands)
    if e is None:
        if b <= 0.0:
            return None
        e = u[k0] - p0 / b  # linear fallback
    e = min(max(e, floor), u[k0] - 1e-9 * h)
    quad = (u[k0], p0, b, c)
    xs = u[k0 : zone_end + 1]
    ws = v[k0 : zone_end + 1] ** 2
    lo = u[max(k0 - 2, 0)]
    # The correction window spans the zone: per-cell sqrt-aware integrals
    # capture the slowly decaying trapezoid bias of the sqrt tail, and the
    # whole defect lands in the ghost node (its misplacement is O(h) times
    # an already tiny mass).
    return _EdgeZone("sqrt", e, xs, ws, lo, u[zone_end], (max(k0 - 2, 0), zone_end), (k0 - 1,), quad)


def _edge_zones(grid, values, raw=False):
    """Edge models for both ends of every support run, with orientation.

    Returns a list of (zone, flipped) where flipped means the zone lives in
    mirrored coordinates x -> -x (right edges are modeled as left edges).
    """
    zones = []
    runs = _support_runs(values)
    gr = -grid[::-1]
    vr = values[::-1]
    for i0, i1 in runs:
        if i1 - i0 < 6:
            continue
        z = _left_edge_zone(grid, values, i0, i1, raw)
        if z is not None:
            zones.append((z, False))
        j0, j1 = len(grid) - 1 - i1, len(grid) - 1 - i0
        z = _left_edge_zone(gr, vr, j0, j1, raw)
        if z is not None:
            zones.append((z, True))
    return zones


class _DensityEvaluator:
    """Pointwise density evaluation aware of square-root edge zones.

    Interior cells use 4-point cubic interpolation (edge zones override it
    near support edges, where polynomial stencils are the wrong model).
    """

    def __init__(self, part: DensityPart):
        self.grid = part.grid
        self.values = np.asarray(part.values, float)
        self.zones = _edge_zones(self.grid, self.values)

    def _base(self, x):
        g, v = self.grid, self.values
        n = len(g)
        h = g[1] - g[0]
        j = np.clip(((x - g[0]) // h).astype(int), 1, n - 3)
        t = (x - (g[0] + j * h)) / h
        fm1, f0, f1, f2 = v[j - 1], v[j], v[j + 1], v[j + 2]
        cubic = (
            fm1 * (-t * (t - 1.0) * (t - 2.0) / 6.0)
            + f0 * ((t * t - 1.0) * (t - 2.0) / 2.0)
            + f1 * (-t * (t + 1.0) * (t - 2.0) / 2.0)
            + f2 * (t * (t * t - 1.0) / 6.0)
        )
        # Fall back to linear wherever the stencil straddles a support gap
        # (cubics overshoot across zero runs and ghost nodes).
        linear = f0 + t * (f1 - f0)
        ok = (fm1 > 0.0) & (f0 > 0.0) & (f1 > 0.0) & (f2 > 0.0)
        out = np.where(ok, cubic, linear)
        return np.where((x < g[0]) | (x > g[-1]), 0.0, out)

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        scalar = x.ndim == 0
        x = np.atleast_1d(x).astype(float)
        out = self._base(x)
        for zone, flipped in self.zones:
            q = -x if flipped else x
            mask = (q >= zone.lo) & (q <= zone.hi)
            if np.any(mask):
                out[mask] = zone.value(q[mask])
        out = np.maximum(out, 0.0)
        return float(out[0]) if scalar else out


def density_evaluator(mu: MeasureSpec):
    """Edge-aware pointwise evaluator for the density part (0 if absent)."""
    if mu.density is None:
        return lambda x: np.zeros_like(np.asarray(x, dtype=float))
    return _DensityEvaluator(mu.density)


def _edge_corrected(grid, values, target_mass):
    """Adjust edge-adjacent samples so the trapezoid mass is target_mass.

    For every edge zone, the model mass (and for divergent edges also its
    first moment) over the zone replaces the trapezoid count by solving for
    the value of the nearest node (two nodes for divergent edges, so atoms
    of missing mass land with the right mean position). The leftover global
    defect, typically below 1e-6 relative, is spread multiplicatively.
    """
    v = np.asarray(values, float).copy()
    h = grid[1] - grid[0]
    zones = _edge_zones(grid, v, raw=True)
    for zone, flipped in zones:
        g = -grid[::-1] if flipped else grid
        w = v[::-1].copy() if flipped else v.copy()
        ia, iz = zone.win
        mass, mom = zone.integrals(g[ia], g[iz])
        trap_w = np.zeros(len(w))
        trap_w[ia:iz + 1] = h
        trap_w[ia] = trap_w[iz] = h / 2.0
        if zone.kind == "invsqrt":
            # Unknowns w[0], w[1]: match the window's mass and mean so the
            # missing edge mass lands at the right location.
            w[0] = w[1] = 0.0
            b0 = mass - np.dot(trap_w[ia:iz + 1], w[ia:iz + 1])
            b1 = mom - np.dot(trap_w[ia:iz + 1] * g[ia:iz + 1], w[ia:iz + 1])
            det = trap_w[0] * trap_w[1] * (g[1] - g[0])
            w[0] = max((b0 * trap_w[1] * g[1] - b1 * trap_w[1]) / det, 0.0)
            w[1] = max((b1 * trap_w[0] - b0 * trap_w[0] * g[0]) / det, 0.0)
        else:
            # Single ghost unknown in the zero node just outside the run;
            # the window includes both cells flanking it, so its window
            # coefficient equals its global trapezoid weight.
            dump = zone.dump[0]
            trap = np.dot(trap_w[ia:iz + 1], w[ia:iz + 1])
            w[dump] = max(w[dump] + (mass - trap) / trap_w[dump], 0.0)
        v = w[::-1].copy() if flipped else w

    v = np.where(np.isfinite(v), v, 0.0)
    got = np.trapezoid(v, dx=h)
    if got > 0.0:
        v = v * (target_mass / got)
    return v


def _sampled_density(lo, hi, func, g, target_mass, divergent_lo=False, divergent_hi=False,
                     mirror=False):
    grid = np.linspace(lo, hi, g)
    with np.errstate(divide="ignore", invalid="ignore"):
        vals = np.asarray(func(grid), dtype=float)
    vals = np.where(np.isnan(vals), 0.0, vals)
    vals = np.where(np.isfinite(vals), np.maximum(vals, 0.0), np.inf)
    if divergent_lo:
        vals[0] = np.inf
    if divergent_hi:
        vals[-1] = np.inf
    # Stray tiny samples at the boundary (edge-model extrapolation dust)
    # would make the support run touch the grid end and disable the ghost
    # correction there.
    vmax = float(np.max(np.where(np.isfinite(vals), vals, 0.0)))
    for idx in (0, -1):
        if np.isfinite(vals[idx]) and vals[idx] < 1e-4 * vmax:
            vals[idx] = 0.0
    vals = _edge_corrected(grid, vals, target_mass)
    if mirror:
        vals = _mirrored(vals)
    return DensityPart(lo, hi, np.maximum(vals, 0.0))


def _mirrored(values):
    """Make samples exactly mirror-symmetric (average the two halves)."""
    v = np.asarray(values, float)
    return 0.5 * (v + v[::-1])


# ---------------------------------------------------------------------------
# Named measures
# ---------------------------------------------------------------------------

def make_dirac(b: float) -> MeasureSpec:
    """Point mass at b."""
    domain = DOMAIN_NONNEG if b >= 0.0 else DOMAIN_REAL
    return MeasureSpec(((float(b), 1.0),), None, domain)


def make_bernoulli(a: float) -> MeasureSpec:
    """Symmetric two-point measure (delta_{-a} + delta_a)/2, a > 0."""
    if a <= 0.0:
        raise InvalidParameterError(f"bernoulli displacement must be positive, got {a!r}")
    return MeasureSpec(((-float(a), 0.5), (float(a), 0.5)), None, DOMAIN_SYMMETRIC)


def make_semicircle(t: float, grid_size: int = DEFAULT_GRID) -> MeasureSpec:
    """Centered semicircle of variance t on [-2 sqrt(t), 2 sqrt(t)]."""
    if t <= 0.0:
        raise InvalidParameterError(f"semicircle time must be positive, got {t!r}")
    r = 2.0 * np.sqrt(t)

    def rho(x):
        return np.sqrt(np.maximum(4.0 * t - x * x, 0.0)) / (2.0 * np.pi * t)

    part = _sampled_density(-r, r, rho, grid_size, 1.0, mirror=True)
    return MeasureSpec((), part, DOMAIN_SYMMETRIC)


def make_marcenko_pastur(lam: float, t: float, grid_size: int = DEFAULT_GRID) -> MeasureSpec:
    """Two-parameter Marcenko-Pastur law on the nonnegative half-line.

    Mass max(0, 1-lam) sits in an atom at 0; the rest is the density
    sqrt((x-x-)(x+-x)) / (2 pi t x) on [x-, x+] with x+- = t(1 +- sqrt(lam))^2.
    At lam = 1 the lower edge touches 0 and the density diverges there like
    1/sqrt(x); at lam = 0 the measure degenerates to the point mass at 0.
    """
    if lam < 0.0 or t <= 0.0:
        raise InvalidParameterError(f"need lam >= 0 and t > 0, got lam={lam!r}, t={t!r}")
    if lam == 0.0:
        return make_dirac(0.0)
    s = np.sqrt(lam)
    lo = t * (1.0 - s) ** 2
    hi = t * (1.0 + s) ** 2
    atom_w = max(0.0, 1.0 - lam)
    atoms = ((0.0, atom_w),) if atom_w > 0.0 else ()

    def rho(x):
        with np.errstate(divide="ignore", invalid="ignore"):
            return np.sqrt(np.maximum((x - lo) * (hi - x), 0.0)) / (2.0 * np.pi * t * x)

    part = _sampled_density(lo, hi, rho, grid_size, min(1.0, lam), divergent_lo=(lo == 0.0))
    return MeasureSpec(atoms, part, DOMAIN_NONNEG)


# ---------------------------------------------------------------------------
# Measure-level maps
# ---------------------------------------------------------------------------

def push_forward_square(mu: MeasureSpec, grid_size: int | None = None) -> MeasureSpec:
    """Law of |x|^2 under mu (the second push-forward)."""
    atoms = tuple((x * x, w) for x, w in mu.atoms)
    density = None
    if mu.density is not None:
        d = mu.density
        ev = _DensityEvaluator(d)
        if d.lo <= 0.0 <= d.hi:
            lo2 = 0.0
        else:
            lo2 = min(d.lo * d.lo, d.hi * d.hi)
        hi2 = max(d.lo * d.lo, d.hi * d.hi)
        g = grid_size or len(d.values)
        probe = np.sqrt(hi2) * 1e-9

        def rho(y):
            y = np.asarray(y, float)
            r = np.sqrt(np.maximum(y, probe * probe))
            out = (ev(r) + ev(-r)) / (2.0 * r)
            if lo2 == 0.0:
                # y = 0: finite only when the symmetric density vanishes
                # linearly at the origin; otherwise flag an inverse-sqrt edge.
                lim = (ev(probe) + ev(-probe)) / (2.0 * probe)
                out = np.where(y <= 0.0, np.inf if lim * probe > 1e-9 else lim, out)
            return out

        density = _sampled_density(lo2, hi2, rho, g, d.mass())
    return MeasureSpec(atoms, density, DOMAIN_NONNEG)


def symmetrize(nu: MeasureSpec, grid_size: int | None = None) -> MeasureSpec:
    """The symmetric measure whose second push-forward is nu."""
    if nu.domain != DOMAIN_NONNEG:
        raise InvalidDomainError("symmetrize needs a measure tagged on the half-line")
    atoms = []
    for x, w in nu.atoms:
        if abs(x) <= ATOM_MERGE_TOL:
            atoms.append((0.0, w))
        else:
            r = float(np.sqrt(x))
            atoms.append((-r, w / 2.0))
            atoms.append((r, w / 2.0))
    density = None
    if nu.density is not None:
        d = nu.density
        ev = _DensityEvaluator(d)
        r = float(np.sqrt(d.hi))
        g = grid_size or len(d.values)
        probe = r * 1e-9

        def rho(x):
            ax = np.maximum(np.abs(np.asarray(x, float)), probe)
            return ev(ax * ax) * ax

        density = _sampled_density(-r, r, rho, g, d.mass(), mirror=True)
    return MeasureSpec(tuple(atoms), density, DOMAIN_SYMMETRIC)


def moments(mu: MeasureSpec, order: int) -> MomentSequence:
    """Raw moments tau_1..tau_K by atom sums plus trapezoid quadrature."""
    if order < 1:
        raise InvalidParameterError("moment order must be >= 1")
    tau = np.zeros(order)
    for x, w in mu.atoms:
        tau += w * np.power(float(x), np.arange(1, order + 1, dtype=float))
    if mu.density is not None:
        x = mu.density.grid
        v = mu.density.values
        xn = np.ones_like(x)
        for k in range(order):
            xn = xn * x
            tau[k] += np.trapezoid(xn * v, dx=mu.density.spacing)
    return MomentSequence(tau)


def hankel_psd_defect(tau: MomentSequence) -> float:
    """Most negative eigenvalue of the Hankel moment matrix (0 if PSD)."""
    full = np.concatenate(([1.0], tau.values))
    m = (len(full) - 1) // 2
    h = np.empty((m + 1, m + 1))
    for i in range(m + 1):
        for j in range(m + 1):
            h[i, j] = full[i + j]
    w = np.linalg.eigvalsh(h)
    return float(min(w.min(), 0.0))
