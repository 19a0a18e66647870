"""Weighted averages of the sheet separation over spheres about the neck.

For the base sheet ``Sigma`` of a :class:`~catlab.two_sheet.TwoSheetConfig`
and ``gamma_s = Sigma ∩ {|x| = s}``:

* ``I(s)   = (Omega s^(n-1))^-1 ∫_gamma_s w phi``, ``phi = |grad rho|``;
* ``tau(s) = Omega^-1 ∫_gamma_s <grad w, eta>`` (conormal flux);
* ``F(s)   = n (Omega s^n)^-1 ∫_gamma_s (1/phi - phi)``.

On rotationally symmetric fixtures ``gamma_s`` is a round sphere of radius
``t(s)`` and each integral is its area times the integrand.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from catlab.catenoid import area_within_radius, standard_height
from catlab.errors import ConfigurationError, DomainError, UnsupportedFixtureError
from catlab.numerics import DiffSpec, QuadratureSpec, derivative, integrate
from catlab.two_sheet import TwoSheetConfig

_QUAD = QuadratureSpec(abs_tol=1e-15, rel_tol=1e-11)


class Sample(NamedTuple):
    s: float
    t: float
    w: float
    phi: float
    I: float
    tau: float
    F: float


def _defect(cfg, t):
    """``1/phi - phi`` on the base sheet at radius ``t`` (exact, no cancellation)."""
    if cfg.kind == "planes":
        return 0.0
    n, r = cfg.n, cfg.r
    sigma = t / r
    q = sigma ** (n - 1)
    big_s = math.sqrt(q * q - 1.0)
    hh = standard_height(n, sigma)
    rho = math.hypot(sigma, hh)
    phi = (sigma * big_s + hh) / (q * rho)
    # 1 - phi^2 = ((t - S h) / (q rho))^2: the squared normal part of grad rho
    one_minus = ((sigma - big_s * hh) / (q * rho)) ** 2
    return one_minus / phi


def sample(cfg: TwoSheetConfig, s: float) -> Sample:
    """All three quantities at extrinsic radius ``s``."""
    n = cfg.n
    t = cfg.t_of_rho(s)
    g = cfg.local(t)
    ratio = (t / s) ** (n - 1)
    I = ratio * g.w * g.phi
    tau = t ** (n - 1) * g.dw_dt / g.stretch
    F = n * t ** (n - 1) * _defect(cfg, t) / s**n
    return Sample(s, t, g.w, g.phi, I, tau, F)


def _check_range(cfg, *values):
    lo, hi = float(cfg.rho[0]), float(cfg.rho[-1])
    for v in values:
        if not lo * (1 - 1e-12) <= v <= hi * (1 + 1e-12):
            raise DomainError(f"radius {v!r} outside the configuration range [{lo!r}, {hi!r}]")


def _subtract(interval, exclusion):
    a, b = interval
    if exclusion is None:
        return [(a, b)] if b > a else []
    lo, hi = exclusion
    pieces = [(a, min(b, lo)), (max(a, hi), b)]
    return [(p, q) for p, q in pieces if q > p]


def f_integral(cfg: TwoSheetConfig, R: float, s: float, exclusion=None) -> float:
    """``∫_[R, s] \\ exclusion F``, integrated in the base radius ``t``.

    ``exclusion`` is an optional window ``(lo, hi)`` of radii left out of the
    integral (the annulus around a second neck).
    """
    if cfg.kind == "planes":
        return 0.0
    n, r = cfg.n, cfg.r
    total = 0.0
    for a, b in _subtract((R, s), exclusion):
        t_a, t_b = cfg.t_of_rho(a), cfg.t_of_rho(b)

        def integrand(t):
            t = float(t)
            sigma = t / r
            hh = r * standard_height(n, sigma)
            rho = math.hypot(t, hh)
            slope = 1.0 / math.sqrt(sigma ** (2 * (n - 1)) - 1.0)
            drho_dt = (t + hh * slope) / rho
            return n * t ** (n - 1) * _defect(cfg, t) / rho**n * drho_dt

        total += integrate(integrand, t_a, t_b, _QUAD)
    return total


def modified(cfg, s, I, tau, f_int):
    """Modified average and flux for the dimension of ``cfg``."""
    n, r = cfg.n, cfg.r
    if r == 0.0:
        return I, tau
    log_ratio = math.log(s / r)
    if n == 2:
        I_mod = I - 3 * r * log_ratio - 2 * s * r * log_ratio - 10.0 * f_int * r * log_ratio
        tau_mod = tau + r * r / (2 * s) - s * r * log_ratio
    else:
        I_mod = I + 4 * s**-0.5 * r**1.5 - s * r - 10.0 * r * f_int
        tau_mod = tau - 9 * s**n * r - r**1.5 * s ** (n - 2.5)
    return I_mod, tau_mod


@dataclass(frozen=True)
class MonotoneTrace:
    n: int
    r: float
    s_grid: np.ndarray
    I: np.ndarray
    tau: np.ndarray
    F: np.ndarray
    I_mod: np.ndarray
    tau_mod: np.ndarray
    dI_ds: np.ndarray
    dtau_ds: np.ndarray
    R: float

    def rows(self):
        cols = (self.s_grid, self.I, self.tau, self.F, self.I_mod, self.tau_mod, self.dI_ds, self.dtau_ds)
        return [tuple(float(c[i]) for c in cols) for i in range(len(self.s_grid))]


def _diff_spec(cfg, s, spec):
    if spec is not None:
        return spec
    lo, hi = float(cfg.rho[0]), float(cfg.rho[-1])
    room = min(s - lo, hi - s)
    if not room > 0:
        raise DomainError(f"s={s!r} is not interior to the configuration range")
    return DiffSpec(base_step=min(0.05 * s, 0.5 * room), richardson_levels=4)


def trace(cfg: TwoSheetConfig, s_grid, R=None, exclusion=None) -> MonotoneTrace:
    """Evaluate ``I, tau, F`` and the modified quantities on ``s_grid``.

    The F-integral in the modified average starts at ``R`` (default: the first
    grid point) and skips ``exclusion``. Derivatives are Richardson central
    differences, which need room inside the configuration range.
    """
    s_grid = np.asarray(s_grid, dtype=float)
    if s_grid.ndim != 1 or s_grid.size < 1:
        raise ConfigurationError("s_grid must be a non-empty 1-d sequence")
    if np.any(np.diff(s_grid) <= 0):
        raise ConfigurationError("s_grid must be strictly increasing")
    _check_range(cfg, *s_grid)
    R = float(s_grid[0]) if R is None else float(R)
    _check_range(cfg, R)
    samples = [sample(cfg, s) for s in s_grid]
    f_cum, last_s, acc = [], R, 0.0
    for s in s_grid:
        if s >= last_s:
            acc += f_integral(cfg, last_s, s, exclusion)
            last_s = s
            f_cum.append(acc)
        else:
            f_cum.append(-f_integral(cfg, s, R, exclusion))
    mods = [modified(cfg, p.s, p.I, p.tau, f) for p, f in zip(samples, f_cum)]
    d_i, d_tau = [], []
    lo, hi = float(cfg.rho[0]), float(cfg.rho[-1])
    for s in s_grid:
        room = min(s - lo, hi - s)
        if room > 0:
            spec = DiffSpec(base_step=min(0.05 * s, 0.5 * room), richardson_levels=3)
            d_i.append(derivative(lambda x: sample(cfg, x).I, s, spec).value)
            d_tau.append(derivative(lambda x: sample(cfg, x).tau, s, spec).value)
        else:
            d_i.append(float("nan"))
            d_tau.append(float("nan"))

    arr = lambda xs: np.asarray(xs, dtype=float)
    return MonotoneTrace(
        cfg.n, cfg.r, s_grid,
        arr([p.I for p in samples]), arr([p.tau for p in samples]), arr([p.F for p in samples]),
        arr([m[0] for m in mods]), arr([m[1] for m in mods]),
        arr(d_i), arr(d_tau), R,
    )


def identity_rhs(cfg, s) -> float:
    """``tau/s^(n-1) + (t/s)^(n-1) w [phi^-1 Lap rho + (1-n) phi / s]`` with ``Lap rho = (n - phi^2)/s``."""
    n = cfg.n
    p = sample(cfg, s)
    lap_rho = (n - p.phi**2) / s
    return p.tau / s ** (n - 1) + (p.t / s) ** (n - 1) * p.w * (lap_rho / p.phi + (1 - n) * p.phi / s)


def derivative_identity_residual(cfg: TwoSheetConfig, s: float, spec: DiffSpec | None = None) -> float:
    """``|I'(s) - identity_rhs(s)|`` with ``I'`` from Richardson differences."""
    _check_range(cfg, s)
    spec = _diff_spec(cfg, s, spec)
    lhs = derivative(lambda x: sample(cfg, x).I, s, spec).value
    return abs(lhs - identity_rhs(cfg, s))


def _annulus_area(cfg, R, s):
    """Area of the base sheet between the spheres of radius ``R`` and ``s``."""
    n = cfg.n
    if cfg.kind == "planes":
        omega = _omega(n)
        return omega * (s**n - R**n) / n
    t_R, t_s = cfg.t_of_rho(R), cfg.t_of_rho(s)
    return 0.5 * (area_within_radius(n, cfg.r, t_s) - area_within_radius(n, cfg.r, t_R))


def _omega(n):
    from catlab.catenoid import sphere_volume

    return sphere_volume(n - 1)


def area_identity_terms(cfg, R, s, spec=None):
    """Both sides of ``d/ds[s^-n (|annulus(R,s)| + (R/n) ∫_gamma_R phi)] = s^-n ∫_gamma_s (1/phi - phi)``."""
    n = cfg.n
    omega = _omega(n)
    start = sample(cfg, R)
    boundary = R / n * omega * start.t ** (n - 1) * start.phi

    def normalized(x):
        return x**-n * (_annulus_area(cfg, R, x) + boundary)

    spec = _diff_spec(cfg, s, spec)
    lhs = derivative(normalized, s, spec).value
    end = sample(cfg, s)
    rhs = s**-n * omega * end.t ** (n - 1) * _defect(cfg, end.t)
    return lhs, rhs


def area_identity_residual(cfg: TwoSheetConfig, R: float, s: float, spec: DiffSpec | None = None) -> float:
    """Absolute residual of the area identity on ``[R, s]``."""
    _check_range(cfg, R, s)
    if not s > R:
        raise DomainError("need s > R")
    lhs, rhs = area_identity_terms(cfg, R, s, spec)
    return abs(lhs - rhs)


class FIntegral(NamedTuple):
    value: float
    epsilon: float
    holds: bool


def f_integral_bound(cfg: TwoSheetConfig, R: float, s_end: float, epsilon: float = 1e-2, exclusion=None) -> FIntegral:
    """``∫_R^s_end F`` together with the comparison ``< epsilon``."""
    _check_range(cfg, R, s_end)
    value = f_integral(cfg, R, s_end, exclusion)
    return FIntegral(value, epsilon, value < epsilon)


class Bound(NamedTuple):
    name: str
    value: float
    bound: float
    holds: bool


class DecreaseReport(NamedTuple):
    trace: MonotoneTrace
    I_mod_nonincreasing: bool
    tau_mod_nonincreasing: bool
    bounds: tuple

    @property
    def bounds_hold(self):
        return all(b.holds for b in self.bounds)


def modified_decrease_report(cfg: TwoSheetConfig, s_grid, R=None) -> DecreaseReport:
    """Observed signs of the modified quantities' derivatives and the terminal bounds.

    Terminal bounds checked at every grid point: ``I < 4 r log(s/r)`` and
    ``tau < 3r - r^2/(2s) + s r log(s/r)`` for ``n = 2``; ``I < 3r`` and
    ``tau < 3r^(n-1) + 9 s^n r + r^(3/2) s^(n-5/2)`` for ``n >= 3``.
    Each bound row carries the worst value/bound ratio over the grid.

    Raises:
        UnsupportedFixtureError: unless ``cfg`` is a single-neck catenoid.
        ConfigurationError: for grids with fewer than two points.
    """
    if cfg.kind != "catenoid":
        raise UnsupportedFixtureError("the decrease report needs a single-neck catenoid fixture")
    s_grid = np.asarray(s_grid, dtype=float)
    if s_grid.size < 2:
        raise ConfigurationError("the decrease report needs at least two grid points")
    tr = trace(cfg, s_grid, R)
    n, r = cfg.n, cfg.r
    s = tr.s_grid
    log_ratio = np.log(s / r)
    if n == 2:
        i_bound = 4 * r * log_ratio
        tau_bound = 3 * r - r * r / (2 * s) + s * r * log_ratio
    else:
        i_bound = np.full_like(s, 3 * r)
        tau_bound = 3 * r ** (n - 1) + 9 * s**n * r + r**1.5 * s ** (n - 2.5)

    def worst(name, values, bounds):
        k = int(np.argmax(values / bounds))
        return Bound(name, float(values[k]), float(bounds[k]), bool(np.all(values < bounds)))

    bounds = (worst("I", tr.I, i_bound), worst("tau", tr.tau, tau_bound))
    d_imod = np.diff(tr.I_mod)
    d_taumod = np.diff(tr.tau_mod)
    return DecreaseReport(tr, bool(np.all(d_imod <= 0)), bool(np.all(d_taumod <= 0)), bounds)


class SeparationBound(NamedTuple):
    sup_w: float
    local_bound: float
    global_bound: float
    holds: bool


def separation_bound(cfg: TwoSheetConfig, epsilon: float, points: int = 64) -> SeparationBound:
    """Largest separation over ``gamma_s`` for ``s <= epsilon`` against the headline constants.

    ``local_bound`` is ``(15/2) r log(epsilon/r)`` for ``n = 2`` and ``(9/2) r``
    for ``n >= 3``; ``global_bound`` is ``8 r |log r|`` and ``5 r`` respectively.
    """
    if cfg.kind != "catenoid":
        raise UnsupportedFixtureError("the separation bound needs a catenoid fixture")
    _check_range(cfg, epsilon)
    n, r = cfg.n, cfg.r
    grid = np.geomspace(cfg.rho[0], epsilon, points)
    sup_w = max(cfg.local(cfg.t_of_rho(s)).w for s in grid)
    sup_w = max(sup_w, float(np.max(cfg.w[cfg.rho <= epsilon], initial=0.0)))
    if n == 2:
        local, glob = 7.5 * r * math.log(epsilon / r), 8 * r * abs(math.log(r))
    else:
        local, glob = 4.5 * r, 5 * r
    return SeparationBound(sup_w, local, glob, sup_w < local and sup_w < glob)
