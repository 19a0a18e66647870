"""The ellipsoid-like family ``M_a`` as hypersurfaces of revolution.

``M_a`` is the rotation in flat (n+2)-space of the profile

    rho(t) = (1 - (t/a)^(2n))^(1/2),    -a < t < a,

about the ``t`` axis. Its leaves ``S_t`` are round n-spheres of radius
``rho(t)``; the equator ``S_0`` is a unit sphere. Because ``rho`` is flat to
order ``2n`` at ``t = 0`` the equator is minimal with degenerate stability.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from catlab.catenoid import check_dimension, sphere_volume
from catlab.errors import BoundViolation, DomainError
from catlab.numerics import QuadratureSpec, integrate

_QUAD = QuadratureSpec(abs_tol=1e-14, rel_tol=1e-12)


def _check(n, a, t=None):
    n = check_dimension(n)
    if not a >= 1.0:
        raise DomainError(f"family parameter a must be >= 1, got {a!r}")
    if t is not None and not abs(t) < a:
        raise DomainError(f"leaf height |t| must be below a={a!r}, got {t!r}")
    return n


def profile(n, a, t):
    """``rho(t)`` and its first two derivatives."""
    y = t / a
    x = y ** (2 * n)
    rho = math.sqrt(1.0 - x)
    d1 = -(n / a) * y ** (2 * n - 1) / rho
    d2 = -(n * (2 * n - 1) / a**2) * y ** (2 * n - 2) / rho - (n**2 / a**2) * y ** (4 * n - 2) / rho**3
    return rho, d1, d2


def principal_curvatures(n: int, a: float, t: float):
    """``(kappa_meridian, kappa_sphere)``; the sphere curvature has multiplicity n."""
    n = _check(n, a, t)
    rho, d1, d2 = profile(n, a, t)
    stretch = 1.0 + d1 * d1
    return -d2 / stretch**1.5, 1.0 / (rho * math.sqrt(stretch))


def ricci_eigenvalues(n, a, t):
    """Ricci eigenvalues along the meridian and along the leaf, via the Gauss equation."""
    kappa_mer, kappa_sph = principal_curvatures(n, a, t)
    mean = kappa_mer + n * kappa_sph
    return kappa_mer * (mean - kappa_mer), kappa_sph * (mean - kappa_sph)


def ricci_min_eigenvalue(n: int, a: float, t: float) -> float:
    """Smallest Ricci eigenvalue of ``M_a`` at height ``t``; asserts ``>= -1e-9``."""
    value = min(ricci_eigenvalues(n, a, t))
    if value < -1e-9:
        raise BoundViolation(f"negative Ricci curvature {value!r} at t={t!r}", value, -1e-9)
    return value


def leaf_area(n: int, a: float, t: float) -> float:
    """Area ``Omega_n rho(t)^n`` of the leaf ``S_t``."""
    n = _check(n, a, t)
    x = (abs(t) / a) ** (2 * n)
    return sphere_volume(n) * math.exp(0.5 * n * math.log1p(-x))


def leaf_deficit(n, a, t) -> float:
    """``Omega_n - leaf_area``, computed without cancellation."""
    n = _check(n, a, t)
    x = (abs(t) / a) ** (2 * n)
    return -sphere_volume(n) * math.expm1(0.5 * n * math.log1p(-x))


class LeafAreaReport(NamedTuple):
    area: float
    displayed: float
    displayed_lower_bound: float
    displayed_lower_bound_holds: bool
    deficit: float
    deficit_bound: float


def leaf_area_report(n, a, t) -> LeafAreaReport:
    """Exact leaf area next to the quadratic-in-``rho`` expression it is often quoted as.

    ``displayed`` is ``Omega_n (1 - (t/a)^(2n))``, which equals the area only
    for ``n = 2`` and exceeds it otherwise; ``displayed_lower_bound`` is
    ``Omega_n (1 - |t|^(2n))``. The deficit obeys Bernoulli's inequality
    ``Omega_n - area <= (n/2) Omega_n (t/a)^(2n)``, reported as ``deficit_bound``.
    """
    n = _check(n, a, t)
    omega = sphere_volume(n)
    x = (abs(t) / a) ** (2 * n)
    area = leaf_area(n, a, t)
    lower = omega * (1.0 - abs(t) ** (2 * n))
    deficit = leaf_deficit(n, a, t)
    bound = 0.5 * n * omega * x
    if deficit > bound * (1.0 + 1e-12):
        raise BoundViolation("leaf deficit exceeds (n/2) Omega_n (t/a)^(2n)", deficit, bound)
    return LeafAreaReport(area, omega * (1.0 - x), lower, area >= lower, deficit, bound)


def _arc_density(n, a):
    def density(tau):
        y = np.asarray(tau, dtype=float) / a
        one_minus = -np.expm1(2 * n * np.log(np.where(y > 0, y, 1e-300)))
        slope_sq = (n / a) ** 2 * y ** (4 * n - 2) / one_minus
        return np.sqrt(1.0 + slope_sq)

    return density


def meridian_distance(n: int, a: float, t: float) -> float:
    """Length of the meridian from the equator to ``S_t``; asserts ``|t| <= d <= 2|t|``."""
    n = _check(n, a, t)
    t = abs(t)
    if t == 0.0:
        return 0.0
    d = integrate(_arc_density(n, a), 0.0, t, _QUAD)
    if not (t * (1.0 - 1e-12) <= d <= 2.0 * t):
        raise BoundViolation(f"meridian distance {d!r} outside [|t|, 2|t|]", d, 2.0 * t)
    return d


def meridian_half_length(n: int, a: float) -> float:
    """Meridian length from the equator to the pole, via ``tau = a - u^2`` at the pole."""
    n = _check(n, a)
    density = _arc_density(n, a)
    spec = QuadratureSpec(abs_tol=1e-13, rel_tol=1e-12, singular_left=True)
    return integrate(lambda v: density(a - np.asarray(v)), 0.0, a, spec)


def leaf_mean_curvature(n: int, a: float, t: float) -> float:
    """Mean curvature of ``S_t`` in ``M_a`` along the normal toward increasing ``t``.

    Equals ``-d/dsigma log(rho^n)`` for unit-speed meridian arclength ``sigma``,
    so a positive value means the mean curvature vector points toward larger ``t``.
    """
    n = _check(n, a, t)
    rho, d1, _ = profile(n, a, t)
    return -n * (d1 / math.sqrt(1.0 + d1 * d1)) / rho


def leaf_mean_curvature_sign(n: int, a: float, t: float) -> int:
    """Sign of :func:`leaf_mean_curvature`: 0 on the equator, ``sign(t)`` elsewhere."""
    return int(np.sign(leaf_mean_curvature(n, a, t)))


def equator_degeneracy(n: int, a: float) -> float:
    """``|A|^2 + Ric(nu, nu)`` for the equator: its Jacobi potential on constants."""
    n = _check(n, a)
    rho, d1, _ = profile(n, a, 0.0)
    slope = d1 / math.sqrt(1.0 + d1 * d1)
    second_form_sq = n * (slope / rho) ** 2
    ric_normal = ricci_eigenvalues(n, a, 0.0)[0]
    value = second_form_sq + ric_normal
    if abs(value) > 1e-9:
        raise BoundViolation(f"equator is not degenerate: {value!r}", value, 0.0)
    return value


@dataclass(frozen=True)
class LeafGeometry:
    t: float
    area: float
    mean_curvature_sign: int
    meridian_distance_from_equator: float


@dataclass(frozen=True)
class RevolutionSurface:
    """The member ``M_a`` of the family in dimension ``n``."""

    n: int
    a: float

    def __post_init__(self):
        _check(self.n, self.a)

    def rho(self, t):
        return profile(self.n, self.a, t)[0]

    def leaf(self, t) -> LeafGeometry:
        return LeafGeometry(
            t,
            leaf_area(self.n, self.a, t),
            leaf_mean_curvature_sign(self.n, self.a, t),
            meridian_distance(self.n, self.a, t),
        )

    def grid(self, points=50, fraction=0.99):
        """Symmetric grid on ``[-fraction a, fraction a]``."""
        return np.linspace(-fraction * self.a, fraction * self.a, points)

    def table(self, ts):
        """Rows ``(t, rho, area, kappa_mer, kappa_sph, ric_min, dist)``."""
        rows = []
        for t in ts:
            t = float(t)
            k_mer, k_sph = principal_curvatures(self.n, self.a, t)
            rows.append((
                t,
                self.rho(t),
                leaf_area(self.n, self.a, t),
                k_mer,
                k_sph,
                ricci_min_eigenvalue(self.n, self.a, t),
                meridian_distance(self.n, self.a, t),
            ))
        return rows
