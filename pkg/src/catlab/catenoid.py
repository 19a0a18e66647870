"""Geometry of the n-dimensional catenoid in flat (n+1)-space.

The catenoid of neck radius ``r`` is the rotation of the profile
``h(t) = r H(t / r)`` about the height axis, where

    H(t) = int_1^t ds / sqrt(s^(2(n-1)) - 1),     t >= 1,

is the standard (``r = 1``) profile and ``t`` is the cylindrical radius.
Both sheets ``+h`` and ``-h`` meet at the neck ``t = r``.

Profile primitives are tabulated once per dimension on panels (uniform in
``u = sqrt(t - 1)`` near the neck, geometric in ``t`` beyond ``t = 2``) and
evaluated with a fixed Gauss-Legendre rule inside each panel, so ``height``
is cheap and accepts numpy arrays.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import NamedTuple

import numpy as np

from catlab.errors import BoundViolation, DivergenceError, DomainError, GeometryError
from catlab.numerics import QuadratureSpec, gauss_legendre, integrate_improper, solve_scalar

N_MIN, N_MAX = 2, 6
NECK_HEIGHT_BUDGET = 2.7

_GL_POINTS = 16
_U_PANELS = 32
_LOG_RATIO = math.log(1.05)
_TABLE_TOP = 1e16


def sphere_volume(m: int) -> float:
    """Volume of the unit m-sphere, ``2 pi^((m+1)/2) / Gamma((m+1)/2)``."""
    return 2.0 * math.pi ** ((m + 1) / 2.0) / math.gamma((m + 1) / 2.0)


def check_dimension(n, low=N_MIN, high=N_MAX):
    if isinstance(n, bool) or int(n) != n or not low <= n <= high:
        raise DomainError(f"dimension n must be an integer in [{low}, {high}], got {n!r}")
    return int(n)


# --- stable building blocks in the standard scaling -----------------------
#
# With p = s^-(n-1) and c = sqrt(1 - p^2):
#   H'(s)               = p / c
#   s^(n-1) (m - 1)     = p / (c (1 + c)),   m = area stretch factor
# where 1 - p^2 is evaluated with expm1 so that c stays accurate at the neck.


def _p_c(n, s):
    k = 2.0 * (n - 1)
    log_s = np.log(s)
    p = np.exp(-(n - 1) * log_s)
    c = np.sqrt(-np.expm1(-k * log_s))
    return p, c


def _c_over_u(n, u):
    """``c(1 + u^2) / u`` with its limit ``sqrt(2(n-1))`` at ``u = 0``."""
    k = 2.0 * (n - 1)
    u = np.asarray(u, dtype=float)
    safe = np.where(u > 0, u, 1.0)
    ratio = np.sqrt(-np.expm1(-k * np.log1p(safe * safe))) / safe
    return np.where(u > 0, ratio, math.sqrt(k))


def height_integrand(n, s):
    """``1 / sqrt(s^(2(n-1)) - 1)`` for ``s > 1``."""
    p, c = _p_c(n, np.asarray(s, dtype=float))
    return p / c


def height_integrand_second(n, s):
    """Derivative of :func:`height_integrand` in ``s``."""
    s = np.asarray(s, dtype=float)
    p, c = _p_c(n, s)
    # d/ds (q^2 - 1)^(-1/2) = -q q' / (q^2 - 1)^(3/2), rewritten in p and c
    return -(n - 1) * p / (s * c**3)


def excess_integrand(n, s):
    """``s^(n-1) (sqrt(1 + H'^2) - 1)``, the area density above the disk."""
    p, c = _p_c(n, np.asarray(s, dtype=float))
    return p / (c * (1.0 + c))


def _height_u(n, u):
    # ds / sqrt(s^(2(n-1)) - 1) with s = 1 + u^2
    s = 1.0 + u * u
    return 2.0 * np.exp(-(n - 1) * np.log(s)) / _c_over_u(n, u)


def _excess_u(n, u):
    s = 1.0 + u * u
    p = np.exp(-(n - 1) * np.log(s))
    c_u = _c_over_u(n, u)
    return 2.0 * p / (c_u * (1.0 + u * c_u))


class _Primitive:
    """Tabulated ``int_1^s g`` for one integrand of the standard catenoid.

    Beyond the table top the integrand is replaced by its leading term
    ``coef * s^-(n-1)``; the neglected remainder is below ``1e-40``.
    """

    def __init__(self, n, near, far, coef):
        self.n = n
        self._near = near
        self._far = far
        self._coef = coef
        self._u_knots = np.linspace(0.0, 1.0, _U_PANELS + 1)
        top = math.log(_TABLE_TOP)
        count = int(math.ceil((top - math.log(2.0)) / _LOG_RATIO))
        self._x_knots = math.log(2.0) + _LOG_RATIO * np.arange(count + 1)
        self._top = float(np.exp(self._x_knots[-1]))
        near_pieces = self._panel_sums(self._near_x, self._u_knots[:-1], self._u_knots[1:])
        far_pieces = self._panel_sums(self._far_x, self._x_knots[:-1], self._x_knots[1:])
        self._u_cum = np.concatenate([[0.0], np.cumsum(near_pieces)])
        self._x_cum = self._u_cum[-1] + np.concatenate([[0.0], np.cumsum(far_pieces)])

    def _near_x(self, u):
        return self._near(self.n, u)

    def _far_x(self, x):
        s = np.exp(x)
        return s * self._far(self.n, s)

    @staticmethod
    def _panel_sums(g, lo, hi):
        nodes, weights = gauss_legendre(_GL_POINTS)
        lo = np.asarray(lo, dtype=float)[:, None]
        hi = np.asarray(hi, dtype=float)[:, None]
        half = 0.5 * (hi - lo)
        values = g(lo + half * (nodes + 1.0))
        return (half[:, 0]) * (values @ weights)

    def __call__(self, s):
        s = np.atleast_1d(np.asarray(s, dtype=float))
        out = np.empty_like(s)
        near = s <= 2.0
        mid = (s > 2.0) & (s <= self._top)
        far = s > self._top
        if near.any():
            u = np.sqrt(np.maximum(s[near] - 1.0, 0.0))
            k = np.minimum((u * _U_PANELS).astype(int), _U_PANELS - 1)
            out[near] = self._u_cum[k] + self._panel_sums(self._near_x, self._u_knots[k], u)
        if mid.any():
            x = np.log(s[mid])
            k = np.clip(((x - self._x_knots[0]) / _LOG_RATIO).astype(int), 0, len(self._x_knots) - 2)
            out[mid] = self._x_cum[k] + self._panel_sums(self._far_x, self._x_knots[k], x)
        if far.any():
            top, n = self._top, self.n
            if n == 2:
                extra = np.log(s[far] / top)
            else:
                extra = (top ** (2 - n) - s[far] ** (2 - n)) / (n - 2)
            out[far] = self._x_cum[-1] + self._coef * extra
        return out


@lru_cache(maxsize=None)
def _height_primitive(n):
    return _Primitive(n, _height_u, height_integrand, 1.0)


@lru_cache(maxsize=None)
def _excess_primitive(n):
    return _Primitive(n, _excess_u, excess_integrand, 0.5)


def _scalar_or_array(value, like):
    return float(value[0]) if np.ndim(like) == 0 else value.reshape(np.shape(like))


def standard_height(n, t):
    """``H(t)`` for the standard catenoid; ``t >= 1`` (scalar or array)."""
    check_dimension(n)
    arr = np.asarray(t, dtype=float)
    if np.any(arr < 1.0) or np.any(~np.isfinite(arr)):
        raise DomainError("cylindrical radius must satisfy t >= r")
    return _scalar_or_array(_height_primitive(n)(arr), t)


def height(n: int, r: float, t):
    """Height ``r H(t / r)`` of the upper sheet above the neck plane.

    Args:
        n: hypersurface dimension, 2 to 6.
        r: neck radius.
        t: cylindrical radius (scalar or array), ``t >= r``.

    Raises:
        DomainError: if ``t < r`` or ``r <= 0``.
    """
    if not r > 0:
        raise DomainError("neck radius r must be positive")
    arr = np.asarray(t, dtype=float)
    if np.any(arr < r):
        raise DomainError(f"t must be at least r={r!r}")
    return r * standard_height(n, np.maximum(arr / r, 1.0))


def height_slope(n, r, t):
    """``dh/dt`` on the upper sheet (infinite at the neck)."""
    arr = np.asarray(t, dtype=float)
    if np.any(arr < r):
        raise DomainError(f"t must be at least r={r!r}")
    with np.errstate(divide="ignore"):
        return height_integrand(check_dimension(n), arr / r)


@lru_cache(maxsize=None)
def height_sup(n: int) -> float:
    """``int_1^inf ds / sqrt(s^(2(n-1)) - 1)``, the total height of one sheet.

    Also asserts the neck-height budget ``2 * height_sup(n) < 2.7``.

    Raises:
        DivergenceError: for ``n = 2``, where the height grows like ``log t``.
        BoundViolation: if the budget fails.
    """
    n = check_dimension(n)
    if n == 2:
        raise DivergenceError("the n=2 catenoid height grows like log t")
    value = integrate_improper(
        lambda s: height_integrand(n, s), 1.0, QuadratureSpec(singular_left=True)
    )
    if not 2.0 * value < NECK_HEIGHT_BUDGET:
        raise BoundViolation(
            f"2*height_sup({n}) = {2 * value!r} exceeds {NECK_HEIGHT_BUDGET}", 2 * value, NECK_HEIGHT_BUDGET
        )
    return value


def principal_curvatures(n, r, t):
    """Meridian curvature and rotational curvature (multiplicity ``n - 1``).

    The two satisfy ``kappa_mer + (n - 1) kappa_rot = 0`` (minimality).
    """
    n = check_dimension(n)
    arr = np.asarray(t, dtype=float)
    if np.any(arr < r):
        raise DomainError(f"t must be at least r={r!r}")
    kappa_rot = r ** (n - 1) / arr**n
    return -(n - 1) * kappa_rot, kappa_rot


def second_fundamental_norm(n: int, r: float, t):
    """``|A|`` at cylindrical radius ``t``: ``sqrt(n(n-1)) r^(n-1) / t^n``."""
    kappa_mer, kappa_rot = principal_curvatures(n, r, t)
    return np.sqrt(kappa_mer**2 + (n - 1) * kappa_rot**2)


@dataclass(frozen=True)
class BallSlice:
    """Where the catenoid meets the sphere of radius ``R`` about the neck center."""

    n: int
    r: float
    R: float
    t: float
    h: float


def ball_slice(n: int, r: float, R: float) -> BallSlice:
    """Solve ``t^2 + h(t)^2 = R^2`` for the cylindrical radius ``t`` in ``[r, R]``."""
    n = check_dimension(n)
    if not r > 0:
        raise DomainError("neck radius r must be positive")
    if R < r:
        raise DomainError(f"ball radius R={R!r} is smaller than the neck radius r={r!r}")
    rho = R / r
    if rho == 1.0:
        return BallSlice(n, r, R, r, 0.0)
    prim = _height_primitive(n)

    def gap(sigma):
        return sigma * sigma + float(prim(sigma)[0]) ** 2 - rho * rho

    sigma = solve_scalar(gap, 1.0, rho, tol=1e-15 * rho)
    return BallSlice(n, r, R, r * sigma, r * float(prim(sigma)[0]))


def t_of_R(n, r, R) -> float:
    return ball_slice(n, r, R).t


def disk_area(n: int, t: float) -> float:
    """Area ``Omega_(n-1) t^n / n`` of the flat n-disk of radius ``t``."""
    if not t > 0:
        raise DomainError("disk radius must be positive")
    return sphere_volume(n - 1) / n * t**n


def _excess_primitive_value(n, sigma):
    return float(_excess_primitive(n)(sigma)[0])


def area_within_radius(n, r, t) -> float:
    """Area of both sheets inside the cylinder of radius ``t``."""
    n = check_dimension(n)
    if t < r:
        raise DomainError("t must be at least r")
    sigma = t / r
    omega = sphere_volume(n - 1)
    # int_1^sigma s^(n-1) m ds = int s^(n-1) (m - 1) ds + (sigma^n - 1) / n
    inner = _excess_primitive_value(n, sigma) + math.expm1(n * math.log(sigma)) / n
    return 2.0 * omega * r**n * inner


def area_in_ball(n: int, r: float, R: float) -> float:
    """Area of both catenoid sheets inside the ball of radius ``R``.

    Raises:
        DomainError: if ``R < r``.
    """
    return area_within_radius(n, r, ball_slice(n, r, R).t)


def standard_excess(n, t) -> float:
    """Area of the standard catenoid within cylindrical radius ``t`` minus two disks."""
    omega = sphere_volume(n - 1)
    return 2.0 * omega * (_excess_primitive_value(n, t) - 1.0 / n)


def excess_tail(n, t) -> float:
    """``2 Omega_(n-1) int_t^inf s^(n-1) (sqrt(1 + H'^2) - 1) ds`` for ``n >= 3``."""
    tail = integrate_improper(lambda s: excess_integrand(n, s), t)
    return 2.0 * sphere_volume(n - 1) * tail


class ExcessLimit(NamedTuple):
    value: float
    R: float
    window: float
    tail: float


@lru_cache(maxsize=None)
def excess_limit(n: int, tol: float = 1e-6) -> ExcessLimit:
    """Excess constant with its convergence diagnostics.

    ``R`` starts at 10 and doubles until three successive doublings change the
    excess by less than ``tol`` and the remaining tail ``int_t^inf`` is below
    ``tol``. The returned value adds that tail to the last excess.
    """
    n = check_dimension(n)
    if n == 2:
        raise DivergenceError("the n=2 excess grows like 2*pi*log R")
    R = 10.0
    values = [standard_excess(n, ball_slice(n, 1.0, R).t)]
    while True:
        R *= 2.0
        t = ball_slice(n, 1.0, R).t
        values.append(standard_excess(n, t))
        if len(values) >= 4:
            window = max(abs(values[-k] - values[-k - 1]) for k in (1, 2, 3))
            if window < tol:
                tail = excess_tail(n, t)
                if tail < tol:
                    return ExcessLimit(values[-1] + tail, R, window, tail)
        if R > 1e30:
            raise DivergenceError(f"excess for n={n} did not settle by R={R:g}")


def excess_constant(n: int) -> float:
    """Limit of ``area_in_ball(n, 1, R) - 2 disk_area(n, t(R))`` as ``R -> inf``.

    Raises:
        DivergenceError: for ``n = 2``.
        DomainError: outside ``3 <= n <= 6``.
    """
    value = excess_limit(n).value
    if not value > 0:
        raise BoundViolation(f"excess constant for n={n} is not positive", value, 0.0)
    return value


def log_excess_n2(R: float) -> float:
    """Excess ``2 pi (h + t sqrt(t^2 - 1)) - 2 pi t^2`` of the standard 2-catenoid.

    Asserts that it exceeds ``2 pi (log R - 1)``.
    """
    if not R >= 2.0:
        raise DomainError("log_excess_n2 needs R >= 2")
    sl = ball_slice(2, 1.0, R)
    t = sl.t
    # t sqrt(t^2 - 1) - t^2 = -t / (t + sqrt(t^2 - 1))
    value = 2.0 * math.pi * (sl.h - t / (t + math.sqrt(t * t - 1.0)))
    bound = 2.0 * math.pi * (math.log(R) - 1.0)
    if not value > bound:
        raise BoundViolation(f"log excess {value!r} does not exceed {bound!r}", value, bound)
    return value


class NormalLine(NamedTuple):
    """Normal line from the upper sheet at ``t`` to the lower sheet (standard scaling).

    ``w`` is the distance between the two foot points; ``dw_dt`` its
    derivative along the base radius and ``flux`` the normalized conormal
    derivative ``t^(n-1) dw/d(arclength)``.
    """

    t: float
    t_h: float
    z_h: float
    delta: float
    w: float
    dw_dt: float
    flux: float


def normal_line(n: int, t: float, quad_points: int = 12) -> NormalLine:
    """Intersect the normal line of the upper sheet at ``(t, H(t))`` with the lower sheet.

    The line ``z = H(t) - (x - t) sqrt(q^2 - 1)``, ``q = t^(n-1)``, meets
    ``z = -H(x)`` at ``x = t + delta``. Averages of ``H'`` and ``H''`` over
    ``[t, t + delta]`` are taken by Gauss-Legendre in relative position so
    the construction stays accurate when ``delta`` is far below ``ulp(t)``.

    Raises:
        GeometryError: if the normal line does not meet the lower sheet
            (``q^2 <= 2``, too close to the neck).
    """
    n = check_dimension(n)
    q = t ** (n - 1)
    if not q * q > 2.0:
        raise GeometryError(f"normal line at t={t!r} does not reach the opposite sheet")
    big_s = math.sqrt(q * q - 1.0)
    h_t = standard_height(n, t)
    slope_t = float(height_integrand(n, t))
    nodes, weights = gauss_legendre(quad_points)
    theta = 0.5 * (nodes + 1.0)
    weights = 0.5 * np.asarray(weights)

    def mean_slope(delta):
        return float(weights @ height_integrand(n, t + theta * delta))

    def gap(x):
        delta = x * delta_hi
        return delta * mean_slope(delta) + 2.0 * h_t - delta * big_s

    delta_hi = 2.0 * h_t / (big_s - slope_t)
    # the root sits at x = 1 up to rounding once delta << ulp(t)
    hi = 1.0 + 1e-9
    if gap(hi) > 0:
        raise GeometryError(f"normal line at t={t!r} misses the opposite sheet")
    x = solve_scalar(gap, 0.0, hi, tol=1e-15)
    delta = x * delta_hi
    nodes_h = t + theta * delta
    slope_bar = float(weights @ height_integrand(n, nodes_h))
    curv = height_integrand_second(n, nodes_h)
    a1 = float(weights @ curv)
    a2 = float(weights @ (theta * curv))
    slope_h = float(height_integrand(n, t + delta))

    dq = (n - 1) * t ** (n - 2)
    g_t = slope_h + slope_t - delta * q * dq / big_s
    g_delta = slope_h - big_s
    ddelta = -g_t / g_delta
    dslope_bar = a1 + ddelta * a2
    denom = big_s - slope_bar
    w = 2.0 * h_t * q / denom
    # derivative of w = 2 H q / D with D = S - mean slope, arranged so the
    # large terms in q' cancel analytically
    dw_dt = (
        2.0 * slope_t * q / denom
        - 2.0 * h_t * dq * (1.0 + big_s * slope_bar) / (big_s * denom**2)
        + 2.0 * h_t * q * dslope_bar / denom**2
    )
    flux = dw_dt * big_s
    return NormalLine(t, t + delta, h_t - delta * big_s, delta, w, dw_dt, flux)


def two_sheet_flux(n: int, r: float, s: float) -> float:
    """Averaged conormal derivative of the sheet separation over the sphere of radius ``s``.

    Returned normalized by ``r^(n-1)``; it tends to 2 as ``s / r -> inf``.

    Raises:
        DomainError: if ``s < 2r``.
    """
    n = check_dimension(n)
    if not s >= 2.0 * r:
        raise DomainError("the two sheets are graphs only outside radius 2r")
    t = ball_slice(n, 1.0, s / r).t
    return normal_line(n, t).flux


@dataclass(frozen=True)
class CatenoidProfile:
    """Sampled profile of the catenoid of radius ``r`` on ``[r, t_max]``."""

    n: int
    r: float
    t_max: float
    samples: tuple

    @classmethod
    def build(cls, n: int, r: float = 1.0, t_max: float = 100.0, ratio: float = 1.05):
        """Sample on a geometric grid ``r, r*ratio, ...`` closed at ``t_max``."""
        n = check_dimension(n)
        if not r > 0 or t_max < r:
            raise DomainError("need r > 0 and t_max >= r")
        if not ratio > 1:
            raise DomainError("grid ratio must exceed 1")
        count = int(math.floor(math.log(t_max / r) / math.log(ratio) + 1e-12))
        ts = r * ratio ** np.arange(count + 1)
        if ts[-1] < t_max:
            ts = np.append(ts, t_max)
        hs = height(n, r, ts)
        return cls(n, r, t_max, tuple(zip(ts.tolist(), np.atleast_1d(hs).tolist())))

    @property
    def t(self):
        return np.array([p[0] for p in self.samples])

    @property
    def h(self):
        return np.array([p[1] for p in self.samples])

    def table(self):
        """Rows ``(t, h, |A|, area of both sheets within radius t)``."""
        rows = []
        for t, h in self.samples:
            a_norm = float(second_fundamental_norm(self.n, self.r, t))
            rows.append((t, h, a_norm, area_within_radius(self.n, self.r, t)))
        return rows
