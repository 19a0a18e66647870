"""Shared numerical kernels.

Adaptive Gauss-Kronrod quadrature (with an optional square-root substitution
for inverse-square-root endpoint singularities), improper integrals on a
half line, Brent root bracketing, a fixed-step RK4 comparison check and
Richardson-extrapolated central differences.

Integrands are called with numpy arrays of nodes when they support it and
fall back to scalar calls otherwise.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, NamedTuple

import numpy as np

from catlab.errors import (
    AccuracyError,
    BracketError,
    DivergenceError,
    DomainError,
    IntegrationError,
    PreconditionError,
)

__all__ = [
    "QuadratureSpec",
    "DiffSpec",
    "QuadratureResult",
    "Derivative",
    "integrate",
    "integrate_improper",
    "solve_scalar",
    "gronwall_bound",
    "ode_bound_check",
    "rk4_trajectory",
    "derivative",
    "gauss_legendre",
]

_EPS = np.finfo(float).eps

# 15-point Kronrod extension of the 7-point Gauss rule (QUADPACK qk15).
_XGK = np.array([
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
])
_WGK = np.array([
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
])
_WG = np.array([
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
])

# Nodes ordered left to right on [-1, 1].
_NODES = np.concatenate([-_XGK[:7], [0.0], _XGK[6::-1]])
_KRONROD_W = np.concatenate([_WGK[:7], [_WGK[7]], _WGK[6::-1]])
_GAUSS_W = np.zeros(15)
_GAUSS_W[[1, 3, 5]] = _WG[:3]
_GAUSS_W[7] = _WG[3]
_GAUSS_W[[9, 11, 13]] = _WG[2::-1]


@dataclass(frozen=True)
class QuadratureSpec:
    """Tolerances for :func:`integrate`.

    ``singular_left`` declares an integrand behaving like ``(s - a)**-0.5``
    at the left endpoint; the substitution ``s = a + u**2`` is then applied
    before refinement, which removes the singularity.
    """

    abs_tol: float = 1e-13
    rel_tol: float = 1e-12
    max_depth: int = 60
    singular_left: bool = False

    def __post_init__(self):
        if not (self.abs_tol > 0 and self.rel_tol > 0):
            raise DomainError("abs_tol and rel_tol must be positive")
        if self.max_depth < 4:
            raise DomainError("max_depth must be at least 4")

    def smooth(self) -> "QuadratureSpec":
        return QuadratureSpec(self.abs_tol, self.rel_tol, self.max_depth, False)


@dataclass(frozen=True)
class DiffSpec:
    """Central-difference step and number of Richardson levels.

    ``richardson_levels=1`` is the plain second-order central difference.
    """

    base_step: float = 1e-2
    richardson_levels: int = 4

    def __post_init__(self):
        if not self.base_step > 0:
            raise DomainError("base_step must be positive")
        if self.richardson_levels < 1:
            raise DomainError("richardson_levels must be >= 1")


class QuadratureResult(NamedTuple):
    value: float
    error: float
    intervals: int


class Derivative(NamedTuple):
    value: float
    error: float


def _evaluate(f, x):
    try:
        y = np.asarray(f(x), dtype=float)
    except (TypeError, ValueError):
        return np.array([float(f(float(xi))) for xi in x])
    if y.shape != x.shape:
        if y.size == 1:
            return np.full(x.shape, float(y.reshape(-1)[0]))
        return np.array([float(f(float(xi))) for xi in x])
    return y


def _gk15(f, lo, hi):
    centr = 0.5 * (lo + hi)
    hlgth = 0.5 * (hi - lo)
    fv = _evaluate(f, centr + hlgth * _NODES)
    if not np.all(np.isfinite(fv)):
        raise AccuracyError(
            f"integrand is not finite on [{lo!r}, {hi!r}]", float("nan"), float("inf")
        )
    resk = float(_KRONROD_W @ fv)
    resg = float(_GAUSS_W @ fv)
    resabs = float(_KRONROD_W @ np.abs(fv)) * abs(hlgth)
    resasc = float(_KRONROD_W @ np.abs(fv - 0.5 * resk)) * abs(hlgth)
    result = resk * hlgth
    err = abs((resk - resg) * hlgth)
    if resasc != 0.0 and err != 0.0:
        err = resasc * min(1.0, (200.0 * err / resasc) ** 1.5)
    if resabs > np.finfo(float).tiny / (50 * _EPS):
        err = max(50 * _EPS * resabs, err)
    return result, err


def integrate(
    f: Callable,
    a: float,
    b: float,
    spec: QuadratureSpec | None = None,
    *,
    full_output: bool = False,
):
    """Integrate ``f`` over ``[a, b]`` with globally adaptive GK15 bisection.

    Args:
        f: integrand; receives an array of nodes if it accepts one.
        a, b: finite limits with ``a <= b``.
        spec: tolerances; the target is ``abs_tol + rel_tol * |I|``.
        full_output: return a :class:`QuadratureResult` instead of a float.

    Raises:
        DomainError: if ``b < a`` or a limit is not finite.
        AccuracyError: if an interval reaches ``max_depth`` before the
            tolerance is met. The exception carries the best estimate.
    """
    spec = spec or QuadratureSpec()
    if not (math.isfinite(a) and math.isfinite(b)):
        raise DomainError("integrate needs finite limits; use integrate_improper")
    if b < a:
        raise DomainError(f"need a <= b, got a={a!r}, b={b!r}")
    if a == b:
        return QuadratureResult(0.0, 0.0, 0) if full_output else 0.0

    if spec.singular_left:
        g = lambda u: 2.0 * u * _evaluate(f, a + u * u)
        lo, hi = 0.0, math.sqrt(b - a)
    else:
        g, lo, hi = f, a, b

    value, err = _gk15(g, lo, hi)
    heap = [(-err, lo, hi, value, err, 0)]
    total, total_err = value, err
    while total_err > spec.abs_tol + spec.rel_tol * abs(total):
        _, lo_i, hi_i, v_i, e_i, depth = heapq.heappop(heap)
        if depth >= spec.max_depth:
            raise AccuracyError(
                f"quadrature on [{a!r}, {b!r}] did not converge within "
                f"max_depth={spec.max_depth} (error estimate {total_err:.3g})",
                total,
                total_err,
            )
        mid = 0.5 * (lo_i + hi_i)
        v1, e1 = _gk15(g, lo_i, mid)
        v2, e2 = _gk15(g, mid, hi_i)
        total += v1 + v2 - v_i
        total_err += e1 + e2 - e_i
        heapq.heappush(heap, (-e1, lo_i, mid, v1, e1, depth + 1))
        heapq.heappush(heap, (-e2, mid, hi_i, v2, e2, depth + 1))
    # re-sum to shed the drift of incremental updates
    total = math.fsum(item[3] for item in heap)
    total_err = math.fsum(item[4] for item in heap)
    if full_output:
        return QuadratureResult(total, total_err, len(heap))
    return total


def integrate_improper(
    f: Callable,
    a: float,
    spec: QuadratureSpec | None = None,
    *,
    full_output: bool = False,
    divergence_order: float = 1.05,
):
    """Integrate ``f`` over ``[a, inf)``.

    The range is split at ``cut = max(2a, 10)``; ``[cut, inf)`` is mapped to
    ``(0, 1]`` by ``s = cut / u``. Before the mapped tail is integrated, the
    decay is probed on dyadic shells ``[cut 2^k, cut 2^(k+1)]``: shell
    integrals of an ``s**-p`` tail shrink by ``2**(1-p)``, so an observed
    order ``p <= divergence_order`` is reported as divergence.

    Raises:
        DivergenceError: if the tail does not decay fast enough.
        AccuracyError: as for :func:`integrate`.
    """
    spec = spec or QuadratureSpec()
    cut = max(2.0 * a, 10.0)
    head = integrate(f, a, cut, spec, full_output=True)
    smooth = spec.smooth()

    shells = [
        integrate(f, cut * 2.0**k, cut * 2.0 ** (k + 1), smooth) for k in range(6)
    ]
    if any(s != 0.0 for s in shells[-2:]):
        older, newer = abs(shells[-2]), abs(shells[-1])
        if older == 0.0 or newer >= older * 2.0 ** (1.0 - divergence_order):
            order = 1.0 - math.log2(newer / older) if older > 0 and newer > 0 else 0.0
            raise DivergenceError(
                f"tail of the integral from {a!r} to infinity does not decay "
                f"(observed order {order:.3f} <= {divergence_order})"
            )

    def mapped(u):
        u = np.asarray(u, dtype=float)
        return _evaluate(f, cut / u) * cut / (u * u)

    tail = integrate(mapped, 0.0, 1.0, smooth, full_output=True)
    value = head.value + tail.value
    if full_output:
        return QuadratureResult(value, head.error + tail.error, head.intervals + tail.intervals)
    return value


def solve_scalar(
    f: Callable[[float], float],
    lo: float,
    hi: float,
    tol: float = 1e-13,
    max_iter: int = 200,
) -> float:
    """Find a root of ``f`` in ``[lo, hi]`` by Brent's method.

    Inverse quadratic / secant steps are accepted only while they stay inside
    the current bracket and shrink it fast enough; otherwise bisection is used.
    The returned point lies in a final bracket of width below
    ``tol + 4 eps |x|``.

    Raises:
        BracketError: if ``f(lo)`` and ``f(hi)`` have the same strict sign.
    """
    a, b = float(lo), float(hi)
    fa, fb = float(f(a)), float(f(b))
    if not (math.isfinite(fa) and math.isfinite(fb)):
        raise BracketError(f"f is not finite at the bracket ends ({fa!r}, {fb!r})")
    if fa == 0.0:
        return a
    if fb == 0.0:
        return b
    if (fa > 0) == (fb > 0):
        raise BracketError(
            f"no sign change on [{lo!r}, {hi!r}]: f(lo)={fa!r}, f(hi)={fb!r}"
        )
    c, fc = a, fa
    d = e = b - a
    for _ in range(max_iter):
        if (fb > 0) == (fc > 0):
            c, fc = a, fa
            d = e = b - a
        if abs(fc) < abs(fb):
            a, b, c = b, c, b
            fa, fb, fc = fb, fc, fb
        tol1 = 2.0 * _EPS * abs(b) + 0.5 * tol
        m = 0.5 * (c - b)
        if abs(m) <= tol1 or fb == 0.0:
            return b
        if abs(e) >= tol1 and abs(fa) > abs(fb):
            s = fb / fa
            if a == c:
                p = 2.0 * m * s
                q = 1.0 - s
            else:
                q = fa / fc
                r = fb / fc
                p = s * (2.0 * m * q * (q - r) - (b - a) * (r - 1.0))
                q = (q - 1.0) * (r - 1.0) * (s - 1.0)
            if p > 0:
                q = -q
            else:
                p = -p
            if 2.0 * p < min(3.0 * m * q - abs(tol1 * q), abs(e * q)):
                e, d = d, p / q
            else:
                d = e = m
        else:
            d = e = m
        a, fa = b, fb
        b += d if abs(d) > tol1 else math.copysign(tol1, m)
        fb = float(f(b))
    raise BracketError(f"Brent iteration did not converge in {max_iter} steps")


def gronwall_bound(a: float, b: float, f0: float, t: float) -> float:
    """``e^{bt} f0 + (a/b)(e^{bt} - 1)``, continuous through ``b = 0``."""
    bt = b * t
    growth = math.expm1(bt) / bt if bt != 0.0 else 1.0
    return f0 * math.exp(bt) + a * t * growth


def rk4_trajectory(rhs, f0: float, T: float, steps: int):
    """Classical RK4 for ``f' = rhs(t, f)`` on a uniform grid of ``steps``."""
    if steps < 1:
        raise IntegrationError("need at least one step")
    h = T / steps
    if T > 0 and (h <= 0.0 or h + 0.0 == 0.0 or T + h == T):
        raise IntegrationError(f"step size {h!r} underflows for T={T!r}")
    ts = np.linspace(0.0, T, steps + 1)
    fs = np.empty(steps + 1)
    fs[0] = f = float(f0)
    for i in range(steps):
        t = ts[i]
        k1 = rhs(t, f)
        k2 = rhs(t + 0.5 * h, f + 0.5 * h * k1)
        k3 = rhs(t + 0.5 * h, f + 0.5 * h * k2)
        k4 = rhs(t + h, f + h * k3)
        f = f + h * (k1 + 2.0 * k2 + 2.0 * k3 + k4) / 6.0
        if not math.isfinite(f):
            raise IntegrationError(f"state became non-finite at t={ts[i + 1]!r}")
        fs[i + 1] = f
    return ts, fs


def ode_bound_check(
    a: float,
    b: float,
    f0: float,
    T: float,
    rhs: Callable[[float, float], float],
    *,
    steps: int = 2000,
    tol: float = 1e-9,
) -> bool:
    """Integrate ``f' = rhs(t, f)`` and test the linear differential inequality bound.

    Whenever ``rhs(t, f) <= a + b f`` and ``f >= 0``, the solution satisfies
    ``f(t) <= e^{bt} f(0) + (a/b)(e^{bt} - 1)``. The bound is compared at
    every RK4 node with relative slack ``tol``.

    Raises:
        PreconditionError: if ``f0 < 0`` or ``rhs`` exceeds ``a + b f`` on the
            computed trajectory.
        IntegrationError: on step-size underflow or a non-finite state.
    """
    if f0 < 0:
        raise PreconditionError("f0 must be non-negative")
    ts, fs = rk4_trajectory(rhs, f0, T, steps)
    verdict = True
    for t, f in zip(ts, fs):
        comparison = a + b * f
        if rhs(t, f) > comparison + tol * (1.0 + abs(comparison)):
            raise PreconditionError(
                f"rhs({t!r}, {f!r}) exceeds a + b f = {comparison!r}"
            )
        bound = gronwall_bound(a, b, f0, t)
        if f > bound + tol * (1.0 + abs(bound)):
            verdict = False
    return verdict


def derivative(f: Callable[[float], float], x: float, spec: DiffSpec | None = None) -> Derivative:
    """Central difference at ``x`` refined by Richardson extrapolation.

    Steps are ``base_step / 2**k`` for ``k < richardson_levels``; each level
    removes the next even power of the step. The error estimate is the
    change produced by the last extrapolation level (or by one step halving
    when only one level is requested).
    """
    spec = spec or DiffSpec()
    levels = spec.richardson_levels
    h = spec.base_step

    def central(step):
        return (f(x + step) - f(x - step)) / (2.0 * step)

    table = [[central(h / 2.0**i)] for i in range(levels)]
    for i in range(1, levels):
        for j in range(1, i + 1):
            factor = 4.0**j
            table[i].append((factor * table[i][j - 1] - table[i - 1][j - 1]) / (factor - 1.0))
    value = table[-1][-1]
    if levels >= 2:
        error = abs(table[-1][-1] - table[-1][-2])
    else:
        error = abs(central(h / 2.0) - value) * 4.0 / 3.0
    return Derivative(float(value), float(error))


@lru_cache(maxsize=None)
def gauss_legendre(points: int):
    """Gauss-Legendre nodes and weights on ``[-1, 1]`` (cached)."""
    x, w = np.polynomial.legendre.leggauss(points)
    x.setflags(write=False)
    w.setflags(write=False)
    return x, w
