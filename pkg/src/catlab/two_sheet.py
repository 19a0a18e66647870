"""Two-sheet graph configurations and the foliation identity checks.

A :class:`TwoSheetConfig` is a minimal base sheet together with the
normal-line separation ``w`` to a second sheet. Two fixtures are built in:
the exact catenoid (upper sheet as base, lower sheet as graph) and a pair of
parallel hyperplanes. All fixtures are rotationally symmetric, so fields are
functions of the base cylindrical radius ``t`` and the Laplacian reduces to
``(1/sqrt g) (sqrt g f')'``.

The foliation part uses concentric round spheres in flat space, where every
leafwise field is available in closed form through projections of ambient
derivatives.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from catlab import catenoid
from catlab.catenoid import ball_slice, check_dimension, normal_line, standard_height
from catlab.errors import ConfigurationError, DomainError, PreconditionError
from catlab.numerics import DiffSpec, derivative

DEFAULT_C = {n: 10.0**n for n in range(2, 7)}


class LocalGeometry(NamedTuple):
    """Base-sheet and separation data at one base radius ``t``."""

    t: float
    h: float
    rho: float
    stretch: float  # d(arclength)/dt along the base meridian
    w: float
    dw_dt: float
    a_norm: float
    grad_a_norm: float
    phi: float  # |grad rho| on the base sheet


@dataclass(frozen=True)
class TwoSheetConfig:
    """Base sheet sampled on a grid uniform in ``log t``, with separation ``w``.

    ``kind`` is ``"catenoid"`` (neck radius ``r``) or ``"planes"``
    (separation ``gap``, no neck, ``r = 0``).
    """

    n: int
    r: float
    kind: str
    t: np.ndarray
    w_scale: float = 1.0
    gap: float = 0.0
    h: np.ndarray = field(init=False, repr=False)
    w: np.ndarray = field(init=False, repr=False)
    rho: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        check_dimension(self.n)
        if self.kind not in ("catenoid", "planes"):
            raise ConfigurationError(f"unknown fixture kind {self.kind!r}")
        t = np.asarray(self.t, dtype=float)
        if t.ndim != 1 or t.size < 2 or np.any(np.diff(t) <= 0):
            raise ConfigurationError("base grid must be strictly increasing with >= 2 nodes")
        local = [self.local(ti) for ti in t]
        rho = np.array([g.rho for g in local])
        w = np.array([g.w for g in local])
        if self.kind == "catenoid" and np.any(rho < 2.0 * self.r * (1 - 1e-12)):
            raise DomainError("two-sheet configurations are defined only for rho >= 2r")
        if not np.all(w > 0):
            raise DomainError("the separation w must be positive (sheets are disjoint)")
        for name, value in (("t", t), ("h", np.array([g.h for g in local])), ("w", w), ("rho", rho)):
            value.setflags(write=False)
            object.__setattr__(self, name, value)

    @classmethod
    def catenoid(cls, n, r=1.0, rho_min=None, rho_max=None, points=201):
        """Exact two-sheet catenoid on ``rho in [rho_min, rho_max]`` (defaults ``10r``, ``1000r``)."""
        n = check_dimension(n)
        if not r > 0:
            raise DomainError("neck radius must be positive")
        rho_min = 10.0 * r if rho_min is None else rho_min
        rho_max = 1000.0 * r if rho_max is None else rho_max
        if points < 2 or not rho_max > rho_min:
            raise ConfigurationError("need points >= 2 and rho_max > rho_min")
        if rho_min < 2.0 * r:
            raise DomainError("two-sheet configurations are defined only for rho >= 2r")
        t_lo = ball_slice(n, r, rho_min).t
        t_hi = ball_slice(n, r, rho_max).t
        return cls(n, r, "catenoid", np.geomspace(t_lo, t_hi, points))

    @classmethod
    def planes(cls, n, gap=1.0, rho_min=1.0, rho_max=100.0, points=201):
        """Two parallel hyperplanes at distance ``gap``; the base is the lower one."""
        if points < 2 or not rho_max > rho_min > 0:
            raise ConfigurationError("need points >= 2 and rho_max > rho_min > 0")
        return cls(n, 0.0, "planes", np.geomspace(rho_min, rho_max, points), gap=gap)

    def scaled(self, factor):
        """Same base with the separation multiplied by ``factor``."""
        return TwoSheetConfig(self.n, self.r, self.kind, np.asarray(self.t), self.w_scale * factor, self.gap)

    @property
    def log_step(self):
        return float(np.log(self.t[1] / self.t[0]))

    def t_of_rho(self, s):
        """Base radius where the base sheet meets the sphere of radius ``s``."""
        if self.kind == "planes":
            return float(s)
        return ball_slice(self.n, self.r, s).t

    def local(self, t) -> LocalGeometry:
        """Exact geometry at base radius ``t``."""
        n = self.n
        if self.kind == "planes":
            return LocalGeometry(t, 0.0, t, 1.0, self.w_scale * self.gap, 0.0, 0.0, 0.0, 1.0)
        r = self.r
        sigma = t / r
        q = sigma ** (n - 1)
        big_s = math.sqrt(q * q - 1.0)
        stretch = q / big_s
        hh = standard_height(n, sigma)
        rho = math.hypot(sigma, hh)
        nl = normal_line(n, sigma)
        a_norm = math.sqrt(n * (n - 1)) * sigma ** (-n)
        grad_a = n * math.sqrt((n - 1) * (n + 2)) * sigma ** (-n - 1) / stretch
        phi = (sigma * big_s + hh) / (q * rho)
        return LocalGeometry(
            t,
            r * hh,
            r * rho,
            stretch,
            self.w_scale * r * nl.w,
            self.w_scale * nl.dw_dt,
            a_norm / r,
            grad_a / r**2,
            phi,
        )


class GraphFields(NamedTuple):
    """Derivatives of ``w`` on the base sheet at the grid nodes."""

    rho: np.ndarray
    w: np.ndarray
    grad: np.ndarray      # |grad w|
    hess: np.ndarray      # |Hess w|
    laplacian: np.ndarray
    a_norm: np.ndarray
    grad_a_norm: np.ndarray


def graph_fields(cfg: TwoSheetConfig) -> GraphFields:
    """Axisymmetric derivatives of ``w`` with exact ``dw/dt`` at half nodes.

    ``Lap w = (t^(n-1) m)^-1 d/dt (t^(n-1) w_t / m)`` and the radial Hessian
    entry ``(1/m) d/dt (w_t / m)`` are differenced once, at second order, on
    the log-uniform grid; ``m`` is the meridian stretch ``d(arclength)/dt``.
    """
    n = cfg.n
    dx = cfg.log_step
    t = np.asarray(cfg.t)
    nodes = [cfg.local(ti) for ti in t]
    minus = [cfg.local(ti * math.exp(-0.5 * dx)) for ti in t]
    plus = [cfg.local(ti * math.exp(0.5 * dx)) for ti in t]

    def flux(g):
        return g.t ** (n - 1) * g.dw_dt / g.stretch

    def slope(g):
        return g.dw_dt / g.stretch

    m = np.array([g.stretch for g in nodes])
    lap = np.array([(flux(p) - flux(q)) / (g.t * dx) for g, p, q in zip(nodes, plus, minus)])
    lap /= t ** (n - 1) * m
    w_ss = np.array([(slope(p) - slope(q)) / (g.t * dx) for g, p, q in zip(nodes, plus, minus)]) / m
    w_s = np.array([slope(g) for g in nodes])
    # rotational Hessian entries: w_s * (dt/dsigma) / t, multiplicity n - 1
    hess = np.sqrt(w_ss**2 + (n - 1) * (w_s / (m * t)) ** 2)
    return GraphFields(
        np.array([g.rho for g in nodes]),
        np.array([g.w for g in nodes]),
        np.abs(w_s),
        hess,
        lap,
        np.array([g.a_norm for g in nodes]),
        np.array([g.grad_a_norm for g in nodes]),
    )


def _require_far_field(cfg):
    if cfg.kind == "catenoid" and np.any(cfg.rho < 10.0 * cfg.r * (1 - 1e-12)):
        raise DomainError("nodes with rho < 10r are outside the small-gradient regime")


class MinimalGraphResidual(NamedTuple):
    rho: np.ndarray
    w: np.ndarray
    lhs: np.ndarray
    rhs: np.ndarray
    residual: np.ndarray
    constant: float
    smallest_constant: float
    holds: bool

    def rows(self):
        return list(zip(self.rho.tolist(), self.w.tolist(), self.lhs.tolist(), self.rhs.tolist(), self.residual.tolist()))


def minimal_graph_residual(cfg: TwoSheetConfig, constant=None) -> MinimalGraphResidual:
    """``Lap w + |A|^2 w`` minus the quadratic error bound of the minimal-graph inequality.

    Ambient curvature terms vanish (flat space). The bound has C-free terms
    ``8|A||Dw|^2 + |A|^3 w^2 + |D^2 w||A| w`` plus ``constant`` times the
    remaining products (default ``10^n``). ``smallest_constant`` is the least
    constant for which the inequality holds at every node.

    Raises:
        DomainError: if some node has ``rho < 10r``.
    """
    _require_far_field(cfg)
    n = cfg.n
    constant = DEFAULT_C[n] if constant is None else float(constant)
    f = graph_fields(cfg)
    u, g, hs, a, da = f.w, f.grad, f.hess, f.a_norm, f.grad_a_norm
    lhs = f.laplacian + a**2 * u
    explicit = 8.0 * a * g**2 + a**3 * u**2 + hs * a * u
    bracket = (
        (u + g + g**3) * u
        + g**2 * hs
        + g**3 * da * u
        + a * u**2 * (1.0 + g)
        + hs * u**2
        + da * g * u**2 * (a + u)
        + g * u**2 * (1.0 + a * g + da * u + a**2 * u)
    )
    rhs = explicit + constant * bracket
    residual = lhs - rhs
    with np.errstate(divide="ignore", invalid="ignore"):
        need = np.where(bracket > 0, (lhs - explicit) / bracket, np.where(lhs - explicit > 0, np.inf, 0.0))
    smallest = float(max(0.0, np.max(need)))
    tol = 1e-6 * float(np.max(u))
    return MinimalGraphResidual(f.rho, u, lhs, rhs, residual, constant, smallest, bool(np.all(residual <= tol)))


def laplace_inequality_check(cfg: TwoSheetConfig) -> bool:
    """Whether ``Lap w <= w + w^3 / (8 rho^4)`` at every node.

    Raises:
        DomainError: if some node has ``rho < 10r``.
    """
    _require_far_field(cfg)
    f = graph_fields(cfg)
    return bool(np.all(f.laplacian <= f.w + f.w**3 / (8.0 * f.rho**4)))


# --- concentric sphere foliation --------------------------------------------


@dataclass(frozen=True)
class FoliationSample:
    """Leaves ``|x| = r0 + orientation * s`` of flat ``R^(n+1)``, ``s`` on a uniform grid.

    The graph function on the base sphere is ``u0 + c * x_(n+1)/|x|`` and is
    extended by ``u(p, s) = u(p) - s``. ``angles`` are the polar angles of the
    foot points on the base sphere.
    """

    n: int
    r0: float
    depth: float
    levels: int = 11
    u0: float = 0.0
    c: float = 0.0
    orientation: int = 1
    angles: tuple = (0.3, 0.9, 1.4, 2.2)

    def __post_init__(self):
        check_dimension(self.n)
        if not self.r0 > 0 or not self.depth > 0:
            raise ConfigurationError("need r0 > 0 and depth > 0")
        if self.orientation not in (1, -1):
            raise ConfigurationError("orientation must be +1 or -1")
        if self.orientation < 0 and self.depth >= self.r0:
            raise ConfigurationError("inward foliation collapses before the requested depth")

    @property
    def s_grid(self):
        return np.linspace(0.0, self.depth, self.levels)

    @property
    def step(self):
        return self.depth / (self.levels - 1)

    @property
    def base_a_norm(self):
        return math.sqrt(self.n) / self.r0

    # ambient pieces ---------------------------------------------------------

    def _direction(self, angle):
        omega = np.zeros(self.n + 1)
        omega[0] = math.sin(angle)
        omega[-1] = math.cos(angle)
        return omega

    def _frame(self, omega):
        # orthonormal basis of the complement of omega
        basis = np.linalg.svd(omega[None, :])[2][1:]
        return basis.T

    def point(self, angle, s):
        return (self.r0 + self.orientation * s) * self._direction(angle)

    def ambient(self, x):
        """``(grad u, Hess u, grad d, Hess d)`` of the extended graph function at ``x``."""
        dim = self.n + 1
        radius = float(np.linalg.norm(x))
        omega = x / radius
        e = np.zeros(dim)
        e[-1] = 1.0
        proj = np.eye(dim) - np.outer(omega, omega)
        grad_d = self.orientation * omega
        hess_d = self.orientation * proj / radius
        ex = float(e @ x)
        grad_psi = self.c * (e / radius - ex * x / radius**3)
        hess_psi = self.c * (
            -(np.outer(e, x) + np.outer(x, e)) / radius**3
            - ex * np.eye(dim) / radius**3
            + 3.0 * ex * np.outer(x, x) / radius**5
        )
        return grad_psi - grad_d, hess_psi - hess_d, grad_d, hess_d

    def leaf_fields(self, angle, s):
        """Leafwise ``A, H, grad u, Hess u`` and ambient quantities at one node."""
        x = self.point(angle, s)
        grad_u, hess_u, grad_d, hess_d = self.ambient(x)
        frame = self._frame(x / np.linalg.norm(x))
        A = frame.T @ hess_d @ frame
        du = frame.T @ grad_u
        normal_du = float(grad_u @ grad_d)
        hess_leaf = frame.T @ hess_u @ frame - A * normal_du
        radius = float(np.linalg.norm(x))
        # H as an ambient function is orientation * n / |x|; tangential part of its gradient
        grad_h = frame.T @ (-self.orientation * self.n * x / radius**3)
        return {
            "x": x,
            "A": A,
            "H": float(np.trace(A)),
            "grad_u": du,
            "hess_u": hess_leaf,
            "grad_u_ambient": grad_u,
            "hess_u_ambient": hess_u,
            "grad_d": grad_d,
            "grad_H": grad_h,
        }

    def shape_vector_field(self, x):
        """Ambient vector field ``A(grad u)`` of the leaf through ``x``."""
        grad_u, _, _, hess_d = self.ambient(x)
        radius = float(np.linalg.norm(x))
        omega = x / radius
        tangential = grad_u - (grad_u @ omega) * omega
        return hess_d @ tangential


def _five_point(values, h):
    """Central five-point derivative at interior levels ``2 .. N-3``."""
    v = np.asarray(values)
    return (v[:-4] - 8.0 * v[1:-3] + 8.0 * v[3:-1] - v[4:]) / (12.0 * h)


class IdentityReport(NamedTuple):
    residuals: dict
    max_residual: float


def evolution_identity_residuals(fol: FoliationSample, div_spec: DiffSpec | None = None) -> IdentityReport:
    """Residuals of the leafwise evolution identities in flat space.

    Identities (``d/ds`` at a fixed foot point, five-point stencil in ``s``):
    ``dH/ds = -|A|^2``, ``d|grad~u|^2/ds = -2 A(grad u, grad u)``,
    ``D_nu grad~u = -A(grad u)``, ``div A(grad u) = <Hess u, A> + <grad u, grad H>``,
    ``d(Lap_M u)/ds = |A|^2 - 2<Hess u, A> - <grad u, grad H>``,
    ``d|A|^2/ds = -2 tr A^3`` and ``d|Hess u|^2/ds = -4 tr(Hess u Hess u A)``
    (``grad A = 0`` on round leaves). Each entry is the largest absolute
    residual over foot points and interior levels.

    Raises:
        ConfigurationError: with fewer than five ``s`` levels.
    """
    if fol.levels < 5:
        raise ConfigurationError("five s-levels are needed for the stencil")
    div_spec = div_spec or DiffSpec(base_step=1e-3 * fol.r0, richardson_levels=3)
    h = fol.step
    residuals = {k: 0.0 for k in ("mean_curvature", "gradient_norm", "normal_derivative",
                                  "shape_divergence", "laplacian", "second_form_norm", "hessian_norm")}
    for angle in fol.angles:
        series = [fol.leaf_fields(angle, s) for s in fol.s_grid]
        H = [f["H"] for f in series]
        grad_tilde_sq = [float(f["grad_u_ambient"] @ f["grad_u_ambient"]) for f in series]
        lap_m = [float(np.trace(f["hess_u_ambient"])) for f in series]
        a_sq = [float(np.sum(f["A"] ** 2)) for f in series]
        hess_sq = [float(np.sum(f["hess_u"] ** 2)) for f in series]
        inner = slice(2, len(series) - 2)
        mid = series[inner]

        def compare(key, lhs, rhs):
            residuals[key] = max(residuals[key], float(np.max(np.abs(np.asarray(lhs) - np.asarray(rhs)))))

        compare("mean_curvature", _five_point(H, h), [-np.sum(f["A"] ** 2) for f in mid])
        compare("gradient_norm", _five_point(grad_tilde_sq, h),
                [-2.0 * f["grad_u"] @ f["A"] @ f["grad_u"] for f in mid])
        compare("laplacian", _five_point(lap_m, h),
                [np.sum(f["A"] ** 2) - 2.0 * np.sum(f["hess_u"] * f["A"]) - f["grad_u"] @ f["grad_H"] for f in mid])
        compare("second_form_norm", _five_point(a_sq, h), [-2.0 * np.trace(f["A"] @ f["A"] @ f["A"]) for f in mid])
        compare("hessian_norm", _five_point(hess_sq, h),
                [-4.0 * np.trace(f["hess_u"] @ f["hess_u"] @ f["A"]) for f in mid])

        for f in series:
            frame = fol._frame(f["x"] / np.linalg.norm(f["x"]))
            along_normal = f["hess_u_ambient"] @ f["grad_d"]
            compare("normal_derivative", along_normal, -(frame @ (f["A"] @ f["grad_u"])))
            div = 0.0
            for k in range(fol.n + 1):
                unit = np.zeros(fol.n + 1)
                unit[k] = 1.0
                shift = lambda eps, k=k, unit=unit: fol.shape_vector_field(f["x"] + eps * unit)[k]
                div += derivative(shift, 0.0, div_spec).value
            compare("shape_divergence", div, np.sum(f["hess_u"] * f["A"]) + f["grad_u"] @ f["grad_H"])
    return IdentityReport(residuals, max(residuals.values()))


def curvature_propagation_check(fol: FoliationSample, epsilon: float = 0.05) -> bool:
    """Whether ``|A(x,t)| <= 2|A(x)| + 2t`` and ``|grad u(x,t)| <= 2|grad u(x)|`` on every node.

    Raises:
        PreconditionError: if ``|A| * depth >= epsilon`` on the base leaf.
    """
    if not fol.base_a_norm * fol.depth < epsilon:
        raise PreconditionError(
            f"|A| * depth = {fol.base_a_norm * fol.depth:.3g} is not below {epsilon}"
        )
    ok = True
    for angle in fol.angles:
        base = fol.leaf_fields(angle, 0.0)
        a0 = float(np.linalg.norm(base["A"]))
        g0 = float(np.linalg.norm(base["grad_u"]))
        for s in fol.s_grid:
            leaf = fol.leaf_fields(angle, s)
            a_t = float(np.linalg.norm(leaf["A"]))
            g_t = float(np.linalg.norm(leaf["grad_u"]))
            ok &= a_t <= 2.0 * a0 + 2.0 * s + 1e-12
            ok &= g_t <= 2.0 * g0 + 1e-12
    return bool(ok)
