"""Area bookkeeping for replacing a catenoidal neck by two flat disks.

Cutting a neck of radius ``r`` out of the ball of radius ``R`` and capping
with the two spanning disks lowers area by the excess ``neck_gain``. Moving
the two sheets to the leaves at distance ``sep = 10 r |log r|`` from the
equator of ``M_a`` costs at most ``2 * leaf_loss``. The certificate compares
the two over a grid of neck radii.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from catlab.catenoid import (
    ball_slice,
    check_dimension,
    excess_constant,
    sphere_volume,
    standard_excess,
)
from catlab.errors import BoundViolation, ConfigurationError, DomainError, OutOfRegimeError
from catlab.revolution import leaf_deficit


@dataclass(frozen=True)
class NeckRule:
    """``R(r) = coefficient * r**exponent``; ``0 < exponent < 1`` keeps ``R -> 0`` and ``R/r -> inf``."""

    exponent: float = 0.5
    coefficient: float = 1.0

    def __post_init__(self):
        if not 0.0 < self.exponent < 1.0 or not self.coefficient > 0:
            raise ConfigurationError("neck rule needs 0 < exponent < 1 and a positive coefficient")

    def __call__(self, r):
        return self.coefficient * r**self.exponent

    def describe(self):
        if self.coefficient == 1.0:
            return f"R = r**{self.exponent!r}"
        return f"R = {self.coefficient!r} * r**{self.exponent!r}"


def separation(r: float) -> float:
    """Leaf separation ``10 r |log r|``."""
    if not 0.0 < r < math.exp(-1.0):
        raise DomainError(f"neck radius must satisfy 0 < r < 1/e, got {r!r}")
    return 10.0 * r * abs(math.log(r))


def neck_gain(n: int, r: float, R: float) -> float:
    """Catenoid area in the ball of radius ``R`` minus the two spanning disks.

    Computed as ``r^n E(R/r)`` with the standard excess ``E``. Asserts the
    lower bound ``(A_n/2) r^n`` for ``n >= 3`` and ``2 pi r^2 (log(R/r) - 1)``
    for ``n = 2``.

    Raises:
        DomainError: if ``R < 4r``.
    """
    n = check_dimension(n)
    if not r > 0 or not R >= 4.0 * r:
        raise DomainError(f"neck gain needs R >= 4r, got r={r!r}, R={R!r}")
    t = ball_slice(n, 1.0, R / r).t
    gain = r**n * standard_excess(n, t)
    if n == 2:
        bound = 2.0 * math.pi * r * r * (math.log(R / r) - 1.0)
    else:
        bound = 0.5 * excess_constant(n) * r**n
    if not gain >= bound:
        raise BoundViolation(f"neck gain {gain!r} below {bound!r}", gain, bound)
    return gain


def leaf_loss(n: int, a: float, r: float) -> float:
    """Area deficit ``Omega_n - |S_sep|`` of the leaf at separation ``10 r |log r|``.

    Asserts the allowance ``n Omega_n sep^(2n)``.

    Raises:
        DomainError: unless ``0 < r < 1/e``.
        OutOfRegimeError: if the separation reaches ``a/2``.
    """
    n = check_dimension(n)
    sep = separation(r)
    if sep >= 0.5 * a:
        raise OutOfRegimeError(f"separation {sep!r} is not below a/2 = {0.5 * a!r}")
    loss = leaf_deficit(n, a, sep)
    allowance = n * sphere_volume(n) * sep ** (2 * n)
    if loss > allowance:
        raise BoundViolation(f"leaf loss {loss!r} exceeds {allowance!r}", loss, allowance)
    return loss


def two_neck_gain(n, r, R, r2, R2):
    """Gain of replacing two independent necks: the sum of the single gains."""
    return neck_gain(n, r, R) + neck_gain(n, r2, R2)


@dataclass(frozen=True)
class SurgeryRow:
    r: float
    R: float
    gain: float
    loss: float
    margin: float
    threshold: float  # total excess the conclusion asks for, beyond the margin sign

    @property
    def excess(self):
        return self.gain - 2.0 * self.loss


@dataclass(frozen=True)
class SurgeryCertificate:
    n: int
    a: float
    neck_rule: str
    rows: tuple
    r_star: float
    verdict: bool
    conclusion_holds: bool
    excess_constant: float | None

    @property
    def r_grid(self):
        return tuple(row.r for row in self.rows)

    def normalized_margins(self):
        """``margin / r^n`` per row."""
        return [row.margin / row.r**self.n for row in self.rows]

    def to_json(self):
        return {
            "n": self.n,
            "a": self.a,
            "neck_rule": self.neck_rule,
            "r_star": self.r_star,
            "rows": [
                {"r": row.r, "R": row.R, "gain": row.gain, "loss": row.loss, "margin": row.margin}
                for row in self.rows
            ],
        }


def certify(n: int, a: float = 1.0, neck_rule: NeckRule | None = None, r_grid=None) -> SurgeryCertificate:
    """Compare neck gain with twice the leaf loss along ``r_grid``.

    ``margin = gain - 2 loss - A_n r^n / 4`` for ``n >= 3`` and
    ``gain - 2 loss`` for ``n = 2``. Rows are sorted by decreasing ``r``.
    ``r_star`` is the largest grid radius below which every grid margin is
    positive; the verdict is ``r_star > min(r_grid)``. ``conclusion_holds``
    records whether every row below ``r_star`` also clears the total-excess
    threshold (``A_n r^n / 4``, or ``pi r^2 (log(R/r) - 1)`` for ``n = 2``).

    Raises:
        ConfigurationError: for an empty grid.
        OutOfRegimeError: if some grid radius has separation ``>= a/2``.
    """
    n = check_dimension(n)
    neck_rule = neck_rule or NeckRule()
    if r_grid is None:
        r_grid = [10.0**-k for k in range(2, 7)]
    r_grid = sorted((float(r) for r in r_grid), reverse=True)
    if not r_grid:
        raise ConfigurationError("the radius grid is empty")
    for r in r_grid:
        if 0.0 < r < 1.0 and 10.0 * r * abs(math.log(r)) >= 0.5 * a:
            raise OutOfRegimeError(f"grid radius {r!r} puts the leaf separation beyond a/2 = {0.5 * a!r}")
    const = excess_constant(n) if n >= 3 else None

    rows = []
    for r in r_grid:
        R = neck_rule(r)
        loss = leaf_loss(n, a, r)
        gain = neck_gain(n, r, R)
        if n == 2:
            margin = gain - 2.0 * loss
            threshold = math.pi * r * r * (math.log(R / r) - 1.0)
        else:
            margin = gain - 2.0 * loss - 0.25 * const * r**n
            threshold = 0.25 * const * r**n
        rows.append(SurgeryRow(r, R, gain, loss, margin, threshold))

    # scan from the smallest radius upward while margins stay positive
    r_star = rows[-1].r
    for k in range(len(rows) - 1, 0, -1):
        if rows[k].margin > 0:
            r_star = rows[k - 1].r
        else:
            break
    below = [row for row in rows if row.r < r_star]
    conclusion = all(row.excess > row.threshold for row in below)
    return SurgeryCertificate(
        n, float(a), neck_rule.describe(), tuple(rows), r_star, r_star > rows[-1].r, conclusion, const
    )
