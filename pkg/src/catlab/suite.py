"""Verification checks, one per headline claim, assembled into a :class:`Report`.

Each check catches library errors and turns them into a failed record, so a
numerical failure never aborts the run.
"""

from __future__ import annotations

import math
import traceback

import numpy as np

from catlab import catenoid, monotone, revolution, surgery, two_sheet
from catlab.errors import CatlabError, DivergenceError
from catlab.numerics import DiffSpec, ode_bound_check
from catlab.report import Check, Report

DEFAULT_TOLERANCES = {
    "height_sup": 1e-4,
    "flux_limit": 1e-3,
    "excess_window": 1e-6,
    "ricci_floor": 1e-9,
    "degeneracy": 1e-9,
    "identity_residuals": 1e-6,
    "convergence_ratio": 3.5,
    "graph_estimates": 1e-6,
    "surgery_r_star": 1e-2,
    "surgery_margin_slack": 1e-2,
}

HEIGHT_SUP_BOUND = 1.31103

ANCHORS = {
    "height_sup": "|h| < 1.31103 (n >= 3); log t < |h| < log(2t) (n = 2)",
    "flux_limit": "<grad w, eta> = 2",
    "excess_constant": "A_n = lim_{R->inf} (|C ∩ B_R| - 2 |D_t|) > 0; n = 2: excess > 2 pi (log R - 1)",
    "neck_height_budget": "2 r ∫_1^inf ds / sqrt(s^(2(n-1)) - 1) < (27/10) r; n = 2: I(R) < 3 r log(R/r)",
    "family_geometry": "Ric >= 0; |t| <= dist(S_0, S_t) <= 2|t|; mean curvature points away from S_0; "
                       "|A|^2 + Ric(nu, nu) = 0 on S_0",
    "identity_residuals": "I'(s) - tau(s)/s^(n-1) = ...; d/ds[s^-n(|A(R,s)| + (R/n) ∫_gamma_R phi)] "
                          "= s^-n ∫_gamma_s (1/phi - phi)",
    "graph_estimates": "dH/ds = -Ric - |A|^2 and companions; f' <= a + b f; |A(x,t)| <= 2|A(x)| + 2t; "
                  "Lap u + |A|^2 u <= ...; Lap w <= w + w^3 / (8 rho^4)",
    "monotone_bounds": "I(s) < 4 r log(s/r) (n = 2), I(s) < 3 r (n >= 3); sup w < 8 r |log r| (n = 2), < 5 r (n >= 3)",
    "surgery_certificate": "2 Area(S_0) + (A_n/4) r^n",
    "determinism": "identical configuration gives byte-identical artifacts",
}


def _tol(tols, key):
    return (tols or {}).get(key, DEFAULT_TOLERANCES[key])


def guarded(check_id):
    """Turn library failures inside a check into a failed record."""

    def wrap(fn):
        def run(*args, **kwargs):
            try:
                return fn(*args, **kwargs)
            except (CatlabError, ArithmeticError, ValueError) as exc:
                return Check(check_id, ANCHORS[check_id], None, None, False,
                             {"error": f"{type(exc).__name__}: {exc}",
                              "where": traceback.extract_tb(exc.__traceback__)[-1].name})

        run.__name__ = fn.__name__
        run.__doc__ = fn.__doc__
        return run

    return wrap


@guarded("height_sup")
def check_height_sup(n, tols=None):
    if n == 2:
        ts = [2.0, 10.0, 1e3, 1e6]
        hs = [catenoid.height(2, 1.0, t) for t in ts]
        ok = all(math.log(t) < h < math.log(2 * t) for t, h in zip(ts, hs))
        # position of h inside (log t, log 2t), rescaled to (0, 1)
        pos = [(h - math.log(t)) / math.log(2.0) for t, h in zip(ts, hs)]
        return Check("height_sup", ANCHORS["height_sup"], max(pos), 1.0, ok and min(pos) > 0,
                     {"t": ts, "h": hs})
    value = catenoid.height_sup(n)
    ok = value < HEIGHT_SUP_BOUND + _tol(tols, "height_sup")
    detail = {}
    if n == 3:
        gap = abs(value - HEIGHT_SUP_BOUND)
        detail["distance_to_bound"] = gap
        ok = ok and gap <= _tol(tols, "height_sup")
    return Check("height_sup", ANCHORS["height_sup"], value, HEIGHT_SUP_BOUND, ok, detail)


@guarded("flux_limit")
def check_flux_limit(n, tols=None):
    value = catenoid.two_sheet_flux(n, 1.0, 1e4)
    return Check("flux_limit", ANCHORS["flux_limit"], value, 2.0, abs(value - 2.0) <= _tol(tols, "flux_limit"))


@guarded("excess_constant")
def check_excess_constant(n, tols=None):
    if n == 2:
        try:
            catenoid.excess_constant(2)
            diverges = False
        except DivergenceError:
            diverges = True
        gaps = []
        for R in (math.e, 10.0, 1e3):
            gaps.append(catenoid.log_excess_n2(R) - 2 * math.pi * (math.log(R) - 1))
        return Check("excess_constant", ANCHORS["excess_constant"], min(gaps), 0.0,
                     diverges and min(gaps) > 0, {"divergence_signalled": diverges})
    limit = catenoid.excess_limit(n, _tol(tols, "excess_window"))
    ok = limit.value > 1e-3 and limit.window < _tol(tols, "excess_window")
    return Check("excess_constant", ANCHORS["excess_constant"], limit.value, 1e-3, ok,
                 {"window": limit.window, "R": limit.R, "tail": limit.tail})


@guarded("neck_height_budget")
def check_neck_height_budget(n, tols=None):
    if n == 2:
        cfg = two_sheet.TwoSheetConfig.catenoid(2, 1.0, 50.0, 200.0, points=3)
        value = monotone.sample(cfg, 100.0).I
        bound = 3.0 * math.log(100.0)
        return Check("neck_height_budget", ANCHORS["neck_height_budget"], value, bound, value < bound)
    value = 2.0 * catenoid.height_sup(n)
    return Check("neck_height_budget", ANCHORS["neck_height_budget"], value, catenoid.NECK_HEIGHT_BUDGET,
                 value < catenoid.NECK_HEIGHT_BUDGET)


def family_scan(n, a_values=(1.0, 2.0, 10.0), points=50, tols=None):
    """Worst-case quantities of the family properties over symmetric t-grids."""
    ric_min = math.inf
    dist_ok = sign_ok = True
    degeneracy = 0.0
    for a in a_values:
        for t in np.linspace(-0.99 * a, 0.99 * a, points):
            t = float(t)
            ric_min = min(ric_min, min(revolution.ricci_eigenvalues(n, a, t)))
            d = revolution.meridian_distance(n, a, t)
            dist_ok &= abs(t) * (1 - 1e-12) <= d <= 2 * abs(t)
            sign_ok &= revolution.leaf_mean_curvature_sign(n, a, t) == int(np.sign(t))
        sign_ok &= revolution.leaf_mean_curvature_sign(n, a, 0.0) == 0
        degeneracy = max(degeneracy, abs(revolution.equator_degeneracy(n, a)))
    return ric_min, bool(dist_ok), bool(sign_ok), degeneracy


@guarded("family_geometry")
def check_family_geometry(n, a=1.0, points=50, tols=None):
    a_values = tuple(sorted({1.0, 2.0, 10.0, float(a)}))
    ric_min, dist_ok, sign_ok, degeneracy = family_scan(n, a_values, points, tols)
    floor = -_tol(tols, "ricci_floor")
    ok = ric_min >= floor and dist_ok and sign_ok and degeneracy <= _tol(tols, "degeneracy")
    return Check("family_geometry", ANCHORS["family_geometry"], ric_min, floor, ok,
                 {"a_values": list(a_values), "distance_bounds": dist_ok, "mean_curvature_sign": sign_ok,
                  "equator_degeneracy": degeneracy})


def identity_scan(n, s_values=(20.0, 50.0), R=4.0):
    """Residuals of both identities and their step-halving ratios."""
    cfg = two_sheet.TwoSheetConfig.catenoid(n, 1.0, R, 100.0, points=3)
    worst, ratios = 0.0, []
    for s in s_values:
        worst = max(worst,
                    monotone.derivative_identity_residual(cfg, s),
                    monotone.area_identity_residual(cfg, R, s))
        coarse, fine = DiffSpec(s / 10.0, 1), DiffSpec(s / 20.0, 1)
        ratios.append(monotone.derivative_identity_residual(cfg, s, coarse)
                      / monotone.derivative_identity_residual(cfg, s, fine))
        ratios.append(monotone.area_identity_residual(cfg, R, s, coarse)
                      / monotone.area_identity_residual(cfg, R, s, fine))
    return worst, min(ratios)


@guarded("identity_residuals")
def check_identity_residuals(n, tols=None):
    worst, ratio = identity_scan(n)
    ok = worst < _tol(tols, "identity_residuals") and ratio >= _tol(tols, "convergence_ratio")
    return Check("identity_residuals", ANCHORS["identity_residuals"], worst, _tol(tols, "identity_residuals"), ok,
                 {"min_halving_ratio": ratio})


ODE_FIXTURES = (
    ("saturating", 1.0, 1.0, 0.0, 1.0, lambda t, f: 1.0 + f),
    ("constant", 1.0, 1.0, 1.0, 2.0, lambda t, f: 0.0),
    ("logistic", 1.0, 1.0, 0.5, 3.0, lambda t, f: 1.0 + f - f * f),
)


def graph_estimate_scan(n):
    fol = two_sheet.FoliationSample(n, 1.0, 0.1, levels=101, c=0.3)
    evolution = two_sheet.evolution_identity_residuals(fol).max_residual
    propagation = all(
        two_sheet.curvature_propagation_check(f)
        for f in (
            two_sheet.FoliationSample(n, 10.0, 0.1, c=0.5),
            two_sheet.FoliationSample(n, 100.0, 0.5, c=0.5),
            two_sheet.FoliationSample(n, 10.0, 0.1, c=0.5, orientation=-1),
        )
    )
    odes = all(ode_bound_check(a, b, f0, T, rhs) for _, a, b, f0, T, rhs in ODE_FIXTURES)
    cfg = two_sheet.TwoSheetConfig.catenoid(n, 1.0, 10.0, 1e3)
    graph = two_sheet.minimal_graph_residual(cfg)
    laplace = two_sheet.laplace_inequality_check(cfg)
    return {
        "evolution_residual": evolution,
        "curvature_propagation": propagation,
        "ode_bounds": odes,
        "minimal_graph": graph.holds,
        "smallest_constant": graph.smallest_constant,
        "laplace_inequality": laplace,
    }


@guarded("graph_estimates")
def check_graph_estimates(n, tols=None):
    d = graph_estimate_scan(n)
    ok = (d["evolution_residual"] < _tol(tols, "graph_estimates") and d["curvature_propagation"]
          and d["ode_bounds"] and d["minimal_graph"] and d["laplace_inequality"])
    return Check("graph_estimates", ANCHORS["graph_estimates"], d["evolution_residual"], _tol(tols, "graph_estimates"), ok, d)


def monotone_scan(n, r=1e-3, s_lo=0.1, s_hi=1.0, points=20, epsilon=1.0):
    cfg = two_sheet.TwoSheetConfig.catenoid(n, r, 10.0 * r, max(2.0 * s_hi, epsilon), points=3)
    rep = monotone.modified_decrease_report(cfg, np.geomspace(s_lo, s_hi, points))
    sep = monotone.separation_bound(cfg, epsilon)
    return rep, sep


@guarded("monotone_bounds")
def check_monotone_bounds(n, r=1e-3, tols=None):
    rep, sep = monotone_scan(n, r)
    i_row = rep.bounds[0]
    ok = i_row.holds and sep.holds
    return Check("monotone_bounds", ANCHORS["monotone_bounds"], i_row.value, i_row.bound, ok,
                 {"tau_bound_holds": rep.bounds[1].holds, "sup_w": sep.sup_w,
                  "sup_w_local_bound": sep.local_bound, "sup_w_global_bound": sep.global_bound,
                  "I_mod_nonincreasing": rep.I_mod_nonincreasing,
                  "tau_mod_nonincreasing": rep.tau_mod_nonincreasing})


def surgery_assessment(cert, tols=None):
    """Criterion-level reading of a certificate: verdict, r_star target and margins."""
    r_star_ok = cert.r_star >= _tol(tols, "surgery_r_star") * (1 - 1e-12)
    if cert.n >= 3:
        floor = cert.excess_constant / 4.0 - _tol(tols, "surgery_margin_slack")
        margins = cert.normalized_margins()
        margin_ok = all(m >= floor for m in margins)
    else:
        floor, margin_ok = None, True
    return {"verdict": cert.verdict, "r_star_target_met": r_star_ok, "margin_floor": floor,
            "margins_over_floor": margin_ok, "conclusion_below_r_star": cert.conclusion_holds}


@guarded("surgery_certificate")
def check_surgery(n, a=1.0, r_grid=None, tols=None, strict=True):
    cert = surgery.certify(n, a, surgery.NeckRule(), r_grid)
    d = surgery_assessment(cert, tols)
    d["normalized_margins"] = cert.normalized_margins()
    if strict:
        ok = d["verdict"] and d["r_star_target_met"] and d["margins_over_floor"]
    else:
        ok = d["verdict"]
    return Check("surgery_certificate", ANCHORS["surgery_certificate"], cert.r_star,
                 _tol(tols, "surgery_r_star"), ok, d)


def check_determinism(render):
    first, second = render(), render()
    return Check("determinism", ANCHORS["determinism"], len(first), len(second), first == second)


def verify_report(n, a=1.0, r_grid=None, tols=None, render=None, points=50) -> Report:
    """All checks for dimension ``n``, in criterion order."""
    report = Report()
    report.add(check_height_sup(n, tols))
    report.add(check_flux_limit(n, tols))
    report.add(check_excess_constant(n, tols))
    report.add(check_neck_height_budget(n, tols))
    report.add(check_family_geometry(n, a, points, tols))
    report.add(check_identity_residuals(n, tols))
    report.add(check_graph_estimates(n, tols))
    report.add(check_monotone_bounds(n, tols=tols))
    report.add(check_surgery(n, a, r_grid, tols))
    if render is not None:
        report.add(check_determinism(render))
    return report
