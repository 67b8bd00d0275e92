"""Distinguished tangency direction and the osculating cyclide.

Everything here works in the canonical graph normal form at the queried
point: the surface contributes quartic-profile coefficients along the line
y = t x of its tangent plane, the cyclide family contributes a one-parameter
quartic, and order-4 contact pins the single free cyclide invariant.

The profile coefficient set used for the published-table computation takes
unit-speed directional derivatives of the theta fields (distinct from the
invariant-gauge set in :mod:`conformal.invariants`, which divides by mu);
both gauges are exposed and unit-tested.  The sign flag ``profile_sign``
selects which of the two cube roots of the direction ratio is used in the
profile matching; the default -1 is the choice under which the cubic profile
terms cancel and the published values are reproduced.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import CanalPoint, DupinPoint, FitUnstable
from .invariants import (_H_FLD, _theta_param_grads, psi_invariant,
                         theta_state)
from .surfaces import PrincipalData, SurfacePatch

__all__ = [
    "CyclideContact", "CanonicalProfile", "profile_coeffs",
    "dupin_direction", "limit_direction_ratio", "osculating_cyclide",
    "canonical_profile", "cyclide_profile", "verify_contact_order",
    "contact_order_details",
]

_TOL_THETA = 1e-6


@dataclass(frozen=True)
class CyclideContact:
    """Osculating-cyclide descriptor at one surface point."""
    t: float                 # direction parameter, t^3 = theta1/theta2
    alpha: float             # angle with X1, in [0, pi/2)
    psi_c: float             # cyclide invariant
    contact_order: int
    u: float
    v: float
    position: np.ndarray
    limit_derived: bool = False
    profile_sign: int = -1
    # frozen profile data so verification needs no re-differencing
    theta1: float = 0.0
    theta2: float = 0.0
    psi: float = 0.0
    coeffs: tuple = (3.0, 0.0, 0.0, -3.0)   # unit-gauge (a, b, c, d)


@dataclass(frozen=True)
class CanonicalProfile:
    """Quartic coefficients (c2, c3, c4) of z restricted to y = t x."""
    c2: float
    c3: float
    c4: float
    kind: str                # "surface" or "cyclide"

    def eval(self, x):
        return self.c2*x**2 + self.c3*x**3 + self.c4*x**4


# --------------------------------------------------------------------------
# profile coefficients (unit-speed gauge)
# --------------------------------------------------------------------------
def profile_coeffs(surface: SurfacePatch, u: float, v: float,
                   h_fld: float = _H_FLD):
    """(a, b, c, d) with unit-speed directional derivatives D_i = X_i . grad
    of the theta fields (no division by mu):

        a = 3 + theta1^2 + D1 theta1      b = -theta1 theta2 - D2 theta1
        c = theta1 theta2 + D1 theta2     d = -3 - theta2^2 - D2 theta2

    This combination is invariant under either principal-direction sign flip,
    so it is frame-convention-free.
    """
    t1, t2, X1, X2, S = theta_state(surface, u, v)
    du, dv = _theta_param_grads(surface, u, v, (X1, X2), h_fld)
    D = {(i, j): X[0]*du[j - 1] + X[1]*dv[j - 1]
         for i, X in ((1, X1), (2, X2)) for j in (1, 2)}
    a = 3 + t1*t1 + D[(1, 1)]
    b = -t1*t2 - D[(2, 1)]
    c = t1*t2 + D[(1, 2)]
    d = -3 - t2*t2 - D[(2, 2)]
    return (a, b, c, d), t1, t2


def limit_direction_ratio(surface: SurfacePatch, u: float, v: float,
                          h_fld: float = _H_FLD) -> float:
    """Limit of theta1/theta2 at a point where both thetas vanish on a curve
    crossed transversally: ratio of the directional derivatives of the two
    fields along the unit gradient of theta2 (frame-consistent, so the
    relative sign of the two fields is preserved)."""
    t1, t2, X1, X2, S = theta_state(surface, u, v)
    du, dv = _theta_param_grads(surface, u, v, (X1, X2), h_fld)
    g = np.array([du[1], dv[1]])
    norm = np.hypot(*g)
    if norm < 1e-12:
        raise DupinPoint("theta2 gradient vanishes; no transversal limit")
    g = g / norm
    return (g[0]*du[0] + g[1]*dv[0]) / (g[0]*du[1] + g[1]*dv[1])


# --------------------------------------------------------------------------
# direction and cyclide
# --------------------------------------------------------------------------
def dupin_direction(theta1: float, theta2: float, pd: PrincipalData,
                    tol: float = _TOL_THETA, limit_ratio: Optional[float] = None):
    """Distinguished tangency direction.

    Returns (t, alpha, direction) with t = cbrt(theta1/theta2) using the
    real sign-preserving cube root, alpha = arctan|t| in [0, pi/2), and the
    unoriented parameter-plane direction cos(alpha) X1 + sin(alpha) sign(t) X2.
    When theta2 is below tolerance but theta1 is not, the index roles swap
    and the direction is reported relative to X2.  When both vanish, a
    caller-supplied limit ratio is accepted (flagged limit-derived upstream),
    else DupinPoint is raised.
    """
    scale = max(abs(theta1), abs(theta2))
    if scale < tol:
        if limit_ratio is None:
            raise DupinPoint("both conformal principal curvatures vanish")
        ratio = limit_ratio
    elif abs(theta2) < tol * scale:
        # swapped roles: parameter is cbrt(theta2/theta1) relative to X2
        t = np.cbrt(theta2 / theta1)
        alpha = np.arctan(abs(t))
        direction = np.cos(alpha)*pd.X2 + np.sin(alpha)*np.sign(t)*pd.X1
        return t, alpha, direction
    else:
        ratio = theta1 / theta2
    t = np.cbrt(ratio)
    alpha = np.arctan(abs(t))
    direction = np.cos(alpha)*pd.X1 + np.sin(alpha)*np.sign(t)*pd.X2
    return t, alpha, direction


def _psi_c_from_profile(coeffs, psi, t_eff):
    a, b, c, d = coeffs
    P = a + 4*b*t_eff + 6*psi*t_eff**2 + 4*c*t_eff**3 + d*t_eff**4
    return (6.0/t_eff**2) * (P/24.0 - (1.0 - t_eff**4)/8.0)


def osculating_cyclide(surface: SurfacePatch, u: float, v: float,
                       limit_ratio: Optional[float] = None,
                       profile_sign: int = -1,
                       tol: float = _TOL_THETA,
                       h_fld: float = _H_FLD) -> CyclideContact:
    """Unique cyclide with order-4 contact at a non-canal point.

    The cyclide invariant solves the quartic-profile matching equation

        psi_c = (6/t^2) [ (a + 4bt + 6 psi t^2 + 4ct^3 + dt^4)/24
                          - (1 - t^4)/8 ]

    evaluated at t_eff = profile_sign * cbrt(theta1/theta2).  At a point
    where both thetas vanish transversally, pass ``limit_ratio`` (or rely on
    the automatic transversal-limit estimate) — the result is flagged
    limit-derived.
    """
    coeffs, t1, t2 = profile_coeffs(surface, u, v, h_fld)
    psi = psi_invariant(surface, u, v, h_fld)
    scale = max(abs(t1), abs(t2))
    limit_derived = False
    if scale < tol:
        if limit_ratio is None:
            limit_ratio = limit_direction_ratio(surface, u, v, h_fld)
        ratio = limit_ratio
        limit_derived = True
    elif min(abs(t1), abs(t2)) < tol * max(scale, 1.0):
        raise CanalPoint(
            f"one theta vanishes (theta1={t1:.3e}, theta2={t2:.3e}); "
            "quartic matching degenerates")
    else:
        ratio = t1 / t2
    t = float(np.cbrt(ratio))
    if t == 0.0:
        raise CanalPoint("direction ratio zero")
    t_eff = profile_sign * t
    psi_c = _psi_c_from_profile(coeffs, psi, t_eff)
    return CyclideContact(
        t=t, alpha=float(np.arctan(abs(t))), psi_c=float(psi_c),
        contact_order=4, u=u, v=v,
        position=np.asarray(surface.position(u, v), dtype=float),
        limit_derived=limit_derived, profile_sign=profile_sign,
        theta1=float(t1), theta2=float(t2), psi=float(psi),
        coeffs=tuple(float(x) for x in coeffs))


# --------------------------------------------------------------------------
# profiles and contact order
# --------------------------------------------------------------------------
def canonical_profile(theta1, theta2, psi, coeffs, t) -> CanonicalProfile:
    """Surface profile along y = t x of the canonical graph form."""
    a, b, c, d = coeffs
    return CanonicalProfile(
        c2=0.5*(1 - t*t),
        c3=(theta1 + theta2*t**3)/6.0,
        c4=(a + 4*b*t + 6*psi*t*t + 4*c*t**3 + d*t**4)/24.0,
        kind="surface")


def cyclide_profile(psi_c, t) -> CanonicalProfile:
    """Cyclide profile along y = t x (no cubic term by construction)."""
    return CanonicalProfile(
        c2=0.5*(1 - t*t),
        c3=0.0,
        c4=(1 - t**4)/8.0 + psi_c*t*t/6.0,
        kind="cyclide")


def contact_order_details(prof_a: CanonicalProfile, prof_b: CanonicalProfile,
                          h0: float = 0.5, levels: int = 8,
                          fit_tol: float = 0.15):
    """Leading-order analysis of the profile difference on a dyadic ladder.

    Returns (order, slope, exact_through_quartic).  If all three coefficient
    differences are at noise level the models agree identically through
    order 4; the generic remainder of the truncated expansions is then one
    order beyond the quartic, reported as slope 5 with the exact flag rather
    than a fit of machine noise.  Otherwise the log-log slope of
    |difference| over x = h0 * 2^-k is fitted and order = round(slope) - 1.
    """
    dc = np.array([prof_a.c2 - prof_b.c2,
                   prof_a.c3 - prof_b.c3,
                   prof_a.c4 - prof_b.c4])
    scale = max(abs(prof_a.c2), abs(prof_a.c3), abs(prof_a.c4), 1.0)
    if np.all(np.abs(dc) < 1e-10 * scale):
        return 4, 5.0, True
    xs = h0 * 0.5**np.arange(levels)
    ds = np.abs(prof_a.eval(xs) - prof_b.eval(xs))
    mask = ds > 0
    if mask.sum() < 3:
        return 4, 5.0, True
    logx, logd = np.log(xs[mask]), np.log(ds[mask])
    A = np.vstack([logx, np.ones_like(logx)]).T
    sol, res, *_ = np.linalg.lstsq(A, logd, rcond=None)
    slope = sol[0]
    resid = np.sqrt(res[0]/len(logx)) if len(res) else 0.0
    if resid > fit_tol:
        raise FitUnstable(f"log-log fit residual {resid:.3g} > {fit_tol}")
    return int(round(slope)) - 1, float(slope), False


def verify_contact_order(surface: SurfacePatch, contact: CyclideContact,
                         psi_c: Optional[float] = None, h0: float = 0.5,
                         levels: int = 8) -> int:
    """Numerically verified contact order between the surface and the
    cyclide with invariant ``psi_c`` (default: the contact's own value) in
    the contact direction."""
    t_eff = contact.profile_sign * contact.t
    prof_s = canonical_profile(contact.theta1, contact.theta2, contact.psi,
                               contact.coeffs, t_eff)
    prof_c = cyclide_profile(contact.psi_c if psi_c is None else psi_c, t_eff)
    order, _, _ = contact_order_details(prof_s, prof_c, h0, levels)
    return order
