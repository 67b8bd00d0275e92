"""Dupin line field, Dupin-line and Darboux-line integration, and the
critical-angle analysis along Darboux traces.

Both integrators are fixed-step classical fourth-order schemes in the
parameter plane, advancing by ambient arc length; direction-field signs are
disambiguated per step by continuity.  Darboux traces carry the angle
variable alpha and the rescaled arc length sigma (d sigma = (k1 - k2) ds by
default) alongside the position samples.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import List, Optional

import numpy as np

from .errors import AngleDegenerate, DupinPoint, SeedIsDupinPoint
from .invariants import theta_state
from .surfaces import SurfacePatch

__all__ = [
    "CurveTrace", "dupin_field", "integrate_dupin_line",
    "integrate_darboux_line", "darboux_critical_points", "fit_circle",
    "CriticalPoint",
]

_TOL_DUPIN = 1e-6


@dataclass
class CurveTrace:
    """Ordered samples of an integrated line-field trace."""
    uv: np.ndarray                    # (n, 2) parameter samples
    positions: np.ndarray             # (n, 3) ambient samples
    step: float
    closed: bool
    termination: str                  # ReachedLength | HitBoundary | HitSingularPoint
    alpha: Optional[np.ndarray] = None
    sigma: Optional[np.ndarray] = None
    dalpha: Optional[np.ndarray] = None    # d alpha / d sigma at samples
    frames: Optional[np.ndarray] = None    # (n, 2, 2) carried (X1, X2)

    def __len__(self):
        return len(self.uv)


@dataclass(frozen=True)
class CriticalPoint:
    """One zero of d alpha / d sigma along a Darboux trace."""
    index: int                # sample index just before the zero
    u: float
    v: float
    alpha: float
    relation_residual: float  # theta2 tan^3(alpha) + theta1
    tangency_gap: float       # radians, unoriented-angle convention
    genericity: float         # V(log|theta1| + log|theta2|)
    is_extremum: bool


# --------------------------------------------------------------------------
# Dupin field
# --------------------------------------------------------------------------
def _dupin_dir_state(surface, u, v, ref=None, tol=_TOL_DUPIN):
    t1, t2, X1, X2, S = theta_state(surface, u, v, ref)
    if abs(t1) + abs(t2) < tol:
        raise DupinPoint(f"|theta1|+|theta2| = {abs(t1)+abs(t2):.3e}")
    V = np.cbrt(t2)*X1 + np.cbrt(t1)*X2
    return V, (t1, t2, X1, X2, S)


def dupin_field(surface: SurfacePatch, u: float, v: float, ref=None,
                tol: float = _TOL_DUPIN) -> np.ndarray:
    """Unoriented direction of cbrt(theta2) X1 + cbrt(theta1) X2,
    ambient-unit-normalized, in parameter coordinates."""
    V, (t1, t2, X1, X2, S) = _dupin_dir_state(surface, u, v, ref, tol)
    Vamb = V[0]*S["ru"] + V[1]*S["rv"]
    return V / np.linalg.norm(Vamb)


# --------------------------------------------------------------------------
# Dupin-line integration
# --------------------------------------------------------------------------
def integrate_dupin_line(surface: SurfacePatch, seed, step: float = 0.01,
                         max_length: float = 10.0,
                         tol_stop: float = 1e-6) -> CurveTrace:
    """Trace the Dupin line through ``seed`` with ambient-arc-length steps.

    Stops at the domain boundary, at the Dupin locus (a sample with
    |theta1| + |theta2| below ``tol_stop``), on closure, or at
    ``max_length``.  Transversal crossings of an isolated theta zero pass
    through: the field direction has a continuous unoriented limit there and
    samples almost never land inside the tolerance band.
    """
    u0, v0 = seed
    try:
        prev = dupin_field(surface, u0, v0)
    except DupinPoint as exc:
        raise SeedIsDupinPoint(str(exc)) from exc

    def f(u, v, prev_dir):
        try:
            d = dupin_field(surface, u, v)
        except DupinPoint:
            # transversal theta zero: the unoriented field has a continuous
            # limit, approximated by the direction half a step back
            return prev_dir
        if d @ prev_dir < 0:
            d = -d
        return d

    uv = [np.array([u0, v0], dtype=float)]
    pos = [np.asarray(surface.position(u0, v0), dtype=float)]
    termination = "ReachedLength"
    closed = False
    length = 0.0
    state = uv[0].copy()
    while length < max_length:
        t1, t2, *_ = theta_state(surface, *state)
        if abs(t1) + abs(t2) < tol_stop:
            termination = "HitSingularPoint"
            break
        h = step
        k1 = f(*state, prev)
        k2 = f(*(state + h/2*k1), k1)
        k3 = f(*(state + h/2*k2), k1)
        k4 = f(*(state + h*k3), k1)
        new = state + h/6*(k1 + 2*k2 + 2*k3 + k4)
        if not surface.contains(*new):
            termination = "HitBoundary"
            break
        prev = k1
        state = new
        length += h
        uv.append(state.copy())
        pos.append(np.asarray(surface.position(*state), dtype=float))
        if length > 4*step and np.linalg.norm(pos[-1] - pos[0]) < 1.5*step:
            closed = True
            break
    return CurveTrace(uv=np.array(uv), positions=np.array(pos), step=step,
                      closed=closed, termination=termination)


# --------------------------------------------------------------------------
# Darboux-line integration
# --------------------------------------------------------------------------
def integrate_darboux_line(surface: SurfacePatch, seed, alpha0: float,
                           step: float = 0.005, max_length: float = 5.0,
                           sigma_mode: str = "k1k2",
                           angle_eps: float = 0.02,
                           orient: int = 1) -> CurveTrace:
    """Integrate the coupled (position, alpha) system of the Darboux flow.

    State advances along cos(alpha) X1 + sin(alpha) X2 (ambient unit speed);
    alpha advances by (k1 - k2)(theta1 cos^3 a + theta2 sin^3 a) /
    (12 sin a cos a) per unit ambient arc length (the (k1 - k2) factor is
    the default sigma rescaling; ``sigma_mode="mu"`` uses mu instead, which
    differs by the constant 2 and moves no critical point).  The principal
    frame is carried by continuity along the trace.  Halts with
    HitSingularPoint when alpha degenerates toward 0 or pi/2.
    ``orient=-1`` traverses the same Darboux line in the opposite direction.
    """
    u0, v0 = seed
    if abs(np.sin(alpha0)*np.cos(alpha0)) < 1e-12:
        t1, t2, *_ = theta_state(surface, u0, v0)
        num = t1*np.cos(alpha0)**3 + t2*np.sin(alpha0)**3
        if abs(num) > 1e-12:
            raise AngleDegenerate(
                "alpha0 at a degeneracy of the angle equation with nonzero "
                "right side")
    fac = 1.0 if sigma_mode == "k1k2" else 0.5

    ref_holder = {"ref": None}

    def rhs(state):
        su, sv, a = state
        t1, t2, X1, X2, S = theta_state(surface, su, sv, ref_holder["ref"])
        ref_holder["ref"] = (X1, X2)
        vel = np.cos(a)*X1 + np.sin(a)*X2
        dk = S["k1"] - S["k2"]
        da = fac * dk * (t1*np.cos(a)**3 + t2*np.sin(a)**3) / \
            (12*np.sin(a)*np.cos(a))
        return orient*np.array([vel[0], vel[1], da]), dk, (t1, t2, X1, X2)

    state = np.array([u0, v0, alpha0], dtype=float)
    d0, dk0, fr0 = rhs(state)
    uv = [state[:2].copy()]
    pos = [np.asarray(surface.position(u0, v0), dtype=float)]
    alphas = [alpha0]
    sigmas = [0.0]
    dalphas = [d0[2]]
    frames = [np.array(fr0[2:])]
    termination = "ReachedLength"
    length = 0.0
    h = step
    while length < max_length:
        k1v, dk, fr = rhs(state)
        k2v, _, _ = rhs(state + h/2*k1v)
        k3v, _, _ = rhs(state + h/2*k2v)
        k4v, _, _ = rhs(state + h*k3v)
        new = state + h/6*(k1v + 2*k2v + 2*k3v + k4v)
        if not surface.contains(new[0], new[1]):
            termination = "HitBoundary"
            break
        a = new[2] % np.pi
        if min(abs(np.sin(a)), abs(np.cos(a))) < angle_eps:
            termination = "HitSingularPoint"
            state = new
        dnew, dknew, frnew = rhs(new)
        state = new
        length += h
        uv.append(state[:2].copy())
        pos.append(np.asarray(surface.position(*state[:2]), dtype=float))
        alphas.append(state[2])
        sigmas.append(sigmas[-1] + fac*dk*h)
        dalphas.append(dnew[2])
        frames.append(np.array(frnew[2:]))
        if termination == "HitSingularPoint":
            break
    closed = (len(pos) > 4
              and np.linalg.norm(pos[-1] - pos[0]) < 2*step)
    return CurveTrace(uv=np.array(uv), positions=np.array(pos), step=step,
                      closed=closed, termination=termination,
                      alpha=np.array(alphas), sigma=np.array(sigmas),
                      dalpha=np.array(dalphas), frames=np.array(frames))


# --------------------------------------------------------------------------
# critical points
# --------------------------------------------------------------------------
def darboux_critical_points(trace: CurveTrace, surface: SurfacePatch,
                            h_gen: float = 1e-4) -> List[CriticalPoint]:
    """Zeros of d alpha / d sigma along a Darboux trace.

    At each sign change of the stored derivative the zero is located by
    linear interpolation; there the algebraic relation
    theta2 tan^3(alpha) + theta1 = 0 is evaluated, the trace direction is
    compared with the Dupin field as unoriented angles against X1 (the
    documented convention: the two lines are mirror images across X1, so
    |angle| is the comparable quantity), the genericity derivative of
    log|theta1| + log|theta2| along the Dupin field is measured, and a
    discrete extremum test on alpha is run.
    """
    if trace.dalpha is None:
        return []
    out = []
    d = trace.dalpha
    for i in range(len(d) - 1):
        if d[i] == 0.0 or d[i]*d[i + 1] >= 0:
            continue
        f = d[i] / (d[i] - d[i + 1])
        uc = (1 - f)*trace.uv[i] + f*trace.uv[i + 1]
        ac = (1 - f)*trace.alpha[i] + f*trace.alpha[i + 1]
        ref = tuple(trace.frames[i]) if trace.frames is not None else None
        t1, t2, X1, X2, S = theta_state(surface, uc[0], uc[1], ref)
        rel = t2*np.tan(ac)**3 + t1
        # unoriented tangency with the Dupin field; the theta ratio stays
        # accurate arbitrarily close to the Dupin locus
        if t2 != 0.0 and abs(t1) + abs(t2) > 0.0:
            ang_dupin = np.arctan(abs(np.cbrt(t1/t2)))
            a_red = abs(ac) % np.pi
            if a_red > np.pi/2:
                a_red = np.pi - a_red
            gap = abs(a_red - ang_dupin)
            V = np.cbrt(t2)*X1 + np.cbrt(t1)*X2
            Vn = V / np.hypot(*V)

            def logth(a, b):
                r1, r2, *_ = theta_state(surface, a, b, (X1, X2))
                return np.log(abs(r1)) + np.log(abs(r2))

            gen = (logth(uc[0] + h_gen*Vn[0], uc[1] + h_gen*Vn[1])
                   - logth(uc[0] - h_gen*Vn[0], uc[1] - h_gen*Vn[1])) / \
                (2*h_gen) / S["mu"]
        else:
            gap = float("nan")
            gen = float("nan")
        j0, j1 = max(i - 1, 0), min(i + 2, len(d) - 1)
        window = trace.alpha[j0:j1 + 1]
        is_ext = bool(len(window) >= 3
                      and (window[1:-1].max() >= window[[0, -1]].max()
                           or window[1:-1].min() <= window[[0, -1]].min()))
        out.append(CriticalPoint(index=i, u=float(uc[0]), v=float(uc[1]),
                                 alpha=float(ac), relation_residual=float(rel),
                                 tangency_gap=float(gap),
                                 genericity=float(gen), is_extremum=is_ext))
    return out


# --------------------------------------------------------------------------
# circle fitting (for characteristic-circle checks)
# --------------------------------------------------------------------------
def fit_circle(points: np.ndarray):
    """Best-fit circle in 3-space: fit a plane by SVD, then an algebraic
    circle in the plane.  Returns (center, radius, max_residual) where the
    residual is the worst distance of a sample from the fitted circle."""
    P = np.asarray(points, dtype=float)
    centroid = P.mean(axis=0)
    Q = P - centroid
    _, _, Vt = np.linalg.svd(Q, full_matrices=False)
    e1, e2, n = Vt[0], Vt[1], Vt[2]
    plane_res = np.abs(Q @ n)
    x, y = Q @ e1, Q @ e2
    A = np.column_stack([2*x, 2*y, np.ones_like(x)])
    sol, *_ = np.linalg.lstsq(A, x*x + y*y, rcond=None)
    cx, cy, c0 = sol
    r = np.sqrt(c0 + cx*cx + cy*cy)
    center = centroid + cx*e1 + cy*e2
    in_plane_res = np.abs(np.hypot(x - cx, y - cy) - r)
    residual = float(max(plane_res.max(), in_plane_res.max()))
    return center, float(r), residual
