"""Intersection curves of a canonical-form surface with the cyclide pencil,
and the tangent-sphere section-angle law.

Both surfaces are quartic graphs over the common tangent plane; their
difference F(x, y) has no quadratic part, so the zero set near the origin is
governed by the cubic (and, at special parameter values, quartic) terms.
Curves are extracted by marching squares with per-edge root refinement to
machine precision, with the origin cell subdivided because F vanishes to
order >= 3 there.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import List, Optional

import numpy as np
from scipy import ndimage
from scipy.optimize import brentq

from .errors import ResolutionTooLow, UmbilicPoint, WindowTooLarge

__all__ = [
    "PlanarCurveSet", "difference_coeffs", "difference_eval",
    "check_window", "trace_cyclide_intersection", "component_count_oracle",
    "origin_branch_directions", "sphere_section_angle",
    "measure_section_angle",
]


@dataclass
class PlanarCurveSet:
    """Zero-set polylines of the surface-cyclide difference in the tangent
    plane."""
    polylines: List[np.ndarray]     # each (m, 2)
    window: float
    resolution: int
    origin_component_index: Optional[int]
    component_count: int
    component_of_polyline: List[int]
    degenerate: bool = False        # F identically zero (surface IS cyclide)
    psi_c: float = 0.0


# --------------------------------------------------------------------------
# the difference polynomial
# --------------------------------------------------------------------------
def difference_coeffs(coeffs, psi_c):
    """Coefficients of F = z_surface - z_cyclide as a dict of monomials.

    The quadratic parts coincide and cancel; the surface quartic block
    carries weights (a, 4b, 6 psi, 4c, d)/24, the cyclide quartic is
    (x^4 - y^4)/8 + psi_c x^2 y^2 / 6.
    """
    th1, th2, psi, a, b, c, d = coeffs
    return {
        (3, 0): th1/6.0,
        (0, 3): th2/6.0,
        (4, 0): a/24.0 - 1.0/8.0,
        (3, 1): b/6.0,
        (2, 2): psi/4.0 - psi_c/6.0,
        (1, 3): c/6.0,
        (0, 4): d/24.0 + 1.0/8.0,
    }


def difference_eval(coeffs, psi_c):
    mono = difference_coeffs(coeffs, psi_c)

    def F(x, y):
        out = 0.0
        for (i, j), w in mono.items():
            if w != 0.0:
                out = out + w * x**i * y**j
        return out
    return F


def check_window(coeffs, window: float):
    """Truncation-validity check: the quartic block of the canonical graph
    must stay below the quadratic one at the window edge."""
    th1, th2, psi, a, b, c, d = coeffs
    q4 = (abs(a) + 4*abs(b) + 6*abs(psi) + 4*abs(c) + abs(d)) / 24.0
    if q4 * window**4 >= 0.5 * window**2:
        raise WindowTooLarge(
            f"quartic bound {q4*window**4:.3g} >= quadratic {0.5*window**2:.3g} "
            f"at window {window}")


# --------------------------------------------------------------------------
# marching squares with root refinement
# --------------------------------------------------------------------------
def _edge_root(F, p0, p1, f0, f1):
    """Machine-precision zero of F restricted to the segment p0-p1."""
    def g(s):
        return F(p0[0] + s*(p1[0] - p0[0]), p0[1] + s*(p1[1] - p0[1]))
    s = brentq(g, 0.0, 1.0, xtol=1e-15, rtol=8.9e-16)
    return (p0[0] + s*(p1[0] - p0[0]), p0[1] + s*(p1[1] - p0[1]))


def _cell_segments(F, corners, values):
    """Marching-squares segments for one cell.

    corners: (x0,y0),(x1,y0),(x1,y1),(x0,y1) counter-clockwise with values.
    Returns a list of ((x,y), (x,y)) segments with refined endpoints.
    """
    sgn = [1 if w > 0 else -1 for w in values]
    if sgn[0] == sgn[1] == sgn[2] == sgn[3]:
        return []
    pts = []
    for k in range(4):
        k2 = (k + 1) % 4
        if sgn[k] != sgn[k2]:
            pts.append((k, _edge_root(F, corners[k], corners[k2],
                                      values[k], values[k2])))
    if len(pts) == 2:
        return [(pts[0][1], pts[1][1])]
    if len(pts) == 4:
        # saddle cell: resolve the pairing with the center sign
        cx = 0.5*(corners[0][0] + corners[2][0])
        cy = 0.5*(corners[0][1] + corners[2][1])
        center = F(cx, cy)
        same_as_corner0 = (center > 0) == (values[0] > 0)
        if same_as_corner0:
            return [(pts[0][1], pts[3][1]), (pts[1][1], pts[2][1])]
        return [(pts[0][1], pts[1][1]), (pts[2][1], pts[3][1])]
    return []


def _key(p):
    return (round(p[0], 9), round(p[1], 9))


class _UnionFind:
    def __init__(self):
        self.parent = {}

    def find(self, x):
        self.parent.setdefault(x, x)
        while self.parent[x] != x:
            self.parent[x] = self.parent[self.parent[x]]
            x = self.parent[x]
        return x

    def union(self, a, b):
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            self.parent[rb] = ra


def _stitch(segments):
    """Join segments into polylines by shared (rounded) endpoints; return
    polylines plus a component label per polyline (components join wherever
    any vertex is shared, including self-crossings)."""
    uf = _UnionFind()
    adj = {}
    for seg in segments:
        ka, kb = _key(seg[0]), _key(seg[1])
        if ka == kb:
            continue
        uf.union(ka, kb)
        adj.setdefault(ka, []).append((kb, seg[1]))
        adj.setdefault(kb, []).append((ka, seg[0]))
    used = set()
    polylines = []

    def walk(start):
        chain = [start]
        cur = start
        while True:
            nxt = None
            for kb, pb in adj[cur]:
                e = (min(cur, kb), max(cur, kb))
                if e not in used:
                    nxt = (kb, pb)
                    used.add(e)
                    break
            if nxt is None:
                break
            chain.append(nxt[0])
            cur = nxt[0]
        return chain

    # start walks at odd-degree vertices first (open curve endpoints)
    keys = sorted(adj.keys())
    for k in keys:
        if len(adj[k]) % 2 == 1:
            while any((min(k, kb), max(k, kb)) not in used for kb, _ in adj[k]):
                polylines.append(walk(k))
    for k in keys:
        while any((min(k, kb), max(k, kb)) not in used for kb, _ in adj[k]):
            polylines.append(walk(k))

    comp_roots = []
    comp_of = []
    for chain in polylines:
        root = uf.find(chain[0])
        if root not in comp_roots:
            comp_roots.append(root)
        comp_of.append(comp_roots.index(root))
    arrays = [np.array(chain, dtype=float) for chain in polylines]
    return arrays, comp_of, len(comp_roots)


def trace_cyclide_intersection(coeffs, psi_c: float, window: float = 1.0,
                               resolution: int = 128) -> PlanarCurveSet:
    """Extract the zero curves of F = z_surface - z_cyclide on
    [-window, window]^2.

    ``coeffs`` is the canonical 7-tuple (theta1, theta2, psi, a, b, c, d).
    The grid count must be even so no gridline passes through the origin,
    where F is degenerate; the cell containing the origin is subdivided 4x.
    Returns a degenerate flag instead of curves when F vanishes identically.

    Component counting convention: the origin belongs to the zero set of
    every member of the pencil and F vanishes there to order >= 3, so
    connectivity *through* the origin is not resolvable at truncation order;
    components are counted with the origin removed (curves through the
    origin count one branch per side), matching the dense sign-sampling
    oracle.  Branch structure at the origin itself is reported separately by
    :func:`origin_branch_directions`.
    """
    if resolution < 16:
        raise ResolutionTooLow(f"resolution {resolution} < 16")
    # an odd cell count gives an even number of grid points, so no gridline
    # passes through the origin where F is degenerate
    cells = resolution + 1 if resolution % 2 == 0 else resolution
    mono = difference_coeffs(coeffs, psi_c)
    if all(abs(wt) < 1e-14 for wt in mono.values()):
        return PlanarCurveSet(polylines=[], window=window,
                              resolution=resolution,
                              origin_component_index=None,
                              component_count=0, component_of_polyline=[],
                              degenerate=True, psi_c=psi_c)
    check_window(coeffs, window)
    F = difference_eval(coeffs, psi_c)
    xs = np.linspace(-window, window, cells + 1)
    X, Y = np.meshgrid(xs, xs, indexing="ij")
    V = F(X, Y)
    h = xs[1] - xs[0]
    # origin cell indices (origin strictly inside: grid point count is even)
    i0 = int(np.searchsorted(xs, 0.0)) - 1
    segments = []
    for i in range(cells):
        for j in range(cells):
            cs = [(xs[i], xs[j]), (xs[i+1], xs[j]),
                  (xs[i+1], xs[j+1]), (xs[i], xs[j+1])]
            vals = [V[i, j], V[i+1, j], V[i+1, j+1], V[i, j+1]]
            if i == i0 and j == i0:
                sub = np.linspace(xs[i], xs[i+1], 5)
                suby = np.linspace(xs[j], xs[j+1], 5)
                for a_ in range(4):
                    for b_ in range(4):
                        cs2 = [(sub[a_], suby[b_]), (sub[a_+1], suby[b_]),
                               (sub[a_+1], suby[b_+1]), (sub[a_], suby[b_+1])]
                        v2 = [F(*p) for p in cs2]
                        segments.extend(_cell_segments(F, cs2, v2))
            else:
                segments.extend(_cell_segments(F, cs, vals))
    # cut the zero set at the origin (see docstring): drop segments whose
    # endpoints both fall inside a sub-cell-sized disk around it
    r_cut = 0.45 * h
    segments = [s for s in segments
                if max(np.hypot(*s[0]), np.hypot(*s[1])) > r_cut]
    polylines, comp_of, ncomp = _stitch(segments)
    origin_idx = None
    best = np.inf
    for idx, pl in enumerate(polylines):
        dmin = float(np.min(np.hypot(pl[:, 0], pl[:, 1])))
        if dmin < min(best, 1.5*h):
            best = dmin
            origin_idx = comp_of[idx]
    return PlanarCurveSet(polylines=polylines, window=window,
                          resolution=resolution,
                          origin_component_index=origin_idx,
                          component_count=ncomp,
                          component_of_polyline=comp_of,
                          degenerate=False, psi_c=psi_c)


def component_count_oracle(coeffs, psi_c: float, window: float = 1.0,
                           n: int = 1601) -> int:
    """Brute-force component count: dense sign sampling and labeling of the
    sign-change mask with 8-connectivity."""
    F = difference_eval(coeffs, psi_c)
    xs = np.linspace(-window, window, n)
    X, Y = np.meshgrid(xs, xs, indexing="ij")
    s = np.sign(F(X, Y))
    m = np.zeros_like(s, dtype=bool)
    m[:-1, :] |= s[:-1, :]*s[1:, :] < 0
    m[:, :-1] |= s[:, :-1]*s[:, 1:] < 0
    _, ncomp = ndimage.label(m, structure=np.ones((3, 3)))
    return int(ncomp)


def origin_branch_directions(coeffs, psi_c: float, tol: float = 1e-12):
    """Tangent directions of the zero set at the origin from the lowest
    nonvanishing homogeneous part of F: angles phi in [0, pi) where the part
    vanishes on the unit circle."""
    mono = difference_coeffs(coeffs, psi_c)
    for deg in (3, 4):
        part = {k: wt for k, wt in mono.items()
                if k[0] + k[1] == deg and abs(wt) > tol}
        if part:
            break
    else:
        return []
    phis = np.linspace(0.0, np.pi, 1801, endpoint=False)

    def p(phi):
        cx, sx = np.cos(phi), np.sin(phi)
        return sum(wt * cx**i * sx**j for (i, j), wt in part.items())

    vals = list(p(phis))
    grid = list(phis)
    # close the scan at pi: directions are mod pi, and an odd-degree part
    # flips sign across it
    vals.append(-vals[0] if deg % 2 else vals[0])
    grid.append(np.pi)
    roots = []
    for k in range(len(grid) - 1):
        a_, b_ = vals[k], vals[k + 1]
        if a_ == 0.0:
            roots.append(grid[k])
        elif a_*b_ < 0:
            roots.append(brentq(p, grid[k], grid[k + 1]))
    return sorted(r % np.pi for r in roots)


# --------------------------------------------------------------------------
# tangent-sphere sections
# --------------------------------------------------------------------------
def sphere_section_angle(k1: float, k2: float, alpha: float) -> float:
    """Predicted crossing angle 2*alpha of the two branches cut on the
    surface by the tangent sphere of normal curvature
    k = cos^2(alpha) k1 + sin^2(alpha) k2."""
    if abs(k1 - k2) < 1e-12 * max(abs(k1), abs(k2), 1.0):
        raise UmbilicPoint("section-angle law undefined at an umbilic")
    return 2.0 * alpha


def measure_section_angle(alpha: float, k1: float = 1.0, k2: float = -1.0,
                          surface_fn=None, radius: float = 1e-3) -> float:
    """Numerically measured branch-crossing angle at the origin.

    Intersects the tangent sphere of normal curvature
    k = cos^2(alpha) k1 + sin^2(alpha) k2 with the surface graph (default:
    the canonical quadratic z = (x^2 - y^2)/2) and measures the angle
    between the two zero-branch lines on a small circle.  Tangential
    (cusp-type) intersections, where the difference does not change sign,
    report the angle between the |difference|-minimizing directions (0 for a
    cusp).
    """
    if surface_fn is None:
        def surface_fn(x, y):
            return 0.5*(x*x - y*y)
    k = np.cos(alpha)**2 * k1 + np.sin(alpha)**2 * k2

    def G(x, y):
        r2 = x*x + y*y
        if abs(k) < 1e-14:
            zs = 0.0
        else:
            zs = (1.0 - np.sqrt(1.0 - k*k*r2)) / k
        return surface_fn(x, y) - zs

    phis = np.linspace(0.0, 2*np.pi, 2001, endpoint=False)
    vals = np.array([G(radius*np.cos(p), radius*np.sin(p)) for p in phis])
    roots = []
    for i in range(len(phis)):
        j = (i + 1) % len(phis)
        if vals[i] == 0.0:
            roots.append(phis[i])
        elif vals[i]*vals[j] < 0:
            lo = phis[i]
            hi = phis[i] + 2*np.pi/2001
            roots.append(brentq(
                lambda p: G(radius*np.cos(p), radius*np.sin(p)), lo, hi))
    lines = sorted({round(r % np.pi, 6) for r in roots})
    if len(lines) < 2:
        # tangential contact: take the two |G|-minimizing directions
        half = vals[:1000 + 1]
        idx = np.argsort(np.abs(half))[:2]
        lines = sorted(set(np.round(phis[idx] % np.pi, 6)))
        if len(lines) < 2:
            return 0.0
    # crossing angle: separation of the two branch lines measured across the
    # first-principal-direction axis (phi = 0), so an obtuse crossing is not
    # folded to its supplement
    folded = [ln if ln <= np.pi/2 else ln - np.pi for ln in lines[:2]]
    pos = [f for f in folded if f >= 0]
    neg = [f for f in folded if f < 0]
    if pos and neg:
        return min(pos) - max(neg)
    gap = abs(folded[1] - folded[0])
    return min(gap, np.pi - gap)
