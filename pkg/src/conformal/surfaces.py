"""Surface kernel: parametric patches, derivative jets, classical curvature
data, and ambient Mobius transformations.

Only the position map and its low-order partial derivatives are evaluated
analytically (closed forms compiled once per patch).  Everything built on top
of them (curvature gradients, invariant fields) lives in other modules and is
obtained by differencing the pointwise quantities, never by deeper jets.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np
import sympy as sp

from .errors import (DegenerateMetric, InversionCenterOnSurface, OrderUnavailable,
                     OutOfDomain, UmbilicPoint)

__all__ = [
    "SurfacePatch", "Jet", "PrincipalData", "MobiusMap",
    "eval_jet", "principal_data", "mobius_transform",
]

_TOL_UMB = 1e-8


# --------------------------------------------------------------------------
# jets
# --------------------------------------------------------------------------
@dataclass(frozen=True)
class Jet:
    """Partial derivatives of the position map at one parameter point.

    ``derivs[(i, j)]`` is the 3-vector d^(i+j) r / du^i dv^j for i + j <= order.
    """
    u: float
    v: float
    order: int
    derivs: dict

    def d(self, i: int, j: int) -> np.ndarray:
        return self.derivs[(i, j)]


def _deriv_index(order: int) -> list:
    return [(i, j) for n in range(order + 1) for i, j in
            [(n - j, j) for j in range(n + 1)]]


class SurfacePatch:
    """Evaluable parametric surface r(u, v) with derivative jets.

    The jet source is either *analytic* (a compiled closed form, supplied with
    a sympy position matrix) or *numeric* (central differences of a plain
    position callable with step ``h_jet``).
    """

    def __init__(self, domain, max_order=4, name="surface", expr=None,
                 symbols=None, position_fn=None, h_jet=1e-4):
        self.domain = tuple((float(a), float(b)) for a, b in domain)
        self.max_order = int(max_order)
        self.name = name
        self._expr = expr
        self._symbols = symbols
        self._pos_fn = position_fn
        self.h_jet = float(h_jet)
        self._jet_fn = None
        if expr is not None:
            idx = _deriv_index(self.max_order)
            us, vs = symbols
            flat = []
            for (i, j) in idx:
                d = sp.diff(expr, us, i, vs, j)
                flat.extend([d[0], d[1], d[2]])
            self._jet_idx = idx
            self._jet_fn = sp.lambdify((us, vs), flat, "numpy")

    # -- constructors ------------------------------------------------------
    @classmethod
    def from_sympy(cls, expr, symbols, domain, max_order=4, name="surface"):
        return cls(domain, max_order=max_order, name=name,
                   expr=sp.Matrix(expr), symbols=symbols)

    @classmethod
    def from_position(cls, fn, domain, h_jet=1e-4, max_order=3, name="surface"):
        return cls(domain, max_order=max_order, name=name,
                   position_fn=fn, h_jet=h_jet)

    # -- basic queries -----------------------------------------------------
    @property
    def analytic(self) -> bool:
        return self._jet_fn is not None

    def contains(self, u, v, margin=0.0):
        (u0, u1), (v0, v1) = self.domain
        return (u0 + margin <= u <= u1 - margin
                and v0 + margin <= v <= v1 - margin)

    def position(self, u, v) -> np.ndarray:
        if self.analytic:
            vals = self._jet_fn(u, v)
            return np.asarray(vals[:3], dtype=complex if np.iscomplexobj(u)
                              or np.iscomplexobj(v) else float)
        return np.asarray(self._pos_fn(u, v), dtype=float)

    # -- jets --------------------------------------------------------------
    def jet_raw(self, u, v, order=2) -> dict:
        """Jet derivatives without domain checks; supports complex (u, v) for
        analytic patches (used by the complex-step machinery upstream)."""
        if self.analytic:
            if order > self.max_order:
                raise OrderUnavailable(
                    f"order {order} > max_order {self.max_order}")
            vals = self._jet_fn(u, v)
            out = {}
            for k, (i, j) in enumerate(self._jet_idx):
                if i + j <= order:
                    out[(i, j)] = np.asarray(vals[3*k:3*k + 3])
            return out
        return self._numeric_jet(u, v, order)

    def _numeric_jet(self, u, v, order) -> dict:
        h = self.h_jet
        f = self._pos_fn
        out = {(0, 0): np.asarray(f(u, v), dtype=float)}
        if order >= 1:
            out[(1, 0)] = (np.asarray(f(u + h, v)) - np.asarray(f(u - h, v))) / (2*h)
            out[(0, 1)] = (np.asarray(f(u, v + h)) - np.asarray(f(u, v - h))) / (2*h)
        if order >= 2:
            out[(2, 0)] = (np.asarray(f(u + h, v)) - 2*out[(0, 0)]
                           + np.asarray(f(u - h, v))) / h**2
            out[(0, 2)] = (np.asarray(f(u, v + h)) - 2*out[(0, 0)]
                           + np.asarray(f(u, v - h))) / h**2
            out[(1, 1)] = (np.asarray(f(u + h, v + h)) - np.asarray(f(u + h, v - h))
                           - np.asarray(f(u - h, v + h))
                           + np.asarray(f(u - h, v - h))) / (4*h**2)
        if order >= 3:
            def du(a, b):
                return (np.asarray(f(a + h, b)) - np.asarray(f(a - h, b))) / (2*h)
            out[(3, 0)] = (du(u + h, v) - 2*out.get((1, 0)) + du(u - h, v)) / h**2
            out[(2, 1)] = (out_p := None) or (
                (np.asarray(f(u + h, v + h)) - 2*np.asarray(f(u, v + h))
                 + np.asarray(f(u - h, v + h))
                 - np.asarray(f(u + h, v - h)) + 2*np.asarray(f(u, v - h))
                 - np.asarray(f(u - h, v - h))) / (2*h**3))
            out[(1, 2)] = ((np.asarray(f(u + h, v + h)) - 2*np.asarray(f(u + h, v))
                            + np.asarray(f(u + h, v - h))
                            - np.asarray(f(u - h, v + h)) + 2*np.asarray(f(u - h, v))
                            - np.asarray(f(u - h, v - h))) / (2*h**3))
            def dv(a, b):
                return (np.asarray(f(a, b + h)) - np.asarray(f(a, b - h))) / (2*h)
            out[(0, 3)] = (dv(u, v + h) - 2*out.get((0, 1)) + dv(u, v - h)) / h**2
        if order >= 4:
            raise OrderUnavailable("numeric jets support order <= 3")
        return out


def eval_jet(surface: SurfacePatch, u: float, v: float, order: int = 2,
             richardson: bool = False) -> Jet:
    """Evaluate the derivative jet of ``surface`` at an interior point.

    For numeric sources, ``richardson=True`` combines steps h and h/2 for an
    extra order of accuracy on each partial.
    """
    if not surface.contains(u, v):
        raise OutOfDomain(f"({u}, {v}) outside {surface.domain}")
    if order > surface.max_order:
        raise OrderUnavailable(f"order {order} > max_order {surface.max_order}")
    if richardson and not surface.analytic:
        coarse = surface.jet_raw(u, v, order)
        h0 = surface.h_jet
        surface.h_jet = h0 / 2
        try:
            fine = surface.jet_raw(u, v, order)
        finally:
            surface.h_jet = h0
        derivs = {k: (4*fine[k] - coarse[k]) / 3 for k in coarse}
    else:
        derivs = surface.jet_raw(u, v, order)
    return Jet(u=u, v=v, order=order, derivs=derivs)


# --------------------------------------------------------------------------
# curvature data
# --------------------------------------------------------------------------
@dataclass(frozen=True)
class PrincipalData:
    """Pointwise curvature package; k1 > k2 strictly."""
    k1: float
    k2: float
    H: float
    K: float
    mu: float
    X1: np.ndarray       # parameter coordinates, metric-unit
    X2: np.ndarray
    X1_amb: np.ndarray   # ambient 3-vectors, unit
    X2_amb: np.ndarray
    normal: np.ndarray
    E: float
    F: float
    G: float
    W: np.ndarray        # shape operator in the (ru, rv) basis
    r: np.ndarray
    ru: np.ndarray
    rv: np.ndarray


def shape_data(derivs: dict) -> dict:
    """First/second fundamental forms and shape operator from order-2 jet
    derivatives.  Works elementwise on complex inputs (all products are
    plain, non-conjugating)."""
    r0 = derivs[(0, 0)]
    ru, rv = derivs[(1, 0)], derivs[(0, 1)]
    ruu, ruv, rvv = derivs[(2, 0)], derivs[(1, 1)], derivs[(0, 2)]
    E = ru @ ru
    F = ru @ rv
    G = rv @ rv
    g = E*G - F*F
    nv = np.cross(ru, rv)
    n = nv / np.sqrt(nv @ nv)
    L, M, N = ruu @ n, ruv @ n, rvv @ n
    W = np.array([[G*L - F*M, G*M - F*N],
                  [E*M - F*L, E*N - F*M]]) / g
    H = (W[0, 0] + W[1, 1]) / 2
    K = W[0, 0]*W[1, 1] - W[0, 1]*W[1, 0]
    mu = np.sqrt(H*H - K)
    return dict(E=E, F=F, G=G, g=g, L=L, M=M, N=N, W=W, n=n,
                H=H, K=K, mu=mu, k1=H + mu, k2=H - mu,
                r=r0, ru=ru, rv=rv)


def principal_directions(S: dict, ref=None):
    """Metric-unit principal directions in parameter coordinates.

    Of the two eigenvector candidate expressions for each eigenvalue the
    better-conditioned one is used.  Signs follow ``ref`` (a previous frame)
    when given, otherwise X1 aligns with the +u axis and X2 with +v.
    """
    W, k1, k2 = S["W"], S["k1"], S["k2"]
    cand1 = [np.array([W[0, 1], k1 - W[0, 0]]),
             np.array([k1 - W[1, 1], W[1, 0]])]
    cand2 = [np.array([k2 - W[1, 1], W[1, 0]]),
             np.array([W[0, 1], k2 - W[0, 0]])]
    out = []
    refs = (None, None) if ref is None else ref
    for cands, rf, axis in zip((cand1, cand2), refs, (0, 1)):
        w = max(cands, key=lambda c: abs(c[0]) + abs(c[1]))
        nrm2 = S["E"]*w[0]**2 + 2*S["F"]*w[0]*w[1] + S["G"]*w[1]**2
        w = w / np.sqrt(nrm2)
        if rf is not None:
            if (w @ rf).real < 0:
                w = -w
        elif w[axis].real < 0 or (w[axis].real == 0 and w[1 - axis].real < 0):
            w = -w
        out.append(w)
    return out


def principal_data(jet: Jet, ref=None, tol_umb: float = _TOL_UMB) -> PrincipalData:
    """Eigen-decomposition of the shape operator at a jet point.

    Raises :class:`UmbilicPoint` when k1 - k2 falls under the (relative)
    umbilic tolerance, :class:`DegenerateMetric` when the first fundamental
    form is singular.
    """
    S = shape_data(jet.derivs)
    scale = max(abs(S["E"]), abs(S["G"]))
    if not np.isfinite(S["g"]) or abs(S["g"]) < 1e-14 * scale**2:
        raise DegenerateMetric(f"det I = {S['g']!r}")
    if S["mu"] < tol_umb * max(abs(S["k1"]), abs(S["k2"]), 1.0):
        raise UmbilicPoint(f"k1 = {S['k1']!r}, k2 = {S['k2']!r}")
    X1, X2 = principal_directions(S, ref)
    X1a = X1[0]*S["ru"] + X1[1]*S["rv"]
    X2a = X2[0]*S["ru"] + X2[1]*S["rv"]
    return PrincipalData(k1=S["k1"], k2=S["k2"], H=S["H"], K=S["K"], mu=S["mu"],
                         X1=X1, X2=X2, X1_amb=X1a, X2_amb=X2a, normal=S["n"],
                         E=S["E"], F=S["F"], G=S["G"], W=S["W"],
                         r=S["r"], ru=S["ru"], rv=S["rv"])


# --------------------------------------------------------------------------
# Mobius maps
# --------------------------------------------------------------------------
@dataclass(frozen=True)
class MobiusMap:
    """Composition of primitive ambient maps, applied left to right.

    Primitives: ``("rotation", O)`` with orthonormal 3x3 O (any sign of
    determinant), ``("translation", t)``, ``("dilation", s)`` with s > 0 and
    ``("inversion",)`` for x -> x / |x|^2.
    """
    primitives: tuple

    # -- constructors ------------------------------------------------------
    @staticmethod
    def identity() -> "MobiusMap":
        return MobiusMap(())

    @staticmethod
    def rotation(O) -> "MobiusMap":
        O = np.asarray(O, dtype=float)
        if not np.allclose(O @ O.T, np.eye(3), atol=1e-12):
            raise ValueError("rotation matrix must be orthonormal")
        return MobiusMap((("rotation", O),))

    @staticmethod
    def translation(t) -> "MobiusMap":
        return MobiusMap((("translation", np.asarray(t, dtype=float)),))

    @staticmethod
    def dilation(s: float) -> "MobiusMap":
        if not s > 0:
            raise ValueError("dilation factor must be positive")
        return MobiusMap((("dilation", float(s)),))

    @staticmethod
    def inversion() -> "MobiusMap":
        return MobiusMap((("inversion",),))

    def then(self, other: "MobiusMap") -> "MobiusMap":
        return MobiusMap(self.primitives + other.primitives)

    # -- application -------------------------------------------------------
    def apply(self, x) -> np.ndarray:
        """Apply to points (shape (..., 3))."""
        y = np.asarray(x, dtype=float)
        for prim in self.primitives:
            kind = prim[0]
            if kind == "rotation":
                y = y @ prim[1].T
            elif kind == "translation":
                y = y + prim[1]
            elif kind == "dilation":
                y = prim[1] * y
            else:
                n2 = np.sum(y*y, axis=-1, keepdims=True)
                y = y / n2
        return y

    def apply_sympy(self, x: sp.Matrix) -> sp.Matrix:
        y = sp.Matrix(x)
        for prim in self.primitives:
            kind = prim[0]
            if kind == "rotation":
                y = sp.Matrix(prim[1]) * y
            elif kind == "translation":
                y = y + sp.Matrix(prim[1])
            elif kind == "dilation":
                y = prim[1] * y
            else:
                y = y / y.dot(y)
        return y

    @property
    def orientation_preserving(self) -> bool:
        """Sign of the ambient orientation action (inversion reverses it,
        as does a rotation primitive with det = -1)."""
        sgn = 1.0
        for prim in self.primitives:
            if prim[0] == "rotation":
                sgn *= np.sign(np.linalg.det(prim[1]))
            elif prim[0] == "inversion":
                sgn *= -1.0
        return sgn > 0

    def inverse(self) -> "MobiusMap":
        out = []
        for prim in reversed(self.primitives):
            kind = prim[0]
            if kind == "rotation":
                out.append(("rotation", prim[1].T))
            elif kind == "translation":
                out.append(("translation", -prim[1]))
            elif kind == "dilation":
                out.append(("dilation", 1.0 / prim[1]))
            else:
                out.append(("inversion",))
        return MobiusMap(tuple(out))


def _check_inversion_centers(surface: SurfacePatch, mmap: MobiusMap,
                             samples: int = 12) -> None:
    (u0, u1), (v0, v1) = surface.domain
    us = np.linspace(u0, u1, samples)
    vs = np.linspace(v0, v1, samples)
    pts = np.array([surface.position(a, b) for a in us for b in vs])
    from scipy.optimize import minimize
    uv = [(a, b) for a in us for b in vs]
    partial = MobiusMap(())
    for prim in mmap.primitives:
        if prim[0] == "inversion":
            dists = np.linalg.norm(partial.apply(pts), axis=-1)
            k = int(np.argmin(dists))
            # refine the closest sample: the center may sit between samples
            part = partial

            def d2(x):
                return float(np.sum(part.apply(
                    np.asarray(surface.position(x[0], x[1])))**2))

            res = minimize(d2, np.array(uv[k]), method="Nelder-Mead",
                           options={"xatol": 1e-10, "fatol": 1e-20})
            dmin = np.sqrt(max(res.fun, 0.0))
            scale = max(np.max(dists), 1.0)
            if dmin < 1e-6 * scale:
                raise InversionCenterOnSurface(
                    f"surface passes within {dmin:g} of an inversion center")
        partial = partial.then(MobiusMap((prim,)))


def mobius_transform(surface: SurfacePatch, mmap: MobiusMap) -> SurfacePatch:
    """Surface whose position map is the composition ``mmap o r``.

    Analytic patches stay analytic (the primitives are rational/orthogonal,
    so the composed closed form is re-compiled); numeric patches compose the
    position callable and re-difference.
    """
    _check_inversion_centers(surface, mmap)
    name = surface.name + "*"
    if surface.analytic:
        new_expr = mmap.apply_sympy(surface._expr)
        return SurfacePatch.from_sympy(new_expr, surface._symbols,
                                       surface.domain,
                                       max_order=surface.max_order, name=name)
    fn = surface._pos_fn

    def moved(u, v):
        return mmap.apply(np.asarray(fn(u, v), dtype=float))

    return SurfacePatch.from_position(moved, surface.domain,
                                      h_jet=surface.h_jet,
                                      max_order=surface.max_order, name=name)
