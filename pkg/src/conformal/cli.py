"""Command-line front end: surface specs in, CSV/JSON artifacts out.

Output is deterministic: fixed row order, floats rendered with %.12g,
masked values as empty CSV fields; JSON reports embed the tool version and
the fully resolved configuration.  Tool errors exit with code 3 and a
machine-readable JSON error record on stderr; configuration errors exit
with code 2.
"""
from __future__ import annotations

import json
import sys

import click
import numpy as np

from . import __version__
from .errors import (CanalPoint, DegenerateDenominator, DupinPoint,
                     ToolkitError, UmbilicPoint)
from .catalog import (CatalogEntry, make_canonical, make_graph, make_helcat,
                      make_torus, make_tube)
from .intersect import trace_cyclide_intersection
from .invariants import invariant_sample, psi_from_thetas
from .linefields import (darboux_critical_points, integrate_darboux_line,
                         integrate_dupin_line)
from .osculation import (_psi_c_from_profile, osculating_cyclide,
                         verify_contact_order)
from .prescribe import helcat_grid, prescribe

_TABLE_ROWS = [
    ("0", 0.0, (1.5, 1.5, 1.5)),
    ("pi/100", np.pi/100, (1.54, 1.79, 3.18)),
    ("pi/7.384663", np.pi/7.384663, (2.0, 5.12, 31.7)),
    ("pi/6", np.pi/6, (2.07, 5.84, 37.96)),
    ("pi/4", np.pi/4, (2.17, 7.44, 52.34)),
    ("pi/3", np.pi/3, (2.12, 8.44, 62.33)),
    ("pi/2.25", np.pi/2.25, (1.82, 8.6, 66.32)),
    ("pi/2.1", np.pi/2.1, (1.68, 8.29, 64.62)),
    ("pi/2.01", np.pi/2.01, (1.53, 1.79, 61.68)),
]
# reference cell reported with a discrepancy note instead of being matched
_FLAGGED_CELL = ("pi/2.01", 1)


# --------------------------------------------------------------------------
# formatting helpers
# --------------------------------------------------------------------------
def _fmt(x) -> str:
    if x is None:
        return ""
    if isinstance(x, float) and not np.isfinite(x):
        return ""
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        return "%.12g" % float(x)
    return str(x)


def _emit(rows, header, out, fmt, meta=None):
    if fmt == "csv":
        lines = [",".join(header)]
        lines += [",".join(_fmt(x) for x in row) for row in rows]
        text = "\n".join(lines) + "\n"
    else:
        payload = {"version": __version__, "config": meta or {},
                   "header": list(header),
                   "rows": [[None if (c := _fmt(x)) == "" else
                             (c if not _is_number(x) else float("%.12g" % x))
                             for x in row] for row in rows]}
        text = json.dumps(payload, indent=1, sort_keys=True) + "\n"
    if out:
        with open(out, "w") as fh:
            fh.write(text)
    else:
        click.echo(text, nl=False)


def _is_number(x):
    return isinstance(x, (int, float, np.integer, np.floating)) \
        and not isinstance(x, (bool, np.bool_))


def _fail(exc: Exception, code: int):
    rec = {"error": type(exc).__name__, "message": str(exc)}
    click.echo(json.dumps(rec), err=True)
    sys.exit(code)


# --------------------------------------------------------------------------
# surface spec files
# --------------------------------------------------------------------------
def load_surface_spec(path: str) -> CatalogEntry:
    """Parse a key = value spec file into a catalog entry.

    Keys: kind (helcat|torus|tube|graph|canonical), alpha_h, R, r, radius,
    curve ("circle <R>" or "helix <A> <B>"), coeffs (7 comma- or
    space-separated numbers for canonical; "i j c; ..." monomials for
    graph).
    """
    kv = {}
    with open(path) as fh:
        for line in fh:
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ValueError(f"bad spec line: {line!r}")
            key, val = line.split("=", 1)
            kv[key.strip()] = val.strip()
    kind = kv.get("kind")
    if kind == "helcat":
        return make_helcat(float(kv["alpha_h"]))
    if kind == "torus":
        return make_torus(float(kv["R"]), float(kv["r"]))
    if kind == "tube":
        parts = kv["curve"].split()
        curve = (parts[0],) + tuple(float(p) for p in parts[1:])
        return make_tube(curve, float(kv["radius"]))
    if kind == "graph":
        poly = {}
        for term in kv["coeffs"].split(";"):
            term = term.strip()
            if term:
                i, j, cc = term.split()
                poly[(int(i), int(j))] = float(cc)
        return make_graph(poly)
    if kind == "sphere":
        import sympy as sp
        from .surfaces import SurfacePatch
        rad = float(kv.get("radius", 1.0))
        u, v = sp.symbols("u v", real=True)
        expr = sp.Matrix([rad*sp.cos(u)*sp.cos(v), rad*sp.sin(u)*sp.cos(v),
                          rad*sp.sin(v)])
        patch = SurfacePatch.from_sympy(
            expr, (u, v), [(-np.pi, np.pi), (-1.4, 1.4)], name="sphere")
        return CatalogEntry(name="sphere", surface=patch,
                            params={"radius": rad})
    if kind == "canonical":
        nums = [float(x) for x in kv["coeffs"].replace(",", " ").split()]
        if len(nums) != 7:
            raise ValueError("canonical coeffs needs 7 numbers")
        return make_canonical(*nums)
    raise ValueError(f"unknown surface kind {kind!r}")


def _parse_grid(text):
    n1, n2 = text.lower().split("x")
    n1, n2 = int(n1), int(n2)
    if min(n1, n2) < 8:
        raise ValueError("grid resolution must be >= 8")
    return n1, n2


def _parse_range(text, surface):
    if text is None:
        (u0, u1), (v0, v1) = surface.domain
        return float(u0), float(u1), float(v0), float(v1)
    upart, vpart = text.split(",")
    u0, u1 = (float(x) for x in upart.split(":"))
    v0, v1 = (float(x) for x in vpart.split(":"))
    return u0, u1, v0, v1


def _grid_points(surface, grid, rng):
    n1, n2 = _parse_grid(grid)
    u0, u1, v0, v1 = _parse_range(rng, surface)
    us = np.linspace(u0, u1, n1)
    vs = np.linspace(v0, v1, n2)
    return us, vs


def _parse_seed(text):
    a, b = text.split(",")
    return float(a), float(b)


# --------------------------------------------------------------------------
# CLI group
# --------------------------------------------------------------------------
@click.group()
@click.version_option(version=__version__)
def main():
    """Conformal-geometry toolkit command line."""


_surface_opt = click.option("--surface", "surface_path", required=True,
                            type=click.Path(exists=True, dir_okay=False))
_out_opt = click.option("--out", "out", default=None,
                        type=click.Path(dir_okay=False))
_fmt_opt = click.option("--format", "fmt", default="csv",
                        type=click.Choice(["csv", "json"]))


def _wrap(fn, *args, **kwargs):
    import warnings
    try:
        with np.errstate(all="ignore"), warnings.catch_warnings():
            warnings.simplefilter("ignore", RuntimeWarning)
            return fn(*args, **kwargs)
    except ToolkitError as exc:
        _fail(exc, 3)
    except (ValueError, KeyError, OSError) as exc:
        _fail(exc, 2)


@main.command("invariants")
@_surface_opt
@_out_opt
@_fmt_opt
@click.option("--grid", default="16x16")
@click.option("--range", "rng", default=None)
@click.option("--tol-canal", default=1e-6, type=float)
def cmd_invariants(surface_path, out, fmt, grid, rng, tol_canal):
    """Pointwise invariant sweep over a parameter grid."""
    def run():
        entry = load_surface_spec(surface_path)
        us, vs = _grid_points(entry.surface, grid, rng)
        header = ["u", "v", "k1", "k2", "H", "mu", "theta1", "theta2",
                  "psi", "a", "b", "c", "d", "class"]
        rows = []
        for u in us:
            for v in vs:
                try:
                    s = invariant_sample(entry.surface, u, v,
                                         tol_canal=tol_canal)
                    pd = s.pd
                    rows.append([u, v, pd.k1, pd.k2, pd.H, pd.mu,
                                 s.theta1, s.theta2, s.psi, s.a, s.b, s.c,
                                 s.d, s.classification])
                except UmbilicPoint:
                    rows.append([u, v] + [None]*11 + ["Umbilic"])
                except ToolkitError:
                    rows.append([u, v] + [None]*11 + ["Masked"])
        _emit(rows, header, out, fmt,
              {"surface": surface_path, "grid": grid, "range": rng})
    _wrap(run)


@main.command("classify")
@_surface_opt
@_out_opt
@_fmt_opt
@click.option("--grid", default="16x16")
@click.option("--range", "rng", default=None)
@click.option("--tol-canal", default=1e-6, type=float)
def cmd_classify(surface_path, out, fmt, grid, rng, tol_canal):
    """Point classification sweep (Generic/Canal/Dupin/Umbilic)."""
    def run():
        entry = load_surface_spec(surface_path)
        us, vs = _grid_points(entry.surface, grid, rng)
        rows = []
        for u in us:
            for v in vs:
                try:
                    s = invariant_sample(entry.surface, u, v,
                                         tol_canal=tol_canal,
                                         with_coeffs=False)
                    rows.append([u, v, s.classification])
                except UmbilicPoint:
                    rows.append([u, v, "Umbilic"])
        _emit(rows, ["u", "v", "class"], out, fmt,
              {"surface": surface_path, "grid": grid, "range": rng})
    _wrap(run)


@main.command("osculate")
@_surface_opt
@_out_opt
@_fmt_opt
@click.option("--seed", "seeds", multiple=True, required=True)
def cmd_osculate(surface_path, out, fmt, seeds):
    """Osculating-cyclide data at the given seed points."""
    def run():
        entry = load_surface_spec(surface_path)
        header = ["u", "v", "t", "alpha", "psi_c", "contact_order",
                  "limit_derived"]
        rows = []
        for text in seeds:
            u, v = _parse_seed(text)
            try:
                c = osculating_cyclide(entry.surface, u, v)
                rows.append([u, v, c.t, c.alpha, c.psi_c,
                             verify_contact_order(entry.surface, c),
                             c.limit_derived])
            except (CanalPoint, DupinPoint):
                rows.append([u, v, None, None, None, None, None])
        _emit(rows, header, out, fmt,
              {"surface": surface_path, "seeds": list(seeds)})
    _wrap(run)


def _trace_rows(traces, with_angles=False):
    header = ["curve_id", "k", "u", "v", "x", "y", "z"]
    if with_angles:
        header += ["alpha", "sigma"]
    header += ["closed", "termination"]
    rows = []
    for cid, tr in enumerate(traces):
        for k in range(len(tr.uv)):
            row = [cid, k, tr.uv[k, 0], tr.uv[k, 1],
                   tr.positions[k, 0], tr.positions[k, 1],
                   tr.positions[k, 2]]
            if with_angles:
                row += [tr.alpha[k], tr.sigma[k]]
            row += [tr.closed, tr.termination]
            rows.append(row)
    return rows, header


@main.command("dupin-lines")
@_surface_opt
@_out_opt
@_fmt_opt
@click.option("--seed", "seeds", multiple=True, required=True)
@click.option("--step", default=0.01, type=float)
@click.option("--max-length", default=10.0, type=float)
def cmd_dupin_lines(surface_path, out, fmt, seeds, step, max_length):
    """Integrate the distinguished tangency direction field."""
    def run():
        entry = load_surface_spec(surface_path)
        traces = [integrate_dupin_line(entry.surface, _parse_seed(s),
                                       step=step, max_length=max_length)
                  for s in seeds]
        rows, header = _trace_rows(traces)
        _emit(rows, header, out, fmt,
              {"surface": surface_path, "seeds": list(seeds),
               "step": step, "max_length": max_length})
    _wrap(run)


@main.command("darboux")
@_surface_opt
@_out_opt
@_fmt_opt
@click.option("--seed", "seeds", multiple=True, required=True)
@click.option("--alpha0", default=None, type=float)
@click.option("--step", default=0.005, type=float)
@click.option("--max-length", default=5.0, type=float)
@click.option("--orient", default=1, type=int)
def cmd_darboux(surface_path, out, fmt, seeds, alpha0, step, max_length,
                orient):
    """Integrate fixed-angle direction traces and report angle criticals."""
    def run():
        entry = load_surface_spec(surface_path)
        traces = []
        crit_rows = []
        for s in seeds:
            uv = _parse_seed(s)
            if alpha0 is None:
                from .invariants import theta_state
                t1, t2, *_ = theta_state(entry.surface, *uv)
                a0 = -np.arctan(np.cbrt(-t1/t2))
            else:
                a0 = alpha0
            tr = integrate_darboux_line(entry.surface, uv, a0, step=step,
                                        max_length=max_length, orient=orient)
            for cp in darboux_critical_points(tr, entry.surface):
                crit_rows.append([len(traces), cp.index, cp.u, cp.v,
                                  cp.alpha, cp.relation_residual,
                                  cp.tangency_gap, cp.genericity,
                                  cp.is_extremum])
            traces.append(tr)
        rows, header = _trace_rows(traces, with_angles=True)
        meta = {"surface": surface_path, "seeds": list(seeds),
                "alpha0": alpha0, "step": step, "max_length": max_length,
                "criticals_header": ["curve_id", "index", "u", "v", "alpha",
                                     "relation_residual", "tangency_gap",
                                     "genericity", "is_extremum"],
                "criticals": [[_fmt(x) for x in r] for r in crit_rows]}
        _emit(rows, header, out, fmt, meta)
    _wrap(run)


@main.command("intersect")
@_surface_opt
@_out_opt
@_fmt_opt
@click.option("--psi-c", "psi_c", default=None, type=float)
@click.option("--window", default=1.0, type=float)
@click.option("--grid", default="128x128")
def cmd_intersect(surface_path, out, fmt, psi_c, window, grid):
    """Trace the intersection of a canonical graph with a cyclide."""
    def run():
        entry = load_surface_spec(surface_path)
        coeffs = entry.params.get("invariants")
        if coeffs is None:
            raise ValueError("intersect needs a canonical surface spec")
        if psi_c is None:
            # osculating value straight from the prescribed invariants
            t1, t2, ps, av, bv, cv, dv = coeffs
            t_eff = -np.cbrt(t1/t2)
            pc = float(_psi_c_from_profile((av, bv, cv, dv), ps, t_eff))
        else:
            pc = psi_c
        n = _parse_grid(grid)[0]
        cs = trace_cyclide_intersection(coeffs, pc, window=window,
                                        resolution=n)
        header = ["curve_id", "component", "k", "x", "y"]
        rows = []
        for cid, pl in enumerate(cs.polylines):
            comp = cs.component_of_polyline[cid]
            for k in range(len(pl)):
                rows.append([cid, comp, k, pl[k, 0], pl[k, 1]])
        meta = {"surface": surface_path, "psi_c": pc, "window": window,
                "resolution": n, "component_count": cs.component_count,
                "origin_component_index": cs.origin_component_index,
                "degenerate": cs.degenerate}
        _emit(rows, header, out, fmt, meta)
    _wrap(run)


@main.command("prescribe")
@_surface_opt
@_out_opt
@click.option("--grid", default="65x65")
def cmd_prescribe(surface_path, out, grid):
    """Run the coframe construction pipeline and report realizability."""
    def run():
        entry = load_surface_spec(surface_path)
        alpha_h = entry.params.get("alpha_h")
        if alpha_h is None:
            raise ValueError("prescribe expects a helcat surface spec")
        n = _parse_grid(grid)[0]
        g = helcat_grid(alpha_h, n)
        kap = float(g.kappa[0, 0])
        grid_out, rep = prescribe(g.kappa, g.f2, g.f1[:, 0], g.x1, g.x2)
        payload = {
            "version": __version__,
            "config": {"surface": surface_path, "grid": grid,
                       "kappa": kap},
            "max_norm": {k: _fmt(v) for k, v in rep.max_norm.items()},
            "rms": {k: _fmt(v) for k, v in rep.rms.items()},
            "margin": rep.margin,
            "order": rep.order,
            "extra": {k: _fmt(v) for k, v in rep.extra.items()},
            "realizable": bool(rep.extra["realizable"]),
        }
        text = json.dumps(payload, indent=1, sort_keys=True) + "\n"
        if out:
            with open(out, "w") as fh:
                fh.write(text)
        else:
            click.echo(text, nl=False)
    _wrap(run)


@main.command("verify")
@_surface_opt
@_out_opt
@_fmt_opt
@click.option("--seed", "seeds", multiple=True, required=True)
@click.option("--tol-xcheck", default=1e-2, type=float)
def cmd_verify(surface_path, out, fmt, seeds, tol_xcheck):
    """Cross-check the two independent fourth-invariant paths at seeds."""
    def run():
        entry = load_surface_spec(surface_path)
        header = ["u", "v", "psi_field", "psi_thetas", "gap", "status"]
        rows = []
        ok = True
        for text in seeds:
            u, v = _parse_seed(text)
            s = invariant_sample(entry.surface, u, v)
            try:
                p2 = psi_from_thetas(entry.surface, u, v)
                gap = abs(s.psi - p2)
                status = "ok" if gap < tol_xcheck else "mismatch"
                ok = ok and gap < tol_xcheck
                rows.append([u, v, s.psi, p2, gap, status])
            except DegenerateDenominator:
                rows.append([u, v, s.psi, None, None, "degenerate"])
        _emit(rows, header, out, fmt,
              {"surface": surface_path, "seeds": list(seeds)})
        if not ok:
            sys.exit(1)
    _wrap(run)


@main.command("table1")
@_out_opt
@_fmt_opt
def cmd_table1(out, fmt):
    """Reference-table reproduction with per-cell discrepancy report."""
    def run():
        header = ["alpha", "s", "computed", "reference", "abs_gap",
                  "rel_gap", "note"]
        rows = []
        for name, al, refs in _TABLE_ROWS:
            entry = make_helcat(al)
            for s_val, ref in zip((0.0, 1.0, 2.0), refs):
                c = osculating_cyclide(entry.surface, s_val, 0.3)
                got = c.psi_c
                gap = abs(got - ref)
                rel = gap/abs(ref)
                note = ""
                if (name, int(s_val)) == _FLAGGED_CELL:
                    note = ("flagged: reference cell inconsistent with "
                            "neighbors; computed value reported")
                elif gap > max(0.02, 0.02*abs(ref)):
                    note = "discrepancy"
                rows.append([name, s_val, got, ref, gap, rel, note])
        _emit(rows, header, out, fmt, {})
    _wrap(run)


if __name__ == "__main__":
    main()
