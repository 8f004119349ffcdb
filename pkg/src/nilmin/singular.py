"""Singular set detection, curve tracing and classification.

The singular set splits into two strata: |g|^2 = 1 (where the Nil_3
normal blows up) and |omega_hat|^2 = 0 (where the density degenerates).
Classification on the first stratum runs on the ratio

    r = g_z / (g^2 omega_hat)

whose real/imaginary parts and curve derivatives decide front,
cuspidal edge, swallowtail and cuspidal cross cap.  Equality conditions
(Im r = 4, Re r = 0) are never tested pointwise; they are located as
parameter roots along a traced curve and refined by bisection.
"""
from __future__ import annotations

import csv
import json

import numpy as np

from .errors import (
    DegenerateOnCurve,
    LostCurve,
    TooCoarse,
    WrongStratum,
)
from .harmonic import pc_mag
from .paracomplex import J, Paracomplex

__all__ = [
    "SingularPoint",
    "SingularCurve",
    "CriteriaRatio",
    "area_density",
    "detect",
    "nondegenerate_omega",
    "nondegenerate_g",
    "criteria_ratio",
    "classify_sigma_g",
    "classify_sigma_omega",
    "trace_curve",
    "classify_via_dual_curve",
    "criteria_crosscheck",
    "classify_ratio",
    "report_to_json",
    "curves_to_csv",
]

LEVEL_TOL = 1e-9
CLASSIFY_TOL = 1e-7

STRATUM_G = "sigma_g"
STRATUM_OMEGA = "sigma_omega"
STRATUM_BOTH = "both"

KIND_FRONT = "Front"
KIND_CUSPIDAL_EDGE = "CuspidalEdge"
KIND_SWALLOWTAIL = "Swallowtail"
KIND_CUSPIDAL_CROSS_CAP = "CuspidalCrossCap"
KIND_NON_FRONT = "NonFront"
KIND_DEGENERATE = "Degenerate"
KIND_UNRESOLVED = "Unresolved"


class SingularPoint:
    __slots__ = ("z", "stratum", "nondegenerate", "kind", "diagnostics", "t")

    def __init__(self, z, stratum, nondegenerate=None, kind=KIND_UNRESOLVED,
                 diagnostics=None, t=None):
        self.z = z
        self.stratum = stratum
        self.nondegenerate = nondegenerate
        self.kind = kind
        self.diagnostics = diagnostics or {}
        self.t = t

    def __repr__(self):
        return (
            f"SingularPoint(z={self.z}, stratum={self.stratum}, "
            f"nondeg={self.nondegenerate}, kind={self.kind})"
        )


class SingularCurve:
    """Ordered points of one singular curve with parameters and tangents."""

    def __init__(self, stratum):
        self.stratum = stratum
        self.points = []     # SingularPoint with t set
        self.tangents = []   # Paracomplex, a + jb <-> direction (a, b)

    def append(self, point, tangent):
        self.points.append(point)
        self.tangents.append(tangent)

    def __len__(self):
        return len(self.points)


class CriteriaRatio:
    __slots__ = ("r", "r_z", "r_zb")

    def __init__(self, r, r_z, r_zb):
        self.r = r
        self.r_z = r_z
        self.r_zb = r_zb

    @property
    def re_r(self):
        return self.r.re

    @property
    def im_r(self):
        return self.r.im

    def re_r_z(self):
        """(Re r)_z via the conjugation-derivative exchange."""
        return 0.5 * (self.r_z + self.r_zb.conj())

    def im_r_z(self):
        return J * (0.5 * (self.r_z - self.r_zb.conj()))


def area_density(sample, tau):
    """Signed area density w.r.t. the Riemannian volume; zero on the
    singular set."""
    g = sample.g.v
    m = g.modulus_sq()
    wsq = sample.omega_hat.modulus_sq()
    radicand = 2.0 * (2.0 * g.re) ** 2 + (1.0 - m) ** 2
    return -(2.0 / tau**2) * wsq * (1.0 - m) * np.sqrt(max(radicand, 0.0))


def _level_g(sample):
    return sample.modulus_sq - 1.0


def _level_omega(sample):
    return sample.omega_hat.modulus_sq()


def _level_g_z(sample):
    g = sample.g
    return g.dz * g.v.conj() + g.v * g.dzb.conj()


def _level_omega_z(sample):
    w = sample.omega_hat
    return sample.omega_hat_z * w.conj() + w * sample.omega_hat_zb.conj()


_LEVELS = {
    STRATUM_G: (_level_g, _level_g_z),
    STRATUM_OMEGA: (_level_omega, _level_omega_z),
}


def criteria_ratio(sample):
    """r = g_z / (g^2 omega_hat) with its first derivatives."""
    g = sample.g

    class _T:
        __slots__ = ("v", "dz", "dzb")

        def __init__(self, v, dz, dzb):
            self.v, self.dz, self.dzb = v, dz, dzb

    gz = (g.dz, g.dzz, g.dzzb)
    w = (sample.omega_hat, sample.omega_hat_z, sample.omega_hat_zb)
    gv = (g.v, g.dz, g.dzb)
    # denominator d = g^2 * omega_hat and its first derivatives
    d_v = gv[0] * gv[0] * w[0]
    d_z = 2.0 * gv[0] * gv[1] * w[0] + gv[0] * gv[0] * w[1]
    d_zb = 2.0 * gv[0] * gv[2] * w[0] + gv[0] * gv[0] * w[2]
    inv = d_v.inverse()
    inv2 = inv * inv
    r = gz[0] * inv
    r_z = gz[1] * inv - gz[0] * d_z * inv2
    r_zb = gz[2] * inv - gz[0] * d_zb * inv2
    return CriteriaRatio(r, r_z, r_zb)


def nondegenerate_omega(sample, level_tol=LEVEL_TOL, tol=CLASSIFY_TOL):
    """Non-degeneracy on the omega stratum: omega_hat_z * conj(omega_hat) != 0."""
    if abs(_level_omega(sample)) > np.sqrt(level_tol):
        raise WrongStratum("sample is not on the omega stratum")
    if abs(_level_g(sample)) < level_tol:
        raise WrongStratum("sample lies on both strata; degenerate by construction")
    return pc_mag(sample.omega_hat_z * sample.omega_hat.conj()) > tol


def nondegenerate_g(ratio, tol=CLASSIFY_TOL):
    """Non-degeneracy on the g stratum: r != 4j."""
    return pc_mag(ratio.r - 4.0 * J) > tol


def sigma_g_diagnostics(sample):
    ratio = criteria_ratio(sample)
    dm_zb = _level_g_z(sample).conj()  # (|g|^2)_zbar for the real level
    third_sw = (dm_zb * ratio.im_r_z()).im
    third_ccr = (dm_zb * ratio.re_r_z()).im
    return ratio, {
        "re_r": ratio.re_r,
        "im_r": ratio.im_r,
        "third_sw": third_sw,
        "third_ccr": third_ccr,
    }


def classify_ratio(re_r, im_r, third_sw, third_ccr, tol=CLASSIFY_TOL):
    """Pointwise classification gates of the g-stratum criteria.

    Equality gates (Im r = 4, Re r = 0) are threshold checks here; curve
    classification locates them as roots instead.
    """
    if abs(re_r) <= tol and abs(im_r - 4.0) <= tol:
        return KIND_DEGENERATE
    if abs(re_r) > tol:
        if abs(im_r - 4.0) > tol:
            return KIND_CUSPIDAL_EDGE
        if abs(third_sw) > tol:
            return KIND_SWALLOWTAIL
        return KIND_UNRESOLVED
    # Re r = 0: not a front
    if abs(im_r - 4.0) > tol and abs(third_ccr) > tol:
        return KIND_CUSPIDAL_CROSS_CAP
    return KIND_NON_FRONT


def criteria_crosscheck(ratio, tau, tol=CLASSIFY_TOL):
    """Agreement of the direct criteria with their rewritten form.

    The rewrite replaces the density by (j/tau) * density, which turns the
    ratio into tau * j * r and swaps the roles of Re and Im with the
    threshold moved from 4 to 4*tau.
    """
    r = ratio.r
    rp = tau * (J * r)
    gates = (
        abs(r.re) > tol,
        abs(r.im - 4.0) > tol,
        pc_mag(r - 4.0 * J) > tol,
    )
    gates_primed = (
        abs(rp.im) > tau * tol,
        abs(rp.re - 4.0 * tau) > tau * tol,
        max(abs(rp.im), abs(rp.re - 4.0 * tau)) > tau * tol,
    )
    return gates == gates_primed


def _bisect_edge(field, p0, p1, level, tol=1e-10):
    """Root of the level function on the segment p0-p1, by bisection."""
    f0 = level(field.sample_xy(*p0))
    lo, hi = 0.0, 1.0
    flo = f0
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        pm = (p0[0] + mid * (p1[0] - p0[0]), p0[1] + mid * (p1[1] - p0[1]))
        fm = level(field.sample_xy(*pm))
        if flo * fm <= 0.0:
            hi = mid
        else:
            lo, flo = mid, fm
        if hi - lo < tol:
            break
    mid = 0.5 * (lo + hi)
    return (p0[0] + mid * (p1[0] - p0[0]), p0[1] + mid * (p1[1] - p0[1]))


def detect(field, spec, level_tol=LEVEL_TOL, classify_tol=CLASSIFY_TOL):
    """Marching-squares localization of both singular strata on the grid.

    Returns SingularPoint records for every level crossing on a grid
    edge, bisection-refined; points within tolerance of both level sets
    merge as stratum 'both' (always degenerate).
    """
    values = {}
    for i, j, x, y in spec.nodes():
        s = field.sample_xy(x, y)
        values[(i, j)] = (x, y, _level_g(s), _level_omega(s))

    found = []

    def scan_edge(n0, n1):
        x0, y0, fg0, fw0 = values[n0]
        x1, y1, fg1, fw1 = values[n1]
        out = []
        if fg0 * fg1 < 0.0:
            out.append((STRATUM_G, _bisect_edge(field, (x0, y0), (x1, y1), _level_g)))
        if fw0 * fw1 < 0.0:
            out.append(
                (STRATUM_OMEGA, _bisect_edge(field, (x0, y0), (x1, y1), _level_omega))
            )
        return out

    for j in range(spec.ny):
        for i in range(spec.nx):
            if i + 1 < spec.nx:
                found.extend(scan_edge((i, j), (i + 1, j)))
            if j + 1 < spec.ny:
                found.extend(scan_edge((i, j), (i, j + 1)))

    points = []
    for stratum, (x, y) in found:
        s = field.sample_xy(x, y)
        on_g = abs(_level_g(s)) < np.sqrt(level_tol)
        on_w = abs(_level_omega(s)) < np.sqrt(level_tol)
        diagnostics = {"level_g": _level_g(s), "level_omega": _level_omega(s)}
        if on_g and on_w:
            points.append(
                SingularPoint(Paracomplex(x, y), STRATUM_BOTH, False,
                              KIND_DEGENERATE, diagnostics)
            )
            continue
        if stratum == STRATUM_G:
            ratio, diag = sigma_g_diagnostics(s)
            diagnostics.update(diag)
            nondeg = nondegenerate_g(ratio, classify_tol)
        else:
            nondeg = pc_mag(s.omega_hat_z * s.omega_hat.conj()) > classify_tol
        points.append(
            SingularPoint(Paracomplex(x, y), stratum, nondeg,
                          KIND_UNRESOLVED, diagnostics)
        )
    return points


def _newton_project(field, x, y, level, level_z, tol=1e-12, max_iter=50):
    for _ in range(max_iter):
        s = field.sample_xy(x, y)
        val = level(s)
        if abs(val) < tol:
            return x, y, s
        lz = level_z(s)
        gx, gy = 2.0 * lz.re, 2.0 * lz.im
        norm2 = gx * gx + gy * gy
        if norm2 < 1e-24:
            raise LostCurve(f"vanishing level gradient near ({x}, {y})")
        x -= val * gx / norm2
        y -= val * gy / norm2
    raise LostCurve(f"Newton failed to re-acquire the level set near ({x}, {y})")


def trace_curve(field, seed, stratum=None, step=0.02, max_steps=2000,
                bounds=None, level_tol=1e-12):
    """Predictor-corrector continuation of one singular curve.

    The predictor follows the stratum's tangent formula; the corrector
    is a Newton projection back onto the level set.  Tracing runs in
    both directions from the seed and stops at the domain boundary or
    after closing a loop.
    """
    if isinstance(seed, SingularPoint):
        stratum = stratum or seed.stratum
        x0, y0 = seed.z.re, seed.z.im
    else:
        x0, y0 = seed
    if stratum not in _LEVELS:
        raise WrongStratum(f"cannot trace stratum {stratum!r}")
    level, level_z = _LEVELS[stratum]
    x0, y0, s0 = _newton_project(field, x0, y0, level, level_z, level_tol)

    def tangent_at(sample):
        if stratum == STRATUM_G:
            # gamma' = j * (|g|^2)_zbar
            t = J * _level_g_z(sample).conj()
        else:
            # gamma' = j * conj(omega_hat_z) * omega_hat
            t = J * sample.omega_hat_z.conj() * sample.omega_hat
        return t

    def march(direction):
        pts = []
        x, y, s = x0, y0, s0
        prev = None
        for _ in range(max_steps):
            t = tangent_at(s)
            norm = np.hypot(t.re, t.im)
            if norm < 1e-14:
                raise LostCurve(f"degenerate tangent at ({x}, {y})")
            dx, dy = t.re / norm, t.im / norm
            if prev is None:
                dx, dy = direction * dx, direction * dy
            elif dx * prev[0] + dy * prev[1] < 0.0:
                dx, dy = -dx, -dy
            prev = (dx, dy)
            x_try, y_try = x + step * dx, y + step * dy
            try:
                x, y, s = _newton_project(field, x_try, y_try, level, level_z, level_tol)
            except LostCurve:
                break
            if bounds is not None:
                if not (bounds[0] <= x <= bounds[1] and bounds[2] <= y <= bounds[3]):
                    break
            pts.append((x, y, s, t))
            if np.hypot(x - x0, y - y0) < 0.5 * step and len(pts) > 3:
                break  # closed loop
        return pts

    fwd = march(+1.0)
    bwd = march(-1.0)
    curve = SingularCurve(stratum)
    chain = [(x0, y0, s0, tangent_at(s0))]
    chain = [p for p in reversed(bwd)] + chain + fwd
    t_par = 0.0
    last = None
    for x, y, s, t in chain:
        if last is not None:
            t_par += np.hypot(x - last[0], y - last[1])
        last = (x, y)
        pt = SingularPoint(Paracomplex(x, y), stratum, t=t_par)
        curve.append(pt, t)
    return curve


def _curve_point_at(field, curve, idx0, idx1, frac, stratum):
    """Point on the level set between two curve samples, re-projected."""
    level, level_z = _LEVELS[stratum]
    p0, p1 = curve.points[idx0].z, curve.points[idx1].z
    x = p0.re + frac * (p1.re - p0.re)
    y = p0.im + frac * (p1.im - p0.im)
    return _newton_project(field, x, y, level, level_z)


def _refine_root(field, curve, idx, fvals, stratum, value_of, tol=1e-10):
    """Bisection for a sign change of value_of between samples idx, idx+1."""
    lo, hi = 0.0, 1.0
    flo = fvals[idx]
    for _ in range(100):
        mid = 0.5 * (lo + hi)
        x, y, s = _curve_point_at(field, curve, idx, idx + 1, mid, stratum)
        fm = value_of(s)
        if flo * fm <= 0.0:
            hi = mid
        else:
            lo, flo = mid, fm
        if hi - lo < tol:
            break
    mid = 0.5 * (lo + hi)
    return _curve_point_at(field, curve, idx, idx + 1, mid, stratum)


def classify_sigma_g(curve, field, classify_tol=CLASSIFY_TOL, root_tol=1e-10):
    """Classify a non-degenerate curve on the g stratum (Gauss-map route).

    Generic points get the pointwise front/cuspidal-edge gates; the
    equality loci Im r = 4 and Re r = 0 are located as parameter roots
    by sign-change bisection and classified there.
    """
    if curve.stratum != STRATUM_G:
        raise WrongStratum("classify_sigma_g needs a g-stratum curve")
    out = []
    diags = []
    for pt in curve.points:
        s = field.sample_xy(pt.z.re, pt.z.im)
        ratio, diag = sigma_g_diagnostics(s)
        if not nondegenerate_g(ratio, classify_tol):
            raise DegenerateOnCurve(f"degenerate singular point at {pt.z}")
        kind = classify_ratio(
            diag["re_r"], diag["im_r"], diag["third_sw"], diag["third_ccr"],
            classify_tol,
        )
        out.append(
            SingularPoint(pt.z, STRATUM_G, True, kind, dict(diag), t=pt.t)
        )
        diags.append(diag)

    def add_roots(diag_value, value_of, special_kind, gate):
        fvals = [diag_value(d) for d in diags]
        for idx in range(len(fvals) - 1):
            if fvals[idx] * fvals[idx + 1] < 0.0:
                x, y, s = _refine_root(
                    field, curve, idx, fvals, STRATUM_G, value_of, root_tol
                )
                ratio, diag = sigma_g_diagnostics(s)
                kind = special_kind if gate(diag) else KIND_UNRESOLVED
                t_root = curve.points[idx].t + np.hypot(
                    x - curve.points[idx].z.re, y - curve.points[idx].z.im
                )
                out.append(
                    SingularPoint(Paracomplex(x, y), STRATUM_G, True, kind,
                                  dict(diag), t=t_root)
                )

    add_roots(
        lambda d: d["im_r"] - 4.0,
        lambda s: sigma_g_diagnostics(s)[1]["im_r"] - 4.0,
        KIND_SWALLOWTAIL,
        lambda d: abs(d["re_r"]) > classify_tol and abs(d["third_sw"]) > classify_tol,
    )
    add_roots(
        lambda d: d["re_r"],
        lambda s: sigma_g_diagnostics(s)[1]["re_r"],
        KIND_CUSPIDAL_CROSS_CAP,
        lambda d: abs(d["im_r"] - 4.0) > classify_tol
        and abs(d["third_ccr"]) > classify_tol,
    )
    out.sort(key=lambda p: (p.t if p.t is not None else 0.0))
    return out


def classify_sigma_omega(curve, field, classify_tol=CLASSIFY_TOL):
    """Classify a non-degenerate curve on the omega stratum.

    Every non-degenerate front point is a cuspidal edge; the determinant
    of (singular direction, null direction) is verified both directly
    and through its closed form -Re(omega_hat^2 conj(omega_hat_z))."""
    if curve.stratum != STRATUM_OMEGA:
        raise WrongStratum("classify_sigma_omega needs an omega-stratum curve")
    out = []
    for pt in curve.points:
        s = field.sample_xy(pt.z.re, pt.z.im)
        w = s.omega_hat
        wz = s.omega_hat_z
        nondeg = pc_mag(wz * w.conj()) > classify_tol
        gamma_p = J * wz.conj() * w
        eta = w.conj()
        det_direct = gamma_p.re * eta.im - gamma_p.im * eta.re
        det_formula = -((w * w * wz.conj()).re)
        diag = {
            "det_direct": det_direct,
            "det_formula": det_formula,
            "nondeg_value": pc_mag(wz * w.conj()),
        }
        if not nondeg:
            out.append(SingularPoint(pt.z, STRATUM_OMEGA, False,
                                     KIND_DEGENERATE, diag, t=pt.t))
            continue
        kind = KIND_CUSPIDAL_EDGE if abs(det_direct) > classify_tol else KIND_UNRESOLVED
        out.append(SingularPoint(pt.z, STRATUM_OMEGA, True, kind, diag, t=pt.t))
    return out


def _stencil_d1(vals, h, order=4):
    """First derivative along axis 0 of an (n, 3) sample array."""
    vals = np.asarray(vals)
    n = len(vals)
    out = np.zeros_like(vals)
    if order == 4:
        c = np.array([1.0, -8.0, 0.0, 8.0, -1.0]) / (12.0 * h)
        half = 2
    else:
        c = np.array([-0.5, 0.0, 0.5]) / h
        half = 1
    for k in range(n):
        kk = min(max(k, half), n - 1 - half)
        window = vals[kk - half: kk + half + 1]
        d = np.tensordot(c, window, axes=(0, 0))
        if kk != k:
            # one-sided fallback near the ends: low-order secant
            if k == 0:
                d = (vals[1] - vals[0]) / h
            elif k == n - 1:
                d = (vals[-1] - vals[-2]) / h
        out[k] = d
    return out


def _interp_rows(s_vals, rows, s):
    """Barycentric Lagrange interpolation over the 6 nearest samples."""
    s_vals = np.asarray(s_vals)
    idx = int(np.clip(np.searchsorted(s_vals, s) - 3, 0, len(s_vals) - 6))
    xs = s_vals[idx: idx + 6]
    ys = rows[idx: idx + 6]
    total = np.zeros(ys.shape[1]) if ys.ndim > 1 else 0.0
    denom = 0.0
    for k in range(6):
        wgt = 1.0
        for m in range(6):
            if m != k:
                wgt /= (xs[k] - xs[m])
        diff = s - xs[k]
        if abs(diff) < 1e-15:
            return ys[k]
        wgt /= diff
        total = total + wgt * ys[k]
        denom += wgt
    return total / denom


def classify_via_dual_curve(s_vals, gamma_vals, tau=1.0, classify_tol=CLASSIFY_TOL,
                            root_tol=1e-10, d1=None, d2=None, stencil_check_tol=1e-4):
    """Classification from the image curve on the dual CMC surface.

    gamma_vals samples the curve gamma_L(s) in L^3.  Front-ness reads the
    third component of gamma_L'; swallowtails are roots of the first two
    components (parallelism to e_3) and cuspidal cross caps are roots of
    the third, each confirmed on the second derivative.  Returns
    (pointwise kinds, special points) where special points are
    (s_root, kind) pairs.
    """
    s_vals = np.asarray(s_vals, dtype=float)
    gamma_vals = np.asarray(gamma_vals, dtype=float)
    h = s_vals[1] - s_vals[0]
    if d1 is None:
        d1 = _stencil_d1(gamma_vals, h, order=4)
        d1_lo = _stencil_d1(gamma_vals, h, order=2)
        interior = slice(2, -2)
        scale = max(np.max(np.abs(d1[interior])), 1.0)
        disc = np.max(np.abs(d1[interior] - d1_lo[interior])) / scale
        if disc > stencil_check_tol:
            raise TooCoarse(
                f"stencil orders disagree by {disc:.3e}; sample the curve more densely"
            )
    if d2 is None:
        d2 = _stencil_d1(d1, h, order=4)

    scale1 = max(float(np.max(np.abs(d1))), 1.0)
    scale2 = max(float(np.max(np.abs(d2))), 1.0)

    def kinds_at(v1, v2):
        front = abs(v1[2]) > classify_tol * scale1
        planar1 = np.hypot(v1[0], v1[1]) <= classify_tol * scale1
        planar2 = np.hypot(v2[0], v2[1]) <= classify_tol * scale2
        if front:
            if not planar1:
                return KIND_CUSPIDAL_EDGE
            if not planar2:
                return KIND_SWALLOWTAIL
            return KIND_UNRESOLVED
        if not planar2 and abs(v2[2]) > classify_tol * scale2:
            return KIND_CUSPIDAL_CROSS_CAP
        return KIND_NON_FRONT

    kinds = [kinds_at(d1[k], d2[k]) for k in range(len(s_vals))]

    special = []

    def scan(component_fn, gate, kind):
        vals = np.array([component_fn(d1[k]) for k in range(len(s_vals))])
        for k in range(len(s_vals) - 1):
            if vals[k] * vals[k + 1] < 0.0:
                lo, hi = s_vals[k], s_vals[k + 1]
                flo = vals[k]
                for _ in range(100):
                    mid = 0.5 * (lo + hi)
                    fm = component_fn(_interp_rows(s_vals, d1, mid))
                    if flo * fm <= 0.0:
                        hi = mid
                    else:
                        lo, flo = mid, fm
                    if hi - lo < root_tol:
                        break
                s_root = 0.5 * (lo + hi)
                v1 = _interp_rows(s_vals, d1, s_root)
                v2 = _interp_rows(s_vals, d2, s_root)
                if gate(v1, v2):
                    special.append((s_root, kind))

    # swallowtail: gamma' becomes parallel to e3 while <gamma', e3> != 0
    def dominant_planar(v):
        return v[0] if abs(d1[:, 0]).max() >= abs(d1[:, 1]).max() else v[1]

    scan(
        dominant_planar,
        lambda v1, v2: abs(v1[2]) > classify_tol * scale1
        and np.hypot(v1[0], v1[1]) <= np.sqrt(classify_tol) * scale1
        and np.hypot(v2[0], v2[1]) > classify_tol * scale2,
        KIND_SWALLOWTAIL,
    )
    # cuspidal cross cap: <gamma', e3> = 0 with second-order conditions
    scan(
        lambda v: v[2],
        lambda v1, v2: np.hypot(v2[0], v2[1]) > classify_tol * scale2
        and abs(v2[2]) > classify_tol * scale2,
        KIND_CUSPIDAL_CROSS_CAP,
    )
    special.sort()
    return kinds, special


def report_to_json(points, path=None):
    records = []
    for p in points:
        rec = {
            "x": p.z.re,
            "y": p.z.im,
            "stratum": p.stratum,
            "nondegenerate": p.nondegenerate,
            "kind": p.kind,
            "diagnostics": {k: float(v) for k, v in p.diagnostics.items()
                            if isinstance(v, (int, float))},
        }
        records.append(rec)
    if path is not None:
        with open(path, "w") as fh:
            json.dump(records, fh, indent=2, sort_keys=True)
            fh.write("\n")
    return records


def curves_to_csv(points, path):
    """CSV dump of classified curve points: header t,x,y,kind."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["t", "x", "y", "kind"])
        for p in points:
            writer.writerow([
                "" if p.t is None else f"{p.t:.12g}",
                f"{p.z.re:.17g}",
                f"{p.z.im:.17g}",
                p.kind,
            ])
