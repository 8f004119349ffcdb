"""B-scrolls in Minkowski 3-space and their dual minimal surfaces.

A B-scroll is a ruled surface f_L(s, t) = int A ds + t B over a null
frame (A, B, C) solving A' = kappa C, B' = tau C, C' = tau A + kappa B
with <A,A> = <B,B> = 0, <A,B> = -1, C = A x_L B (signature -,+,+).
The scroll has constant mean curvature tau, its unit normal is
N(s, t) = C + t tau B, and the singular set of the dual surface in
Nil_3(tau) is the graph t(s) = -C3/(tau B3).
"""
from __future__ import annotations

import math

import numpy as np

from ._kernels import frame_rk4
from .errors import BadInitialFrame, NonClosedForm, PoleInCurve
from .expr import eval_real, parse_text
from .harmonic import HarmonicField, dirac_residuals, pc_mag
from .paracomplex import J, Jet2, Paracomplex
from .singular import _interp_rows, _stencil_d1, classify_via_dual_curve
from .surface import minkowski_dot

__all__ = [
    "lorentz_cross",
    "FrameState",
    "CurvatureProfile",
    "FrameResult",
    "ScrollGrid",
    "integrate_frame",
    "frame_invariant_drift",
    "scroll_eval",
    "singular_parameter",
    "classify_scroll",
    "reconstruct_nil",
    "ScrollChartField",
    "DEFAULT_INIT_FRAME",
]

FRAME_TOL = 1e-9


def lorentz_cross(x, y):
    """The vector w with <w, z> = det(x, y, z) for the (-,+,+) metric."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    c = np.cross(x, y)
    c[..., 0] = -c[..., 0]
    return c


class FrameState:
    """A null frame (A, B, C) at parameter s."""

    __slots__ = ("s", "A", "B", "C")

    def __init__(self, s, A, B, C):
        self.s = float(s)
        self.A = np.asarray(A, dtype=float)
        self.B = np.asarray(B, dtype=float)
        self.C = np.asarray(C, dtype=float)

    def invariant_error(self):
        """Largest violation of the six null-frame constraints."""
        errs = [
            abs(minkowski_dot(self.A, self.A)),
            abs(minkowski_dot(self.B, self.B)),
            abs(minkowski_dot(self.A, self.B) + 1.0),
            abs(minkowski_dot(self.C, self.C) - 1.0),
            abs(minkowski_dot(self.A, self.C)),
            abs(minkowski_dot(self.B, self.C)),
            float(np.max(np.abs(self.C - lorentz_cross(self.A, self.B)))),
        ]
        return max(errs)


DEFAULT_INIT_FRAME = FrameState(
    0.0, (1.0, 1.0, 0.0), (0.5, -0.5, 0.0), (0.0, 0.0, -1.0)
)


class CurvatureProfile:
    """kappa(s) with tau; kappa may be a number, an expression in s, or
    a callable."""

    def __init__(self, kappa, tau):
        tau = float(tau)
        if tau == 0.0:
            raise ValueError("tau must be non-zero")
        self.tau = tau
        if isinstance(kappa, (int, float)):
            value = float(kappa)
            self._fn = lambda s: value
            self._constant = True
        elif isinstance(kappa, str):
            ast = parse_text(kappa)
            self._fn = lambda s: eval_real(ast, s)
            self._constant = False
        elif callable(kappa):
            self._fn = kappa
            self._constant = False
        else:
            raise TypeError("kappa must be a number, expression or callable")

    def __call__(self, s):
        return self._fn(float(s))

    def derivative(self, s, h=1e-3):
        if self._constant:
            return 0.0
        f = self._fn
        return (f(s - 2 * h) - 8 * f(s - h) + 8 * f(s + h) - f(s + 2 * h)) / (12 * h)


class FrameResult:
    """Integrated frame trajectory with the accumulated null directrix."""

    def __init__(self, profile, s_vals, traj):
        self.profile = profile
        self.tau = profile.tau
        self.s_vals = s_vals
        self.traj = traj  # (n, 12): A, B, C, P

    @property
    def A(self):
        return self.traj[:, 0:3]

    @property
    def B(self):
        return self.traj[:, 3:6]

    @property
    def C(self):
        return self.traj[:, 6:9]

    @property
    def P(self):
        return self.traj[:, 9:12]

    def at(self, s):
        """Interpolated (A, B, C, P) at arbitrary s inside the range."""
        row = _interp_rows(self.s_vals, self.traj, float(s))
        return row[0:3], row[3:6], row[6:9], row[9:12]

    def state(self, k):
        return FrameState(self.s_vals[k], self.traj[k, 0:3],
                          self.traj[k, 3:6], self.traj[k, 6:9])


def _presample_kappa(profile, anchor, h, n):
    out = np.empty(2 * n + 1)
    for m in range(2 * n + 1):
        out[m] = profile(anchor + 0.5 * m * h)
    return out


def integrate_frame(profile, s_range, h=1e-3, init=None, renormalize=True):
    """RK4 trajectory of the null frame over s_range from the init frame.

    The directrix int A ds is carried as part of the RK4 state; after
    each step the frame is projected back onto its constraint set unless
    renormalize is off.
    """
    if init is None:
        init = DEFAULT_INIT_FRAME
    err = init.invariant_error()
    if err > FRAME_TOL:
        raise BadInitialFrame(f"initial frame violates invariants by {err:.3e}")
    s_min, s_max = float(s_range[0]), float(s_range[1])
    anchor = init.s
    # integrate from the anchor out to the far ends, then trim to the range
    lo = min(anchor, s_min)
    hi = max(anchor, s_max)
    y0 = np.concatenate([init.A, init.B, init.C, np.zeros(3)])

    pieces = []
    if hi > anchor:
        n = max(1, int(round((hi - anchor) / h)))
        hf = (hi - anchor) / n
        kap = _presample_kappa(profile, anchor, hf, n)
        fwd = frame_rk4(kap, profile.tau, hf, y0, renormalize)
        pieces.append((anchor + hf * np.arange(n + 1), fwd))
    if lo < anchor:
        n = max(1, int(round((anchor - lo) / h)))
        hb = -(anchor - lo) / n
        kap = _presample_kappa(profile, anchor, hb, n)
        bwd = frame_rk4(kap, profile.tau, hb, y0, renormalize)
        pieces.append((anchor + hb * np.arange(n + 1), bwd))

    if len(pieces) == 2:
        (sf, yf), (sb, yb) = pieces
        s_vals = np.concatenate([sb[:0:-1], sf])
        traj = np.concatenate([yb[:0:-1], yf])
    else:
        s_vals, traj = pieces[0]
        order = np.argsort(s_vals)
        s_vals, traj = s_vals[order], traj[order]
    keep = (s_vals >= s_min - 1e-12) & (s_vals <= s_max + 1e-12)
    return FrameResult(profile, s_vals[keep], traj[keep])


def frame_invariant_drift(result):
    """Worst constraint violation over the whole trajectory."""
    worst = 0.0
    for k in range(len(result.s_vals)):
        worst = max(worst, result.state(k).invariant_error())
    return worst


class ScrollGrid:
    """B-scroll samples f_L(s, t) = P(s) + t B(s) with normals."""

    def __init__(self, result, t_vals, s_stride=1):
        self.result = result
        self.tau = result.tau
        self.s_idx = np.arange(0, len(result.s_vals), s_stride)
        if self.s_idx[-1] != len(result.s_vals) - 1:
            self.s_idx = np.append(self.s_idx, len(result.s_vals) - 1)
        self.s_vals = result.s_vals[self.s_idx]
        self.t_vals = np.asarray(t_vals, dtype=float)
        B = result.B[self.s_idx]
        C = result.C[self.s_idx]
        P = result.P[self.s_idx]
        t = self.t_vals[None, :, None]
        self.f_L = P[:, None, :] + t * B[:, None, :]
        self.N = C[:, None, :] + self.tau * t * B[:, None, :]
        # filled by reconstruct_nil
        self.f_nil = None
        self.g_rec = None
        self.sigma = None
        self.n_sign = None
        self.chart_swap = None
        self.loop_residual = None


def scroll_eval(result, t_vals, s_stride=1):
    return ScrollGrid(result, t_vals, s_stride)


def singular_parameter(result, pole_tol=1e-8, strict=False):
    """The singular curve t(s) = -C3/(tau B3) with a pole mask.

    Poles (B3 = 0) mean the singular set leaves the scroll chart there;
    strict mode raises instead of masking.
    """
    B3 = result.B[:, 2]
    C3 = result.C[:, 2]
    scale = max(float(np.max(np.abs(B3))), 1.0)
    poles = np.abs(B3) < pole_tol * scale
    if strict and np.any(poles):
        k = int(np.argmax(poles))
        raise PoleInCurve(f"B3 vanishes near s = {result.s_vals[k]}")
    t = np.empty_like(B3)
    t[~poles] = -C3[~poles] / (result.tau * B3[~poles])
    t[poles] = np.nan
    return t, poles


class ScrollClassification:
    def __init__(self):
        self.segments = []   # (s_slice_values, pointwise kinds)
        self.specials = []   # dicts: s, t, kind, gamma_d1


def classify_scroll(result, t_max=10.0, classify_tol=1e-7, root_tol=1e-10):
    """Classify the singular curve of the dual surface from the scroll side.

    Builds gamma_L(s) = f_L(s, t(s)) on each pole-free stretch with
    |t| <= t_max, differentiates analytically (gamma' = A + t tau C + t' B)
    and hands the curve to the dual-curve classifier.
    """
    t_s, poles = singular_parameter(result)
    mask = (~poles) & (np.abs(np.where(poles, np.inf, t_s)) <= t_max)
    h = result.s_vals[1] - result.s_vals[0]
    out = ScrollClassification()

    k = 0
    n = len(mask)
    while k < n:
        if not mask[k]:
            k += 1
            continue
        k2 = k
        while k2 < n and mask[k2]:
            k2 += 1
        if k2 - k >= 13:
            sl = slice(k, k2)
            s_seg = result.s_vals[sl]
            t_seg = t_s[sl]
            A, B, C, P = result.A[sl], result.B[sl], result.C[sl], result.P[sl]
            gamma = P + t_seg[:, None] * B
            tprime = _stencil_d1(t_seg[:, None], h, order=4)[:, 0]
            d1 = A + result.tau * t_seg[:, None] * C + tprime[:, None] * B
            d2 = _stencil_d1(d1, h, order=4)
            kinds, special = classify_via_dual_curve(
                s_seg, gamma, result.tau, classify_tol, root_tol, d1=d1, d2=d2
            )
            out.segments.append((s_seg, kinds))
            for s_root, kind in special:
                out.specials.append({
                    "s": float(s_root),
                    "t": float(_interp_rows(s_seg, t_seg[:, None], s_root)[0]),
                    "kind": kind,
                    "gamma_d1": np.asarray(_interp_rows(s_seg, d1, s_root)),
                })
        k = k2
    out.specials.sort(key=lambda d: d["s"])
    return out


def _pi_north(n1, n2, n3):
    """Stereographic chart from the north for the (-,+,+) normal sphere."""
    return Paracomplex(-n2 / (1.0 - n3), -n1 / (1.0 - n3))


class ScrollChartField(HarmonicField):
    """The recovered Gauss map of the dual surface in a conformal chart.

    Null coordinates are u = s, v = -1/t - tau^2 s / 2 with z = x + jy,
    u = x + y, v = x - y (roles swapped when swap is set).  The sign
    flips the scroll normal.  Jets come from the frame ODE: one level of
    s-interpolation plus the closed-form derivatives B' = tau C,
    C' = tau A + kappa B.
    """

    def __init__(self, result, sign=1.0, swap=False):
        super().__init__(result.tau)
        self.result = result
        self.sign = float(sign)
        self.swap = bool(swap)

    def chart_to_scroll(self, x, y):
        u, v = (x - y, x + y) if self.swap else (x + y, x - y)
        s = u
        t = -1.0 / (v + 0.5 * self.tau**2 * u)
        return s, t

    def scroll_to_chart(self, s, t):
        u = s
        v = -1.0 / t - 0.5 * self.tau**2 * s
        if self.swap:
            return 0.5 * (u + v), 0.5 * (v - u)
        return 0.5 * (u + v), 0.5 * (u - v)

    def jet(self, x, y):
        z0 = Paracomplex(x, y)
        zj = Jet2.var_z(z0)
        zbj = Jet2.var_zbar(z0)
        xj = 0.5 * (zj + zbj)
        yj = Jet2.const(J) * (0.5 * (zj - zbj))
        if self.swap:
            uj, vj = xj - yj, xj + yj
        else:
            uj, vj = xj + yj, xj - yj
        dj = vj + (0.5 * self.tau**2) * uj
        tj = -(dj.inverse())

        s0 = uj.v.re
        A, B, C, _P = self.result.at(s0)
        kap = self.result.profile(s0)
        kapp = self.result.profile.derivative(s0)
        tau = self.tau
        Bp = tau * C
        Cp = tau * A + kap * B
        Bpp = tau * Cp
        Cpp = 2.0 * tau * kap * C + kapp * B

        def lift(v0, v1, v2):
            # second-order jet of a scalar function of s composed with uj
            return Jet2(
                Paracomplex(v0),
                v1 * uj.dz,
                v1 * uj.dzb,
                v2 * (uj.dz * uj.dz) + v1 * uj.dzz,
                v2 * (uj.dz * uj.dzb) + v1 * uj.dzzb,
                v2 * (uj.dzb * uj.dzb) + v1 * uj.dzbzb,
            )

        sgn = self.sign
        Nj = []
        for m in range(3):
            Bj = lift(B[m], Bp[m], Bpp[m])
            Cj = lift(C[m], Cp[m], Cpp[m])
            Nj.append(Jet2.const(sgn) * (Cj + Jet2.const(tau) * tj * Bj))
        one = Jet2.const(1.0)
        return (
            Jet2.const(-J)
            * (Nj[0] + Jet2.const(J) * Nj[1])
            * (one - Nj[2]).inverse()
        )


def _beta_components(A, B, C, P, t, tau, sigma):
    """The 1-form whose integral is the third dual coordinate.

    beta = sigma * star(d f_L^3) - tau f^2 d f^1 + tau f^1 d f^2 with
    star on the induced scroll metric (E, F, G) = (t^2 tau^2, -1, 0).
    """
    a_s = A[..., 2] + t * tau * C[..., 2]
    a_t = B[..., 2]
    star_s = sigma * (-a_s - t * t * tau * tau * a_t)
    star_t = sigma * a_t
    f1 = P[..., 0] + t * B[..., 0]
    f2 = P[..., 1] + t * B[..., 1]
    df1_s = A[..., 0] + t * tau * C[..., 0]
    df1_t = B[..., 0]
    df2_s = A[..., 1] + t * tau * C[..., 1]
    df2_t = B[..., 1]
    beta_s = star_s - tau * f2 * df1_s + tau * f1 * df2_s
    beta_t = star_t - tau * f2 * df1_t + tau * f1 * df2_t
    return beta_s, beta_t


def _loop_residual_max(grid, sigma):
    """Max cell loop integral of the beta form, per unit cell area."""
    res = grid.result
    tau = grid.tau
    s = grid.s_vals
    t = grid.t_vals
    mids = 0.5 * (s[:-1] + s[1:])
    Am, Bm, Cm, Pm = _interp_frames(res, mids)
    A, B, C, P = (res.A[grid.s_idx], res.B[grid.s_idx],
                  res.C[grid.s_idx], res.P[grid.s_idx])
    worst = 0.0
    for jt in range(len(t) - 1):
        t0, t1 = t[jt], t[jt + 1]
        tm = 0.5 * (t0 + t1)
        dt = t1 - t0
        for i in range(len(s) - 1):
            ds = s[i + 1] - s[i]

            def edge_s(row_t, i0, i1, im):
                b0, _ = _beta_components(A[i0], B[i0], C[i0], P[i0], row_t, tau, sigma)
                b1, _ = _beta_components(A[i1], B[i1], C[i1], P[i1], row_t, tau, sigma)
                bm, _ = _beta_components(Am[im], Bm[im], Cm[im], Pm[im], row_t, tau, sigma)
                return ds / 6.0 * (b0 + 4.0 * bm + b1)

            def edge_t(idx, ta, tb):
                _, b0 = _beta_components(A[idx], B[idx], C[idx], P[idx], ta, tau, sigma)
                _, b1 = _beta_components(A[idx], B[idx], C[idx], P[idx], tb, tau, sigma)
                _, bm = _beta_components(A[idx], B[idx], C[idx], P[idx],
                                         0.5 * (ta + tb), tau, sigma)
                return (tb - ta) / 6.0 * (b0 + 4.0 * bm + b1)

            loop = (edge_s(t0, i, i + 1, i) + edge_t(i + 1, t0, t1)
                    - edge_s(t1, i, i + 1, i) - edge_t(i, t0, t1))
            worst = max(worst, abs(loop) / abs(ds * dt))
    return worst


def _interp_frames(result, s_points):
    rows = np.array([_interp_rows(result.s_vals, result.traj, s) for s in s_points])
    return rows[:, 0:3], rows[:, 3:6], rows[:, 6:9], rows[:, 9:12]


def reconstruct_nil(grid, loop_tol=1e-7, base=None):
    """Reconstruct the dual surface in Nil_3(tau) over the scroll grid.

    The first two coordinates are shared with the scroll; the third
    integrates a closed 1-form whose Hodge-star orientation (sigma) is
    fixed by cell loop closure.  The recovered Gauss map comes from the
    normal via the south stereographic chart, with the normal sign and
    the chart orientation fixed by the Dirac residuals.
    """
    res = grid.result
    tau = grid.tau
    s = grid.s_vals
    t = grid.t_vals
    ns, nt = len(s), len(t)

    residuals = {}
    for sigma in (1.0, -1.0):
        residuals[sigma] = _loop_residual_max(grid, sigma)
    sigma = min(residuals, key=residuals.get)
    if residuals[sigma] > loop_tol:
        raise NonClosedForm(
            f"third-coordinate form fails loop closure: {residuals[sigma]:.3e} "
            f"per unit area with either orientation"
        )

    A, B, C, P = (res.A[grid.s_idx], res.B[grid.s_idx],
                  res.C[grid.s_idx], res.P[grid.s_idx])
    mids = 0.5 * (s[:-1] + s[1:])
    Am, Bm, Cm, Pm = _interp_frames(res, mids)

    f3 = np.zeros((ns, nt))
    if base is None:
        i0 = int(np.argmin(np.abs(s)))
        j0 = nt // 2
    else:
        i0, j0 = base
    # base column: Simpson in t (the integrand is quadratic in t, exact)
    for j in range(j0, nt - 1):
        t0, t1 = t[j], t[j + 1]
        _, b0 = _beta_components(A[i0], B[i0], C[i0], P[i0], t0, tau, sigma)
        _, b1 = _beta_components(A[i0], B[i0], C[i0], P[i0], t1, tau, sigma)
        _, bm = _beta_components(A[i0], B[i0], C[i0], P[i0], 0.5 * (t0 + t1), tau, sigma)
        f3[i0, j + 1] = f3[i0, j] + (t1 - t0) / 6.0 * (b0 + 4.0 * bm + b1)
    for j in range(j0, 0, -1):
        t0, t1 = t[j], t[j - 1]
        _, b0 = _beta_components(A[i0], B[i0], C[i0], P[i0], t0, tau, sigma)
        _, b1 = _beta_components(A[i0], B[i0], C[i0], P[i0], t1, tau, sigma)
        _, bm = _beta_components(A[i0], B[i0], C[i0], P[i0], 0.5 * (t0 + t1), tau, sigma)
        f3[i0, j - 1] = f3[i0, j] + (t1 - t0) / 6.0 * (b0 + 4.0 * bm + b1)
    # rows: Simpson in s with interpolated midpoint frames
    for j in range(nt):
        tj = t[j]
        bs_node = np.array(
            [_beta_components(A[i], B[i], C[i], P[i], tj, tau, sigma)[0]
             for i in range(ns)]
        )
        bs_mid = np.array(
            [_beta_components(Am[i], Bm[i], Cm[i], Pm[i], tj, tau, sigma)[0]
             for i in range(ns - 1)]
        )
        for i in range(i0, ns - 1):
            ds = s[i + 1] - s[i]
            f3[i + 1, j] = f3[i, j] + ds / 6.0 * (
                bs_node[i] + 4.0 * bs_mid[i] + bs_node[i + 1]
            )
        for i in range(i0, 0, -1):
            ds = s[i - 1] - s[i]
            f3[i - 1, j] = f3[i, j] + ds / 6.0 * (
                bs_node[i] + 4.0 * bs_mid[i - 1] + bs_node[i - 1]
            )

    # orientation search: normal sign x chart swap, judged by the Dirac
    # residuals of the recovered Gauss map
    best = None
    probe = _chart_probe_points(grid)
    for sign in (1.0, -1.0):
        for swap in (False, True):
            field = ScrollChartField(res, sign=sign, swap=swap)
            score = 0.0
            ok = True
            for (sp, tp) in probe:
                try:
                    x, y = field.scroll_to_chart(sp, tp)
                    smp = field.sample_xy(x, y)
                    r1, r2 = dirac_residuals(smp)
                    score += max(pc_mag(r1), pc_mag(r2))
                    # the recovered data must reproduce the chart metric
                    # -2 t^2 du dv; this rules out the null-density gauges
                    m = smp.modulus_sq
                    eu = -4.0 * (1.0 + m) ** 2 * smp.omega_hat.modulus_sq() / tau**2
                    score += abs(eu + 2.0 * tp * tp)
                except Exception:
                    ok = False
                    break
            if ok and (best is None or score < best[0]):
                best = (score, sign, swap, field)
    if best is None:
        raise NonClosedForm("no chart orientation yields a valid Gauss map")
    _, n_sign, chart_swap, field = best

    g_rec = np.empty((ns, nt), dtype=object)
    for i in range(ns):
        for j in range(nt):
            N = n_sign * grid.N[i, j]
            if abs(1.0 - N[2]) < 1e-12:
                g_rec[i, j] = None
            else:
                g_rec[i, j] = _pi_north(N[0], N[1], N[2])

    grid.f_nil = np.concatenate(
        [grid.f_L[..., 0:2], f3[..., None]], axis=2
    )
    grid.g_rec = g_rec
    grid.sigma = sigma
    grid.n_sign = n_sign
    grid.chart_swap = chart_swap
    grid.loop_residual = residuals[sigma]
    return field


def _chart_probe_points(grid):
    """A few regular scroll points usable in the conformal chart."""
    res = grid.result
    s = grid.s_vals
    t = grid.t_vals
    pts = []
    tau = grid.tau
    for frac_s in (0.25, 0.5, 0.75):
        for frac_t in (0.3, 0.7):
            sp = s[0] + frac_s * (s[-1] - s[0])
            tp = t[0] + frac_t * (t[-1] - t[0])
            if abs(tp) < 1e-3:
                continue  # chart breaks at t = 0
            pts.append((sp, tp))
    return pts[:6]
