"""Surface construction from harmonic data: integration, normals, curvature.

The tangent coefficients of f in the left-invariant frame are

    phi1 = (g^2+1) omega_hat / tau
    phi2 = j (g^2-1) omega_hat / tau
    phi3 = 2 g omega_hat / tau

and the dual Minkowski surface shares them as (f_L)_z = (phi1, phi2, j phi3).
f^1, f^2 and f_L are real-part line integrals over grid-aligned paths;
f^3 is a path-coupled ODE (its integrand references the running f^1, f^2)
solved with classical RK4 along the same paths.
"""
from __future__ import annotations

import numpy as np

from .errors import (
    FrameDegenerate,
    GaussSingular,
    NonHarmonicInput,
    SingularNode,
    VerticalPoint,
)
from .grids import GridSpec
from .harmonic import harmonic_residual, pc_mag
from .paracomplex import J, Paracomplex

__all__ = [
    "TangentCoeffs",
    "SurfaceGrid",
    "FundamentalForms",
    "ConnectionTable",
    "phi_from_data",
    "integrate_minkowski",
    "integrate_nil",
    "normal_nil",
    "normal_minkowski",
    "normal_riemannian",
    "differentials",
    "duality_check",
    "mean_curvature_nil",
    "mean_curvature_mink",
    "mean_curvature_parametric",
    "loop_residual",
    "export_mesh",
    "minkowski_dot",
]


def minkowski_dot(a, b):
    """Inner product of signature (-,+,+)."""
    return -a[0] * b[0] + a[1] * b[1] + a[2] * b[2]


class TangentCoeffs:
    __slots__ = ("phi1", "phi2", "phi3")

    def __init__(self, phi1, phi2, phi3):
        self.phi1 = phi1
        self.phi2 = phi2
        self.phi3 = phi3

    def nullity(self):
        """-phi1^2 + phi2^2 + phi3^2; zero by conformality."""
        return (
            -(self.phi1 * self.phi1)
            + self.phi2 * self.phi2
            + self.phi3 * self.phi3
        )

    def as_tuple(self):
        return (self.phi1, self.phi2, self.phi3)


def phi_from_data(sample, tau):
    g = sample.g.v
    w = sample.omega_hat
    g2 = g * g
    inv_tau = 1.0 / tau
    return TangentCoeffs(
        (g2 + 1.0) * w * inv_tau,
        J * (g2 - 1.0) * w * inv_tau,
        2.0 * g * w * inv_tau,
    )


class ConnectionTable:
    """Covariant derivatives of the left-invariant frame for the metric g_+.

    nabla(i, k) is the frame-coefficient 3-vector of the derivative of
    E_k along E_i; the signs specialize the Koszul table to the
    Lorentzian metric with E_1 timelike.
    """

    def __init__(self, tau):
        t = float(tau)
        z = np.zeros(3)
        e1 = np.array([1.0, 0.0, 0.0])
        e2 = np.array([0.0, 1.0, 0.0])
        e3 = np.array([0.0, 0.0, 1.0])
        self._table = {
            (1, 1): z, (1, 2): t * e3, (1, 3): -t * e2,
            (2, 1): -t * e3, (2, 2): z, (2, 3): -t * e1,
            (3, 1): -t * e2, (3, 2): -t * e1, (3, 3): z,
        }

    def nabla(self, i, k):
        return self._table[(i, k)]


class FundamentalForms:
    __slots__ = ("conf_factor_nil", "conf_factor_mink", "Q_L", "Q_AR", "H_nil_est")

    def __init__(self, conf_factor_nil, conf_factor_mink, Q_L, Q_AR, H_nil_est=None):
        self.conf_factor_nil = conf_factor_nil
        self.conf_factor_mink = conf_factor_mink
        self.Q_L = Q_L
        self.Q_AR = Q_AR
        self.H_nil_est = H_nil_est


def fundamental_forms(sample, tau):
    m = sample.modulus_sq
    wsq = sample.omega_hat.modulus_sq()
    q_ar, q_l = differentials(sample, tau)
    return FundamentalForms(
        -4.0 * (1.0 - m) ** 2 * wsq / tau**2,
        -4.0 * (1.0 + m) ** 2 * wsq / tau**2,
        q_l,
        q_ar,
    )


def differentials(sample, tau):
    """(Q_AR, Q_L): the two paraholomorphic quadratic coefficients."""
    q_ar = -J * sample.g.dz * sample.omega_hat
    q_l = (2.0 / tau) * q_ar
    return q_ar, q_l


def duality_check(sample, tau, f1=0.0, f2=0.0):
    """Max mismatch of the shared-derivative identity between the two
    integrands; an algebraic identity, so this is a self-test."""
    state = (f1, f2, 0.0)
    nil = _nil_integrand(sample, state, tau)
    mink = _mink_integrand(sample, state, tau)
    res = max(
        pc_mag(nil[0] - mink[0]),
        pc_mag(nil[1] - mink[1]),
        pc_mag(J * (nil[2] + tau * f2 * mink[0] - tau * f1 * mink[1]) - mink[2]),
    )
    return res


def normal_nil(g, tol=1e-9):
    """Unit normal of f w.r.t. g_+, frame coefficients; blows up on |g|^2 = 1."""
    g = Paracomplex._coerce(g)
    m = g.modulus_sq()
    d = 1.0 - m
    if abs(d) < tol:
        raise GaussSingular(f"|g|^2 = 1 for g = {g}")
    return np.array([2.0 * g.re / d, 2.0 * g.im / d, (1.0 + m) / d])


def normal_minkowski(g, tol=1e-9):
    """Unit normal N_L of f_L in L^3 (signature -,+,+)."""
    g = Paracomplex._coerce(g)
    m = g.modulus_sq()
    d = 1.0 + m
    if abs(d) < tol:
        raise VerticalPoint(f"|g|^2 = -1 for g = {g}")
    return np.array([-2.0 * g.im / d, -2.0 * g.re / d, -(1.0 - m) / d])


def normal_riemannian(g, tol=1e-12):
    """Unit normal of f w.r.t. the Riemannian metric g_R; finite across
    |g|^2 = 1 wherever g + conj(g) != 0."""
    g = Paracomplex._coerce(g)
    m = g.modulus_sq()
    radicand = 2.0 * (2.0 * g.re) ** 2 + (1.0 - m) ** 2
    if radicand < tol:
        raise FrameDegenerate(f"N_R radicand vanishes for g = {g}")
    r = np.sqrt(radicand)
    return np.array([-2.0 * g.re / r, 2.0 * g.im / r, (1.0 + m) / r])


class SurfaceGrid:
    """Sampled field plus integrated positions over a GridSpec."""

    def __init__(self, spec, field):
        self.spec = spec
        self.field = field
        self.samples = [
            [field.sample_xy(x, y) for x in spec.xs] for y in spec.ys
        ]
        self.positions_nil = None   # (ny, nx, 3)
        self.positions_mink = None

    def sample(self, i, j):
        return self.samples[j][i]

    def max_harmonic_residual(self):
        return max(
            pc_mag(harmonic_residual(s)) for row in self.samples for s in row
        )


def _mink_integrand(sample, state, tau):
    g = sample.g.v
    w = sample.omega_hat
    g2 = g * g
    c = 2.0 / tau
    return (
        c * (g2 + 1.0) * w,
        c * J * (g2 - 1.0) * w,
        c * 2.0 * J * g * w,
    )


def _nil_integrand(sample, state, tau):
    g = sample.g.v
    w = sample.omega_hat
    g2 = g * g
    c = 2.0 / tau
    f1, f2 = state[0], state[1]
    p1 = c * (g2 + 1.0) * w
    p2 = c * J * (g2 - 1.0) * w
    p3 = c * (2.0 * g) * w - tau * f2 * p1 + tau * f1 * p2
    return (p1, p2, p3)


def _deriv(field, x, y, state, integrand, tau, axis, cache):
    key = (round(x, 14), round(y, 14))
    s = cache.get(key)
    if s is None:
        s = field.sample_xy(x, y)
        cache[key] = s
    phis = integrand(s, state, tau)
    if axis == 0:
        return np.array([p.re for p in phis])
    return np.array([p.im for p in phis])


def _rk4_segment(field, state, x0, y0, x1, y1, integrand, tau, cache, substeps=1):
    # grid-aligned segments only
    if substeps > 1:
        for k in range(substeps):
            a = k / substeps
            b = (k + 1) / substeps
            state = _rk4_segment(
                field, state,
                x0 + a * (x1 - x0), y0 + a * (y1 - y0),
                x0 + b * (x1 - x0), y0 + b * (y1 - y0),
                integrand, tau, cache,
            )
        return state
    if y0 == y1:
        axis, h = 0, x1 - x0
        pm = (0.5 * (x0 + x1), y0)
        p0, p1 = (x0, y0), (x1, y0)
    else:
        axis, h = 1, y1 - y0
        pm = (x0, 0.5 * (y0 + y1))
        p0, p1 = (x0, y0), (x0, y1)
    k1 = _deriv(field, *p0, state, integrand, tau, axis, cache)
    k2 = _deriv(field, *pm, state + 0.5 * h * k1, integrand, tau, axis, cache)
    k3 = _deriv(field, *pm, state + 0.5 * h * k2, integrand, tau, axis, cache)
    k4 = _deriv(field, *p1, state + h * k3, integrand, tau, axis, cache)
    return state + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def _integrate_grid(field, spec, integrand, tau, order="xy", substeps=4):
    ny, nx = spec.ny, spec.nx
    pos = np.zeros((ny, nx, 3))
    cache = {}
    xs, ys = spec.xs, spec.ys
    i0, j0 = spec.base_i, spec.base_j

    def walk_x(j, i_from, state):
        states = {i_from: state.copy()}
        st = state.copy()
        for i in range(i_from + 1, nx):
            st = _rk4_segment(field, st, xs[i - 1], ys[j], xs[i], ys[j], integrand, tau, cache, substeps)
            states[i] = st.copy()
        st = state.copy()
        for i in range(i_from - 1, -1, -1):
            st = _rk4_segment(field, st, xs[i + 1], ys[j], xs[i], ys[j], integrand, tau, cache, substeps)
            states[i] = st.copy()
        return states

    def walk_y(i, j_from, state):
        states = {j_from: state.copy()}
        st = state.copy()
        for j in range(j_from + 1, ny):
            st = _rk4_segment(field, st, xs[i], ys[j - 1], xs[i], ys[j], integrand, tau, cache, substeps)
            states[j] = st.copy()
        st = state.copy()
        for j in range(j_from - 1, -1, -1):
            st = _rk4_segment(field, st, xs[i], ys[j + 1], xs[i], ys[j], integrand, tau, cache, substeps)
            states[j] = st.copy()
        return states

    origin = np.zeros(3)
    if order == "xy":
        row = walk_x(j0, i0, origin)
        for i in range(nx):
            col = walk_y(i, j0, row[i])
            for j in range(ny):
                pos[j, i] = col[j]
    elif order == "yx":
        col = walk_y(i0, j0, origin)
        for j in range(ny):
            row = walk_x(j, i0, col[j])
            for i in range(nx):
                pos[j, i] = row[i]
    else:
        raise ValueError("order must be 'xy' or 'yx'")
    return pos


def _check_harmonic(grid, tol):
    res = grid.max_harmonic_residual()
    if res > tol:
        raise NonHarmonicInput(f"max harmonic residual {res:.3e} exceeds {tol:.3e}")


def integrate_minkowski(field, spec, harmonic_tol=1e-6, order="xy", grid=None, substeps=4):
    """Integrate the dual CMC surface f_L in L^3 over the grid."""
    if grid is None:
        grid = SurfaceGrid(spec, field)
    _check_harmonic(grid, harmonic_tol)
    grid.positions_mink = _integrate_grid(field, spec, _mink_integrand, field.tau, order, substeps)
    return grid


def integrate_nil(field, spec, harmonic_tol=1e-6, order="xy", grid=None, substeps=4):
    """Integrate the timelike minimal surface f in Nil_3(tau) over the grid."""
    if grid is None:
        grid = SurfaceGrid(spec, field)
    _check_harmonic(grid, harmonic_tol)
    grid.positions_nil = _integrate_grid(field, spec, _nil_integrand, field.tau, order, substeps)
    return grid


def loop_residual(field, spec, which="nil", substeps=4):
    """Max loop-closure defect of the representation 1-forms per cell area.

    The full coupled state is carried around each cell, so the f^3 form
    (which references the running f^1, f^2) is tested as well.
    """
    integrand = _nil_integrand if which == "nil" else _mink_integrand
    tau = field.tau
    cache = {}
    xs, ys = spec.xs, spec.ys
    worst = 0.0
    for j in range(spec.ny - 1):
        for i in range(spec.nx - 1):
            area = (xs[i + 1] - xs[i]) * (ys[j + 1] - ys[j])
            st = np.zeros(3)
            corners = [
                (xs[i], ys[j]), (xs[i + 1], ys[j]),
                (xs[i + 1], ys[j + 1]), (xs[i], ys[j + 1]), (xs[i], ys[j]),
            ]
            for (x0, y0), (x1, y1) in zip(corners[:-1], corners[1:]):
                st = _rk4_segment(field, st, x0, y0, x1, y1, integrand, tau, cache, substeps)
            worst = max(worst, float(np.max(np.abs(st))) / area)
    return worst


def _pc_vec_add(a, b):
    return tuple(x + y for x, y in zip(a, b))


def _pc_vec_scale(c, a):
    return tuple(c * x for x in a)


_FD5 = ((-2, 1.0 / 12.0), (-1, -8.0 / 12.0), (1, 8.0 / 12.0), (2, -1.0 / 12.0))


def mean_curvature_nil(field, x, y, h=1e-3, singular_tol=1e-8):
    """Numerical mean curvature of f at (x, y) from the phi-coefficients.

    Estimates nabla_z f_zbar via 5-point finite differences of the
    f_zbar frame coefficients plus the connection-table terms, projects
    onto the unit normal and divides by half the (signed) conformal
    factor.  Diagnostic-grade: the error scales like h^4 plus the
    sample's own derivative error.
    """
    tau = field.tau
    s0 = field.sample_xy(x, y)
    m = s0.modulus_sq
    wsq = s0.omega_hat.modulus_sq()
    e_u = -4.0 * (1.0 - m) ** 2 * wsq / tau**2
    if abs(e_u) < singular_tol:
        raise SingularNode(f"conformal factor vanishes at ({x}, {y})")

    def psi(px, py):
        phi = phi_from_data(field.sample_xy(px, py), tau)
        return tuple(p.conj() for p in phi.as_tuple())

    dpsi_dx = (Paracomplex(), Paracomplex(), Paracomplex())
    dpsi_dy = (Paracomplex(), Paracomplex(), Paracomplex())
    for off, c in _FD5:
        dpsi_dx = _pc_vec_add(dpsi_dx, _pc_vec_scale(c / h, psi(x + off * h, y)))
        dpsi_dy = _pc_vec_add(dpsi_dy, _pc_vec_scale(c / h, psi(x, y + off * h)))
    dpsi_dz = tuple(0.5 * (a + J * b) for a, b in zip(dpsi_dx, dpsi_dy))

    phi = phi_from_data(s0, tau).as_tuple()
    psi0 = tuple(p.conj() for p in phi)
    conn = ConnectionTable(tau)
    cov = list(dpsi_dz)
    for i in range(3):
        for k in range(3):
            coeffs = conn.nabla(i + 1, k + 1)
            w = phi[i] * psi0[k]
            for comp in range(3):
                if coeffs[comp] != 0.0:
                    cov[comp] = cov[comp] + coeffs[comp] * w
    n = normal_nil(s0.g.v)
    # g_+ frame metric is diag(-1, 1, 1)
    proj = -cov[0] * n[0] + cov[1] * n[1] + cov[2] * n[2]
    return 2.0 * proj.re / e_u


def mean_curvature_mink(field, x, y, h=1e-3, singular_tol=1e-8):
    """Mean curvature of the dual f_L with the same machinery, in flat L^3.

    First derivatives come from the shared tangent coefficients; second
    derivatives are 5-point finite differences of those.  The normal is
    the (negatively oriented) N_L determined by g, so harmonic data
    yields H = tau.
    """
    tau = field.tau

    def first(px, py):
        phi = phi_from_data(field.sample_xy(px, py), tau)
        fz = (phi.phi1, phi.phi2, J * phi.phi3)
        fx = np.array([2.0 * c.re for c in fz])
        fy = np.array([2.0 * c.im for c in fz])
        return fx, fy

    f_x, f_y = first(x, y)
    f_xx = np.zeros(3)
    f_xy = np.zeros(3)
    f_yy = np.zeros(3)
    for off, c in _FD5:
        ax, ay = first(x + off * h, y)
        bx, by = first(x, y + off * h)
        f_xx += (c / h) * ax
        f_xy += (c / h) * ay
        f_yy += (c / h) * by
    s0 = field.sample_xy(x, y)
    n = normal_minkowski(s0.g.v)
    E = minkowski_dot(f_x, f_x)
    F = minkowski_dot(f_x, f_y)
    G = minkowski_dot(f_y, f_y)
    det = E * G - F * F
    if abs(det) < singular_tol:
        raise SingularNode(f"degenerate induced metric at ({x}, {y})")
    e2 = minkowski_dot(f_xx, n)
    f2 = minkowski_dot(f_xy, n)
    g2 = minkowski_dot(f_yy, n)
    return (E * g2 - 2.0 * F * f2 + G * e2) / (2.0 * det)


def mean_curvature_parametric(fn, s, t, h=1e-4, orient=None):
    """Mean curvature of a parametric timelike surface in flat L^3.

    fn(s, t) returns the position 3-vector; derivatives are 5-point
    finite differences, the normal is the normalized Lorentz cross
    product, and H = trace(I^-1 II) / 2.  orient, when given, fixes the
    normal's sign by sign agreement.
    """
    def d1(fun, a, b, axis):
        acc = np.zeros(3)
        for off, c in _FD5:
            if axis == 0:
                acc = acc + (c / h) * fun(a + off * h, b)
            else:
                acc = acc + (c / h) * fun(a, b + off * h)
        return acc

    f_s = d1(fn, s, t, 0)
    f_t = d1(fn, s, t, 1)
    f_ss = d1(lambda a, b: d1(fn, a, b, 0), s, t, 0)
    f_tt = d1(lambda a, b: d1(fn, a, b, 1), s, t, 1)
    f_st = d1(lambda a, b: d1(fn, a, b, 1), s, t, 0)
    # Lorentz cross in (-,+,+): flip the first component of the Euclidean cross
    cr = np.cross(f_s, f_t)
    cr[0] = -cr[0]
    nrm_sq = minkowski_dot(cr, cr)
    if nrm_sq <= 0.0:
        raise SingularNode(f"degenerate or non-spacelike normal at ({s}, {t})")
    n = cr / np.sqrt(nrm_sq)
    if orient is not None and minkowski_dot(n, orient) < 0.0:
        n = -n
    E = minkowski_dot(f_s, f_s)
    F = minkowski_dot(f_s, f_t)
    G = minkowski_dot(f_t, f_t)
    e2 = minkowski_dot(f_ss, n)
    f2 = minkowski_dot(f_st, n)
    g2 = minkowski_dot(f_tt, n)
    det = E * G - F * F
    if abs(det) < 1e-14:
        raise SingularNode(f"degenerate first fundamental form at ({s}, {t})")
    return (E * g2 - 2.0 * F * f2 + G * e2) / (2.0 * det)


def export_mesh(positions, sink):
    """Write a (ny, nx, 3) position grid as an ASCII OBJ document.

    Vertices are emitted in row-major order; each quad is split into two
    triangles.  Degenerate (singular) nodes are exported unchanged.
    """
    positions = np.asarray(positions)
    ny, nx = positions.shape[:2]
    own = isinstance(sink, (str, bytes))
    fh = open(sink, "w") if own else sink
    try:
        for jj in range(ny):
            for ii in range(nx):
                x, y, z = positions[jj, ii]
                fh.write(f"v {x:.17g} {y:.17g} {z:.17g}\n")
        for jj in range(ny - 1):
            for ii in range(nx - 1):
                a = jj * nx + ii + 1
                b = a + 1
                c = a + nx
                d = c + 1
                fh.write(f"f {a} {b} {d}\n")
                fh.write(f"f {a} {d} {c}\n")
    finally:
        if own:
            fh.close()
