"""Hot numerical kernels with a numba fast path.

The only kernel worth compiling is the sequential frame RK4 loop (many
thousands of dependent steps).  Set NILMIN_DISABLE_NUMBA=1 to force the
pure-numpy implementation; both paths produce identical trajectories.
"""
from __future__ import annotations

import os

import numpy as np

__all__ = ["frame_rk4", "USING_NUMBA"]


def _frame_rk4_impl(kappa2, tau, h, y0, renorm):
    """RK4 of the null frame system with per-step renormalization.

    State layout y = (A, B, C, P) flattened to 12 floats with
    A' = kappa C, B' = tau C, C' = tau A + kappa B, P' = A.
    kappa2 holds kappa at the 2n+1 nodes and midpoints of the s grid.
    Returns trajectory of shape (n+1, 12).
    """
    n = (len(kappa2) - 1) // 2
    out = np.empty((n + 1, 12))
    y = y0.copy()
    out[0] = y
    k1 = np.empty(12)
    k2 = np.empty(12)
    k3 = np.empty(12)
    k4 = np.empty(12)

    def deriv(y, kap, dy):
        for m in range(3):
            dy[m] = kap * y[6 + m]              # A' = kappa C
            dy[3 + m] = tau * y[6 + m]          # B' = tau C
            dy[6 + m] = tau * y[m] + kap * y[3 + m]  # C' = tau A + kappa B
            dy[9 + m] = y[m]                    # P' = A
        return dy

    for k in range(n):
        kap0 = kappa2[2 * k]
        kaph = kappa2[2 * k + 1]
        kap1 = kappa2[2 * k + 2]
        deriv(y, kap0, k1)
        deriv(y + 0.5 * h * k1, kaph, k2)
        deriv(y + 0.5 * h * k2, kaph, k3)
        deriv(y + h * k3, kap1, k4)
        y = y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        if renorm:
            A = y[0:3]
            B = y[3:6]
            a = -A[0] * A[0] + A[1] * A[1] + A[2] * A[2]
            b = -B[0] * B[0] + B[1] * B[1] + B[2] * B[2]
            c = -A[0] * B[0] + A[1] * B[1] + A[2] * B[2]
            A = A - (a / (2.0 * c)) * B
            B = B - (b / (2.0 * c)) * A
            c2 = -A[0] * B[0] + A[1] * B[1] + A[2] * B[2]
            scale = 1.0 / np.sqrt(-c2)
            A = scale * A
            B = scale * B
            y[0:3] = A
            y[3:6] = B
            # C = A x_L B: negate the first Euclidean component
            y[6] = -(A[1] * B[2] - A[2] * B[1])
            y[7] = A[2] * B[0] - A[0] * B[2]
            y[8] = A[0] * B[1] - A[1] * B[0]
        out[k + 1] = y
    return out


USING_NUMBA = False
frame_rk4 = _frame_rk4_impl

if os.environ.get("NILMIN_DISABLE_NUMBA", "0") != "1":
    try:
        import numba

        frame_rk4 = numba.njit(cache=True)(_frame_rk4_impl)
        USING_NUMBA = True
    except ImportError:
        pass
