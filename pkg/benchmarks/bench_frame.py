"""Compare the compiled and pure-numpy frame integration kernels.

Run as:  python3 benchmarks/bench_frame.py
The backend is chosen at import time, so each variant runs in a
subprocess with NILMIN_DISABLE_NUMBA set accordingly.
"""
import json
import os
import subprocess
import sys
import textwrap

_WORK = textwrap.dedent("""
    import time, json
    import numpy as np
    from nilmin._kernels import frame_rk4, USING_NUMBA
    from nilmin.bscroll import CurvatureProfile, integrate_frame

    profile = CurvatureProfile(2.0, 1.0)
    integrate_frame(profile, (0.0, 0.01), h=1e-3)  # warm-up / compile
    best = float("inf")
    for _ in range(3):
        start = time.perf_counter()
        result = integrate_frame(profile, (-2.0, 2.0), h=1e-3)
        best = min(best, time.perf_counter() - start)
    print(json.dumps({
        "numba": USING_NUMBA,
        "seconds": best,
        "checksum": float(np.sum(result.traj)),
    }))
""")


def run(disable):
    env = dict(os.environ, NILMIN_DISABLE_NUMBA="1" if disable else "0")
    out = subprocess.run(
        [sys.executable, "-c", _WORK], env=env, capture_output=True, text=True,
        check=True,
    )
    return json.loads(out.stdout.strip().splitlines()[-1])


def main():
    fast = run(disable=False)
    slow = run(disable=True)
    print(f"numba backend : {fast['seconds']:.4f} s (compiled={fast['numba']})")
    print(f"numpy backend : {slow['seconds']:.4f} s (compiled={slow['numba']})")
    if fast["numba"]:
        print(f"speedup       : {slow['seconds'] / fast['seconds']:.1f}x")
    drift = abs(fast["checksum"] - slow["checksum"])
    print(f"trajectory checksum difference: {drift:.3e}")


if __name__ == "__main__":
    main()
