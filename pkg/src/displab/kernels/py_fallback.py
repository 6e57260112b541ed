"""Pure-NumPy hit-and-run chain stepping, vectorized across chains.

Same contract as the compiled kernel in ``_hitrun.pyx``: altering one must
keep the other in sync. The chains advance in lockstep one step at a time;
the per-step work is a pair of (chains x facets) matmuls, so this backend
is competitive when many chains run at once and much slower for few chains.
"""
from __future__ import annotations

import numpy as np


def advance_chains(
    normals_A: np.ndarray,
    offsets_b: np.ndarray,
    X: np.ndarray,
    step_dirs: np.ndarray,
    step_unifs: np.ndarray,
) -> None:
    n_steps = step_dirs.shape[0]
    At = normals_A.T
    for t in range(n_steps):
        D = step_dirs[t]
        AD = D @ At
        AX = X @ At
        slack = offsets_b - AX
        with np.errstate(divide="ignore", invalid="ignore"):
            ratio = slack / AD
        hi = np.min(np.where(AD > 0.0, ratio, np.inf), axis=1, initial=np.inf)
        lo = np.max(np.where(AD < 0.0, ratio, -np.inf), axis=1, initial=-np.inf)
        ok = (lo <= hi) & np.isfinite(lo) & np.isfinite(hi)
        lo_ok = np.where(ok, lo, 0.0)
        span = np.where(ok, hi - lo, 0.0)
        X += (lo_ok + step_unifs[t] * span)[:, None] * D
