"""Reference solvers and an independent optimality check for the lasso.

These exist to benchmark the consensus solver: a truncated-SVD pseudoinverse
(the classic non-sparse reconstruction), an accelerated proximal-gradient
(Nesterov/FISTA-style) lasso solver, and a first-order KKT test that certifies
a candidate solution without running any solver at all.
"""

import math
import time
from dataclasses import dataclass

import numpy as np

from .admm import ConvergenceTrace, IterationRecord, evaluate_objective, soft_threshold
from .scene import matrix_array, vector_array


def solve_pseudoinverse(h, g, trunc_rel_tol=1e-10):
    """Minimum-norm least-squares estimate via a truncated SVD.

    Singular values below trunc_rel_tol * sigma_max are discarded; directions
    in the (numerical) null space receive zero weight.
    """
    if not 0.0 < trunc_rel_tol < 1.0:
        raise ValueError("trunc_rel_tol must lie in (0, 1)")
    a = matrix_array(h)
    b = vector_array(g)
    if a.shape[0] != b.shape[0]:
        raise ValueError(f"matrix has {a.shape[0]} rows but measurement has {b.shape[0]}")
    u_svd, sing, vh = np.linalg.svd(a, full_matrices=False)
    if sing.size == 0 or sing[0] == 0.0:
        return np.zeros(a.shape[1], dtype=np.complex128)
    keep = sing > trunc_rel_tol * sing[0]
    coeff = (u_svd[:, keep].conj().T @ b) / sing[keep]
    return vh[keep].conj().T @ coeff


def _power_iteration_gram(a, n_iter=30, seed=0):
    # largest eigenvalue of A^H A from a fixed-seed start vector
    rng = np.random.default_rng(seed)
    x = rng.standard_normal(a.shape[1]) + 1j * rng.standard_normal(a.shape[1])
    est = 0.0
    for _ in range(n_iter):
        y = a.conj().T @ (a @ x)
        est = float(np.linalg.norm(y))
        if est == 0.0:
            return 0.0
        x = y / est
    return est


def solve_fista(h, g, lam, max_iter=500, tol=1e-10):
    """Accelerated proximal gradient for the complex lasso; returns (u, trace).

    The step is 1 / L with L a power-iteration estimate of ||H||_2^2 (30
    iterations, fixed seed) inflated by 1%. The trace records the objective
    and the step norm per iteration; iteration stops once the relative
    objective change drops below tol, or at max_iter.
    """
    if lam < 0:
        raise ValueError("lam must be >= 0")
    a = matrix_array(h)
    b = vector_array(g)
    if a.shape[0] != b.shape[0]:
        raise ValueError(f"matrix has {a.shape[0]} rows but measurement has {b.shape[0]}")
    est = _power_iteration_gram(a)
    lips = 1.01 * est if est > 0.0 else 1.0
    n = a.shape[1]
    x = np.zeros(n, dtype=np.complex128)
    y = x
    t = 1.0
    trace = ConvergenceTrace()
    prev_obj = None
    start = time.perf_counter()
    for k in range(max_iter):
        grad = a.conj().T @ (a @ y - b)
        x_new = soft_threshold(y - grad / lips, lam / lips)
        t_new = 0.5 * (1.0 + math.sqrt(1.0 + 4.0 * t * t))
        y = x_new + ((t - 1.0) / t_new) * (x_new - x)
        step = float(np.linalg.norm(x_new - x))
        x, t = x_new, t_new
        obj = evaluate_objective(a, b, x, lam)
        trace.append(IterationRecord(k, obj, step, 0.0, time.perf_counter() - start))
        if prev_obj is not None and abs(prev_obj - obj) < tol * max(abs(prev_obj), 1e-300):
            break
        prev_obj = obj
    return x, trace


@dataclass(frozen=True)
class KktReport:
    """First-order optimality residuals of the lasso at a candidate point."""

    max_active_violation: float
    max_inactive_excess: float
    tolerance: float
    passed: bool


def check_lasso_kkt(h, g, lam, v, tol):
    """Check lasso stationarity at v without solving anything.

    With r = H^H (H v - g): active entries (v_p != 0) must satisfy
    r_p + lam * v_p / |v_p| = 0, inactive ones |r_p| <= lam. Entries with
    |v_p| <= 1e-12 * max|v| (absolute 1e-14 when v = 0) count as inactive.
    With lam = 0 both conditions collapse to ||r||_inf <= tol.
    """
    if lam < 0:
        raise ValueError("lam must be >= 0")
    a = matrix_array(h)
    b = vector_array(g)
    vv = vector_array(v)
    if a.shape[0] != b.shape[0] or a.shape[1] != vv.shape[0]:
        raise ValueError(f"shapes do not match: H {a.shape}, g {b.shape}, v {vv.shape}")
    grad = a.conj().T @ (a @ vv - b)
    vmax = float(np.max(np.abs(vv))) if vv.size else 0.0
    cutoff = 1e-12 * vmax if vmax > 0.0 else 1e-14
    active = np.abs(vv) > cutoff
    if np.any(active):
        av = vv[active]
        max_active = float(np.max(np.abs(grad[active] + lam * av / np.abs(av))))
    else:
        max_active = 0.0
    if np.any(~active):
        max_inactive = max(float(np.max(np.abs(grad[~active]))) - lam, 0.0)
    else:
        max_inactive = 0.0
    return KktReport(
        max_active_violation=max_active,
        max_inactive_excess=max_inactive,
        tolerance=float(tol),
        passed=max_active <= tol and max_inactive <= tol,
    )
