"""Row-partitioned consensus ADMM for the complex-valued lasso.

Solves min_u 0.5 ||H u - g||^2 + lam ||u||_1 by giving each row block
(H_i, g_i) its own local unknown u_i tied to a shared consensus variable v.
Every iteration runs the N independent block solves (ridge-regularized least
squares, reduced to an m_i x m_i solve by the matrix inversion lemma), then
soft-thresholds the block average into v, then lets the scaled duals absorb
the remaining disagreement.
"""

import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .errors import DivergenceError
from .scene import matrix_array, vector_array


def soft_threshold(a, kappa):
    """Shrink magnitudes by kappa, preserving phase; zero wherever |a| <= kappa.

    For real input this is the classic three-branch soft threshold; for complex
    input it is the proximal operator of kappa * ||.||_1 taken with the modulus.
    Works elementwise on arrays.
    """
    if kappa < 0:
        raise ValueError("threshold must be >= 0")
    a = np.asarray(a)
    mag = np.abs(a)
    shrunk = np.maximum(mag - kappa, 0.0)
    return a * (shrunk / np.where(mag > 0.0, mag, 1.0))


@dataclass(frozen=True)
class Partition:
    """Contiguous, balanced split of the measurement rows into solver blocks."""

    blocks: tuple
    n_rows: int

    @property
    def n_blocks(self):
        return len(self.blocks)

    def block_sizes(self):
        return [stop - start for start, stop in self.blocks]


def partition_rows(h, g, n_blocks):
    """Split rows [0, N_t) into n_blocks contiguous ranges differing by at most one row.

    When the split is uneven the earlier blocks receive the extra row.
    Stacking the blocks in order reconstructs (H, g) exactly.
    """
    entries = matrix_array(h)
    gv = vector_array(g)
    n_rows = entries.shape[0]
    if gv.shape[0] != n_rows:
        raise ValueError(f"measurement length {gv.shape[0]} != matrix row count {n_rows}")
    if not isinstance(n_blocks, int) or not 1 <= n_blocks <= n_rows:
        raise ValueError(f"block count must be an integer in [1, {n_rows}], got {n_blocks!r}")
    base, extra = divmod(n_rows, n_blocks)
    blocks = []
    start = 0
    for i in range(n_blocks):
        size = base + (1 if i < extra else 0)
        blocks.append((start, start + size))
        start += size
    return Partition(blocks=tuple(blocks), n_rows=n_rows)


@dataclass(frozen=True)
class AdmmParams:
    """Solver knobs: 1-norm weight, penalty parameter, budget and tolerances.

    Setting eps_abs = eps_rel = 0 disables early stopping, so exactly
    max_iter iterations run.
    """

    lam: float
    rho: float
    max_iter: int = 500
    eps_abs: float = 1e-6
    eps_rel: float = 1e-4

    def __post_init__(self):
        if not (math.isfinite(self.lam) and self.lam >= 0):
            raise ValueError("lam must be finite and >= 0")
        if not (math.isfinite(self.rho) and self.rho > 0):
            raise ValueError("rho must be finite and > 0")
        if self.max_iter < 1:
            raise ValueError("max_iter must be >= 1")
        if self.eps_abs < 0 or self.eps_rel < 0:
            raise ValueError("tolerances must be >= 0")


@dataclass(frozen=True)
class BlockSolver:
    """One row block plus the cached small-matrix inverse its updates reuse.

    ``small_inverse`` holds (I_m + H_i H_i^H / rho)^-1, m x m with m the block
    row count; the N_p x N_p regularized normal matrix is never formed.
    """

    h_block: np.ndarray
    g_block: np.ndarray
    hg: np.ndarray
    small_inverse: np.ndarray
    rho: float

    def apply_inverse(self, b):
        """Return (H_i^H H_i + rho I)^-1 b via the low-rank identity."""
        t = self.small_inverse @ (self.h_block @ b)
        return b / self.rho - self.h_block.conj().T @ t / self.rho**2


def precompute_block_solver(h_i, g_i, rho):
    """Cache H_i^H g_i and the m x m inverse used by every u-update of a block."""
    if not (isinstance(rho, (int, float)) and math.isfinite(rho) and rho > 0):
        raise ValueError("rho must be finite and > 0")
    h = np.ascontiguousarray(matrix_array(h_i))
    gv = vector_array(g_i)
    if gv.shape[0] != h.shape[0]:
        raise ValueError(f"block has {h.shape[0]} rows but {gv.shape[0]} measurements")
    if not (np.all(np.isfinite(h)) and np.all(np.isfinite(gv))):
        raise ValueError("block contains non-finite entries")
    m = h.shape[0]
    gram = np.eye(m, dtype=np.complex128) + h @ h.conj().T / rho
    small_inverse = np.linalg.inv(gram)
    # the exact inverse is Hermitian; symmetrize away LU round-off
    small_inverse = 0.5 * (small_inverse + small_inverse.conj().T)
    return BlockSolver(
        h_block=h,
        g_block=gv,
        hg=h.conj().T @ gv,
        small_inverse=small_inverse,
        rho=float(rho),
    )


def update_u(solver, v, s_i):
    """Exact minimizer of 0.5 ||H_i u - g_i||^2 + (rho/2) ||u - v + s_i||^2."""
    v = np.asarray(v)
    s_i = np.asarray(s_i)
    n = solver.h_block.shape[1]
    if v.shape != (n,) or s_i.shape != (n,):
        raise ValueError(f"expected length-{n} vectors, got {v.shape} and {s_i.shape}")
    b = solver.hg + solver.rho * (v - s_i)
    return solver.apply_inverse(b)


def update_v(u_bar, s_bar, params, n_blocks):
    """Consensus update: soft-threshold the block average at lam / (rho N)."""
    u_bar = np.asarray(u_bar)
    s_bar = np.asarray(s_bar)
    if u_bar.shape != s_bar.shape:
        raise ValueError(f"mismatched averages: {u_bar.shape} vs {s_bar.shape}")
    return soft_threshold(u_bar + s_bar, params.lam / (params.rho * n_blocks))


def update_s(s_i, u_i, v):
    """Scaled dual ascent: s_i + (u_i - v).

    Grouped so that exact consensus (u_i == v) leaves the dual bit-identical.
    """
    s_i = np.asarray(s_i)
    u_i = np.asarray(u_i)
    v = np.asarray(v)
    if not (s_i.shape == u_i.shape == v.shape):
        raise ValueError(f"mismatched lengths: {s_i.shape}, {u_i.shape}, {v.shape}")
    return s_i + (u_i - v)


@dataclass(frozen=True)
class IterationRecord:
    k: int
    objective: float
    primal_residual: float
    dual_residual: float
    elapsed_seconds: float


class ConvergenceTrace:
    """Per-iteration objective, residual norms, and wall-clock timestamps."""

    def __init__(self, records=None):
        self.records = list(records) if records is not None else []

    def append(self, record):
        self.records.append(record)

    def column(self, name):
        """One trace field as a numpy array, e.g. column('objective')."""
        return np.array([getattr(r, name) for r in self.records])

    def __len__(self):
        return len(self.records)

    def __iter__(self):
        return iter(self.records)

    def __getitem__(self, i):
        return self.records[i]


@dataclass
class AdmmState:
    """Iterate container; u_blocks / s_blocks hold one row per block."""

    u_blocks: np.ndarray
    v: np.ndarray
    s_blocks: np.ndarray
    k: int


def evaluate_objective(h, g, u, lam):
    """Value of 0.5 ||H u - g||^2 + lam * sum_p |u_p| (complex modulus)."""
    entries = matrix_array(h)
    gv = vector_array(g)
    uv = vector_array(u)
    if entries.shape[0] != gv.shape[0] or entries.shape[1] != uv.shape[0]:
        raise ValueError(
            f"shapes do not match: H {entries.shape}, g {gv.shape}, u {uv.shape}"
        )
    resid = entries @ uv - gv
    return 0.5 * float(np.real(np.vdot(resid, resid))) + lam * float(np.abs(uv).sum())


def evaluate_augmented_lagrangian(block_solvers, state, params):
    """Diagnostic value of the augmented Lagrangian at the current iterate."""
    total = params.lam * float(np.abs(state.v).sum())
    for solver, u_i, s_i in zip(block_solvers, state.u_blocks, state.s_blocks):
        fit = solver.h_block @ u_i - solver.g_block
        gap = u_i - state.v + s_i
        total += 0.5 * float(np.real(np.vdot(fit, fit)))
        total += 0.5 * params.rho * float(np.real(np.vdot(gap, gap)))
        total -= 0.5 * params.rho * float(np.real(np.vdot(s_i, s_i)))
    return total


class ConsensusLassoSolver:
    """Consensus ADMM engine over a fixed row partition.

    The N u-updates are independent and may run on a thread pool. Block
    averages are always reduced in block-index order, so solutions and traces
    are bit-identical for any worker count.
    """

    def __init__(self, h, g, params, n_blocks, workers=1):
        self.entries = matrix_array(h)
        self.g = vector_array(g)
        self.params = params
        self.partition = partition_rows(self.entries, self.g, n_blocks)
        self.block_solvers = [
            precompute_block_solver(self.entries[start:stop], self.g[start:stop], params.rho)
            for start, stop in self.partition.blocks
        ]
        self.workers = max(1, int(workers))

    def run(self, on_iteration=None):
        """Iterate from the zero start until the stopping rule or max_iter.

        Returns (v, trace, state). Per iteration the trace records the lasso
        objective at v, the stacked primal residual sqrt(sum_i ||u_i - v||^2),
        the dual residual rho * sqrt(N) * ||v - v_prev||, and elapsed seconds.
        Stops early once both residuals fall below their tolerances
        (eps_pri, eps_dual built from eps_abs / eps_rel in the usual way).
        ``on_iteration``, when given, receives each IterationRecord as it
        completes (e.g. a streaming CSV writer).
        """
        params = self.params
        n = self.partition.n_blocks
        n_p = self.entries.shape[1]
        u = np.zeros((n, n_p), dtype=np.complex128)
        s = np.zeros((n, n_p), dtype=np.complex128)
        v = np.zeros(n_p, dtype=np.complex128)
        trace = ConvergenceTrace()
        solvers = self.block_solvers
        pool = ThreadPoolExecutor(max_workers=self.workers) if self.workers > 1 else None
        start_time = time.perf_counter()
        try:
            for k in range(params.max_iter):
                # u-updates are independent per block; gather in block order
                if pool is not None:
                    rows = list(pool.map(lambda i, v=v: update_u(solvers[i], v, s[i]), range(n)))
                else:
                    rows = [update_u(solvers[i], v, s[i]) for i in range(n)]
                for i, row in enumerate(rows):
                    u[i] = row
                u_bar = u.mean(axis=0)
                s_bar = s.mean(axis=0)
                v_prev = v
                v = update_v(u_bar, s_bar, params, n)
                gap = u - v  # row-wise broadcast
                s += gap
                primal = float(np.linalg.norm(gap))
                dual = params.rho * math.sqrt(n) * float(np.linalg.norm(v - v_prev))
                objective = evaluate_objective(self.entries, self.g, v, params.lam)
                elapsed = time.perf_counter() - start_time
                if not (math.isfinite(objective) and math.isfinite(primal) and math.isfinite(dual)):
                    raise DivergenceError(f"non-finite iterate at iteration {k}")
                record = IterationRecord(k, objective, primal, dual, elapsed)
                trace.append(record)
                if on_iteration is not None:
                    on_iteration(record)
                scale = math.sqrt(n * n_p)
                eps_pri = scale * params.eps_abs + params.eps_rel * max(
                    float(np.linalg.norm(u)), math.sqrt(n) * float(np.linalg.norm(v))
                )
                eps_dual = scale * params.eps_abs + params.eps_rel * params.rho * float(
                    np.linalg.norm(s)
                )
                if primal <= eps_pri and dual <= eps_dual:
                    break
        finally:
            if pool is not None:
                pool.shutdown()
        state = AdmmState(u_blocks=u, v=v, s_blocks=s, k=len(trace))
        return v, trace, state


def solve_consensus_lasso(h, g, params, n_blocks, workers=1, on_iteration=None):
    """One-call front end to ConsensusLassoSolver; returns (v, trace, state)."""
    return ConsensusLassoSolver(h, g, params, n_blocks, workers=workers).run(on_iteration)
