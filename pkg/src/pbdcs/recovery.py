"""Sparse recovery: basis pursuit, OMP, an exhaustive l0 oracle, and a seeded trial harness."""

from __future__ import annotations

import math
import statistics
from dataclasses import asdict, dataclass, field
from itertools import combinations

import numpy as np
from scipy.optimize import linprog

from .frames import FrameMatrix

RHO = 1.0
OPT_TOL = 1e-9
FEAS_TOL = 1e-8
MAX_ITERS = 50000
SUCCESS_TOL = 1e-4
MIN_MAGNITUDE = 0.1
L0_GUARD = 10**6
L0_RESIDUAL = 1e-8

SOLVERS = ("bp", "omp", "l0", "lp")


class RecoveryError(ValueError):
    def __init__(self, code: str, message: str):
        super().__init__(f"{code}: {message}")
        self.code = code


@dataclass
class SolveResult:
    x: np.ndarray
    iterations: int
    converged: bool
    residual: float


def _matrix(frame) -> np.ndarray:
    return frame.matrix if isinstance(frame, FrameMatrix) else np.asarray(frame, dtype=complex)


def _soft(w: np.ndarray, thresh: float) -> np.ndarray:
    mag = np.abs(w)
    scale = np.maximum(mag - thresh, 0.0) / np.where(mag > 0, mag, 1.0)
    return w * scale


class BasisPursuit:
    """ADMM for min ||x||_1 subject to A x = y, with the affine projection precomputed.

    x <- P(z - u) + q     (projection onto {x : A x = y})
    z <- soft(x + u, 1/rho)
    u <- u + x - z
    """

    def __init__(self, frame, rho: float = RHO):
        a = _matrix(frame)
        gram = a @ a.conj().T
        try:
            chol = np.linalg.cholesky(gram)
        except np.linalg.LinAlgError:
            raise RecoveryError("RANK_DEFICIENT", "frame rows do not span") from None
        if np.linalg.cond(chol) ** 2 > 1e12:
            raise RecoveryError("RANK_DEFICIENT", "frame rows nearly dependent")
        # pinv_rows = A^H (A A^H)^-1
        inv = np.linalg.inv(chol)
        self.pinv_rows = a.conj().T @ (inv.conj().T @ inv)
        self.proj = np.eye(a.shape[1]) - self.pinv_rows @ a
        self.a = a
        self.rho = rho

    def solve(self, y, opt_tol: float = OPT_TOL, feas_tol: float = FEAS_TOL,
              max_iters: int = MAX_ITERS) -> SolveResult:
        y = np.asarray(y, dtype=complex)
        ynorm = float(np.linalg.norm(y))
        N = self.a.shape[1]
        if ynorm == 0:
            return SolveResult(np.zeros(N, dtype=complex), 0, True, 0.0)
        # l1 minimization commutes with scaling; work at unit scale
        q = self.pinv_rows @ (y / ynorm)
        x = q.copy()
        z = _soft(x, 1 / self.rho)
        u = x - z
        thresh = 1 / self.rho
        converged = False
        it = 0
        for it in range(1, max_iters + 1):
            x_new = self.proj @ (z - u) + q
            z = _soft(x_new + u, thresh)
            u = u + x_new - z
            step = np.linalg.norm(x_new - x)
            x = x_new
            if step <= opt_tol * max(1.0, np.linalg.norm(x)) and np.linalg.norm(x - z) <= opt_tol:
                converged = True
                break
        x = x * ynorm
        resid = float(np.linalg.norm(self.a @ x - y)) / ynorm
        return SolveResult(x, it, converged and resid <= feas_tol, resid)


def bp_solve(frame, y, **params) -> SolveResult:
    rho = params.pop("rho", RHO)
    return BasisPursuit(frame, rho).solve(y, **params)


def lp_solve(frame, y) -> SolveResult:
    """Exact l1 minimization for real frames: min 1^T (p + m) s.t. A (p - m) = y, p, m >= 0."""
    a = _matrix(frame)
    y = np.asarray(y)
    if np.any(a.imag) or np.any(np.imag(y)):
        raise RecoveryError("COMPLEX_INPUT", "LP route needs a real frame and real data")
    a = a.real
    y = np.real(y).astype(float)
    N = a.shape[1]
    res = linprog(np.ones(2 * N), A_eq=np.hstack([a, -a]), b_eq=y,
                  bounds=(0, None), method="highs")
    if res.status != 0:
        raise RecoveryError("LP_FAILED", res.message)
    x = res.x[:N] - res.x[N:]
    resid = float(np.linalg.norm(a @ x - y)) / max(float(np.linalg.norm(y)), 1e-300)
    return SolveResult(x.astype(complex), int(res.nit), True, resid)


def omp_solve(frame, y, t: int) -> SolveResult:
    """Orthogonal matching pursuit with at most t atoms."""
    a = _matrix(frame)
    y = np.asarray(y, dtype=complex)
    N = a.shape[1]
    norms = np.linalg.norm(a, axis=0)
    x = np.zeros(N, dtype=complex)
    ynorm = float(np.linalg.norm(y))
    if ynorm == 0:
        return SolveResult(x, 0, True, 0.0)
    support: list[int] = []
    r = y.copy()
    coef = np.zeros(0, dtype=complex)
    for _ in range(t):
        corr = np.abs(a.conj().T @ r) / norms
        corr[support] = -1
        support.append(int(np.argmax(corr)))
        coef = np.linalg.lstsq(a[:, support], y, rcond=None)[0]
        r = y - a[:, support] @ coef
        if np.linalg.norm(r) <= L0_RESIDUAL * ynorm:
            break
    x[support] = coef
    resid = float(np.linalg.norm(r)) / ynorm
    return SolveResult(x, len(support), resid <= L0_RESIDUAL, resid)


def l0_oracle(frame, y, t_max: int) -> np.ndarray | None:
    """Sparsest exact fit over supports of size <= t_max, smallest size first.

    Supports of a given size are tried in lexicographic order. Returns None
    if no support of size <= t_max fits y to relative residual 1e-8.
    """
    a = _matrix(frame)
    y = np.asarray(y, dtype=complex)
    N = a.shape[1]
    if math.comb(N, t_max) > L0_GUARD:
        raise RecoveryError("GUARD", f"C({N},{t_max}) supports exceed {L0_GUARD}")
    ynorm = float(np.linalg.norm(y))
    if ynorm == 0:
        return np.zeros(N, dtype=complex)
    for size in range(1, t_max + 1):
        for supp in combinations(range(N), size):
            sub = a[:, supp]
            coef = np.linalg.lstsq(sub, y, rcond=None)[0]
            if np.linalg.norm(y - sub @ coef) <= L0_RESIDUAL * ynorm:
                x = np.zeros(N, dtype=complex)
                x[list(supp)] = coef
                return x
    return None


@dataclass
class SparseSignal:
    N: int
    support: tuple[int, ...]
    values: np.ndarray

    def dense(self) -> np.ndarray:
        x = np.zeros(self.N, dtype=complex)
        x[list(self.support)] = self.values
        return x


def random_sparse(N: int, t: int, rng: np.random.Generator, real: bool = False) -> SparseSignal:
    """Uniform size-t support; Gaussian values with magnitude pushed up to at least 0.1."""
    support = tuple(sorted(int(i) for i in rng.choice(N, size=t, replace=False)))
    if real:
        vals = rng.standard_normal(t).astype(complex)
    else:
        vals = (rng.standard_normal(t) + 1j * rng.standard_normal(t)) / np.sqrt(2)
    mag = np.abs(vals)
    small = mag < MIN_MAGNITUDE
    if np.any(small):
        phase = np.where(mag[small] > 0, vals[small] / np.where(mag[small] > 0, mag[small], 1), 1)
        vals[small] = MIN_MAGNITUDE * phase
    return SparseSignal(N, support, vals)


def trial_rng(seed: int, index: int) -> np.random.Generator:
    """Independent stream per (seed, trial index), so trials need not run in order."""
    return np.random.default_rng([seed, index])


@dataclass
class TrialRecord:
    trial: int
    t: int
    solver: str
    rel_error: float
    iters: int
    success: bool


@dataclass
class RecoveryTrialStats:
    trials: int
    successes: int
    max_rel_error: float
    median_rel_error: float
    solver: str
    seed: int
    t: int
    records: list[TrialRecord] = field(default_factory=list, repr=False)

    def to_json(self) -> dict:
        out = asdict(self)
        out.pop("records")
        return out

    def csv_rows(self) -> list[str]:
        rows = ["trial,t,solver,rel_error,iters,success"]
        for r in self.records:
            rows.append(f"{r.trial},{r.t},{r.solver},{r.rel_error!r},{r.iters},{int(r.success)}")
        return rows


def run_trials(frame, t: int, trials: int, seed: int, solver: str = "bp",
               success_tol: float = SUCCESS_TOL) -> RecoveryTrialStats:
    if t < 1:
        raise RecoveryError("BAD_SPARSITY", f"sparsity must be at least 1, got {t}")
    if trials < 1:
        raise RecoveryError("BAD_TRIALS", f"need at least one trial, got {trials}")
    if solver not in SOLVERS:
        raise RecoveryError("BAD_SOLVER", f"unknown solver {solver!r}")
    a = _matrix(frame)
    real = not np.any(a.imag)
    if solver == "lp" and not real:
        raise RecoveryError("COMPLEX_INPUT", "LP route needs a real frame")
    bp = BasisPursuit(a) if solver == "bp" else None
    records = []
    for i in range(trials):
        sig = random_sparse(a.shape[1], t, trial_rng(seed, i), real=real)
        x = sig.dense()
        y = a @ x
        if solver == "bp":
            res = bp.solve(y)
            xh, iters = res.x, res.iterations
        elif solver == "lp":
            res = lp_solve(a, y)
            xh, iters = res.x, res.iterations
        elif solver == "omp":
            res = omp_solve(a, y, t)
            xh, iters = res.x, res.iterations
        else:
            xh = l0_oracle(a, y, t)
            iters = 0
            if xh is None:
                xh = np.zeros_like(x)
        err = float(np.linalg.norm(xh - x) / np.linalg.norm(x))
        records.append(TrialRecord(i, t, solver, err, iters, err <= success_tol))
    errs = [r.rel_error for r in records]
    return RecoveryTrialStats(
        trials=trials,
        successes=sum(r.success for r in records),
        max_rel_error=max(errs),
        median_rel_error=statistics.median(errs),
        solver=solver,
        seed=seed,
        t=t,
        records=records,
    )
