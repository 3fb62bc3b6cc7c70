"""Coherence, Welch bound, epsilon-equiangularity, tightness and recovery thresholds."""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass

import numpy as np

from .designs import PACKING, Design, stats, validate
from .frames import CON0, CON1, FrameMatrix

GRAM_TOL = 1e-10
# guard band for the strict inequality in the recovery threshold
BOUNDARY_TOL = 1e-12


class AnalysisError(ValueError):
    def __init__(self, code: str, message: str):
        super().__init__(f"{code}: {message}")
        self.code = code


def welch_bound(n: int, N: int) -> float:
    """sqrt((N - n) / ((N - 1) n)), the least possible coherence of n x N unit columns."""
    if not (1 <= n <= N and N >= 2):
        raise AnalysisError("BAD_SHAPE", f"need N >= n >= 1 and N >= 2, got n={n}, N={N}")
    return math.sqrt((N - n) / ((N - 1) * n))


def normalized_gram(frame: FrameMatrix) -> np.ndarray:
    """|<c_i, c_j>| / (|c_i| |c_j|) for all column pairs."""
    m = frame.matrix if isinstance(frame, FrameMatrix) else np.asarray(frame, dtype=complex)
    if m.shape[1] < 2:
        raise AnalysisError("BAD_SHAPE", "need at least two columns")
    norms = np.linalg.norm(m, axis=0)
    if np.any(norms == 0):
        raise AnalysisError("ZERO_COLUMN", "frame has a zero column")
    g = np.abs(m.conj().T @ m)
    return g / np.outer(norms, norms)


def inner_product_extremes(frame: FrameMatrix) -> tuple[float, float]:
    g = normalized_gram(frame)
    iu = np.triu_indices(g.shape[0], k=1)
    off = g[iu]
    return float(off.min()), float(off.max())


def mip(frame: FrameMatrix) -> float:
    return inner_product_extremes(frame)[1]


def epsilon_from_extremes(lo: float, hi: float, mu: float) -> float:
    if mu == 0:
        return 0.0 if hi == 0 else math.inf
    return max(1 - lo / mu, hi / mu - 1, 0.0)


def epsilon_equiangular(frame: FrameMatrix) -> float:
    """Smallest eps with (1-eps)*welch <= mu(c_i, c_j) <= (1+eps)*welch for all pairs."""
    lo, hi = inner_product_extremes(frame)
    return epsilon_from_extremes(lo, hi, welch_bound(frame.n, frame.N))


def recoverability_t(mu: float) -> int:
    """Largest integer t with t < 1/(2 mu) + 1/2."""
    if mu <= 0:
        raise AnalysisError("ZERO_COHERENCE", "threshold unbounded for orthogonal columns")
    if mu >= 1:
        return 0
    bound = 1 / (2 * mu) + 0.5
    nearest = round(bound)
    if abs(bound - nearest) <= BOUNDARY_TOL * max(1.0, bound):
        return int(nearest) - 1
    return math.floor(bound)


def eps_threshold(n: int, eps: float) -> int:
    """floor(sqrt(n) / (2 (1 + eps)))."""
    if math.isinf(eps):
        return 0
    return math.floor(math.sqrt(n) / (2 * (1 + eps)))


def is_tight(frame: FrameMatrix, tol: float = GRAM_TOL) -> bool:
    """Row Gram matrix proportional to the identity (within tol relative to its scale)."""
    m = frame.matrix
    rg = m @ m.conj().T
    scale = float(np.mean(np.real(np.diag(rg))))
    if scale <= 0:
        return False
    return float(np.max(np.abs(rg - scale * np.eye(m.shape[0])))) <= tol * scale


def is_etf(frame: FrameMatrix, tol: float = GRAM_TOL) -> bool:
    return is_tight(frame, tol) and epsilon_equiangular(frame) <= tol


@dataclass(frozen=True)
class CoherenceReport:
    n: int
    N: int
    mip: float
    welch: float
    epsilon: float
    t_mip: int
    t_eps: int
    tight: bool
    etf: bool
    min_inner: float
    max_inner: float

    def to_json(self) -> dict:
        out = asdict(self)
        for key, val in out.items():
            if isinstance(val, float) and not math.isfinite(val):
                out[key] = None
        return out


def analyze(frame: FrameMatrix, tol: float = GRAM_TOL) -> CoherenceReport:
    lo, hi = inner_product_extremes(frame)
    welch = welch_bound(frame.n, frame.N)
    eps = epsilon_from_extremes(lo, hi, welch)
    tight = is_tight(frame, tol)
    return CoherenceReport(
        n=frame.n,
        N=frame.N,
        mip=hi,
        welch=welch,
        epsilon=eps,
        t_mip=frame.N if hi == 0 else recoverability_t(hi),
        t_eps=eps_threshold(frame.n, eps),
        tight=tight,
        etf=tight and eps <= tol,
        min_inner=lo,
        max_inner=hi,
    )


@dataclass(frozen=True)
class TheoreticalBounds:
    """Bound chain for a PBD under CON0 or CON1.

    ``mip_upper`` bounds the normalized coherence. For CON1 ``raw_inner_upper``
    is the bound on unnormalized inner products (columns there have norm
    sqrt(r/(r+1)), not 1). ``certified_epsilon`` is None when certification is
    withheld.
    """

    construction: str
    v: int
    n: int
    N: int
    k_min: int
    k_max: int
    replication_bounds: tuple[float, float]
    block_count_bounds: tuple[float, float]
    welch: float
    welch_lower: float | None
    mip_upper: float
    raw_inner_upper: float | None
    hypotheses_met: bool
    chain_holds: bool
    certified_epsilon: float | None

    def to_json(self) -> dict:
        out = asdict(self)
        out["replication_bounds"] = list(self.replication_bounds)
        out["block_count_bounds"] = list(self.block_count_bounds)
        return out


def theoretical_bounds(design: Design, construction: str) -> TheoreticalBounds:
    """Evaluate the coherence bound chain for a PBD.

    CON0: certification of eps = 1 needs MIP <= K_max/(v-1) (always true for a
    PBD) and welch >= K_max/(2(v-1)). The latter follows from the hypotheses
    2 <= K_min, K_max <= sqrt(2)(K_min - 1), 2n - 1 <= N; when those fail it is
    still checked numerically on the actual (n, N) and certification is granted
    if it holds (``chain_holds``).

    CON1: eps = (K_max - K_min)/(K_min - 1) for any PBD with K_min >= 2.
    """
    if design.kind == PACKING or not validate(design).ok:
        raise AnalysisError("NOT_PBD", "bound chain applies to valid PBDs only")
    st = stats(design)
    v, kmin, kmax = design.v, st.k_min, st.k_max
    n = st.n_blocks
    rep_bounds = ((v - 1) / (kmax - 1), (v - 1) / (kmin - 1))
    count_bounds = (v * (v - 1) / (kmax * (kmax - 1)), v * (v - 1) / (kmin * (kmin - 1)))

    if construction == CON0:
        N = st.sum_block_sizes
        welch = welch_bound(n, N) if N >= 2 else 0.0
        mip_upper = kmax / (v - 1)
        hyp = kmin >= 2 and kmax <= math.sqrt(2) * (kmin - 1) and 2 * n - 1 <= N
        chain = N > n and 0.5 * mip_upper <= welch
        return TheoreticalBounds(
            CON0, v, n, N, kmin, kmax, rep_bounds, count_bounds, welch,
            0.5 * mip_upper, mip_upper, None, hyp, chain,
            1.0 if (hyp or chain) else None,
        )
    if construction == CON1:
        N = st.sum_block_sizes + v
        welch = welch_bound(n, N)
        hyp = kmin >= 2
        return TheoreticalBounds(
            CON1, v, n, N, kmin, kmax, rep_bounds, count_bounds, welch,
            (kmin - 1) / (v + kmin - 2), (kmax - 1) / (v - 1), (kmax - 1) / (v + kmin - 2),
            hyp, hyp, (kmax - kmin) / (kmin - 1) if hyp else None,
        )
    raise AnalysisError("BAD_TAG", f"no bound chain for construction {construction!r}")


@dataclass(frozen=True)
class PackingBound:
    tau: float
    t: int
    min_replication: int
    k_min: int


def packing_bound(design: Design, tau: float | None = None) -> PackingBound:
    """Recovery threshold floor(sqrt(n) / (4 tau)) for a CON0 frame built on a packing.

    With ``tau`` omitted the smallest admissible value
    (v-1) / ((K_min - 1) * min r_x) is used; a supplied tau must satisfy
    min r_x >= (v-1) / (tau (K_min - 1)).
    """
    if not validate(design.as_packing()).ok:
        raise AnalysisError("NOT_PACKING", "some pair lies in two blocks")
    st = stats(design)
    rmin = min(st.replication)
    if rmin == 0:
        raise AnalysisError("ZERO_REPLICATION", "a point lies in no block")
    tau_min = (design.v - 1) / ((st.k_min - 1) * rmin)
    if tau is None:
        tau = tau_min
    elif tau < tau_min * (1 - BOUNDARY_TOL):
        raise AnalysisError("HYPOTHESIS_FAIL", f"tau={tau} below the admissible {tau_min}")
    return PackingBound(tau, math.floor(math.sqrt(st.n_blocks) / (4 * tau)), rmin, st.k_min)
