"""Block-type arithmetic for PBDs with block sizes k-1, k, k+1.

Everything here is exact integer arithmetic. A ``PlanResult`` certifies only
that a block type is arithmetically admissible (pair count is triangular, the
column-gcd and non-negative MX = alpha conditions hold). Whether a design of
that type exists for the returned v is an asymptotic statement with
unspecified constants, so results carry ``existence = "asymptotic-only"``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import reduce
from itertools import product
from typing import Sequence

EXISTENCE = "asymptotic-only"

# columns are the graphs K_{k-1}+K_k, K_k+K_{k+1}, K_{k-1}+K_k+K_{k+1}
M_BALANCED = ((1, 0, 1), (1, 1, 1), (0, 1, 1))
# used when the surplus of (k+1)-blocks exceeds n/4
M_SKEWED = ((1, 0, 0), (5, 1, 1), (0, 1, 2))

ENUM_LIMIT = 10**6


class PlanError(ValueError):
    def __init__(self, code: str, message: str):
        super().__init__(f"{code}: {message}")
        self.code = code


@dataclass(frozen=True)
class BlockType:
    K: tuple[int, ...]
    alpha: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "K", tuple(int(k) for k in self.K))
        object.__setattr__(self, "alpha", tuple(int(a) for a in self.alpha))
        if len(self.K) != len(self.alpha):
            raise PlanError("MALFORMED", "K and alpha lengths differ")
        if any(a < 0 for a in self.alpha):
            raise PlanError("MALFORMED", f"negative block count in {self.alpha}")

    @property
    def n(self) -> int:
        return sum(self.alpha)

    @property
    def N(self) -> int:
        return sum(k * a for k, a in zip(self.K, self.alpha))

    @classmethod
    def around(cls, k: int, alpha: Sequence[int]) -> "BlockType":
        return cls((k - 1, k, k + 1), tuple(alpha))


def pair_count(bt: BlockType) -> int:
    """Number of point pairs covered: sum_i alpha_i * C(k_i, 2)."""
    return sum(a * math.comb(k, 2) for k, a in zip(bt.K, bt.alpha))


def triangular_root(F: int) -> int | None:
    """v with C(v, 2) = F, or None."""
    if F < 0:
        return None
    v = (1 + math.isqrt(1 + 8 * F)) // 2
    return v if v * (v - 1) // 2 == F else None


def _middle_k(bt: BlockType) -> int:
    if len(bt.K) != 3 or bt.K[1] - bt.K[0] != 1 or bt.K[2] - bt.K[1] != 1:
        raise PlanError("MALFORMED", f"expected block sizes (k-1, k, k+1), got {bt.K}")
    return bt.K[1]


def binom_swap(bt: BlockType, t: int) -> BlockType:
    """(a, b, c) -> (a + t, b - 2t, c + t); raises the pair count by exactly t."""
    k = _middle_k(bt)
    a, b, c = bt.alpha
    if b - 2 * t < 0 or a + t < 0 or c + t < 0:
        raise PlanError("INFEASIBLE_SWAP", f"shift {t} leaves a negative count in {bt.alpha}")
    return BlockType.around(k, (a + t, b - 2 * t, c + t))


def feasible(v: int, bt: BlockType) -> bool:
    return pair_count(bt) == math.comb(v, 2)


def designexistence_check(bt: BlockType, v: int) -> tuple[bool, list[str]]:
    """The three balance inequalities plus the pair-count equation."""
    _middle_k(bt)
    a, b, c = bt.alpha
    violated = []
    if not b >= a:
        violated.append("alpha_k >= alpha_{k-1}")
    if not b >= c:
        violated.append("alpha_k >= alpha_{k+1}")
    if not a + c >= b:
        violated.append("alpha_{k+1} + alpha_{k-1} >= alpha_k")
    if not feasible(v, bt):
        violated.append("pair_count == C(v,2)")
    return not violated, violated


def column_gcd_ok(M: Sequence[Sequence[int]], K: Sequence[int]) -> bool:
    """Each column's non-zero rows, indexed by k_i - 1, have gcd 1."""
    for j in range(len(M[0])):
        idx = [K[i] - 1 for i in range(len(M)) if M[i][j] != 0]
        if not idx or reduce(math.gcd, idx) != 1:
            return False
    return True


def _solve_exact(M, alpha) -> list[Fraction] | None:
    """Gauss-Jordan over the rationals; None if M is singular."""
    s = len(M)
    aug = [[Fraction(x) for x in row] + [Fraction(a)] for row, a in zip(M, alpha)]
    for col in range(s):
        piv = next((r for r in range(col, s) if aug[r][col] != 0), None)
        if piv is None:
            return None
        aug[col], aug[piv] = aug[piv], aug[col]
        p = aug[col][col]
        aug[col] = [x / p for x in aug[col]]
        for r in range(s):
            if r != col and aug[r][col] != 0:
                f = aug[r][col]
                aug[r] = [x - f * y for x, y in zip(aug[r], aug[col])]
    return [row[-1] for row in aug]


def solve_mx(M: Sequence[Sequence[int]], alpha: Sequence[int]) -> tuple[int, ...] | None:
    """Non-negative integer X with M X = alpha, or None.

    Square invertible M is inverted exactly; otherwise X is enumerated with
    each x_j bounded by min_i alpha_i / m_ij over its non-zero entries.
    """
    if any(x < 0 for row in M for x in row):
        raise PlanError("MALFORMED", "M must be non-negative")
    s, t = len(M), len(M[0])
    if len(alpha) != s:
        raise PlanError("MALFORMED", "alpha length must equal the row count of M")
    if s == t:
        sol = _solve_exact(M, alpha)
        if sol is not None:
            if all(x.denominator == 1 and x >= 0 for x in sol):
                return tuple(int(x) for x in sol)
            return None

    bounds = []
    for j in range(t):
        caps = [alpha[i] // M[i][j] for i in range(s) if M[i][j] > 0]
        bounds.append(min(caps) if caps else 0)
    if math.prod(b + 1 for b in bounds) > ENUM_LIMIT:
        raise PlanError("GUARD", "enumeration space too large")
    for X in product(*(range(b + 1) for b in bounds)):
        if all(sum(M[i][j] * X[j] for j in range(t)) == alpha[i] for i in range(s)):
            return tuple(X)
    return None


def column_swap_plan(bt: BlockType, delta_columns: int) -> BlockType:
    """Change the column count N by delta_columns at fixed pair count and block count.

    One step trades 2k-1 blocks of size k for k blocks of size k-1 plus k-1
    blocks of size k+1 (N drops by one); the reverse trade raises N by one.
    """
    k = _middle_k(bt)
    a, b, c = bt.alpha
    steps = abs(delta_columns)
    if delta_columns < 0:
        if b < (2 * k - 1) * steps:
            raise PlanError("INFEASIBLE", f"need {(2 * k - 1) * steps} blocks of size {k}")
        return BlockType.around(k, (a + k * steps, b - (2 * k - 1) * steps, c + (k - 1) * steps))
    if a < k * steps or c < (k - 1) * steps:
        raise PlanError("INFEASIBLE", f"not enough blocks of sizes {k - 1}, {k + 1}")
    return BlockType.around(k, (a - k * steps, b + (2 * k - 1) * steps, c - (k - 1) * steps))


@dataclass(frozen=True)
class PlanResult:
    v: int
    type: BlockType
    tau: int
    M: tuple[tuple[int, ...], ...]
    mx_solution: tuple[int, ...]
    inequalities: tuple[str, ...] = field(default=())
    existence: str = EXISTENCE

    @property
    def n(self) -> int:
        return self.type.n

    @property
    def N(self) -> int:
        return self.type.N

    def certificates(self) -> dict:
        return {
            "feasible": feasible(self.v, self.type),
            "inequalities": list(self.inequalities),
            "column_gcd": column_gcd_ok(self.M, self.type.K),
            "M": [list(r) for r in self.M],
            "mx_solution": list(self.mx_solution),
        }

    def to_json(self) -> dict:
        return {
            "v": self.v,
            "k_values": list(self.type.K),
            "alpha": list(self.type.alpha),
            "n": self.n,
            "N": self.N,
            "tau": self.tau,
            "certificates": self.certificates(),
            "existence": self.existence,
        }


def _mirror(M):
    return tuple(reversed(M))


def inverse_inequalities(M) -> tuple[str, ...]:
    """Rows of M^-1 as the inequalities x_j >= 0 in terms of (alpha_{k-1}, alpha_k, alpha_{k+1})."""
    names = ("alpha_{k-1}", "alpha_k", "alpha_{k+1}")
    cols = [_solve_exact(M, [int(i == j) for i in range(3)]) for j in range(3)]
    out = []
    for row in range(3):
        terms = [f"{cols[j][row]}*{names[j]}" for j in range(3) if cols[j][row] != 0]
        out.append(" + ".join(terms).replace("+ -", "- ") + " >= 0")
    return tuple(out)


def _search(n: int, k: int, base: tuple[int, int, int], step: tuple[int, int, int],
            tau_range: range, M) -> PlanResult | None:
    labels = inverse_inequalities(M)
    for tau in tau_range:
        alpha = tuple(b + tau * s for b, s in zip(base, step))
        if min(alpha) < 0:
            continue
        bt = BlockType.around(k, alpha)
        v = triangular_root(pair_count(bt))
        if v is None:
            continue
        X = solve_mx(M, alpha)
        if X is None:
            continue
        return PlanResult(v, bt, tau, tuple(tuple(r) for r in M), X, labels)
    return None


def _plan_integer(n: int, k: int) -> PlanResult | None:
    # alpha = (a, n - 2a, a) with n/4 <= a <= n/3 keeps the balance inequalities;
    # tau is a measured from ceil(n/4), which absorbs the n mod 12 residue
    lo = -(-n // 4)
    hi = n // 3
    return _search(n, k, (lo, n - 2 * lo, lo), (1, -2, 1), range(0, hi - lo + 1),
                   M_BALANCED)


def plan_integer(n: int, k: int) -> PlanResult | None:
    """Smallest tau with type (a, n - 2a, a), a = ceil(n/4) + tau, whose pair count is C(v, 2).

    The design would have n blocks and N = k n columns. Returns None when no
    triangular number falls in the reachable range.
    """
    if k <= 3:
        raise PlanError("BAD_K", f"k must exceed 3, got {k}")
    if n < 1:
        raise PlanError("BAD_N", f"n must be positive, got {n}")
    return _plan_integer(n, k)


def nearest_k(h: Fraction) -> int:
    """Nearest integer to h; exact halves round down (so h - k = +1/2)."""
    k = math.floor(h)
    return k + 1 if h - k > Fraction(1, 2) else k


def plan_rational(n: int, h) -> PlanResult | None:
    """Plan a type with n blocks and N = floor(h n) columns over K = (k-1, k, k+1).

    k is the integer nearest h and d = floor(h n) - k n is the column surplus.
    For d > 0 the types are (tau, n - d - 2 tau, d + tau); the balanced M is
    used while d <= n/4, the skewed M beyond. For d < 0 the roles of k-1 and
    k+1 are exchanged, mirroring M as well. The smallest tau whose pair count
    is triangular and whose MX = alpha has a non-negative solution wins.
    """
    h = Fraction(h)
    if h <= 3:
        raise PlanError("BAD_H", f"h must exceed 3, got {h}")
    if n < 1:
        raise PlanError("BAD_N", f"n must be positive, got {n}")
    k = nearest_k(h)
    d = math.floor(h * n) - k * n
    if d == 0:
        return _plan_integer(n, k)
    s = abs(d)
    M = M_BALANCED if 4 * s <= n else M_SKEWED
    if d > 0:
        base, step = (0, n - s, s), (1, -2, 1)
    else:
        base, step = (s, n - s, 0), (1, -2, 1)
        M = _mirror(M)
    return _search(n, k, base, step, range(0, (n - s) // 2 + 1), M)
