"""Pairwise balanced designs and packings.

Points are the integers ``0..v-1``; blocks are stored as sorted tuples and the
block list itself is kept sorted, so two designs compare equal exactly when
their block multisets agree.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass
from itertools import combinations
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

PBD = "PBD"
PACKING = "PACKING"

SEARCH_MAX_V = 30


class DesignError(ValueError):
    """Raised for malformed designs or impossible generator requests."""

    def __init__(self, code: str, message: str):
        super().__init__(f"{code}: {message}")
        self.code = code


@dataclass(frozen=True)
class Design:
    v: int
    blocks: tuple[tuple[int, ...], ...]
    kind: str = PBD

    def __post_init__(self):
        if self.v < 1:
            raise DesignError("MALFORMED", f"v must be positive, got {self.v}")
        if self.kind not in (PBD, PACKING):
            raise DesignError("MALFORMED", f"unknown design kind {self.kind!r}")
        canon = []
        for block in self.blocks:
            b = tuple(sorted(int(p) for p in block))
            if len(b) < 2:
                raise DesignError("MALFORMED", f"block {b} has fewer than 2 points")
            if len(set(b)) != len(b):
                raise DesignError("DUPLICATE_POINT", f"block {b} repeats a point")
            if b[0] < 0 or b[-1] >= self.v:
                raise DesignError("OUT_OF_RANGE", f"block {b} not inside 0..{self.v - 1}")
            canon.append(b)
        object.__setattr__(self, "blocks", tuple(sorted(canon)))

    @property
    def n_blocks(self) -> int:
        return len(self.blocks)

    def as_packing(self) -> "Design":
        return Design(self.v, self.blocks, PACKING)

    def incidence(self) -> np.ndarray:
        """Block-by-point 0/1 matrix (rows are blocks)."""
        a = np.zeros((len(self.blocks), self.v), dtype=np.int64)
        for i, b in enumerate(self.blocks):
            a[i, list(b)] = 1
        return a

    def point_blocks(self) -> list[list[int]]:
        """For each point, the ascending indices of blocks containing it."""
        out: list[list[int]] = [[] for _ in range(self.v)]
        for i, b in enumerate(self.blocks):
            for p in b:
                out[p].append(i)
        return out


@dataclass(frozen=True)
class ValidationReport:
    ok: bool
    uncovered: tuple[tuple[int, int], ...] = ()
    repeated: tuple[tuple[int, int], ...] = ()

    @property
    def violations(self) -> tuple[tuple[int, int], ...]:
        return tuple(sorted(self.uncovered + self.repeated))


@dataclass(frozen=True)
class DesignStats:
    n_blocks: int
    block_sizes: dict[int, int]
    replication: tuple[int, ...]
    sum_block_sizes: int

    @property
    def k_min(self) -> int:
        return min(self.block_sizes)

    @property
    def k_max(self) -> int:
        return max(self.block_sizes)

    def to_json(self) -> dict:
        return {
            "n_blocks": self.n_blocks,
            "block_sizes": {str(k): c for k, c in sorted(self.block_sizes.items())},
            "replication": list(self.replication),
            "sum_block_sizes": self.sum_block_sizes,
        }


def pair_coverage(design: Design) -> Counter:
    cover: Counter = Counter()
    for b in design.blocks:
        cover.update(combinations(b, 2))
    return cover


def validate(design: Design) -> ValidationReport:
    """Check the pair-coverage condition (exactly once for a PBD, at most once for a packing)."""
    cover = pair_coverage(design)
    repeated = tuple(sorted(p for p, c in cover.items() if c >= 2))
    uncovered: tuple[tuple[int, int], ...] = ()
    if design.kind == PBD:
        uncovered = tuple(p for p in combinations(range(design.v), 2) if p not in cover)
    return ValidationReport(not repeated and not uncovered, uncovered, repeated)


def stats(design: Design) -> DesignStats:
    sizes = Counter(len(b) for b in design.blocks)
    rep = [0] * design.v
    for b in design.blocks:
        for p in b:
            rep[p] += 1
    return DesignStats(
        n_blocks=len(design.blocks),
        block_sizes=dict(sorted(sizes.items())),
        replication=tuple(rep),
        sum_block_sizes=sum(len(b) for b in design.blocks),
    )


def _is_prime(q: int) -> bool:
    if q < 2:
        return False
    return all(q % d for d in range(2, math.isqrt(q) + 1))


def gen_sts_bose(v: int) -> Design:
    """Steiner triple system on v = 6m+3 points by the Bose construction.

    Point (x, i) of Z_{2m+1} x Z_3 is numbered x + i*(2m+1); the quasigroup is
    x o y = (x + y)/2 mod 2m+1.
    """
    if v < 3 or v % 6 != 3:
        raise DesignError("BAD_ORDER", f"Bose construction needs v = 3 mod 6, got {v}")
    m = v // 3
    half = (m + 1) // 2
    blocks = []
    for x in range(m):
        blocks.append((x, x + m, x + 2 * m))
    for x, y in combinations(range(m), 2):
        z = ((x + y) * half) % m
        for i in range(3):
            j = (i + 1) % 3
            blocks.append((x + i * m, y + i * m, z + j * m))
    return Design(v, tuple(blocks), PBD)


def _normalize_vec(vec: tuple[int, int, int], q: int) -> tuple[int, int, int]:
    lead = next(c for c in vec if c)
    inv = pow(lead, -1, q)
    return tuple((c * inv) % q for c in vec)


def gen_projective_plane(q: int) -> Design:
    """PG(2, q) for prime q: q^2+q+1 points and lines, lines of size q+1."""
    if not _is_prime(q):
        raise DesignError("NOT_PRIME", f"plane order must be prime, got {q}")
    pts = sorted({_normalize_vec(vec, q) for vec in np.ndindex(q, q, q) if any(vec)})
    index = {p: i for i, p in enumerate(pts)}
    blocks = []
    for line in pts:
        blocks.append(tuple(index[p] for p in pts if sum(a * b for a, b in zip(line, p)) % q == 0))
    return Design(len(pts), tuple(blocks), PBD)


def gen_affine_plane(q: int) -> Design:
    """AG(2, q) for prime q; point (x, y) is numbered x*q + y."""
    if not _is_prime(q):
        raise DesignError("NOT_PRIME", f"plane order must be prime, got {q}")
    blocks = []
    for slope in range(q):
        for icpt in range(q):
            blocks.append(tuple(x * q + (slope * x + icpt) % q for x in range(q)))
    for c in range(q):
        blocks.append(tuple(c * q + y for y in range(q)))
    return Design(q * q, tuple(blocks), PBD)


def _representable(total: int, parts: Sequence[int]) -> bool:
    """Whether total is a non-negative integer combination of parts."""
    reach = [False] * (total + 1)
    reach[0] = True
    for s in range(1, total + 1):
        reach[s] = any(p <= s and reach[s - p] for p in parts)
    return reach[total]


def pair_count_feasible(v: int, K: Iterable[int], covered: int = 0) -> bool:
    """Whether sum_i alpha_i * C(k_i, 2) = C(v, 2) - covered has a non-negative solution."""
    return _representable(math.comb(v, 2) - covered, [math.comb(k, 2) for k in K])


def _algorithm_x(cols: dict, rows: dict, partial: list):
    if not cols:
        return list(partial)
    # fewest candidates first, ties broken by the smallest pair
    col = min(cols, key=lambda c: (len(cols[c]), c))
    for r in sorted(cols[col]):
        partial.append(r)
        removed = _select(cols, rows, r)
        found = _algorithm_x(cols, rows, partial)
        if found is not None:
            return found
        _deselect(cols, rows, r, removed)
        partial.pop()
    return None


def _select(cols, rows, r):
    removed = []
    for j in rows[r]:
        for i in cols[j]:
            for k in rows[i]:
                if k != j:
                    cols[k].remove(i)
        removed.append(cols.pop(j))
    return removed


def _deselect(cols, rows, r, removed):
    for j in reversed(rows[r]):
        cols[j] = removed.pop()
        for i in cols[j]:
            for k in rows[i]:
                if k != j:
                    cols[k].add(i)


def gen_pbd_exact_cover(
    v: int, K: Iterable[int], force_blocks: Sequence[Sequence[int]] = ()
) -> Design | None:
    """Search for a PBD(v, K, 1) containing ``force_blocks`` by exact cover over point pairs.

    Returns None when the search space is exhausted or when a per-point
    replication count cannot be met. Raises ``DesignError`` for oversized v or
    when the global pair count already rules the design out.
    """
    K = sorted(set(K))
    if v > SEARCH_MAX_V:
        raise DesignError("GUARD", f"exact-cover search limited to v <= {SEARCH_MAX_V}")
    if not K or K[0] < 2 or K[-1] > v:
        raise DesignError("MALFORMED", f"block sizes {K} unusable for v={v}")
    forced = Design(v, tuple(tuple(b) for b in force_blocks), PACKING)
    if not validate(forced).ok:
        raise DesignError("MALFORMED", "forced blocks share a pair")
    covered = pair_coverage(forced)
    if not pair_count_feasible(v, K, len(covered)):
        raise DesignError("INFEASIBLE", f"no block counts over {K} cover C({v},2) pairs")

    rep_left = [v - 1] * v
    for b in forced.blocks:
        for p in b:
            rep_left[p] -= len(b) - 1
    if not all(_representable(r, [k - 1 for k in K]) for r in rep_left):
        return None

    cols = {p: set() for p in combinations(range(v), 2) if p not in covered}
    rows = {}
    for k in K:
        for blk in combinations(range(v), k):
            pairs = list(combinations(blk, 2))
            if any(p in covered for p in pairs):
                continue
            rows[blk] = pairs
            for p in pairs:
                cols[p].add(blk)
    chosen = _algorithm_x(cols, rows, [])
    if chosen is None:
        return None
    return Design(v, forced.blocks + tuple(chosen), PBD)


def greedy_packing(v: int, K: Iterable[int], seed: int) -> Design:
    """Min-conflict greedy packing.

    Repeatedly keeps the still-compatible candidate block that rules out the
    fewest other candidates; larger blocks are preferred, and remaining ties
    are broken by a seeded random priority. The result is maximal: no
    candidate block can be added without repeating a pair.
    """
    K = sorted(set(K))
    if not K or K[0] < 2 or K[-1] > v:
        raise DesignError("MALFORMED", f"block sizes {K} unusable for v={v}")
    rng = np.random.default_rng(seed)
    cands = [blk for k in K for blk in combinations(range(v), k)]
    prio = rng.permutation(len(cands))
    cand_pairs = [list(combinations(blk, 2)) for blk in cands]
    by_pair: dict[tuple[int, int], set[int]] = {}
    for i, pairs in enumerate(cand_pairs):
        for p in pairs:
            by_pair.setdefault(p, set()).add(i)

    alive = set(range(len(cands)))
    blocks: list[tuple[int, ...]] = []
    while alive:
        def cost(i):
            hit = sum(len(by_pair[p]) for p in cand_pairs[i])
            return (-len(cands[i]), hit, prio[i])

        best = min(alive, key=cost)
        blocks.append(cands[best])
        for p in cand_pairs[best]:
            for j in by_pair.pop(p):
                if j in alive:
                    alive.discard(j)
                    for q in cand_pairs[j]:
                        if q in by_pair and q != p:
                            by_pair[q].discard(j)
    return Design(v, tuple(blocks), PACKING)


def write_design(design: Design, path) -> None:
    lines = [f"v {design.v} {design.kind}"]
    lines += [" ".join(str(p) for p in b) for b in design.blocks]
    Path(path).write_text("\n".join(lines) + "\n")


def read_design(path) -> Design:
    header = None
    blocks = []
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if header is None:
            if not line:
                continue
            parts = line.split()
            if len(parts) != 3 or parts[0] != "v" or parts[2] not in (PBD, PACKING):
                raise DesignError("MALFORMED", f"line {lineno}: bad header {raw!r}")
            try:
                header = (int(parts[1]), parts[2])
            except ValueError:
                raise DesignError("MALFORMED", f"line {lineno}: bad header {raw!r}") from None
            continue
        if not line:
            continue
        try:
            blocks.append(tuple(int(tok) for tok in line.split()))
        except ValueError:
            raise DesignError("MALFORMED", f"line {lineno}: non-integer point") from None
    if header is None:
        raise DesignError("MALFORMED", "missing header line")
    for b in blocks:
        if len(b) < 2:
            raise DesignError("MALFORMED", f"block {b} has fewer than 2 points")
    return Design(header[0], tuple(blocks), header[1])
