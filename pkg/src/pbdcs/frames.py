"""Frames built from designs by substituting Hadamard rows into the incidence matrix.

Rows follow the design's block order. Columns are grouped by point (ascending),
then by basis index, then by Hadamard column index.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .designs import PBD, Design, stats, validate
from .unitary import dft_matrix, is_power_of_two, mub_family, sylvester

CON0 = "CON0"
CON1 = "CON1"
MUB_EXT = "MUB_EXT"
CUSTOM = "CUSTOM"
TAGS = (CON0, CON1, MUB_EXT, CUSTOM)

HADAMARD_POLICIES = ("dft", "sylvester", "auto")


class FrameError(ValueError):
    def __init__(self, code: str, message: str):
        super().__init__(f"{code}: {message}")
        self.code = code


@dataclass(frozen=True, eq=False)
class FrameMatrix:
    matrix: np.ndarray
    labels: tuple[tuple[int, int, int], ...]
    tag: str = CUSTOM

    def __post_init__(self):
        m = np.array(self.matrix, dtype=complex)
        if m.ndim != 2:
            raise FrameError("MALFORMED", "frame matrix must be 2-D")
        if len(self.labels) != m.shape[1]:
            raise FrameError("MALFORMED", "one label per column required")
        if self.tag not in TAGS:
            raise FrameError("MALFORMED", f"unknown construction tag {self.tag!r}")
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)
        object.__setattr__(self, "labels", tuple(tuple(int(x) for x in lab) for lab in self.labels))

    @property
    def n(self) -> int:
        return self.matrix.shape[0]

    @property
    def N(self) -> int:
        return self.matrix.shape[1]

    @property
    def is_real(self) -> bool:
        return not np.any(self.matrix.imag)

    @classmethod
    def from_array(cls, a) -> "FrameMatrix":
        a = np.asarray(a)
        return cls(a, tuple((j, 0, 0) for j in range(a.shape[1])), CUSTOM)

    def __eq__(self, other):
        if not isinstance(other, FrameMatrix):
            return NotImplemented
        return (
            self.tag == other.tag
            and self.labels == other.labels
            and self.matrix.shape == other.matrix.shape
            and bool(np.array_equal(self.matrix, other.matrix))
        )

    __hash__ = None


def hadamard_for(order: int, policy: str) -> np.ndarray:
    """Unimodular Hadamard matrix of the given order whose row 0 is all ones."""
    if policy not in HADAMARD_POLICIES:
        raise FrameError("BAD_POLICY", f"unknown Hadamard policy {policy!r}")
    if policy == "sylvester" or (policy == "auto" and is_power_of_two(order)):
        if not is_power_of_two(order):
            raise FrameError("NO_HADAMARD", f"no Sylvester matrix of order {order}")
        return sylvester(order).astype(complex)
    return dft_matrix(order)


def _require_valid(design: Design) -> list[list[int]]:
    if not validate(design).ok:
        raise FrameError("INVALID_DESIGN", "design fails its pair-coverage condition")
    blocks_of = design.point_blocks()
    if any(not bl for bl in blocks_of):
        raise FrameError("ZERO_REPLICATION", "every point must lie in at least one block")
    return blocks_of


def _substitute(design: Design, blocks_of, pick, tag: str) -> FrameMatrix:
    """Place pick(x) -> list of (basis, H, first_row) scaled copies for each point x."""
    cols = []
    labels = []
    n = design.n_blocks
    for x, rows in enumerate(blocks_of):
        for basis, h, first in pick(x):
            r = len(rows)
            sub = np.zeros((n, h.shape[1]), dtype=complex)
            sub[rows, :] = h[first:first + r, :]
            cols.append(sub)
            labels.extend((x, basis, c) for c in range(h.shape[1]))
    return FrameMatrix(np.hstack(cols), tuple(labels), tag)


def build_con0(design: Design, policy: str = "dft") -> FrameMatrix:
    """Each incidence 1 in point column x becomes a distinct row of H_x / sqrt(r_x)."""
    blocks_of = _require_valid(design)

    def pick(x):
        r = len(blocks_of[x])
        return [(0, hadamard_for(r, policy) / np.sqrt(r), 0)]

    return _substitute(design, blocks_of, pick, CON0)


def build_con1(design: Design, policy: str = "dft") -> FrameMatrix:
    """Like ``build_con0`` but with H_x of order r_x + 1, skipping its constant row 0."""
    if design.kind != PBD:
        raise FrameError("INVALID_DESIGN", "construction CON1 needs a PBD")
    blocks_of = _require_valid(design)

    def pick(x):
        r = len(blocks_of[x]) + 1
        h = hadamard_for(r, policy)
        if not np.allclose(h[0], h[0, 0]):
            raise FrameError("NO_HADAMARD", f"order-{r} matrix lacks a constant first row")
        return [(0, h / np.sqrt(r), 1)]

    return _substitute(design, blocks_of, pick, CON1)


def build_mub_extended(design: Design, e: int) -> FrameMatrix:
    """Concatenate e CON0 frames, the i-th using the i-th non-identity MUB for every point.

    Requires a constant prime replication number r. Basis index i runs 1..e.
    """
    if design.kind != PBD:
        raise FrameError("INVALID_DESIGN", "MUB extension needs a PBD")
    blocks_of = _require_valid(design)
    reps = {len(bl) for bl in blocks_of}
    if len(reps) != 1:
        raise FrameError("NONCONSTANT_REPLICATION", f"replication numbers {sorted(reps)}")
    r = reps.pop()
    try:
        bases = mub_family(r)
    except ValueError:
        raise FrameError("NONPRIME_REPLICATION", f"replication number {r} is not prime") from None
    if not 1 <= e <= len(bases) - 1:
        raise FrameError("BAD_E", f"e must lie in 1..{len(bases) - 1}, got {e}")

    # sqrt(r) * M_i is unimodular; the 1/sqrt(r) of CON0 scaling gives back M_i
    def pick(x):
        return [(i, bases[i], 0) for i in range(1, e + 1)]

    return _substitute(design, blocks_of, pick, MUB_EXT)


def normalize_rows(frame: FrameMatrix, c: float = 1.0) -> FrameMatrix:
    if c <= 0:
        raise FrameError("BAD_SCALE", f"row length must be positive, got {c}")
    norms = np.linalg.norm(frame.matrix, axis=1)
    if np.any(norms == 0):
        raise FrameError("ZERO_ROW", "cannot normalize a zero row")
    return FrameMatrix(frame.matrix * (c / norms)[:, None], frame.labels, frame.tag)


def expected_columns(design: Design, tag: str, e: int = 1) -> int:
    reps = stats(design).replication
    if tag == CON0:
        return sum(reps)
    if tag == CON1:
        return sum(r + 1 for r in reps)
    if tag == MUB_EXT:
        return e * sum(reps)
    raise FrameError("BAD_TAG", f"no column count rule for {tag!r}")


def frame_to_json(frame: FrameMatrix) -> dict:
    flat = frame.matrix.ravel()
    return {
        "n": frame.n,
        "N": frame.N,
        "tag": frame.tag,
        "labels": [list(lab) for lab in frame.labels],
        "re": [float(x) for x in flat.real],
        "im": [float(x) for x in flat.imag],
    }


def frame_from_json(obj: dict) -> FrameMatrix:
    try:
        n, N = int(obj["n"]), int(obj["N"])
        re = np.array(obj["re"], dtype=float)
        im = np.array(obj["im"], dtype=float)
        labels = tuple(tuple(lab) for lab in obj["labels"])
        tag = obj["tag"]
    except (KeyError, TypeError, ValueError) as exc:
        raise FrameError("MALFORMED", f"bad frame file: {exc}") from None
    if re.shape != (n * N,) or im.shape != (n * N,):
        raise FrameError("MALFORMED", "entry arrays must have length n*N")
    return FrameMatrix((re + 1j * im).reshape(n, N), labels, tag)


def write_frame(frame: FrameMatrix, path) -> None:
    # float repr is the shortest round-trip form, which json uses
    Path(path).write_text(json.dumps(frame_to_json(frame)))


def read_frame(path) -> FrameMatrix:
    try:
        obj = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise FrameError("MALFORMED", f"not JSON: {exc}") from None
    return frame_from_json(obj)
