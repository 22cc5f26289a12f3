"""Exact Farey (Stern-Brocot) tree with L/R coding and the trace map.

Rows are grown by mediant insertion; each node's word matrix is grown
independently by descent (left child appends L, right child appends R),
and the two constructions are cross-checked as they are built.
"""

from __future__ import annotations

import csv
import io
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .errors import ResourceError
from .maps import CFWord, L, R, cf_encode, matmul
from .specfun import as_complex

ROW_CAP = 40
NODE_CAP = 2**22


@dataclass(frozen=True)
class FareyNode:
    a: int
    b: int
    word: str
    matrix: tuple

    @property
    def value(self) -> Fraction:
        return Fraction(self.a, self.b)

    @property
    def rank(self) -> int:
        return len(self.word)

    @property
    def cf(self) -> CFWord:
        return cf_encode(self.a, self.b)

    @property
    def trace_T(self) -> int:
        return self.matrix[0] + self.matrix[3]

    @property
    def parents(self) -> tuple[Fraction, Fraction]:
        """Smaller and larger parent: the second and first columns of the word matrix."""
        m = self.matrix
        return Fraction(m[1], m[3]), Fraction(m[0], m[2])


def _check_cap(n: int, cap: int):
    if n < 1:
        raise ValueError("row index must be >= 1")
    if n > cap or 2 ** (n - 1) > NODE_CAP:
        raise ResourceError(f"row {n} exceeds the configured cap")


def iter_rows(n_max: int, cap: int = ROW_CAP):
    """Yield rows 1..n_max, each sorted by value."""
    _check_cap(n_max, cap)
    # sorted list of every fraction built so far, with its word matrix
    frontier = [(Fraction(0, 1), None), (Fraction(1, 1), None)]
    words = {Fraction(1, 2): ("L", L)}
    for n in range(1, n_max + 1):
        merged = []
        row = []
        for (x, _), (y, _) in zip(frontier, frontier[1:]):
            merged.append((x, None))
            med = Fraction(x.numerator + y.numerator, x.denominator + y.denominator)
            word, mat = words.pop(med)
            # the mediant of the neighbours must be the fraction the word encodes
            if (mat[0] + mat[1], mat[2] + mat[3]) != (med.numerator, med.denominator):
                raise AssertionError(f"mediant/word mismatch at {med}")
            node = FareyNode(med.numerator, med.denominator, word, mat)
            row.append(node)
            merged.append((med, None))
            left, right = matmul(mat, L), matmul(mat, R)
            words[Fraction(left[0] + left[1], left[2] + left[3])] = (word + "L", left)
            words[Fraction(right[0] + right[1], right[2] + right[3])] = (word + "R", right)
        merged.append(frontier[-1])
        frontier = merged
        yield row


def build_row(n: int, cap: int = ROW_CAP) -> list[FareyNode]:
    """All 2^(n-1) nodes of rank n, sorted by value."""
    row = None
    for row in iter_rows(n, cap):
        pass
    return row


def trace_map(node: FareyNode) -> int:
    return node.trace_T


def row_traces(n: int) -> np.ndarray:
    """Traces of all rank-n word matrices, by integer descent (fast path)."""
    _check_cap(n, ROW_CAP)
    dtype = np.int64 if n <= 80 else object
    mats = np.array([L], dtype=dtype)
    for _ in range(n - 1):
        a, b, c, d = mats.T
        left = np.stack([a + b, b, c + d, d], axis=1)
        right = np.stack([a, a + b, c, c + d], axis=1)
        mats = np.concatenate([left, right])
    return mats[:, 0] + mats[:, 3]


def _trace_counts(n: int) -> tuple[np.ndarray, np.ndarray]:
    t, c = np.unique(row_traces(n), return_counts=True)
    return t.astype(float), c.astype(float)


def lambda_n(n: int, q) -> complex:
    """Rank-n coefficient of the Selberg series; the single T = 2 node is skipped."""
    q = as_complex(q)
    t, c = _trace_counts(n)
    if c[t == 2].sum() != 1:
        raise AssertionError("expected exactly one parabolic node per row")
    keep = t > 2
    t, c = t[keep], c[keep]
    root = np.sqrt(t * t - 4)
    terms = 2.0 / root * np.exp((2 * q - 1) * np.log(2.0 / (t + root)))
    return complex((c * terms).sum())


def xi_n(n: int, q) -> complex:
    """Rank-n coefficient of the Ruelle series over every node of the row."""
    q = as_complex(q)
    t, c = _trace_counts(n)
    minus = np.sqrt(np.maximum(t * t - 4, 0.0))
    plus = np.sqrt(t * t + 4)
    terms = np.exp(2 * q * np.log(2.0 / (t + minus))) + np.exp(2 * q * np.log(2.0 / (t + plus)))
    return complex((c * terms).sum())


@dataclass
class TraceHistogram:
    """Counts gamma(k, n) of rank-n L-words (excluding L^n) with trace k."""

    counts: Counter = field(default_factory=Counter)
    k_max: int = 0
    n_max: int = 0

    def gamma(self, k: int, n: int) -> int:
        return self.counts.get((k, n), 0)

    def psi_l(self, k: int) -> int:
        """Hyperbolic L-starting words with trace <= k."""
        return sum(v for (t, _), v in self.counts.items() if t <= k)

    def psi(self, k: int) -> int:
        """Hyperbolic words over {L, R} with trace <= k (mirror symmetry doubles)."""
        return 2 * self.psi_l(k)


def count_traces(k_max: int, n_max: int, cap: int = 5_000_000) -> TraceHistogram:
    """Exact histogram by depth-first descent, pruning once the trace exceeds k_max.

    Appending a letter never lowers the trace, so pruning is exact.
    """
    hist = TraceHistogram(Counter(), k_max, n_max)
    stack = [(L, 1)]
    visited = 0
    while stack:
        m, n = stack.pop()
        visited += 1
        if visited > cap:
            raise ResourceError("trace histogram exceeded the node cap")
        t = m[0] + m[3]
        if t > k_max:
            continue
        if t > 2:
            hist.counts[(t, n)] += 1
        if n < n_max:
            stack.append((matmul(m, L), n + 1))
            stack.append((matmul(m, R), n + 1))
    return hist


def rows_csv(n_max: int) -> str:
    """CSV text with columns n,a,b,word,T for rows 1..n_max."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["n", "a", "b", "word", "T"])
    for n, row in enumerate(iter_rows(n_max), start=1):
        for node in row:
            w.writerow([n, node.a, node.b, node.word, node.trace_T])
    return buf.getvalue()


def mirror_word(word: str) -> str:
    return word.translate(str.maketrans("LR", "RL"))


def word_trace(word: str) -> int:
    m = (1, 0, 0, 1)
    for ch in word:
        m = matmul(m, L if ch == "L" else R)
    return m[0] + m[3]


def growth_ratio(hist: TraceHistogram, k: int) -> float:
    return hist.psi(2 * k) / hist.psi(k)
