"""Farey, Gauss and Fibonacci interval maps and their periodic orbits.

Inverse branches are Moebius transformations with integer matrices, so
orbits are carried as words and matrices; floating fixed points are only
recovered at the end from the fixed-point quadratic.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from .errors import DomainError, NonConvergence, ResourceError
from .specfun import as_complex, hurwitz_zeta

ALPHA = (math.sqrt(5.0) - 1.0) / 2.0

# generator matrices as (a, b, c, d) for the matrix [[a, b], [c, d]]
L = (1, 0, 1, 1)
R = (1, 1, 0, 1)
PHI0 = L
PHI1 = (0, 1, 1, 1)
K = (0, 1, 1, 0)
GENERATORS = {"L": L, "R": R, "phi0": PHI0, "phi1": PHI1}

ORBIT_CAP = 2_000_000


def matmul(m1, m2):
    a, b, c, d = m1
    e, f, g, h = m2
    return (a * e + b * g, a * f + b * h, c * e + d * g, c * f + d * h)


def matprod(mats: Iterable[tuple]) -> tuple:
    out = (1, 0, 0, 1)
    for m in mats:
        out = matmul(out, m)
    return out


def gauss_branch(a: int) -> tuple:
    """Matrix of x -> 1/(a + x)."""
    return (0, 1, 1, a)


def fibonacci_numbers(n: int) -> list[int]:
    """S_0..S_n with S_0 = 0, S_1 = 1."""
    s = [0, 1]
    while len(s) <= n:
        s.append(s[-1] + s[-2])
    return s[: n + 1]


@dataclass(frozen=True)
class MobiusWord:
    entries: tuple
    letters: tuple = ()

    @classmethod
    def from_letters(cls, letters: Sequence[str]) -> "MobiusWord":
        letters = tuple(letters)
        try:
            mats = [GENERATORS[x] for x in letters]
        except KeyError as exc:
            raise DomainError(f"unknown generator {exc.args[0]!r}") from None
        return cls(matprod(mats), letters)

    @property
    def det(self) -> int:
        a, b, c, d = self.entries
        return a * d - b * c

    @property
    def trace(self) -> int:
        return self.entries[0] + self.entries[3]

    def __call__(self, x):
        a, b, c, d = self.entries
        return (a * x + b) / (c * x + d)


@dataclass(frozen=True)
class CFWord:
    digits: tuple

    def __post_init__(self):
        if not self.digits or any(int(a) != a or a < 1 for a in self.digits):
            raise DomainError(f"continued-fraction digits must be positive integers: {self.digits}")

    @property
    def period_f(self) -> int:
        return sum(self.digits)

    @property
    def period_g(self) -> int:
        return len(self.digits)

    @property
    def period_h(self) -> int:
        return self.period_f - sum(1 for a in self.digits if a == 1)

    def matrix(self) -> tuple:
        return matprod(gauss_branch(a) for a in self.digits)


def multiplier_from_trace(trace: int, det: int) -> float:
    """Squared expansion rate of a hyperbolic integer Moebius word."""
    t = abs(trace)
    disc = t * t - 4 * det
    if disc <= 0:
        raise DomainError(f"word with trace {trace} and det {det} is not hyperbolic")
    lam = (t + math.sqrt(disc)) / 2.0
    return lam * lam


def attracting_fixed_point(m: tuple) -> float:
    """Fixed point in [0, 1] of x -> (ax+b)/(cx+d) for a branch word."""
    a, b, c, d = m
    if c == 0:
        # x -> (ax + b)/d with a, d = 1: parabolic at 0 only when b = 0
        return 0.0
    disc = (a - d) ** 2 + 4 * b * c
    return ((a - d) + math.sqrt(disc)) / (2 * c)


@dataclass(frozen=True)
class OrbitRecord:
    word: CFWord
    trace: int
    det: int
    multiplier: float
    point: float

    def weight(self, q) -> complex:
        return complex(self.multiplier ** (-as_complex(q)))


def orbit_record(digits: Sequence[int]) -> OrbitRecord:
    word = CFWord(tuple(digits))
    m = word.matrix()
    tr = m[0] + m[3]
    det = m[0] * m[3] - m[1] * m[2]
    return OrbitRecord(word, tr, det, multiplier_from_trace(tr, det), attracting_fixed_point(m))


# ---------------------------------------------------------------------------
# the maps


def _check_unit(x):
    if not 0 <= x <= 1:
        raise DomainError(f"{x} is outside [0, 1]")


def farey_apply(x):
    """Farey map; exact on Fraction input."""
    _check_unit(x)
    if 2 * x <= 1:
        return x / (1 - x)
    return (1 - x) / x


def gauss_apply(x):
    """Gauss map {1/x}, with 0 sent to 0."""
    _check_unit(x)
    if x == 0:
        return x
    y = 1 / x
    return y - math.floor(y)


def _fib_branch(x, max_index: int = 90):
    """Locate the Fibonacci-map branch of x: returns (kind, n)."""
    s = fibonacci_numbers(2 * max_index + 6)
    if 2 * x < 1:
        return 1, 0
    if x * 3 > 2:
        return 2, 0
    for n in range(1, max_index):
        lo1, hi1 = Fraction(s[2 * n], s[2 * n + 1]), Fraction(s[2 * n + 2], s[2 * n + 3])
        if lo1 <= x < hi1:
            return 1, n
        lo2, hi2 = Fraction(s[2 * n + 3], s[2 * n + 4]), Fraction(s[2 * n + 1], s[2 * n + 2])
        if lo2 < x <= hi2:
            return 2, n
    raise DomainError(f"{x} is too close to the golden-mean fixed point")


def _check_fib_endpoint(x, max_index: int = 90):
    """Interior branch endpoints S_k/S_{k+1}, k >= 2, where the closed form and
    first-passage iteration disagree (e.g. 1/2 goes to 0 by one, 1 by the other)."""
    s = fibonacci_numbers(max_index + 2)
    for k in range(2, max_index + 1):
        b = Fraction(s[k], s[k + 1])
        hit = x == b if isinstance(x, Fraction) else abs(x - float(b)) <= 4e-16
        if hit:
            raise DomainError(f"{x} is the Fibonacci-map branch endpoint {b}")
        if not isinstance(x, Fraction) and abs(float(b) - ALPHA) < 1e-15:
            break


def fibonacci_apply(x):
    """Fibonacci map: F applied once, then until the orbit enters [0, 1/2].

    Closed form per branch; the branch intervals accumulate at the
    golden-mean point where the map is undefined.
    """
    _check_unit(x)
    if isinstance(x, float) and abs(x - ALPHA) < 1e-15:
        raise DomainError("the Fibonacci map is undefined at the golden mean")
    _check_fib_endpoint(x)
    kind, n = _fib_branch(x)
    s = fibonacci_numbers(2 * n + 4)
    if kind == 1:
        return (s[2 * n + 1] * x - s[2 * n]) / (s[2 * n + 1] - s[2 * n + 2] * x)
    return (s[2 * n + 1] - s[2 * n + 2] * x) / (s[2 * n + 3] * x - s[2 * n + 2])


def fibonacci_by_iteration(x, max_steps: int = 200):
    """Reference Fibonacci map by direct Farey iteration; returns (value, steps)."""
    y = farey_apply(x)
    steps = 1
    if 2 * x <= 1:
        return y, steps
    # x was in the right half; keep iterating until the orbit lands in [0, 1/2]
    while 2 * y > 1:
        y = farey_apply(y)
        steps += 1
        if steps > max_steps:
            raise NonConvergence("orbit did not reach [0, 1/2]")
    return farey_apply(y), steps + 1


def cf_encode(p: int, q: int) -> CFWord:
    """Continued-fraction digits of p/q in (0, 1), last digit > 1."""
    if not (0 < p < q) or math.gcd(p, q) != 1:
        raise DomainError(f"need 0 < p < q coprime, got {p}/{q}")
    digits = []
    while p:
        a, r = divmod(q, p)
        digits.append(a)
        q, p = p, r
    return CFWord(tuple(digits))


def cf_decode(word: CFWord) -> Fraction:
    x = Fraction(0)
    for a in reversed(word.digits):
        x = 1 / (a + x)
    return x


# ---------------------------------------------------------------------------
# periodic orbits and partition functions


def _compositions(total_max: int, parts: int, min_part: int = 1):
    """All tuples of ``parts`` integers >= min_part with sum <= total_max."""
    if parts == 0:
        yield ()
        return
    for a in range(min_part, total_max - (parts - 1) * min_part + 1):
        for rest in _compositions(total_max - a, parts - 1, min_part):
            yield (a,) + rest


def _compositions_exact(total: int, parts: int):
    """All tuples of ``parts`` positive integers summing exactly to ``total``."""
    if parts == 1:
        if total >= 1:
            yield (total,)
        return
    for a in range(1, total - parts + 2):
        for rest in _compositions_exact(total - a, parts - 1):
            yield (a,) + rest


def enumerate_gauss_orbits(period: int, sigma_bound: int, cap: int = ORBIT_CAP) -> list[OrbitRecord]:
    """Every periodic digit word of the given Gauss period with digit sum <= sigma_bound.

    Rotations are listed separately; dividing by the period is left to the caller.
    """
    if period < 1 or sigma_bound < period:
        raise DomainError("need period >= 1 and sigma_bound >= period")
    count = math.comb(sigma_bound, period)  # number of compositions with sum <= bound
    if count > cap:
        raise ResourceError(f"{count} words exceed the cap {cap}")
    out = [orbit_record(d) for d in _compositions(sigma_bound, period)]
    out.sort(key=lambda r: r.word.digits)
    return out


def farey_words(n: int) -> np.ndarray:
    """Matrices of all 2^n words of length n in (phi0, phi1), shape (2^n, 4)."""
    if n > 24:
        raise ResourceError("Farey word enumeration capped at length 24")
    mats = np.array([(1, 0, 0, 1)], dtype=object if n > 60 else np.int64)
    gens = np.array([PHI0, PHI1], dtype=mats.dtype)
    for _ in range(n):
        a, b, c, d = mats.T
        new = []
        for e, f, g, h in gens:
            new.append(np.stack([a * e + b * g, a * f + b * h, c * e + d * g, c * f + d * h], axis=1))
        mats = np.concatenate(new)
    return mats


def _weights_from_matrices(mats: np.ndarray, q: complex) -> np.ndarray:
    a, b, c, d = (mats[:, i].astype(float) for i in range(4))
    det = mats[:, 0] * mats[:, 3] - mats[:, 1] * mats[:, 2]
    tr = np.abs(a + d)
    parabolic = (det == 1) & (tr == 2)
    disc = tr * tr - 4.0 * det
    lam = (tr + np.sqrt(np.where(parabolic, 0.0, disc))) / 2.0
    with np.errstate(divide="ignore"):
        w = np.exp(-2.0 * q * np.log(lam))
    return np.where(parabolic, 1.0, w)


def farey_partition(n: int, q) -> complex:
    """Exact finite sum over the 2^n fixed points of F^n."""
    q = as_complex(q)
    if n < 1:
        raise DomainError("n must be >= 1")
    if q == 0:
        return complex(2**n)
    return complex(_weights_from_matrices(farey_words(n), q).sum())


def gauss_partition(n: int, q, a_max: int | None = None) -> tuple[complex, float]:
    """Sum over fixed points of G^n with digits <= a_max, plus a tail bound.

    The bound uses |(G^n)'| > prod a_i^2 and the integral test.
    """
    q = as_complex(q)
    sigma = q.real
    if n < 1:
        raise DomainError("n must be >= 1")
    if sigma <= 0.5:
        raise NonConvergence("the Gauss partition sum diverges for Re(q) <= 1/2")
    if a_max is None:
        a_max = {1: 10_000, 2: 100}.get(n, max(2, int(round(10 ** (4.0 / n)))))
    if a_max**n > 5_000_000:
        raise ResourceError("Gauss partition truncation too large")
    digits = np.arange(1, a_max + 1, dtype=np.int64)
    mats = np.stack([np.zeros_like(digits), np.ones_like(digits), np.ones_like(digits), digits], axis=1)
    acc = mats
    for _ in range(n - 1):
        a, b, c, d = acc.T
        e, f, g, h = mats.T
        acc = np.stack(
            [
                np.outer(a, e) + np.outer(b, g),
                np.outer(a, f) + np.outer(b, h),
                np.outer(c, e) + np.outer(d, g),
                np.outer(c, f) + np.outer(d, h),
            ],
            axis=-1,
        ).reshape(-1, 4)
    value = complex(_weights_from_matrices(acc, q).sum())
    one_digit_tail = a_max ** (1 - 2 * sigma) / (2 * sigma - 1)
    zeta_sigma = hurwitz_zeta(2 * sigma, 1).real
    tail = n * one_digit_tail * zeta_sigma ** (n - 1)
    return value, tail


def fibonacci_branch(k: int) -> tuple:
    """Matrix of the k-th inverse branch of the Fibonacci map."""
    s = fibonacci_numbers(k + 1)
    return (s[k], s[k - 1], s[k + 1], s[k])


def _word_weight(m: tuple, q: complex) -> complex:
    det = m[0] * m[3] - m[1] * m[2]
    tr = abs(m[0] + m[3])
    if det == 1 and tr == 2:
        return 1.0 + 0j
    return complex(multiplier_from_trace(tr, det) ** (-q))


def fibonacci_partition(m: int, q, k_max: int = 40) -> tuple[complex, float]:
    """Sum over fixed points of H^m with branch indices <= k_max, plus a tail estimate."""
    q = as_complex(q)
    if (k_max + 1) ** m > 5_000_000:
        raise ResourceError("Fibonacci partition truncation too large")
    total = 0j
    for ks in itertools.product(range(1, k_max + 1), repeat=m):
        total += _word_weight(matprod(fibonacci_branch(k) for k in ks), q)
    # each branch index beyond k_max costs at least S_{k}^{-2 Re q}
    s = fibonacci_numbers(k_max + 2)
    tail = m * s[k_max + 1] ** (-2 * q.real) / (1 - ALPHA ** (2 * q.real)) * (k_max + 1) ** (m - 1)
    return total, tail


def restricted_gauss_partition(m: int, n: int, q) -> complex:
    """Fixed points of G^m whose digits sum to n (one term per digit word)."""
    q = as_complex(q)
    return sum((_word_weight(matprod(gauss_branch(a) for a in d), q) for d in _compositions_exact(n, m)), 0j)


def restricted_fibonacci_partition(m: int, n: int, q) -> complex:
    """Fixed points of H^m whose branch indices sum to n."""
    q = as_complex(q)
    return sum(
        (_word_weight(matprod(fibonacci_branch(k) for k in ks), q) for ks in _compositions_exact(n, m)),
        0j,
    )


def farey_from_gauss(n: int, q) -> complex:
    """1 + sum_m (n/m) Z_m(q, G) with the G-sum restricted to digit sum n."""
    return 1 + sum(n / m * restricted_gauss_partition(m, n, q) for m in range(1, n + 1))


def farey_from_fibonacci(n: int, q) -> complex:
    """alpha^{2qn} + sum_m (n/m) Z_m(q, H) with the H-sum restricted to index sum n."""
    q = as_complex(q)
    return ALPHA ** (2 * q * n) + sum(n / m * restricted_fibonacci_partition(m, n, q) for m in range(1, n + 1))


@dataclass(frozen=True)
class PeriodDictionaryRow:
    n: int
    direct: complex
    via_gauss: complex
    via_fibonacci: complex

    @property
    def gauss_discrepancy(self) -> float:
        return abs(self.direct - self.via_gauss)

    @property
    def fibonacci_discrepancy(self) -> float:
        return abs(self.direct - self.via_fibonacci)


def period_dictionary_report(q, n_max: int = 8) -> list[PeriodDictionaryRow]:
    """Compare Z_n(q, F) by direct enumeration with the induced-map sums."""
    return [
        PeriodDictionaryRow(n, farey_partition(n, q), farey_from_gauss(n, q), farey_from_fibonacci(n, q))
        for n in range(1, n_max + 1)
    ]


def partition_function(map_kind: str, n: int, q, cutoff: int | None = None) -> complex:
    """Partition function Z_n(q, T) for T in {farey, gauss, fibonacci}.

    Truncated sums raise NonConvergence when their tail bound exceeds 1e-6.
    """
    if map_kind == "farey":
        return farey_partition(n, q)
    if map_kind == "gauss":
        value, tail = gauss_partition(n, q, cutoff)
    elif map_kind == "fibonacci":
        value, tail = fibonacci_partition(n, q, cutoff or 40)
    else:
        raise DomainError(f"unknown map {map_kind!r}")
    if tail > 1e-6:
        raise NonConvergence(f"{map_kind} partition tail bound {tail:.2e} too large")
    return value


# ---------------------------------------------------------------------------
# pressure


@dataclass(frozen=True)
class PressureResult:
    q: float
    lambda_q: float
    z_star: float
    diagnostics: dict = field(default_factory=dict)


def pressure(q: float, tol: float = 1e-10, order: int = 24) -> PressureResult:
    """Exponential growth rate of the Farey partition functions.

    Found as 1/z* where z* is the smallest z in (0, 1] at which the
    leading eigenvalue of the Gauss operator with branch weights z^n
    reaches 1.
    """
    from .fredholm import leading_eigenvalue, leading_eigenvalue_unit_crossing

    q = float(q)
    if q <= 0:
        raise DomainError("pressure needs q > 0")
    if q >= 1:
        top = leading_eigenvalue(q, 1.0, order).real
        if top <= 1 + max(tol, 1e-9):
            return PressureResult(q, 1.0, 1.0, {"leading_at_z1": top, "order": order})
    hi = None
    for cand in (0.9, 0.95, 0.98, 0.99, 0.995, 0.999):
        if leading_eigenvalue(q, cand, order).real > 1:
            hi = cand
            break
    if hi is None:
        if q > 0.5 and leading_eigenvalue(q, 1.0, order).real > 1:
            hi = 1.0
        else:
            raise NonConvergence(f"no unit crossing found below z = 1 for q = {q}")
    z_star = leading_eigenvalue_unit_crossing(q, (1e-3, hi), tol, order)
    return PressureResult(q, 1.0 / z_star, z_star, {"bracket_hi": hi, "order": order})
