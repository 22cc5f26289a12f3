"""Fredholm determinants and spectra of truncated Gauss operators."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg
from scipy.optimize import brentq

from .errors import DomainError, NoBracket, NonConvergence
from .operators import OperatorMatrix, q_matrix
from .specfun import as_complex

DEFAULT_ORDER = 24
CAUCHY_STEP = 6
SPECTRUM_STEP = 8


def _sign(sign) -> str:
    if sign in ("minus", "-", -1):
        return "minus"
    if sign in ("plus", "+", 1):
        return "plus"
    raise DomainError(f"sign must be minus or plus, got {sign!r}")


@dataclass(frozen=True)
class DetResult:
    value: complex
    order: int
    cauchy_error: float
    sign: str
    q: complex = 0j
    z: complex = 0j


@dataclass(frozen=True)
class SpectrumResult:
    eigenvalues: list
    order: int
    drift: list

    def __getitem__(self, i):
        return self.eigenvalues[i]

    def __len__(self):
        return len(self.eigenvalues)


def det_of(entries: np.ndarray, sign) -> complex:
    """det(I - A) or det(I + A) by pivoted LU elimination."""
    s = -1.0 if _sign(sign) == "minus" else 1.0
    n = entries.shape[0]
    lu, piv = scipy.linalg.lu_factor(np.eye(n) + s * entries, check_finite=True)
    swaps = np.count_nonzero(piv != np.arange(n))
    return complex((-1) ** swaps * np.prod(np.diag(lu)))


def det_one_minus(sign, q, z, order: int = DEFAULT_ORDER, *, continuation: bool = False,
                  step: int = CAUCHY_STEP) -> DetResult:
    """det(1 - Q_{q,z}) for sign 'minus', det(1 + Q_{q,z}) for 'plus', from an order-N truncation.

    The Cauchy error is the change against the leading (N - step) block.
    """
    label = _sign(sign)
    q = as_complex(q)
    z = as_complex(z)
    if order <= step:
        raise DomainError(f"order must exceed the Cauchy step {step}")
    if z == 0:
        return DetResult(1.0 + 0j, order, 0.0, label, q, z)
    a = q_matrix(q, z, order, continuation=continuation).entries
    value = det_of(a, label)
    coarse = det_of(a[: order - step, : order - step], label)
    if not np.isfinite(value):
        raise NonConvergence("determinant is not finite")
    return DetResult(value, order, abs(value - coarse), label, q, z)


def _eigs(entries: np.ndarray) -> np.ndarray:
    ev = scipy.linalg.eigvals(entries)
    return ev[np.argsort(-np.abs(ev), kind="stable")]


def _refined(matrix: OperatorMatrix, order: int) -> np.ndarray:
    if matrix.kind == "gauss_Q":
        return q_matrix(matrix.q, matrix.z, order, continuation=True).entries
    raise NotImplementedError


def spectrum(matrix: OperatorMatrix, count: int | None = None, tol: float = 1e-8, check: bool = True) -> SpectrumResult:
    """Largest-modulus eigenvalues of a truncation, sorted by decreasing modulus.

    With ``check`` each reported eigenvalue is compared against the spectrum of a
    second truncation (order + 8 for the Gauss operator, order - 8 otherwise);
    a drift above ``tol`` relative to max(1, |lambda|) raises NonConvergence.
    """
    n = matrix.order
    count = n if count is None else count
    if count > n:
        raise DomainError("count exceeds the matrix order")
    ev = _eigs(matrix.entries)
    ev = ev[np.abs(ev) >= 1e-14][:count]
    drift = [0.0] * len(ev)
    if check and len(ev):
        if matrix.kind == "gauss_Q":
            other = _eigs(_refined(matrix, n + SPECTRUM_STEP))
        elif n > SPECTRUM_STEP:
            other = _eigs(matrix.entries[: n - SPECTRUM_STEP, : n - SPECTRUM_STEP])
        else:
            other = ev
        drift = [float(np.min(np.abs(other - lam))) for lam in ev]
        bad = [lam for lam, d in zip(ev, drift) if d > tol * max(1.0, abs(lam))]
        if bad:
            raise NonConvergence(f"{len(bad)} eigenvalue(s) not stable under refinement, e.g. {bad[0]:.6g}")
    return SpectrumResult([complex(v) for v in ev], n, drift)


def leading_eigenvalue(q, z, order: int = DEFAULT_ORDER) -> complex:
    """Largest-modulus eigenvalue of the order-N truncation of Q_{q,z}."""
    a = q_matrix(q, z, order, continuation=True).entries
    return complex(_eigs(a)[0])


def leading_eigenvalue_unit_crossing(q: float, bracket: tuple[float, float], tol: float = 1e-10,
                                     order: int = DEFAULT_ORDER) -> float:
    """Real z in the bracket at which the leading eigenvalue of Q_{q,z} equals 1.

    For real q and 0 < z <= 1 the leading eigenvalue is real and increasing in z,
    so a sign change of lambda(z) - 1 brackets the crossing.
    """
    q = float(q)
    lo, hi = map(float, bracket)
    if not 0 < lo < hi <= 1:
        raise DomainError("bracket must satisfy 0 < z_lo < z_hi <= 1")

    def f(z):
        return leading_eigenvalue(q, z, order).real - 1.0

    f_hi = f(hi)
    if abs(f_hi) <= tol:
        return hi
    f_lo = f(lo)
    if abs(f_lo) <= tol:
        return lo
    if np.sign(f_lo) == np.sign(f_hi):
        raise NoBracket(f"leading eigenvalue does not cross 1 on [{lo}, {hi}]")
    return float(brentq(f, lo, hi, xtol=tol, rtol=4 * np.finfo(float).eps))


def det_zero_in_z(q: float, bracket: tuple[float, float], order: int = DEFAULT_ORDER, tol: float = 1e-12) -> float:
    """Real zero in z of det(1 - Q_{q,z}) for real q, by a bracketing root solve."""
    lo, hi = map(float, bracket)

    def f(z):
        return det_one_minus("minus", q, z, order, continuation=True).value.real

    f_lo, f_hi = f(lo), f(hi)
    if f_hi == 0:
        return hi
    if np.sign(f_lo) == np.sign(f_hi):
        raise NoBracket(f"det(1 - Q) does not change sign on [{lo}, {hi}]")
    return float(brentq(f, lo, hi, xtol=tol, rtol=4 * np.finfo(float).eps))
