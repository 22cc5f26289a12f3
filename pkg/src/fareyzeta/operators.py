"""Transfer operators of the Farey and Gauss maps.

Matrix truncations act on Taylor coefficients.  The Gauss operator uses
the basis (x - 1)^n, the composition operator P1 the basis (x - alpha)^n.
``OperatorMatrix.entries[m, n]`` is the m-th coefficient of the image of
the n-th basis function.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy.special import comb

from . import _quad
from .errors import DomainError, NonConvergence
from .maps import ALPHA, fibonacci_numbers
from .specfun import (
    DEFAULT,
    SeriesTolerance,
    _bessel_j_vec,
    _lerch,
    as_complex,
    bessel_j_scaled,
)


# ---------------------------------------------------------------------------
# closed-form test functions


@dataclass(frozen=True)
class ClosedFormFunction:
    tag: str
    params: dict = field(default_factory=dict)
    fn: Callable | None = None

    TAGS = ("reciprocal_x", "gauss_density", "f_q_plus", "f_q_minus", "power_mu", "custom")

    def __post_init__(self):
        if self.tag not in self.TAGS:
            raise DomainError(f"unknown function tag {self.tag!r}")
        if self.tag == "custom" and self.fn is None:
            raise DomainError("custom functions need a callable")

    @classmethod
    def reciprocal_x(cls):
        return cls("reciprocal_x")

    @classmethod
    def gauss_density(cls):
        return cls("gauss_density")

    @classmethod
    def f_q_minus(cls, q):
        return cls("f_q_minus", {"q": as_complex(q)})

    @classmethod
    def f_q_plus(cls, q, cutoff: int = 400):
        return cls("f_q_plus", {"q": as_complex(q), "cutoff": cutoff})

    @classmethod
    def power_mu(cls, mu):
        """x -> mu^(x+1)."""
        return cls("power_mu", {"mu": as_complex(mu)})

    @classmethod
    def custom(cls, fn: Callable, name: str = "custom"):
        return cls("custom", {"name": name}, fn)

    def __call__(self, x):
        x = np.asarray(x, dtype=complex)
        if self.tag == "reciprocal_x":
            return 1.0 / x
        if self.tag == "gauss_density":
            return 1.0 / (1.0 + x)
        if self.tag == "f_q_minus":
            return 1.0 - np.exp(-2 * self.params["q"] * np.log(x))
        if self.tag == "f_q_plus":
            from .eigenfun import fq_plus

            flat = [fq_plus(self.params["q"], xi, self.params["cutoff"]) for xi in np.ravel(x)]
            return np.array(flat, dtype=complex).reshape(x.shape)
        if self.tag == "power_mu":
            return np.exp((x + 1) * np.log(self.params["mu"]))
        return np.asarray(self.fn(x), dtype=complex)

    def taylor_at(self, center: complex, degree: int, radius: float) -> np.ndarray:
        """Taylor coefficients about ``center`` from samples on a circle."""
        m = max(64, 2 * degree + 16)
        u = radius * np.exp(2j * np.pi * np.arange(m) / m)
        coeffs = np.fft.fft(self(center + u)) / m
        return coeffs[: degree + 1] / radius ** np.arange(degree + 1)


def polynomial(coeffs, center: float = 1.0) -> ClosedFormFunction:
    """sum_n coeffs[n] (x - center)^n as a custom function."""
    c = np.asarray(coeffs, dtype=complex)

    def fn(x):
        return np.polynomial.polynomial.polyval(np.asarray(x) - center, c)

    return ClosedFormFunction.custom(fn, "polynomial")


# ---------------------------------------------------------------------------
# the Farey operators on closed-form functions


def apply_p0(f: ClosedFormFunction, q, x):
    q = as_complex(q)
    x = np.asarray(x, dtype=complex)
    return np.exp(-2 * q * np.log(x + 1)) * f(x / (x + 1))


def apply_p1(f: ClosedFormFunction, q, x):
    q = as_complex(q)
    x = np.asarray(x, dtype=complex)
    return np.exp(-2 * q * np.log(x + 1)) * f(1 / (x + 1))


def apply_p_pm(f: ClosedFormFunction, q, sign: int, x):
    """P0 f + P1 f for sign = +1, P0 f - P1 f for sign = -1."""
    if sign not in (1, -1):
        raise DomainError("sign must be +1 or -1")
    return apply_p0(f, q, x) + sign * apply_p1(f, q, x)


def apply_jq(f: ClosedFormFunction, q, x):
    q = as_complex(q)
    x = np.asarray(x, dtype=complex)
    return np.exp(-2 * q * np.log(x)) * f(1 / x)


# ---------------------------------------------------------------------------
# matrices


@dataclass(frozen=True)
class OperatorMatrix:
    kind: str
    q: complex
    z: complex
    order: int
    center: float
    entries: np.ndarray

    def scaled(self, radius: float = 1.0) -> np.ndarray:
        """Entries in the basis ((x - center)/radius)^n; same spectrum."""
        k = np.arange(self.order)
        return self.entries * radius ** (k[:, None] - k[None, :])

    def apply(self, coeffs) -> np.ndarray:
        return self.entries @ np.asarray(coeffs, dtype=complex)


def _check_gauss_params(q: complex, z: complex, continuation: bool):
    if q.real <= 0 and not continuation:
        raise DomainError("the Gauss operator needs Re(q) > 0")
    if z.imag == 0 and z.real > 1:
        raise DomainError("z on the cut (1, inf)")
    if abs(z) > 1:
        raise DomainError("only |z| <= 1 is implemented")
    if z == 1 and q.real <= 0.5 and not continuation:
        raise DomainError("at z = 1 the series needs Re(q) > 1/2 (pass continuation=True to continue)")


def _tail_block(q: complex, z: complex, order: int, first: int, tol: float) -> np.ndarray:
    """Contribution of branches k > first via the Pochhammer-Lerch expansion.

    For branch k the image of (x-1)^n is (x+k)^{-2q} (1/(x+k) - 1)^n; expanding
    the bracket binomially and each power of (x+k) about x = 1 turns the sum over
    k > first into Lerch values at a = first + 2.  Everything is rescaled by
    powers of a so that no intermediate quantity overflows.
    """
    a = first + 2.0
    n_s = 2 * order - 1
    s = 2 * q + np.arange(n_s)
    phi, err = _lerch(z, s, a, tol)
    if np.any(err > 1e-10 * np.maximum(1.0, np.abs(phi))):
        raise NonConvergence("Lerch values for the branch tail did not converge")
    zpow = cmath.exp((first + 1) * cmath.log(z))
    phi_s = zpow * phi * a ** np.arange(n_s)  # Phi_t * a^t

    j = np.arange(order)
    # ptil[j, m] = (2q+j)_m / m! / a^m
    ptil = np.empty((order, order), dtype=complex)
    ptil[:, 0] = 1.0
    for m in range(1, order):
        ptil[:, m] = ptil[:, m - 1] * (2 * q + j + m - 1) / (m * a)
    g = ptil * phi_s[j[:, None] + j[None, :]]  # g[j, m]

    n = np.arange(order)
    binom = comb(n[:, None], j[None, :])  # C(n, j)
    b = binom * (-1.0) ** (n[:, None] - j[None, :]) * a ** (-j[None, :].astype(float))
    b = np.where(j[None, :] <= n[:, None], b, 0.0)
    out = (b @ g).T  # out[m, n]
    return out * ((-1.0) ** j)[:, None]


def _direct_block(q: complex, z: complex, order: int, branches: int, radius: float = 1.0) -> np.ndarray:
    """Branches 1..branches by Taylor extraction from samples on |x - 1| = radius."""
    n_samp = 1 << int(math.ceil(math.log2(order + 64)))
    u = radius * np.exp(2j * np.pi * np.arange(n_samp) / n_samp)
    k = np.arange(1, branches + 1, dtype=float)
    y = u[None, :] + 1 + k[:, None]  # x + k
    logz = cmath.log(z)
    power = np.exp(k[:, None] * logz - 2 * q * np.log(y))
    h = 1.0 / y - 1.0
    out = np.empty((order, order), dtype=complex)
    scale = radius ** np.arange(order)
    for n in range(order):
        col = np.fft.fft(power.sum(axis=0)) / n_samp
        out[:, n] = col[:order] / scale
        power = power * h
    return out


def default_branches(order: int) -> int:
    """Branches expanded by sampling; the Lerch tail at a = K + 2 must stay within
    double range over 2*order - 1 powers of a."""
    return int(min(32, max(2, math.exp(650.0 / (2 * order - 1)) - 2)))


def q_matrix(
    q,
    z,
    order: int,
    *,
    direct_branches: int | None = None,
    continuation: bool = False,
    tol: float = 1e-14,
) -> OperatorMatrix:
    """Truncation of the Gauss operator Q_{q,z} to ``order`` Taylor coefficients about 1.

    The first ``direct_branches`` inverse branches are expanded by sampling; the
    rest use the closed Pochhammer-Lerch formula.  ``direct_branches=0`` gives the
    pure closed form, which loses about a factor 3 per order to cancellation.
    """
    q = as_complex(q)
    z = as_complex(z)
    _check_gauss_params(q, z, continuation)
    if order < 1:
        raise DomainError("order must be >= 1")
    if z == 0:
        return OperatorMatrix("gauss_Q", q, z, order, 1.0, np.zeros((order, order), dtype=complex))
    if direct_branches is None:
        direct_branches = default_branches(order)
    entries = _tail_block(q, z, order, direct_branches, tol)
    if direct_branches:
        entries = entries + _direct_block(q, z, order, direct_branches)
    return OperatorMatrix("gauss_Q", q, z, order, 1.0, entries)


def p1_matrix(q, order: int) -> OperatorMatrix:
    """Composition operator g -> (x+1)^{-2q} g(1/(x+1)) about the golden-mean point.

    Around alpha the branch is u -> -alpha^2 u/(1 + alpha u), so the matrix is
    lower triangular with diagonal (-1)^n alpha^{2q+2n}.
    """
    q = as_complex(q)
    if q.real <= 0:
        raise DomainError("needs Re(q) > 0")
    a2q = cmath.exp(2 * q * math.log(ALPHA))
    out = np.zeros((order, order), dtype=complex)
    for n in range(order):
        val = (-1) ** n * a2q * ALPHA ** (2 * n)
        out[n, n] = val
        for m in range(n + 1, order):
            k = m - n
            val = val * (-ALPHA) * (2 * q + n + k - 1) / k
            out[m, n] = val
    return OperatorMatrix("composition_P1", q, 0j, order, ALPHA, out)


def composition_matrix(weight: Callable, branch: Callable, center: float, order: int, radius: float) -> np.ndarray:
    """Taylor matrix of g -> weight(x) g(branch(x)) by sampling on a circle.

    Generic and slow; used to cross-check the closed-form assemblies.
    """
    n_samp = 1 << int(math.ceil(math.log2(2 * order + 64)))
    u = radius * np.exp(2j * np.pi * np.arange(n_samp) / n_samp)
    x = center + u
    w = weight(x)
    v = branch(x) - center
    out = np.empty((order, order), dtype=complex)
    scale = radius ** np.arange(order)
    col = w.astype(complex)
    for n in range(order):
        out[:, n] = (np.fft.fft(col) / n_samp)[:order] / scale
        col = col * v
    return out


# ---------------------------------------------------------------------------
# direct series application


def _as_function(g) -> ClosedFormFunction:
    return g if isinstance(g, ClosedFormFunction) else ClosedFormFunction.custom(g)


def q_apply_series(g, q, z, x, tol: SeriesTolerance = DEFAULT, *, continuation: bool = False, head: int = 64):
    """(Q_{q,z} g)(x) = sum_{n>=1} z^n (x+n)^{-2q} g(1/(x+n)) by direct summation.

    The first ``head`` terms are summed as written.  For the remainder g is
    replaced by its Taylor series at 0, which turns the tail into Lerch values
    at a = x + head.  g must be holomorphic on |y| <= 1/2.
    """
    g = _as_function(g)
    q = as_complex(q)
    z = as_complex(z)
    _check_gauss_params(q, z, continuation)
    xs = np.atleast_1d(np.asarray(x, dtype=complex))
    if z == 0:
        return np.zeros(xs.shape, dtype=complex) if np.ndim(x) else 0j
    degree = 24
    coeffs = g.taylor_at(0.0, degree, 0.5)
    n = np.arange(1, head, dtype=float)
    logz = cmath.log(z)
    out = np.empty(xs.shape, dtype=complex)
    for i, xi in enumerate(xs):
        y = xi + n
        out[i] = np.sum(np.exp(n * logz - 2 * q * np.log(y)) * g(1.0 / y))
        a = xi + head
        phi, err = _lerch(z, 2 * q + np.arange(degree + 1), a, tol.abs_tol, tol.max_terms)
        terms = coeffs * phi
        tail = cmath.exp(head * logz) * np.sum(terms)
        # neglected Taylor terms: geometric in |1/a| / 0.5
        ratio = 2.0 / abs(a)
        bound = abs(terms[-1]) * ratio / (1 - ratio)
        if bound > tol.abs_tol * max(1.0, abs(out[i] + tail)):
            raise NonConvergence(f"series tail bound {bound:.2e} above tolerance")
        out[i] += tail
    return out if np.ndim(x) else complex(out[0])


def r_apply_series(g, q, z, x, tol: SeriesTolerance = DEFAULT):
    """(R_{q,z} g)(x) = sum_{n>=1} z^n (S_{n+1}x+S_n)^{-2q} g((S_n x+S_{n-1})/(S_{n+1}x+S_n)).

    Converges geometrically for |z| alpha^{2 Re q} < 1.
    """
    g = _as_function(g)
    q = as_complex(q)
    z = as_complex(z)
    ratio = abs(z) * ALPHA ** (2 * q.real)
    if ratio >= 1:
        raise DomainError("R_{q,z} series needs |z| < alpha^{-2 Re q}")
    xs = np.atleast_1d(np.asarray(x, dtype=complex))
    if z == 0:
        return np.zeros(xs.shape, dtype=complex) if np.ndim(x) else 0j
    s = [float(v) for v in fibonacci_numbers(1400)]  # S_1477 overflows a double
    out = np.zeros(xs.shape, dtype=complex)
    sup = 0.0
    logz = cmath.log(z)
    for n in range(1, tol.max_terms):
        if n + 2 >= len(s):
            raise NonConvergence("R series exhausted the Fibonacci table")
        den = s[n + 1] * xs + s[n]
        vals = g((s[n] * xs + s[n - 1]) / den)
        weight = np.exp(n * logz - 2 * q * np.log(den))
        out += weight * vals
        sup = max(sup, float(np.max(np.abs(vals))))
        # per-step factor |z| (den_n / den_{n+1})^{2 Re q} tends to |z| alpha^{2 Re q}
        # from alternating sides; pad it by the distance still to go
        step = abs(z) * np.max(np.abs(den / (s[n + 2] * xs + s[n + 1])) ** (2 * q.real))
        r = max(step, ratio) * (1 + 4 * ALPHA ** (2 * n))
        if n > 5 and r < 1:
            bound = float(np.max(np.abs(weight))) * sup * r / (1 - r)
            if bound < tol.abs_tol * 1e-2 * max(1.0, float(np.max(np.abs(out)))):
                return out if np.ndim(x) else complex(out[0])
    raise NonConvergence("R series did not converge")


# ---------------------------------------------------------------------------
# traces


def _orbit_trace(q: complex, z: complex, head: int = 64) -> complex:
    """sum_n z^n x_n^{2q} / (1 + x_n^2), with x_n the fixed point of 1/(x+n)."""
    n = np.arange(1, head, dtype=float)
    xn = 2.0 / (n + np.sqrt(n * n + 4))
    logz = cmath.log(z)
    head_sum = np.sum(np.exp(n * logz + 2 * q * np.log(xn)) / (1 + xn * xn))

    # for n >= head write the summand as n^{-2q} psi(4/n^2) and expand psi about 0
    def psi(w):
        r = np.sqrt(1 + w)
        phi = 2.0 / (1 + r)
        return np.exp(2 * q * np.log(phi)) * (r + 1) / (2 * r)

    jmax = 12
    m = 64
    wc = 0.5 * np.exp(2j * np.pi * np.arange(m) / m)
    d = (np.fft.fft(psi(wc)) / m)[: jmax + 1] / 0.5 ** np.arange(jmax + 1)
    s = 2 * q + 2 * np.arange(jmax + 1)
    phi, _ = _lerch(z, s, float(head), 1e-15)
    tail = cmath.exp(head * logz) * np.sum(d * 4.0 ** np.arange(jmax + 1) * phi)
    return complex(head_sum + tail)


def _integral_trace(q: complex, z: complex, tol: float) -> complex:
    nu = 2 * q - 1

    def f(t):
        return _bessel_j_vec(nu, 2 * t) * np.exp(-t) / (1 - z * np.exp(-t))

    lead = 2 * q.real - 2 if z == 1 else 2 * q.real - 1
    val, _ = _quad.integrate(f, 45.0, lead, tol)
    return z * val


def trace_q(q, z, method: str = "matrix", order: int = 24, tol: float = 1e-13, *, continuation: bool = False) -> complex:
    """Trace of Q_{q,z} by one of three independent routes.

    matrix   -- diagonal sum of the truncated Taylor matrix
    orbits   -- sum over branch fixed points x_n of z^n x_n^{2q}/(1 + x_n^2)
    integral -- z int_0^inf J_{2q-1}(2t) e^{-t}/(1 - z e^{-t}) dt
    """
    q = as_complex(q)
    z = as_complex(z)
    _check_gauss_params(q, z, continuation)
    if z == 0:
        return 0j
    if method == "matrix":
        return complex(np.trace(q_matrix(q, z, order, continuation=continuation).entries))
    if method == "orbits":
        return _orbit_trace(q, z)
    if method == "integral":
        if z == 1 and q.real <= 0.5:
            raise DomainError("the trace integral diverges at z = 1 for Re(q) <= 1/2")
        return _integral_trace(q, z, tol)
    raise DomainError(f"unknown trace method {method!r}")


# ---------------------------------------------------------------------------
# kernel operators on (0, inf)


def m_apply(phi: Callable, t):
    """(M phi)(t) = e^{-t} phi(t)."""
    t = np.asarray(t, dtype=float)
    return np.exp(-t) * phi(t)


def nq_apply(phi: Callable, q, t: float, tol: float = 1e-12, leading_power: float | None = None) -> complex:
    """Bessel-kernel operator N_q applied to phi, evaluated at t > 0.

    ``leading_power`` is the exponent p of phi(s) ~ s^p at 0 (default 0).
    """
    q = as_complex(q)
    nu = 2 * q - 1
    t = float(t)
    if t < 0:
        raise DomainError("t must be >= 0")

    def f(s):
        kern = bessel_j_scaled(nu, 2 * np.sqrt(s * t))
        return kern * phi(s) * np.exp((2 * q - 1) * np.log(s) - s)

    p = 0.0 if leading_power is None else leading_power
    val, _ = _quad.integrate(f, 60.0 + 2 * t, 2 * q.real - 1 + p, tol)
    return val
