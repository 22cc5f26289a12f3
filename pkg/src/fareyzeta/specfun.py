"""Special functions of complex parameters.

Gamma, Hurwitz zeta, the Lerch transcendent and Bessel J of complex order,
all in binary64 complex arithmetic.  The array helpers prefixed with an
underscore are vectorised over the parameter that varies inside matrix
assembly and quadrature loops; the public functions are scalar wrappers
with argument checking.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy import special as sp

from .errors import DomainError, NonConvergence, PoleError

DEFAULT_TOL = 1e-12
X_SWITCH = 30.0
# Below this argument the power series of J is used directly; between it and
# X_SWITCH the Miller backward recurrence takes over (see _bessel_miller).
X_SERIES = 6.0


@dataclass(frozen=True)
class SeriesTolerance:
    abs_tol: float = DEFAULT_TOL
    max_terms: int = 200_000

    def __post_init__(self):
        if not self.abs_tol > 0:
            raise ValueError("abs_tol must be positive")
        if self.max_terms < 1:
            raise ValueError("max_terms must be at least 1")


DEFAULT = SeriesTolerance()


def as_complex(value) -> complex:
    """Coerce ``value`` to a finite Python complex.

    Accepts numbers, ``(re, im)`` pairs and ``"re,im"`` strings.
    """
    if isinstance(value, str):
        parts = [p.strip() for p in value.split(",")]
        if len(parts) == 1:
            out = complex(float(parts[0]), 0.0)
        elif len(parts) == 2:
            out = complex(float(parts[0]), float(parts[1]))
        else:
            raise DomainError(f"cannot parse complex literal {value!r}")
    elif isinstance(value, (tuple, list)):
        if len(value) != 2:
            raise DomainError(f"expected (re, im), got {value!r}")
        out = complex(float(value[0]), float(value[1]))
    else:
        out = complex(value)
    if not (math.isfinite(out.real) and math.isfinite(out.imag)):
        raise DomainError(f"non-finite parameter {value!r}")
    return out


def _is_nonpositive_integer(s: complex) -> bool:
    return s.imag == 0 and s.real <= 0 and s.real == math.floor(s.real)


# ---------------------------------------------------------------------------
# Gamma


def gamma(s) -> complex:
    """Complex Gamma function."""
    s = as_complex(s)
    if _is_nonpositive_integer(s):
        raise PoleError(f"Gamma has a pole at {s}")
    return complex(sp.gamma(s))


def rgamma(s):
    """Reciprocal Gamma, entire; vectorised."""
    return sp.rgamma(np.asarray(s, dtype=complex))


def pochhammer_table(s, m: int) -> np.ndarray:
    """Rising factorials ``(s)_k`` for k = 0..m-1, shape ``(m,) + shape(s)``."""
    s = np.asarray(s, dtype=complex)
    out = np.empty((m,) + s.shape, dtype=complex)
    if m == 0:
        return out
    out[0] = 1.0
    for k in range(1, m):
        out[k] = out[k - 1] * (s + (k - 1))
    return out


@lru_cache(maxsize=None)
def _bernoulli_even_over_factorial(count: int) -> np.ndarray:
    """B_{2r}/(2r)! for r = 1..count."""
    b = sp.bernoulli(2 * count)
    return np.array([b[2 * r] / math.factorial(2 * r) for r in range(1, count + 1)])


# ---------------------------------------------------------------------------
# Hurwitz zeta


def _hurwitz(s, a, abs_tol: float = DEFAULT_TOL, max_terms: int = DEFAULT.max_terms):
    """Vectorised Hurwitz zeta by Euler-Maclaurin summation.

    Returns ``(values, error_estimates)``.  The first M terms are summed
    directly; the rest is the integral term plus Bernoulli corrections at
    ``a + M``.  M is chosen so that consecutive corrections shrink by at
    least a factor 16.
    """
    s, a = np.broadcast_arrays(np.asarray(s, dtype=complex), np.asarray(a, dtype=complex))
    shape = s.shape
    s = s.ravel()
    a = a.ravel()
    if np.any(a.real <= 0):
        raise DomainError("Hurwitz zeta needs Re(a) > 0")
    if np.any(s == 1):
        raise PoleError("Hurwitz zeta has a pole at s = 1")

    n_corr = 30
    need = 0.64 * (np.abs(s) + 2 * n_corr) + 2.0
    m_dir = int(max(0, np.ceil(np.max(need - a.real)))) if s.size else 0
    if m_dir > max_terms:
        raise NonConvergence("Hurwitz zeta: Euler-Maclaurin shift exceeds max_terms")

    total = np.zeros(s.size, dtype=complex)
    if m_dir:
        k = np.arange(m_dir, dtype=float)
        base = a[:, None] + k[None, :]
        total += np.exp(-s[:, None] * np.log(base)).sum(axis=1)

    b = a + m_dir
    logb = np.log(b)
    b_pow = np.exp(-s * logb)  # b^{-s}
    total += b * b_pow / (s - 1) + 0.5 * b_pow

    coeff = _bernoulli_even_over_factorial(n_corr)
    poch = s.copy()  # (s)_{2r-1}, starts at r = 1
    power = b_pow / b  # b^{-s-1}
    err = np.full(s.size, np.inf)
    done = np.zeros(s.size, dtype=bool)
    floor = abs_tol * 1e-3
    for r in range(1, n_corr + 1):
        term = coeff[r - 1] * poch * power
        term = np.where(done, 0, term)
        total += term
        mag = np.abs(term)
        newly = (~done) & (mag < floor * np.maximum(1.0, np.abs(total)))
        err = np.where(newly, mag, err)
        done |= newly
        if done.all():
            break
        poch = poch * (s + 2 * r - 1) * (s + 2 * r)
        power = power / (b * b)
    err = np.where(done, err, np.abs(term) * np.abs(s + 2 * n_corr + 1) / np.maximum(s.real + 2 * n_corr + 1, 1.0))
    return total.reshape(shape), err.reshape(shape)


def hurwitz_zeta(s, a, tol: SeriesTolerance = DEFAULT) -> complex:
    """Hurwitz zeta ``sum_{k>=0} (k+a)^{-s}``, continued to all s != 1.

    >>> round(hurwitz_zeta(2, 1).real, 10)
    1.6449340668
    """
    s = as_complex(s)
    a = as_complex(a)
    if s == 1:
        raise PoleError("Hurwitz zeta has a pole at s = 1")
    if a.real <= 0:
        raise DomainError("Hurwitz zeta needs Re(a) > 0")
    val, err = _hurwitz(s, a, tol.abs_tol, tol.max_terms)
    val = complex(val)
    if float(err) > tol.abs_tol * max(1.0, abs(val)):
        raise NonConvergence(f"Hurwitz zeta error estimate {float(err):.2e} above tolerance")
    return val


def riemann_zeta(s) -> complex:
    """Riemann zeta as the Hurwitz function at a = 1."""
    return hurwitz_zeta(s, 1.0)


# ---------------------------------------------------------------------------
# Lerch transcendent


def _lerch_direct(z: complex, s: np.ndarray, a: complex, abs_tol: float, max_terms: int):
    """Direct partial sums with a geometric tail bound, for |z| < 1."""
    r = abs(z)
    block = 256
    total = np.zeros(s.shape, dtype=complex)
    k0 = 0
    logz = cmath.log(z)
    while True:
        k = np.arange(k0, k0 + block, dtype=float)
        base = a + k
        terms = np.exp(k[None, :] * logz - s[:, None] * np.log(base)[None, :])
        total += terms.sum(axis=1)
        k0 += block
        last = np.abs(terms[:, -1])
        # successive-term ratio bound beyond k0: |z| times the growth of |k+a|^{-Re s}
        growth = np.maximum(1.0, (abs(a) + k0 + 1) / max(abs(a) + k0 - 1, 1e-300)) ** np.maximum(0.0, -s.real)
        ratio = r * growth * np.exp(np.abs(s.imag) * abs(a.imag) / (a.real + k0) ** 2)
        if np.all(ratio < 1):
            tail = last * ratio / (1 - ratio)
            if np.all(tail < abs_tol * 1e-2 * np.maximum(1.0, np.abs(total))):
                return total, tail
        if k0 > max_terms:
            raise NonConvergence("Lerch direct summation exceeded max_terms")


def _lerch_em(z: complex, s: np.ndarray, a: complex, abs_tol: float, max_terms: int):
    """Euler-Maclaurin summation of k -> z^k (k+a)^{-s} for 0.9 <= |z| <= 1, z != 1.

    The integral part is expanded by repeated integration by parts, which
    needs |log z| (K + a) well above |s|; K is chosen accordingly.
    """
    c = cmath.log(z)
    smax = float(np.max(np.abs(s)))
    k_cut = int(math.ceil(max(10.0, (2 * smax + 40) / abs(c) - a.real, 0.64 * (smax + 60) - a.real)))
    if k_cut > max_terms:
        raise NonConvergence("Lerch Euler-Maclaurin cut exceeds max_terms")
    total = np.zeros(s.shape, dtype=complex)
    for start in range(0, k_cut, 4096):
        k = np.arange(start, min(k_cut, start + 4096), dtype=float)
        total += np.exp(k[None, :] * c - s[:, None] * np.log(a + k)[None, :]).sum(axis=1)

    w = a + k_cut
    logw = cmath.log(w)
    ek = cmath.exp(c * k_cut)
    wpow = np.exp(-s * logw)  # w^{-s}

    # integral from K to infinity of e^{ct} (t+a)^{-s}
    integral = np.zeros(s.shape, dtype=complex)
    term = -ek / c * wpow
    best = np.abs(term)
    for p in range(0, 400):
        integral += term
        nxt = term * (s + p) / (c * w)
        mag = np.abs(nxt)
        if np.all((mag < abs_tol * 1e-3) | (mag > best)):
            break
        best = np.minimum(best, mag)
        term = nxt
    int_err = np.abs(nxt)

    # Euler-Maclaurin corrections: f(K)/2 - sum B_{2r}/(2r)! f^{(2r-1)}(K)
    total += integral + 0.5 * ek * wpow
    n_corr = 30
    coeff = _bernoulli_even_over_factorial(n_corr)
    poch = pochhammer_table(s, 2 * n_corr + 1)  # (s)_i
    inv_w = 1.0 / w
    err = np.zeros(s.shape)
    for r in range(1, n_corr + 1):
        p = 2 * r - 1
        deriv = np.zeros(s.shape, dtype=complex)
        for i in range(p + 1):
            deriv += math.comb(p, i) * c ** (p - i) * (-1) ** i * poch[i] * inv_w**i
        deriv *= ek * wpow
        corr = coeff[r - 1] * deriv
        total -= corr
        err = np.abs(corr)
        if np.all(err < abs_tol * 1e-3 * np.maximum(1.0, np.abs(total))):
            break
    return total, err + int_err


def _lerch(z, s, a, abs_tol: float = DEFAULT_TOL, max_terms: int = DEFAULT.max_terms):
    """Vectorised Lerch transcendent over ``s``; returns ``(values, errors)``."""
    z = as_complex(z)
    a = as_complex(a)
    s = np.atleast_1d(np.asarray(s, dtype=complex))
    if a.real <= 0:
        raise DomainError("Lerch transcendent needs Re(a) > 0")
    if z.imag == 0 and z.real > 1:
        raise DomainError("Lerch transcendent undefined on the cut z in (1, inf)")
    if abs(z) > 1:
        raise DomainError("Lerch transcendent only implemented for |z| <= 1")
    if z == 0:
        return np.exp(-s * cmath.log(a)), np.zeros(s.shape)
    if z == 1:
        return _hurwitz(s, a, abs_tol, max_terms)
    if abs(z) < 0.9:
        return _lerch_direct(z, s, a, abs_tol, max_terms)
    if abs(z) == 1 and np.any(s.real <= 0):
        raise DomainError("on |z| = 1 the Lerch series needs Re(s) > 0")
    return _lerch_em(z, s, a, abs_tol, max_terms)


def lerch_phi(z, s, a, tol: SeriesTolerance = DEFAULT) -> complex:
    """Lerch transcendent ``sum_{k>=0} z^k (k+a)^{-s}``.

    At z = 1 this is the Hurwitz zeta function, continued in s.
    """
    val, err = _lerch(z, [as_complex(s)], a, tol.abs_tol, tol.max_terms)
    val = complex(val[0])
    if float(err[0]) > tol.abs_tol * max(1.0, abs(val)):
        raise NonConvergence(f"Lerch error estimate {float(err[0]):.2e} above tolerance")
    return val


# ---------------------------------------------------------------------------
# Bessel J of complex order


def _bessel_series(nu: complex, x: np.ndarray, n_terms: int = 60) -> np.ndarray:
    """J_nu(x) / (x/2)^nu by its power series (an entire function of x)."""
    y = -(x * x) / 4.0
    m = np.arange(n_terms)
    coeff = rgamma(m + nu + 1) / sp.factorial(m)
    # Horner in y
    out = np.zeros(x.shape, dtype=complex)
    for c in coeff[::-1]:
        out = out * y + c
    return out


def _bessel_miller(nu: complex, x: np.ndarray) -> np.ndarray:
    """J_nu(x) / (x/2)^nu by Miller's backward recurrence.

    Normalised with the Neumann sum (x/2)^nu = sum_k (nu+2k) Gamma(nu+k)/k! J_{nu+2k}(x).
    That sum is singular at negative integer nu, so Re nu < 0 is reached
    by one downward step of the scaled recurrence.
    """
    if nu.real < 0:
        return (nu + 1) * _bessel_miller(nu + 1, x) - (x * x / 4.0) * _bessel_miller(nu + 2, x)
    kmax = int(np.max(x)) + 40 + int(abs(nu))
    if kmax % 2:
        kmax += 1
    j_next = np.zeros(x.shape, dtype=complex)
    j_cur = np.full(x.shape, 1e-30, dtype=complex)
    # weights w_k for even offsets: k = 0 -> Gamma(nu+1); k >= 1 -> (nu+2k) Gamma(nu+k)/k!
    g = np.empty(kmax // 2 + 1, dtype=complex)
    g[0] = 1.0 / complex(sp.rgamma(nu + 1))
    gk = g[0]  # Gamma(nu+k)/k! at k = 1
    for k in range(1, kmax // 2 + 1):
        g[k] = (nu + 2 * k) * gk
        gk = gk * (nu + k) / (k + 1)
    norm = np.zeros(x.shape, dtype=complex)
    for n in range(kmax, 0, -1):
        if n % 2 == 0:
            norm += g[n // 2] * j_cur
        j_prev = 2.0 * (nu + n) / x * j_cur - j_next
        j_next, j_cur = j_cur, j_prev
        big = np.abs(j_cur) > 1e250
        if np.any(big):
            scale = np.where(big, 1e-250, 1.0)
            j_cur *= scale
            j_next *= scale
            norm *= scale
    norm += g[0] * j_cur
    return j_cur / norm


def _hankel_terms(nu: complex, x: np.ndarray, max_k: int = 60):
    mu = 4 * nu * nu
    p = np.zeros(x.shape, dtype=complex)
    q = np.zeros(x.shape, dtype=complex)
    term = np.ones(x.shape, dtype=complex)
    best = np.full(x.shape, np.inf)
    active = np.ones(x.shape, dtype=bool)
    last = np.zeros(x.shape)
    for k in range(max_k):
        mag = np.abs(term)
        active &= mag < best
        if not active.any():
            break
        contrib = np.where(active, term, 0)
        if k % 2 == 0:
            p += (-1) ** (k // 2) * contrib
        else:
            q += (-1) ** (k // 2) * contrib
        best = np.where(active, mag, best)
        last = np.where(active, mag, last)
        term = term * (mu - (2 * k + 1) ** 2) / ((k + 1) * 8.0 * x)
    return p, q, last


def _bessel_asymptotic(nu: complex, x: np.ndarray) -> np.ndarray:
    p, q, _ = _hankel_terms(nu, x)
    w = x - (nu / 2 + 0.25) * math.pi
    return np.sqrt(2.0 / (math.pi * x)) * (p * np.cos(w) - q * np.sin(w))


def bessel_j_scaled(order, x) -> np.ndarray:
    """Entire function J_nu(x) / (x/2)^nu for real x >= 0 (vectorised)."""
    nu = as_complex(order)
    x = np.atleast_1d(np.asarray(x, dtype=float))
    if np.any(x < 0):
        raise DomainError("bessel_j needs x >= 0")
    out = np.empty(x.shape, dtype=complex)
    small = x <= X_SERIES
    if small.any():
        out[small] = _bessel_series(nu, x[small])
    large = ~small
    if large.any():
        xs = x[large]
        asym = (xs >= X_SWITCH) & (xs >= 2 * abs(nu) ** 2)
        vals = np.empty(xs.shape, dtype=complex)
        if asym.any():
            xa = xs[asym]
            vals[asym] = _bessel_asymptotic(nu, xa) * np.exp(-nu * np.log(xa / 2))
        if (~asym).any():
            vals[~asym] = _bessel_miller(nu, xs[~asym])
        out[large] = vals
    return out


def _bessel_j_vec(nu: complex, x: np.ndarray) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    scaled = bessel_j_scaled(nu, x)
    with np.errstate(divide="ignore", invalid="ignore"):
        factor = np.exp(nu * np.log(x / 2))
    factor = np.where(x == 0, 1.0 if nu == 0 else 0.0, factor)
    return scaled * factor


def bessel_j(order, x: float, tol: SeriesTolerance = DEFAULT) -> complex:
    """Bessel function of the first kind of complex order at real x >= 0.

    Power series for small x, Miller recurrence in the middle range and
    the Hankel asymptotic expansion for x >= 30.
    """
    nu = as_complex(order)
    x = float(x)
    if x < 0:
        raise DomainError("bessel_j needs x >= 0")
    if x <= X_SERIES:
        return _bessel_series_checked(nu, x, tol)
    val = complex(_bessel_j_vec(nu, np.array([x]))[0])
    if not cmath.isfinite(val):
        raise NonConvergence(f"bessel_j({nu}, {x}) is not finite")
    return val


def _bessel_series_checked(nu: complex, x: float, tol: SeriesTolerance) -> complex:
    """Series partial sums, stopped once terms fall below the tolerance."""
    if x == 0:
        if nu == 0:
            return 1.0 + 0j
        if nu.real > 0 or (nu.imag == 0 and nu.real == round(nu.real)):
            return 0j
        raise DomainError("J_nu(0) is unbounded for Re(nu) <= 0, nu != 0")
    y = -(x * x) / 4.0
    pref = cmath.exp(nu * math.log(x / 2))
    total = 0j
    term_base = 1.0  # y^m / m!
    for m in range(tol.max_terms):
        term = term_base * complex(sp.rgamma(m + nu + 1))
        total += term
        if m > abs(x) and m + nu.real + 1 > 0 and abs(term * pref) < tol.abs_tol * 1e-3:
            return total * pref
        term_base *= y / (m + 1)
    raise NonConvergence("bessel_j series exhausted max_terms")
