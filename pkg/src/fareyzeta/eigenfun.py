"""Eigenfunctions of the Farey operators: the B_q transform, Lewis residuals,
the families f_q^+ and f_q^-, and the P/Q correspondences.

B_q[phi](x) = x^{-2q} int_0^inf e^{-t/x} phi(t) t^{2q-1} dt, so B_q[t^k] = Gamma(k+2q) x^k.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import _quad
from .errors import DomainError, NonConvergence
from .operators import ClosedFormFunction, apply_p0, apply_p1, apply_p_pm
from .specfun import (
    DEFAULT,
    SeriesTolerance,
    _bernoulli_even_over_factorial,
    _hurwitz,
    as_complex,
    bessel_j_scaled,
    gamma,
    hurwitz_zeta,
    riemann_zeta,
    rgamma,
)

FQ_PLUS_CUTOFF = 400


# ---------------------------------------------------------------------------
# B_q transform


def bq_transform(phi: Callable, q, x, tol: float = 1e-13, leading_power: float = 0.0,
                 return_error: bool = False):
    """B_q[phi](x) by graded Gauss-Legendre quadrature on (0, T].

    ``leading_power`` is the exponent p of phi(t) ~ t^p at 0.  T starts where
    e^{-t Re(1/x)} is below 1e-18 and is doubled while the next stretch still
    contributes.
    """
    q = as_complex(q)
    x = as_complex(x)
    if x.real <= 0:
        raise DomainError("B_q needs Re(x) > 0")
    rate = (1 / x).real
    lead = 2 * q.real - 1 + leading_power
    if lead <= -1:
        raise DomainError("phi(t) t^{2q-1} is not integrable at 0")

    def f(t):
        return np.exp(-t / x + (2 * q - 1) * np.log(t)) * phi(t)

    t_max = (42.0 + 2 * abs(q) + max(leading_power, 0)) / rate
    value, err = _quad.integrate(f, t_max, lead, tol, width=max(1.0, t_max / 64))
    for _ in range(6):
        extra, e2 = _integrate_range(f, t_max, 2 * t_max, tol)
        if abs(extra) <= tol * max(1.0, abs(value)):
            break
        value += extra
        err += e2
        t_max *= 2
    else:
        raise NonConvergence("B_q integrand does not decay")
    value *= cmath.exp(-2 * q * cmath.log(x))
    return (value, err) if return_error else value


def _integrate_range(f, a: float, b: float, tol: float):
    prev = None
    for n in (20, 40, 80, 160):
        xs, ws = np.polynomial.legendre.leggauss(n)
        panels = max(1, int(math.ceil(b - a) / 4))
        edges = np.linspace(a, b, panels + 1)
        half = np.diff(edges) / 2
        mid = edges[:-1] + half
        nodes = (mid[:, None] + half[:, None] * xs[None, :]).ravel()
        weights = (half[:, None] * ws[None, :]).ravel()
        val = complex(np.dot(weights, f(nodes)))
        if prev is not None and abs(val - prev) <= tol * max(1.0, abs(val)):
            return val, abs(val - prev)
        prev = val
    raise NonConvergence("quadrature on the outer range did not settle")


def laguerre_e(n: int, q, t):
    """Generalised Laguerre polynomial L_n^{(2q-1)}(t) by three-term recurrence."""
    a = 2 * as_complex(q) - 1
    t = np.asarray(t, dtype=complex)
    prev = np.ones_like(t)
    if n == 0:
        return prev
    cur = 1 + a - t
    for k in range(1, n):
        prev, cur = cur, ((2 * k + 1 + a - t) * cur - (k + a) * prev) / (k + 1)
    return cur


def bq_laguerre_closed_form(n: int, q, x) -> complex:
    """Gamma(n+2q)/n! (-1)^n (x-1)^n."""
    q, x = as_complex(q), as_complex(x)
    return gamma(n + 2 * q) / math.factorial(n) * (-1) ** n * (x - 1) ** n


def phi_bar(q, mu, t):
    """mu sum_k (log mu)^k t^k / (k! Gamma(k+2q)); its B_q transform is mu^{x+1}."""
    q, mu = as_complex(q), as_complex(mu)
    t = np.asarray(t, dtype=float)
    if mu == 0:
        return np.zeros(t.shape, dtype=complex)
    lm = cmath.log(mu)
    if lm.imag == 0 and lm.real < 0:
        # 0F1(; 2q; -y) = Gamma(2q) J_{2q-1}(2 sqrt y) / y^{q - 1/2}
        return mu * bessel_j_scaled(2 * q - 1, 2 * np.sqrt(-lm.real * t))
    # entire series; terms peak near k ~ sqrt(|t log mu|)
    out = np.zeros(t.shape, dtype=complex)
    term = np.full(t.shape, rgamma(2 * q), dtype=complex)
    k = 0
    while True:
        out += term
        k += 1
        term = term * lm * t / (k * (k - 1 + 2 * q))
        if k > 8 and np.all(np.abs(term) <= 1e-17 * np.maximum(1.0, np.abs(out))):
            break
        if k > 2000:
            raise NonConvergence("phi_bar series did not converge")
    return mu * out


def nq_one_over_t(q, t: float) -> complex:
    """N_q(1/t) = t^{1-2q} int_0^t s^{2q-2} e^{-s} ds, by its power series."""
    q = as_complex(q)
    total = 0j
    term = 1.0 + 0j
    for m in range(400):
        contrib = term / (m + 2 * q - 1)
        total += contrib
        term *= -t / (m + 1)
        if m > t and abs(contrib) < 1e-17 * max(1.0, abs(total)):
            return total
    raise NonConvergence("series for N_q(1/t) did not converge")


# ---------------------------------------------------------------------------
# Lewis equation and the explicit families


def lewis_residual(f, q, lam, x) -> float:
    """|lam f(x) - f(x+1) - (x+1)^{-2q} f(x/(x+1))|."""
    q, lam, x = as_complex(q), as_complex(lam), as_complex(x)
    if x.real <= 0:
        raise DomainError("needs Re(x) > 0")
    f = _fn(f)
    val = lam * _scalar(f, x) - _scalar(f, x + 1) - cmath.exp(-2 * q * cmath.log(x + 1)) * _scalar(f, x / (x + 1))
    return abs(val)


def _fn(f):
    return f if isinstance(f, ClosedFormFunction) else ClosedFormFunction.custom(f)


def _scalar(f, x) -> complex:
    return complex(np.ravel(f(np.array([x])))[0])


def fq_minus(q, x):
    """f_q^-(x) = 1 - x^{-2q}."""
    q = as_complex(q)
    return 1 - np.exp(-2 * q * np.log(np.asarray(x, dtype=complex)))


def _fq_plus_with_error(q: complex, x: complex, cutoff: int):
    s = 2 * q
    # inner sums over n in closed form: sum_n (m x + n)^{-s} = zeta_H(s, m x + 1)
    inner = 0j
    for m in range(1, cutoff + 1):
        v, _ = _hurwitz(np.array([s]), m * x + 1)
        inner += v[0]
    # m > cutoff: expand zeta_H(s, a) for large a and sum each power of a = m x + 1
    # over m, which is again a Hurwitz value in m
    start = cutoff + 1 + 1 / x
    b2k = _bernoulli_even_over_factorial(6)
    powers = [(1 / (s - 1), s - 1), (0.5, s)]
    poch = s
    for k in range(1, 6):
        # B_2k/(2k)! (s)_{2k-1} a^{-s-2k+1}
        powers.append((b2k[k - 1] * poch, s + 2 * k - 1))
        poch *= (s + 2 * k - 1) * (s + 2 * k)
    tail = 0j
    last = 0.0
    for coef, p in powers:
        term = coef * cmath.exp(-p * cmath.log(x)) * hurwitz_zeta(p, start)
        tail += term
        last = abs(term)
    value = riemann_zeta(s) / 2 * (1 + cmath.exp(-s * cmath.log(x))) + inner + tail
    return value, last


def fq_plus(q, x, cutoff: int = FQ_PLUS_CUTOFF) -> complex:
    """f_q^+(x) = zeta_R(2q)/2 (1 + x^{-2q}) + sum_{m,n>=1} (m x + n)^{-2q}, Re(q) > 1."""
    q, x = as_complex(q), as_complex(x)
    if q.real <= 1:
        raise DomainError("the double sum needs Re(q) > 1")
    if x.real <= 0:
        raise DomainError("needs Re(x) > 0")
    value, err = _fq_plus_with_error(q, x, cutoff)
    if err > 1e-12 * max(1.0, abs(value)):
        raise NonConvergence(f"tail expansion error {err:.2e}")
    return value


def fq_plus_density(q, t, n_direct: int | None = None):
    """phi with f_q^+ = zeta(2q)/2 x^{-2q} + Gamma(2q-1)/Gamma(2q) zeta(2q-1)/x + B_q[phi].

    phi(t) = (1/Gamma(2q)) [zeta(2q)/2 + sum_n n^{-2q} (1/(e^{t/n} - 1) - n/t)],
    valid for every t > 0.  Terms with n > n_direct use the Bernoulli series of
    1/(e^u - 1) - 1/u, which converges because t/n < 2 pi there.
    """
    q = as_complex(q)
    t = np.atleast_1d(np.asarray(t, dtype=float))
    n_direct = n_direct or int(max(64, 2 * t.max()))
    n = np.arange(1, n_direct + 1, dtype=float)
    u = t[:, None] / n[None, :]
    with np.errstate(over="ignore"):
        g = 1 / np.expm1(u) - 1 / u
    direct = (g * np.exp(-2 * q * np.log(n))[None, :]).sum(axis=1)
    # tail: sum_k B_k/k! t^{k-1} zeta_H(2q + k - 1, N + 1), B_1 = -1/2, odd k > 1 vanish
    kmax = 30
    b2k = _bernoulli_even_over_factorial(kmax // 2 + 1)
    s_vals = [2 * q] + [2 * q + 2 * j - 1 for j in range(1, kmax // 2 + 1)]
    hz, _ = _hurwitz(np.array(s_vals), n_direct + 1.0)
    tail = -0.5 * hz[0] * np.ones_like(t, dtype=complex)
    for j in range(1, kmax // 2 + 1):
        tail = tail + b2k[j - 1] * t ** (2 * j - 1) * hz[j]
    total = riemann_zeta(2 * q) / 2 + direct + tail
    return total * rgamma(2 * q)


# ---------------------------------------------------------------------------
# representation f = c mu^{1/x} x^{-2q} + Gamma(2q-1)/Gamma(2q) b/x + B_q[phi]


@dataclass(frozen=True)
class EigenfunctionForm:
    q: complex
    c: complex
    b: complex
    phi: Callable
    mu: complex = 1.0
    phi_power: float = 0.0

    def __call__(self, x) -> complex:
        q, x = self.q, as_complex(x)
        val = self.c * cmath.exp(cmath.log(self.mu) / x - 2 * q * cmath.log(x)) if self.c else 0j
        if self.b:
            val += gamma(2 * q - 1) / gamma(2 * q) * self.b / x
        return val + bq_transform(self.phi, q, x, leading_power=self.phi_power)

    @classmethod
    def for_fq_minus(cls, q):
        q = as_complex(q)
        const = rgamma(2 * q)
        return cls(q, -1.0, 0.0, lambda t: np.full(np.shape(t), const, dtype=complex))

    @classmethod
    def for_fq_plus(cls, q):
        q = as_complex(q)
        return cls(q, riemann_zeta(2 * q) / 2, riemann_zeta(2 * q - 1), lambda t: fq_plus_density(q, t))


# ---------------------------------------------------------------------------
# correspondences


def correspondence_g_from_f(f, q, z, x):
    """g = f - z P_{0,q} f: eigenfunctions of P^+ with eigenvalue 1/z to fixed points of Q_{q,z}."""
    f = _fn(f)
    z = as_complex(z)
    x = np.asarray(x, dtype=complex)
    return f(x) - z * apply_p0(f, q, x)


def decomposition_check(f, q, z, x, sign: int = 1):
    """h0 = (1 - z P0) f and h1 = (1 - sign z P1) f, with residual |h0 + h1 - f|.

    h0 + h1 = f + (1 - z P^{sign}) f, so the residual vanishes exactly when f is
    an eigenfunction of P^+ (sign=+1) or P^- (sign=-1) with eigenvalue 1/z.
    """
    f = _fn(f)
    z = as_complex(z)
    x = np.asarray(x, dtype=complex)
    h0 = f(x) - z * apply_p0(f, q, x)
    h1 = f(x) - sign * z * apply_p1(f, q, x)
    return h0, h1, np.abs(h0 + h1 - f(x))


def eigen_residual(f, q, sign: int, lam, x):
    """|P^{sign}_q f(x) - lam f(x)|."""
    f = _fn(f)
    x = np.asarray(x, dtype=complex)
    return np.abs(apply_p_pm(f, q, sign, x) - as_complex(lam) * f(x))
