"""Named invariant checks, grouped by module, for the ``selfcheck`` command.

Each check returns the measured residual; it passes when the residual is
below its tolerance.  None of these rely on test-only packages.
"""

from __future__ import annotations

import math
import time
from fractions import Fraction

import numpy as np

from . import eigenfun, fareytree, fredholm, maps, operators, specfun, zeta


def _specfun(rows):
    s, a = 1.7 + 2.3j, 0.6 + 0.2j
    yield "hurwitz shift a -> a+1", abs(specfun.hurwitz_zeta(s, a) - specfun.hurwitz_zeta(s, a + 1) - a ** -s), 1e-11
    z = 0.95 * np.exp(1j)
    yield ("lerch shift a -> a+1", abs(specfun.lerch_phi(z, s, a) - a ** -s - z * specfun.lerch_phi(z, s, a + 1)), 1e-11)
    nu, x = 0.3 + 1.1j, 7.5
    rec = specfun.bessel_j(nu - 1, x) + specfun.bessel_j(nu + 1, x) - 2 * nu / x * specfun.bessel_j(nu, x)
    yield "bessel three-term recurrence", abs(rec), 1e-11
    w = 0.3 + 0.4j
    refl = specfun.gamma(w) * specfun.gamma(1 - w) - math.pi / np.sin(math.pi * w)
    yield "gamma reflection", abs(refl), 1e-12
    yield "zeta(2) = pi^2/6", abs(specfun.riemann_zeta(2) - math.pi**2 / 6), 1e-13


def _maps(rows):
    xs = np.linspace(0.011, 0.989, 400)
    worst = max(abs(maps.fibonacci_apply(float(x)) - maps.fibonacci_by_iteration(float(x))[0]) for x in xs)
    yield "fibonacci closed form vs iteration", worst, 1e-10
    worst = max(max(r.gauss_discrepancy, r.fibonacci_discrepancy) for r in maps.period_dictionary_report(1.3, 8))
    yield "period dictionary, restricted reading, n <= 8", worst, 1e-12
    yield "farey partition at q = 0 counts 2^n", abs(maps.farey_partition(10, 0) - 1024), 0.0


def _fareytree(rows):
    bad = 0
    for n, row in enumerate(fareytree.iter_rows(rows), start=1):
        bad += len(row) != 2 ** (n - 1)
        for node in row:
            m = node.matrix
            lo, hi = node.parents
            bad += (node.a, node.b) != (lo.numerator + hi.numerator, lo.denominator + hi.denominator)
            bad += m[0] * m[3] - m[1] * m[2] != 1
            bad += sum(node.cf.digits) - 1 != n
            bad += fareytree.word_trace(fareytree.mirror_word(node.word)) != node.trace_T
            bad += (node.trace_T == 2) != (Fraction(node.a, node.b) == Fraction(1, n + 1))
    yield f"row structure, rows <= {rows}", float(bad), 0.0
    yield "Lambda_2(1)", abs(fareytree.lambda_n(2, 1) - 2 / math.sqrt(5) * 2 / (3 + math.sqrt(5))), 1e-12
    yield "Xi_1(1)", abs(fareytree.xi_n(1, 1) - (1 + (math.sqrt(2) - 1) ** 2)), 1e-12


def _operators(rows):
    n = 64
    c = 0.5 * (-0.5) ** np.arange(n)
    a = operators.q_matrix(1, 1, n).entries
    yield "Q_{1,1} fixes 1/(1+x), 24 coefficients", float(np.max(np.abs((a @ c - c)[:24]))), 1e-10
    ev = np.sort_complex(np.linalg.eigvals(operators.p1_matrix(1, 30).entries))
    want = np.sort_complex(np.array([(-1) ** k * maps.ALPHA ** (2 * (1 + k)) for k in range(30)], dtype=complex))
    yield "P1 spectrum", float(np.max(np.abs(ev - want)[-6:])), 1e-12
    worst = 0.0
    for q, z in ((1, 0.5), (0.8, -0.3), (1.2, 1)):
        t = [operators.trace_q(q, z, m, order=40) for m in ("matrix", "orbits", "integral")]
        worst = max(worst, abs(t[0] - t[1]), abs(t[1] - t[2]), abs(t[0] - t[2]))
    yield "trace by three routes", worst, 1e-8


def _fredholm(rows):
    rng = np.random.default_rng(7)
    worst = 0.0
    for _ in range(3):
        q = complex(rng.uniform(0.6, 2), rng.uniform(-2, 2))
        z = complex(rng.uniform(-0.8, 0.8), rng.uniform(-0.4, 0.4))
        a = operators.q_matrix(q, z, 24).entries
        lhs = fredholm.det_of(a, "minus") * fredholm.det_of(a, "plus")
        rhs = np.linalg.det(np.eye(24) - a @ a)
        worst = max(worst, abs(lhs - rhs) / max(1.0, abs(rhs)))
    yield "det(1-A)det(1+A) = det(1-A^2)", worst, 1e-12
    yield "|det(1 - Q_{1,1})|, N = 24", abs(fredholm.det_one_minus("minus", 1, 1, 24).value), 1e-6
    yield "1 / |det(1 + Q_{1,1})|, N = 24", 1 / abs(fredholm.det_one_minus("plus", 1, 1, 24).value), 10.0
    lam = fredholm.spectrum(operators.q_matrix(1, 1, 40), 2).eigenvalues
    yield "GKW level", abs(abs(lam[1]) - 0.3036630028987), 1e-6


def _zeta(rows):
    det = zeta.selberg_z(2, 0.5, 32).value
    yield "Selberg determinant vs Lambda series", abs(det - zeta.lambda_series_z(2, 0.5, 18).value), 1e-6
    q, z = 0.7 + 0.5j, 0.4 - 0.2j
    lhs = zeta.ruelle_zeta(q, z).value * zeta.selberg_z(q, z).value
    rhs = (fredholm.det_one_minus("plus", q + 1, z).value * fredholm.det_one_minus("plus", q, z).value / (1 - z))
    yield "zeta * Z product identity", abs(lhs - rhs), 1e-10
    zeros = zeta.find_zeros((0.25 + 6.5j, 0.25 + 7.5j), "det_minus", 1, 24)
    rz = zeta.riemann_zero_near(14.13)
    miss = abs(zeros[0].location - rz / 2) if len(zeros) == 1 else math.inf
    yield "zero at half the first Riemann zero", miss, 1e-3


def _eigenfun(rows):
    worst = max(eigenfun.lewis_residual(lambda x, q=q: eigenfun.fq_minus(q, x), q, 1, 2.3) for q in (0.75, 1.3, 0.6 + 2j))
    yield "Lewis residual of f_q^-", worst, 1e-12
    yield "Lewis residual of 1/x at q = 1", eigenfun.lewis_residual(lambda x: 1 / x, 1, 1, 1.1), 1e-14
    h0, h1, res = eigenfun.decomposition_check(lambda x: 1 / x, 1, 1, np.linspace(0.2, 3, 7))
    yield "1/x = 1/(1+x) + 1/(x(x+1))", float(np.max(res)), 1e-14
    worst = 0.0
    for n in range(11):
        want = eigenfun.bq_laguerre_closed_form(n, 1, 0.5)
        got = eigenfun.bq_transform(lambda t, n=n: eigenfun.laguerre_e(n, 1, t), 1, 0.5)
        worst = max(worst, abs(got - want) / abs(want))
    yield "B_q of Laguerre polynomials", worst, 1e-8


SUITES = {
    "specfun": _specfun,
    "maps": _maps,
    "fareytree": _fareytree,
    "operators": _operators,
    "fredholm": _fredholm,
    "zeta": _zeta,
    "eigenfun": _eigenfun,
}


def run(suites=None, rows: int = 14) -> dict:
    names = list(SUITES) if not suites else suites
    report = {"suites": {}, "passed": True}
    for name in names:
        t0 = time.perf_counter()
        entries = []
        try:
            for label, residual, tol in SUITES[name](rows):
                ok = bool(residual <= tol)
                entries.append({"invariant": label, "residual": float(residual), "tol": tol, "passed": ok})
        except Exception as exc:  # a crashing suite is a failed suite
            entries.append({"invariant": "suite raised", "error": f"{type(exc).__name__}: {exc}", "passed": False})
        report["suites"][name] = {"checks": entries, "seconds": round(time.perf_counter() - t0, 3)}
        report["passed"] &= all(e["passed"] for e in entries)
    return report
