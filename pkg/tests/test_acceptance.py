"""Acceptance criteria, one test each.

Every test prints a single PASS/FAIL line with the measured quantity and the
tolerance; run with ``pytest tests/test_acceptance.py -s`` to see them.
"""

import math
import warnings
from fractions import Fraction

import mpmath as mp
import numpy as np

from fareyzeta import eigenfun, fareytree, fredholm, operators, zeta
from fareyzeta.errors import PoleWarning
from fareyzeta.maps import ALPHA
from oracles import gauss_density_coeffs, second_eigenvalue_by_deflation


def check(what, measured, tol, ok=None):
    return what, measured, tol, measured < tol if ok is None else ok


def report(k, *checks):
    """Print one line for criterion k covering all of its checks, then assert them."""
    ok = all(c[3] for c in checks)
    parts = "; ".join(f"{what}: measured {m:.3e}, tol {t:.1e}" for what, m, t, _ in checks)
    print(f"\n{'PASS' if ok else 'FAIL'} criterion {k}: {parts}")
    assert ok, f"criterion {k}: " + "; ".join(f"{c[0]} ({c[1]} vs {c[2]})" for c in checks if not c[3])


def test_criterion_01_gauss_density_is_fixed():
    c = gauss_density_coeffs(64)
    img = operators.q_matrix(1, 1, 64).apply(c)
    report(1, check("Q_{1,1} fixes 1/(1+x), first 24 coefficients", float(np.max(np.abs(img[:24] - c[:24]))), 1e-10))


def test_criterion_02_p1_spectrum():
    worst = 0.0
    for q in (1, 0.7 + 0.3j):
        ev = np.linalg.eigvals(operators.p1_matrix(q, 30).entries)
        for k in range(6):
            want = (-1) ** k * np.exp(2 * (q + k) * math.log(ALPHA))
            worst = max(worst, float(np.min(np.abs(ev - want)) / abs(want)))
    report(2, check("P1 eigenvalues (-1)^k alpha^{2(q+k)}, k <= 5, N = 30, relative", worst, 1e-8))


def test_criterion_03_three_traces_agree():
    worst = 0.0
    for q, z in ((1, 0.5), (0.8, -0.3), (1.2, 1)):
        t = [operators.trace_q(q, z, m, order=40) for m in ("matrix", "orbits", "integral")]
        worst = max(worst, abs(t[0] - t[1]), abs(t[1] - t[2]), abs(t[0] - t[2]))
    report(3, check("matrix, fixed-point and Bessel-integral traces", worst, 1e-8))


def test_criterion_04_determinant_identities():
    rng = np.random.default_rng(20240)
    worst = 0.0
    for _ in range(3):
        q = complex(rng.uniform(0.6, 2.5), rng.uniform(-3, 3))
        z = complex(rng.uniform(-0.9, 0.9), rng.uniform(-0.3, 0.3))
        a = operators.q_matrix(q, z, 24).entries
        rhs = fredholm.det_of(a @ a, "minus")
        worst = max(worst, abs(fredholm.det_of(a, "minus") * fredholm.det_of(a, "plus") - rhs) / max(1, abs(rhs)))
    diff = abs(zeta.selberg_z(2, 0.5).value - zeta.lambda_series_z(2, 0.5, 18).value)
    report(
        4,
        check("det(1-Q) det(1+Q) = det(1-Q^2) at three random points", worst, 1e-12),
        check("Z(2, 0.5) from determinants vs Farey-tree series, n_max = 18", diff, 1e-6),
    )


def test_criterion_05_zero_at_q_one():
    dm = abs(fredholm.det_one_minus("minus", 1, 1, 24).value)
    dp = abs(fredholm.det_one_minus("plus", 1, 1, 24).value)
    report(
        5,
        check("|det(1 - Q_{1,1})| at N = 24", dm, 1e-6),
        check("|det(1 + Q_{1,1})| must exceed", dp, 0.1, ok=dp > 0.1),
    )


def test_criterion_06_gkw_level():
    _, oracle = second_eigenvalue_by_deflation(operators.q_matrix(1, 1, 60).entries)
    got = fredholm.spectrum(operators.q_matrix(1, 1, 30), 2)[1]
    report(
        6,
        check("second eigenvalue at N = 30 vs N = 60 deflation", abs(got - oracle), 1e-6),
        check("its modulus vs 0.3036630", abs(abs(got) - 0.3036630), 1e-6),
    )


def test_criterion_07_pressure_zero_and_pole():
    zc = fredholm.leading_eigenvalue_unit_crossing(0.9, (0.5, 0.99))
    zd = fredholm.det_zero_in_z(0.9, (0.5, 0.99))
    zp = zeta.ruelle_pole_in_z(0.9, (0.9, 0.99))
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", PoleWarning)
        blow_up = abs(zeta.ruelle_zeta(0.9, zp).value)
    spread = max(zc, zd, zp) - min(zc, zd, zp)
    z1 = fredholm.leading_eigenvalue_unit_crossing(1.0, (0.5, 1.0), order=40)
    report(
        7,
        check(f"q = 0.9 crossing {zc:.10f}, det zero, Ruelle pole (|zeta| = {blow_up:.1e}) spread", spread, 1e-6),
        check("q = 1 unit crossing vs z = 1 at N = 40", abs(z1 - 1), 1e-8),
    )


def test_criterion_08_pole_at_half():
    qs = (0.51, 0.505, 0.502, 0.501)
    scaled = {n: [(q - 0.5) * fredholm.det_one_minus("minus", q, 1, n).value for q in qs] for n in (30, 40)}
    # linear extrapolation in q - 1/2 from the two points closest to the pole
    limit = {n: 2 * v[-1] - v[-2] for n, v in scaled.items()}
    largest = max(abs(v) for vs in scaled.values() for v in vs)
    rel = abs(limit[30] - limit[40]) / abs(limit[40])
    report(
        8,
        check("max |(q - 1/2) det(1 - Q_{q,1})| for q -> 1/2+", largest, 10.0),
        check(f"limit {limit[40].real:.6f}, relative change N = 30 vs 40", rel, 0.1, ok=rel < 0.1 and abs(limit[40]) > 0.1),
    )


def test_criterion_09_first_riemann_zero():
    zeros = zeta.find_zeros((0.25 + 6.5j, 0.25 + 7.5j), "det_minus", 1, 40, max_height=1.0)
    count = sum(r.winding for r in zeros)
    mp.mp.dps = 20
    want = complex(mp.zetazero(1)) / 2
    loc = zeros[0].location if zeros else complex("nan")
    report(
        9,
        check(f"zero count {count} in 1/4 + i[6.5, 7.5] (N = 40 and 52), off by", abs(count - 1), 0.5),
        check(f"zero {loc:.8f} vs rho_1 / 2 from mpmath", abs(loc - want), 1e-3),
        check("vs 1/4 + 7.0674i", abs(loc - (0.25 + 7.0674j)), 1e-3),
    )


def test_criterion_10_lewis_and_eigenfunctions():
    lewis = 0.0
    for q in (0.75, 1.3, 0.6 + 2j):
        for x in (0.3, 2.3, 1 + 1j):
            lewis = max(lewis, eigenfun.lewis_residual(lambda y: eigenfun.fq_minus(q, y), q, 1, x))
    lewis = max(lewis, eigenfun.lewis_residual(lambda y: 1 / y, 1, 1, 1.1))
    xs = np.linspace(0.2, 3, 7)
    h0, h1, _ = eigenfun.decomposition_check(lambda y: 1 / y, 1, 1, xs)
    split = float(max(np.max(np.abs(h0 - 1 / (1 + xs))), np.max(np.abs(h1 - 1 / (xs * (xs + 1)))),
                      np.max(np.abs(h0 + h1 - 1 / xs))))
    laguerre = 0.0
    for x in (0.5, 1.2, 0.9 + 0.3j):
        for n in range(11):
            want = eigenfun.bq_laguerre_closed_form(n, 1, x)
            got = eigenfun.bq_transform(lambda t, n=n: eigenfun.laguerre_e(n, 1, t), 1, x)
            laguerre = max(laguerre, abs(got - want) / max(abs(want), 1.0))
    report(
        10,
        check("Lewis residual, f_q^- at three q and 1/x at q = 1", lewis, 1e-12),
        check("1/x = 1/(1+x) + 1/(x(x+1))", split, 1e-14),
        check("B_q of Laguerre basis vs closed form, n <= 10", laguerre, 1e-8),
    )


def test_criterion_11_farey_tree():
    bad = 0
    for n, row in enumerate(fareytree.iter_rows(14), start=1):
        bad += len(row) != 2 ** (n - 1)
        for node in row:
            m = node.matrix
            lo, hi = node.parents
            bad += (node.a, node.b) != (lo.numerator + hi.numerator, lo.denominator + hi.denominator)
            bad += m[0] * m[3] - m[1] * m[2] != 1
            bad += sum(node.cf.digits) - 1 != n
            bad += fareytree.word_trace(fareytree.mirror_word(node.word)) != node.trace_T
            bad += (node.trace_T > 2) == (Fraction(node.a, node.b) == Fraction(1, n + 1))
    report(
        11,
        check("structural violations in rows <= 14", bad, 0.5),
        check("Lambda_2(1) vs 0.3416408", abs(fareytree.lambda_n(2, 1) - 0.3416408), 1e-7),
        check("Xi_1(1) vs 1.1715729", abs(fareytree.xi_n(1, 1) - 1.1715729), 1e-7),
    )


def test_criterion_12_grading_report():
    g = zeta.grading_report()
    assert len(g["xi_vs_farey"]) == 6 and g["ruelle"]
    worst_xi = max(r["difference"] for r in g["xi_vs_farey"])
    half = next(r for r in g["selberg"] if r["z"] == 0.5)
    one = next(r for r in g["selberg"] if r["z"] == 1)
    report(
        12,
        check("Selberg orbit series (n <= 6, digits <= 40) vs determinant at z = 1", one["orbit_vs_det"], 1e-4),
        check("report only: z = 0.5 orbit series vs determinant", half["orbit_vs_det"], math.inf),
        check("report only: Xi_n vs Farey partition", worst_xi, math.inf),
    )
