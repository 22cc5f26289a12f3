"""Selberg and Ruelle zeta functions: determinant formulas, orbit series, zeros."""

from __future__ import annotations

import cmath
import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from . import fareytree
from .errors import DomainError, InconclusiveWinding, NonConvergence, PoleWarning
from .fredholm import DEFAULT_ORDER, det_one_minus
from .maps import farey_partition
from .specfun import as_complex, hurwitz_zeta

GOLDEN = (1 + math.sqrt(5)) / 2
POLE_THRESHOLD = 1e-8


@dataclass(frozen=True)
class ZetaValue:
    value: complex
    method: str
    terms: int
    est_error: float
    diagnostics: dict = field(default_factory=dict)


@dataclass(frozen=True)
class ZeroRecord:
    location: complex
    which: str
    parity_label: str
    winding: int
    order_used: int
    residual: float = 0.0


PARITY = {"det_minus": "even", "det_plus": "odd"}


# ---------------------------------------------------------------------------
# determinant formulas


def selberg_z(q, z, order: int = DEFAULT_ORDER, *, continuation: bool = False) -> ZetaValue:
    """Z(q, z) = det(1 - Q_{q,z}) det(1 + Q_{q,z})."""
    minus = det_one_minus("minus", q, z, order, continuation=continuation)
    plus = det_one_minus("plus", q, z, order, continuation=continuation)
    err = abs(minus.value) * plus.cauchy_error + abs(plus.value) * minus.cauchy_error
    return ZetaValue(minus.value * plus.value, "det", order, err,
                     {"det_minus": minus.value, "det_plus": plus.value})


def ruelle_zeta(q, z, order: int = DEFAULT_ORDER) -> ZetaValue:
    """zeta(q, z) = (1 - z)^{-1} det(1 + Q_{q+1,z}) / det(1 - Q_{q,z}).

    Emits PoleWarning when |det(1 - Q_{q,z})| drops below POLE_THRESHOLD.
    """
    q = as_complex(q)
    z = as_complex(z)
    if z == 1:
        raise DomainError("zeta(q, 1) is not given by the determinant ratio; see ruelle_limit_at_one")
    if q.real <= 0:
        raise DomainError("needs Re(q) > 0")
    den = det_one_minus("minus", q, z, order)
    num = det_one_minus("plus", q + 1, z, order)
    if abs(den.value) < POLE_THRESHOLD:
        warnings.warn(f"|det(1 - Q)| = {abs(den.value):.2e}: close to a pole of zeta", PoleWarning, stacklevel=2)
    value = num.value / (den.value * (1 - z))
    rel = num.cauchy_error / max(abs(num.value), 1e-300) + den.cauchy_error / max(abs(den.value), 1e-300)
    return ZetaValue(value, "det", order, abs(value) * rel, {"det_minus": den.value, "det_plus_shifted": num.value})


def ruelle_pole_in_z(q: float, bracket: tuple[float, float], order: int = DEFAULT_ORDER, tol: float = 1e-12) -> float:
    """Real z where 1/zeta(q, z) vanishes, for real q.

    Located as a sign change of 1/zeta, never through the determinant zero directly.
    """
    from scipy.optimize import brentq

    def inv(zr):
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", PoleWarning)
            return (1.0 / ruelle_zeta(q, zr, order).value).real

    return float(brentq(inv, *bracket, xtol=tol, rtol=4 * np.finfo(float).eps))


def ruelle_limit_at_one(q, h0: float = 0.05, levels: int = 6, order: int = 32) -> ZetaValue:
    """Experimental: Richardson extrapolation of zeta(q, 1 - h) as h -> 0.

    With the factor (1 - z)^{-1} the values grow like 1/h, so the extrapolation
    only settles if the determinant ratio vanishes at z = 1.  Raises
    NonConvergence otherwise; the diagnostics carry the regularised limit
    of (1 - z) zeta(q, z).
    """
    q = as_complex(q)
    if q.real <= 1:
        raise DomainError("the limit is only considered for Re(q) > 1")
    hs = [h0 / 2**k for k in range(levels)]
    vals = [ruelle_zeta(q, 1 - h, order).value for h in hs]
    table = [vals]
    for k in range(1, levels):
        prev = table[-1]
        table.append([(2**k * prev[i + 1] - prev[i]) / (2**k - 1) for i in range(len(prev) - 1)])
    est = table[-1][0]
    err = abs(table[-1][0] - table[-2][-1])
    regular = det_one_minus("plus", q + 1, 1, order).value / det_one_minus("minus", q, 1, order).value
    diag = {"samples": list(zip(hs, vals)), "regularised": regular, "experimental": True}
    if not math.isfinite(err) or err > 1e-6 * max(1.0, abs(est)):
        raise NonConvergence(f"zeta(q, 1 - h) does not settle as h -> 0 (last change {err:.2e}); "
                             f"(1 - z) zeta -> {regular:.10g}")
    return ZetaValue(est, "det", order, err, diag)


# ---------------------------------------------------------------------------
# series routes


def _exp_series(coeffs, z: complex, sign: float) -> tuple[complex, float]:
    s = sum(z**n * c / n for n, c in enumerate(coeffs, start=1))
    value = cmath.exp(sign * s)
    # truncation: assume geometric decay of the last two terms
    t = [abs(z**n * c / n) for n, c in enumerate(coeffs, start=1)]
    err = t[-1]
    if len(t) > 1 and t[-2] > 0 and t[-1] < t[-2]:
        r = t[-1] / t[-2]
        err = t[-1] * r / (1 - r)
    return value, abs(value) * err


def lambda_series_z(q, z, n_max: int = 18) -> ZetaValue:
    """exp(-sum_{n<=n_max} z^n Lambda_n(q)/n) over the Farey tree rows."""
    q, z = as_complex(q), as_complex(z)
    coeffs = [fareytree.lambda_n(n, q) for n in range(1, n_max + 1)]
    value, err = _exp_series(coeffs, z, -1.0)
    return ZetaValue(value, "farey_series", n_max, err)


def xi_series_z(q, z, n_max: int = 18) -> ZetaValue:
    """exp(sum_{n<=n_max} z^n Xi_n(q)/n), graded by tree rank."""
    q, z = as_complex(q), as_complex(z)
    coeffs = [fareytree.xi_n(n, q) for n in range(1, n_max + 1)]
    value, err = _exp_series(coeffs, z, 1.0)
    return ZetaValue(value, "farey_series", n_max, err)


def farey_orbit_zeta(q, z, n_max: int = 12, extra: int = 10) -> ZetaValue:
    """exp(sum_{n<=n_max} z^n Z_n(q, F)/n), graded by Farey period.

    The error estimate is the effect of ``extra`` further terms (capped at period 22),
    plus a geometric bound on what follows them.
    """
    q, z = as_complex(q), as_complex(z)
    n_ext = min(n_max + extra, max(n_max, 22))
    coeffs = [farey_partition(n, q) for n in range(1, n_ext + 1)]
    value, _ = _exp_series(coeffs[:n_max], z, 1.0)
    if n_ext > n_max:
        longer, rest = _exp_series(coeffs, z, 1.0)
        err = abs(longer - value) + rest
    else:
        err = _exp_series(coeffs, z, 1.0)[1]
    return ZetaValue(value, "orbit_series", n_max, err)


def _gauss_period_sum(length: int, q: complex, digit_cap: int, prune: float) -> tuple[complex, float, float, int]:
    """Sum of Lambda^{-q}/(1 - Lambda^{-1}) over digit words of the given even length.

    Lambda = |(G^length)'| at the fixed point.  A partial word with matrix
    (a b; c d) has every extension's trace at least d times the product of the
    remaining digits, and Lambda >= (trace/2)^2, so a subtree is bounded by
    4^s d^{-2s} zeta(2s)^rest / (1 - golden^{-4}) with s = Re q.  Subtrees under
    ``prune`` are dropped and their bounds summed.  Returns
    (value, pruned bound, digit-cap bound, words summed).
    """
    s = q.real
    zeta2s = hurwitz_zeta(2 * s, 1).real
    c0 = 4.0**s / (1 - GOLDEN**-4)
    # start with the identity; multiply by (0 1; 1 a) on the right
    a = np.ones(1)
    b = np.zeros(1)
    c = np.zeros(1)
    d = np.ones(1)
    pruned = 0.0
    capped = 0.0
    for depth in range(length):
        rest = length - depth - 1
        scale = c0 * zeta2s**rest
        # largest digit whose subtree bound scale*(c + d a)^{-2s} stays above prune
        amax = np.floor(((scale / prune) ** (1 / (2 * s)) - c) / d)
        amax = np.minimum(amax, digit_cap).astype(np.int64)
        lost = np.maximum(amax, 0)
        # sum_{a > A} (d a)^{-2s} <= d^{-2s} A^{1-2s}/(2s-1), with A >= 1
        beyond = scale * d ** (-2 * s) * np.maximum(lost, 1) ** (1 - 2 * s) / (2 * s - 1)
        at_cap = amax >= digit_cap
        pruned += float(beyond[~at_cap].sum())
        capped += float(beyond[at_cap].sum())
        keep = amax >= 1
        a, b, c, d, amax = a[keep], b[keep], c[keep], d[keep], amax[keep]
        if not len(a):
            return 0j, pruned, capped, 0
        counts = amax
        idx = np.repeat(np.arange(len(a)), counts)
        offsets = np.cumsum(counts) - counts
        digit = (np.arange(idx.size) - np.repeat(offsets, counts) + 1).astype(float)
        if idx.size > 20_000_000:
            raise NonConvergence("orbit enumeration too large; raise prune or lower digit_cap")
        a, b, c, d = b[idx], a[idx] + b[idx] * digit, d[idx], c[idx] + d[idx] * digit
    tr = a + d
    lam = (tr + np.sqrt(tr * tr - 4)) / 2
    big = lam * lam
    w = np.exp(-q * np.log(big)) / (1 - 1 / big)
    return complex(w.sum()), pruned, capped, int(tr.size)


def orbit_series_z(q, z, n_max: int = 6, digit_cap: int = 40, prune: float = 1e-14) -> ZetaValue:
    """exp(-sum_{n<=n_max} z^n S_{2n}(q)/n) from periodic Gauss orbits of even period.

    S_{2n} sums Lambda^{-q}/(1 - Lambda^{-1}) over period-2n digit words with
    digits <= digit_cap.  The reported error adds the pruning and digit-cap
    bounds and an estimate of the terms beyond n_max.
    """
    q, z = as_complex(q), as_complex(z)
    if q.real < 1:
        raise DomainError("the orbit series is only used for Re(q) >= 1")
    coeffs = []
    bound = 0.0
    diag = {"pruned": [], "capped": [], "words": []}
    for n in range(1, n_max + 1):
        v, pr, cp, cnt = _gauss_period_sum(2 * n, q, digit_cap, prune)
        coeffs.append(v)
        bound += abs(z) ** n / n * (pr + cp)
        diag["pruned"].append(pr)
        diag["capped"].append(cp)
        diag["words"].append(cnt)
    value, trunc = _exp_series(coeffs, z, -1.0)
    diag["digit_tail"] = sum(diag["capped"])
    return ZetaValue(value, "orbit_series", n_max, trunc + abs(value) * bound, diag)


# ---------------------------------------------------------------------------
# grading comparison


def grading_report(q=2.0, n_max: int = 6, digit_cap: int = 40, zs=(1.0, 0.5), order: int = 32) -> dict:
    """Tables comparing the three Ruelle gradings and the two Selberg gradings.

    Only the Selberg comparison at z = 1 carries a pass/fail flag (tolerance 1e-4);
    every other row is informational.
    """
    q = as_complex(q)
    rows = []
    for n in range(1, n_max + 1):
        xi = fareytree.xi_n(n, q)
        zf = farey_partition(n, q)
        rows.append({"n": n, "xi_n": xi, "Z_n_farey": zf, "difference": abs(xi - zf)})
    selberg = []
    ruelle = []
    for z in zs:
        z = as_complex(z)
        det = selberg_z(q, z, order)
        orb = orbit_series_z(q, z, n_max, digit_cap)
        lam = lambda_series_z(q, z, 18)
        row = {"z": z, "determinant": det.value, "orbit_series": orb.value, "orbit_error": orb.est_error,
               "lambda_series": lam.value, "orbit_vs_det": abs(orb.value - det.value),
               "lambda_vs_det": abs(lam.value - det.value)}
        if z == 1:
            row["required_tol"] = 1e-4
            row["passed"] = row["orbit_vs_det"] < 1e-4
        selberg.append(row)
        if z != 1:
            ruelle.append({"z": z, "determinant": ruelle_zeta(q, z, order).value,
                           "xi_series": xi_series_z(q, z, 18).value,
                           "farey_period_series": farey_orbit_zeta(q, z, 14).value})
    return {"q": q, "xi_vs_farey": rows, "selberg": selberg, "ruelle": ruelle}


# ---------------------------------------------------------------------------
# zeros


def _det_fn(which: str, z: complex, order: int):
    if which not in PARITY:
        raise DomainError(f"which must be det_minus or det_plus, got {which!r}")
    sign = "minus" if which == "det_minus" else "plus"

    def f(q):
        return det_one_minus(sign, q, z, order, continuation=True, step=1).value

    return f


def _winding(f, corners, samples: int, threshold: float):
    """Total change of arg f around the closed polygon, refined where the phase jumps."""
    perim = [abs(corners[(i + 1) % 4] - corners[i]) for i in range(4)]
    total = sum(perim)
    pts = []
    for i in range(4):
        m = max(4, int(round(samples * perim[i] / total)))
        p0, p1 = corners[i], corners[(i + 1) % 4]
        pts.extend(p0 + (p1 - p0) * k / m for k in range(m))
    pts.append(pts[0])
    vals = [f(p) for p in pts]
    scale = max(abs(v) for v in vals)

    def check(v):
        if abs(v) < threshold * max(scale, 1e-300):
            raise InconclusiveWinding(f"|det| = {abs(v):.2e} on the contour")

    for v in vals:
        check(v)
    darg = 0.0
    centroid = 0j

    def segment(p0, v0, p1, v1, depth):
        step = cmath.phase(v1 / v0)
        if abs(step) > 0.5 and depth < 14:
            pm = (p0 + p1) / 2
            vm = f(pm)
            check(vm)
            a1, c1 = segment(p0, v0, pm, vm, depth + 1)
            a2, c2 = segment(pm, vm, p1, v1, depth + 1)
            return a1 + a2, c1 + c2
        if abs(step) > 0.5:
            raise InconclusiveWinding("phase jump did not resolve under refinement")
        dlog = cmath.log(v1 / v0)
        return step, (p0 + p1) / 2 * dlog

    for i in range(len(pts) - 1):
        a_, c_ = segment(pts[i], vals[i], pts[i + 1], vals[i + 1], 0)
        darg += a_
        centroid += c_
    w = darg / (2 * math.pi)
    n = int(round(w))
    if abs(w - n) > 0.1:
        raise InconclusiveWinding(f"winding {w:.3f} is not near an integer")
    loc = centroid / (2j * math.pi * n) if n else None
    return n, loc


def _secant(f, x0: complex, x1: complex, tol: float = 1e-13, max_iter: int = 60) -> complex:
    f0, f1 = f(x0), f(x1)
    for _ in range(max_iter):
        if f1 == f0:
            break
        x2 = x1 - f1 * (x1 - x0) / (f1 - f0)
        x0, f0 = x1, f1
        x1, f1 = x2, f(x2)
        if abs(x1 - x0) < tol * max(1.0, abs(x1)):
            return x1
    raise NonConvergence("secant refinement of a zero did not converge")


def find_zeros(segment, which: str = "det_minus", z=1.0, order: int = DEFAULT_ORDER, width: float = 0.1,
               samples: int = 200, step: int = 12, max_height: float = 0.5,
               threshold: float = 1e-10) -> list[ZeroRecord]:
    """Zeros in q of det(1 - Q_{q,z}) (det_minus) or det(1 + Q_{q,z}) (det_plus).

    The segment q0 -> q1 is covered by rectangles of length at most max_height
    and the given width.  A rectangle's winding number must agree at orders N
    and N + step; nonzero windings are then refined by secant iteration at the
    larger order, starting from the contour centroid.
    """
    q0, q1 = (as_complex(v) for v in segment)
    z = as_complex(z)
    length = abs(q1 - q0)
    if length == 0:
        raise DomainError("empty segment")
    u = (q1 - q0) / length
    nrm = 1j * u * width / 2
    pieces = max(1, math.ceil(length / max_height - 1e-12))
    f_lo = _det_fn(which, z, order)
    f_hi = _det_fn(which, z, order + step)
    out = []
    for k in range(pieces):
        a = q0 + u * length * k / pieces
        b = q0 + u * length * (k + 1) / pieces
        corners = [a - nrm, b - nrm, b + nrm, a + nrm]
        n_lo, _ = _winding(f_lo, corners, samples, threshold)
        n_hi, loc = _winding(f_hi, corners, samples, threshold)
        if n_lo != n_hi:
            raise InconclusiveWinding(f"winding changed from {n_lo} to {n_hi} between orders "
                                      f"{order} and {order + step}")
        if n_hi < 0:
            raise InconclusiveWinding("negative winding: a pole inside the contour")
        if n_hi == 0:
            continue
        if n_hi == 1:
            root = _secant(f_hi, loc, loc + 1e-4 * width)
            inside = _inside(root, corners)
            if not inside:
                raise NonConvergence("secant iteration left the rectangle")
        else:
            root = loc
        out.append(ZeroRecord(root, which, PARITY[which], n_hi, order + step, abs(f_hi(root))))
    return sorted(out, key=lambda r: (r.location.imag, r.location.real))


def _inside(p: complex, corners) -> bool:
    signs = []
    for i in range(4):
        e = corners[(i + 1) % 4] - corners[i]
        r = p - corners[i]
        signs.append((e.conjugate() * r).imag)
    return all(s >= 0 for s in signs) or all(s <= 0 for s in signs)


def riemann_zero_near(t_guess: float, tol: float = 1e-13) -> complex:
    """Zero of zeta_R near 1/2 + i t_guess, by secant iteration in s."""
    from .specfun import riemann_zeta

    return _secant(riemann_zeta, complex(0.5, t_guess), complex(0.5, t_guess + 1e-3), tol)
