import math

import mpmath as mp
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fareyzeta import specfun
from fareyzeta.errors import DomainError, PoleError

mp.mp.dps = 30


def rel(a, b):
    return abs(complex(a) - complex(b)) / max(1e-300, abs(complex(b)))


@pytest.mark.parametrize(
    "s,a",
    [(2, 1), (1.5 + 3j, 0.7), (3.3 - 4j, 2.5 + 1j), (0.5 + 14j, 1), (-1.2 + 0.5j, 3.0), (40 + 1j, 1.5), (1.01, 1)],
)
def test_hurwitz_matches_mpmath(s, a):
    assert rel(specfun.hurwitz_zeta(s, a), mp.zeta(s, a)) < 1e-12


def test_hurwitz_pole():
    with pytest.raises(PoleError):
        specfun.hurwitz_zeta(1, 2)


def test_riemann_zeta_values():
    assert abs(specfun.riemann_zeta(2) - math.pi**2 / 6) < 1e-14
    assert abs(specfun.riemann_zeta(0) + 0.5) < 1e-13
    assert abs(specfun.riemann_zeta(complex(0.5, 14.134725141734693))) < 1e-10


@pytest.mark.parametrize(
    "z,s,a",
    [
        (0.5, 2, 1),
        (-0.3, 1.2 + 3j, 2),
        (0.95j, 2.5, 0.5 + 0.5j),
        (-1, 1.5 + 2j, 3),
        (np.exp(0.3j), 0.7 + 1j, 2),
        (0.999, 3, 34),
        (0.2 + 0.1j, -1.5, 1.3),
    ],
)
def test_lerch_matches_mpmath(z, s, a):
    assert rel(specfun.lerch_phi(z, s, a), mp.lerchphi(z, s, a)) < 1e-12


def test_lerch_at_one_is_hurwitz():
    assert rel(specfun.lerch_phi(1, 2.5 + 1j, 2), mp.zeta(2.5 + 1j, 2)) < 1e-13


def test_lerch_domain():
    with pytest.raises(DomainError):
        specfun.lerch_phi(2.0, 2, 1)
    with pytest.raises(DomainError):
        specfun.lerch_phi(1.1j, 2, 1)
    with pytest.raises(DomainError):
        specfun.lerch_phi(0.5, 2, -1)


@pytest.mark.parametrize(
    "nu,x",
    [(0, 1.0), (1, 10.0), (0.5 + 2j, 3.3), (-0.5 + 14j, 20.0), (1.5 - 1j, 45.0), (0.3, 7.9), (2.4 + 0.4j, 120.0),
     (-1, 5.0), (-1.7 + 0.3j, 12.0), (-2, 0.5)],
)
def test_bessel_matches_mpmath(nu, x):
    assert rel(specfun.bessel_j(nu, x), mp.besselj(nu, x)) < 1e-11


def test_bessel_scaled_is_entire_at_zero():
    v = specfun.bessel_j_scaled(0.4 + 1j, [0.0, 1e-8])
    assert rel(v[0], mp.rgamma(1.4 + 1j)) < 1e-14
    assert abs(v[1] - v[0]) < 1e-14


def test_gamma_pole_and_values():
    assert rel(specfun.gamma(0.5), math.sqrt(math.pi)) < 1e-14
    assert rel(specfun.gamma(3 + 4j), mp.gamma(3 + 4j)) < 1e-13
    with pytest.raises(PoleError):
        specfun.gamma(-2)


def test_pochhammer_table():
    t = specfun.pochhammer_table(2.5 + 1j, 6)
    for m in range(6):
        assert rel(t[m], mp.rf(2.5 + 1j, m)) < 1e-14


def test_series_tolerance_validation():
    with pytest.raises(ValueError):
        specfun.SeriesTolerance(abs_tol=0)
    with pytest.raises(ValueError):
        specfun.SeriesTolerance(max_terms=0)


@pytest.mark.parametrize("text,want", [("1,0", 1), ("0.25,7", 0.25 + 7j), ("2", 2), ((1, -1), 1 - 1j)])
def test_as_complex(text, want):
    assert specfun.as_complex(text) == want


def test_as_complex_rejects_nonfinite():
    with pytest.raises(DomainError):
        specfun.as_complex(float("nan"))


cplx = st.builds(complex, st.floats(-3, 3), st.floats(-3, 3))


@settings(max_examples=40, deadline=None)
@given(s_re=st.floats(1.2, 6), s_im=st.floats(-20, 20), a_re=st.floats(0.2, 4), a_im=st.floats(-2, 2))
def test_hurwitz_shift_identity(s_re, s_im, a_re, a_im):
    s, a = complex(s_re, s_im), complex(a_re, a_im)
    lhs = specfun.hurwitz_zeta(s, a) - specfun.hurwitz_zeta(s, a + 1)
    assert abs(lhs - a**-s) <= 1e-10 * max(1.0, abs(a**-s))


@settings(max_examples=40, deadline=None)
@given(r=st.floats(0.0, 1.0), theta=st.floats(0.05, 6.2), s_re=st.floats(1.1, 5), s_im=st.floats(-5, 5),
       a=st.floats(0.3, 5))
def test_lerch_shift_identity(r, theta, s_re, s_im, a):
    z = r * np.exp(1j * theta)
    s = complex(s_re, s_im)
    lhs = specfun.lerch_phi(z, s, a)
    rhs = a**-s + z * specfun.lerch_phi(z, s, a + 1)
    assert abs(lhs - rhs) <= 1e-10 * max(1.0, abs(lhs))


@settings(max_examples=40, deadline=None)
@given(nu_re=st.floats(-0.9, 4), nu_im=st.floats(-3, 3), x=st.floats(0.1, 80))
def test_bessel_recurrence(nu_re, nu_im, x):
    nu = complex(nu_re, nu_im)
    j = [specfun.bessel_j(nu + k, x) for k in (-1, 0, 1)]
    scale = max(abs(v) for v in j)
    assert abs(j[0] + j[2] - 2 * nu / x * j[1]) <= 1e-9 * scale
