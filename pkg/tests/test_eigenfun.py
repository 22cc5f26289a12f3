import mpmath as mp
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fareyzeta import eigenfun, operators
from fareyzeta.errors import DomainError

mp.mp.dps = 25


@pytest.mark.parametrize("k", [0, 1, 3, 7])
@pytest.mark.parametrize("q,x", [(1, 0.5), (0.8 + 0.4j, 1.2), (1.5, 2.0 + 0.5j)])
def test_bq_of_monomials(k, q, x):
    got = eigenfun.bq_transform(lambda t: t**k, q, x, leading_power=k)
    want = complex(mp.gamma(k + 2 * mp.mpc(q)) * mp.mpc(x) ** k)
    assert abs(got - want) < 1e-11 * abs(want)


@pytest.mark.parametrize("x", [0.5, 1.2, 0.9 + 0.3j])
def test_bq_of_laguerre_polynomials(x):
    for n in range(11):
        want = eigenfun.bq_laguerre_closed_form(n, 1, x)
        got = eigenfun.bq_transform(lambda t, n=n: eigenfun.laguerre_e(n, 1, t), 1, x)
        assert abs(got - want) <= 1e-8 * max(abs(want), 1e-300) or abs(got - want) < 1e-12


def test_laguerre_against_mpmath():
    q = 0.7 + 0.2j
    for n in (0, 1, 5, 12):
        for t in (0.3, 4.0, 17.0):
            want = complex(mp.laguerre(n, 2 * mp.mpc(q) - 1, t))
            assert abs(eigenfun.laguerre_e(n, q, t) - want) < 1e-11 * max(1, abs(want))


def test_bq_domain():
    with pytest.raises(DomainError):
        eigenfun.bq_transform(np.ones_like, 1, -1.0)
    with pytest.raises(DomainError):
        eigenfun.bq_transform(lambda t: 1 / t, 0.4, 1.0, leading_power=-1)


@pytest.mark.parametrize("q,mu", [(1, 0.3), (0.8 + 0.5j, 0.6), (1.2, 0.5 + 0.5j), (1, 2.0)])
def test_phi_bar_against_hypergeometric(q, mu):
    q, mu = mp.mpc(q), mp.mpc(mu)
    for t in (0.1, 2.0, 9.0):
        want = complex(mu * mp.hyp0f1(2 * q, t * mp.log(mu)) / mp.gamma(2 * q))
        got = complex(np.ravel(eigenfun.phi_bar(complex(q), complex(mu), t))[0])
        assert abs(got - want) < 1e-12 * max(1, abs(want))


@pytest.mark.parametrize("q,mu,x", [(1, 0.3, 0.7), (0.9 + 0.3j, 0.6, 1.5), (1.2, 1.0, 0.8)])
def test_bq_of_phi_bar_is_power(q, mu, x):
    got = eigenfun.bq_transform(lambda t: eigenfun.phi_bar(q, mu, t), q, x)
    assert abs(got - mu ** (x + 1)) < 1e-10


@pytest.mark.parametrize("q", [1, 1.3 + 0.5j, 0.8])
@pytest.mark.parametrize("t", [0.2, 3.0, 12.0])
def test_nq_of_reciprocal(q, t):
    q_m = mp.mpc(q)
    want = complex(t ** (1 - 2 * q_m) * mp.gammainc(2 * q_m - 1, 0, t))
    assert abs(eigenfun.nq_one_over_t(q, t) - want) < 1e-12 * max(1, abs(want))
    by_quadrature = operators.nq_apply(lambda s: 1 / s, q, t, leading_power=-1)
    assert abs(by_quadrature - want) < 1e-10 * max(1, abs(want))


@pytest.mark.parametrize("q", [0.75, 1.3, 0.6 + 2j])
def test_lewis_residual_of_f_minus(q):
    for x in (0.3, 2.3, 1 + 1j):
        assert eigenfun.lewis_residual(lambda y: eigenfun.fq_minus(q, y), q, 1, x) < 1e-12


def test_lewis_residual_of_reciprocal():
    assert eigenfun.lewis_residual(lambda y: 1 / y, 1, 1, 1.1) < 1e-14
    with pytest.raises(DomainError):
        eigenfun.lewis_residual(lambda y: 1 / y, 1, 1, -1.0)


def fq_plus_oracle(q, x):
    q, x = mp.mpc(q), mp.mpc(x)
    f = lambda m: mp.zeta(2 * q, m * x + 1)  # noqa: E731
    inner = mp.fsum(f(m) for m in range(1, 300)) + mp.sumem(f, [300, mp.inf])
    return complex(mp.zeta(2 * q) / 2 * (1 + x ** (-2 * q)) + inner)


@pytest.mark.parametrize("q,x", [(1.5, 0.7), (2 + 1j, 1.3), (1.2, 0.4 + 0.2j)])
def test_fq_plus_against_double_sum(q, x):
    want = fq_plus_oracle(q, x)
    assert abs(eigenfun.fq_plus(q, x) - want) < 1e-11 * abs(want)


@pytest.mark.parametrize("q", [1.5, 1.1 + 3j])
def test_fq_plus_solves_lewis(q):
    for x in (0.4, 1.7):
        f = lambda y: np.array([eigenfun.fq_plus(q, v) for v in np.ravel(y)])  # noqa: E731
        assert eigenfun.lewis_residual(f, q, 1, x) < 1e-11 * abs(eigenfun.fq_plus(q, x))


def test_fq_plus_domain():
    with pytest.raises(DomainError):
        eigenfun.fq_plus(0.9, 1.0)
    with pytest.raises(DomainError):
        eigenfun.fq_plus(1.5, -1.0)


@pytest.mark.parametrize("q,x", [(0.9, 0.8), (1.4 + 0.5j, 1.6)])
def test_representation_of_f_minus(q, x):
    form = eigenfun.EigenfunctionForm.for_fq_minus(q)
    assert abs(form(x) - eigenfun.fq_minus(q, x)) < 1e-11


@pytest.mark.parametrize("q,x", [(1.5, 0.8), (2.0 + 0.5j, 1.6)])
def test_representation_of_f_plus(q, x):
    form = eigenfun.EigenfunctionForm.for_fq_plus(q)
    want = eigenfun.fq_plus(q, x)
    assert abs(form(x) - want) < 1e-10 * abs(want)


def test_density_small_t_series():
    # for t < 2 pi the density is a power series with zeta coefficients
    q, t = 1.5, 0.9
    q_m = mp.mpf(q)
    ser = mp.zeta(2 * q_m) / 2 + mp.fsum(
        mp.bernoulli(k) / mp.factorial(k) * t ** (k - 1) * mp.zeta(2 * q_m + k - 1) for k in range(1, 40)
    )
    want = complex(ser / mp.gamma(2 * q_m))
    got = complex(np.ravel(eigenfun.fq_plus_density(q, t))[0])
    assert abs(got - want) < 1e-12


def test_decomposition_of_reciprocal():
    xs = np.linspace(0.2, 3, 7)
    h0, h1, res = eigenfun.decomposition_check(lambda y: 1 / y, 1, 1, xs)
    assert np.max(res) < 1e-14
    assert np.max(np.abs(h0 - 1 / (1 + xs))) < 1e-14
    assert np.max(np.abs(h1 - 1 / (xs * (xs + 1)))) < 1e-14


def test_correspondence_recovers_gauss_density():
    f = lambda y: 1 / y  # noqa: E731
    g = lambda y: eigenfun.correspondence_g_from_f(f, 1, 1, y)  # noqa: E731
    assert abs(g(2.0) - 1 / 3) < 1e-15
    for x in (0.5, 2.0):
        assert abs(operators.q_apply_series(g, 1, 1, x) - g(x)) < 1e-10
    assert eigenfun.correspondence_g_from_f(f, 1, 0, 2.0) == 0.5


@pytest.mark.parametrize("q", [0.8, 1.3 + 0.7j])
def test_f_minus_symmetries_and_odd_decomposition(q):
    f = lambda y: eigenfun.fq_minus(q, y)  # noqa: E731
    xs = np.array([0.3, 0.7, 1.5, 2.2, 4.0])
    assert np.max(eigenfun.eigen_residual(f, q, -1, 1, xs)) < 1e-12
    jf = operators.apply_jq(operators.ClosedFormFunction.custom(f), q, xs)
    assert np.max(np.abs(jf + f(xs))) < 1e-12
    assert abs(f(1.0)) < 1e-15
    _, _, res = eigenfun.decomposition_check(f, q, 1, xs, sign=-1)
    assert np.max(res) < 1e-10


@settings(max_examples=30, deadline=None)
@given(qr=st.floats(0.55, 3), qi=st.floats(-4, 4), x=st.floats(0.05, 10))
def test_f_minus_is_fixed_by_p_minus(qr, qi, x):
    q = complex(qr, qi)
    f = lambda y: eigenfun.fq_minus(q, y)  # noqa: E731
    scale = max(1.0, abs(eigenfun.fq_minus(q, x)), abs(x ** (-2 * q)))
    assert eigenfun.eigen_residual(f, q, -1, 1, x) < 1e-12 * scale
