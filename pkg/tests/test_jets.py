"""Taylor-jet arithmetic: seeded expansions, calculus rules, domain guards."""

import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from bicontact import jets
from bicontact.errors import DomainError
from bicontact.jets import Jet


def test_constant_and_variable_seeds():
    c = Jet.constant(2.5, 3, 4)
    assert c.value == 2.5
    assert c.coeff((1, 0, 0)) == 0.0
    x = Jet.variable(1.5, 0, 3, 4)
    assert x.value == 1.5
    assert x.coeff((1, 0, 0)) == 1.0
    assert x.coeff((0, 1, 0)) == 0.0


def test_exp_coefficients_are_inverse_factorials():
    x = Jet.variable(0.0, 0, 1, 8)
    e = jets.exp(x)
    for k in range(9):
        assert e.coeff((k,)) == pytest.approx(1.0 / math.factorial(k), abs=1e-15)


def test_product_matches_double_angle():
    x = Jet.variable(0.3, 0, 1, 7)
    lhs = jets.sin(x) * jets.cos(x)
    rhs = jets.sin(x * 2.0) * 0.5
    for k in range(8):
        assert lhs.coeff((k,)) == pytest.approx(rhs.coeff((k,)), abs=1e-14)


def test_partial_of_monomial():
    # f = x^2 y  ->  df/dx = 2xy with matching higher coefficients
    x = Jet.variable(1.2, 0, 2, 5)
    y = Jet.variable(-0.7, 1, 2, 5)
    f = x * x * y
    fx = jets.partial(f, 0)
    assert fx.value == pytest.approx(2 * 1.2 * -0.7, abs=1e-14)
    assert fx.coeff((1, 0)) == pytest.approx(2 * -0.7, abs=1e-14)
    assert fx.coeff((0, 1)) == pytest.approx(2 * 1.2, abs=1e-14)
    assert fx.order == 4     # one derivative level spent


def test_truncate_is_prefix():
    x = Jet.variable(0.4, 0, 2, 6)
    f = jets.exp(x * x)
    g = f.truncate(3)
    assert g.order == 3
    for alpha in ((0, 0), (1, 0), (2, 0), (0, 1)):
        assert g.coeff(alpha) == f.coeff(alpha)


def test_mixed_order_arithmetic_truncates():
    a = Jet.variable(0.2, 0, 2, 6)
    b = Jet.variable(0.5, 1, 2, 3)
    assert (a * b).order == 3
    assert (a + b).order == 3


def _rand_jet(rng, dim=2, order=3):
    n = jets.ncoeffs(dim, order)
    return Jet(dim, order, rng.standard_normal(n))


def test_ring_axioms_random():
    rng = np.random.default_rng(11)
    for _ in range(25):
        a, b, c = (_rand_jet(rng) for _ in range(3))
        lhs = (a * b) * c
        rhs = a * (b * c)
        assert np.allclose(lhs.c, rhs.c, atol=1e-12)
        assert np.allclose((a * (b + c)).c, (a * b + a * c).c, atol=1e-12)
        assert np.allclose((a * b).c, (b * a).c, atol=1e-12)


@given(st.floats(-2.0, 2.0), st.floats(-2.0, 2.0))
@settings(max_examples=60, deadline=None)
def test_chain_rule_matches_closed_form(x0, y0):
    """d/dx of sin(x*y) equals y*cos(x*y) at the jet level."""
    x = Jet.variable(x0, 0, 2, 4)
    y = Jet.variable(y0, 1, 2, 4)
    f = jets.sin(x * y)
    fx = jets.partial(f, 0)
    want = y * jets.cos(x * y)
    assert abs(fx.value - want.value) < 1e-12
    assert abs(fx.coeff((1, 0)) - want.coeff((1, 0))) < 1e-10


@pytest.mark.parametrize("fn,bad", [
    (jets.sqrt, -1.0), (jets.ln, 0.0), (jets.ln, -2.0),
    (jets.reciprocal, 0.0), (jets.csc, 0.0), (jets.cot, 0.0),
])
def test_domain_errors(fn, bad):
    with pytest.raises(DomainError):
        fn(Jet.constant(bad, 1, 3))


def test_powf_domain_error():
    with pytest.raises(DomainError):
        jets.powf(Jet.constant(-1.0, 1, 3), 0.5)


def test_atan2_recovers_angle():
    t = Jet.variable(0.7, 0, 1, 5)
    angle = jets.atan2(jets.sin(t), jets.cos(t))
    for k in range(6):
        assert angle.coeff((k,)) == pytest.approx(
            t.coeff((k,)), abs=1e-12)


def test_atan2_left_half_plane():
    t = Jet.variable(2.9, 0, 1, 4)    # cos < 0 branch
    angle = jets.atan2(jets.sin(t), jets.cos(t))
    assert angle.value == pytest.approx(2.9, abs=1e-12)


def test_sqrt_squares_back():
    rng = np.random.default_rng(5)
    for _ in range(10):
        f = _rand_jet(rng, dim=2, order=4)
        f = f * f + 1.0     # strictly positive at the base point
        r = jets.sqrt(f)
        assert np.allclose((r * r).c, f.c, atol=1e-10)


def test_jet_matrix_inverse():
    rng = np.random.default_rng(7)
    dim, order = 2, 3
    mat = [[_rand_jet(rng, dim, order) for _ in range(3)] for _ in range(3)]
    for i in range(3):
        mat[i][i] = mat[i][i] + 5.0      # well-conditioned
    inv = jets.jet_matrix_inverse(mat)
    for i in range(3):
        for j in range(3):
            acc = Jet.constant(0.0, dim, order)
            for k in range(3):
                acc = acc + mat[i][k] * inv[k][j]
            want = 1.0 if i == j else 0.0
            assert abs(acc.value - want) < 1e-12
