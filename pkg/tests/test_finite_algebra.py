"""Field/ring arithmetic, traces, and character sums."""

import itertools

import numpy as np
import pytest

from qdesigns.finite_algebra import (
    GfContext,
    GrContext,
    gf_gauss_sum,
    gr_2adic,
    gr_exponential_sum,
    gr_trace,
)

TOL = 1e-9


def test_context_rejects_bad_arguments():
    with pytest.raises(ValueError):
        GfContext(4, 1)
    with pytest.raises(ValueError):
        GfContext(6, 2)
    with pytest.raises(ValueError):
        GfContext(3, 0)
    with pytest.raises(ValueError):
        GfContext(2, 17)  # 2^17 > 2^16


def test_gf2_defining_polynomial():
    # smallest primitive degree-1 polynomial over F_2 is X + 1
    ctx = GfContext(2, 1)
    assert ctx.h == (1,)
    assert sorted(e.int_label for e in ctx.elements()) == [0, 1]


def test_gf3_prime_field_trace_is_identity():
    ctx = GfContext(3, 1)
    for a in ctx.elements():
        assert a.trace() == a.int_label


def test_gf3_addition():
    ctx = GfContext(3, 1)
    two = ctx.element_from_int(2)
    assert (two + two).int_label == 1


def test_gf4_multiplication_reduces_mod_h():
    # GF(4) with h = X^2 + X + 1: X * X = X + 1
    ctx = GfContext(2, 2)
    assert ctx.h == (1, 1)
    x = ctx.element_from_coeffs((0, 1))
    assert (x * x).coeffs == (1, 1)


def test_gf9_all_nonzero_elements_are_powers_of_the_root():
    # brute-force order check: the root of h generates the 8-element group
    ctx = GfContext(3, 2)
    seen = set()
    cur = ctx.one
    for _ in range(8):
        seen.add(cur.coeffs)
        cur = cur * ctx.xi
    assert cur == ctx.one
    assert len(seen) == 8


@pytest.mark.parametrize("p,k", [(2, 2), (3, 2), (5, 1), (3, 4)])
def test_field_axioms_exhaustive(p, k):
    # commutativity and the multiplication-matrix homomorphism M_(xy) = M_x M_y
    # are checked over every pair; the homomorphism over all pairs implies
    # associativity (and linearity gives distributivity) for every triple.
    ctx = GfContext(p, k)
    els = ctx.elements()
    for a, b in itertools.product(els, repeat=2):
        assert a + b == b + a
        ab = a * b
        assert ab == b * a
        assert np.array_equal((ctx.mul_matrix(a) @ ctx.mul_matrix(b)) % p, ctx.mul_matrix(ab))
    sample = els[:: max(1, len(els) // 6)]
    for a, b, c in itertools.product(sample, repeat=3):
        assert (a + b) + c == a + (b + c)
        assert (a * b) * c == a * (b * c)
        assert a * (b + c) == a * b + a * c
    for a in els:
        if any(a.coeffs):
            assert a * a.inverse() == ctx.one
            assert a ** (p**k - 1) == ctx.one


@pytest.mark.parametrize("p,k", [(3, 2), (2, 3), (3, 4)])
def test_frobenius_is_additive(p, k):
    ctx = GfContext(p, k)
    for a, b in itertools.product(ctx.elements(), repeat=2):
        assert (a + b) ** p == a**p + b**p


@pytest.mark.parametrize("p,k", [(2, 2), (3, 2), (5, 2), (3, 3)])
def test_trace_vector_matches_power_sum(p, k):
    ctx = GfContext(p, k)
    for x in ctx.elements():
        acc = ctx.zero
        for j in range(k):
            acc = acc + x ** (p**j)
        assert acc.coeffs[1:] == (0,) * (k - 1)
        assert x.trace() == acc.coeffs[0]


def test_trace_linearity_gf9():
    ctx = GfContext(3, 2)
    for x, y in itertools.product(ctx.elements(), repeat=2):
        assert (x + y).trace() == (x.trace() + y.trace()) % 3


def test_gauss_sum_gf5():
    ctx = GfContext(5, 1)
    assert abs(gf_gauss_sum(ctx, ctx.zero) - 5) < TOL
    assert abs(gf_gauss_sum(ctx, ctx.one)) < TOL


def test_gauss_sum_gf9():
    ctx = GfContext(3, 2)
    assert abs(gf_gauss_sum(ctx, ctx.zero) - 9) < TOL
    for a in ctx.elements():
        if any(a.coeffs):
            assert abs(gf_gauss_sum(ctx, a)) < TOL


def test_gr4_is_z4():
    ctx = GrContext(1)
    assert [t.int_label for t in ctx.teichmuller] == [0, 1]
    for c in ctx.elements():
        assert gr_trace(ctx, c) == c.int_label  # m = 1: trace is the identity


def test_gr16_teichmuller_set_matches_known_values():
    # h = X^2 + X + 1 lifts untouched; T_2 = {0, 1, X, 3X + 3}
    ctx = GrContext(2)
    assert ctx.h == (1, 1)
    assert [t.coeffs for t in ctx.teichmuller] == [(0, 0), (1, 0), (0, 1), (3, 3)]


def test_gr64_teichmuller_has_eight_elements_and_x_order_7():
    ctx = GrContext(3)
    assert len(ctx.teichmuller) == 8
    assert (ctx.x**7) == ctx.one
    assert (ctx.x**1) != ctx.one


def test_gr16_trace_formula():
    # m = 2: tr(a + 2b) = a + a^2 + 2(b + b^2)
    ctx = GrContext(2)
    for c in ctx.elements():
        a, b = gr_2adic(ctx, c)
        expected = a + a * a + 2 * (b + b * b)
        assert expected.coeffs[1:] == (0,) * (ctx.m - 1)
        assert gr_trace(ctx, c) == expected.coeffs[0]


def test_gr_trace_additive():
    ctx = GrContext(2)
    for c, cp in itertools.product(ctx.elements(), repeat=2):
        assert gr_trace(ctx, c + cp) == (gr_trace(ctx, c) + gr_trace(ctx, cp)) % 4


@pytest.mark.parametrize("m", [1, 2, 3])
def test_2adic_round_trip_is_a_bijection(m):
    ctx = GrContext(m)
    seen = set()
    for c in ctx.elements():
        a, b = gr_2adic(ctx, c)
        assert a.coeffs in {t.coeffs for t in ctx.teichmuller}
        assert b.coeffs in {t.coeffs for t in ctx.teichmuller}
        assert a + 2 * b == c
        seen.add((a.coeffs, b.coeffs))
    assert len(seen) == 4**m


def test_gr16_exponential_sum_examples():
    ctx = GrContext(2)
    assert abs(gr_exponential_sum(ctx, ctx.zero) - 4) < TOL
    two = ctx.element_from_int(2)
    assert abs(gr_exponential_sum(ctx, two)) < TOL
    assert abs(abs(gr_exponential_sum(ctx, ctx.one)) - 2) < TOL


@pytest.mark.parametrize("m", [2, 3])
def test_exponential_sum_trichotomy(m):
    ctx = GrContext(m)
    two_teich = {(2 * t).coeffs for t in ctx.teichmuller}
    for x in ctx.elements():
        mag = abs(gr_exponential_sum(ctx, x))
        if not any(x.coeffs):
            assert abs(mag - 2**m) < TOL
        elif x.coeffs in two_teich:
            assert mag < TOL
        else:
            assert abs(mag - np.sqrt(2**m)) < TOL


def test_context_mismatch_raises():
    a = GfContext(3, 1).one
    b = GfContext(3, 1).one  # distinct context object
    with pytest.raises(ValueError):
        a + b


def test_inverse_of_zero_raises():
    ctx = GfContext(3, 2)
    with pytest.raises(ZeroDivisionError):
        ctx.zero.inverse()
