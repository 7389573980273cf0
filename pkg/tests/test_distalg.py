import random
from itertools import permutations

import pytest

from core.distalg import (
    DELTA,
    HEAVISIDE,
    ONE,
    GenExpr,
    apply_linear_op_gen,
    derive_gen,
    derive_gen_multi,
    dirac,
    expand_heaviside_derivative,
    gamma_derivative,
    gamma_symbol,
    gen_mul,
    gen_normal_form,
    k_operator,
    reduce_gamma_delta,
    reduce_gamma_delta_closed,
)
from core.errors import KOperatorRangeError, UnsupportedDistributionalProduct
from core.symcore import Expr, LinearOpSpec, gamma_jet, index_directions, multi_indices, unknown_jet, zero_index

N = 2


def g(*jet):
    return gamma_derivative(tuple(jet))


def _u() -> Expr:
    return Expr.atom(unknown_jet(1, "u", zero_index(N)))


def test_derivative_of_heaviside_is_dirac_on_gamma():
    h = GenExpr.heaviside(N)
    assert derive_gen(h, 1) == GenExpr.dirac(N, 0, g(1, 0))
    assert derive_gen(GenExpr.dirac(N, 0), 2) == GenExpr.dirac(N, 1, g(0, 1))


def test_second_derivative_of_heaviside():
    expected = GenExpr(N, {DELTA: g(0, 2), dirac(1): g(0, 1) ** 2})
    assert expand_heaviside_derivative((0, 2)) == expected


def test_k_operator_values():
    assert k_operator((1, 0), 0) == g(1, 0)
    assert k_operator((1, 1), 0) == g(1, 1)
    assert k_operator((1, 1), 1) == g(1, 0) * g(0, 1)
    assert k_operator((0, 3), 2) == g(0, 1) ** 3
    assert k_operator((0, 3), 1) == (g(0, 1) * g(0, 2)).scale(3)


def test_k_operator_range():
    with pytest.raises(KOperatorRangeError):
        k_operator((0, 0), 0)
    with pytest.raises(KOperatorRangeError):
        k_operator((1, 1), 2)
    with pytest.raises(KOperatorRangeError):
        expand_heaviside_derivative((0, 0))


@pytest.mark.parametrize("n", [1, 2, 3])
def test_expansion_matches_iterated_differentiation(n):
    h = GenExpr.heaviside(n)
    for p in multi_indices(n, 4):
        if sum(p) == 0:
            continue
        assert expand_heaviside_derivative(p) == derive_gen_multi(h, p), p


def test_direction_order_does_not_matter():
    h = GenExpr.heaviside(3)
    p = (1, 1, 1)
    results = set()
    for dirs in permutations(index_directions(p)):
        out = h
        for i in dirs:
            out = derive_gen(out, i)
        results.add(out)
    assert len(results) == 1


def test_products_inside_the_calculus():
    h = GenExpr.heaviside(N)
    assert gen_mul(h, h) == h
    two = GenExpr.smooth(N, 2)
    assert gen_mul(two, GenExpr.dirac(N, 1)) == GenExpr.dirac(N, 1, 2)
    mixed = GenExpr(N, {ONE: 1, HEAVISIDE: 1})
    assert gen_mul(mixed, mixed) == GenExpr(N, {ONE: 1, HEAVISIDE: 3})
    with pytest.raises(UnsupportedDistributionalProduct):
        gen_mul(h, GenExpr.dirac(N, 0))
    with pytest.raises(UnsupportedDistributionalProduct):
        gen_mul(GenExpr.dirac(N, 0), GenExpr.dirac(N, 0))


def test_gamma_delta_rules():
    gamma = gamma_symbol(N)
    assert reduce_gamma_delta(GenExpr.dirac(N, 0, gamma)).is_zero()
    assert reduce_gamma_delta(GenExpr.dirac(N, 1, gamma)) == GenExpr.dirac(N, 0, -1)
    assert reduce_gamma_delta(GenExpr.dirac(N, 2, gamma ** 2)) == GenExpr.dirac(N, 0, 2)
    assert reduce_gamma_delta(GenExpr.dirac(N, 1, gamma ** 2)).is_zero()
    # H coefficients are left alone
    assert reduce_gamma_delta(GenExpr.heaviside(N, gamma)) == GenExpr.heaviside(N, gamma)


def test_gamma_jets_are_not_redexes():
    e = GenExpr.dirac(N, 1, g(0, 1) * g(1, 0))
    assert reduce_gamma_delta(e) == e


def _random_gen(rng: random.Random) -> GenExpr:
    zero = zero_index(N)
    pool = [gamma_jet(zero), gamma_jet((0, 1)), gamma_jet((1, 0)), unknown_jet(1, "u", zero)]
    parts = {}
    for l in range(rng.randint(1, 4)):
        monos = []
        for _ in range(rng.randint(1, 3)):
            factors = [rng.choice(pool) for _ in range(rng.randint(0, 4))]
            monos.append((rng.randint(-3, 3), factors))
        parts[dirac(l)] = Expr.from_monomials(monos)
    parts[HEAVISIDE] = Expr.from_monomials([(1, [gamma_jet(zero)])])
    return GenExpr(N, parts)


def test_reduction_is_confluent_under_random_strategies():
    rng = random.Random(7)
    for _ in range(1000):
        expr = _random_gen(rng)
        expected = reduce_gamma_delta_closed(expr)
        assert reduce_gamma_delta(expr, rng=rng) == expected
    assert reduce_gamma_delta(expr) == expected


def test_normal_form_is_idempotent():
    rng = random.Random(11)
    for _ in range(50):
        once = gen_normal_form(_random_gen(rng))
        assert gen_normal_form(once) == once


def test_linear_operator_on_heaviside():
    op = LinearOpSpec.derivative((1, 0)) + LinearOpSpec.derivative((0, 1), Expr.constant(2))
    out = apply_linear_op_gen(op, GenExpr.heaviside(N, _u()))
    u = _u()
    expected = GenExpr(N, {
        HEAVISIDE: Expr.atom(unknown_jet(1, "u", (1, 0))) + Expr.atom(unknown_jet(1, "u", (0, 1))).scale(2),
        DELTA: u * (g(1, 0) + g(0, 1).scale(2)),
    })
    assert out == expected



def test_differentiation_commutes_with_reduction():
    rng = random.Random(13)
    for _ in range(200):
        expr = _random_gen(rng)
        for i in (1, 2):
            assert gen_normal_form(derive_gen(gen_normal_form(expr), i)) == gen_normal_form(derive_gen(expr, i))
