import random
from fractions import Fraction

import pytest

from core.errors import InconsistentJetBinding
from core.symcore import (
    Expr,
    LinearOpSpec,
    apply_linear_op,
    chi_jet,
    coeff_fn,
    coordinate,
    derivative_multi,
    expr_equal,
    index_directions,
    index_from_directions,
    multi_indices,
    normalize,
    omega_jet,
    psi_jet,
    render_operator,
    render_text,
    substitute,
    total_derivative,
    unknown_jet,
    zero_index,
)
from infra.pdemodel import parse_expression

N = 2


def u(*jet):
    return Expr.atom(unknown_jet(1, "u", tuple(jet) or zero_index(N)))


def test_canonical_form_makes_equal_polynomials_equal():
    a, b = u(), u(0, 1)
    assert expr_equal((a + b) ** 2, a * a + b * b + a * b * 2)
    assert (a - a).is_zero()
    assert Expr.constant(Fraction(1, 2)) * 2 == Expr.constant(1)


def test_total_derivative_is_leibniz_over_flat_jets():
    # D_x (u u_x) = u_x^2 + u u_xx
    e = u() * u(0, 1)
    assert total_derivative(e, 2) == u(0, 1) ** 2 + u() * u(0, 2)


def test_coordinates_differentiate_to_one_in_their_own_direction():
    t = Expr.atom(coordinate(1, "t"))
    assert total_derivative(t * u(), 1) == u() + t * u(1, 0)
    assert total_derivative(t, 2).is_zero()


def test_derivative_multi_commutes():
    e = u() ** 3 * Expr.atom(coordinate(2, "x"))
    assert derivative_multi(derivative_multi(e, (1, 0)), (0, 1)) == derivative_multi(e, (1, 1))


def test_substitute_closes_jets_of_the_ansatz():
    zero = zero_index(N)
    psi = Expr.atom(psi_jet(1, "u", zero))
    chi = Expr.atom(chi_jet(1, "u", zero))
    omega = Expr.atom(omega_jet(zero))
    out = substitute(u(0, 1), {unknown_jet(1, "u", zero): psi + chi * omega}, close_jets=True)
    assert out == derivative_multi(psi + chi * omega, (0, 1))
    assert out.terms[tuple(sorted((chi_jet(1, "u", zero), omega_jet((0, 1)))))] == 1


def test_substitute_without_closure_rejects_unbound_jets():
    with pytest.raises(InconsistentJetBinding):
        substitute(u(0, 1), {unknown_jet(1, "u", zero_index(N)): u() + 1})


def test_substitute_rejects_inconsistent_jet_bindings():
    base = unknown_jet(1, "u", zero_index(N))
    jet = unknown_jet(1, "u", (0, 1))
    x = Expr.atom(coordinate(2, "x"))
    with pytest.raises(InconsistentJetBinding):
        substitute(u(), {base: x * x, jet: x})


def test_render_text_reparses(burgers):
    e = u() * u(0, 1) - Expr.constant(Fraction(3, 4)) * u(1, 0) ** 2 + 5
    assert parse_expression(render_text(e), burgers) == e


def test_multi_index_helpers():
    assert len(multi_indices(2, 2)) == 6
    assert multi_indices(3, 1)[0] == (0, 0, 0)
    p = index_from_directions(3, [3, 1, 3])
    assert p == (1, 0, 2)
    assert index_directions(p) == [1, 3, 3]


def test_linear_operator_application_and_rendering():
    nu = Expr.constant(Fraction(1, 10))
    op = LinearOpSpec.derivative((1, 0)) + LinearOpSpec.derivative((0, 2), -nu)
    assert apply_linear_op(op, u()) == u(1, 0) - nu * u(0, 2)
    assert render_operator(op) == "D[1] - 1/10*D[2,2]"
    assert op.order == 2
    assert op.first_order_part().order == 1


def test_operator_coefficients_must_be_independent_of_unknowns():
    with pytest.raises(ValueError):
        LinearOpSpec.identity(N, u())


# --- randomized properties ---------------------------------------------------

def _pool():
    zero = zero_index(N)
    return [
        unknown_jet(1, "u", zero),
        unknown_jet(1, "u", (1, 0)),
        unknown_jet(1, "u", (0, 2)),
        unknown_jet(2, "v", (0, 1)),
        coordinate(1, "t"),
        coordinate(2, "x"),
        coeff_fn("c", zero),
    ]


def _raw(rng: random.Random, pool):
    return [
        (Fraction(rng.randint(-5, 5), rng.randint(1, 3)), [rng.choice(pool) for _ in range(rng.randint(0, 3))])
        for _ in range(rng.randint(1, 4))
    ]


def _random_expr(rng: random.Random, pool=None) -> Expr:
    return Expr.from_monomials(_raw(rng, pool or _pool()))


def test_total_derivatives_commute_on_random_polynomials():
    rng = random.Random(101)
    for _ in range(200):
        e = _random_expr(rng)
        for i in (1, 2):
            for j in (1, 2):
                assert total_derivative(total_derivative(e, i), j) == total_derivative(total_derivative(e, j), i)


def test_leibniz_rule_on_random_products():
    rng = random.Random(102)
    for _ in range(200):
        a, b = _random_expr(rng), _random_expr(rng)
        for i in (1, 2):
            assert total_derivative(a * b, i) == total_derivative(a, i) * b + a * total_derivative(b, i)


def test_equality_coincides_with_a_zero_normal_form():
    rng = random.Random(103)
    for _ in range(200):
        raw = _raw(rng, _pool())
        shuffled = [(c, list(reversed(f))) for c, f in reversed(raw)]
        e1 = normalize(raw)
        e2 = normalize(shuffled)
        assert expr_equal(e1, e2) and normalize(e1 - e2).is_zero()
        other = _random_expr(rng)
        assert expr_equal(e1, other) == normalize(e1 - other).is_zero()
        assert normalize(normalize(e1)) == normalize(e1)
    assert normalize([(1, []), (-1, [])]).is_zero()


def test_substitution_is_a_ring_homomorphism():
    rng = random.Random(104)
    zero = zero_index(N)
    images = [psi_jet(1, "u", zero), chi_jet(1, "u", zero), omega_jet(zero), coordinate(2, "x")]
    for _ in range(100):
        binding = {unknown_jet(1, "u", zero): Expr.from_monomials(
            (rng.randint(-2, 2), rng.sample(images, rng.randint(1, 2))) for _ in range(2)
        )}
        a, b = _random_expr(rng), _random_expr(rng)
        sa = substitute(a, binding, close_jets=True)
        sb = substitute(b, binding, close_jets=True)
        assert substitute(a * b, binding, close_jets=True) == sa * sb
        assert substitute(a + b, binding, close_jets=True) == sa + sb
