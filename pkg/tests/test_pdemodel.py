from fractions import Fraction

import pytest

from conftest import SYSTEMS_DIR, load
from core.errors import ParseError
from core.symcore import PLUS, MINUS, Expr, LinearOpSpec
from infra.pdemodel import (
    operator_expr,
    parse_expression,
    parse_system,
    render_system,
    validate_system,
)

HEADER = "system s\ndim 2\ncoords t x\nunknowns u\n"


def test_burgers_parses_to_one_equation(burgers):
    assert (burgers.n, burgers.a, burgers.b) == (2, 1, 1)
    expected = burgers.unknown(1, (1, 0)) + burgers.unknown(1) * burgers.unknown(1, (0, 1))
    assert operator_expr(burgers, 1) == expected
    assert burgers.rhs == (Expr.zero(),)
    assert validate_system(burgers) == []


def test_traces_gamma_and_box(burgers):
    t, x = burgers.coordinate(1), burgers.coordinate(2)
    assert burgers.gamma.gamma_expr == x - t.scale(Fraction(1, 2))
    assert burgers.traces[(MINUS, 1)] == Expr.constant(1)
    assert burgers.traces[(PLUS, 1)].is_zero()
    assert burgers.box == {1: (Fraction(0), Fraction(1)), 2: (Fraction(-1), Fraction(2))}


def test_mh_block_is_read(burgers):
    assert burgers.has_mh_block
    (lin,) = burgers.mh_linear
    assert (lin.beta, lin.alpha) == (1, 1)
    assert lin.op == LinearOpSpec.derivative((1, 0))
    (quad,) = burgers.mh_quadratic
    assert quad.pairs == (((1, 1), LinearOpSpec.derivative((0, 1))),)


def test_coefficient_symbols_and_values():
    sys = load("viscous_burgers")
    assert sys.coeffs == ("nu",)
    assert sys.coeff_values["nu"] == Expr.constant(Fraction(1, 10))
    (lin,) = sys.mh_linear
    assert lin.op.order == 2


def test_operator_division_by_constant():
    sys = load("linear_transport")
    text = HEADER + "eq: D[1]u + 1/2*D[2]u = 0\nmh 1 linear u: D[1] + 1/2*D[2]\n"
    other = parse_system(text)
    assert other.mh_linear[0].op.terms == sys.mh_linear[0].op.terms


def test_every_sample_system_rerenders_identically():
    for path in sorted(SYSTEMS_DIR.glob("*.pde")):
        sys = parse_system(path.read_text(encoding="utf-8"))
        text = render_system(sys)
        assert render_system(parse_system(text)) == text, path.name


def test_unknown_identifier_reports_position():
    with pytest.raises(ParseError) as info:
        parse_system(HEADER + "eq: D[1]u + v = 0\n")
    (diag,) = info.value.diagnostics
    assert (diag.line, diag.column) == (5, 13)
    assert "unknown identifier v" in str(diag)


def test_all_errors_are_collected():
    text = HEADER + "eq: D[3]u = 0\ngamma: x $ t\neq: u = \n"
    with pytest.raises(ParseError) as info:
        parse_system(text)
    lines = [d.line for d in info.value.diagnostics]
    assert lines == [5, 6, 7]
    assert "out of range" in info.value.diagnostics[0].message


def test_division_by_unknown_is_rejected():
    with pytest.raises(ParseError) as info:
        parse_system(HEADER + "eq: D[1]u / u = 0\n")
    assert "nonzero constant" in info.value.diagnostics[0].message


def test_box_bounds_must_be_ordered_constants():
    with pytest.raises(ParseError) as info:
        parse_system(HEADER + "box x: 1, -1\neq: D[1]u = 0\n")
    assert "empty box for x" in info.value.diagnostics[0].message
    with pytest.raises(ParseError):
        parse_system(HEADER + "box x: t, 1\neq: D[1]u = 0\n")


def test_missing_equations_and_dangling_mh():
    with pytest.raises(ParseError) as info:
        parse_system(HEADER)
    assert "no equations" in info.value.diagnostics[0].message
    with pytest.raises(ParseError) as info:
        parse_system(HEADER + "eq: D[1]u = 0\nmh 2 linear u: D[1]\n")
    assert "missing equation 2" in info.value.diagnostics[0].message


def test_right_side_may_not_contain_unknowns():
    with pytest.raises(ParseError) as info:
        parse_system(HEADER + "eq: D[1]u = u\n")
    assert "right side" in info.value.diagnostics[0].message


def test_parse_expression_against_system(burgers):
    e = parse_expression("up_u^2 - um_u^2", burgers)
    assert len(e.terms) == 2
    with pytest.raises(ParseError):
        parse_expression("up_v", burgers)


@pytest.mark.parametrize("name", ["omega", "psi_u", "chi_w", "um_a", "up_a", "D"])
def test_derived_names_cannot_be_declared(name):
    with pytest.raises(ParseError) as info:
        parse_system(f"system s\ndim 2\ncoords t x\nunknowns {name}\neq: D[1]{name} = 0\n")
    (diag,) = [d for d in info.value.diagnostics if "reserved" in d.message]
    assert (diag.line, diag.column) == (4, 10)
    assert diag.message.startswith(f"{name} is a reserved name")


def test_reserved_coefficient_names_are_rejected():
    with pytest.raises(ParseError) as info:
        parse_system(HEADER + "coeffs chi_nu\neq: D[1]u = 0\n")
    assert any("chi_nu is a reserved name" in d.message for d in info.value.diagnostics)
