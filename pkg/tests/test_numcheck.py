from dataclasses import replace

import numpy as np
import pytest

from conftest import load
from core.errors import GradientDegenerate, GridTooCoarse, MissingTraceError, ScenarioError
from engine.classify import resoluble_decompose
from engine.junction import derive_conditions
from analytics.numcheck import (
    CONSISTENT,
    INCONCLUSIVE,
    VIOLATED,
    BumpFunction,
    ClosedFormEvaluator,
    FieldJets,
    GridSpec,
    MollifierSpec,
    ScenarioSpec,
    classical_trace_residuals,
    combine_statuses,
    convergence_study,
    evaluate_conditions_on_gamma,
    fit_rate,
    integrate,
    local_grid,
    mollified_field,
    place_test_functions,
    project_to_gamma,
    residual_status,
    weak_residual,
)
from infra.config import CheckTolerances
from infra.pdemodel import parse_system

WIDTHS = (0.1, 0.05, 0.025)


def scenario(name):
    return ScenarioSpec.from_system(load(name))


def conditions(name):
    sys = load(name)
    return derive_conditions(sys, "resoluble", resoluble_decompose(sys).certificate)


def line_integral(test: BumpFunction, speed: float) -> float:
    """∫ φ(t, speed·t) dt over the support of φ."""
    t = np.linspace(test.center[0] - test.radius, test.center[0] + test.radius, 4001)
    return float(np.trapezoid(test([t, speed * t]), t))


def test_mollifier_widths_must_descend():
    with pytest.raises(ScenarioError):
        MollifierSpec((0.05, 0.1, 0.025))
    with pytest.raises(ScenarioError):
        MollifierSpec((0.1, 0.0))
    assert MollifierSpec.profile(np.array([0.0]), 0.1)[0] == pytest.approx(0.5)


def test_mollified_burgers_is_one_half_on_the_front():
    sc = scenario("burgers")
    grid = GridSpec(((0.0, 1.0), (0.0, 0.5)), (9, 9))
    field = mollified_field(sc, 0.05, grid)
    assert field[1][4, 4] == pytest.approx(0.5)
    # t = 1, x = 0 lies behind the front; t = 0, x = 0.5 ahead of it
    assert field[1][8, 0] > 0.99
    assert field[1][0, 8] < 0.01


def test_scenario_needs_gamma_traces_and_box_defaults():
    with pytest.raises(MissingTraceError):
        scenario("ux_squared")
    sc = scenario("heat")
    assert sc.box == ((-1.0, 1.0), (-1.0, 1.0))
    assert scenario("burgers").box == ((0.0, 1.0), (-1.0, 2.0))


def test_missing_coefficient_value_is_reported():
    text = (
        "system s\ncoords t x\nunknowns u\ncoeffs nu\ngamma: x\n"
        "trace minus u: 1\ntrace plus u: 0\neq: D[1]u - nu*D[2,2]u = 0\n"
    )
    with pytest.raises(MissingTraceError, match="nu"):
        ScenarioSpec.from_system(parse_system(text))


def test_test_functions_are_reproducible_and_placed():
    sc = scenario("burgers")
    first = place_test_functions(sc, 0.25, seed=4)
    assert first == place_test_functions(sc, 0.25, seed=4)
    straddling = [t for t in first if t.straddles]
    away = [t for t in first if not t.straddles]
    assert len(straddling) == 5 and len(away) == 2
    for t in straddling:
        assert t.center[1] == pytest.approx(t.center[0] / 2, abs=1e-9)
    for t in away:
        assert abs(t.center[1] - t.center[0] / 2) > 0.2


def test_degenerate_gamma_is_refused():
    text = "system s\ncoords t x\nunknowns u\ngamma: t^2 + x^2\ntrace minus u: 1\ntrace plus u: 0\neq: D[1]u = 0\n"
    sc = ScenarioSpec.from_system(parse_system(text))
    with pytest.raises(GradientDegenerate):
        project_to_gamma(sc, np.array([0.0, 0.0]))


def test_coarse_grid_across_the_band_is_refused():
    sc = scenario("burgers")
    grid = GridSpec(((0.0, 1.0), (-1.0, 2.0)), (9, 9))
    values = mollified_field(sc, 0.05, grid)
    bump = BumpFunction((0.5, 0.25), 0.25)
    with pytest.raises(GridTooCoarse):
        weak_residual(sc, values, [bump], grid, 0.05)


def test_integrate_is_exact_for_affine_integrands():
    grid = GridSpec(((0.0, 2.0), (-1.0, 1.0)), (11, 21))
    t, x = grid.mesh()
    assert integrate(np.ones_like(t), grid) == pytest.approx(4.0)
    assert integrate(t + x, grid) == pytest.approx(4.0)


def test_domain_grid_is_refined_only_near_the_front():
    sc = scenario("heat_kinked")
    tol = CheckTolerances()
    eps = 0.02
    fine = eps / tol.spacing_ratio
    bump = BumpFunction((0.5, 0.0), 0.25)
    grid = local_grid(sc, bump, eps, tol, grid_points=41)
    t_axis, x_axis = grid.axes
    cells = np.diff(x_axis)
    assert 0.04 < cells.max() <= 0.05 + 1e-12
    middle = np.abs(x_axis[:-1]) < 0.1
    assert np.all(cells[middle] <= 1.5 * fine + 1e-12)
    # Γ = {x = 0} meets every t of the support
    assert np.diff(t_axis).max() <= 1.5 * fine + 1e-12

    graded = weak_residual(sc, mollified_field(sc, eps, grid), [bump], grid, eps, tol)
    uniform_grid = local_grid(sc, bump, eps, tol)
    uniform = weak_residual(sc, mollified_field(sc, eps, uniform_grid), [bump], uniform_grid, eps, tol)
    assert graded[0, 0] == pytest.approx(uniform[0, 0], rel=1e-2)


def test_field_jets_are_exact_for_quadratics_on_graded_axes():
    t_axis = np.linspace(0.0, 1.0, 9)
    x_axis = np.array([-1.0, -0.6, -0.3, -0.1, -0.05, 0.0, 0.05, 0.1, 0.4, 1.0])
    grid = GridSpec.graded([t_axis, x_axis])
    t, x = grid.mesh()
    jets = FieldJets({1: t + x * x}, grid.axes)
    assert np.allclose(jets.jet(1, (0, 1)), 2 * x)
    assert np.allclose(jets.jet(1, (0, 2)), 2.0)
    assert np.allclose(jets.jet(1, (1, 0)), 1.0)
    assert integrate(t + x, grid) == pytest.approx(1.0)


def test_closed_form_evaluator_handles_coefficients():
    sc = scenario("viscous_burgers")
    ev = ClosedFormEvaluator(sc, [np.array([0.0, 1.0]), np.array([0.0, 0.0])])
    nu = next(a for a in sc.sys.symbol_table().values() if a.name == "nu")
    assert np.allclose(ev.atom(nu), 0.1)


def test_rate_and_status_helpers():
    tol = CheckTolerances()
    assert fit_rate(WIDTHS, [0.4, 0.2, 0.1]) == pytest.approx(1.0)
    assert np.isnan(fit_rate(WIDTHS, [0.1, 0.0, 0.0]))
    assert residual_status([0.4, 0.2, 0.1], tol) == CONSISTENT
    assert residual_status([1e-9, 1e-10, 0.0], tol) == CONSISTENT
    assert residual_status([0.11, 0.105, 0.1], tol) == VIOLATED
    assert residual_status([0.1, 0.099, 0.01], tol) == INCONCLUSIVE
    assert combine_statuses([CONSISTENT, VIOLATED, INCONCLUSIVE]) == VIOLATED
    assert combine_statuses([CONSISTENT, INCONCLUSIVE]) == INCONCLUSIVE
    assert combine_statuses([CONSISTENT, CONSISTENT]) == CONSISTENT


def test_classical_trace_check():
    assert classical_trace_residuals(scenario("burgers")) == {}
    text = "system s\ncoords t x\nunknowns u\ngamma: x\ntrace minus u: t\ntrace plus u: 0\neq: D[1]u = 0\n"
    failures = classical_trace_residuals(ScenarioSpec.from_system(parse_system(text)))
    assert list(failures) == [(1, 0)]


def test_symbolic_conditions_evaluated_on_the_front():
    sc = scenario("heat_kinked")
    values = evaluate_conditions_on_gamma(sc, conditions("heat_kinked"), [(0.3, 0.0), (0.7, 0.0)])
    by_atom = {v.atom: v.max_abs for v in values}
    assert by_atom["delta"] == pytest.approx(2.0)
    sc = scenario("burgers")
    (rh,) = evaluate_conditions_on_gamma(sc, conditions("burgers"), [(0.4, 0.2)])
    assert rh.max_abs < 1e-12


def test_study_needs_three_widths():
    with pytest.raises(ScenarioError):
        convergence_study(scenario("burgers"), (0.1, 0.05))


@pytest.mark.slow
def test_burgers_at_the_shock_speed_is_consistent():
    report = convergence_study(scenario("burgers"), WIDTHS, seed=1, conds=conditions("burgers"))
    assert report.verdict == CONSISTENT
    assert report.classical
    assert report.symbolic_consistent is True
    mags = np.abs(report.residuals[:, 0, :])
    assert np.all(mags[-1] <= mags[0] + 1e-12)
    assert "consistent" in report.to_table()


@pytest.mark.slow
def test_burgers_at_the_wrong_speed_is_violated():
    report = convergence_study(scenario("burgers_wrong_speed"), WIDTHS, seed=1,
                               conds=conditions("burgers_wrong_speed"))
    assert report.verdict == VIOLATED
    assert report.symbolic_consistent is False
    for j, test in enumerate(report.tests):
        if test.straddles:
            assert report.residuals[-1, 0, j] == pytest.approx(0.1 * line_integral(test, 0.6), rel=0.1)


@pytest.mark.slow
def test_linear_transport_is_consistent():
    report = convergence_study(scenario("linear_transport"), WIDTHS, seed=2, conds=conditions("linear_transport"))
    assert report.verdict == CONSISTENT
    assert report.symbolic_consistent is True


@pytest.mark.slow
def test_kinked_heat_trace_is_violated():
    report = convergence_study(scenario("heat_kinked"), WIDTHS, seed=3, conds=conditions("heat_kinked"))
    assert report.verdict == VIOLATED
    assert report.symbolic_consistent is False
    for j, test in enumerate(report.tests):
        if test.straddles:
            assert report.residuals[-1, 0, j] == pytest.approx(-line_integral(test, 0.0), rel=0.1)
    doc = report.to_dict()
    assert doc["verdict"] == VIOLATED
    assert len(doc["tests"]) == len(report.tests)


def _single_residual(sc, test, eps, **grid_args):
    tol = CheckTolerances()
    grid = local_grid(sc, test, eps, tol, **grid_args)
    return weak_residual(sc, mollified_field(sc, eps, grid), [test], grid, eps, tol)[0, 0]


def test_enlarging_the_box_away_from_the_front_leaves_residuals_alone():
    sc = scenario("burgers_wrong_speed")
    wide = replace(sc, box=((-1.0, 2.0), (-4.0, 5.0)))
    tests = [t for t in place_test_functions(sc, 0.25, seed=1) if t.straddles][:2]
    for test in tests:
        for grid_points in (None, 161):
            near = _single_residual(sc, test, 0.05, grid_points=grid_points)
            far = _single_residual(wide, test, 0.05, grid_points=grid_points)
            assert abs(near - far) < CheckTolerances().quadrature_tol


def test_halving_the_spacing_barely_moves_the_residual():
    sc = scenario("burgers_wrong_speed")
    test = next(t for t in place_test_functions(sc, 0.25, seed=1) if t.straddles)
    coarse = _single_residual(sc, test, 0.05, spacing_ratio=8)
    fine = _single_residual(sc, test, 0.05, spacing_ratio=16)
    assert abs(coarse) > 1e-3
    assert fine == pytest.approx(coarse, rel=0.1)


@pytest.mark.slow
def test_no_jump_leaves_only_quadrature_noise():
    text = (
        "system heat_smooth\ncoords t x\nunknowns u\ngamma: x - t/2\n"
        "trace minus u: 2*t + x^2\ntrace plus u: 2*t + x^2\neq: D[1]u - D[2,2]u = 0\n"
    )
    sc = ScenarioSpec.from_system(parse_system(text))
    report = convergence_study(sc, WIDTHS, seed=5)
    assert report.verdict == CONSISTENT
    assert report.classical
    assert np.max(np.abs(report.residuals)) < CheckTolerances().floor
