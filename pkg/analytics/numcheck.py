"""
Numerical validation of junction conditions by mollification.

The jump ansatz is smoothed with a tanh profile of width ε, the original
system is evaluated on the smoothed field with central finite differences,
and the residual is integrated against compactly supported polynomial bumps.
Residuals that shrink with ε mean the jump is a weak solution; residuals
that plateau mean a junction condition is violated.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

import numpy as np
import pandas as pd

from core.errors import (
    GradientDegenerate,
    GridTooCoarse,
    InconclusiveStudy,
    MissingTraceError,
    ScenarioError,
)
from core.symcore import MINUS, PLUS, Atom, AtomKind, Expr, derivative_multi, substitute, zero_index
from engine.junction import JunctionConditionSet
from infra.config import DEFAULT_AXIS, CheckTolerances
from infra.pdemodel import PDESystem

logger = logging.getLogger(__name__)

CONSISTENT = "consistent"
VIOLATED = "violated"
INCONCLUSIVE = "inconclusive"

_NEWTON_STEPS = 50
_PLACEMENT_ATTEMPTS = 200
_GRADIENT_FLOOR = 1e-8


# --- specs -----------------------------------------------------------------

@dataclass(frozen=True)
class MollifierSpec:
    """s -> ½(1 + tanh(s/ε)) over a descending sequence of widths."""

    widths: Tuple[float, ...]

    def __post_init__(self):
        if any(w <= 0 for w in self.widths):
            raise ScenarioError("mollifier widths must be positive")
        if list(self.widths) != sorted(self.widths, reverse=True):
            raise ScenarioError("mollifier widths must be descending")

    @staticmethod
    def profile(s: np.ndarray, eps: float) -> np.ndarray:
        return 0.5 * (1.0 + np.tanh(s / eps))


@dataclass(frozen=True)
class GridSpec:
    """Tensor-product grid; uniform per axis unless explicit `nodes` are given."""

    bounds: Tuple[Tuple[float, float], ...]
    points: Tuple[int, ...]
    min_points: int = 8
    nodes: Optional[Tuple[Tuple[float, ...], ...]] = None

    def __post_init__(self):
        if len(self.bounds) != len(self.points):
            raise ScenarioError("grid bounds and point counts differ in length")
        if any(p < self.min_points for p in self.points):
            raise ScenarioError(f"grid needs at least {self.min_points} points per axis, got {self.points}")

    @classmethod
    def graded(cls, axes: Sequence[np.ndarray], min_points: int = 8) -> "GridSpec":
        nodes = tuple(tuple(float(v) for v in a) for a in axes)
        return cls(tuple((n[0], n[-1]) for n in nodes), tuple(len(n) for n in nodes), min_points, nodes)

    @property
    def axes(self) -> List[np.ndarray]:
        if self.nodes is not None:
            return [np.asarray(n, dtype=float) for n in self.nodes]
        return [np.linspace(lo, hi, p) for (lo, hi), p in zip(self.bounds, self.points)]

    @property
    def spacing(self) -> Tuple[float, ...]:
        """Widest cell per axis."""
        return tuple(float(np.max(np.diff(a))) for a in self.axes)

    def node_spacing(self) -> Tuple[np.ndarray, ...]:
        """Per axis, the wider of the two cells next to each node, shaped to broadcast over the mesh."""
        out = []
        axes = self.axes
        for axis, a in enumerate(axes):
            d = np.diff(a)
            h = np.maximum(np.concatenate([d[:1], d]), np.concatenate([d, d[-1:]]))
            shape = [1] * len(axes)
            shape[axis] = len(a)
            out.append(h.reshape(shape))
        return tuple(out)

    def mesh(self) -> Tuple[np.ndarray, ...]:
        return tuple(np.meshgrid(*self.axes, indexing="ij"))


@dataclass(frozen=True)
class BumpFunction:
    """Π_i (1 - ((x_i - c_i)/r)²)³, clipped at zero outside the support."""

    center: Tuple[float, ...]
    radius: float
    straddles: bool = True

    def __call__(self, coords: Sequence[np.ndarray]) -> np.ndarray:
        value = np.ones_like(coords[0], dtype=float)
        for x, c in zip(coords, self.center):
            s = (x - c) / self.radius
            value = value * np.clip(1.0 - s * s, 0.0, None) ** 3
        return value

    def support(self, box: Sequence[Tuple[float, float]]) -> Tuple[Tuple[float, float], ...]:
        return tuple(
            (max(lo, c - self.radius), min(hi, c + self.radius)) for (lo, hi), c in zip(box, self.center)
        )


@dataclass(frozen=True)
class ScenarioSpec:
    sys: PDESystem
    gamma: Expr
    traces: Mapping[Tuple[int, int], Expr]
    box: Tuple[Tuple[float, float], ...]

    @classmethod
    def from_system(cls, sys: PDESystem) -> "ScenarioSpec":
        if sys.gamma.gamma_expr is None:
            raise MissingTraceError("numerical check needs a closed-form 'gamma:' declaration")
        missing = [
            f"{'minus' if side == MINUS else 'plus'} {name}"
            for alpha, name in enumerate(sys.unknowns, start=1)
            for side in (MINUS, PLUS)
            if (side, alpha) not in sys.traces
        ]
        if missing:
            raise MissingTraceError(f"missing trace declarations: {', '.join(missing)}")
        absent = [c for c in sys.coeffs if c not in sys.coeff_values]
        if absent:
            raise MissingTraceError(f"missing coefficient values: {', '.join(absent)}")
        box = tuple(
            tuple(float(v) for v in sys.box.get(i, DEFAULT_AXIS)) for i in range(1, sys.dim + 1)
        )
        return cls(sys, sys.gamma.gamma_expr, dict(sys.traces), box)

    @property
    def dim(self) -> int:
        return self.sys.dim


# --- evaluation ------------------------------------------------------------

class FieldJets:
    """Finite-difference jets of a sampled field (central, second order, graded axes allowed)."""

    def __init__(self, values: Mapping[int, np.ndarray], axes: Sequence[np.ndarray]):
        self.values = dict(values)
        self.axes = [np.asarray(a, dtype=float) for a in axes]
        self._cache: Dict[Tuple[int, Tuple[int, ...]], np.ndarray] = {}

    def jet(self, alpha: int, p: Tuple[int, ...]) -> np.ndarray:
        key = (alpha, tuple(p))
        if key not in self._cache:
            arr = self.values[alpha]
            for axis, count in enumerate(p):
                for _ in range(count):
                    arr = np.gradient(arr, self.axes[axis], axis=axis, edge_order=2)
            self._cache[key] = arr
        return self._cache[key]


class ClosedFormEvaluator:
    """Numerical values of Expr atoms at given coordinates."""

    def __init__(self, scenario: ScenarioSpec, coords: Sequence[np.ndarray], field: Optional[FieldJets] = None):
        self.scenario = scenario
        self.coords = [np.asarray(c, dtype=float) for c in coords]
        self.field = field
        self._cache: Dict[Atom, np.ndarray] = {}

    def atom(self, a: Atom) -> np.ndarray:
        if a in self._cache:
            return self._cache[a]
        sc = self.scenario
        if a.kind == AtomKind.COORDINATE:
            value = self.coords[a.alpha - 1]
        elif a.kind == AtomKind.COEFF:
            value = self.expr(derivative_multi(sc.sys.coeff_values[a.name], a.jet))
        elif a.kind == AtomKind.TRACE:
            value = self.expr(derivative_multi(sc.traces[(a.side, a.alpha)], a.jet))
        elif a.kind == AtomKind.GAMMA:
            value = self.expr(derivative_multi(sc.gamma, a.jet))
        elif a.kind == AtomKind.UNKNOWN and self.field is not None:
            value = self.field.jet(a.alpha, a.jet)
        else:
            raise ScenarioError(f"cannot evaluate {a} numerically")
        self._cache[a] = value
        return value

    def expr(self, e: Expr) -> np.ndarray:
        total = np.zeros_like(self.coords[0], dtype=float)
        for mono in e.monomials:
            term = float(mono.coefficient)
            for a in mono.factors:
                term = term * self.atom(a)
            total = total + term
        return total


def _point_coords(x: np.ndarray) -> List[np.ndarray]:
    return [np.array([v], dtype=float) for v in x]


def gamma_gradient(scenario: ScenarioSpec, x: np.ndarray) -> Tuple[float, np.ndarray]:
    ev = ClosedFormEvaluator(scenario, _point_coords(x))
    value = float(ev.expr(scenario.gamma)[0])
    grad = np.array([
        float(ev.expr(derivative_multi(scenario.gamma, tuple(1 if k == i else 0 for k in range(scenario.dim))))[0])
        for i in range(scenario.dim)
    ])
    return value, grad


def project_to_gamma(scenario: ScenarioSpec, x: np.ndarray) -> np.ndarray:
    """Newton steps along grad γ; checks grad γ != 0 on the way."""
    x = np.array(x, dtype=float)
    for _ in range(_NEWTON_STEPS):
        value, grad = gamma_gradient(scenario, x)
        norm2 = float(grad @ grad)
        if norm2 < _GRADIENT_FLOOR ** 2:
            raise GradientDegenerate(f"grad gamma vanishes near {tuple(np.round(x, 6))}")
        if abs(value) < 1e-13:
            break
        x = x - value * grad / norm2
    value, grad = gamma_gradient(scenario, x)
    if float(np.linalg.norm(grad)) < _GRADIENT_FLOOR:
        raise GradientDegenerate(f"grad gamma vanishes at {tuple(np.round(x, 6))}")
    return x


def place_test_functions(scenario: ScenarioSpec, radius: float, seed: int = 0,
                         straddling: int = 5, away: int = 2) -> List[BumpFunction]:
    """Bumps centred on Γ plus bumps whose support does not meet Γ, seeded for reproducibility."""
    rng = np.random.default_rng(seed)
    inner = [(lo + radius, hi - radius) for lo, hi in scenario.box]
    if any(lo >= hi for lo, hi in inner):
        raise ScenarioError(f"box {scenario.box} is too small for test radius {radius}")
    lows = np.array([lo for lo, _ in inner])
    highs = np.array([hi for _, hi in inner])

    tests: List[BumpFunction] = []
    attempts = 0
    while len(tests) < straddling and attempts < _PLACEMENT_ATTEMPTS:
        attempts += 1
        x = project_to_gamma(scenario, rng.uniform(lows, highs))
        if np.all(x >= lows) and np.all(x <= highs):
            tests.append(BumpFunction(tuple(float(v) for v in x), radius, True))
    if not tests:
        raise ScenarioError("Γ does not cross the interior of the box")
    if len(tests) < straddling:
        logger.warning(f"⚠️ placed only {len(tests)} of {straddling} test functions on Γ")

    placed_away = 0
    attempts = 0
    while placed_away < away and attempts < _PLACEMENT_ATTEMPTS:
        attempts += 1
        center = rng.uniform(lows, highs)
        bump = BumpFunction(tuple(float(v) for v in center), radius, False)
        sample = GridSpec(bump.support(scenario.box), (9,) * scenario.dim)
        values = ClosedFormEvaluator(scenario, sample.mesh()).expr(scenario.gamma)
        if np.all(values > 0) or np.all(values < 0):
            tests.append(bump)
            placed_away += 1
    if placed_away < away:
        logger.warning(f"⚠️ placed only {placed_away} of {away} test functions away from Γ")
    return tests


# --- field and residual ----------------------------------------------------

def mollified_field(scenario: ScenarioSpec, eps: float, grid: GridSpec) -> Dict[int, np.ndarray]:
    """U_ε = U₋ + (U₊ - U₋)·profile(γ/ε) at the grid nodes."""
    ev = ClosedFormEvaluator(scenario, grid.mesh())
    gam = ev.expr(scenario.gamma)
    band = np.abs(gam) <= eps
    if np.any(band):
        grads = [ev.expr(derivative_multi(scenario.gamma, tuple(1 if k == i else 0 for k in range(scenario.dim))))
                 for i in range(scenario.dim)]
        norm = np.sqrt(sum(g * g for g in grads))
        if np.min(norm[band]) < _GRADIENT_FLOOR:
            raise GradientDegenerate("grad gamma vanishes inside the mollification band")
    weight = MollifierSpec.profile(gam, eps)
    out: Dict[int, np.ndarray] = {}
    for alpha in range(1, scenario.sys.a + 1):
        minus = ev.expr(scenario.traces[(MINUS, alpha)])
        plus = ev.expr(scenario.traces[(PLUS, alpha)])
        out[alpha] = minus + (plus - minus) * weight
    return out


def integrate(values: np.ndarray, grid: GridSpec) -> float:
    """Tensor-product trapezoid rule."""
    result = values
    axes = grid.axes
    for axis in reversed(range(len(axes))):
        result = np.trapezoid(result, axes[axis], axis=axis)
    return float(result)


def weak_residual(scenario: ScenarioSpec, field_values: Mapping[int, np.ndarray],
                  tests: Sequence[BumpFunction], grid: GridSpec, eps: float,
                  tolerances: CheckTolerances = CheckTolerances()) -> np.ndarray:
    """∫ (T_β(U_ε) - f_β)·φ for every equation β and test function φ; shape (b, len(tests))."""
    coords = grid.mesh()
    gam = ClosedFormEvaluator(scenario, coords).expr(scenario.gamma)
    band = np.abs(gam) <= tolerances.band_factor * eps
    if np.any(band):
        worst = max(float(np.max(np.broadcast_to(h, gam.shape)[band])) for h in grid.node_spacing())
        limit = eps / tolerances.max_spacing_ratio
        if worst > limit:
            raise GridTooCoarse(
                f"grid spacing {worst:.4g} exceeds eps/{tolerances.max_spacing_ratio:g} = {limit:.4g} inside the band"
            )
    ev = ClosedFormEvaluator(scenario, coords, FieldJets(field_values, grid.axes))
    out = np.zeros((scenario.sys.b, len(tests)))
    for k, eq in enumerate(scenario.sys.equations):
        integrand = ev.expr(eq.lhs) - ev.expr(eq.rhs)
        for j, phi in enumerate(tests):
            out[k, j] = integrate(integrand * phi(coords), grid)
    return out


def _uniform_count(lo: float, hi: float, h: float, min_points: int) -> int:
    return max(min_points, int(math.ceil((hi - lo) / h)) + 1)


def _band_flags(scenario: ScenarioSpec, lattice: GridSpec, width: float) -> List[np.ndarray]:
    """Per axis, which lattice nodes the strip |γ| <= width projects onto, padded by two nodes."""
    mask = np.abs(ClosedFormEvaluator(scenario, lattice.mesh()).expr(scenario.gamma)) <= width
    flags = []
    for axis in range(mask.ndim):
        others = tuple(k for k in range(mask.ndim) if k != axis)
        hit = mask.any(axis=others) if others else mask
        padded = hit.copy()
        for shift in (1, 2):
            padded[shift:] |= hit[:-shift]
            padded[:-shift] |= hit[shift:]
        flags.append(padded)
    return flags


def _graded_axis(lattice: np.ndarray, refined: np.ndarray, coarse: float) -> np.ndarray:
    """Lattice nodes, all of them where refined and every stride-th elsewhere."""
    stride = max(1, int(math.floor(coarse / (lattice[1] - lattice[0]) + 1e-9)))
    last = len(lattice) - 1
    keep = []
    previous = 0
    for k in range(len(lattice)):
        if (k in (0, last) or refined[k] or k - previous >= stride
                or (k < last and refined[k + 1])):
            keep.append(k)
            previous = k
    return lattice[keep]


def local_grid(scenario: ScenarioSpec, test: BumpFunction, eps: float, tolerances: CheckTolerances,
               grid_points: Optional[int] = None, spacing_ratio: Optional[float] = None) -> GridSpec:
    """Grid over the test support.

    Without `grid_points` the grid is uniform with spacing ε/ratio. With it, the
    spacing of an N-point domain grid is used away from Γ and each axis is refined
    to ε/ratio where the strip |γ| <= refine_factor·ε projects onto it.
    """
    bounds = test.support(scenario.box)
    fine = eps / (spacing_ratio or tolerances.spacing_ratio)
    lattice = GridSpec(bounds, tuple(_uniform_count(lo, hi, fine, tolerances.min_points) for lo, hi in bounds),
                       tolerances.min_points)
    if grid_points is None:
        return lattice

    flags = _band_flags(scenario, lattice, tolerances.refine_factor * eps)
    axes = []
    for axis, ((lo, hi), nodes) in enumerate(zip(bounds, lattice.axes)):
        dlo, dhi = scenario.box[axis]
        coarse = min((dhi - dlo) / (grid_points - 1), (hi - lo) / (tolerances.min_points - 1))
        axes.append(_graded_axis(nodes, flags[axis], coarse))
    return GridSpec.graded(axes, tolerances.min_points)


# --- symbolic side ---------------------------------------------------------

def classical_trace_residuals(scenario: ScenarioSpec) -> Dict[Tuple[int, int], Expr]:
    """T_β(U±) - f_β with traces and coefficient values substituted; zero entries are omitted."""
    sys = scenario.sys
    zero = zero_index(sys.dim)
    coeffs = {Atom(AtomKind.COEFF, name=c, jet=zero): v for c, v in sys.coeff_values.items()}
    out: Dict[Tuple[int, int], Expr] = {}
    for side in (MINUS, PLUS):
        bindings = dict(coeffs)
        for alpha in range(1, sys.a + 1):
            bindings[sys.unknown_atom(alpha)] = scenario.traces[(side, alpha)]
        for eq in sys.equations:
            residual = substitute(eq.lhs - eq.rhs, bindings, close_jets=True)
            if not residual.is_zero():
                out[(eq.beta, side)] = residual
    return out


@dataclass(frozen=True)
class ConditionValue:
    beta: int
    atom: str
    max_abs: float


def evaluate_conditions_on_gamma(scenario: ScenarioSpec, conds: JunctionConditionSet,
                                 points: Sequence[Sequence[float]]) -> List[ConditionValue]:
    """Max |coefficient| over the sample points, for every required condition."""
    if not points:
        return []
    coords = [np.array([p[i] for p in points], dtype=float) for i in range(scenario.dim)]
    ev = ClosedFormEvaluator(scenario, coords)
    out = []
    for c in conds.required():
        values = ev.expr(c.coefficient)
        out.append(ConditionValue(c.beta, str(c.atom), float(np.max(np.abs(values)))))
    return out


# --- study -----------------------------------------------------------------

@dataclass
class ResidualReport:
    system: str
    widths: Tuple[float, ...]
    tests: List[BumpFunction]
    residuals: np.ndarray
    rates: np.ndarray
    statuses: List[List[str]]
    verdict: str
    grid: str
    classical: bool = True
    classical_failures: List[str] = field(default_factory=list)
    condition_values: List[ConditionValue] = field(default_factory=list)
    symbolic_consistent: Optional[bool] = None

    def to_frame(self) -> pd.DataFrame:
        rows = []
        for j, test in enumerate(self.tests):
            for k in range(self.residuals.shape[1]):
                row = {
                    "test": j + 1,
                    "beta": k + 1,
                    "center": ", ".join(f"{v:.3f}" for v in test.center),
                    "on_gamma": test.straddles,
                }
                for e, eps in enumerate(self.widths):
                    row[f"eps={eps:g}"] = self.residuals[e, k, j]
                row["rate"] = self.rates[k, j]
                row["status"] = self.statuses[k][j]
                rows.append(row)
        return pd.DataFrame(rows)

    def to_table(self) -> str:
        header = f"{self.system}: {self.verdict} (grid {self.grid})"
        return header + "\n" + self.to_frame().to_string(index=False, float_format=lambda v: f"{v:.3e}")

    def to_dict(self) -> dict:
        return {
            "verdict": self.verdict,
            "eps": list(self.widths),
            "grid": self.grid,
            "classical_traces": self.classical,
            "classical_failures": list(self.classical_failures),
            "symbolic_consistent": self.symbolic_consistent,
            "condition_values": [
                {"beta": c.beta, "atom": c.atom, "max_abs": c.max_abs} for c in self.condition_values
            ],
            "tests": [
                {
                    "center": list(t.center),
                    "radius": t.radius,
                    "on_gamma": t.straddles,
                    "residuals": [
                        [float(self.residuals[e, k, j]) for e in range(len(self.widths))]
                        for k in range(self.residuals.shape[1])
                    ],
                    "rate": [None if np.isnan(self.rates[k, j]) else float(self.rates[k, j])
                             for k in range(self.residuals.shape[1])],
                    "status": [self.statuses[k][j] for k in range(self.residuals.shape[1])],
                }
                for j, t in enumerate(self.tests)
            ],
        }


def fit_rate(widths: Sequence[float], values: Sequence[float]) -> float:
    """Slope of log|r| against log ε; NaN when a residual is exactly zero."""
    mags = np.abs(np.asarray(values, dtype=float))
    if np.any(mags == 0):
        return float("nan")
    slope, _ = np.polyfit(np.log(np.asarray(widths, dtype=float)), np.log(mags), 1)
    return float(slope)


def residual_status(values: Sequence[float], tolerances: CheckTolerances) -> str:
    mags = np.abs(np.asarray(values, dtype=float))
    floor = tolerances.floor
    shrink = tolerances.shrink_factor
    pairs_ok = [
        mags[k + 1] <= floor or mags[k] >= shrink * mags[k + 1]
        for k in range(len(mags) - 1)
    ]
    if all(pairs_ok):
        return CONSISTENT
    if mags[-1] > floor and not pairs_ok[-1]:
        return VIOLATED
    return INCONCLUSIVE


def combine_statuses(statuses: Sequence[str]) -> str:
    if any(s == VIOLATED for s in statuses):
        return VIOLATED
    if all(s == CONSISTENT for s in statuses):
        return CONSISTENT
    return INCONCLUSIVE


def convergence_study(scenario: ScenarioSpec, widths: Sequence[float], seed: int = 0, radius: float = 0.25,
                      tolerances: CheckTolerances = CheckTolerances(), grid_points: Optional[int] = None,
                      spacing_ratio: Optional[float] = None, tests: Optional[Sequence[BumpFunction]] = None,
                      conds: Optional[JunctionConditionSet] = None, strict: bool = False) -> ResidualReport:
    """Residuals per width and test function, with a consistent / violated / inconclusive verdict."""
    mollifier = MollifierSpec(tuple(widths))
    if len(mollifier.widths) < 3:
        raise ScenarioError("a convergence study needs at least three widths")
    if grid_points is not None and grid_points < tolerances.min_points:
        raise ScenarioError(f"--grid needs at least {tolerances.min_points} points per axis")
    tests = list(tests) if tests is not None else place_test_functions(scenario, radius, seed)
    sys = scenario.sys
    logger.info(f"🔍 convergence study for {sys.name}: {len(tests)} test functions, eps={list(mollifier.widths)}")

    residuals = np.zeros((len(mollifier.widths), sys.b, len(tests)))
    for e, eps in enumerate(mollifier.widths):
        for j, test in enumerate(tests):
            grid = local_grid(scenario, test, eps, tolerances, grid_points, spacing_ratio)
            values = mollified_field(scenario, eps, grid)
            residuals[e, :, j] = weak_residual(scenario, values, [test], grid, eps, tolerances)[:, 0]
        logger.debug(f"🔍 eps={eps:g} max |residual| = {float(np.max(np.abs(residuals[e]))):.3e}")

    rates = np.full((sys.b, len(tests)), np.nan)
    statuses: List[List[str]] = []
    for k in range(sys.b):
        row = []
        for j in range(len(tests)):
            rates[k, j] = fit_rate(mollifier.widths, residuals[:, k, j])
            row.append(residual_status(residuals[:, k, j], tolerances))
        statuses.append(row)
    verdict = combine_statuses([s for row in statuses for s in row])

    failures = classical_trace_residuals(scenario)
    ratio = spacing_ratio or tolerances.spacing_ratio
    grid_text = (f"{grid_points} points per axis, eps/{ratio:g} near gamma" if grid_points
                 else f"spacing eps/{ratio:g}")
    report = ResidualReport(
        system=sys.name,
        widths=mollifier.widths,
        tests=tests,
        residuals=residuals,
        rates=rates,
        statuses=statuses,
        verdict=verdict,
        grid=grid_text,
        classical=not failures,
        classical_failures=[
            f"equation {beta} on {'minus' if side == MINUS else 'plus'} trace: {expr}"
            for (beta, side), expr in sorted(failures.items())
        ],
    )
    if failures:
        logger.warning(f"⚠️ traces are not classical solutions: {report.classical_failures}")

    if conds is not None:
        points = [t.center for t in tests if t.straddles]
        report.condition_values = evaluate_conditions_on_gamma(scenario, conds, points)
        report.symbolic_consistent = all(c.max_abs < tolerances.condition_tol for c in report.condition_values)
        if report.symbolic_consistent != (verdict == CONSISTENT) and verdict != INCONCLUSIVE:
            logger.warning(f"⚠️ numerical verdict {verdict} disagrees with the symbolic conditions")

    if verdict == CONSISTENT:
        logger.info(f"✅ {sys.name}: residuals vanish with eps")
    elif verdict == VIOLATED:
        logger.info(f"❌ {sys.name}: residuals plateau, a junction condition is violated")
    else:
        logger.warning(f"⚠️ {sys.name}: convergence study inconclusive")
        if strict:
            raise InconclusiveStudy(f"{sys.name}: neither criterion met", report)
    return report
