"""
Structural analysis of PDE systems.

Resolubility is decided constructively: substitute U = ψ + χω, collect the
ω-dependent part by ω-jet monomial, and solve exactly for Expr-valued
multipliers over the rational matrix of expanded D^p(ω^l) basis elements.
MH certificates are checked by expansion against T_β.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Callable, Dict, List, Mapping, Optional, Sequence, Tuple

from core.errors import DecompositionFailed, MHOrderError
from core.symcore import (
    AtomKind,
    Expr,
    Factors,
    LinearOpSpec,
    MultiIndex,
    apply_linear_op,
    chi_jet,
    derivative_multi,
    expr_equal,
    index_directions,
    index_order,
    multi_indices,
    omega_jet,
    psi_jet,
    render_factors,
    render_text,
    substitute,
    zero_index,
)
from infra.pdemodel import Equation, PDESystem, operator_expr, parse_expression

logger = logging.getLogger(__name__)

RESOLUBLE = "resoluble"
NOT_RESOLUBLE = "not-resoluble"

ColumnOrder = Callable[[List["OmegaBasisElement"]], List["OmegaBasisElement"]]


def _row_key(factors: Factors):
    return (len(factors), factors)


# --- ansatz ----------------------------------------------------------------

@dataclass(frozen=True)
class AnsatzExpansion:
    """Per equation: {ω-jet monomial -> coefficient in ψ/χ jets and x}; () is the ω-free part."""

    dim: int
    groups: Tuple[Mapping[Factors, Expr], ...]

    def group(self, beta: int) -> Mapping[Factors, Expr]:
        return self.groups[beta - 1]

    def recombine(self, beta: int) -> Expr:
        total = Expr.zero()
        for key, coef in self.group(beta).items():
            total = total + coef * Expr.from_monomials([(1, key)])
        return total


def ansatz_bindings(sys: PDESystem) -> Dict:
    """U_α -> ψ_α + χ_α·ω on base atoms; jets follow by closure."""
    zero = zero_index(sys.dim)
    omega = Expr.atom(omega_jet(zero))
    bindings = {}
    for alpha, name in enumerate(sys.unknowns, start=1):
        psi = Expr.atom(psi_jet(alpha, name, zero))
        chi = Expr.atom(chi_jet(alpha, name, zero))
        bindings[sys.unknown_atom(alpha)] = psi + chi * omega
    return bindings


def split_omega(e: Expr) -> Dict[Factors, Expr]:
    groups: Dict[Factors, Dict[Factors, Fraction]] = {}
    for factors, coef in e.terms.items():
        key = tuple(a for a in factors if a.kind == AtomKind.OMEGA)
        rest = tuple(a for a in factors if a.kind != AtomKind.OMEGA)
        bucket = groups.setdefault(key, {})
        bucket[rest] = bucket.get(rest, Fraction(0)) + coef
    return {key: Expr(bucket) for key, bucket in groups.items() if any(bucket.values())}


def expand_ansatz(sys: PDESystem, lhs: Expr) -> Expr:
    return substitute(lhs, ansatz_bindings(sys), close_jets=True)


def substitute_ansatz(sys: PDESystem) -> AnsatzExpansion:
    groups = tuple(split_omega(expand_ansatz(sys, eq.lhs)) for eq in sys.equations)
    return AnsatzExpansion(sys.dim, groups)


# --- ω basis ---------------------------------------------------------------

@dataclass(frozen=True)
class OmegaBasisElement:
    p: MultiIndex
    l: int
    expansion: Mapping[Factors, Fraction]

    def __str__(self) -> str:
        return render_basis_element(self.p, self.l)


def render_basis_element(p: MultiIndex, l: int) -> str:
    power = "omega" if l == 1 else f"omega^{l}"
    dirs = index_directions(p)
    if not dirs:
        return power
    return f"D[{','.join(str(i) for i in dirs)}]({power})"


def omega_basis(max_order: int, max_power: int, dim: int) -> List[OmegaBasisElement]:
    """Every D^p(ω^l), |p| <= max_order, 1 <= l <= max_power, sorted by (l, p)."""
    omega = Expr.atom(omega_jet(zero_index(dim)))
    elements: List[OmegaBasisElement] = []
    for l in range(1, max_power + 1):
        power = omega ** l
        for p in sorted(multi_indices(dim, max_order)):
            elements.append(OmegaBasisElement(p, l, dict(derivative_multi(power, p).terms)))
    return elements


# --- certificates ----------------------------------------------------------

@dataclass(frozen=True)
class CertificateTerm:
    multiplier: Expr
    p: MultiIndex
    l: int


@dataclass(frozen=True)
class ResolubleEquation:
    beta: int
    terms: Tuple[CertificateTerm, ...]

    def expand(self, dim: int) -> Expr:
        omega = Expr.atom(omega_jet(zero_index(dim)))
        total = Expr.zero()
        for term in self.terms:
            total = total + term.multiplier * derivative_multi(omega ** term.l, term.p)
        return total


@dataclass(frozen=True)
class ResolubleCertificate:
    equations: Tuple[ResolubleEquation, ...]

    def equation(self, beta: int) -> Optional[ResolubleEquation]:
        for eq in self.equations:
            if eq.beta == beta:
                return eq
        return None


def verify_certificate(sys: PDESystem, cert: ResolubleCertificate) -> bool:
    for eq in sys.equations:
        entry = cert.equation(eq.beta)
        expected = expand_ansatz(sys, eq.lhs)
        produced = entry.expand(sys.dim) if entry is not None else Expr.zero()
        if not expr_equal(produced, expected):
            logger.debug(f"⚠️ certificate identity fails for equation {eq.beta}")
            return False
    return True


# --- exact elimination -----------------------------------------------------

@dataclass
class CoefficientSystem:
    """Rows are ω-jet monomials, columns basis elements: M·T = E with Expr-valued T and E."""

    rows: List[Factors]
    columns: List[OmegaBasisElement]
    matrix: List[List[Fraction]]
    rhs: List[Expr]


def equation_bounds(eq: Equation) -> Tuple[int, int]:
    """(max derivative order on unknowns, polynomial degree in unknowns)."""
    order = max((index_order(a.jet) for a in eq.lhs.atoms() if a.kind == AtomKind.UNKNOWN), default=0)
    return order, eq.lhs.degree(kinds=(AtomKind.UNKNOWN,))


def build_coefficient_system(sys: PDESystem, beta: int,
                             column_order: Optional[ColumnOrder] = None) -> CoefficientSystem:
    eq = sys.equations[beta - 1]
    order, degree = equation_bounds(eq)
    groups = split_omega(expand_ansatz(sys, eq.lhs))
    columns = omega_basis(order, degree, sys.dim)
    if column_order is not None:
        columns = list(column_order(list(columns)))
    keys = {k for k in groups if k}
    for col in columns:
        keys.update(col.expansion)
    rows = sorted(keys, key=_row_key)
    matrix = [[col.expansion.get(r, Fraction(0)) for col in columns] for r in rows]
    rhs = [groups.get(r, Expr.zero()) for r in rows]
    return CoefficientSystem(rows, columns, matrix, rhs)


@dataclass
class Elimination:
    pivots: Dict[int, int]
    matrix: List[List[Fraction]]
    rhs: List[Expr]
    combos: List[Dict[int, Fraction]]

    def inconsistent_rows(self) -> List[int]:
        used = set(self.pivots.values())
        return [r for r in range(len(self.rhs)) if r not in used and not self.rhs[r].is_zero()]


def _combine(a: Dict[int, Fraction], b: Dict[int, Fraction], factor: Fraction) -> Dict[int, Fraction]:
    out = dict(a)
    for k, v in b.items():
        out[k] = out.get(k, Fraction(0)) + factor * v
    return {k: v for k, v in out.items() if v}


def eliminate(cs: CoefficientSystem, reverse: bool = False) -> Elimination:
    """Gauss-Jordan over the rationals; rows track their combination of original rows."""
    m = [list(row) for row in cs.matrix]
    rhs = list(cs.rhs)
    combos = [{r: Fraction(1)} for r in range(len(m))]
    order = range(len(cs.columns) - 1, -1, -1) if reverse else range(len(cs.columns))
    pivots: Dict[int, int] = {}
    used: set = set()
    for c in order:
        pivot = next((r for r in range(len(m)) if r not in used and m[r][c] != 0), None)
        if pivot is None:
            continue
        used.add(pivot)
        pivots[c] = pivot
        inv = 1 / m[pivot][c]
        m[pivot] = [v * inv for v in m[pivot]]
        rhs[pivot] = rhs[pivot].scale(inv)
        combos[pivot] = {k: v * inv for k, v in combos[pivot].items()}
        for r in range(len(m)):
            f = m[r][c]
            if r == pivot or f == 0:
                continue
            m[r] = [a - f * b for a, b in zip(m[r], m[pivot])]
            rhs[r] = rhs[r] - rhs[pivot].scale(f)
            combos[r] = _combine(combos[r], combos[pivot], -f)
    return Elimination(pivots, m, rhs, combos)


def check_infeasibility(cs: CoefficientSystem, y: Mapping[int, Fraction]) -> bool:
    """True iff yᵀM = 0 and yᵀE != 0, i.e. y proves M·T = E has no solution."""
    for c in range(len(cs.columns)):
        if sum((v * cs.matrix[r][c] for r, v in y.items()), Fraction(0)) != 0:
            return False
    combined = Expr.zero()
    for r, v in y.items():
        combined = combined + cs.rhs[r].scale(v)
    return not combined.is_zero()


# --- classification --------------------------------------------------------

@dataclass(frozen=True)
class EquationVerdict:
    beta: int
    verdict: str
    certificate: Optional[ResolubleEquation] = None
    witness: Optional[Factors] = None
    infeasibility: Mapping[Factors, Fraction] = field(default_factory=dict)
    mh_verified: bool = False

    @property
    def resoluble(self) -> bool:
        return self.verdict == RESOLUBLE

    @property
    def witness_text(self) -> str:
        return render_factors(self.witness) if self.witness else ""


@dataclass(frozen=True)
class ClassifyReport:
    system: str
    verdicts: Tuple[EquationVerdict, ...]

    @property
    def resoluble(self) -> bool:
        return all(v.resoluble for v in self.verdicts)

    @property
    def certificate(self) -> Optional[ResolubleCertificate]:
        if not self.resoluble:
            return None
        return ResolubleCertificate(tuple(v.certificate for v in self.verdicts))


def decompose_equation(sys: PDESystem, beta: int, column_order: Optional[ColumnOrder] = None) -> EquationVerdict:
    eq = sys.equations[beta - 1]
    cs = build_coefficient_system(sys, beta, column_order)
    elim = eliminate(cs)
    bad = elim.inconsistent_rows()
    if bad:
        y = elim.combos[bad[0]]
        if not check_infeasibility(cs, y):
            raise DecompositionFailed(f"equation {beta}: elimination produced an invalid infeasibility row")
        if not eliminate(cs, reverse=True).inconsistent_rows():
            raise DecompositionFailed(f"equation {beta}: infeasibility not confirmed under reversed ordering")
        witness = next(cs.rows[r] for r in sorted(y) if not cs.rhs[r].is_zero())
        logger.info(f"❌ equation {beta} not resoluble, witness {render_factors(witness)}")
        return EquationVerdict(
            beta,
            NOT_RESOLUBLE,
            witness=witness,
            infeasibility={cs.rows[r]: v for r, v in sorted(y.items())},
        )

    terms: List[CertificateTerm] = []
    remainder = split_omega(expand_ansatz(sys, eq.lhs)).get((), Expr.zero())
    if not remainder.is_zero():
        terms.append(CertificateTerm(remainder, zero_index(sys.dim), 0))
    for c, col in enumerate(cs.columns):
        row = elim.pivots.get(c)
        value = elim.rhs[row] if row is not None else Expr.zero()
        if not value.is_zero():
            terms.append(CertificateTerm(value, col.p, col.l))
    entry = ResolubleEquation(beta, tuple(terms))
    if not expr_equal(entry.expand(sys.dim), expand_ansatz(sys, eq.lhs)):
        raise DecompositionFailed(f"equation {beta}: solver certificate fails its identity")
    logger.info(f"✅ equation {beta} resoluble with {len(terms)} certificate terms")
    return EquationVerdict(beta, RESOLUBLE, certificate=entry)


def resoluble_decompose(sys: PDESystem, column_order: Optional[ColumnOrder] = None) -> ClassifyReport:
    """Decide resolubility per equation; certificates are re-verified before being returned."""
    mh = mh_status(sys)
    verdicts = tuple(
        replace(decompose_equation(sys, eq.beta, column_order), mh_verified=mh.get(eq.beta, False))
        for eq in sys.equations
    )
    report = ClassifyReport(sys.name, verdicts)
    if report.resoluble and not verify_certificate(sys, report.certificate):
        raise DecompositionFailed("assembled certificate fails verification")
    return report


# --- MH certificates -------------------------------------------------------

@dataclass(frozen=True)
class MHTerm:
    outer: LinearOpSpec
    pairs: Tuple[Tuple[Tuple[int, int], LinearOpSpec], ...]

    def __post_init__(self):
        for (alpha, alpha2), op in self.pairs:
            if op.order > 1:
                raise MHOrderError(f"P entry for ({alpha}, {alpha2}) has order {op.order}; at most 1 allowed")


@dataclass(frozen=True)
class MHEquation:
    beta: int
    linear: Tuple[Tuple[int, LinearOpSpec], ...] = ()
    quadratic: Tuple[MHTerm, ...] = ()


@dataclass(frozen=True)
class MHCertificate:
    equations: Tuple[MHEquation, ...]

    def equation(self, beta: int) -> MHEquation:
        for eq in self.equations:
            if eq.beta == beta:
                return eq
        return MHEquation(beta)


def mh_certificate_from_system(sys: PDESystem) -> Optional[MHCertificate]:
    """The certificate declared by `mh` lines; None if the input has none."""
    if not sys.has_mh_block:
        return None
    equations = []
    for eq in sys.equations:
        linear = tuple((d.alpha, d.op) for d in sys.mh_linear if d.beta == eq.beta)
        quadratic = tuple(MHTerm(d.outer, d.pairs) for d in sys.mh_quadratic if d.beta == eq.beta)
        equations.append(MHEquation(eq.beta, linear, quadratic))
    return MHCertificate(tuple(equations))


def quadratic_form(sys: PDESystem, term: MHTerm) -> Expr:
    """Σ_{α,α'} U_α·(P_{α,α'} U_α')."""
    total = Expr.zero()
    for (alpha, alpha2), op in term.pairs:
        total = total + sys.unknown(alpha) * apply_linear_op(op, sys.unknown(alpha2))
    return total


def mh_expand(sys: PDESystem, entry: MHEquation) -> Expr:
    total = Expr.zero()
    for alpha, op in entry.linear:
        total = total + apply_linear_op(op, sys.unknown(alpha))
    for term in entry.quadratic:
        total = total + apply_linear_op(term.outer, quadratic_form(sys, term))
    return total


def mh_verify_equation(sys: PDESystem, cert: MHCertificate, beta: int) -> bool:
    return expr_equal(mh_expand(sys, cert.equation(beta)), operator_expr(sys, beta))


def mh_verify(sys: PDESystem, cert: MHCertificate) -> bool:
    return all(mh_verify_equation(sys, cert, eq.beta) for eq in sys.equations)


def mh_to_resoluble(sys: PDESystem, cert: MHCertificate) -> ResolubleCertificate:
    """Resoluble certificate of a verified MH system, via its expanded MH form."""
    if not mh_verify(sys, cert):
        raise DecompositionFailed("MH certificate does not verify; no decomposition attempted")
    expanded = tuple(
        replace(eq, lhs=mh_expand(sys, cert.equation(eq.beta))) for eq in sys.equations
    )
    report = resoluble_decompose(replace(sys, equations=expanded, mh_linear=(), mh_quadratic=()))
    if not report.resoluble:
        failed = [v.beta for v in report.verdicts if not v.resoluble]
        raise DecompositionFailed(f"verified MH system has non-resoluble equations {failed}")
    return report.certificate


def _detect_equation(sys: PDESystem, eq: Equation) -> Optional[MHEquation]:
    linear: Dict[int, List[Tuple[Expr, MultiIndex]]] = {}
    quadratic: List[MHTerm] = []
    for mono in eq.lhs.monomials:
        u_atoms = [a for a in mono.factors if a.kind == AtomKind.UNKNOWN]
        rest = tuple(a for a in mono.factors if a.kind != AtomKind.UNKNOWN)
        coef = Expr.from_monomials([(mono.coefficient, rest)])
        if len(u_atoms) == 1:
            linear.setdefault(u_atoms[0].alpha, []).append((coef, u_atoms[0].jet))
        elif len(u_atoms) == 2:
            first, second = u_atoms
            if not first.is_base:
                first, second = second, first
            if not first.is_base or index_order(second.jet) > 1:
                return None
            pair = ((first.alpha, second.alpha), LinearOpSpec.derivative(second.jet))
            quadratic.append(MHTerm(LinearOpSpec.identity(sys.dim, coef), (pair,)))
        else:
            return None
    return MHEquation(
        eq.beta,
        tuple((alpha, LinearOpSpec(tuple(terms))) for alpha, terms in sorted(linear.items())),
        tuple(quadratic),
    )


def detect_mh(sys: PDESystem) -> Optional[MHCertificate]:
    """Best-effort match of c·D^qU_α and c·U_α·D^pU_α' (|p| <= 1) terms; None if any equation misses."""
    equations = []
    for eq in sys.equations:
        entry = _detect_equation(sys, eq)
        if entry is None:
            logger.debug(f"⚠️ MH detection gave up on equation {eq.beta}")
            return None
        equations.append(entry)
    cert = MHCertificate(tuple(equations))
    return cert if mh_verify(sys, cert) else None


def mh_status(sys: PDESystem) -> Dict[int, bool]:
    """Per equation: verified by the declared certificate, else by detection."""
    try:
        declared = mh_certificate_from_system(sys)
    except MHOrderError as exc:
        logger.warning(f"⚠️ declared MH certificate rejected: {exc}")
        declared = None
    if declared is not None:
        return {eq.beta: mh_verify_equation(sys, declared, eq.beta) for eq in sys.equations}
    detected = detect_mh(sys)
    return {eq.beta: detected is not None for eq in sys.equations}


# --- JSON round trip -------------------------------------------------------

def certificate_to_json(cert: ResolubleCertificate) -> List[dict]:
    return [
        {
            "beta": eq.beta,
            "terms": [
                {"multiplier": render_text(t.multiplier), "p": list(t.p), "l": t.l} for t in eq.terms
            ],
        }
        for eq in cert.equations
    ]


def certificate_from_json(data: Sequence[Mapping], sys: PDESystem) -> ResolubleCertificate:
    equations = []
    for item in data:
        terms = tuple(
            CertificateTerm(parse_expression(t["multiplier"], sys), tuple(int(v) for v in t["p"]), int(t["l"]))
            for t in item["terms"]
        )
        equations.append(ResolubleEquation(int(item["beta"]), terms))
    return ResolubleCertificate(tuple(equations))
