"""
Junction conditions for the jump ansatz U = U₋ + (U₊ - U₋)H_γ.

Two generators: the resoluble path pushes a certificate through ω = H_γ
(with H^l = H before differentiation), the MH path evaluates the two-sum
formula with its ½ weight directly. Both end in per-atom coefficients that
must vanish near Γ.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, Iterator, List, Optional, Sequence, Tuple

from core.distalg import (
    HEAVISIDE,
    ONE,
    DistAtom,
    GenExpr,
    apply_linear_op_gen,
    expand_heaviside_derivative,
    gamma_derivative,
    gen_normal_form,
)
from core.symcore import (
    MINUS,
    PLUS,
    AtomKind,
    Expr,
    apply_linear_op,
    chi_jet,
    expr_equal,
    index_order,
    psi_jet,
    substitute,
    trace_jet,
    zero_index,
)
from engine.classify import MHCertificate, ResolubleCertificate, mh_expand
from infra.pdemodel import PDESystem

logger = logging.getLogger(__name__)

REQUIRED = "required"
SATISFIED = "satisfied-by-hypothesis"

ON_GAMMA = "on Γ"
NEAR_GAMMA = "near Γ"
EVERYWHERE = "everywhere"


# --- trace bindings --------------------------------------------------------

def trace_symbol(sys: PDESystem, side: int, alpha: int) -> Expr:
    return Expr.atom(trace_jet(side, alpha, sys.unknowns[alpha - 1], zero_index(sys.dim)))


@dataclass(frozen=True)
class TraceBinding:
    """ψ_α -> U₋α and χ_α -> U₊α - U₋α, closed over jets on use."""

    sys: PDESystem

    def bindings(self) -> Dict:
        zero = zero_index(self.sys.dim)
        out = {}
        for alpha, name in enumerate(self.sys.unknowns, start=1):
            minus = trace_symbol(self.sys, MINUS, alpha)
            plus = trace_symbol(self.sys, PLUS, alpha)
            out[psi_jet(alpha, name, zero)] = minus
            out[chi_jet(alpha, name, zero)] = plus - minus
        return out

    def apply(self, e: Expr) -> Expr:
        return substitute(e, self.bindings(), close_jets=True)


def side_bindings(sys: PDESystem, side: int) -> Dict:
    return {sys.unknown_atom(alpha): trace_symbol(sys, side, alpha) for alpha in range(1, sys.a + 1)}


def trace_operator(sys: PDESystem, beta: int, side: int) -> Expr:
    """T_β evaluated on the trace U₋ or U₊."""
    return substitute(sys.equations[beta - 1].lhs, side_bindings(sys, side), close_jets=True)


# --- condition sets --------------------------------------------------------

@dataclass(frozen=True)
class JunctionCondition:
    beta: int
    atom: DistAtom
    coefficient: Expr
    status: str = REQUIRED

    @property
    def locus(self) -> str:
        if self.atom.is_dirac:
            return ON_GAMMA
        return NEAR_GAMMA if self.atom.is_heaviside else EVERYWHERE

    @property
    def required(self) -> bool:
        return self.status == REQUIRED


def _condition_key(c: JunctionCondition):
    return (c.beta, c.status != REQUIRED, c.atom)


@dataclass(frozen=True)
class JunctionConditionSet:
    dim: int
    b: int
    conditions: Tuple[JunctionCondition, ...] = ()

    @classmethod
    def from_parts(cls, dim: int, parts: Sequence[GenExpr], extra: Sequence[JunctionCondition] = ()) -> "JunctionConditionSet":
        conds: List[JunctionCondition] = list(extra)
        for beta, g in enumerate(parts, start=1):
            conds.extend(JunctionCondition(beta, atom, coef) for atom, coef in g.items())
        return cls(dim, len(parts), tuple(sorted(conds, key=_condition_key)))

    def __iter__(self) -> Iterator[JunctionCondition]:
        return iter(self.conditions)

    def __len__(self) -> int:
        return len(self.conditions)

    def for_equation(self, beta: int) -> List[JunctionCondition]:
        return [c for c in self.conditions if c.beta == beta]

    def required(self) -> List[JunctionCondition]:
        return [c for c in self.conditions if c.required]

    def part(self, beta: int) -> GenExpr:
        """Required conditions of equation β as one generalized expression."""
        g = GenExpr(self.dim)
        for c in self.for_equation(beta):
            if c.required:
                g = g + GenExpr(self.dim, {c.atom: c.coefficient})
        return g

    def coefficient(self, beta: int, atom: DistAtom) -> Expr:
        return self.part(beta).coefficient(atom)

    def satisfied(self) -> List[JunctionCondition]:
        return [c for c in self.conditions if not c.required]

    def is_empty(self) -> bool:
        return not self.conditions


# --- generators ------------------------------------------------------------

def _rhs_part(sys: PDESystem, beta: int) -> GenExpr:
    return GenExpr.smooth(sys.dim, sys.equations[beta - 1].rhs)


def junction_from_resoluble(sys: PDESystem, cert: ResolubleCertificate) -> JunctionConditionSet:
    """Σ_ρ T_ρ(U₋, U₊ - U₋)·D^p H_γ - f_β per equation, in normal form."""
    binding = TraceBinding(sys)
    parts: List[GenExpr] = []
    for eq in sys.equations:
        entry = cert.equation(eq.beta)
        g = GenExpr(sys.dim)
        for term in (entry.terms if entry is not None else ()):
            m = binding.apply(term.multiplier)
            if term.l == 0:
                if index_order(term.p) == 0:
                    g = g + GenExpr.smooth(sys.dim, m)
            elif index_order(term.p) == 0:
                g = g + GenExpr.heaviside(sys.dim, m)
            else:
                g = g + expand_heaviside_derivative(term.p).scale(m)
        parts.append(gen_normal_form(g - _rhs_part(sys, eq.beta)))
    logger.debug(f"🔍 resoluble path produced {len(parts)} equation parts")
    return JunctionConditionSet.from_parts(sys.dim, parts)


def first_order_gamma(sys: PDESystem, op) -> Expr:
    """Q H_γ = Σ c_q γ_(q) δ for the homogeneous first-order part Q of P; returns Σ c_q γ_(q)."""
    total = Expr.zero()
    for coef, q in op.first_order_part().terms:
        total = total + coef * gamma_derivative(q)
    return total


def junction_from_mh(sys: PDESystem, cert: MHCertificate) -> JunctionConditionSet:
    """The two-sum MH formula: L{[U₊PU₊ - U₋PU₋]H} + ½ L{(U₊+U₋)(U₊-U₋)·Q H}, plus the linear part."""
    half = Fraction(1, 2)
    parts: List[GenExpr] = []
    for eq in sys.equations:
        entry = cert.equation(eq.beta)
        minus_eval = substitute(mh_expand(sys, entry), side_bindings(sys, MINUS), close_jets=True)
        g = GenExpr.smooth(sys.dim, minus_eval)

        for alpha, op in entry.linear:
            jump = trace_symbol(sys, PLUS, alpha) - trace_symbol(sys, MINUS, alpha)
            g = g + apply_linear_op_gen(op, GenExpr.heaviside(sys.dim, jump))

        for term in entry.quadratic:
            smooth_jump = Expr.zero()
            dirac_coef = Expr.zero()
            for (alpha, alpha2), op in term.pairs:
                up_a, um_a = trace_symbol(sys, PLUS, alpha), trace_symbol(sys, MINUS, alpha)
                up_b, um_b = trace_symbol(sys, PLUS, alpha2), trace_symbol(sys, MINUS, alpha2)
                smooth_jump = smooth_jump + up_a * _apply_to_trace(sys, op, PLUS, alpha2) \
                    - um_a * _apply_to_trace(sys, op, MINUS, alpha2)
                dirac_coef = dirac_coef + ((up_a + um_a) * (up_b - um_b) * first_order_gamma(sys, op)).scale(half)
            inner = GenExpr.heaviside(sys.dim, smooth_jump) + GenExpr.dirac(sys.dim, 0, dirac_coef)
            g = g + apply_linear_op_gen(term.outer, inner)

        parts.append(gen_normal_form(g - _rhs_part(sys, eq.beta)))
    logger.debug(f"🔍 MH path produced {len(parts)} equation parts")
    return JunctionConditionSet.from_parts(sys.dim, parts)


def _apply_to_trace(sys: PDESystem, op, side: int, alpha: int) -> Expr:
    return apply_linear_op(op, trace_symbol(sys, side, alpha))


# --- simplification --------------------------------------------------------

def simplify_with_classical(conds: JunctionConditionSet, sys: PDESystem) -> JunctionConditionSet:
    """Use T_β(U±) = f_β: drop the smooth part, report T(U₊) - T(U₋) as satisfied by hypothesis."""
    out: List[JunctionCondition] = []
    for beta in range(1, conds.b + 1):
        t_minus = trace_operator(sys, beta, MINUS)
        t_plus = trace_operator(sys, beta, PLUS)
        f = sys.equations[beta - 1].rhs
        out.extend(c for c in conds.for_equation(beta) if not c.required)
        for atom, coef in conds.part(beta).items():
            if atom == ONE:
                residual = coef - (t_minus - f)
                if not residual.is_zero():
                    logger.warning(f"⚠️ equation {beta}: smooth part does not reduce to T(U-) - f")
                    out.append(JunctionCondition(beta, ONE, residual))
            elif atom == HEAVISIDE:
                classical = t_plus - t_minus
                residual = coef - classical
                if not classical.is_zero():
                    out.append(JunctionCondition(beta, HEAVISIDE, classical, SATISFIED))
                if not residual.is_zero():
                    out.append(JunctionCondition(beta, HEAVISIDE, residual))
            else:
                out.append(JunctionCondition(beta, atom, coef))
    return JunctionConditionSet(conds.dim, conds.b, tuple(sorted(out, key=_condition_key)))


def restrict_to_gamma(conds: JunctionConditionSet) -> JunctionConditionSet:
    """γδ reduction of each equation's required part; idempotent."""
    parts = [gen_normal_form(conds.part(beta)) for beta in range(1, conds.b + 1)]
    return JunctionConditionSet.from_parts(conds.dim, parts, conds.satisfied())


def conditions_equal(c1: JunctionConditionSet, c2: JunctionConditionSet) -> bool:
    if c1.b != c2.b:
        return False
    for beta in range(1, c1.b + 1):
        if c1.part(beta) != c2.part(beta):
            return False
        sat1 = {c.atom: c.coefficient for c in c1.for_equation(beta) if not c.required}
        sat2 = {c.atom: c.coefficient for c in c2.for_equation(beta) if not c.required}
        if sat1.keys() != sat2.keys() or any(not expr_equal(sat1[a], sat2[a]) for a in sat1):
            return False
    return True


def collapse_jump(conds: JunctionConditionSet, sys: PDESystem) -> JunctionConditionSet:
    """Bind U₊ := U₋ in every coefficient; zero entries disappear."""
    bindings = {
        trace_jet(PLUS, alpha, name, zero_index(sys.dim)): trace_symbol(sys, MINUS, alpha)
        for alpha, name in enumerate(sys.unknowns, start=1)
    }
    out = []
    for c in conds:
        coef = substitute(c.coefficient, bindings, close_jets=True)
        if not coef.is_zero():
            out.append(JunctionCondition(c.beta, c.atom, coef, c.status))
    return JunctionConditionSet(conds.dim, conds.b, tuple(sorted(out, key=_condition_key)))


def derive_conditions(sys: PDESystem, method: str = "resoluble",
                      cert: Optional[object] = None) -> JunctionConditionSet:
    """Generate, simplify against the classical traces and restrict to Γ."""
    if method == "mh":
        raw = junction_from_mh(sys, cert)
    else:
        raw = junction_from_resoluble(sys, cert)
    return restrict_to_gamma(simplify_with_classical(raw, sys))


def gamma_factor_groups(coef: Expr) -> List[Tuple[Tuple, Expr]]:
    """Split a coefficient by its γ-jet factors: [(γ-factors, cofactor)] in canonical order."""
    groups: Dict[Tuple, Dict] = {}
    for factors, value in coef.terms.items():
        key = tuple(a for a in factors if a.kind == AtomKind.GAMMA)
        rest = tuple(a for a in factors if a.kind != AtomKind.GAMMA)
        bucket = groups.setdefault(key, {})
        bucket[rest] = bucket.get(rest, Fraction(0)) + value
    ordered = sorted(groups, key=lambda k: (len(k), k))
    return [(key, Expr(groups[key])) for key in ordered if any(groups[key].values())]
