"""
Heaviside-Dirac generalized expressions.

A GenExpr is a finite map {1, H_γ, D^l δ_γ} -> smooth Expr coefficient. The
calculus is the rule set of the junction theory:

    D_i H_γ          = γ_(i) δ_γ
    D_i (D^l δ_γ)    = γ_(i) D^(l+1) δ_γ
    γ δ_γ            = 0
    γ D^(l+1) δ_γ    = -(l+1) D^l δ_γ

plus the K-operator expansion D^p H_γ = Σ_l (K_{p,l} γ) D^l δ_γ.
"""

from __future__ import annotations

import logging
import random
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Dict, Iterator, Mapping, Optional, Tuple

from core.errors import KOperatorRangeError, UnsupportedDistributionalProduct
from core.symcore import (
    AtomKind,
    Expr,
    ExprLike,
    Factors,
    MultiIndex,
    as_expr,
    gamma_jet,
    index_directions,
    index_order,
    total_derivative,
    unit_index,
    zero_index,
)

logger = logging.getLogger(__name__)

_ONE_RANK = 0
_HEAVISIDE_RANK = 1
_DIRAC_RANK = 2


@dataclass(frozen=True, order=True)
class DistAtom:
    """One < Heaviside < DiracDeriv(0) < DiracDeriv(1) < ..."""

    rank: int
    order: int = 0

    @property
    def is_one(self) -> bool:
        return self.rank == _ONE_RANK

    @property
    def is_heaviside(self) -> bool:
        return self.rank == _HEAVISIDE_RANK

    @property
    def is_dirac(self) -> bool:
        return self.rank == _DIRAC_RANK

    @property
    def tag(self) -> str:
        return ("one", "heaviside", "delta")[self.rank]

    def __str__(self) -> str:
        if self.is_dirac:
            return "delta" if self.order == 0 else f"D^{self.order}delta"
        return "H" if self.is_heaviside else "1"


ONE = DistAtom(_ONE_RANK)
HEAVISIDE = DistAtom(_HEAVISIDE_RANK)


def dirac(l: int) -> DistAtom:
    if l < 0:
        raise ValueError("Dirac derivative order must be >= 0")
    return DistAtom(_DIRAC_RANK, l)


DELTA = dirac(0)


def gamma_symbol(n: int) -> Expr:
    return Expr.atom(gamma_jet(zero_index(n)))


def gamma_derivative(p: MultiIndex) -> Expr:
    return Expr.atom(gamma_jet(p))


class GenExpr:
    """Immutable map DistAtom -> Expr over a fixed space dimension."""

    __slots__ = ("dim", "_parts")

    def __init__(self, dim: int, parts: Optional[Mapping[DistAtom, ExprLike]] = None):
        self.dim = dim
        self._parts: Dict[DistAtom, Expr] = {}
        for atom, coef in (parts or {}).items():
            coef = as_expr(coef)
            if not coef.is_zero():
                self._parts[atom] = coef

    @classmethod
    def smooth(cls, dim: int, coef: ExprLike) -> "GenExpr":
        return cls(dim, {ONE: coef})

    @classmethod
    def heaviside(cls, dim: int, coef: ExprLike = 1) -> "GenExpr":
        return cls(dim, {HEAVISIDE: coef})

    @classmethod
    def dirac(cls, dim: int, l: int = 0, coef: ExprLike = 1) -> "GenExpr":
        return cls(dim, {dirac(l): coef})

    @property
    def parts(self) -> Mapping[DistAtom, Expr]:
        return self._parts

    def coefficient(self, atom: DistAtom) -> Expr:
        return self._parts.get(atom, Expr.zero())

    def items(self) -> Iterator[Tuple[DistAtom, Expr]]:
        for atom in sorted(self._parts):
            yield atom, self._parts[atom]

    def is_zero(self) -> bool:
        return not self._parts

    def is_smooth(self) -> bool:
        return all(a.is_one for a in self._parts)

    def has_dirac(self) -> bool:
        return any(a.is_dirac for a in self._parts)

    def _check_dim(self, other: "GenExpr") -> None:
        if other.dim != self.dim:
            raise ValueError(f"dimension mismatch: {self.dim} vs {other.dim}")

    def __add__(self, other: "GenExpr") -> "GenExpr":
        self._check_dim(other)
        parts = dict(self._parts)
        for atom, coef in other._parts.items():
            parts[atom] = parts.get(atom, Expr.zero()) + coef
        return GenExpr(self.dim, parts)

    def __neg__(self) -> "GenExpr":
        return GenExpr(self.dim, {a: -c for a, c in self._parts.items()})

    def __sub__(self, other: "GenExpr") -> "GenExpr":
        return self + (-other)

    def scale(self, coef: ExprLike) -> "GenExpr":
        coef = as_expr(coef)
        return GenExpr(self.dim, {a: coef * c for a, c in self._parts.items()})

    def __mul__(self, other: "GenExpr") -> "GenExpr":
        return gen_mul(self, other)

    def __eq__(self, other) -> bool:
        if not isinstance(other, GenExpr):
            return NotImplemented
        return self.dim == other.dim and self._parts == other._parts

    def __hash__(self) -> int:
        return hash((self.dim, frozenset(self._parts.items())))

    def __repr__(self) -> str:
        inner = ", ".join(f"{a}: {c}" for a, c in self.items())
        return f"GenExpr({{{inner}}})"


def gen_mul(g1: GenExpr, g2: GenExpr) -> GenExpr:
    """Product inside the resoluble calculus: smooth·anything and H·H = H only."""
    g1._check_dim(g2)
    if g1.is_smooth():
        return g2.scale(g1.coefficient(ONE))
    if g2.is_smooth():
        return g1.scale(g2.coefficient(ONE))
    if g1.has_dirac() or g2.has_dirac():
        raise UnsupportedDistributionalProduct(
            f"product of {g1!r} and {g2!r} needs H·δ or δ·δ, which the calculus does not define"
        )
    a, b = g1.coefficient(ONE), g1.coefficient(HEAVISIDE)
    c, d = g2.coefficient(ONE), g2.coefficient(HEAVISIDE)
    # (a + bH)(c + dH) = ac + (ad + bc + bd) H, using H·H = H
    return GenExpr(g1.dim, {ONE: a * c, HEAVISIDE: a * d + b * c + b * d})


def derive_gen(g: GenExpr, i: int) -> GenExpr:
    """D_i with Leibniz over parts."""
    n = g.dim
    gamma_i = gamma_derivative(unit_index(n, i))
    parts: Dict[DistAtom, Expr] = {}

    def add(atom: DistAtom, coef: Expr) -> None:
        parts[atom] = parts.get(atom, Expr.zero()) + coef

    for atom, coef in g.parts.items():
        add(atom, total_derivative(coef, i))
        if atom.is_heaviside:
            add(DELTA, coef * gamma_i)
        elif atom.is_dirac:
            add(dirac(atom.order + 1), coef * gamma_i)
    return GenExpr(n, parts)


def derive_gen_multi(g: GenExpr, p: MultiIndex) -> GenExpr:
    for i in index_directions(p):
        g = derive_gen(g, i)
    return g


def apply_linear_op_gen(op, g: GenExpr) -> GenExpr:
    """Σ c_q D^q applied to a generalized expression."""
    result = GenExpr(g.dim)
    for coef, q in op.terms:
        result = result + derive_gen_multi(g, q).scale(coef)
    return result


@lru_cache(maxsize=4096)
def _k(p: MultiIndex, l: int) -> Expr:
    order = index_order(p)
    if l < 0 or l >= order:
        return Expr.zero()
    n = len(p)
    if order == 1:
        return gamma_derivative(p)
    # peel the last direction so lower directions are applied first
    last = max(k for k, v in enumerate(p) if v)
    q = unit_index(n, last + 1)
    rest = tuple(v - 1 if k == last else v for k, v in enumerate(p))
    return total_derivative(_k(rest, l), last + 1) + _k(rest, l - 1) * gamma_derivative(q)


def k_operator(p: MultiIndex, l: int) -> Expr:
    """K_{p,l} γ from the recurrence K_{p+q,l} = D^q K_{p,l} + K_{p,l-1} D^q γ."""
    order = index_order(p)
    if order < 1:
        raise KOperatorRangeError(f"K operator needs |p| >= 1, got {p}")
    if not 0 <= l <= order - 1:
        raise KOperatorRangeError(f"K_{{p,l}} needs 0 <= l <= {order - 1}, got l={l}")
    return _k(tuple(p), l)


def expand_heaviside_derivative(p: MultiIndex) -> GenExpr:
    """D^p H_γ = Σ_{0<=l<|p|} (K_{p,l} γ) D^l δ_γ."""
    order = index_order(p)
    if order < 1:
        raise KOperatorRangeError(f"expansion needs |p| >= 1, got {p}")
    return GenExpr(len(p), {dirac(l): k_operator(p, l) for l in range(order)})


# --- γ·δ reduction ---------------------------------------------------------

def _gamma_power(factors: Factors) -> int:
    return sum(1 for a in factors if a.kind == AtomKind.GAMMA and a.is_base)


def _drop_one_gamma(factors: Factors) -> Factors:
    for k, a in enumerate(factors):
        if a.kind == AtomKind.GAMMA and a.is_base:
            return factors[:k] + factors[k + 1:]
    return factors


def _redexes(g: GenExpr):
    for atom, coef in g.items():
        if not atom.is_dirac:
            continue
        for factors in sorted(coef.terms):
            if _gamma_power(factors):
                yield atom, factors


def rewrite_step(g: GenExpr, atom: DistAtom, factors: Factors) -> GenExpr:
    """One application of γδ = 0 or γ D^l δ = -l D^(l-1) δ to a single monomial."""
    coef = g.coefficient(atom).terms[factors]
    parts = dict(g.parts)
    parts[atom] = parts[atom] - Expr.from_monomials([(coef, factors)])
    if atom.order > 0:
        target = dirac(atom.order - 1)
        moved = Expr.from_monomials([(-atom.order * coef, _drop_one_gamma(factors))])
        parts[target] = parts.get(target, Expr.zero()) + moved
    return GenExpr(g.dim, parts)


def reduce_gamma_delta(g: GenExpr, rng: Optional[random.Random] = None) -> GenExpr:
    """Rewrite to fixpoint. With `rng`, redexes are picked in random order."""
    steps = 0
    while True:
        redexes = list(_redexes(g))
        if not redexes:
            break
        atom, factors = rng.choice(redexes) if rng is not None else redexes[0]
        g = rewrite_step(g, atom, factors)
        steps += 1
    if steps:
        logger.debug(f"🔍 γδ reduction reached fixpoint after {steps} steps")
    return g


def reduce_gamma_delta_closed(g: GenExpr) -> GenExpr:
    """Closed form of the fixpoint: γ^k D^l δ -> (-1)^k l!/(l-k)! D^(l-k) δ, zero if k > l."""
    parts: Dict[DistAtom, Expr] = {}
    for atom, coef in g.parts.items():
        if not atom.is_dirac:
            parts[atom] = parts.get(atom, Expr.zero()) + coef
            continue
        for factors, value in coef.terms.items():
            k = _gamma_power(factors)
            if k > atom.order:
                continue
            rest = factors
            weight = Fraction(1)
            for step in range(k):
                rest = _drop_one_gamma(rest)
                weight *= -(atom.order - step)
            target = dirac(atom.order - k)
            parts[target] = parts.get(target, Expr.zero()) + Expr.from_monomials([(value * weight, rest)])
    return GenExpr(g.dim, parts)


def gen_normal_form(g: GenExpr) -> GenExpr:
    """Canonical coefficients with every γ·δ redex eliminated; idempotent."""
    return reduce_gamma_delta(GenExpr(g.dim, dict(g.parts)))
