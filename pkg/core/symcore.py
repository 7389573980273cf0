"""
Exact symbolic kernel - polynomial expressions over jet atoms.

Every smooth symbol the compiler touches (operators, traces, γ-jets, ansatz
multipliers) is an `Expr`: a finite sum of rational-coefficient monomials over
commuting `Atom`s. Jets are flat, so D^p U_α is one atom and differentiation
only bumps multi-indices. Canonical form makes equality decidable.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, replace
from enum import IntEnum
from fractions import Fraction
from itertools import product
from typing import Dict, Iterable, Iterator, List, Mapping, Optional, Sequence, Tuple, Union

from core.errors import InconsistentJetBinding

logger = logging.getLogger(__name__)

MultiIndex = Tuple[int, ...]
Scalar = Union[int, Fraction]

MINUS = 0
PLUS = 1
NO_SIDE = -1

GAMMA_NAME = "gamma"
OMEGA_NAME = "omega"


# --- multi-indices ---------------------------------------------------------

def zero_index(n: int) -> MultiIndex:
    return (0,) * n


def unit_index(n: int, i: int) -> MultiIndex:
    """Unit multi-index for direction i (1-based)."""
    if not 1 <= i <= n:
        raise ValueError(f"direction {i} out of range 1..{n}")
    return tuple(1 if k == i - 1 else 0 for k in range(n))


def index_add(p: MultiIndex, q: MultiIndex) -> MultiIndex:
    if len(p) != len(q):
        raise ValueError(f"multi-index length mismatch: {p} vs {q}")
    return tuple(a + b for a, b in zip(p, q))


def index_order(p: MultiIndex) -> int:
    return sum(p)


def index_directions(p: MultiIndex) -> List[int]:
    """1-based directions with repetition, direction 1 first."""
    out: List[int] = []
    for k, count in enumerate(p):
        out.extend([k + 1] * count)
    return out


def index_from_directions(n: int, directions: Iterable[int]) -> MultiIndex:
    p = [0] * n
    for i in directions:
        if not 1 <= i <= n:
            raise ValueError(f"direction {i} out of range 1..{n}")
        p[i - 1] += 1
    return tuple(p)


def multi_indices(n: int, max_order: int) -> List[MultiIndex]:
    """All p in N^n with |p| <= max_order, sorted by (order, p)."""
    found = [p for p in product(range(max_order + 1), repeat=n) if sum(p) <= max_order]
    return sorted(found, key=lambda p: (sum(p), p))


# --- atoms -----------------------------------------------------------------

class AtomKind(IntEnum):
    COORDINATE = 0
    COEFF = 1
    UNKNOWN = 2
    TRACE = 3
    GAMMA = 4
    PSI = 5
    CHI = 6
    OMEGA = 7


@dataclass(frozen=True, order=True, slots=True)
class Atom:
    """A commuting symbol. Field order is the canonical atom order."""

    kind: AtomKind
    alpha: int = 0
    side: int = NO_SIDE
    name: str = ""
    jet: MultiIndex = ()

    @property
    def has_jet(self) -> bool:
        return self.kind != AtomKind.COORDINATE

    @property
    def is_base(self) -> bool:
        return not any(self.jet)

    def base(self) -> "Atom":
        return replace(self, jet=zero_index(len(self.jet)))

    def with_jet(self, jet: MultiIndex) -> "Atom":
        return replace(self, jet=tuple(jet))

    def label(self) -> str:
        """Identifier of the base symbol in DSL syntax."""
        if self.kind == AtomKind.TRACE:
            return ("up_" if self.side == PLUS else "um_") + self.name
        if self.kind == AtomKind.PSI:
            return "psi_" + self.name
        if self.kind == AtomKind.CHI:
            return "chi_" + self.name
        return self.name

    def __str__(self) -> str:
        if self.has_jet and not self.is_base:
            dirs = ",".join(str(i) for i in index_directions(self.jet))
            return f"D[{dirs}]{self.label()}"
        return self.label()


def coordinate(i: int, name: str) -> Atom:
    return Atom(AtomKind.COORDINATE, alpha=i, name=name)


def coeff_fn(name: str, jet: MultiIndex) -> Atom:
    return Atom(AtomKind.COEFF, name=name, jet=tuple(jet))


def unknown_jet(alpha: int, name: str, jet: MultiIndex) -> Atom:
    return Atom(AtomKind.UNKNOWN, alpha=alpha, name=name, jet=tuple(jet))


def trace_jet(side: int, alpha: int, name: str, jet: MultiIndex) -> Atom:
    return Atom(AtomKind.TRACE, alpha=alpha, side=side, name=name, jet=tuple(jet))


def gamma_jet(jet: MultiIndex) -> Atom:
    return Atom(AtomKind.GAMMA, name=GAMMA_NAME, jet=tuple(jet))


def psi_jet(alpha: int, name: str, jet: MultiIndex) -> Atom:
    return Atom(AtomKind.PSI, alpha=alpha, name=name, jet=tuple(jet))


def chi_jet(alpha: int, name: str, jet: MultiIndex) -> Atom:
    return Atom(AtomKind.CHI, alpha=alpha, name=name, jet=tuple(jet))


def omega_jet(jet: MultiIndex) -> Atom:
    return Atom(AtomKind.OMEGA, name=OMEGA_NAME, jet=tuple(jet))


def atom_derivative(atom: Atom, i: int) -> Union[Atom, int]:
    """d/dx_i of a single atom: a bumped atom, or the constant 0/1 for coordinates."""
    if atom.kind == AtomKind.COORDINATE:
        return 1 if atom.alpha == i else 0
    if not 1 <= i <= len(atom.jet):
        raise ValueError(f"direction {i} out of range for {atom}")
    jet = list(atom.jet)
    jet[i - 1] += 1
    return replace(atom, jet=tuple(jet))


# --- expressions -----------------------------------------------------------

Factors = Tuple[Atom, ...]


@dataclass(frozen=True)
class Monomial:
    coefficient: Fraction
    factors: Factors

    @property
    def degree(self) -> int:
        return len(self.factors)


def _monomial_key(factors: Factors):
    return (len(factors), factors)


class Expr:
    """Immutable polynomial over atoms, always held in canonical form."""

    __slots__ = ("_terms", "_hash", "_sorted")

    def __init__(self, terms: Optional[Mapping[Factors, Fraction]] = None):
        clean: Dict[Factors, Fraction] = {}
        for factors, coef in (terms or {}).items():
            if coef:
                clean[factors] = Fraction(coef)
        self._terms = clean
        self._hash: Optional[int] = None
        self._sorted: Optional[Tuple[Monomial, ...]] = None

    # constructors
    @classmethod
    def _raw(cls, terms: Dict[Factors, Fraction]) -> "Expr":
        obj = cls.__new__(cls)
        obj._terms = {k: v for k, v in terms.items() if v}
        obj._hash = None
        obj._sorted = None
        return obj

    @classmethod
    def zero(cls) -> "Expr":
        return cls._raw({})

    @classmethod
    def constant(cls, value: Scalar) -> "Expr":
        return cls._raw({(): Fraction(value)})

    @classmethod
    def atom(cls, atom: Atom) -> "Expr":
        return cls._raw({(atom,): Fraction(1)})

    @classmethod
    def from_monomials(cls, monomials: Iterable[Union[Monomial, Tuple[Scalar, Iterable[Atom]]]]) -> "Expr":
        acc: Dict[Factors, Fraction] = {}
        for mono in monomials:
            if isinstance(mono, Monomial):
                coef, factors = mono.coefficient, mono.factors
            else:
                coef, factors = mono
            key = tuple(sorted(factors))
            acc[key] = acc.get(key, Fraction(0)) + Fraction(coef)
        return cls._raw(acc)

    # inspection
    @property
    def terms(self) -> Mapping[Factors, Fraction]:
        return self._terms

    @property
    def monomials(self) -> Tuple[Monomial, ...]:
        if self._sorted is None:
            self._sorted = tuple(
                Monomial(self._terms[k], k) for k in sorted(self._terms, key=_monomial_key)
            )
        return self._sorted

    def is_zero(self) -> bool:
        return not self._terms

    def is_constant(self) -> bool:
        return all(not k for k in self._terms)

    def constant_value(self) -> Fraction:
        return self._terms.get((), Fraction(0))

    def atoms(self) -> set:
        return {a for k in self._terms for a in k}

    def degree(self, kinds: Optional[Sequence[AtomKind]] = None) -> int:
        """Max number of factors per monomial, optionally counting only some atom kinds."""
        best = 0
        for k in self._terms:
            count = len(k) if kinds is None else sum(1 for a in k if a.kind in kinds)
            best = max(best, count)
        return best

    # arithmetic
    @staticmethod
    def _coerce(other) -> "Expr":
        if isinstance(other, Expr):
            return other
        if isinstance(other, (int, Fraction)):
            return Expr.constant(other)
        return NotImplemented

    def __add__(self, other) -> "Expr":
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        acc = dict(self._terms)
        for k, v in other._terms.items():
            acc[k] = acc.get(k, Fraction(0)) + v
        return Expr._raw(acc)

    __radd__ = __add__

    def __neg__(self) -> "Expr":
        return Expr._raw({k: -v for k, v in self._terms.items()})

    def __sub__(self, other) -> "Expr":
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other) -> "Expr":
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return other + (-self)

    def scale(self, factor: Scalar) -> "Expr":
        factor = Fraction(factor)
        if not factor:
            return Expr.zero()
        return Expr._raw({k: v * factor for k, v in self._terms.items()})

    def __mul__(self, other) -> "Expr":
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        if not isinstance(other, Expr):
            return NotImplemented
        acc: Dict[Factors, Fraction] = {}
        for k1, v1 in self._terms.items():
            for k2, v2 in other._terms.items():
                key = tuple(sorted(k1 + k2)) if k1 and k2 else (k1 or k2)
                acc[key] = acc.get(key, Fraction(0)) + v1 * v2
        return Expr._raw(acc)

    __rmul__ = __mul__

    def __truediv__(self, other) -> "Expr":
        if isinstance(other, (int, Fraction)):
            return self.scale(Fraction(1) / Fraction(other))
        return NotImplemented

    def __pow__(self, exponent: int) -> "Expr":
        if not isinstance(exponent, int) or exponent < 0:
            raise ValueError("only non-negative integer powers are supported")
        result = Expr.constant(1)
        base = self
        while exponent:
            if exponent & 1:
                result = result * base
            exponent >>= 1
            if exponent:
                base = base * base
        return result

    # comparison
    def __eq__(self, other) -> bool:
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self._terms == other._terms

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(frozenset(self._terms.items()))
        return self._hash

    def __bool__(self) -> bool:
        return bool(self._terms)

    def __iter__(self) -> Iterator[Monomial]:
        return iter(self.monomials)

    def __repr__(self) -> str:
        return f"Expr({render_text(self)!r})"

    def __str__(self) -> str:
        return render_text(self)


ExprLike = Union[Expr, int, Fraction]


def as_expr(value: ExprLike) -> Expr:
    if isinstance(value, Expr):
        return value
    return Expr.constant(value)


# --- rendering (DSL syntax) ------------------------------------------------

def _format_coefficient(value: Fraction) -> str:
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"


def render_factors(factors: Factors) -> str:
    parts: List[str] = []
    i = 0
    while i < len(factors):
        j = i
        while j < len(factors) and factors[j] == factors[i]:
            j += 1
        power = j - i
        parts.append(str(factors[i]) + (f"^{power}" if power > 1 else ""))
        i = j
    return "*".join(parts)


def render_text(e: Expr) -> str:
    """Canonical rendering in the input DSL's expression syntax (reparseable)."""
    if e.is_zero():
        return "0"
    out: List[str] = []
    for idx, mono in enumerate(e.monomials):
        coef = mono.coefficient
        sign = "-" if coef < 0 else "+"
        mag = abs(coef)
        body = render_factors(mono.factors)
        if not body:
            text = _format_coefficient(mag)
        elif mag == 1:
            text = body
        else:
            text = f"{_format_coefficient(mag)}*{body}"
        if idx == 0:
            out.append(("-" if sign == "-" else "") + text)
        else:
            out.append(f" {sign} {text}")
    return "".join(out)


# --- operations ------------------------------------------------------------

def normalize(e: Union[Expr, Iterable]) -> Expr:
    """Canonical form. Accepts an Expr or raw (coefficient, factors) pairs."""
    if isinstance(e, Expr):
        return Expr._raw(dict(e.terms))
    return Expr.from_monomials(e)


def expr_equal(e1: ExprLike, e2: ExprLike) -> bool:
    return as_expr(e1) == as_expr(e2)


def total_derivative(e: ExprLike, i: int) -> Expr:
    """Leibniz rule monomial-wise; jets bump, coordinates give 1 in their own direction."""
    e = as_expr(e)
    if i < 1:
        raise ValueError(f"direction {i} must be >= 1")
    acc: Dict[Factors, Fraction] = {}
    for factors, coef in e.terms.items():
        for k, atom in enumerate(factors):
            d = atom_derivative(atom, i)
            if isinstance(d, int):
                if d == 0:
                    continue
                key = factors[:k] + factors[k + 1:]
            else:
                key = tuple(sorted(factors[:k] + factors[k + 1:] + (d,)))
            acc[key] = acc.get(key, Fraction(0)) + coef
    return Expr._raw(acc)


def derivative_multi(e: ExprLike, p: MultiIndex) -> Expr:
    """D^p e, applying direction 1 first, then 2, ..."""
    result = as_expr(e)
    for i in index_directions(p):
        if result.is_zero():
            break
        result = total_derivative(result, i)
    return result


def close_bindings(bindings: Mapping[Atom, Expr], atoms: Iterable[Atom]) -> Dict[Atom, Expr]:
    """Extend bindings of base atoms to every jet of them appearing in `atoms`."""
    closed: Dict[Atom, Expr] = dict(bindings)
    for atom in atoms:
        if atom in closed or not atom.has_jet or atom.is_base:
            continue
        base = atom.base()
        if base in bindings:
            closed[atom] = derivative_multi(bindings[base], atom.jet)
    return closed


def substitute(e: ExprLike, bindings: Mapping[Atom, ExprLike], close_jets: bool = False) -> Expr:
    """Simultaneous replacement of atoms, then canonical normalization."""
    e = as_expr(e)
    if not bindings:
        return e
    images = {a: as_expr(v) for a, v in bindings.items()}

    for atom, image in images.items():
        if atom.has_jet and not atom.is_base and atom.base() in images:
            expected = derivative_multi(images[atom.base()], atom.jet)
            if expected != image:
                raise InconsistentJetBinding(
                    f"{atom} is bound to {image}, but the derivative of its base binding is {expected}"
                )

    present = e.atoms()
    if close_jets:
        images = close_bindings(images, present)
    else:
        for atom in present:
            if atom.has_jet and not atom.is_base and atom not in images and atom.base() in images:
                raise InconsistentJetBinding(
                    f"{atom} has no binding while {atom.base()} is bound; request jet closure"
                )

    power_cache: Dict[Tuple[Atom, int], Expr] = {}
    result = Expr.zero()
    for mono in e.monomials:
        term = Expr.constant(mono.coefficient)
        i = 0
        factors = mono.factors
        while i < len(factors):
            j = i
            while j < len(factors) and factors[j] == factors[i]:
                j += 1
            atom, power = factors[i], j - i
            if atom in images:
                key = (atom, power)
                if key not in power_cache:
                    power_cache[key] = images[atom] ** power
                term = term * power_cache[key]
            else:
                term = term * Expr._raw({(atom,) * power: Fraction(1)})
            i = j
        result = result + term
    return result


@dataclass(frozen=True)
class LinearOpSpec:
    """Linear differential operator Σ c_q(x) D^q with coefficients in x-atoms only."""

    terms: Tuple[Tuple[Expr, MultiIndex], ...]

    def __post_init__(self):
        for coef, q in self.terms:
            for atom in coef.atoms():
                if atom.kind not in (AtomKind.COORDINATE, AtomKind.COEFF):
                    raise ValueError(f"operator coefficient {coef} involves {atom}; only x-atoms allowed")
        if len({len(q) for _, q in self.terms}) > 1:
            raise ValueError("operator multi-indices have mixed lengths")

    @classmethod
    def identity(cls, n: int, coefficient: ExprLike = 1) -> "LinearOpSpec":
        return cls(((as_expr(coefficient), zero_index(n)),))

    @classmethod
    def derivative(cls, p: MultiIndex, coefficient: ExprLike = 1) -> "LinearOpSpec":
        return cls(((as_expr(coefficient), tuple(p)),))

    @property
    def order(self) -> int:
        return max((index_order(q) for c, q in self.terms if not c.is_zero()), default=0)

    def first_order_part(self) -> "LinearOpSpec":
        """The homogeneous first-order part (order-0 and higher terms dropped)."""
        return LinearOpSpec(tuple((c, q) for c, q in self.terms if index_order(q) == 1))

    def is_zero(self) -> bool:
        return all(c.is_zero() for c, _ in self.terms)

    def __add__(self, other: "LinearOpSpec") -> "LinearOpSpec":
        return LinearOpSpec(self.terms + other.terms)

    def __str__(self) -> str:
        return render_operator(self)


def render_operator(op: LinearOpSpec) -> str:
    """DSL rendering of an operator: `coef*D[i,j]` terms, bare coefficient for order 0."""
    pieces: List[str] = []
    merged: Dict[MultiIndex, Expr] = {}
    for coef, q in op.terms:
        merged[q] = merged.get(q, Expr.zero()) + coef
    for q in sorted(merged, key=lambda q: (index_order(q), q)):
        coef = merged[q]
        if coef.is_zero():
            continue
        dirs = index_directions(q)
        dpart = f"D[{','.join(str(i) for i in dirs)}]" if dirs else ""
        ctext = render_text(coef)
        if not dpart:
            text = ctext if len(coef.terms) == 1 else f"({ctext})"
        elif coef == Expr.constant(1):
            text = dpart
        elif coef == Expr.constant(-1):
            text = f"-{dpart}"
        else:
            text = (ctext if len(coef.terms) == 1 else f"({ctext})") + f"*{dpart}"
        pieces.append(text)
    if not pieces:
        return "0"
    out = pieces[0]
    for piece in pieces[1:]:
        out += f" - {piece[1:]}" if piece.startswith("-") else f" + {piece}"
    return out


def apply_linear_op(op: LinearOpSpec, e: ExprLike) -> Expr:
    e = as_expr(e)
    result = Expr.zero()
    for coef, q in op.terms:
        result = result + coef * derivative_multi(e, q)
    return result
