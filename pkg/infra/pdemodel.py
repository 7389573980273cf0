"""
PDE system model and DSL front end.

Grammar (one declaration per line, `#` starts a comment):

    system NAME
    dim N | coords t x | unknowns u v | coeffs nu c
    gamma: expr
    trace minus|plus u: expr
    coeff nu: expr
    box t: lo, hi
    eq: expr = expr
    mh BETA linear u: opexpr
    mh BETA quad opexpr { u v: opexpr ; ... }

Expressions are polynomials: NUMBER, identifiers, `D[i,j] IDENT`, `^ INT`,
parentheses, unary minus and division by constants.
"""

from __future__ import annotations

import logging
import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

from core.errors import ParseError
from core.symcore import (
    MINUS,
    PLUS,
    Atom,
    AtomKind,
    Expr,
    LinearOpSpec,
    MultiIndex,
    chi_jet,
    coeff_fn,
    coordinate,
    derivative_multi,
    gamma_jet,
    index_from_directions,
    omega_jet,
    psi_jet,
    render_operator,
    render_text,
    trace_jet,
    unknown_jet,
    zero_index,
)

logger = logging.getLogger(__name__)

ERROR = "error"

KEYWORDS = {"system", "dim", "coords", "unknowns", "coeffs", "gamma", "trace", "coeff", "box", "eq", "mh"}
RESERVED = {"D", "gamma", "omega"}
DERIVED_PREFIXES = ("psi_", "chi_", "um_", "up_")


def is_reserved(name: str) -> bool:
    """Names the grammar or the derived symbol table already uses."""
    return name in KEYWORDS or name in RESERVED or name.startswith(DERIVED_PREFIXES)


@dataclass(frozen=True)
class ParseDiagnostic:
    severity: str
    line: int
    column: int
    message: str

    def __str__(self) -> str:
        return f"{self.line}:{self.column}: {self.severity}: {self.message}"


@dataclass(frozen=True)
class Equation:
    beta: int
    lhs: Expr
    rhs: Expr
    line: int = 0
    column: int = 0


@dataclass(frozen=True)
class GammaSpec:
    """γ is opaque with jets for derivations; `gamma_expr` is its closed form for numcheck.

    Precondition, not machine-checked: Γ = {γ = 0} is Lebesgue-null and grad γ != 0 on Γ.
    """

    gamma_expr: Optional[Expr] = None
    symbolic: bool = True


@dataclass(frozen=True)
class MHLinearDecl:
    beta: int
    alpha: int
    op: LinearOpSpec


@dataclass(frozen=True)
class MHQuadDecl:
    beta: int
    outer: LinearOpSpec
    pairs: Tuple[Tuple[Tuple[int, int], LinearOpSpec], ...]


@dataclass(frozen=True)
class PDESystem:
    name: str
    dim: int
    coords: Tuple[str, ...]
    unknowns: Tuple[str, ...]
    coeffs: Tuple[str, ...]
    equations: Tuple[Equation, ...]
    gamma: GammaSpec = field(default_factory=GammaSpec)
    traces: Mapping[Tuple[int, int], Expr] = field(default_factory=dict)
    coeff_values: Mapping[str, Expr] = field(default_factory=dict)
    mh_linear: Tuple[MHLinearDecl, ...] = ()
    mh_quadratic: Tuple[MHQuadDecl, ...] = ()
    box: Mapping[int, Tuple[Fraction, Fraction]] = field(default_factory=dict)

    @property
    def n(self) -> int:
        return self.dim

    @property
    def a(self) -> int:
        return len(self.unknowns)

    @property
    def b(self) -> int:
        return len(self.equations)

    @property
    def rhs(self) -> Tuple[Expr, ...]:
        return tuple(eq.rhs for eq in self.equations)

    @property
    def has_mh_block(self) -> bool:
        return bool(self.mh_linear or self.mh_quadratic)

    def unknown(self, alpha: int, jet: Optional[MultiIndex] = None) -> Expr:
        return Expr.atom(unknown_jet(alpha, self.unknowns[alpha - 1], jet or zero_index(self.dim)))

    def unknown_atom(self, alpha: int) -> Atom:
        return unknown_jet(alpha, self.unknowns[alpha - 1], zero_index(self.dim))

    def coordinate(self, i: int) -> Expr:
        return Expr.atom(coordinate(i, self.coords[i - 1]))

    def symbol_table(self) -> Dict[str, Atom]:
        return build_symbol_table(self.dim, self.coords, self.unknowns, self.coeffs)


def operator_expr(sys: PDESystem, beta: int) -> Expr:
    """T_β as a canonical Expr."""
    if not 1 <= beta <= sys.b:
        raise IndexError(f"equation index {beta} out of range 1..{sys.b}")
    return sys.equations[beta - 1].lhs


def build_symbol_table(n: int, coords: Sequence[str], unknowns: Sequence[str],
                       coeffs: Sequence[str]) -> Dict[str, Atom]:
    zero = zero_index(n)
    table: Dict[str, Atom] = {}
    for i, name in enumerate(coords, start=1):
        table[name] = coordinate(i, name)
    for name in coeffs:
        table[name] = coeff_fn(name, zero)
    for alpha, name in enumerate(unknowns, start=1):
        table[name] = unknown_jet(alpha, name, zero)
        table["psi_" + name] = psi_jet(alpha, name, zero)
        table["chi_" + name] = chi_jet(alpha, name, zero)
        table["um_" + name] = trace_jet(MINUS, alpha, name, zero)
        table["up_" + name] = trace_jet(PLUS, alpha, name, zero)
    table["gamma"] = gamma_jet(zero)
    table["omega"] = omega_jet(zero)
    return table


# --- scanner ---------------------------------------------------------------

_TOKEN_RE = re.compile(
    r"(?P<ws>[ \t\r]+)|(?P<comment>#.*)|(?P<number>\d+\.\d*|\.\d+|\d+)"
    r"|(?P<ident>[A-Za-z_][A-Za-z0-9_]*)|(?P<punct>[\[\],:=+\-*/^(){};])"
)


@dataclass(frozen=True)
class Token:
    kind: str
    text: str
    line: int
    column: int


class _Abort(Exception):
    def __init__(self, diagnostic: ParseDiagnostic):
        super().__init__(diagnostic.message)
        self.diagnostic = diagnostic


def tokenize_line(text: str, line_no: int) -> List[Token]:
    tokens: List[Token] = []
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if not m:
            raise _Abort(ParseDiagnostic(ERROR, line_no, pos + 1, f"unexpected character {text[pos]!r}"))
        kind = m.lastgroup
        if kind not in ("ws", "comment"):
            tokens.append(Token(kind, m.group(), line_no, pos + 1))
        pos = m.end()
    return tokens


# --- line parser -----------------------------------------------------------

class LineParser:
    """Recursive descent over one line's tokens, with peek/accept/expect."""

    def __init__(self, tokens: List[Token], line_no: int, line_len: int, n: int,
                 symbols: Mapping[str, Atom]):
        self.tokens = tokens
        self.pos = 0
        self.line_no = line_no
        self.line_len = line_len
        self.n = n
        self.symbols = symbols

    # token helpers
    @property
    def current(self) -> Optional[Token]:
        return self.tokens[self.pos] if self.pos < len(self.tokens) else None

    def error(self, message: str, token: Optional[Token] = None) -> _Abort:
        token = token or self.current
        column = token.column if token else self.line_len + 1
        return _Abort(ParseDiagnostic(ERROR, self.line_no, column, message))

    def peek(self, text: str) -> bool:
        tok = self.current
        return tok is not None and tok.text == text

    def accept(self, text: str) -> bool:
        if self.peek(text):
            self.pos += 1
            return True
        return False

    def expect(self, text: str) -> Token:
        tok = self.current
        if not self.accept(text):
            found = repr(tok.text) if tok else "end of line"
            raise self.error(f"expected {text!r}, found {found}")
        return tok

    def expect_kind(self, kind: str, what: str) -> Token:
        tok = self.current
        if tok is None or tok.kind != kind:
            found = repr(tok.text) if tok else "end of line"
            raise self.error(f"expected {what}, found {found}")
        self.pos += 1
        return tok

    def at_end(self) -> bool:
        return self.current is None

    def expect_end(self) -> None:
        if not self.at_end():
            raise self.error(f"unexpected {self.current.text!r}")

    # expressions
    def expr(self) -> Expr:
        if self.at_end():
            raise self.error("expected expression, found end of line")
        result = self.term()
        while True:
            if self.accept("+"):
                result = result + self.term()
            elif self.accept("-"):
                result = result - self.term()
            else:
                return result

    def term(self) -> Expr:
        result = self.factor()
        while True:
            if self.accept("*"):
                result = result * self.factor()
            elif self.peek("/"):
                tok = self.current
                self.pos += 1
                divisor = self.factor()
                if not divisor.is_constant() or divisor.is_zero():
                    raise self.error("division is only allowed by a nonzero constant", tok)
                result = result.scale(1 / divisor.constant_value())
            else:
                return result

    def factor(self) -> Expr:
        base = self.primary()
        while self.peek("^"):
            self.pos += 1
            tok = self.expect_kind("number", "integer exponent")
            if not tok.text.isdigit():
                raise self.error("exponent must be a non-negative integer", tok)
            base = base ** int(tok.text)
        return base

    def primary(self) -> Expr:
        tok = self.current
        if tok is None:
            raise self.error("expected expression, found end of line")
        if self.accept("-"):
            return -self.factor()
        if self.accept("("):
            inner = self.expr()
            self.expect(")")
            return inner
        if tok.kind == "number":
            self.pos += 1
            return Expr.constant(Fraction(tok.text))
        if tok.kind == "ident" and tok.text == "D" and self.pos + 1 < len(self.tokens) \
                and self.tokens[self.pos + 1].text == "[":
            p = self.derivative_index()
            target = self.expect_kind("ident", "identifier after D[...]")
            return derivative_multi(self.resolve(target), p)
        if tok.kind == "ident":
            self.pos += 1
            return self.resolve(tok)
        raise self.error(f"unexpected {tok.text!r}")

    def derivative_index(self) -> MultiIndex:
        self.expect("D")
        self.expect("[")
        dirs: List[int] = []
        while True:
            tok = self.expect_kind("number", "direction index")
            if not tok.text.isdigit():
                raise self.error("direction index must be an integer", tok)
            i = int(tok.text)
            if not 1 <= i <= self.n:
                raise self.error(f"derivative direction {i} out of range 1..{self.n}", tok)
            dirs.append(i)
            if not self.accept(","):
                break
        self.expect("]")
        return index_from_directions(self.n, dirs)

    def resolve(self, tok: Token) -> Expr:
        atom = self.symbols.get(tok.text)
        if atom is None:
            raise self.error(f"unknown identifier {tok.text}", tok)
        return Expr.atom(atom)

    # linear operators: sums of coefficient products with at most one D[...] factor
    def opexpr(self) -> LinearOpSpec:
        terms: List[Tuple[Expr, MultiIndex]] = []
        sign = 1
        if self.accept("-"):
            sign = -1
        while True:
            terms.append(self.opterm(sign))
            if self.accept("+"):
                sign = 1
            elif self.accept("-"):
                sign = -1
            else:
                break
        try:
            return LinearOpSpec(tuple(terms))
        except ValueError as exc:
            raise self.error(str(exc))

    def opterm(self, sign: int) -> Tuple[Expr, MultiIndex]:
        coef = Expr.constant(sign)
        q: Optional[MultiIndex] = None
        while True:
            tok = self.current
            if tok is not None and tok.text == "D" and self.pos + 1 < len(self.tokens) \
                    and self.tokens[self.pos + 1].text == "[":
                if q is not None:
                    raise self.error("operator term has two D[...] factors", tok)
                q = self.derivative_index()
            else:
                coef = coef * self.factor()
                while self.peek("/"):
                    slash = self.current
                    self.pos += 1
                    divisor = self.factor()
                    if not divisor.is_constant() or divisor.is_zero():
                        raise self.error("division is only allowed by a nonzero constant", slash)
                    coef = coef.scale(1 / divisor.constant_value())
            if not self.accept("*"):
                break
        return coef, q if q is not None else zero_index(self.n)


# --- system parser ---------------------------------------------------------

def _split_lines(text: str) -> List[Tuple[int, str]]:
    return [(no, line) for no, line in enumerate(text.splitlines(), start=1)]


def parse_system(text: str) -> PDESystem:
    """Parse DSL text into a validated PDESystem; raises ParseError with every diagnostic."""
    diagnostics: List[ParseDiagnostic] = []
    lines: List[Tuple[int, str, List[Token]]] = []
    for no, raw in _split_lines(text):
        try:
            tokens = tokenize_line(raw, no)
        except _Abort as abort:
            diagnostics.append(abort.diagnostic)
            continue
        if tokens:
            lines.append((no, raw, tokens))

    name = ""
    dim: Optional[int] = None
    coords: Optional[Tuple[str, ...]] = None
    unknowns: Tuple[str, ...] = ()
    coeffs: Tuple[str, ...] = ()
    body: List[Tuple[int, str, List[Token]]] = []

    # pass 1: header declarations
    for no, raw, tokens in lines:
        head = tokens[0]
        rest = tokens[1:]
        if head.text == "system":
            if len(rest) != 1 or rest[0].kind != "ident":
                diagnostics.append(ParseDiagnostic(ERROR, no, head.column, "expected: system NAME"))
            else:
                name = rest[0].text
        elif head.text == "dim":
            if len(rest) != 1 or not rest[0].text.isdigit() or int(rest[0].text) < 1:
                diagnostics.append(ParseDiagnostic(ERROR, no, head.column, "expected: dim POSITIVE_INT"))
            else:
                dim = int(rest[0].text)
        elif head.text in ("coords", "unknowns", "coeffs"):
            names = tuple(t.text for t in rest)
            bad = [t for t in rest if t.kind != "ident"]
            if not names or bad:
                where = bad[0].column if bad else head.column
                diagnostics.append(ParseDiagnostic(ERROR, no, where, f"expected identifiers after {head.text}"))
                continue
            reserved = [t for t in rest if is_reserved(t.text)]
            if reserved:
                diagnostics.append(ParseDiagnostic(
                    ERROR, no, reserved[0].column, f"{reserved[0].text} is a reserved name and cannot be declared"
                ))
                continue
            if head.text == "coords":
                coords = names
            elif head.text == "unknowns":
                unknowns = names
            else:
                coeffs = names
        else:
            body.append((no, raw, tokens))

    if not name:
        diagnostics.append(ParseDiagnostic(ERROR, 1, 1, "missing 'system NAME' declaration"))
    if dim is None:
        if coords is not None:
            dim = len(coords)
        else:
            diagnostics.append(ParseDiagnostic(ERROR, 1, 1, "missing 'dim' declaration"))
            raise ParseError(diagnostics)
    if coords is None:
        coords = tuple(f"x{i}" for i in range(1, dim + 1))
    elif len(coords) != dim:
        diagnostics.append(ParseDiagnostic(ERROR, 1, 1, f"dim {dim} but {len(coords)} coordinate names"))
        raise ParseError(diagnostics)
    if not unknowns:
        diagnostics.append(ParseDiagnostic(ERROR, 1, 1, "missing 'unknowns' declaration"))
    all_names = list(coords) + list(unknowns) + list(coeffs)
    duplicates = sorted({x for x in all_names if all_names.count(x) > 1})
    if duplicates:
        diagnostics.append(ParseDiagnostic(ERROR, 1, 1, f"names declared twice: {', '.join(duplicates)}"))

    symbols = build_symbol_table(dim, coords, unknowns, coeffs)
    unknown_index = {u: alpha for alpha, u in enumerate(unknowns, start=1)}

    equations: List[Equation] = []
    gamma = GammaSpec()
    traces: Dict[Tuple[int, int], Expr] = {}
    coeff_values: Dict[str, Expr] = {}
    mh_linear: List[MHLinearDecl] = []
    mh_quadratic: List[MHQuadDecl] = []
    box: Dict[int, Tuple[Fraction, Fraction]] = {}

    # pass 2: expression declarations
    for no, raw, tokens in body:
        p = LineParser(tokens, no, len(raw), dim, symbols)
        head = tokens[0]
        try:
            if head.text == "eq":
                p.pos = 1
                p.expect(":")
                lhs = p.expr()
                p.expect("=")
                if p.at_end():
                    raise p.error("missing right-hand side")
                rhs = p.expr()
                p.expect_end()
                equations.append(Equation(len(equations) + 1, lhs, rhs, no, head.column))
            elif head.text == "gamma":
                p.pos = 1
                p.expect(":")
                gamma = GammaSpec(gamma_expr=p.expr(), symbolic=True)
                p.expect_end()
            elif head.text == "trace":
                p.pos = 1
                side_tok = p.expect_kind("ident", "'minus' or 'plus'")
                if side_tok.text not in ("minus", "plus"):
                    raise p.error("expected 'minus' or 'plus'", side_tok)
                u_tok = p.expect_kind("ident", "unknown name")
                if u_tok.text not in unknown_index:
                    raise p.error(f"unknown identifier {u_tok.text}", u_tok)
                p.expect(":")
                side = MINUS if side_tok.text == "minus" else PLUS
                traces[(side, unknown_index[u_tok.text])] = p.expr()
                p.expect_end()
            elif head.text == "coeff":
                p.pos = 1
                c_tok = p.expect_kind("ident", "coefficient name")
                if c_tok.text not in coeffs:
                    raise p.error(f"unknown identifier {c_tok.text}", c_tok)
                p.expect(":")
                coeff_values[c_tok.text] = p.expr()
                p.expect_end()
            elif head.text == "box":
                p.pos = 1
                x_tok = p.expect_kind("ident", "coordinate name")
                if x_tok.text not in coords:
                    raise p.error(f"unknown coordinate {x_tok.text}", x_tok)
                p.expect(":")
                lo = p.expr()
                p.expect(",")
                hi = p.expr()
                p.expect_end()
                if not (lo.is_constant() and hi.is_constant()):
                    raise p.error("box bounds must be constants", x_tok)
                if lo.constant_value() >= hi.constant_value():
                    raise p.error(f"empty box for {x_tok.text}: lower bound must be below upper bound", x_tok)
                box[coords.index(x_tok.text) + 1] = (lo.constant_value(), hi.constant_value())
            elif head.text == "mh":
                p.pos = 1
                beta_tok = p.expect_kind("number", "equation index")
                if not beta_tok.text.isdigit():
                    raise p.error("equation index must be an integer", beta_tok)
                beta = int(beta_tok.text)
                kind_tok = p.expect_kind("ident", "'linear' or 'quad'")
                if kind_tok.text == "linear":
                    u_tok = p.expect_kind("ident", "unknown name")
                    if u_tok.text not in unknown_index:
                        raise p.error(f"unknown identifier {u_tok.text}", u_tok)
                    p.expect(":")
                    mh_linear.append(MHLinearDecl(beta, unknown_index[u_tok.text], p.opexpr()))
                elif kind_tok.text == "quad":
                    outer = p.opexpr()
                    p.expect("{")
                    pairs: List[Tuple[Tuple[int, int], LinearOpSpec]] = []
                    while True:
                        left = p.expect_kind("ident", "unknown name")
                        right = p.expect_kind("ident", "unknown name")
                        for t in (left, right):
                            if t.text not in unknown_index:
                                raise p.error(f"unknown identifier {t.text}", t)
                        p.expect(":")
                        pairs.append(((unknown_index[left.text], unknown_index[right.text]), p.opexpr()))
                        if not p.accept(";"):
                            break
                    p.expect("}")
                    mh_quadratic.append(MHQuadDecl(beta, outer, tuple(pairs)))
                else:
                    raise p.error("expected 'linear' or 'quad'", kind_tok)
                p.expect_end()
            else:
                raise p.error(f"unknown declaration {head.text!r}", head)
        except _Abort as abort:
            diagnostics.append(abort.diagnostic)

    sys = PDESystem(
        name=name,
        dim=dim,
        coords=coords,
        unknowns=unknowns,
        coeffs=coeffs,
        equations=tuple(equations),
        gamma=gamma,
        traces=traces,
        coeff_values=coeff_values,
        mh_linear=tuple(mh_linear),
        mh_quadratic=tuple(mh_quadratic),
        box=box,
    )
    if not equations and not any(d.severity == ERROR for d in diagnostics):
        diagnostics.append(ParseDiagnostic(ERROR, 1, 1, "system declares no equations"))
    for beta in sorted({d.beta for d in sys.mh_linear} | {d.beta for d in sys.mh_quadratic}):
        if not 1 <= beta <= len(equations):
            diagnostics.append(ParseDiagnostic(ERROR, 1, 1, f"mh block refers to missing equation {beta}"))
    if not any(d.severity == ERROR for d in diagnostics):
        diagnostics.extend(validate_system(sys))
    errors = [d for d in diagnostics if d.severity == ERROR]
    if errors:
        raise ParseError(sorted(diagnostics, key=lambda d: (d.line, d.column)))
    logger.debug(f"🔍 parsed system {sys.name}: n={sys.n} a={sys.a} b={sys.b}")
    return sys


# --- validation ------------------------------------------------------------

_LHS_KINDS = (AtomKind.COORDINATE, AtomKind.COEFF, AtomKind.UNKNOWN)
_X_KINDS = (AtomKind.COORDINATE, AtomKind.COEFF)


def _check_atoms(expr: Expr, allowed, where: str, sys: PDESystem, line: int, column: int,
                 out: List[ParseDiagnostic]) -> None:
    for atom in sorted(expr.atoms()):
        if atom.kind not in allowed:
            out.append(ParseDiagnostic(ERROR, line, column, f"{where} contains {atom}, which is not allowed there"))
            continue
        if atom.has_jet and len(atom.jet) != sys.dim:
            out.append(ParseDiagnostic(ERROR, line, column,
                                       f"{where}: multi-index of {atom.label()} has length {len(atom.jet)}, expected {sys.dim}"))
        if atom.kind == AtomKind.UNKNOWN and not 1 <= atom.alpha <= sys.a:
            out.append(ParseDiagnostic(ERROR, line, column, f"{where}: unknown index {atom.alpha} out of range 1..{sys.a}"))
        if atom.kind == AtomKind.COEFF and atom.name not in sys.coeffs:
            out.append(ParseDiagnostic(ERROR, line, column, f"{where}: undeclared coefficient {atom.name}"))
        if atom.kind == AtomKind.COORDINATE and not 1 <= atom.alpha <= sys.dim:
            out.append(ParseDiagnostic(ERROR, line, column, f"{where}: coordinate index {atom.alpha} out of range"))


def validate_system(sys: PDESystem) -> List[ParseDiagnostic]:
    """Empty iff every shape invariant of the system holds."""
    out: List[ParseDiagnostic] = []
    for eq in sys.equations:
        _check_atoms(eq.lhs, _LHS_KINDS, f"equation {eq.beta} left side", sys, eq.line, eq.column, out)
        _check_atoms(eq.rhs, _X_KINDS, f"equation {eq.beta} right side", sys, eq.line, eq.column, out)
    if sys.gamma.gamma_expr is not None:
        _check_atoms(sys.gamma.gamma_expr, _X_KINDS, "gamma", sys, 0, 0, out)
    for (side, alpha), expr in sys.traces.items():
        _check_atoms(expr, _X_KINDS, f"trace of {sys.unknowns[alpha - 1]}", sys, 0, 0, out)
    for cname, expr in sys.coeff_values.items():
        _check_atoms(expr, (AtomKind.COORDINATE,), f"value of {cname}", sys, 0, 0, out)
    return out


# --- rendering -------------------------------------------------------------

def render_system(sys: PDESystem) -> str:
    """DSL text that reparses to an equivalent system."""
    lines = [f"system {sys.name}", f"dim {sys.dim}", "coords " + " ".join(sys.coords),
             "unknowns " + " ".join(sys.unknowns)]
    if sys.coeffs:
        lines.append("coeffs " + " ".join(sys.coeffs))
    if sys.gamma.gamma_expr is not None:
        lines.append(f"gamma: {render_text(sys.gamma.gamma_expr)}")
    for (side, alpha), expr in sorted(sys.traces.items()):
        lines.append(f"trace {'minus' if side == MINUS else 'plus'} {sys.unknowns[alpha - 1]}: {render_text(expr)}")
    for cname, expr in sorted(sys.coeff_values.items()):
        lines.append(f"coeff {cname}: {render_text(expr)}")
    for i, (lo, hi) in sorted(sys.box.items()):
        lines.append(f"box {sys.coords[i - 1]}: {render_text(Expr.constant(lo))}, {render_text(Expr.constant(hi))}")
    for eq in sys.equations:
        lines.append(f"eq: {render_text(eq.lhs)} = {render_text(eq.rhs)}")
    for decl in sys.mh_linear:
        lines.append(f"mh {decl.beta} linear {sys.unknowns[decl.alpha - 1]}: {render_operator(decl.op)}")
    for decl in sys.mh_quadratic:
        pairs = " ; ".join(
            f"{sys.unknowns[a - 1]} {sys.unknowns[b - 1]}: {render_operator(op)}" for (a, b), op in decl.pairs
        )
        lines.append(f"mh {decl.beta} quad {render_operator(decl.outer)} {{ {pairs} }}")
    return "\n".join(lines) + "\n"


def parse_expression(text: str, sys: PDESystem) -> Expr:
    """Parse a single expression against a system's symbol table (used for JSON round trips)."""
    try:
        tokens = tokenize_line(text, 1)
        parser = LineParser(tokens, 1, len(text), sys.dim, sys.symbol_table())
        result = parser.expr()
        parser.expect_end()
    except _Abort as abort:
        raise ParseError([abort.diagnostic])
    return result
