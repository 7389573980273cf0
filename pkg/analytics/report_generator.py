"""
Output documents: canonical JSON (schema jcond/1) and LaTeX fragments.

Coefficients are grouped by their γ-jet factors and rendered in the input
DSL's expression syntax, so every string in a JSON document reparses.
"""

from __future__ import annotations

import json
import logging
from fractions import Fraction
from math import gcd
from typing import List, Optional, Sequence, Tuple

from core.distalg import DistAtom
from core.symcore import (
    PLUS,
    Atom,
    AtomKind,
    Expr,
    Monomial,
    index_directions,
    render_factors,
)
from engine.classify import ClassifyReport, ResolubleCertificate, certificate_to_json
from engine.junction import JunctionConditionSet, gamma_factor_groups

logger = logging.getLogger(__name__)

SCHEMA = "jcond/1"


# --- DSL-syntax rendering --------------------------------------------------

def _content(e: Expr) -> Fraction:
    """Rational gcd of the coefficients, negative when every coefficient is."""
    nums = [abs(m.coefficient.numerator) for m in e.monomials]
    dens = [m.coefficient.denominator for m in e.monomials]
    num = 0
    for v in nums:
        num = gcd(num, v)
    den = 1
    for v in dens:
        den = den * v // gcd(den, v)
    content = Fraction(num, den)
    if all(m.coefficient < 0 for m in e.monomials):
        content = -content
    return content


def _positive_first(e: Expr) -> List[Monomial]:
    monos = list(e.monomials)
    return [m for m in monos if m.coefficient > 0] + [m for m in monos if m.coefficient < 0]


def _fraction_text(value: Fraction) -> str:
    return str(value.numerator) if value.denominator == 1 else f"{value.numerator}/{value.denominator}"


def render_sum(e: Expr) -> str:
    """Like render_text, positive monomials first."""
    if e.is_zero():
        return "0"
    out = []
    for idx, mono in enumerate(_positive_first(e)):
        mag = abs(mono.coefficient)
        body = render_factors(mono.factors)
        if not body:
            text = _fraction_text(mag)
        elif mag == 1:
            text = body
        else:
            text = f"{_fraction_text(mag)}*{body}"
        if idx == 0:
            out.append(("-" if mono.coefficient < 0 else "") + text)
        else:
            out.append((" - " if mono.coefficient < 0 else " + ") + text)
    return "".join(out)


def _gamma_sort_key(item):
    factors, _ = item
    return (len(factors), [index_directions(a.jet) for a in factors])


def render_coefficient(e: Expr) -> str:
    """Group by γ-jet factors: `(up_u - um_u)*D[1]gamma + 1/2*(up_u^2 - um_u^2)*D[2]gamma`."""
    if e.is_zero():
        return "0"
    pieces: List[str] = []
    for gamma_part, cofactor in sorted(gamma_factor_groups(e), key=_gamma_sort_key):
        gtext = render_factors(gamma_part)
        content = _content(cofactor)
        inner = cofactor.scale(1 / content)
        if not gtext:
            pieces.append(render_sum(cofactor))
            continue
        if inner.is_constant():
            value = inner.constant_value() * content
            if value == 1:
                text = gtext
            elif value == -1:
                text = f"-{gtext}"
            else:
                text = f"{_fraction_text(value)}*{gtext}"
        else:
            body = render_sum(inner)
            if len(inner.terms) > 1:
                body = f"({body})"
            if content == 1:
                text = f"{body}*{gtext}"
            elif content == -1:
                text = f"-{body}*{gtext}"
            else:
                text = f"{_fraction_text(content)}*{body}*{gtext}"
        pieces.append(text)
    out = pieces[0]
    for piece in pieces[1:]:
        out += f" - {piece[1:]}" if piece.startswith("-") else f" + {piece}"
    return out


# --- JSON ------------------------------------------------------------------

def atom_tag(atom: DistAtom) -> Tuple[str, int]:
    return atom.tag, atom.order


def conditions_to_json(conds: Optional[JunctionConditionSet]) -> List[dict]:
    if conds is None:
        return []
    out = []
    for c in conds:
        tag, order = atom_tag(c.atom)
        out.append({
            "beta": c.beta,
            "atom": tag,
            "order": order,
            "coefficient": render_coefficient(c.coefficient),
            "status": c.status,
            "locus": c.locus,
        })
    return out


def verdicts_to_json(report: Optional[ClassifyReport]) -> List[dict]:
    if report is None:
        return []
    out = []
    for v in report.verdicts:
        item = {"beta": v.beta, "verdict": v.verdict, "mh_verified": v.mh_verified}
        if v.witness:
            item["witness"] = v.witness_text
            item["infeasibility"] = [
                {"monomial": render_factors(k), "weight": _fraction_text(w)} for k, w in v.infeasibility.items()
            ]
        out.append(item)
    return out


def certificates_to_json(report: Optional[ClassifyReport]) -> List[dict]:
    if report is None:
        return []
    found = tuple(v.certificate for v in report.verdicts if v.certificate is not None)
    return certificate_to_json(ResolubleCertificate(found))


def build_document(system: str, report: Optional[ClassifyReport] = None,
                   conds: Optional[JunctionConditionSet] = None, residuals: Optional[dict] = None) -> dict:
    doc = {
        "schema": SCHEMA,
        "system": system,
        "verdicts": verdicts_to_json(report),
        "certificates": certificates_to_json(report),
        "conditions": conditions_to_json(conds),
    }
    if residuals is not None:
        doc["report"] = residuals
    return doc


def render_json(doc: dict) -> str:
    return json.dumps(doc, sort_keys=True, indent=2, ensure_ascii=False) + "\n"


# --- LaTeX -----------------------------------------------------------------

def _sub(text: str) -> str:
    return f"_{text}" if len(text) == 1 else f"_{{{text}}}"


def _sup(text: str) -> str:
    return f"^{text}" if len(text) == 1 else f"^{{{text}}}"


def latex_atom(a: Atom, coords: Sequence[str]) -> str:
    jet = "".join(coords[i - 1] for i in index_directions(a.jet)) if a.has_jet else ""
    if a.kind == AtomKind.COORDINATE:
        return a.name
    if a.kind == AtomKind.TRACE:
        base = f"{a.name}^{'+' if a.side == PLUS else '-'}"
    elif a.kind == AtomKind.GAMMA:
        base = r"\gamma"
    elif a.kind == AtomKind.OMEGA:
        base = r"\omega"
    elif a.kind == AtomKind.PSI:
        base = rf"\psi_{{{a.name}}}"
    elif a.kind == AtomKind.CHI:
        base = rf"\chi_{{{a.name}}}"
    else:
        base = a.name
    if not jet:
        return base
    if a.kind in (AtomKind.PSI, AtomKind.CHI):
        return f"({base}){_sub(jet)}"
    return f"{base}{_sub(jet)}"


def latex_factors(factors: Sequence[Atom], coords: Sequence[str]) -> str:
    parts = []
    i = 0
    while i < len(factors):
        j = i
        while j < len(factors) and factors[j] == factors[i]:
            j += 1
        text = latex_atom(factors[i], coords)
        if j - i > 1:
            if "^" in text:
                text = f"({text})"
            text += _sup(str(j - i))
        parts.append(text)
        i = j
    return r"\,".join(parts)


def latex_fraction(value: Fraction) -> str:
    if value.denominator == 1:
        return str(value.numerator)
    return rf"\tfrac{{{value.numerator}}}{{{value.denominator}}}"


def latex_sum(e: Expr, coords: Sequence[str]) -> str:
    if e.is_zero():
        return "0"
    out = []
    for idx, mono in enumerate(_positive_first(e)):
        mag = abs(mono.coefficient)
        body = latex_factors(mono.factors, coords)
        if not body:
            text = latex_fraction(mag)
        elif mag == 1:
            text = body
        else:
            text = f"{latex_fraction(mag)}{body}"
        if idx == 0:
            out.append(("-" if mono.coefficient < 0 else "") + text)
        else:
            out.append((" - " if mono.coefficient < 0 else " + ") + text)
    return "".join(out)


def latex_coefficient(e: Expr, coords: Sequence[str]) -> str:
    """`(u^+ - u^-)\\,\\gamma_t + \\tfrac{1}{2}((u^+)^2 - (u^-)^2)\\,\\gamma_x` for the Burgers δ-condition."""
    if e.is_zero():
        return "0"
    pieces = []
    for gamma_part, cofactor in sorted(gamma_factor_groups(e), key=_gamma_sort_key):
        gtext = latex_factors(gamma_part, coords)
        if not gtext:
            pieces.append(latex_sum(cofactor, coords))
            continue
        content = _content(cofactor)
        inner = cofactor.scale(1 / content)
        if inner.is_constant():
            value = inner.constant_value() * content
            lead = "" if value == 1 else ("-" if value == -1 else latex_fraction(value))
            pieces.append(f"{lead}{gtext}")
            continue
        body = latex_sum(inner, coords)
        if len(inner.terms) > 1:
            body = f"({body})"
        sign = "-" if content < 0 else ""
        mag = abs(content)
        lead = sign + ("" if mag == 1 else latex_fraction(mag))
        pieces.append(rf"{lead}{body}\,{gtext}")
    out = pieces[0]
    for piece in pieces[1:]:
        out += f" - {piece[1:]}" if piece.startswith("-") else f" + {piece}"
    return out


def latex_dist_atom(atom: DistAtom) -> str:
    if atom.is_dirac:
        return r"\delta_\Gamma" if atom.order == 0 else rf"\delta^{{({atom.order})}}_\Gamma"
    return r"H_\gamma" if atom.is_heaviside else "1"


def render_latex(conds: JunctionConditionSet, coords: Sequence[str], system: str = "") -> str:
    """One display-math line per condition; the locus and status are annotated in \\text."""
    lines = [f"% {SCHEMA} junction conditions" + (f" for {system}" if system else "")]
    if conds.is_empty():
        lines.append(r"\[ \text{no junction conditions} \]")
    for c in conds:
        locus = r"\text{(on }\Gamma\text{)}" if c.atom.is_dirac else r"\text{(near }\Gamma\text{)}"
        status = r"\quad\text{satisfied by hypothesis}" if not c.required else ""
        lines.append(
            rf"\[ \beta={c.beta},\ {latex_dist_atom(c.atom)}:\quad "
            rf"{latex_coefficient(c.coefficient, coords)} = 0 \quad {locus}{status} \]"
        )
    return "\n".join(lines) + "\n"
