"""Rendering of canonical expressions: plain text, LaTeX, and JSON.

Text output round-trips through the parser.  Terms are emitted in the
canonical order, so rendered equations are stable across runs and can
be diffed against golden files.
"""

from __future__ import annotations

from fractions import Fraction

from .algebra import (Context, Expr, ExprPow, Factor, FuncOcc, NumPow,
                      SymPow, Term, normalize)

# ---------------------------------------------------------------------------
# Plain text


def _frac_text(q: Fraction) -> str:
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


def _exp_text(e: Fraction) -> str:
    if e.denominator == 1 and e >= 0:
        return f"^{e.numerator}"
    return f"^({_frac_text(e)})"


def _factor_text(f: Factor) -> str:
    if isinstance(f, SymPow):
        return f.sym.name + ("" if f.exp == 1 else _exp_text(f.exp))
    if isinstance(f, NumPow):
        base = _frac_text(f.base)
        if f.base.denominator != 1:
            base = f"({base})"
        return base + _exp_text(f.exp)
    if isinstance(f, ExprPow):
        return f"({text(f.base)})" + _exp_text(f.exp)
    out = f.fn.name
    if f.derivs:
        out += "_" + ",".join(f.derivs)
    if f.args is not None:
        out += "[" + ", ".join(text(a) for a in f.args) + "]"
    if f.exp != 1:
        out += _exp_text(f.exp)
    return out


def _term_text(t: Term) -> str:
    parts = [_factor_text(f) for f in t.factors]
    c = abs(t.coeff)
    if c != 1 or not parts:
        parts.insert(0, _frac_text(c))
    return "*".join(parts)


def text(e: Expr) -> str:
    if not e.terms:
        return "0"
    out = []
    for i, t in enumerate(e.terms):
        sign = "-" if t.coeff < 0 else ("+" if i else "")
        sep = " " if i else ""
        out.append(f"{sep}{sign}{' ' if i else ''}{_term_text(t)}")
    return "".join(out)


# ---------------------------------------------------------------------------
# LaTeX

_LATEX_NAMES = {
    "th1": r"\theta_1", "th2": r"\theta_2", "eta1": r"\eta_1",
    "eta2": r"\eta_2", "xi": r"\xi", "mu": r"\underline{\mu}",
    "nu": r"\underline{\nu}", "eta": r"\underline{\eta}",
    "eps": r"\varepsilon", "alpha": r"\alpha", "beta": r"\beta",
    "gamma": r"\gamma", "delta": r"\delta", "lam": r"\lambda",
    "sigma": r"\sigma", "rho1": r"\rho^1", "rho2": r"\rho^2",
    "Phi": r"\Phi", "phi0": r"\varphi_0", "phi1": r"\underline{\varphi_1}",
    "phi2": r"\underline{\varphi_2}", "phi3": r"\varphi_3",
}


def _latex_name(name: str) -> str:
    if name in _LATEX_NAMES:
        return _LATEX_NAMES[name]
    if len(name) == 1:
        return name
    head = name.rstrip("0123456789")
    tail = name[len(head):]
    if tail and len(head) <= 2:
        return f"{head}_{{{tail}}}"
    return rf"\mathrm{{{name}}}"


def _latex_exp(e: Fraction) -> str:
    return f"^{{{_frac_text(e)}}}"


def _latex_factor(f: Factor) -> str:
    if isinstance(f, SymPow):
        return _latex_name(f.sym.name) + ("" if f.exp == 1 else _latex_exp(f.exp))
    if isinstance(f, NumPow):
        return f"{_frac_text(f.base)}{_latex_exp(f.exp)}"
    if isinstance(f, ExprPow):
        return rf"\left({latex(f.base)}\right)" + _latex_exp(f.exp)
    out = _latex_name(f.fn.name)
    if f.derivs:
        out += "_{" + "".join(_latex_name(d) for d in f.derivs) + "}"
    if f.args is not None:
        out += r"\!\left(" + ", ".join(latex(a) for a in f.args) + r"\right)"
    if f.exp != 1:
        out += _latex_exp(f.exp)
    return out


def latex(e: Expr) -> str:
    if not e.terms:
        return "0"
    out = []
    for i, t in enumerate(e.terms):
        c = abs(t.coeff)
        body = "".join(_latex_factor(f) for f in t.factors)
        if c != 1 or not body:
            coeff = _frac_text(c) if c.denominator == 1 else rf"\tfrac{{{c.numerator}}}{{{c.denominator}}}"
            body = coeff + body
        sign = "-" if t.coeff < 0 else ("+" if i else "")
        out.append(sign + body)
    return "".join(out)


# ---------------------------------------------------------------------------
# JSON expression schema

EXPR_SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "$id": "susyfluid/expr.schema.json",
    "title": "Canonical graded expression",
    "type": "object",
    "required": ["terms"],
    "additionalProperties": False,
    "properties": {"terms": {"type": "array", "items": {"$ref": "#/$defs/term"}}},
    "$defs": {
        "fraction": {
            "type": "array",
            "prefixItems": [{"type": "integer"}, {"type": "integer"}],
            "minItems": 2, "maxItems": 2,
        },
        "term": {
            "type": "object",
            "required": ["coeff", "factors"],
            "additionalProperties": False,
            "properties": {
                "coeff": {"$ref": "#/$defs/fraction"},
                "factors": {"type": "array", "items": {"$ref": "#/$defs/factor"}},
            },
        },
        "factor": {
            "type": "object",
            "required": ["kind"],
            "properties": {
                "kind": {"enum": ["sym", "fn", "num", "pow"]},
                "name": {"type": "string"},
                "exp": {"$ref": "#/$defs/fraction"},
                "derivs": {"type": "array", "items": {"type": "string"}},
                "args": {"type": "array", "items": {"$ref": "#"}},
                "base": {},
            },
        },
    },
}


def _frac_json(q: Fraction) -> list[int]:
    return [q.numerator, q.denominator]


def _factor_json(f: Factor) -> dict:
    if isinstance(f, SymPow):
        out = {"kind": "sym", "name": f.sym.name}
        if f.exp != 1:
            out["exp"] = _frac_json(f.exp)
        return out
    if isinstance(f, FuncOcc):
        out = {"kind": "fn", "name": f.fn.name}
        if f.derivs:
            out["derivs"] = list(f.derivs)
        if f.exp != 1:
            out["exp"] = _frac_json(f.exp)
        if f.args is not None:
            out["args"] = [to_json(a) for a in f.args]
        return out
    if isinstance(f, NumPow):
        return {"kind": "num", "base": _frac_json(f.base), "exp": _frac_json(f.exp)}
    return {"kind": "pow", "base": to_json(f.base), "exp": _frac_json(f.exp)}


def to_json(e: Expr) -> dict:
    return {"terms": [
        {"coeff": _frac_json(t.coeff), "factors": [_factor_json(f) for f in t.factors]}
        for t in e.terms]}


def from_json(data: dict, ctx: Context) -> Expr:
    """Decode a JSON expression against a declaration context."""
    raw = []
    for term in data["terms"]:
        coeff = Fraction(*term["coeff"])
        factors = []
        for f in term["factors"]:
            exp = Fraction(*f.get("exp", [1, 1]))
            kind = f["kind"]
            if kind == "sym":
                factors.append(SymPow(ctx.symbols[f["name"]], exp))
            elif kind == "fn":
                args = f.get("args")
                factors.append(FuncOcc(
                    ctx.functions[f["name"]], tuple(f.get("derivs", ())), exp,
                    None if args is None else tuple(from_json(a, ctx) for a in args)))
            elif kind == "num":
                factors.append(NumPow(Fraction(*f["base"]), exp))
            else:
                factors.append(ExprPow(from_json(f["base"], ctx), exp))
        raw.append((coeff, factors))
    return normalize(raw)
