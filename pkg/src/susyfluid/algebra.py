"""Canonical-form arithmetic over a Grassmann symbol ring.

The value model is a sum of terms.  Each term is an exact rational
coefficient times an ordered product of factors:

* ``SymPow``   -- a declared symbol raised to a rational power.  Odd
  (anticommuting) symbols only ever appear to the first power.
* ``FuncOcc``  -- an occurrence of a declared function, carrying a
  derivative multi-index over the function's slots, an optional power,
  and optional composition arguments (expressions substituted for the
  slots).
* ``NumPow``   -- a positive rational base raised to a fractional power
  that has no exact rational value (e.g. ``2**(1/2)``).
* ``ExprPow``  -- a multi-term even expression raised to a negative or
  fractional power (e.g. ``(a*x - t)**(-1)``).  Nonnegative integer
  powers of composite bases are always expanded, so these factors only
  record genuine denominators and radicals.

Canonicalisation sorts the factors of every term into a fixed total
order (even coordinates, even constants, odd constants, odd
coordinates, function occurrences, composite powers), absorbing the
sign of the permutation of odd factors into the coefficient.  A
repeated odd factor annihilates its term.  On top of the per-term form,
sums are put over common denominators: for each composite base, all
terms in the same fractional-exponent class are rewritten to the
minimal exponent occurring, with the integer-power difference expanded
into the numerator.  This makes ``is_zero`` exact for the rational and
radical expressions produced by differentiation and substitution.

Everything is immutable; all operations are pure functions.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Optional, Sequence, Union

EVEN = 0
ODD = 1

KIND_COORD = "coord"
KIND_CONST = "const"
KIND_PARAM = "param"


class AlgebraError(Exception):
    """Base class for errors raised by the expression engine."""


class DeclarationError(AlgebraError):
    """An identifier was used without (or against) its declaration."""


class MalformedTermError(AlgebraError):
    """A term violates the graded-ring rules (e.g. odd symbol squared)."""


class ParityError(AlgebraError):
    """A binding or operation mixes parities illegally."""


class UnsupportedOperation(AlgebraError):
    """A structurally valid request the engine deliberately refuses."""


# ---------------------------------------------------------------------------
# Declarations


@dataclass(frozen=True)
class Symbol:
    """A declared scalar symbol with parity and kind."""

    name: str
    parity: int = EVEN
    kind: str = KIND_CONST
    nonzero: bool = False
    square_one: bool = False  # epsilon-like: s**2 rewrites to 1

    def __post_init__(self):
        if self.parity not in (EVEN, ODD):
            raise DeclarationError(f"bad parity for symbol {self.name!r}")
        if self.kind not in (KIND_COORD, KIND_CONST, KIND_PARAM):
            raise DeclarationError(f"bad kind for symbol {self.name!r}")
        if self.square_one and self.parity == ODD:
            raise DeclarationError(f"square_one symbol {self.name!r} must be even")


@dataclass(frozen=True)
class FunctionDecl:
    """A declared function of named, parity-tagged slots.

    ``self_derivative`` marks exp-like functions: the derivative with
    respect to the (single) slot is the function itself.
    """

    name: str
    parity: int
    slots: tuple[tuple[str, int], ...]  # (slot name, slot parity), ordered
    self_derivative: bool = False

    def __post_init__(self):
        if self.self_derivative and len(self.slots) != 1:
            raise DeclarationError(
                f"self-derivative function {self.name!r} must have one slot")

    def slot_index(self, slot: str) -> int:
        for i, (n, _) in enumerate(self.slots):
            if n == slot:
                return i
        raise DeclarationError(f"{self.name!r} has no slot {slot!r}")

    def slot_parity(self, slot: str) -> int:
        return self.slots[self.slot_index(slot)][1]


# ---------------------------------------------------------------------------
# Factors


@dataclass(frozen=True)
class SymPow:
    sym: Symbol
    exp: Fraction = Fraction(1)

    @property
    def parity(self) -> int:
        return self.sym.parity  # odd symbols always carry exp == 1


@dataclass(frozen=True)
class FuncOcc:
    fn: FunctionDecl
    derivs: tuple[str, ...] = ()
    exp: Fraction = Fraction(1)
    args: Optional[tuple["Expr", ...]] = None  # None: slots are ambient coords

    @property
    def parity(self) -> int:
        odd_derivs = sum(self.fn.slot_parity(d) for d in self.derivs)
        return (self.fn.parity + odd_derivs) % 2


@dataclass(frozen=True)
class NumPow:
    base: Fraction  # positive, in lowest terms
    exp: Fraction   # non-integer

    @property
    def parity(self) -> int:
        return EVEN


@dataclass(frozen=True)
class ExprPow:
    base: "Expr"    # canonical, >= 2 terms, even, composite-free
    exp: Fraction   # negative, or fractional in (-1, 0)

    @property
    def parity(self) -> int:
        return EVEN


Factor = Union[SymPow, FuncOcc, NumPow, ExprPow]


def _symbol_rank(sym: Symbol) -> int:
    if sym.parity == EVEN:
        return 0 if sym.kind == KIND_COORD else 1
    return 3 if sym.kind == KIND_COORD else 2


def factor_identity(f: Factor):
    """Sort/merge key identifying a factor's base (exponent excluded).

    Keys are nested tuples of primitives, so they are both hashable and
    totally ordered; the leading rank realises the fixed factor order.
    """
    if isinstance(f, NumPow):
        return (-1, f.base.numerator, f.base.denominator)
    if isinstance(f, SymPow):
        return (_symbol_rank(f.sym), f.sym.name)
    if isinstance(f, FuncOcc):
        if f.args is None:
            args_key = ("ambient",)
        else:
            args_key = ("composed",) + tuple(expr_key(a) for a in f.args)
        return (4, f.fn.name, f.derivs, args_key)
    return (5, expr_key(f.base))  # ExprPow


def _factor_exp(f: Factor) -> Fraction:
    return f.exp


def expr_key(e: "Expr"):
    """Structural key of a canonical expression (comparable, hashable)."""
    return tuple((t.coeff,) + t.key() for t in e.terms)


# ---------------------------------------------------------------------------
# Terms and expressions


@dataclass(frozen=True)
class Term:
    coeff: Fraction
    factors: tuple[Factor, ...]

    @property
    def parity(self) -> int:
        return sum(f.parity for f in self.factors) % 2

    def key(self):
        return tuple(factor_identity(f) + (_factor_exp(f),) for f in self.factors)


@dataclass(frozen=True)
class Expr:
    terms: tuple[Term, ...] = ()

    # -- predicates ---------------------------------------------------------
    def is_zero(self) -> bool:
        return not self.terms

    def parity(self) -> Optional[int]:
        """Common parity of all terms, or None for mixed or zero."""
        parities = {t.parity for t in self.terms}
        if len(parities) == 1:
            return parities.pop()
        return None

    def as_fraction(self) -> Optional[Fraction]:
        if not self.terms:
            return Fraction(0)
        if len(self.terms) == 1 and not self.terms[0].factors:
            return self.terms[0].coeff
        return None

    # -- arithmetic ---------------------------------------------------------
    def __add__(self, other) -> "Expr":
        other = as_expr(other)
        return _assemble(list(self.terms) + list(other.terms))

    __radd__ = __add__

    def __neg__(self) -> "Expr":
        return Expr(tuple(Term(-t.coeff, t.factors) for t in self.terms))

    def __sub__(self, other) -> "Expr":
        return self + (-as_expr(other))

    def __rsub__(self, other) -> "Expr":
        return as_expr(other) + (-self)

    def __mul__(self, other) -> "Expr":
        return multiply(self, as_expr(other))

    def __rmul__(self, other) -> "Expr":
        return multiply(as_expr(other), self)

    def __pow__(self, exponent) -> "Expr":
        return power(self, Fraction(exponent))

    def __repr__(self) -> str:  # keep cheap; pretty printing lives in render
        from . import render

        return render.text(self)


ZERO = Expr(())
ONE = Expr((Term(Fraction(1), ()),))


def as_expr(value) -> Expr:
    if isinstance(value, Expr):
        return value
    if isinstance(value, (int, Fraction)):
        q = Fraction(value)
        return Expr(()) if q == 0 else Expr((Term(q, ()),))
    if isinstance(value, Symbol):
        return atom(value)
    raise TypeError(f"cannot coerce {value!r} to Expr")


def atom(sym: Symbol) -> Expr:
    return Expr((Term(Fraction(1), (SymPow(sym, Fraction(1)),)),))


def occurrence(fn: FunctionDecl, derivs: Sequence[str] = (),
               exp=Fraction(1), args: Optional[Sequence[Expr]] = None) -> Expr:
    occ = FuncOcc(fn, tuple(derivs), Fraction(exp),
                  None if args is None else tuple(args))
    return _canon_term(Fraction(1), (occ,))


def normalize(raw_terms: Iterable[tuple[Fraction, Sequence[Factor]]]) -> Expr:
    """Canonicalise a raw term list (the public entry point for builders)."""
    total = ZERO
    for coeff, factors in raw_terms:
        total = total + _canon_term(Fraction(coeff), tuple(factors))
    return total


# ---------------------------------------------------------------------------
# Exact rational powers


def _int_nth_root(n: int, k: int) -> Optional[int]:
    """Exact k-th root of n >= 0, or None."""
    if n < 0:
        return None
    if n in (0, 1):
        return n
    r = round(n ** (1.0 / k))
    for cand in (r - 1, r, r + 1):
        if cand >= 0 and cand ** k == n:
            return cand
    return None


def _exact_pow(q: Fraction, e: Fraction) -> Optional[Fraction]:
    """q**e as an exact Fraction, or None when irrational/undefined."""
    if q == 0:
        return Fraction(0) if e > 0 else None
    if e.denominator == 1:
        return q ** e.numerator
    if q < 0:
        return None
    num = _int_nth_root(q.numerator, e.denominator)
    den = _int_nth_root(q.denominator, e.denominator)
    if num is None or den is None:
        return None
    return Fraction(num, den) ** e.numerator


def _num_pow_factor(q: Fraction, e: Fraction) -> tuple[Fraction, Optional[NumPow]]:
    """Split q**e into (exact rational part, residual NumPow or None)."""
    if e == 0 or q == 1:
        return Fraction(1), None
    exact = _exact_pow(q, e)
    if exact is not None:
        return exact, None
    if q < 0:
        raise MalformedTermError(f"fractional power of negative rational {q}")
    # peel off the integer part of the exponent, keep a fractional radical
    n = e.numerator // e.denominator
    frac = e - n
    return q ** n, NumPow(q, frac)


# ---------------------------------------------------------------------------
# Term canonicalisation


def _canon_derivs(fn: FunctionDecl, derivs: tuple[str, ...]):
    """Sort a derivative multi-index; returns (sign, tuple) or None if zero.

    Bosonic slots commute freely, odd slots anticommute pairwise and a
    repeated odd slot kills the occurrence.
    """
    if fn.self_derivative:
        # exp-like: every slot derivative reproduces the function
        for d in derivs:
            fn.slot_index(d)  # validates
        return 1, ()
    indexed = []
    for d in derivs:
        i = fn.slot_index(d)
        indexed.append((i, fn.slots[i][1]))
    sign = 1
    odd_positions = [i for i, (_, p) in enumerate(indexed) if p == ODD]
    odd_keys = [indexed[i][0] for i in odd_positions]
    for a in range(len(odd_keys)):
        for b in range(a + 1, len(odd_keys)):
            if odd_keys[a] > odd_keys[b]:
                sign = -sign
            elif odd_keys[a] == odd_keys[b]:
                return None
    ordered = tuple(fn.slots[i][0] for i, _ in sorted(indexed, key=lambda x: x[0]))
    return sign, ordered


def _norm_single(f: Factor):
    """Normalise one factor.

    Returns ``(coeff_mult, factors, pending)`` where ``pending`` is a list
    of expressions still to be multiplied in, or None when the factor
    annihilates the whole term.
    """
    one = Fraction(1)
    if isinstance(f, SymPow):
        if f.exp == 0:
            return one, [], []
        if f.sym.parity == ODD:
            if f.exp == 1:
                return one, [f], []
            raise MalformedTermError(
                f"odd symbol {f.sym.name!r} with exponent {f.exp}")
        if f.sym.square_one:
            e = f.exp
            if e.denominator != 1:
                raise MalformedTermError(
                    f"fractional power of unit-square symbol {f.sym.name!r}")
            e = Fraction(e.numerator % 2)
            return (one, [SymPow(f.sym, e)] if e else [], [])
        return one, [f], []
    if isinstance(f, FuncOcc):
        canon = _canon_derivs(f.fn, f.derivs)
        if canon is None:
            return None
        sign, derivs = canon
        if f.exp == 0:
            return Fraction(sign), [], []
        occ_parity = (f.fn.parity + sum(f.fn.slot_parity(d) for d in derivs)) % 2
        if occ_parity == ODD and f.exp != 1:
            raise MalformedTermError(
                f"odd occurrence of {f.fn.name!r} with exponent {f.exp}")
        args = f.args
        if args is not None:
            for (slot, sp), a in zip(f.fn.slots, args):
                ap = a.parity()
                if ap is not None and not a.is_zero() and ap != sp:
                    raise ParityError(
                        f"argument parity mismatch for slot {slot!r} of {f.fn.name!r}")
        return Fraction(sign), [FuncOcc(f.fn, derivs, f.exp, args)], []
    if isinstance(f, NumPow):
        coeff, residual = _num_pow_factor(f.base, f.exp)
        return coeff, [residual] if residual else [], []
    # ExprPow
    return _norm_exprpow(f.base, f.exp)


def _norm_exprpow(base: Expr, e: Fraction):
    if e == 0:
        return Fraction(1), [], []
    if base.is_zero():
        if e > 0:
            return None
        raise MalformedTermError("zero raised to a non-positive power")
    if len(base.terms) == 1:
        return Fraction(1), [], [power(base, e)]
    if e < 0:
        return Fraction(1), [ExprPow(base, e)], []
    if e.denominator == 1:
        return Fraction(1), [], [base] * e.numerator
    n = e.numerator // e.denominator + 1
    return Fraction(1), [ExprPow(base, e - n)], [base] * n


def _identity_canon(f: Factor):
    """Stabilise the parts of a factor that its identity key depends on.

    Exponents are left alone so that same-base factors merge before any
    expansion decision is taken (e.g. Z**2 against Z**-2).
    """
    if isinstance(f, FuncOcc):
        canon = _canon_derivs(f.fn, f.derivs)
        if canon is None:
            return None
        sign, derivs = canon
        return Fraction(sign), FuncOcc(f.fn, derivs, f.exp, f.args)
    return Fraction(1), f


def _canon_term(coeff: Fraction, factors: tuple[Factor, ...]) -> Expr:
    """Canonical expression equal to ``coeff * product(factors)`` in order."""
    if coeff == 0:
        return ZERO
    pending: list[Expr] = []
    flat: list[Factor] = []
    for f in factors:
        res = _identity_canon(f)
        if res is None:
            return ZERO
        c, g = res
        coeff *= c
        flat.append(g)

    # merge factors with the same base, then normalise, until stable
    while True:
        merged: dict = {}
        order: list = []
        changed = False
        for f in flat:
            ident = factor_identity(f)
            if ident in merged:
                prev = merged[ident]
                if prev.parity == ODD:
                    return ZERO  # repeated odd factor
                merged[ident] = _with_exp(prev, prev.exp + f.exp)
                changed = True
            else:
                merged[ident] = f
                order.append(ident)
        flat = []
        for ident in order:
            res = _norm_single(merged[ident])
            if res is None:
                return ZERO
            c, fs, pend = res
            coeff *= c
            if coeff == 0:
                return ZERO
            flat.extend(fs)
            if pend:
                pending.extend(pend)
                changed = True
            elif fs != [merged[ident]]:
                changed = True
        if not changed:
            break

    # sort, tracking the permutation parity of the odd factors
    keyed = [(factor_identity(f), i, f) for i, f in enumerate(flat)]
    odd_keys = [k for k, _, f in keyed if f.parity == ODD]
    sign = 1
    for a in range(len(odd_keys)):
        for b in range(a + 1, len(odd_keys)):
            if odd_keys[a] > odd_keys[b]:
                sign = -sign
    keyed.sort(key=lambda item: (item[0], item[1]))
    result = Expr((Term(coeff * sign, tuple(f for _, _, f in keyed)),))
    for p in pending:
        result = multiply(result, p)
    return result


def _with_exp(f: Factor, exp: Fraction) -> Factor:
    if isinstance(f, SymPow):
        return SymPow(f.sym, exp)
    if isinstance(f, FuncOcc):
        return FuncOcc(f.fn, f.derivs, exp, f.args)
    if isinstance(f, NumPow):
        return NumPow(f.base, exp)
    return ExprPow(f.base, exp)


# ---------------------------------------------------------------------------
# Sum assembly: merge, align composite denominators, sort


def _assemble(terms: list[Term]) -> Expr:
    merged: dict = {}
    for t in terms:
        if t.coeff == 0:
            continue
        k = t.key()
        if k in merged:
            prev = merged[k]
            merged[k] = Term(prev.coeff + t.coeff, prev.factors)
        else:
            merged[k] = t
    live = [t for t in merged.values() if t.coeff != 0]
    live = _align(live)
    live.sort(key=Term.key)
    return Expr(tuple(live))


def _frac_class(e: Fraction) -> Fraction:
    return e - (e.numerator // e.denominator)


def _align(terms: list[Term]) -> list[Term]:
    """Rewrite composite-power factors over per-class minimal exponents."""
    for _ in range(8):  # stabilises in <= 2 passes in practice
        minima: dict = {}  # (base terms, class) -> min exponent
        bases: dict = {}
        for t in terms:
            for f in t.factors:
                if isinstance(f, ExprPow):
                    cls = _frac_class(f.exp)
                    key = (f.base.terms, cls)
                    bases[f.base.terms] = f.base
                    minima[key] = min(minima.get(key, f.exp), f.exp)
        if not minima:
            return terms
        # absent integer-class factors count as exponent 0
        for key in minima:
            if key[1] == 0:
                minima[key] = min(minima[key], Fraction(0))
        needs_work = False
        out: list[Term] = []
        for t in terms:
            expos = {}
            for f in t.factors:
                if isinstance(f, ExprPow):
                    expos[(f.base.terms, _frac_class(f.exp))] = f.exp
            multiplier: list[tuple[Expr, int]] = []
            rewritten: list[Factor] = []
            for f in t.factors:
                if isinstance(f, ExprPow):
                    key = (f.base.terms, _frac_class(f.exp))
                    m = minima[key]
                    if f.exp > m:
                        rewritten.append(ExprPow(f.base, m))
                        multiplier.append((f.base, int(f.exp - m)))
                    else:
                        rewritten.append(f)
                else:
                    rewritten.append(f)
            for (bterms, cls), m in minima.items():
                if cls == 0 and m < 0 and (bterms, cls) not in expos:
                    rewritten.append(ExprPow(bases[bterms], m))
                    multiplier.append((bases[bterms], int(-m)))
            if not multiplier:
                out.append(Term(t.coeff, tuple(rewritten)))
                continue
            needs_work = True
            piece = Expr((Term(t.coeff, tuple(rewritten)),))
            for base, k in multiplier:
                for _ in range(k):
                    piece = _mul_no_align(piece, base)
            out.extend(piece.terms)
        if not needs_work:
            return terms
        merged: dict = {}
        for t in out:
            k = t.key()
            if k in merged:
                merged[k] = Term(merged[k].coeff + t.coeff, t.factors)
            else:
                merged[k] = t
        terms = [t for t in merged.values() if t.coeff != 0]
    return terms


def _mul_no_align(a: Expr, b: Expr) -> Expr:
    pieces: list[Term] = []
    for ta in a.terms:
        for tb in b.terms:
            prod = _canon_term(ta.coeff * tb.coeff, ta.factors + tb.factors)
            pieces.extend(prod.terms)
    merged: dict = {}
    for t in pieces:
        k = t.key()
        if k in merged:
            merged[k] = Term(merged[k].coeff + t.coeff, t.factors)
        else:
            merged[k] = t
    live = [t for t in merged.values() if t.coeff != 0]
    live.sort(key=Term.key)
    return Expr(tuple(live))


# ---------------------------------------------------------------------------
# Ring operations


def multiply(a: Expr, b: Expr) -> Expr:
    terms: list[Term] = []
    for ta in a.terms:
        for tb in b.terms:
            prod = _canon_term(ta.coeff * tb.coeff, ta.factors + tb.factors)
            terms.extend(prod.terms)
    return _assemble(terms)


def power(e: Expr, exp) -> Expr:
    exp = Fraction(exp)
    if exp == 0:
        return ONE
    if exp == 1:
        return e
    if e.is_zero():
        if exp > 0:
            return ZERO
        raise MalformedTermError("zero raised to a non-positive power")
    if len(e.terms) == 1:
        return _term_pow(e.terms[0], exp)
    if exp.denominator == 1 and exp > 0:
        result = ONE
        for _ in range(exp.numerator):
            result = multiply(result, e)
        return result
    return _composite_pow(e, exp)


def _term_pow(t: Term, exp: Fraction) -> Expr:
    if any(f.parity == ODD for f in t.factors):
        if exp.denominator == 1 and exp > 1:
            return ZERO  # square of odd content vanishes
        raise MalformedTermError(f"power {exp} of a term with odd factors")
    coeff, radical = _num_pow_factor(t.coeff, exp)
    factors: list[Factor] = [radical] if radical else []
    for f in t.factors:
        factors.append(_with_exp(f, f.exp * exp))
    return _canon_term(coeff, tuple(factors))


def _rational_content(e: Expr) -> Fraction:
    num_gcd, den_lcm = 0, 1
    for t in e.terms:
        num_gcd = math.gcd(num_gcd, abs(t.coeff.numerator))
        g = math.gcd(den_lcm, t.coeff.denominator)
        den_lcm = den_lcm * t.coeff.denominator // g
    return Fraction(num_gcd, den_lcm)


def _composite_pow(e: Expr, exp: Fraction) -> Expr:
    if e.parity() != EVEN:
        raise ParityError("composite power of a non-even expression")
    for t in e.terms:
        if any(isinstance(f, ExprPow) for f in t.factors):
            raise UnsupportedOperation(
                "nested composite powers are not supported")
    # pull out rational content so structurally equal bases coincide
    content = _rational_content(e)
    lead_sign = 1 if e.terms[0].coeff > 0 else -1
    scale = content * lead_sign
    if _exact_pow(scale, exp) is None and lead_sign < 0:
        scale = content  # irrational sign extraction: keep the sign inside
    coeff, radical = _num_pow_factor(scale, exp)
    base = Expr(tuple(Term(t.coeff / scale, t.factors) for t in e.terms))
    factors: list[Factor] = [radical] if radical else []
    factors.append(ExprPow(base, exp))
    return _canon_term(coeff, tuple(factors))


def is_zero(e: Expr) -> bool:
    return e.is_zero()


def equals(a: Expr, b: Expr) -> bool:
    """Semantic equality through the canonical zero test on a - b."""
    return (a - b).is_zero()


# ---------------------------------------------------------------------------
# Differentiation


def derive(e: Expr, v: Symbol) -> Expr:
    """Graded derivative of ``e`` with respect to the coordinate ``v``.

    The derivation acts from the left: passing an odd factor while ``v``
    is odd contributes a sign.  Derivative slots are appended to function
    multi-indices, matching the convention that the leftmost index is
    applied first.
    """
    total = ZERO
    for t in e.terms:
        sign = 1
        for i, f in enumerate(t.factors):
            df = _derive_factor(f, v)
            if df is not None and not df.is_zero():
                prefix = _canon_term(Fraction(t.coeff * sign), t.factors[:i])
                suffix = _canon_term(Fraction(1), t.factors[i + 1:])
                total = total + multiply(prefix, multiply(df, suffix))
            if v.parity == ODD and f.parity == ODD:
                sign = -sign
    return total


def _derive_factor(f: Factor, v: Symbol) -> Optional[Expr]:
    if isinstance(f, NumPow):
        return None
    if isinstance(f, SymPow):
        if f.sym != v:
            return None
        if f.sym.parity == ODD:
            return ONE
        return _canon_term(Fraction(f.exp), (SymPow(f.sym, f.exp - 1),))
    if isinstance(f, ExprPow):
        dbase = derive(f.base, v)
        if dbase.is_zero():
            return None
        head = _canon_term(Fraction(f.exp), (ExprPow(f.base, f.exp - 1),))
        return multiply(head, dbase)
    # FuncOcc
    if f.args is None:
        if v.kind != KIND_COORD:
            return None
        try:
            f.fn.slot_index(v.name)
        except DeclarationError:
            return None
        return _occ_slot_derivative(f, v.name)
    total = ZERO
    for (slot, _), arg in zip(f.fn.slots, f.args):
        darg = derive(arg, v)
        if darg.is_zero():
            continue
        tail = _occ_slot_derivative(f, slot)
        # chain rule with the inner derivative on the left
        total = total + multiply(darg, tail)
    return total if not total.is_zero() else None


def _occ_slot_derivative(f: FuncOcc, slot: str) -> Expr:
    """d/d(slot) of ``occ**exp`` with the power rule applied."""
    bumped = FuncOcc(f.fn, f.derivs + (slot,), Fraction(1), f.args)
    if f.exp == 1:
        return _canon_term(Fraction(1), (bumped,))
    head = FuncOcc(f.fn, f.derivs, f.exp - 1, f.args)
    return _canon_term(Fraction(f.exp), (head, bumped))


# ---------------------------------------------------------------------------
# Substitution


Binding = Mapping[Union[Symbol, FunctionDecl], Expr]


def substitute(e: Expr, bindings: Binding) -> Expr:
    """Simultaneous capture-free substitution, then normalisation.

    Symbol bindings must preserve parity.  Function bindings replace
    occurrences: the derivative multi-index is applied to the bound
    expression with `derive`, realising the graded chain rule.
    """
    for target, value in bindings.items():
        vp = value.parity()
        if vp is not None and not value.is_zero() and vp != target.parity:
            raise ParityError(
                f"binding for {target.name!r} has parity {vp}, "
                f"expected {target.parity}")
    total = ZERO
    for t in e.terms:
        piece = Expr((Term(t.coeff, ()),))
        for f in t.factors:
            piece = multiply(piece, _subst_factor(f, bindings))
        total = total + piece
    return total


def _subst_factor(f: Factor, bindings: Binding) -> Expr:
    if isinstance(f, NumPow):
        return Expr((Term(Fraction(1), (f,)),))
    if isinstance(f, SymPow):
        value = bindings.get(f.sym)
        if value is None:
            return Expr((Term(Fraction(1), (f,)),))
        return power(value, f.exp)
    if isinstance(f, ExprPow):
        return power(substitute(f.base, bindings), f.exp)
    # FuncOcc
    value = bindings.get(f.fn)
    if value is None:
        if f.args is None:
            return _compose_ambient(f, bindings)
        new_args = tuple(substitute(a, bindings) for a in f.args)
        return _canon_term(Fraction(1), (FuncOcc(f.fn, f.derivs, f.exp, new_args),))
    if f.args is not None:
        raise UnsupportedOperation(
            f"cannot bind composed occurrence of {f.fn.name!r}")
    result = value
    for slot in f.derivs:
        i = f.fn.slot_index(slot)
        coord = _slot_coordinate(f.fn, i)
        result = derive(result, coord)
    return power(result, f.exp)


def _compose_ambient(f: FuncOcc, bindings: Binding) -> Expr:
    """Compose an ambient occurrence with coordinate bindings.

    A binding that shifts a slot coordinate by a square-zero amount is
    composed exactly through the first-order Taylor expansion (all higher
    orders vanish); non-nilpotent shifts of occurrence arguments are
    refused, since no finite expansion exists.
    """
    deltas = []
    for i, (name, _) in enumerate(f.fn.slots):
        coord = _slot_coordinate(f.fn, i)
        value = bindings.get(coord)
        if value is None:
            continue
        delta = value - atom(coord)
        if not delta.is_zero():
            deltas.append((name, delta))
    if not deltas:
        return Expr((Term(Fraction(1), (f,)),))
    for i in range(len(deltas)):
        for j in range(i, len(deltas)):
            if not multiply(deltas[i][1], deltas[j][1]).is_zero():
                raise UnsupportedOperation(
                    f"cannot compose occurrence of {f.fn.name!r} with the "
                    f"non-nilpotent shift of {deltas[i][0]!r}/{deltas[j][0]!r}")
    out = _canon_term(Fraction(1), (FuncOcc(f.fn, f.derivs, Fraction(1), None),))
    for name, delta in deltas:
        bumped = _canon_term(
            Fraction(1), (FuncOcc(f.fn, f.derivs + (name,), Fraction(1), None),))
        out = out + multiply(delta, bumped)
    return power(out, f.exp) if f.exp != 1 else out


_SLOT_CACHE: dict = {}


def _slot_coordinate(fn: FunctionDecl, index: int) -> Symbol:
    """Ambient coordinate symbol matching a function slot (by name/parity)."""
    name, parity = fn.slots[index]
    key = (name, parity)
    if key not in _SLOT_CACHE:
        _SLOT_CACHE[key] = Symbol(name, parity, KIND_COORD)
    return _SLOT_CACHE[key]


# ---------------------------------------------------------------------------
# Declaration context


class Context:
    """A registry of symbol and function declarations.

    Expressions are self-contained once built; the context only guards
    name uniqueness and provides lookup for parsing and builders.
    """

    def __init__(self):
        self.symbols: dict[str, Symbol] = {}
        self.functions: dict[str, FunctionDecl] = {}

    def symbol(self, name: str, parity: int = EVEN, kind: str = KIND_CONST,
               nonzero: bool = False, square_one: bool = False) -> Symbol:
        if name in self.symbols or name in self.functions:
            existing = self.symbols.get(name)
            candidate = Symbol(name, parity, kind, nonzero, square_one)
            if existing == candidate:
                return existing
            raise DeclarationError(f"{name!r} is already declared")
        sym = Symbol(name, parity, kind, nonzero, square_one)
        self.symbols[name] = sym
        return sym

    def coord(self, name: str, parity: int = EVEN) -> Symbol:
        return self.symbol(name, parity, KIND_COORD)

    def const(self, name: str, parity: int = EVEN, nonzero: bool = False,
              square_one: bool = False) -> Symbol:
        return self.symbol(name, parity, KIND_CONST, nonzero, square_one)

    def param(self, name: str, parity: int = EVEN, nonzero: bool = False,
              square_one: bool = False) -> Symbol:
        return self.symbol(name, parity, KIND_PARAM, nonzero, square_one)

    def function(self, name: str, slots: Sequence[Union[Symbol, tuple[str, int]]],
                 parity: int = EVEN, self_derivative: bool = False) -> FunctionDecl:
        if name in self.functions or name in self.symbols:
            raise DeclarationError(f"{name!r} is already declared")
        norm = []
        for s in slots:
            if isinstance(s, Symbol):
                norm.append((s.name, s.parity))
            else:
                norm.append((s[0], s[1]))
        decl = FunctionDecl(name, parity, tuple(norm), self_derivative)
        self.functions[name] = decl
        return decl

    def lookup(self, name: str) -> Union[Symbol, FunctionDecl]:
        if name in self.symbols:
            return self.symbols[name]
        if name in self.functions:
            return self.functions[name]
        raise DeclarationError(f"undeclared identifier {name!r}")

    def __contains__(self, name: str) -> bool:
        return name in self.symbols or name in self.functions
