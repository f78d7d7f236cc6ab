"""Graded derivations on superspace: d/dx, d/dt, d/dth1, d/dth2, the
supersymmetry generators Q1, Q2, the covariant derivatives D1, D2,
superfield expansion and component extraction.

Superspace has two even coordinates ``x``, ``t`` and two odd
coordinates ``th1``, ``th2``.  The operator algebra is::

    Q1 = d/dth1 - th1 d/dx      D1 = d/dth1 + th1 d/dx
    Q2 = d/dth2 - th2 d/dt      D2 = d/dth2 + th2 d/dt

Direct squares give D1 o D1 = d/dx and D2 o D2 = d/dt, so the
anticommutators are {D1,D1} = 2 d/dx and {D2,D2} = 2 d/dt; identity
checks report both readings.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

from .algebra import (EVEN, ODD, Context, Expr, FunctionDecl, Symbol, ZERO,
                      as_expr, atom, derive, multiply, occurrence)


def superspace(ctx: Optional[Context] = None) -> Context:
    """Declare (or reuse) the standard superspace coordinates on a context."""
    ctx = ctx or Context()
    for name, parity in (("x", EVEN), ("t", EVEN), ("th1", ODD), ("th2", ODD)):
        if name not in ctx:
            ctx.coord(name, parity)
    return ctx


# ---------------------------------------------------------------------------
# Operators


@dataclass(frozen=True)
class SuperOperator:
    """A sum of words in {partial derivatives, multiplication operators}.

    Each summand is ``(coeff, word)``; the word acts right to left, the
    coefficient multiplies from the left.  Word letters are either
    ``("d", symbol)`` or ``("mul", expr)``.
    """

    terms: tuple[tuple[Expr, tuple], ...]

    def __call__(self, e: Expr) -> Expr:
        out = ZERO
        for coeff, word in self.terms:
            val = e
            for letter in reversed(word):
                tag, payload = letter
                val = derive(val, payload) if tag == "d" else multiply(payload, val)
            out = out + multiply(coeff, val)
        return out

    def __add__(self, other: "SuperOperator") -> "SuperOperator":
        return SuperOperator(self.terms + other.terms)

    def __sub__(self, other: "SuperOperator") -> "SuperOperator":
        return self + SuperOperator(
            tuple((multiply(as_expr(-1), c), w) for c, w in other.terms))

    def __mul__(self, other: "SuperOperator") -> "SuperOperator":
        # operator composition: (A*B)(f) = A(B(f))
        out = []
        for ca, wa in self.terms:
            for cb, wb in other.terms:
                # fold cb into the word so it is applied after wb's letters
                word = wa + (("mul", cb),) + wb if not _is_one(cb) else wa + wb
                out.append((ca, word))
        return SuperOperator(tuple(out))

    def scaled(self, k) -> "SuperOperator":
        return SuperOperator(tuple((multiply(as_expr(k), c), w) for c, w in self.terms))


def _is_one(e: Expr) -> bool:
    return e.as_fraction() == 1


def d(sym: Symbol) -> SuperOperator:
    return SuperOperator(((as_expr(1), (("d", sym),)),))


def mul_op(e: Expr) -> SuperOperator:
    return SuperOperator(((as_expr(1), (("mul", e),)),))


def anticommutator(a: SuperOperator, b: SuperOperator) -> SuperOperator:
    return a * b + b * a


@dataclass(frozen=True)
class OperatorAlgebra:
    """The standard operator set bound to a superspace context."""

    ctx: Context

    @property
    def x(self) -> Symbol:
        return self.ctx.symbols["x"]

    @property
    def t(self) -> Symbol:
        return self.ctx.symbols["t"]

    @property
    def th1(self) -> Symbol:
        return self.ctx.symbols["th1"]

    @property
    def th2(self) -> Symbol:
        return self.ctx.symbols["th2"]

    @property
    def dx(self) -> SuperOperator:
        return d(self.x)

    @property
    def dt(self) -> SuperOperator:
        return d(self.t)

    @property
    def dth1(self) -> SuperOperator:
        return d(self.th1)

    @property
    def dth2(self) -> SuperOperator:
        return d(self.th2)

    @property
    def Q1(self) -> SuperOperator:
        return self.dth1 - mul_op(atom(self.th1)) * self.dx

    @property
    def Q2(self) -> SuperOperator:
        return self.dth2 - mul_op(atom(self.th2)) * self.dt

    @property
    def D1(self) -> SuperOperator:
        return self.dth1 + mul_op(atom(self.th1)) * self.dx

    @property
    def D2(self) -> SuperOperator:
        return self.dth2 + mul_op(atom(self.th2)) * self.dt

    def named(self, name: str) -> SuperOperator:
        table = {"D1": self.D1, "D2": self.D2, "Q1": self.Q1, "Q2": self.Q2,
                 "dx": self.dx, "dt": self.dt, "dth1": self.dth1,
                 "dth2": self.dth2}
        return table[name]


# ---------------------------------------------------------------------------
# Superfields


@dataclass(frozen=True)
class Superfield:
    """A named even superfield with four component functions of (x, t)."""

    name: str
    body: FunctionDecl    # even
    theta1: FunctionDecl  # odd
    theta2: FunctionDecl  # odd
    top: FunctionDecl     # even

    def __post_init__(self):
        parities = (self.body.parity, self.theta1.parity,
                    self.theta2.parity, self.top.parity)
        if parities != (EVEN, ODD, ODD, EVEN):
            raise ValueError(f"bad component parities for superfield {self.name}")


def declare_superfield(ctx: Context, name: str,
                       components: Sequence[str]) -> Superfield:
    """Declare the four component functions (body, th1, th2, top) of (x,t)."""
    x, t = ctx.symbols["x"], ctx.symbols["t"]
    body, c1, c2, top = components
    return Superfield(
        name,
        ctx.function(body, [x, t], EVEN),
        ctx.function(c1, [x, t], ODD),
        ctx.function(c2, [x, t], ODD),
        ctx.function(top, [x, t], EVEN),
    )


def expand_superfield(ctx: Context, s: Superfield) -> Expr:
    th1, th2 = atom(ctx.symbols["th1"]), atom(ctx.symbols["th2"])
    return (occurrence(s.body) + th1 * occurrence(s.theta1)
            + th2 * occurrence(s.theta2) + th1 * th2 * occurrence(s.top))


def components(ctx: Context, e: Expr) -> tuple[Expr, Expr, Expr, Expr]:
    """Split e = c0 + th1 c1 + th2 c2 + th1 th2 c12 (coefficients theta-free)."""
    th1 = ctx.symbols["th1"]
    th2 = ctx.symbols["th2"]
    c = [ZERO, ZERO, ZERO, ZERO]
    for term in e.terms:
        stripped, sign, which = _strip_thetas(term, th1, th2)
        c[which] = c[which] + multiply(as_expr(sign), stripped)
    return tuple(c)  # type: ignore[return-value]


def _strip_thetas(term, th1: Symbol, th2: Symbol):
    from .algebra import SymPow, Term

    sign = 1
    factors = list(term.factors)
    found = 0
    for target, bit in ((th1, 1), (th2, 2)):
        idx = None
        for i, f in enumerate(factors):
            if isinstance(f, SymPow) and f.sym == target:
                idx = i
                break
        if idx is None:
            continue
        # move the theta factor to the front, past earlier odd factors
        before = sum(1 for f in factors[:idx] if f.parity == ODD)
        sign *= (-1) ** before
        factors.pop(idx)
        found |= bit
    which = {0: 0, 1: 1, 2: 2, 3: 3}[found]
    return Expr((Term(term.coeff, tuple(factors)),)), Fraction(sign), which


def generic_superfield(ctx: Context, name: str = "Fgen") -> Expr:
    """An opaque even function of all four superspace coordinates."""
    coords = [ctx.symbols[n] for n in ("x", "t", "th1", "th2")]
    fn = ctx.function(name, coords, EVEN)
    return occurrence(fn)


# ---------------------------------------------------------------------------
# Operator identity checks


@dataclass(frozen=True)
class IdentityCheck:
    name: str
    holds: bool
    residual: Expr


def operator_identity_check(ctx: Context, lhs: SuperOperator,
                            rhs: SuperOperator, name: str = "",
                            probes: Optional[Sequence[Expr]] = None) -> IdentityCheck:
    """Apply lhs - rhs to a generic superfield and to sample monomials."""
    ctx_probe = Context()
    superspace(ctx_probe)
    probe_list = list(probes) if probes is not None else []
    if probes is None:
        probe_list.append(generic_superfield(ctx_probe, "Fgen"))
        x, t = ctx_probe.symbols["x"], ctx_probe.symbols["t"]
        th1, th2 = ctx_probe.symbols["th1"], ctx_probe.symbols["th2"]
        X, T, H1, H2 = map(atom, (x, t, th1, th2))
        probe_list += [X * X * T, H1 * H2, X * H1 + T * H2, H2 * X * T]
    residual = ZERO
    for p in probe_list:
        residual = residual + (lhs(p) - rhs(p))
    return IdentityCheck(name, residual.is_zero(), residual)


def standard_identity_suite(ctx: Optional[Context] = None) -> list[IdentityCheck]:
    """The covariant-derivative and supersymmetry operator identities.

    Includes both readings of the covariant-derivative squares: the
    anticommutators {D1,D1} = 2 dx, {D2,D2} = 2 dt and the direct
    squares D1^2 = dx, D2^2 = dt.
    """
    ctx = superspace(ctx)
    ops = OperatorAlgebra(ctx)
    two_dx, two_dt = ops.dx.scaled(2), ops.dt.scaled(2)
    zero = SuperOperator(())
    checks = [
        ("{D1,D1} = 2 dx", anticommutator(ops.D1, ops.D1), two_dx),
        ("{D2,D2} = 2 dt", anticommutator(ops.D2, ops.D2), two_dt),
        ("{D1,D2} = 0", anticommutator(ops.D1, ops.D2), zero),
        ("{D1,Q1} = 0", anticommutator(ops.D1, ops.Q1), zero),
        ("{D1,Q2} = 0", anticommutator(ops.D1, ops.Q2), zero),
        ("{D2,Q1} = 0", anticommutator(ops.D2, ops.Q1), zero),
        ("{D2,Q2} = 0", anticommutator(ops.D2, ops.Q2), zero),
        ("{Q1,Q1} = -2 dx", anticommutator(ops.Q1, ops.Q1), two_dx.scaled(-1)),
        ("{Q2,Q2} = -2 dt", anticommutator(ops.Q2, ops.Q2), two_dt.scaled(-1)),
        ("{Q1,Q2} = 0", anticommutator(ops.Q1, ops.Q2), zero),
        ("D1 o D1 = dx (direct square)", ops.D1 * ops.D1, ops.dx),
        ("D2 o D2 = dt (direct square)", ops.D2 * ops.D2, ops.dt),
    ]
    return [operator_identity_check(ctx, lhs, rhs, name) for name, lhs, rhs in checks]
