"""Super vector fields on (x, t, th1, th2, A, B, Phi), graded brackets,
the supercommutation table of the six symmetry generators, their exact
finite flows, and verification that each one maps the two-phase system
onto a constant multiple of itself.

The six generators::

    P1 = d/dx                     P2 = d/dt
    M1 = 2x d/dx + 2t d/dt + th1 d/dth1 + th2 d/dth2 + 2 Phi d/dPhi
    M2 = A d/dA + B d/dB
    Q1 = d/dth1 - th1 d/dx       Q2 = d/dth2 - th2 d/dt
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from .algebra import (EVEN, ODD, Context, Expr, FuncOcc, SymPow, Symbol, Term,
                      ZERO, as_expr, atom, derive, multiply, power)
from .linsolve import _gauss_solve, solve_combination
from .system import SusySystem, build_system, load_golden

DIRECTIONS = ("x", "t", "th1", "th2", "A", "B", "Phi")
DIRECTION_PARITY = {"x": EVEN, "t": EVEN, "th1": ODD, "th2": ODD,
                    "A": EVEN, "B": EVEN, "Phi": EVEN}
BASIS_ORDER = ("M2", "M1", "P1", "Q1", "P2", "Q2")
BASIS_PARITY = {"M2": EVEN, "M1": EVEN, "P1": EVEN, "P2": EVEN,
                "Q1": ODD, "Q2": ODD}


def field_space() -> Context:
    """Coordinates of the jet-free field space the generators act on."""
    ctx = Context()
    for name in DIRECTIONS:
        ctx.coord(name, DIRECTION_PARITY[name])
    return ctx


@dataclass(frozen=True)
class SuperVectorField:
    """Homogeneous vector field; one coefficient expression per direction."""

    ctx: Context
    parity: int
    coeffs: tuple[Expr, ...]  # aligned with DIRECTIONS

    def __post_init__(self):
        for name, c in zip(DIRECTIONS, self.coeffs):
            want = (self.parity + DIRECTION_PARITY[name]) % 2
            got = c.parity()
            if got is not None and not c.is_zero() and got != want:
                raise ValueError(
                    f"coefficient of d/d{name} has parity {got}, expected {want}")

    def coeff(self, name: str) -> Expr:
        return self.coeffs[DIRECTIONS.index(name)]

    def __call__(self, e: Expr) -> Expr:
        out = ZERO
        for name, c in zip(DIRECTIONS, self.coeffs):
            if c.is_zero():
                continue
            out = out + multiply(c, derive(e, self.ctx.symbols[name]))
        return out

    def is_zero(self) -> bool:
        return all(c.is_zero() for c in self.coeffs)


def make_field(ctx: Context, parity: int, **coeffs: Expr) -> SuperVectorField:
    return SuperVectorField(
        ctx, parity, tuple(coeffs.get(name, ZERO) for name in DIRECTIONS))


def generators(ctx: Optional[Context] = None) -> dict[str, SuperVectorField]:
    ctx = ctx or field_space()
    sym = {n: atom(ctx.symbols[n]) for n in DIRECTIONS}
    return {
        "P1": make_field(ctx, EVEN, x=as_expr(1)),
        "P2": make_field(ctx, EVEN, t=as_expr(1)),
        "M1": make_field(ctx, EVEN, x=2 * sym["x"], t=2 * sym["t"],
                         th1=sym["th1"], th2=sym["th2"], Phi=2 * sym["Phi"]),
        "M2": make_field(ctx, EVEN, A=sym["A"], B=sym["B"]),
        "Q1": make_field(ctx, ODD, th1=as_expr(1), x=-sym["th1"]),
        "Q2": make_field(ctx, ODD, th2=as_expr(1), t=-sym["th2"]),
    }


def bracket(X: SuperVectorField, Y: SuperVectorField) -> SuperVectorField:
    """Graded bracket: the anticommutator when both fields are odd,
    the commutator otherwise."""
    sign = -1 if (X.parity and Y.parity) else 1  # (-1)^{p(X)p(Y)}
    coeffs = tuple(X(yc) - sign * Y(xc) for xc, yc in zip(X.coeffs, Y.coeffs))
    return SuperVectorField(X.ctx, (X.parity + Y.parity) % 2, coeffs)


def linear_combination(ctx: Context, coeffs: dict[str, Expr]) -> SuperVectorField:
    """Sum of coefficient * generator; the result must be homogeneous even."""
    gens = generators(ctx)
    out = [ZERO] * len(DIRECTIONS)
    for name, c in coeffs.items():
        g = gens[name]
        for i, gc in enumerate(g.coeffs):
            out[i] = out[i] + multiply(c, gc)
    return SuperVectorField(ctx, EVEN, tuple(out))


# ---------------------------------------------------------------------------
# Structure table


def decompose_in_basis(field: SuperVectorField) -> Optional[dict[str, Fraction]]:
    """Write a field as a rational combination of the six generators."""
    gens = generators(field.ctx)
    names = list(BASIS_ORDER)
    keysets = []
    for d in range(len(DIRECTIONS)):
        keys = set()
        for g in gens.values():
            for t in g.coeffs[d].terms:
                keys.add(t.key())
        for t in field.coeffs[d].terms:
            keys.add(t.key())
        keysets.append(sorted(keys))
    matrix, rhs = [], []
    for d, keys in enumerate(keysets):
        for k in keys:
            row = []
            for name in names:
                coeff = Fraction(0)
                for t in gens[name].coeffs[d].terms:
                    if t.key() == k:
                        coeff = t.coeff
                row.append(coeff)
            matrix.append(row)
            b = Fraction(0)
            for t in field.coeffs[d].terms:
                if t.key() == k:
                    b = t.coeff
            rhs.append(b)
    sol = _gauss_solve(matrix, rhs)
    if sol is None:
        return None
    return {name: c for name, c in zip(names, sol)}


@dataclass(frozen=True)
class TableEntry:
    left: str
    right: str
    bracket_kind: str  # "commutator" | "anticommutator"
    combination: dict[str, Fraction]


def build_structure_table(ctx: Optional[Context] = None):
    """All 36 supercommutation entries plus the diff against the golden table."""
    ctx = ctx or field_space()
    gens = generators(ctx)
    golden = load_golden("table1.json")["entries"]
    entries = {}
    mismatches = []
    for left in BASIS_ORDER:
        for right in BASIS_ORDER:
            result = bracket(gens[left], gens[right])
            combo = decompose_in_basis(result)
            if combo is None:
                mismatches.append((left, right, "not in the generator span"))
                continue
            kind = ("anticommutator"
                    if BASIS_PARITY[left] and BASIS_PARITY[right]
                    else "commutator")
            combo = {k: v for k, v in combo.items() if v != 0}
            entries[(left, right)] = TableEntry(left, right, kind, combo)
            expected = {k: Fraction(*v)
                        for k, v in golden.get(f"{left},{right}", {}).items()}
            if combo != expected:
                mismatches.append((left, right, f"{combo} != {expected}"))
    return entries, mismatches


def jacobi_residual(X: SuperVectorField, Y: SuperVectorField,
                    Z: SuperVectorField) -> SuperVectorField:
    """Graded Jacobi defect [X,[Y,Z]] - [[X,Y],Z] - (-1)^{p(X)p(Y)} [Y,[X,Z]]."""
    sign = -1 if (X.parity and Y.parity) else 1
    lhs = bracket(X, bracket(Y, Z))
    rhs1 = bracket(bracket(X, Y), Z)
    rhs2 = bracket(Y, bracket(X, Z))
    coeffs = tuple(a - b - sign * c
                   for a, b, c in zip(lhs.coeffs, rhs1.coeffs, rhs2.coeffs))
    return SuperVectorField(X.ctx, lhs.parity, coeffs)


# ---------------------------------------------------------------------------
# Finite flows


@dataclass(frozen=True)
class FlowMap:
    """Exact finite flow of a generator, ready for pulling back equations.

    ``coord_map`` is the forward transform of the explicit coordinates.
    ``nabla`` expresses a derivative with respect to a new coordinate in
    terms of old-point derivatives (the constant Jacobian of the inverse
    map, inner factor on the left).  ``field_scale`` holds the
    multiplicative factors of the transformed superfields.
    """

    generator: str
    params: tuple[Symbol, ...]
    coord_map: dict[Symbol, Expr]
    nabla: dict[str, tuple[tuple[Expr, Symbol], ...]]
    field_scale: dict[str, Expr]


def finite_action(ctx: Context, generator: str) -> FlowMap:
    """Closed-form flow of one of the six generators on the system context.

    Flow parameters are declared on the context: ``r`` for translations,
    odd ``eta1``/``eta2`` for the supersymmetry shifts, and positive
    scales ``es`` (the exponential of the dilation parameter) for M1,
    ``em`` for M2.
    """
    x, t = ctx.symbols["x"], ctx.symbols["t"]
    th1, th2 = ctx.symbols["th1"], ctx.symbols["th2"]
    X, T, H1, H2 = map(atom, (x, t, th1, th2))
    ident = {n: ((as_expr(1), ctx.symbols[n]),) for n in ("x", "t", "th1", "th2")}
    ones = {"A": as_expr(1), "B": as_expr(1), "Phi": as_expr(1)}

    if generator == "P1":
        r = _ensure(ctx, "r", EVEN)
        return FlowMap("P1", (r,), {x: X + atom(r)}, ident, ones)
    if generator == "P2":
        r = _ensure(ctx, "r", EVEN)
        return FlowMap("P2", (r,), {t: T + atom(r)}, ident, ones)
    if generator == "Q1":
        eta = _ensure(ctx, "eta1", ODD)
        E = atom(eta)
        nabla = dict(ident)
        nabla["th1"] = ((-E, x), (as_expr(1), th1))
        return FlowMap("Q1", (eta,),
                       {x: X - E * H1, th1: H1 + E}, nabla, ones)
    if generator == "Q2":
        eta = _ensure(ctx, "eta2", ODD)
        E = atom(eta)
        nabla = dict(ident)
        nabla["th2"] = ((-E, t), (as_expr(1), th2))
        return FlowMap("Q2", (eta,),
                       {t: T - E * H2, th2: H2 + E}, nabla, ones)
    if generator == "M1":
        s = _ensure(ctx, "es", EVEN, nonzero=True)
        S = atom(s)
        s2, sm1, sm2 = power(S, 2), power(S, -1), power(S, -2)
        nabla = {
            "x": ((sm2, x),), "t": ((sm2, t),),
            "th1": ((sm1, th1),), "th2": ((sm1, th2),),
        }
        return FlowMap("M1", (s,),
                       {x: s2 * X, t: s2 * T, th1: S * H1, th2: S * H2},
                       nabla, {"A": as_expr(1), "B": as_expr(1), "Phi": s2})
    if generator == "M2":
        m = _ensure(ctx, "em", EVEN, nonzero=True)
        M = atom(m)
        return FlowMap("M2", (m,), {}, ident, {"A": M, "B": M, "Phi": as_expr(1)})
    raise ValueError(f"unsupported generator {generator!r}")


def _ensure(ctx: Context, name: str, parity: int, nonzero: bool = False) -> Symbol:
    if name in ctx.symbols:
        return ctx.symbols[name]
    return ctx.const(name, parity, nonzero=nonzero)


def transform_equation(eq: Expr, flow: FlowMap, ctx: Context) -> Expr:
    """The equation evaluated on transformed fields at the transformed point,
    expressed entirely in source-point data."""
    out = ZERO
    for term in eq.terms:
        piece = Expr((Term(term.coeff, ()),))
        for f in term.factors:
            piece = multiply(piece, _transform_factor(f, flow, ctx))
        out = out + piece
    return out


def _transform_factor(f, flow: FlowMap, ctx: Context) -> Expr:
    if isinstance(f, SymPow):
        target = flow.coord_map.get(f.sym)
        if target is None:
            return Expr((Term(Fraction(1), (f,)),))
        return power(target, f.exp)
    if isinstance(f, FuncOcc):
        if f.exp != 1 or f.args is not None:
            raise ValueError("system equations carry plain occurrences only")
        from .algebra import occurrence

        value = occurrence(f.fn)
        for d in f.derivs:
            word = flow.nabla.get(d)
            if word is None:
                word = ((as_expr(1), ctx.symbols[d]),)
            value = _apply_nabla(word, value)
        scale = flow.field_scale.get(f.fn.name, as_expr(1))
        return multiply(scale, value)
    return Expr((Term(Fraction(1), (f,)),))


def _apply_nabla(word, value: Expr) -> Expr:
    out = ZERO
    for coeff, sym in word:
        out = out + multiply(coeff, derive(value, sym))
    return out


# ---------------------------------------------------------------------------
# Symmetry verification


@dataclass(frozen=True)
class SymmetryVerdict:
    generator: str
    holds: bool
    combination: Optional[dict]
    residual_note: str = ""


def symmetry_check(generator: str, sys: Optional[SusySystem] = None) -> SymmetryVerdict:
    """Pull the three equations back under the generator's exact flow and
    solve for a constant (parameter-dependent) recombination."""
    sys = sys or build_system()
    ctx = sys.ctx
    flow = finite_action(ctx, generator)
    originals = [sys.eq_A, sys.eq_B, sys.eq_M]
    param_names = tuple(p.name for p in flow.params)
    combos = {}
    for name, eq in (("A", sys.eq_A), ("B", sys.eq_B), ("M", sys.eq_M)):
        transformed = transform_equation(eq, flow, ctx)
        combo = solve_combination(transformed, originals, param_names,
                                  param_symbols={p.name: p for p in flow.params})
        if combo is None:
            return SymmetryVerdict(generator, False, None,
                                   f"equation {name}: no constant combination")
        combos[name] = {lbl: combo[j] for j, lbl in enumerate(("A", "B", "M"))}
    return SymmetryVerdict(generator, True, combos)


def symmetry_suite() -> list[SymmetryVerdict]:
    sys = build_system()
    return [symmetry_check(g, sys) for g in BASIS_ORDER]
