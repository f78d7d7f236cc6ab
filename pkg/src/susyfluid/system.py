"""The supersymmetric two-phase system: construction in covariant-derivative
form, expansion to coordinate form with a golden-file diff, classical limits,
and the Riemann-invariant form of the classical system.

The covariant-derivative words used here are the ones whose expansion
reproduces the reference coordinate equations exactly::

    eq_A: D2 D2 A - (D1 D1 A)(D1 D2 Phi) - (D1 D2 A)(D1 D1 Phi) = 0
    eq_B: the same with B in place of A
    eq_M: (D1 A)(D2 D2 D2 Phi) + (D1 D2 A)(D1 D2 Phi)(D1 D1 Phi)
          + (D1 B)(D2 D2 D2 Phi) + (D1 D2 B)(D1 D2 Phi)(D1 D1 Phi)
          + D1 D1 A + D1 D1 B = 0

The superfields enter as opaque even functions of (x, t, th1, th2);
component content is substituted afterwards for the classical limits.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass
from fractions import Fraction
from importlib import resources
from typing import Optional

from . import render
from .algebra import (EVEN, ODD, Context, Expr, FunctionDecl, ZERO, as_expr,
                      atom, derive, equals, multiply, occurrence, power,
                      substitute)
from .calculus import OperatorAlgebra, components, superspace
from .linsolve import clear_denominators, solve_combination


def golden_path(name: str) -> str:
    override = os.environ.get("SUSY_CAS_GOLDEN_DIR")
    if override:
        return os.path.join(override, name)
    return str(resources.files("susyfluid").joinpath("golden", name))


def load_golden(name: str) -> dict:
    with open(golden_path(name), "r", encoding="utf-8") as fh:
        return json.load(fh)


# ---------------------------------------------------------------------------
# System construction


@dataclass(frozen=True)
class SusySystem:
    ctx: Context
    A: FunctionDecl
    B: FunctionDecl
    Phi: FunctionDecl
    eq_A: Expr
    eq_B: Expr
    eq_M: Expr

    @property
    def equations(self) -> dict[str, Expr]:
        return {"A": self.eq_A, "B": self.eq_B, "M": self.eq_M}


def system_context() -> tuple[Context, FunctionDecl, FunctionDecl, FunctionDecl]:
    ctx = superspace()
    coords = [ctx.symbols[n] for n in ("x", "t", "th1", "th2")]
    A = ctx.function("A", coords, EVEN)
    B = ctx.function("B", coords, EVEN)
    Phi = ctx.function("Phi", coords, EVEN)
    return ctx, A, B, Phi


def build_system() -> SusySystem:
    """Apply the covariant-derivative words to opaque superfields."""
    ctx, A, B, Phi = system_context()
    ops = OperatorAlgebra(ctx)
    D1, D2 = ops.D1, ops.D2
    fA, fB, fP = occurrence(A), occurrence(B), occurrence(Phi)

    def eq_density(f: Expr) -> Expr:
        return (D2(D2(f))
                - multiply(D1(D1(f)), D1(D2(fP)))
                - multiply(D1(D2(f)), D1(D1(fP))))

    d23 = D2(D2(D2(fP)))
    d12p = D1(D2(fP))
    d11p = D1(D1(fP))
    eq_m = (multiply(D1(fA), d23)
            + multiply(multiply(D1(D2(fA)), d12p), d11p)
            + multiply(D1(fB), d23)
            + multiply(multiply(D1(D2(fB)), d12p), d11p)
            + D1(D1(fA)) + D1(D1(fB)))
    return SusySystem(ctx, A, B, Phi, eq_density(fA), eq_density(fB), eq_m)


def printed_dform_expansion() -> dict[str, Expr]:
    """Expansion of the compact covariant-derivative form under naive
    parenthesisation.

    Kept for the convention-mismatch report: this reading does not
    reproduce the reference coordinate equations (see expand_system).
    """
    ctx, A, B, Phi = system_context()
    ops = OperatorAlgebra(ctx)
    D1, D2 = ops.D1, ops.D2
    fA, fB, fP = occurrence(A), occurrence(B), occurrence(Phi)

    def eq_density(f: Expr) -> Expr:
        d13d2 = D1(D1(D1(D2(f))))
        return (D2(D2(f)) - multiply(d13d2, fP)
                - multiply(D1(D2(f)), D1(D1(fP))))

    d123p = D1(D2(D2(D2(fP))))
    d132p = D1(D1(D1(D2(fP))))
    eq_m = (multiply(fA, d123p)
            + multiply(multiply(D1(fA), D2(fP)), d132p)
            + multiply(fB, d123p)
            + multiply(multiply(D1(fB), D2(fP)), d132p)
            + D1(D1(fA)) + D1(D1(fB)))
    return {"A": eq_density(fA), "B": eq_density(fB), "M": eq_m}


# ---------------------------------------------------------------------------
# Golden diff


@dataclass(frozen=True)
class TermDiff:
    missing: tuple[str, ...]   # in the reference, not in the expansion
    extra: tuple[str, ...]     # in the expansion, not in the reference

    @property
    def empty(self) -> bool:
        return not self.missing and not self.extra


def term_diff(computed: Expr, reference: Expr) -> TermDiff:
    delta = computed - reference
    missing, extra = [], []
    for t in delta.terms:
        piece = render.text(Expr((t,)))
        (extra if t.coeff > 0 else missing).append(piece)
    return TermDiff(tuple(missing), tuple(extra))


def reference_component_equations(ctx: Context) -> dict[str, Expr]:
    data = load_golden("system_components.json")
    return {name: render.from_json(eq, ctx)
            for name, eq in data["equations"].items()}


def expand_system(sys: Optional[SusySystem] = None):
    """Coordinate form of the three equations plus the diff vs the golden file."""
    sys = sys or build_system()
    reference = reference_component_equations(sys.ctx)
    diffs = {name: term_diff(sys.equations[name], reference[name])
             for name in ("A", "B", "M")}
    return sys.equations, diffs


# ---------------------------------------------------------------------------
# Classical limits


def component_fields(ctx: Context):
    """Component functions of (x, t) for the three superfields."""
    x, t = ctx.symbols["x"], ctx.symbols["t"]
    names = {
        "A": ("a", "b", "c", "rho1"),
        "B": ("f", "g", "h", "rho2"),
        "Phi": ("m", "q", "s", "u"),
    }
    decls = {}
    for field, (body, c1, c2, top) in names.items():
        decls[field] = (
            ctx.function(body, [x, t], EVEN),
            ctx.function(c1, [x, t], ODD),
            ctx.function(c2, [x, t], ODD),
            ctx.function(top, [x, t], EVEN),
        )
    return decls


def classical_projection(mode: str):
    """Project the expanded system onto classical component content.

    ``theta-zero`` keeps the c0 components after dropping all fermionic
    component fields; ``top-component`` additionally freezes the three
    body fields to constants and keeps the th1 th2 components.  Returns
    the three projected equations plus a report stating which mode
    reproduces the classical system (wave speed set to one) under the
    identification (rho1, rho2, u) = top components of (A, B, Phi).
    """
    if mode not in ("theta-zero", "top-component"):
        raise ValueError(f"unknown projection mode {mode!r}")
    sys = build_system()
    ctx = sys.ctx
    decls = component_fields(ctx)
    th1, th2 = atom(ctx.symbols["th1"]), atom(ctx.symbols["th2"])

    bindings = {}
    for field, fn in (("A", sys.A), ("B", sys.B), ("Phi", sys.Phi)):
        body, c1, c2, top = decls[field]
        bindings[fn] = (occurrence(body) + th1 * occurrence(c1)
                        + th2 * occurrence(c2) + th1 * th2 * occurrence(top))
    substituted = {name: substitute(eq, bindings)
                   for name, eq in sys.equations.items()}

    # drop the fermionic component fields
    zero_ferm = {}
    for field in ("A", "B", "Phi"):
        _, c1, c2, _ = decls[field]
        zero_ferm[c1] = ZERO
        zero_ferm[c2] = ZERO
    substituted = {name: substitute(eq, zero_ferm)
                   for name, eq in substituted.items()}

    if mode == "top-component":
        const = {}
        for field, cname in (("A", "a0"), ("B", "f0"), ("Phi", "m0")):
            body = decls[field][0]
            const[body] = atom(ctx.const(cname))
        substituted = {name: substitute(eq, const)
                       for name, eq in substituted.items()}
        index = 3  # th1 th2 component
    else:
        index = 0

    projected = {name: components(ctx, eq)[index]
                 for name, eq in substituted.items()}

    rho1, rho2, u = (decls["A"][3], decls["B"][3], decls["Phi"][3])
    classical = classical_equations(ctx, rho1, rho2, u, as_expr(1))
    matches = {
        "A": equals(projected["A"], classical[0]),
        "B": equals(projected["B"], classical[1]),
        "M": equals(projected["M"], classical[2]),
    }
    return projected, matches


def classical_equations(ctx: Context, rho1: FunctionDecl, rho2: FunctionDecl,
                        u: FunctionDecl, wave_speed: Expr) -> tuple[Expr, Expr, Expr]:
    x, t = ctx.symbols["x"], ctx.symbols["t"]
    r1, r2, uu = occurrence(rho1), occurrence(rho2), occurrence(u)
    ux, ut = derive(uu, x), derive(uu, t)
    a2 = multiply(wave_speed, wave_speed)
    eq1 = derive(r1, t) + uu * derive(r1, x) + ux * r1
    eq2 = derive(r2, t) + uu * derive(r2, x) + ux * r2
    eq3 = (r1 + r2) * (ut + uu * ux) + a2 * (derive(r1, x) + derive(r2, x))
    return eq1, eq2, eq3


def classical_system():
    """The classical system with a symbolic wave speed, checked against golden."""
    ctx = Context()
    ctx.coord("x")
    ctx.coord("t")
    a = ctx.const("a", nonzero=True)
    x, t = ctx.symbols["x"], ctx.symbols["t"]
    rho1 = ctx.function("rho1", [x, t], EVEN)
    rho2 = ctx.function("rho2", [x, t], EVEN)
    u = ctx.function("u", [x, t], EVEN)
    eqs = classical_equations(ctx, rho1, rho2, u, atom(a))
    golden = load_golden("classical_system.json")
    names = ("mass1", "mass2", "momentum")
    diffs = {n: term_diff(eq, render.from_json(golden["equations"][n], ctx))
             for n, eq in zip(names, eqs)}
    return ctx, eqs, diffs


# ---------------------------------------------------------------------------
# Riemann-invariant form of the classical system


@dataclass(frozen=True)
class RiemannVerdict:
    holds: bool
    coefficients: Optional[dict]
    notes: tuple[str, ...]


def riemann_invariant_check(identity_substitution: bool = False) -> RiemannVerdict:
    """Verify the change of variables to Riemann-invariant form (wave speed 1).

    The velocity is read as the sum of the two invariants (the change of
    variables names that sum separately but never reuses the name), the
    total density is exp(r1 - r2) and the density ratio is r3.  After
    clearing the nonzero multipliers exp(r1 - r2) and (1 + r3), the
    pulled-back equations must be a constant invertible combination of
    the three transport equations for r1, r2, r3.

    ``identity_substitution`` replaces the change of variables by the
    identity map (u = r1, densities r2 and r3); the combination then
    fails, which is the negative control.
    """
    ctx = Context()
    x, t = ctx.coord("x"), ctx.coord("t")
    rho1 = ctx.function("rho1", [x, t], EVEN)
    rho2 = ctx.function("rho2", [x, t], EVEN)
    u = ctx.function("u", [x, t], EVEN)
    r1 = ctx.function("r1", [x, t], EVEN)
    r2 = ctx.function("r2", [x, t], EVEN)
    r3 = ctx.function("r3", [x, t], EVEN)
    # growth factor exp(r1 - r2); self-derivative realises the exp chain rule
    expfn = ctx.function("Egrow", [("w", EVEN)], EVEN, self_derivative=True)

    eq1, eq2, eq3 = classical_equations(ctx, rho1, rho2, u, as_expr(1))

    R1, R2, R3 = occurrence(r1), occurrence(r2), occurrence(r3)
    if identity_substitution:
        bindings = {u: R1, rho1: R2, rho2: R3}
        clear1 = clear2 = clear3 = as_expr(1)
    else:
        S = occurrence(expfn, args=[R1 - R2])
        inv = power(as_expr(1) + R3, Fraction(-1))
        bindings = {
            u: R1 + R2,
            rho1: S * inv,
            rho2: S * R3 * inv,
        }
        S_inv = occurrence(expfn, exp=Fraction(-1), args=[R1 - R2])
        one_plus_sq = power(as_expr(1) + R3, 2)
        clear1 = S_inv
        clear2 = S_inv
        clear3 = S_inv * S_inv * one_plus_sq

    P1 = substitute(eq1, bindings)
    P2 = substitute(eq2, bindings)
    P3 = substitute(eq3, bindings)
    rho1_sub = substitute(occurrence(rho1), bindings)
    rho2_sub = substitute(occurrence(rho2), bindings)

    pulled = [
        (P1 + P2) * clear1,
        P3 * clear2,
        (rho1_sub * P2 - rho2_sub * P1) * clear3,
    ]

    sum12 = occurrence(r1) + occurrence(r2)
    targets = [
        derive(R1, t) + (sum12 + 1) * derive(R1, x),
        derive(R2, t) + (sum12 - 1) * derive(R2, x),
        derive(R3, t) + sum12 * derive(R3, x),
    ]

    notes = [
        "velocity read as r1 + r2 (the separately named sum in the change of variables); recorded assumption",
        "multipliers cleared before the solve: exp(r1 - r2) and (1 + r3), both nonzero",
    ]
    coeffs = {}
    rows = []
    cleared = clear_denominators(pulled + targets)
    pulled_c, targets_c = cleared[:3], cleared[3:]
    for i, p in enumerate(pulled_c):
        combo = solve_combination(p, targets_c, param_names=())
        if combo is None:
            return RiemannVerdict(False, None, tuple(notes + [
                f"pulled-back combination {i} is not a constant combination"]))
        rows.append([combo[j].as_fraction() for j in range(3)])
        coeffs[i] = [str(c) for c in rows[-1]]
    det = (rows[0][0] * (rows[1][1] * rows[2][2] - rows[1][2] * rows[2][1])
           - rows[0][1] * (rows[1][0] * rows[2][2] - rows[1][2] * rows[2][0])
           + rows[0][2] * (rows[1][0] * rows[2][1] - rows[1][1] * rows[2][0]))
    if det == 0:
        return RiemannVerdict(False, coeffs, tuple(notes + ["combination matrix is singular"]))
    return RiemannVerdict(True, coeffs, tuple(notes))
