"""Classification of the one-dimensional subalgebras of the symmetry
superalgebra: adjoint actions in closed form, level-by-level generation
of the representative lists (3 / 3 / 15 / 31 / 63), and randomized
non-conjugacy sampling.

Basis elements carry even coefficients on P1, P2, M1, M2 and odd
coefficients on Q1, Q2, so every algebra element is even overall.  The
adjoint series of a nilpotent conjugator terminates exactly; dilations
act by eigen-scalings of the group scale (the exponential of the flow
parameter), kept symbolic or sampled as a positive rational.  Group
elements are handled as products of these elementary exponentials.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Optional, Sequence

from .algebra import (EVEN, ODD, Context, Expr, ZERO, as_expr, atom,
                      multiply, power)
from .linsolve import solve_combination
from .system import load_golden

BASIS = ("M2", "M1", "P1", "Q1", "P2", "Q2")
BASIS_PARITY = {"M2": EVEN, "M1": EVEN, "P1": EVEN, "P2": EVEN,
                "Q1": ODD, "Q2": ODD}
NONSTANDARD_IDS = frozenset(
    {"L4", "L8", "L12", "L32", "L36", "L40", "L44"})


def _structure_constants() -> dict:
    table = load_golden("table1.json")["entries"]
    out = {}
    for key, combo in table.items():
        left, right = key.split(",")
        out[(left, right)] = {k: Fraction(*v) for k, v in combo.items()}
    return out


_STRUCTURE = None


def structure_constants() -> dict:
    global _STRUCTURE
    if _STRUCTURE is None:
        _STRUCTURE = _structure_constants()
    return _STRUCTURE


# ---------------------------------------------------------------------------
# Algebra elements


@dataclass(frozen=True)
class AlgebraElement:
    """Even element: a map from basis generator names to coefficient
    expressions in constant symbols."""

    coeffs: tuple[tuple[str, Expr], ...]

    @staticmethod
    def make(coeffs: dict[str, Expr]) -> "AlgebraElement":
        clean = []
        for name in BASIS:
            c = coeffs.get(name, ZERO)
            if c.is_zero():
                continue
            p = c.parity()
            if p is not None and p != BASIS_PARITY[name]:
                raise ValueError(
                    f"coefficient of {name} must have parity {BASIS_PARITY[name]}")
            clean.append((name, c))
        return AlgebraElement(tuple(clean))

    def coeff(self, name: str) -> Expr:
        for n, c in self.coeffs:
            if n == name:
                return c
        return ZERO

    def is_zero(self) -> bool:
        return not self.coeffs

    def __add__(self, other: "AlgebraElement") -> "AlgebraElement":
        out = {}
        for n, c in list(self.coeffs) + list(other.coeffs):
            out[n] = out.get(n, ZERO) + c
        return AlgebraElement.make(out)

    def scaled(self, k) -> "AlgebraElement":
        k = as_expr(k) if not isinstance(k, Expr) else k
        return AlgebraElement.make(
            {n: multiply(k, c) for n, c in self.coeffs})


def element(**coeffs) -> AlgebraElement:
    return AlgebraElement.make(
        {n: (c if isinstance(c, Expr) else as_expr(c)) for n, c in coeffs.items()})


def bracket_elements(X: AlgebraElement, Y: AlgebraElement) -> AlgebraElement:
    """Commutator of two even elements via the supercommutation table.

    For coefficients a, b on homogeneous generators U, V:
    [aU, bV] = (-1)^{p(U)p(V)} a b <<U,V>> with <<,>> the graded bracket.
    """
    table = structure_constants()
    out: dict[str, Expr] = {}
    for n1, c1 in X.coeffs:
        for n2, c2 in Y.coeffs:
            entry = table.get((n1, n2))
            if not entry:
                continue
            sign = -1 if (BASIS_PARITY[n1] and BASIS_PARITY[n2]) else 1
            scale = multiply(multiply(as_expr(sign), c1), c2)
            for target, k in entry.items():
                out[target] = out.get(target, ZERO) + multiply(scale, as_expr(k))
    return AlgebraElement.make(out)


def adjoint(Y: AlgebraElement, X: AlgebraElement) -> AlgebraElement:
    """Ad_{exp(Y)} X for Y without dilation content; the series is finite."""
    if not Y.coeff("M1").is_zero():
        raise ValueError("use dilation_adjoint for conjugators with M1 content")
    acc = X
    term = X
    factorial = 1
    for k in range(1, 8):
        term = bracket_elements(Y, term)
        if term.is_zero():
            return acc
        factorial *= k
        acc = acc + term.scaled(Fraction(1, factorial))
    raise RuntimeError("adjoint series failed to terminate")  # unreachable


def dilation_adjoint(scale: Expr, X: AlgebraElement) -> AlgebraElement:
    """Conjugation by the dilation group element with group scale ``scale``
    (the exponential of the flow parameter): P -> scale^-2 P, Q -> scale^-1 Q."""
    weights = {"P1": -2, "P2": -2, "Q1": -1, "Q2": -1, "M1": 0, "M2": 0}
    return AlgebraElement.make(
        {n: multiply(power(scale, weights[n]), c) for n, c in X.coeffs})


def adjoint_chain(steps: Sequence[tuple], X: AlgebraElement) -> AlgebraElement:
    """Apply a product of elementary group elements; each step is either
    ("nilpotent", Y) or ("dilation", scale)."""
    for kind, payload in steps:
        if kind == "nilpotent":
            X = adjoint(payload, X)
        elif kind == "dilation":
            X = dilation_adjoint(payload, X)
        else:
            raise ValueError(f"unknown conjugation step {kind!r}")
    return X


# ---------------------------------------------------------------------------
# Representative lists


@dataclass(frozen=True)
class SubalgebraClass:
    id: str
    level: str
    rep: AlgebraElement
    constraints: tuple[str, ...]
    nonstandard: bool = False


def class_context() -> Context:
    ctx = Context()
    ctx.const("a", EVEN, nonzero=True)
    ctx.const("b", EVEN, nonzero=True)
    ctx.const("eps", EVEN, nonzero=True, square_one=True)
    ctx.const("mu", ODD, nonzero=True)
    ctx.const("nu", ODD, nonzero=True)
    return ctx


_COEFF_CONSTRAINTS = {
    "a": "a != 0", "b": "b != 0", "mu": "mu != 0", "nu": "nu != 0",
    "eps": "eps in {+1, -1}",
}


def _rep_from_spec(ctx: Context, spec: dict[str, str]) -> AlgebraElement:
    coeffs = {}
    for name, cstr in spec.items():
        if cstr in ("1", "-1"):
            coeffs[name] = as_expr(int(cstr))
        else:
            coeffs[name] = atom(ctx.symbols[cstr])
    return AlgebraElement.make(coeffs)


def _constraints_of(spec: dict[str, str]) -> tuple[str, ...]:
    seen = []
    for cstr in spec.values():
        c = _COEFF_CONSTRAINTS.get(cstr)
        if c and c not in seen:
            seen.append(c)
    return tuple(seen)


# pattern = (p_set, q_set): which translations / supersymmetries appear
_PATTERNS = [(p, q)
             for q in ((), ("Q1",), ("Q2",), ("Q1", "Q2"))
             for p in ((), ("P1",), ("P2",), ("P1", "P2"))
             if p or q]


def _pattern_spec(p, q, with_m: Optional[str] = None,
                  m1_free: bool = False) -> dict[str, str]:
    """Coefficient strings for a representative built from a pattern.

    Without dilation content the leading translation is normalised to 1;
    next to a dilation only its sign survives, so it becomes eps.
    """
    spec: dict[str, str] = {}
    if with_m == "M1":
        spec["M1"] = "1"
    elif with_m == "M2":
        spec["M2"] = "1"
    elif with_m == "M2+M1":
        spec["M2"] = "1"
        spec["M1"] = "a"
    if p:
        lead = "eps" if with_m else "1"
        spec[p[0]] = lead
        if len(p) == 2:
            spec[p[1]] = "b" if m1_free else "a"
    if q:
        spec[q[0]] = "mu"
        if len(q) == 2:
            spec[q[1]] = "nu"
    return spec


def _grank(p, q):
    """Ordering of the split/non-split and twisted sublists: by number of
    supersymmetry terms, then number of translations, then identity."""
    return (len(q), len(p), p, q)


def _lrank(p, q):
    """Ordering inside the four top-level blocks: supersymmetry shape first."""
    return ((len(q), q), (len(p), p))


def classify_pair(which: str, ctx: Optional[Context] = None) -> list[SubalgebraClass]:
    """Level A or B: the three classes of a translation + supersymmetry pair."""
    if which not in ("A", "B"):
        raise ValueError("level must be A or B")
    ctx = ctx or class_context()
    pn, qn = ("P1", "Q1") if which == "A" else ("P2", "Q2")
    specs = [{pn: "1"}, {qn: "mu"}, {pn: "1", qn: "mu"}]
    return [SubalgebraClass(f"{which}{i+1}", which, _rep_from_spec(ctx, s),
                            _constraints_of(s))
            for i, s in enumerate(specs)]


def goursat_combine(list_a: list[SubalgebraClass], list_b: list[SubalgebraClass],
                    ctx: Optional[Context] = None) -> list[SubalgebraClass]:
    """Level C: non-twisted direct summands followed by the twisted classes."""
    ctx = ctx or class_context()
    specs = [dict((n, c) for n, c in _spec_of(cls.rep)) for cls in list_a + list_b]
    twisted = [(p, q) for p, q in _PATTERNS
               if not _only_one_factor(p, q)]
    twisted.sort(key=lambda pq: _grank(*pq))
    specs += [_pattern_spec(p, q) for p, q in twisted]
    return [SubalgebraClass(f"C{i+1}", "C", _rep_from_spec(ctx, s),
                            _constraints_of(s))
            for i, s in enumerate(specs)]


def _only_one_factor(p, q) -> bool:
    """Patterns supported on a single factor are the non-twisted classes."""
    first = all(n in ("P1", "Q1") for n in p + q)
    second = all(n in ("P2", "Q2") for n in p + q)
    return first or second


def _spec_of(rep: AlgebraElement) -> list[tuple[str, str]]:
    out = []
    for n, c in rep.coeffs:
        q = c.as_fraction()
        if q is not None:
            out.append((n, str(q)))
        else:
            out.append((n, c.terms[0].factors[0].sym.name))
    return out


def split_nonsplit(list_c: list[SubalgebraClass],
                   ctx: Optional[Context] = None) -> list[SubalgebraClass]:
    """Level G: splitting classes (the level-C list reordered, plus the pure
    dilation) followed by the non-splitting dilation classes."""
    ctx = ctx or class_context()
    ordered = sorted(_PATTERNS, key=lambda pq: _grank(*pq))
    specs = [_pattern_spec(p, q) for p, q in ordered]
    specs.append({"M1": "1"})
    specs += [_pattern_spec(p, q, with_m="M1") for p, q in ordered]
    return [SubalgebraClass(f"G{i+1}", "G", _rep_from_spec(ctx, s),
                            _constraints_of(s))
            for i, s in enumerate(specs)]


def final_classify(ctx: Optional[Context] = None) -> list[SubalgebraClass]:
    """Level L: the 63 classes in block order (no dilation, with
    the superspace dilation, with the field dilation, with both)."""
    ctx = ctx or class_context()
    ordered = sorted(_PATTERNS, key=lambda pq: _lrank(*pq))
    specs = [_pattern_spec(p, q) for p, q in ordered]
    specs.append({"M1": "1"})
    specs += [_pattern_spec(p, q, with_m="M1") for p, q in ordered]
    specs.append({"M2": "1"})
    specs += [_pattern_spec(p, q, with_m="M2") for p, q in ordered]
    specs.append({"M2": "1", "M1": "a"})
    specs += [_pattern_spec(p, q, with_m="M2+M1", m1_free=True) for p, q in ordered]
    out = []
    for i, s in enumerate(specs):
        cid = f"L{i+1}"
        out.append(SubalgebraClass(cid, "L", _rep_from_spec(ctx, s),
                                   _constraints_of(s),
                                   nonstandard=cid in NONSTANDARD_IDS))
    return out


def classification(level: str, ctx: Optional[Context] = None) -> list[SubalgebraClass]:
    ctx = ctx or class_context()
    if level in ("A", "B"):
        return classify_pair(level, ctx)
    if level == "C":
        return goursat_combine(classify_pair("A", ctx), classify_pair("B", ctx), ctx)
    if level == "G":
        return split_nonsplit(classification("C", ctx), ctx)
    if level == "L":
        return final_classify(ctx)
    raise ValueError(f"unknown level {level!r}")


def golden_diff(level: str, classes: list[SubalgebraClass]) -> list[str]:
    """Mismatches between a generated list and the golden list."""
    golden = load_golden("classes.json")["levels"][level]
    problems = []
    if len(golden) != len(classes):
        problems.append(f"count {len(classes)} != {len(golden)}")
    for want, got in zip(golden, classes):
        if want["id"] != got.id:
            problems.append(f"{got.id}: id mismatch ({want['id']})")
            continue
        spec = dict(_spec_of(got.rep))
        if spec != want["rep"]:
            problems.append(f"{got.id}: {spec} != {want['rep']}")
    return problems


# ---------------------------------------------------------------------------
# Span membership and sampled non-conjugacy


def span_coefficient(candidate: AlgebraElement, rep: AlgebraElement,
                     param_names: Iterable[str]) -> Optional[Expr]:
    """Solve candidate = c * rep for c over the named constants, or None.

    The six generator slots are tagged with marker symbols so a single
    linear solve covers all coefficients simultaneously.
    """
    marker_ctx = Context()
    markers = {n: atom(marker_ctx.coord(f"T{n}")) for n in BASIS}
    target = ZERO
    basis_expr = ZERO
    for n, c in candidate.coeffs:
        target = target + multiply(c, markers[n])
    for n, c in rep.coeffs:
        basis_expr = basis_expr + multiply(c, markers[n])
    combo = solve_combination(target, [basis_expr], tuple(param_names))
    if combo is None:
        return None
    return combo[0]


def _body(e: Expr) -> Fraction:
    for t in e.terms:
        if not t.factors:
            return t.coeff
    return Fraction(0)


@dataclass
class ConjugacyReport:
    trials: int
    seed: int
    violations: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations


def _instantiate(cls: SubalgebraClass, ctx: Context, rng: random.Random,
                 tag: str) -> AlgebraElement:
    """Bind even moduli to sampled rationals; odd constants stay symbolic,
    with names fresh per instantiation."""
    from .algebra import substitute

    values = {}
    spec = dict(_spec_of(cls.rep))
    for name, cstr in spec.items():
        if cstr in ("1", "-1"):
            continue
        sym = cls.rep.coeff(name).terms[0].factors[0].sym
        if cstr == "eps":
            values[sym] = as_expr(rng.choice((1, -1)))
        elif cstr in ("a", "b"):
            values[sym] = as_expr(rng.choice(
                (2, 3, 5, Fraction(1, 2), Fraction(3, 2), -2, -3)))
        else:  # odd modulus: fresh symbol
            fresh = ctx.const(f"{cstr}_{tag}", ODD, nonzero=True) \
                if f"{cstr}_{tag}" not in ctx.symbols else ctx.symbols[f"{cstr}_{tag}"]
            values[sym] = atom(fresh)
    return AlgebraElement.make(
        {n: substitute(c, values) for n, c in cls.rep.coeffs})


def _random_conjugator(ctx: Context, rng: random.Random, trial: int) -> list[tuple]:
    steps = []
    for j in range(rng.randint(1, 2)):
        if rng.random() < 0.3:
            steps.append(("dilation", as_expr(rng.choice(
                (2, 3, 5, Fraction(1, 2), Fraction(1, 3))))))
            continue
        coeffs = {}
        if rng.random() < 0.8:
            coeffs["P1"] = as_expr(rng.randint(-3, 3))
        if rng.random() < 0.8:
            coeffs["P2"] = as_expr(rng.randint(-3, 3))
        for qn in ("Q1", "Q2"):
            if rng.random() < 0.5:
                name = f"c{qn}_{trial}_{j}"
                sym = ctx.symbols.get(name) or ctx.const(name, ODD)
                coeffs[qn] = atom(sym)
        Y = AlgebraElement.make(coeffs)
        if not Y.is_zero():
            steps.append(("nilpotent", Y))
    return steps or [("dilation", as_expr(2))]


def sampled_nonconjugacy(trials: int = 1000, seed: int = 0) -> ConjugacyReport:
    """Randomized search for forbidden conjugations between distinct
    representatives; any hit is a classification violation."""
    rng = random.Random(seed)
    ctx = class_context()
    classes = final_classify(ctx)
    report = ConjugacyReport(trials, seed)
    for trial in range(trials):
        i = rng.randrange(len(classes))
        j = rng.randrange(len(classes) - 1)
        if j >= i:
            j += 1
        Xi = _instantiate(classes[i], ctx, rng, f"i{trial}")
        Xj = _instantiate(classes[j], ctx, rng, f"j{trial}")
        steps = _random_conjugator(ctx, rng, trial)
        moved = adjoint_chain(steps, Xi)
        odd_names = {s.name for s in ctx.symbols.values() if s.parity == ODD}
        c = span_coefficient(moved, Xj, odd_names)
        if c is not None and _body(c) != 0:
            report.violations.append(
                f"trial {trial}: {classes[i].id} -> span({classes[j].id}) with c = {c}")
    return report


def modulus_invariance_check(samples: int = 12, seed: int = 1) -> bool:
    """Distinct sampled values of the translation modulus in P1 + a P2 stay
    non-conjugate: the modulus is an invariant of the class."""
    rng = random.Random(seed)
    ctx = class_context()
    values = rng.sample([2, 3, 5, 7, Fraction(1, 2), Fraction(1, 3),
                         Fraction(2, 3), -2, -3, Fraction(5, 2), 11, 13], samples)
    elements = [element(P1=1, P2=as_expr(v)) for v in values]
    odd_names = ()
    for i, Xi in enumerate(elements):
        for jdx, Xj in enumerate(elements):
            if i == jdx:
                continue
            for steps in ([("dilation", as_expr(rng.choice((2, 3, Fraction(1, 2)))))],
                          [("nilpotent", element(P1=1))]):
                moved = adjoint_chain(steps, Xi)
                c = span_coefficient(moved, Xj, odd_names)
                if c is not None and _body(c) != 0:
                    return False
    return True
