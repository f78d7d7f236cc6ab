"""Verification suites with uniform reports.

Each suite runs a set of named checks and returns a :class:`Report`;
the command-line front end and the HTTP service both dispatch here.
Reports are deterministic; the only randomized suite (conjugacy
sampling) takes an explicit seed.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from . import render
from .algebra import atom
from .calculus import standard_identity_suite
from .classify import (NONSTANDARD_IDS, adjoint, class_context, classification,
                       element, golden_diff, sampled_nonconjugacy,
                       _spec_of)
from .parser import parse_program
from .reductions import (annihilation_residuals, build_family, invariants,
                         l1_constraint_check, list_families,
                         perturbed_control, reduce_system, verify_family)
from .system import (classical_projection, classical_system, expand_system,
                     printed_dform_expansion, reference_component_equations,
                     riemann_invariant_check, system_context, term_diff)
from .vectorfields import build_structure_table, symmetry_suite


@dataclass
class Check:
    name: str
    passed: bool
    details: str = ""
    payload: Optional[dict] = None

    def to_dict(self) -> dict:
        out = {"name": self.name, "passed": self.passed}
        if self.details:
            out["details"] = self.details
        if self.payload is not None:
            out["payload"] = self.payload
        return out


@dataclass
class Report:
    suite: str
    checks: list[Check] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def add(self, name: str, passed: bool, details: str = "",
            payload: Optional[dict] = None):
        self.checks.append(Check(name, passed, details, payload))

    def to_dict(self) -> dict:
        return {"suite": self.suite, "passed": self.passed,
                "checks": [c.to_dict() for c in self.checks]}


# ---------------------------------------------------------------------------
# Suites


def run_table() -> Report:
    report = Report("table")
    entries, mismatches = build_structure_table()
    for (left, right), entry in entries.items():
        combo = {k: f"{v.numerator}/{v.denominator}" if v.denominator != 1
                 else str(v.numerator) for k, v in entry.combination.items()}
        report.add(f"{entry.bracket_kind}({left},{right})", True,
                   details=_combo_text(entry.combination),
                   payload={"kind": entry.bracket_kind, "result": combo})
    for left, right, why in mismatches:
        report.add(f"entry({left},{right})", False, details=why)
    return report


def _combo_text(combo) -> str:
    if not combo:
        return "0"
    parts = []
    for name, c in combo.items():
        if c == 1:
            parts.append(f"+{name}")
        elif c == -1:
            parts.append(f"-{name}")
        else:
            parts.append(f"{'+' if c > 0 else ''}{c}*{name}")
    return " ".join(parts)


def run_verify_system() -> Report:
    report = Report("verify-system")
    for chk in standard_identity_suite():
        report.add(f"operator identity: {chk.name}", chk.holds,
                   details="" if chk.holds else render.text(chk.residual))

    equations, diffs = expand_system()
    for name, diff in diffs.items():
        report.add(f"coordinate expansion matches reference: equation {name}",
                   diff.empty,
                   details="" if diff.empty else
                   f"missing {list(diff.missing)}, extra {list(diff.extra)}",
                   payload={"terms": len(equations[name].terms)})

    printed = printed_dform_expansion()
    ctx_ref, _, _, _ = system_context()
    reference = reference_component_equations(ctx_ref)
    naive_differs = any(not term_diff(printed[n], reference[n]).empty
                        for n in ("A", "B", "M"))
    report.add("naive reading of the compact covariant-derivative form differs "
               "(recorded convention mismatch)", naive_differs)

    ctx, eqs, cdiffs = classical_system()
    for name, diff in cdiffs.items():
        report.add(f"classical system matches golden: {name}", diff.empty)

    projected, matches = classical_projection("top-component")
    for name, ok in matches.items():
        report.add(f"top-component limit (constant bodies) gives the classical "
                   f"equation: {name}", ok,
                   payload={"projected": render.text(projected[name])})
    projected0, matches0 = classical_projection("theta-zero")
    report.add("theta-zero limit does NOT literally give the classical system "
               "(both projections reported)",
               not any(matches0.values()),
               payload={n: render.text(e) for n, e in projected0.items()})

    verdict = riemann_invariant_check()
    report.add("Riemann-invariant change of variables (velocity = sum of "
               "invariants, wave speed 1)", verdict.holds,
               details="; ".join(verdict.notes),
               payload={"combination": verdict.coefficients})
    negative = riemann_invariant_check(identity_substitution=True)
    report.add("identity substitution fails the span check (negative control)",
               not negative.holds)
    return report


def run_verify_symmetries() -> Report:
    report = Report("verify-symmetries")
    for verdict in symmetry_suite():
        if verdict.holds:
            payload = {eq: {k: render.text(c) for k, c in combo.items()
                            if not c.is_zero()}
                       for eq, combo in verdict.combination.items()}
            details = ", ".join(
                f"eq {eq} -> {payload[eq]}" for eq in ("A", "B", "M"))
            report.add(f"{verdict.generator} maps the system to a constant "
                       f"recombination of itself", True, details=details,
                       payload=payload)
        else:
            report.add(f"{verdict.generator} symmetry check", False,
                       details=verdict.residual_note)
    return report


def run_classify(level: str, sample_conjugacy: int = 0, seed: int = 0) -> Report:
    report = Report(f"classify-{level}")
    classes = classification(level)
    expected_counts = {"A": 3, "B": 3, "C": 15, "G": 31, "L": 63}
    report.add(f"class count at level {level} is {expected_counts[level]}",
               len(classes) == expected_counts[level],
               details=f"got {len(classes)}")
    problems = golden_diff(level, classes)
    report.add("representatives match the golden list verbatim", not problems,
               details="; ".join(problems))
    payload = [{"id": c.id, "level": c.level, "rep": dict(_spec_of(c.rep)),
                "constraints": list(c.constraints), "nonstandard": c.nonstandard}
               for c in classes]
    report.add("class list", True, payload={"classes": payload})

    if level == "L":
        flagged = {c.id for c in classes if c.nonstandard}
        report.add("non-standard invariant-structure flags",
                   flagged == set(NONSTANDARD_IDS),
                   details=f"flagged: {sorted(flagged)}")

    ctx = class_context()
    from .algebra import EVEN, ODD
    alpha = ctx.const("alpha", EVEN)
    eta = ctx.const("eta", ODD)
    r = ctx.const("r", EVEN)
    X = element(P1=atom(alpha), Q1=atom(ctx.symbols["mu"]))
    Y = element(P1=atom(r), Q1=atom(eta))
    shifted = adjoint(Y, X)
    expected = element(
        P1=atom(alpha) + 2 * atom(eta) * atom(ctx.symbols["mu"]),
        Q1=atom(ctx.symbols["mu"]))
    ok = all((shifted.coeff(n) - expected.coeff(n)).is_zero()
             for n in ("M1", "M2", "P1", "P2", "Q1", "Q2"))
    report.add("adjoint shift example: translation coefficient gains twice "
               "the product of the odd parameters", ok)

    if sample_conjugacy:
        result = sampled_nonconjugacy(trials=sample_conjugacy, seed=seed)
        report.add(f"sampled non-conjugacy ({sample_conjugacy} trials, "
                   f"seed {seed})", result.ok,
                   details="; ".join(result.violations[:5]))
    return report


def run_reduce(subalgebra_id: str) -> Report:
    report = Report(f"reduce-{subalgebra_id}")
    chart = invariants(subalgebra_id)  # raises UnsupportedOperation when refused
    residuals = annihilation_residuals(chart)
    for name, res in residuals.items():
        report.add(f"generator annihilates invariant {name}", res.is_zero(),
                   details="" if res.is_zero() else render.text(res))
    report.add("invariant chart", True, payload={
        "generator": chart.label,
        "invariants": {n: render.text(e) for n, e in chart.invariants}})
    _, reduced, split = reduce_system(subalgebra_id)
    payload = {}
    for name, eq in reduced.items():
        c = split[name]
        payload[name] = {
            "equation": render.text(eq),
            "components": [render.text(x) for x in c],
        }
    report.add("reduced equations", True, payload=payload)
    if subalgebra_id == "L1":
        for name, ok in l1_constraint_check().items():
            report.add(f"reduction constraint: {name}", ok)
    return report


def run_verify_solutions(family_id: Optional[str] = None) -> Report:
    report = Report("verify-solutions")
    families = list_families()
    if family_id is not None:
        families = [f for f in families if f["id"] == family_id]
        if not families:
            raise KeyError(f"unknown solution family {family_id!r}")
    catalog = []
    for meta in families:
        residual = verify_family(meta["id"])
        detail = meta["description"]
        if not residual.verified:
            detail = "; ".join(render.text(v) for v in residual.values
                               if not v.is_zero())
        report.add(f"family {meta['id']} ({meta['subalgebra']}) has zero "
                   f"residual on all three equations", residual.verified,
                   details=detail)
        fam = build_family(meta["id"])
        catalog.append({
            **meta,
            "components": {name: render.text(e)
                           for name, e in fam.fields.items()},
            "verified": residual.verified,
        })
    if family_id is None:
        control = perturbed_control()
        report.add("perturbed family yields a nonzero residual "
                   "(negative control)", not control.verified)
        report.add("catalog", True, payload={"families": catalog})
    return report


def run_eval(source: str) -> Report:
    report = Report("eval")
    program = parse_program(source)
    for stmt in program.statements:
        if stmt.kind != "expr":
            report.add(f"declared: {stmt.source}", True)
            continue
        e = stmt.expr
        report.add(f"eval: {stmt.source}", True,
                   details=render.text(e),
                   payload={"text": render.text(e), "latex": render.latex(e),
                            "json": render.to_json(e), "is_zero": e.is_zero()})
    return report


# ---------------------------------------------------------------------------
# Rendering of reports


def report_text(report: Report) -> str:
    lines = [f"suite: {report.suite}"]
    for c in report.checks:
        mark = "PASS" if c.passed else "FAIL"
        line = f"  [{mark}] {c.name}"
        if c.details:
            line += f" :: {c.details}"
        lines.append(line)
    lines.append(f"result: {'PASS' if report.passed else 'FAIL'}")
    return "\n".join(lines)


def report_latex(report: Report) -> str:
    lines = [r"\section*{" + report.suite + "}", r"\begin{itemize}"]
    for c in report.checks:
        mark = r"\textbf{PASS}" if c.passed else r"\textbf{FAIL}"
        item = rf"\item {mark} -- {_latex_escape(c.name)}"
        if c.payload and "latex" in c.payload:
            item += rf": $ {c.payload['latex']} $"
        elif c.details:
            item += rf": {_latex_escape(c.details)}"
        lines.append(item)
    lines.append(r"\end{itemize}")
    return "\n".join(lines)


def _latex_escape(s: str) -> str:
    for ch in "#$%&_{}":
        s = s.replace(ch, "\\" + ch)
    return s
