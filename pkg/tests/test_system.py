"""System construction, golden expansion diff, classical limits, and the
Riemann-invariant change of variables."""

import json

import pytest

from susyfluid import render
from susyfluid.algebra import as_expr, equals, occurrence, substitute
from susyfluid.system import (build_system, classical_projection,
                              classical_system, expand_system, golden_path,
                              printed_dform_expansion,
                              reference_component_equations,
                              riemann_invariant_check, system_context,
                              term_diff)


class TestBuildSystem:
    def test_leading_term_is_time_derivative(self):
        sys = build_system()
        lead = occurrence(sys.A, ("t",))
        # eq_A - A_t contains no bare A_t term
        rest = sys.eq_A - lead
        assert all(t.key() != lead.terms[0].key() for t in rest.terms)

    def test_zero_third_field_reduces_to_time_derivative(self):
        sys = build_system()
        eq = substitute(sys.eq_A, {sys.Phi: as_expr(0)})
        assert equals(eq, occurrence(sys.A, ("t",)))

    def test_momentum_tail(self):
        # with the third field removed the momentum equation is the x-flux
        sys = build_system()
        eq = substitute(sys.eq_M, {sys.Phi: as_expr(0)})
        assert equals(eq, occurrence(sys.A, ("x",)) + occurrence(sys.B, ("x",)))

    def test_swap_symmetry(self):
        # the two density equations exchange under swapping the two fields
        sys = build_system()
        swapped = substitute(sys.eq_A, {sys.A: occurrence(sys.B)})
        assert equals(swapped, sys.eq_B)


class TestExpansion:
    def test_diff_is_empty(self):
        _, diffs = expand_system()
        for name, diff in diffs.items():
            assert diff.empty, (name, diff.missing, diff.extra)

    def test_naive_compact_reading_differs(self):
        printed = printed_dform_expansion()
        ctx, _, _, _ = system_context()
        reference = reference_component_equations(ctx)
        for name in ("A", "B", "M"):
            assert not term_diff(printed[name], reference[name]).empty

    def test_theta_degree_bound(self):
        # every equation is at most first order in each odd coordinate
        from susyfluid.calculus import components

        sys = build_system()
        for eq in sys.equations.values():
            c = components(sys.ctx, eq)
            rebuilt_parts = sum(len(x.terms) for x in c)
            assert rebuilt_parts == len(eq.terms)

    def test_weight_homogeneity(self):
        # the dilation weights: coordinates 2/2/1/1, third field 2, others 0;
        # every term of every equation has total weight -2
        from susyfluid.algebra import FuncOcc, SymPow

        w = {"x": 2, "t": 2, "th1": 1, "th2": 1}
        field_w = {"A": 0, "B": 0, "Phi": 2}
        sys = build_system()
        for eq in sys.equations.values():
            for term in eq.terms:
                total = 0
                for f in term.factors:
                    if isinstance(f, SymPow):
                        total += w[f.sym.name] * f.exp
                    elif isinstance(f, FuncOcc):
                        total += field_w[f.fn.name]
                        total -= sum(w[d] for d in f.derivs)
                assert total == -2


class TestFermionicContent:
    def test_dropping_fermionic_fields_leaves_even_content(self):
        from susyfluid.system import build_system, component_fields
        from susyfluid.algebra import EVEN

        sys = build_system()
        decls = component_fields(sys.ctx)
        th1 = atom_of(sys.ctx, "th1")
        th2 = atom_of(sys.ctx, "th2")
        bindings = {}
        for field, fn in (("A", sys.A), ("B", sys.B), ("Phi", sys.Phi)):
            body, c1, c2, top = decls[field]
            bindings[fn] = (occurrence(body) + th1 * occurrence(c1)
                            + th2 * occurrence(c2)
                            + th1 * th2 * occurrence(top))
        zero_ferm = {}
        for field in ("A", "B", "Phi"):
            _, c1, c2, _ = decls[field]
            zero_ferm[c1] = as_expr(0)
            zero_ferm[c2] = as_expr(0)
        for eq in sys.equations.values():
            projected = substitute(substitute(eq, bindings), zero_ferm)
            assert projected.parity() == EVEN


def atom_of(ctx, name):
    from susyfluid.algebra import atom

    return atom(ctx.symbols[name])


class TestClassicalLimits:
    def test_classical_system_matches_golden(self):
        _, _, diffs = classical_system()
        assert all(d.empty for d in diffs.values())

    def test_top_component_projection(self):
        projected, matches = classical_projection("top-component")
        assert matches == {"A": True, "B": True, "M": True}

    def test_theta_zero_projection_differs(self):
        projected, matches = classical_projection("theta-zero")
        assert not any(matches.values())
        # the body-level first equation couples the bodies and the top fields
        text = render.text(projected["A"])
        assert "a_t" in text and "rho1" in text

    def test_unknown_mode_rejected(self):
        with pytest.raises(ValueError):
            classical_projection("bogus")


class TestRiemann:
    def test_change_of_variables_verified(self):
        verdict = riemann_invariant_check()
        assert verdict.holds
        assert verdict.coefficients == {
            0: ["1", "-1", "0"], 1: ["1", "1", "0"], 2: ["0", "0", "1"]}

    def test_identity_substitution_is_a_negative_control(self):
        assert not riemann_invariant_check(identity_substitution=True).holds


class TestGoldenRelocation:
    def test_env_override(self, tmp_path, monkeypatch):
        # a relocated golden directory with a deliberately wrong sign is caught
        with open(golden_path("system_components.json"), "r", encoding="utf-8") as fh:
            data = json.load(fh)
        data["equations"]["A"]["terms"][0]["coeff"] = [-1, 1]
        for name in ("table1.json", "classes.json", "classical_system.json"):
            with open(golden_path(name), "r", encoding="utf-8") as fh:
                payload = fh.read()
            (tmp_path / name).write_text(payload, encoding="utf-8")
        (tmp_path / "system_components.json").write_text(json.dumps(data),
                                                         encoding="utf-8")
        monkeypatch.setenv("SUSY_CAS_GOLDEN_DIR", str(tmp_path))
        _, diffs = expand_system()
        assert not diffs["A"].empty
