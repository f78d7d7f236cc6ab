"""Super vector fields: brackets, the supercommutation table, Jacobi,
finite flows, and the symmetry verification of all six generators."""

import itertools

import pytest

from susyfluid.algebra import as_expr, atom, equals, power, substitute
from susyfluid.vectorfields import (BASIS_ORDER, bracket,
                                    build_structure_table, decompose_in_basis,
                                    field_space, finite_action, generators,
                                    jacobi_residual, linear_combination,
                                    symmetry_check, symmetry_suite,
                                    transform_equation)
from susyfluid.system import build_system


@pytest.fixture(scope="module")
def gens():
    ctx = field_space()
    return ctx, generators(ctx)


class TestBracket:
    def test_dilation_translation(self, gens):
        _, g = gens
        combo = decompose_in_basis(bracket(g["M1"], g["P1"]))
        assert combo["P1"] == -2
        assert all(v == 0 for k, v in combo.items() if k != "P1")

    def test_odd_odd_is_anticommutator(self, gens):
        _, g = gens
        combo = decompose_in_basis(bracket(g["Q1"], g["Q1"]))
        assert combo["P1"] == -2

    def test_central_element(self, gens):
        _, g = gens
        for name in BASIS_ORDER:
            assert bracket(g["M2"], g[name]).is_zero()

    def test_graded_antisymmetry(self, gens):
        _, g = gens
        for a, b in itertools.product(BASIS_ORDER, repeat=2):
            sign = -1 if (g[a].parity and g[b].parity) else 1
            lhs = bracket(g[a], g[b])
            rhs = bracket(g[b], g[a])
            for ca, cb in zip(lhs.coeffs, rhs.coeffs):
                assert (ca + sign * cb).is_zero()

    def test_jacobi_all_triples(self, gens):
        _, g = gens
        for a, b, c in itertools.product(BASIS_ORDER, repeat=3):
            assert jacobi_residual(g[a], g[b], g[c]).is_zero()


class TestStructureTable:
    def test_matches_golden(self):
        entries, mismatches = build_structure_table()
        assert len(entries) == 36
        assert mismatches == []

    def test_tampered_golden_is_caught(self, tmp_path, monkeypatch):
        import json

        from susyfluid.system import golden_path

        for name in ("system_components.json", "classes.json",
                     "classical_system.json"):
            with open(golden_path(name), "r", encoding="utf-8") as fh:
                (tmp_path / name).write_text(fh.read(), encoding="utf-8")
        with open(golden_path("table1.json"), "r", encoding="utf-8") as fh:
            data = json.load(fh)
        data["entries"]["M1,P1"] = {"P1": [2, 1]}  # wrong sign
        (tmp_path / "table1.json").write_text(json.dumps(data),
                                              encoding="utf-8")
        monkeypatch.setenv("SUSY_CAS_GOLDEN_DIR", str(tmp_path))
        _, mismatches = build_structure_table()
        assert any(left == "M1" and right == "P1"
                   for left, right, _ in mismatches)

    def test_decomposition_of_the_semidirect_structure(self, gens):
        # the two translation/supersymmetry pairs commute with each other
        _, g = gens
        for a in ("P1", "Q1"):
            for b in ("P2", "Q2"):
                assert bracket(g[a], g[b]).is_zero()


class TestLinearCombination:
    def test_twisted_generator_coefficients(self, gens):
        ctx, g = gens
        mu = ctx.const("mu_t", 1, nonzero=True)
        field = linear_combination(ctx, {"P1": as_expr(1), "Q1": atom(mu)})
        # x-coefficient is 1 - mu th1, odd-direction coefficient is mu
        th1 = atom(ctx.symbols["th1"])
        assert equals(field.coeff("x"), as_expr(1) - atom(mu) * th1)
        assert equals(field.coeff("th1"), atom(mu))


class TestFiniteAction:
    def test_translation(self):
        sys = build_system()
        flow = finite_action(sys.ctx, "P2")
        t = sys.ctx.symbols["t"]
        r = sys.ctx.symbols["r"]
        assert equals(flow.coord_map[t], atom(t) + atom(r))

    def test_susy_shift_matches_the_shift_map(self):
        sys = build_system()
        flow = finite_action(sys.ctx, "Q1")
        x, th1 = sys.ctx.symbols["x"], sys.ctx.symbols["th1"]
        eta = sys.ctx.symbols["eta1"]
        assert equals(flow.coord_map[x], atom(x) - atom(eta) * atom(th1))
        assert equals(flow.coord_map[th1], atom(th1) + atom(eta))

    def test_dilation_group_law(self):
        # applying the dilation twice composes the scales
        sys = build_system()
        flow = finite_action(sys.ctx, "M1")
        x = sys.ctx.symbols["x"]
        s = sys.ctx.symbols["es"]
        once = flow.coord_map[x]
        twice = substitute(once, {x: once})
        assert equals(twice, power(atom(s), 4) * atom(x))

    def test_unknown_generator(self):
        sys = build_system()
        with pytest.raises(ValueError):
            finite_action(sys.ctx, "Z9")


class TestSymmetryCheck:
    def test_all_six_hold(self):
        verdicts = symmetry_suite()
        assert [v.generator for v in verdicts if not v.holds] == []

    def test_translations_act_trivially(self):
        sys = build_system()
        for gen in ("P1", "P2"):
            flow = finite_action(sys.ctx, gen)
            for eq in sys.equations.values():
                assert equals(transform_equation(eq, flow, sys.ctx), eq)

    def test_susy_shifts_act_trivially(self):
        sys = build_system()
        for gen in ("Q1", "Q2"):
            flow = finite_action(sys.ctx, gen)
            for eq in sys.equations.values():
                assert equals(transform_equation(eq, flow, sys.ctx), eq)

    def test_superspace_dilation_scale(self):
        sys = build_system()
        verdict = symmetry_check("M1", sys)
        s = sys.ctx.symbols["es"]
        inv2 = power(atom(s), -2)
        for eq in ("A", "B", "M"):
            combo = verdict.combination[eq]
            assert equals(combo[eq], inv2)
            assert all(combo[other].is_zero() for other in combo if other != eq)

    def test_field_dilation_scale(self):
        sys = build_system()
        verdict = symmetry_check("M2", sys)
        m = atom(sys.ctx.symbols["em"])
        for eq in ("A", "B", "M"):
            assert equals(verdict.combination[eq][eq], m)

    def test_susy_invariance_through_composition(self):
        # independent route: build the equation from shifted fields and
        # compare with the composition of the whole equation; equality is
        # the invariance statement and cross-checks the flow machinery
        from susyfluid.algebra import occurrence, substitute

        sys = build_system()
        ctx = sys.ctx
        x, th1 = ctx.symbols["x"], ctx.symbols["th1"]
        eta = ctx.const("etaC", 1)
        shift = {x: atom(x) + atom(eta) * atom(th1),
                 th1: atom(th1) - atom(eta)}
        transformed_fields = {
            fn: substitute(occurrence(fn), shift)
            for fn in (sys.A, sys.B, sys.Phi)}
        for eq in sys.equations.values():
            lhs = substitute(eq, transformed_fields)
            rhs = substitute(eq, shift)
            assert equals(lhs, rhs)

    def test_anisotropic_scaling_is_not_a_symmetry(self):
        # scaling x alone (without t and the odd coordinates) does not map
        # the system to a constant recombination of itself
        from susyfluid.linsolve import solve_combination
        from susyfluid.vectorfields import FlowMap

        sys = build_system()
        ctx = sys.ctx
        s = ctx.symbols.get("es") or ctx.const("es", nonzero=True)
        x = ctx.symbols["x"]
        ident = {n: ((as_expr(1), ctx.symbols[n]),)
                 for n in ("x", "t", "th1", "th2")}
        nabla = dict(ident)
        nabla["x"] = ((power(atom(s), -2), x),)
        fake = FlowMap("x-only-scaling", (s,),
                       {x: power(atom(s), 2) * atom(x)}, nabla,
                       {"A": as_expr(1), "B": as_expr(1), "Phi": as_expr(1)})
        moved = transform_equation(sys.eq_A, fake, sys.ctx)
        combo = solve_combination(moved, [sys.eq_A, sys.eq_B, sys.eq_M],
                                  ("es",), param_symbols={"es": s})
        assert combo is None
