"""Expression language: grammar, errors, and round-trip stability."""

import random

import pytest

from susyfluid import render
from susyfluid.parser import (ParseError, parse_expression, parse_program)
from conftest import random_expr


class TestGrammar:
    def test_covariant_square_is_x_derivative(self):
        prog = parse_program("fn Phi(x, t, th1, th2) even\n"
                             "D1(D1(Phi)) - dx(Phi)")
        assert prog.expressions[0].is_zero()

    def test_theta_square_normalises_to_zero(self):
        assert parse_expression("th1*th1").is_zero()

    def test_mixed_supersymmetry_anticommutator(self):
        prog = parse_program("fn f(x, t, th1, th2) even\n"
                             "Q1(Q2(f)) + Q2(Q1(f))")
        assert prog.expressions[0].is_zero()

    def test_declarations(self):
        prog = parse_program("odd const mu nonzero\n"
                             "even param a nonzero\n"
                             "even const eps pm1\n"
                             "eps*eps")
        assert prog.ctx.symbols["mu"].parity == 1
        assert prog.ctx.symbols["a"].nonzero
        assert prog.ctx.symbols["eps"].square_one
        assert (prog.expressions[0] - 1).is_zero()

    def test_function_occurrence_suffix(self):
        prog = parse_program("fn f(x, t) even\nf_x,t")
        e = prog.expressions[0]
        assert render.text(e) == "f_x,t"

    def test_composed_occurrence(self):
        prog = parse_program("even param a nonzero\n"
                             "fn h(x) even\n"
                             "h[a*x - t]")
        e = prog.expressions[0]
        assert "h[" in render.text(e)

    def test_ambient_bracket_args_collapse(self):
        prog = parse_program("fn f(x, t) even\nf[x, t] - f")
        assert prog.expressions[0].is_zero()

    def test_rational_powers(self):
        e = parse_expression("x^(1/2)*x^(1/2)")
        assert (e - parse_expression("x")).is_zero()

    def test_division(self):
        e = parse_expression("x/2 - 1/2*x")
        assert e.is_zero()

    def test_comments_and_semicolons(self):
        prog = parse_program("# two statements\nx + t; x - t")
        assert len(prog.expressions) == 2


class TestErrors:
    def test_undeclared_identifier_with_location(self):
        with pytest.raises(ParseError) as err:
            parse_expression("x + qqq")
        assert "line 1" in str(err.value)
        assert "column 5" in str(err.value)

    def test_syntax_error(self):
        with pytest.raises(ParseError):
            parse_expression("x + * t")

    def test_reserved_names(self):
        with pytest.raises(ParseError, match="reserved"):
            parse_program("even const D1")

    def test_redeclaration(self):
        with pytest.raises(ParseError, match="already declared"):
            parse_program("even const x")

    def test_unknown_slot_in_suffix(self):
        with pytest.raises(ParseError, match="slot"):
            parse_program("fn f(x) even\nf_t")

    def test_odd_denominator_rejected(self):
        with pytest.raises(ParseError):
            parse_expression("x/th1")

    def test_wrong_arity(self):
        with pytest.raises(ParseError, match="arguments"):
            parse_program("fn f(x, t) even\nf[x]")


class TestRoundTrip:
    def test_fixpoint_on_canonical_output(self, pool):
        rng = random.Random(21)
        header = ("even const c0\neven const c1\nodd const mu\nodd const nu\n"
                  "odd const lam\neven const eps pm1\n"
                  "fn f(x, t) even\nfn g(x, t) odd\n")
        for _ in range(60):
            e = random_expr(rng, pool)
            text = render.text(e)
            prog = parse_program(header + text)
            back = prog.expressions[0]
            assert render.text(back) == text
            assert (back - e).is_zero()

    def test_fixpoint_with_powers(self):
        src = ("even param a nonzero\n"
               "(a*x - t)^(-2) + 2^(1/2)*t^(-1/2) + 3/4*x^2")
        e = parse_program(src).expressions[0]
        text = render.text(e)
        back = parse_program("even param a nonzero\n" + text).expressions[0]
        assert render.text(back) == text
