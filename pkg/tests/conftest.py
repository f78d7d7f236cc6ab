"""Shared fixtures: a standard declaration pool and random expression
generators for the algebraic law suites."""

from __future__ import annotations

import random
from fractions import Fraction

import pytest

from susyfluid.algebra import (EVEN, ODD, Context, Expr, FuncOcc, SymPow,
                               normalize)


class Pool:
    """A fixed declaration pool for randomized term generation."""

    def __init__(self):
        self.ctx = Context()
        self.x = self.ctx.coord("x")
        self.t = self.ctx.coord("t")
        self.th1 = self.ctx.coord("th1", ODD)
        self.th2 = self.ctx.coord("th2", ODD)
        self.c0 = self.ctx.const("c0")
        self.c1 = self.ctx.const("c1")
        self.mu = self.ctx.const("mu", ODD)
        self.nu = self.ctx.const("nu", ODD)
        self.lam = self.ctx.const("lam", ODD)
        self.eps = self.ctx.const("eps", nonzero=True, square_one=True)
        self.f = self.ctx.function("f", [self.x, self.t], EVEN)
        self.g = self.ctx.function("g", [self.x, self.t], ODD)
        self.even_syms = [self.x, self.t, self.c0, self.c1, self.eps]
        self.odd_syms = [self.th1, self.th2, self.mu, self.nu, self.lam]
        self.coords = [self.x, self.t, self.th1, self.th2]


@pytest.fixture(scope="session")
def pool() -> Pool:
    return Pool()


def random_factor(rng: random.Random, pool: Pool, allow_odd=True):
    kind = rng.randrange(4 if allow_odd else 2)
    if kind == 0:
        sym = rng.choice(pool.even_syms)
        exp = Fraction(rng.choice((1, 1, 2, 3)))
        return SymPow(sym, exp)
    if kind == 1:
        derivs = tuple(rng.choice(("x", "t"))
                       for _ in range(rng.randrange(2)))
        return FuncOcc(pool.f, derivs)
    if kind == 2:
        return SymPow(rng.choice(pool.odd_syms), Fraction(1))
    derivs = tuple(rng.choice(("x", "t")) for _ in range(rng.randrange(2)))
    return FuncOcc(pool.g, derivs)


def random_raw_term(rng: random.Random, pool: Pool, max_factors=4):
    coeff = Fraction(rng.randint(-4, 4), rng.randint(1, 3))
    if coeff == 0:
        coeff = Fraction(1)
    factors = tuple(random_factor(rng, pool)
                    for _ in range(rng.randrange(max_factors + 1)))
    return coeff, factors


def random_expr(rng: random.Random, pool: Pool, max_terms=3) -> Expr:
    return normalize(random_raw_term(rng, pool)
                     for _ in range(rng.randrange(1, max_terms + 1)))


def random_homogeneous(rng: random.Random, pool: Pool, parity: int,
                       max_terms=3) -> Expr:
    """A random expression whose terms all share the requested parity."""
    out = []
    for _ in range(rng.randrange(1, max_terms + 1)):
        for _ in range(40):
            coeff, factors = random_raw_term(rng, pool)
            term_parity = sum(f.parity for f in factors) % 2
            if term_parity == parity:
                out.append((coeff, factors))
                break
    return normalize(out)
