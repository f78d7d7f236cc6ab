"""Exact linear solves over the term basis of canonical expressions.

``solve_combination`` finds coefficients c_j with ``target = sum c_j b_j``
where the c_j live in the ring generated by a designated set of parameter
symbols (Laurent monomials in even parameters, linear in odd ones) and
the basis expressions are parameter-free.  Everything is exact rational
arithmetic; no solution returns None.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Optional, Sequence

from .algebra import (ODD, Expr, SymPow, Term, ZERO, as_expr, multiply)


def _split_params(e: Expr, param_names) -> dict:
    """Decompose e into {param-monomial key: {core term key: coeff}}.

    The parameter part of each term is moved to the front, tracking the
    permutation sign of odd factors; the remainder keys the core.
    """
    out: dict = {}
    for t in e.terms:
        sign = 1
        params = []
        core = []
        odd_core_seen = 0
        for f in t.factors:
            if isinstance(f, SymPow) and f.sym.name in param_names:
                if f.parity == ODD and odd_core_seen % 2:
                    sign = -sign
                params.append((f.sym.name, f.exp))
            else:
                core.append(f)
                if f.parity == ODD:
                    odd_core_seen += 1
        mkey = tuple(params)
        ckey = Term(Fraction(1), tuple(core)).key()
        bucket = out.setdefault(mkey, {})
        bucket[ckey] = bucket.get(ckey, Fraction(0)) + sign * t.coeff
    return {m: {k: c for k, c in bucket.items() if c != 0}
            for m, bucket in out.items()}


def _monomial_expr(mkey, symbols_by_name) -> Expr:
    e = as_expr(1)
    for name, exp in mkey:
        from .algebra import atom, power

        e = multiply(e, power(atom(symbols_by_name[name]), exp))
    return e


def solve_combination(target: Expr, basis: Sequence[Expr],
                      param_names: Sequence[str] = (),
                      param_symbols=None) -> Optional[dict[int, Expr]]:
    """Solve ``target = sum_j c_j * basis_j`` exactly, or return None.

    ``param_names`` lists symbols allowed inside the c_j; the basis must
    be free of them.  Products c_j * basis_j are evaluated through the
    expression engine, so graded signs are handled uniformly.
    """
    param_names = set(param_names)
    symbols_by_name = dict(param_symbols or {})
    for e in list(basis) + [target]:
        for t in e.terms:
            for f in t.factors:
                if isinstance(f, SymPow) and f.sym.name in param_names:
                    symbols_by_name.setdefault(f.sym.name, f.sym)

    target_split = _split_params(target, param_names)
    monomials = sorted(target_split.keys()) or [()]
    unknowns = [(j, m) for j in range(len(basis)) for m in monomials]

    # columns: decomposition of monomial * basis_j
    columns = {}
    for j, b in enumerate(basis):
        for m in monomials:
            prod = multiply(_monomial_expr(m, symbols_by_name), b)
            columns[(j, m)] = _split_params(prod, param_names)

    # row space: every (monomial, core key) seen anywhere
    row_keys = set()
    for split in list(columns.values()) + [target_split]:
        for m, bucket in split.items():
            for ckey in bucket:
                row_keys.add((m, ckey))
    row_keys = sorted(row_keys)

    matrix = []
    rhs = []
    for rk in row_keys:
        m, ckey = rk
        matrix.append([columns[u].get(m, {}).get(ckey, Fraction(0))
                       for u in unknowns])
        rhs.append(target_split.get(m, {}).get(ckey, Fraction(0)))

    solution = _gauss_solve(matrix, rhs)
    if solution is None:
        return None
    out: dict[int, Expr] = {j: ZERO for j in range(len(basis))}
    for value, (j, m) in zip(solution, unknowns):
        if value:
            out[j] = out[j] + multiply(as_expr(value),
                                       _monomial_expr(m, symbols_by_name))
    return out


def clear_denominators(exprs: Sequence[Expr]) -> list[Expr]:
    """Multiply all expressions by enough integer composite-base powers to
    remove denominators, so term-key matching becomes exact.

    The multiplier is applied as an unexpanded power factor: factor-level
    exponent merging then cancels the denominators before the remaining
    positive powers are expanded into the numerators.
    """
    from .algebra import ExprPow

    minima: dict = {}
    bases: dict = {}
    for e in exprs:
        for t in e.terms:
            for f in t.factors:
                if isinstance(f, ExprPow) and f.exp.denominator == 1:
                    key = f.base.terms
                    bases[key] = f.base
                    minima[key] = min(minima.get(key, Fraction(0)), f.exp)
    factors = [(bases[key], -m) for key, m in minima.items() if m < 0]
    out = []
    for e in exprs:
        for base, k in factors:
            e = multiply(e, Expr((Term(Fraction(1), (ExprPow(base, k),)),)))
        out.append(e)
    return out


def _gauss_solve(matrix: list[list[Fraction]],
                 rhs: list[Fraction]) -> Optional[list[Fraction]]:
    """Particular solution of an exact linear system (free unknowns -> 0)."""
    if not matrix:
        return []
    rows = len(matrix)
    cols = len(matrix[0])
    aug = [row[:] + [b] for row, b in zip(matrix, rhs)]
    pivot_cols = []
    r = 0
    for c in range(cols):
        pivot = next((i for i in range(r, rows) if aug[i][c] != 0), None)
        if pivot is None:
            continue
        aug[r], aug[pivot] = aug[pivot], aug[r]
        scale = aug[r][c]
        aug[r] = [v / scale for v in aug[r]]
        for i in range(rows):
            if i != r and aug[i][c] != 0:
                factor = aug[i][c]
                aug[i] = [v - factor * w for v, w in zip(aug[i], aug[r])]
        pivot_cols.append(c)
        r += 1
        if r == rows:
            break
    for i in range(r, rows):
        if aug[i][cols] != 0:
            return None  # inconsistent
    solution = [Fraction(0)] * cols
    for i, c in enumerate(pivot_cols):
        solution[c] = aug[i][cols]
    return solution
