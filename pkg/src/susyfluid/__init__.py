"""Grassmann-valued symbolic engine and verification suites for a
supersymmetric two-phase fluid system."""

from .algebra import (Context, Expr, Symbol, FunctionDecl, EVEN, ODD,
                      atom, occurrence, multiply, power, derive, substitute,
                      equals, is_zero, normalize,
                      AlgebraError, DeclarationError, MalformedTermError,
                      ParityError, UnsupportedOperation)

__version__ = "0.1.0"
