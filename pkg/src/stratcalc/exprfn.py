"""Vector-valued functions given by small arithmetic expressions.

Components are strings over variables x1..xi in a deliberately small
language: +, -, *, /, **, sin, cos, exp, and rational constants (decimal
literals are converted to exact rationals at parse time). Anything else
is rejected. Parsing and symbolic differentiation are delegated to
sympy; evaluation compiles each component to a plain math-module lambda
once and caches it. The symbolic Jacobian exists to serve as an analytic
cross-check for the numeric limit route and is never consulted by it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import sympy

from .errors import InputError, NumericError

_ALLOWED_FUNCTIONS = (sympy.sin, sympy.cos, sympy.exp)


def _symbols(arity: int):
    return sympy.symbols(f"x1:{arity + 1}")


def _validate_tree(expr, allowed_symbols, source: str):
    for node in sympy.preorder_traversal(expr):
        if isinstance(node, sympy.Symbol):
            if node not in allowed_symbols:
                raise InputError(
                    f"unknown variable {node} in expression {source!r}"
                )
        elif node.is_Number:
            if not isinstance(node, sympy.Rational):
                raise InputError(
                    f"non-rational constant {node} in expression {source!r}"
                )
        elif isinstance(node, (sympy.Add, sympy.Mul, sympy.Pow)):
            continue
        elif isinstance(node, _ALLOWED_FUNCTIONS):
            continue
        else:
            raise InputError(
                f"disallowed operation {type(node).__name__} in "
                f"expression {source!r}"
            )


@lru_cache(maxsize=None)
def _compile(components: tuple[str, ...], arity: int):
    xs = _symbols(arity)
    allowed = set(xs)
    exprs = []
    for source in components:
        try:
            expr = sympy.sympify(source, locals={s.name: s for s in xs}, rational=True)
        except (sympy.SympifyError, SyntaxError, TypeError) as exc:
            raise InputError(f"cannot parse expression {source!r}: {exc}") from None
        _validate_tree(expr, allowed, source)
        exprs.append(expr)
    evals = tuple(sympy.lambdify(xs, e, modules="math") for e in exprs)
    jac = tuple(
        tuple(sympy.lambdify(xs, sympy.diff(e, x), modules="math") for x in xs)
        for e in exprs
    )
    return tuple(exprs), evals, jac


@dataclass(frozen=True)
class ExprFunction:
    """A function R^arity -> R^(number of components)."""

    arity: int
    components: tuple[str, ...]

    def __post_init__(self):
        if self.arity < 1:
            raise InputError("arity must be at least 1")
        object.__setattr__(self, "components", tuple(self.components))
        if not self.components:
            raise InputError("at least one component expression required")
        _compile(self.components, self.arity)  # parse and validate eagerly

    def _call(self, fn, xs, what: str):
        try:
            value = fn(*xs)
        except (ValueError, ZeroDivisionError, OverflowError, TypeError) as exc:
            raise NumericError(
                f"evaluation failed for {what} at {tuple(xs)}: {exc}",
                location=what,
            ) from None
        if isinstance(value, complex) or not math.isfinite(value):
            raise NumericError(
                f"non-finite value for {what} at {tuple(xs)}",
                location=what,
            )
        return float(value)

    def evaluate(self, xs) -> tuple[float, ...]:
        xs = tuple(float(t) for t in xs)
        if len(xs) != self.arity:
            raise InputError(f"expected {self.arity} arguments, got {len(xs)}")
        _, evals, _ = _compile(self.components, self.arity)
        return tuple(
            self._call(fn, xs, f"component {i} = {src!r}")
            for i, (fn, src) in enumerate(zip(evals, self.components))
        )

    def jacobian(self, xs) -> tuple[tuple[float, ...], ...]:
        """Symbolic Jacobian evaluated at a point; rows follow components."""
        xs = tuple(float(t) for t in xs)
        if len(xs) != self.arity:
            raise InputError(f"expected {self.arity} arguments, got {len(xs)}")
        _, _, jac = _compile(self.components, self.arity)
        return tuple(
            tuple(
                self._call(fn, xs, f"d(component {i})/dx{j + 1}")
                for j, fn in enumerate(row)
            )
            for i, row in enumerate(jac)
        )

    def jacobian_apply(self, xs, v) -> tuple[float, ...]:
        v = tuple(float(t) for t in v)
        if len(v) != self.arity:
            raise InputError(f"expected {self.arity} direction entries, got {len(v)}")
        rows = self.jacobian(xs)
        return tuple(sum(r * vi for r, vi in zip(row, v)) for row in rows)
