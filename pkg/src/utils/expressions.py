"""Expression strings in the arclength variable ``s`` as scalar fields."""

import logging
from typing import List, Sequence, Union

import numpy as np
import sympy
from sympy.parsing.sympy_parser import parse_expr, standard_transformations

from ..core.exceptions import SpecError
from ..models.fields import Domain, ScalarField

logger = logging.getLogger(__name__)

S = sympy.Symbol("s", real=True)

FieldSource = Union[str, float, int, Sequence[float]]


def parse_expression(text: str, field: str = None) -> sympy.Expr:
    try:
        expr = parse_expr(text, local_dict={"s": S}, transformations=standard_transformations)
    except (SyntaxError, TypeError, ValueError, sympy.SympifyError) as e:
        raise SpecError(f"cannot parse expression {text!r}: {e}", field)
    if not isinstance(expr, sympy.Expr):
        raise SpecError(f"{text!r} is not a scalar expression", field)
    extra = expr.free_symbols - {S}
    if extra:
        names = ", ".join(sorted(str(x) for x in extra))
        raise SpecError(f"unknown symbols {names}; only 's' is allowed", field)
    return expr


def _vectorised(expr: sympy.Expr):
    fn = sympy.lambdify(S, expr, modules="numpy")
    return lambda s: np.asarray(fn(np.asarray(s, dtype=float)), dtype=float)


def expression_field(expr: sympy.Expr, domain: Domain) -> ScalarField:
    """Rule-backed field with its symbolic derivative attached."""
    return ScalarField.from_rule(_vectorised(expr), domain, derivative=_vectorised(sympy.diff(expr, S)))


def field_from_source(source: FieldSource, domain: Domain, field: str = None) -> ScalarField:
    """Expression string, number or uniform table values over ``domain``."""
    if isinstance(source, str):
        return expression_field(parse_expression(source, field), domain)
    if isinstance(source, (int, float)):
        return ScalarField.constant(float(source), domain)
    values: List[float] = [float(v) for v in source]
    if len(values) < 2:
        raise SpecError("a table needs at least 2 values", field)
    if not np.all(np.isfinite(values)):
        raise SpecError("table values must be finite", field)
    return ScalarField.from_table(domain, np.asarray(values))
