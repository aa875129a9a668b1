"""Delay dynamic equations on time scales: simulation and stability certificates."""

from ._core import (
    Certificate,
    Error,
    EvalError,
    Expr,
    RunConfig,
    SyntaxError,
    TimeScale,
    certify,
    compare,
    format_expr,
    load_config,
    parse_config,
    parse_expr,
    same_expr,
    simulate,
    verify_axioms,
)

__all__ = [
    "Certificate",
    "Error",
    "EvalError",
    "Expr",
    "RunConfig",
    "SyntaxError",
    "TimeScale",
    "certify",
    "compare",
    "format_expr",
    "load_config",
    "parse_config",
    "parse_expr",
    "same_expr",
    "simulate",
    "verify_axioms",
]
