"""Explicit p-adic semi-algebraic bijections, built as invertible map pipelines."""

from .padic import INF, Context, IndeterminateError, PAdic, PrecisionError
from .atlas import DomainError, IsoPipeline, apply, apply_pipeline
from .sets import dimension_of, finite_points, member
from .rectilinear import FormError, RectPart, rectilinearize
from .classify import FinitePoints, classify_to_Kd, isomorphism
from .dsl import parse_dsl
from .lexer import ParseError

__all__ = ["INF", "Context", "IndeterminateError", "PAdic", "PrecisionError",
           "DomainError", "IsoPipeline", "apply", "apply_pipeline",
           "dimension_of", "finite_points", "member",
           "FormError", "RectPart", "rectilinearize",
           "FinitePoints", "classify_to_Kd", "isomorphism",
           "parse_dsl", "ParseError"]
