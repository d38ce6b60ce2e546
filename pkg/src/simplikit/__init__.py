"""simplikit: Java method simplification toolkit.

Generates candidate simplified methods (rule catalog, deletion-based
reduction, or a remote generator backend), validates them for
test-equivalence and size reduction against a project's test suite, and
scores results against ground truth.
"""

from .lexer import Token, sloc, token_count, token_equal, tokenize
from .syntax import (
    JavaParseError,
    MethodUnit,
    Node,
    UnsupportedConstructError,
    parse_method,
    print_method,
)

__version__ = "0.1.0"

__all__ = [
    "Token",
    "tokenize",
    "sloc",
    "token_count",
    "token_equal",
    "MethodUnit",
    "Node",
    "parse_method",
    "print_method",
    "JavaParseError",
    "UnsupportedConstructError",
    "__version__",
]
