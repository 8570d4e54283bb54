"""Numerical toolkit for two-variable Herglotz-Nevanlinna functions.

Evaluate a function from its representation data ``(a, b1, b2, mu)``,
certify candidate data, read the data back off a black-box function, and
recover functionals of the measure from boundary values of ``Im q``.
"""

__version__ = "0.1.0"

from .measures import parse_measure, integrate, growth_functional  # noqa: E402
from .representation import (HNRepresentation, HNRepresentation1D, evaluate,  # noqa: E402
                             evaluate_im_poisson, extract_a, extract_b, extract_c)
from .certification import certify_all  # noqa: E402
from .inversion import stieltjes_functional, test_function  # noqa: E402
from .corpus import corpus_entry, CORPUS_IDS  # noqa: E402

__all__ = [
    "__version__",
    "parse_measure",
    "integrate",
    "growth_functional",
    "HNRepresentation",
    "HNRepresentation1D",
    "evaluate",
    "evaluate_im_poisson",
    "extract_a",
    "extract_b",
    "extract_c",
    "certify_all",
    "stieltjes_functional",
    "test_function",
    "corpus_entry",
    "CORPUS_IDS",
]
