"""Exact computation in quantum tori and q-deformed Tate algebras over Q((t))."""
from .scalars import BOTTOM, Scalar, lognorm
from .qalg import FreeElement, TwistForm, TwistedElement, gauss_norm, mul, rebase

__all__ = ["BOTTOM", "Scalar", "lognorm", "FreeElement", "TwistForm",
           "TwistedElement", "gauss_norm", "mul", "rebase"]
__version__ = "0.1.0"
