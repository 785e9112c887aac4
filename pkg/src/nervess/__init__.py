"""nervess: exact spectral sequences of bisimplicial sets, cotor over group
coalgebras and Hochschild-type Tor computations, over GF(p) and Q."""

from ._backend import NAME as BACKEND
from .exactla import Field, Matrix, as_field, kernel_basis, rank, subquotient

__version__ = "0.1.0"

__all__ = ["BACKEND", "Field", "Matrix", "as_field", "kernel_basis", "rank", "subquotient",
           "__version__"]
