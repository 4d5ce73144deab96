"""Walk-on-spheres solvers for Dirichlet problems under MC, RQMC and
Hilbert-sorted Array-RQMC sampling, with the experiment harness around them."""

from .backend import BACKEND

__version__ = "0.1.0"

__all__ = ["BACKEND", "__version__"]
