"""keislerlab: exact Keisler measures over finite first-order structures.

A desk-scale laboratory: formula evaluation over finite structures, exact
rational measures with their product/convolution algebra, definability
tables and level-set buckets, average-measure approximation with VC
diagnostics, idempotent classification on finite groups, and tail-stability
reports along sequences of structures.
"""

from .engine import backend_name, have_native

__version__ = "0.1.0"

__all__ = ["backend_name", "have_native", "__version__"]
