"""Assignment-enumeration kernels.

The compiled ``_ckernels`` extension is used when it has been built; otherwise
(or when ``NONLOCALITY_PURE_PYTHON`` is set) the numpy versions in
``_pykernels`` are used.  ``BACKEND`` names the active implementation.
"""
import os

from . import _pykernels as python_backend

compiled_backend = None
if not os.environ.get("NONLOCALITY_PURE_PYTHON"):
    try:
        from . import _ckernels as compiled_backend
    except ImportError:
        compiled_backend = None

_active = compiled_backend or python_backend
BACKEND = "cython" if compiled_backend is not None else "python"

consistent_codes = _active.consistent_codes
hit_sections = _active.hit_sections
outcome_matrix = _active.outcome_matrix

__all__ = ["BACKEND", "consistent_codes", "hit_sections", "outcome_matrix",
           "compiled_backend", "python_backend"]
