"""Float64 inner loops, compiled when available.

``BACKEND`` is ``"cython"`` when the ``_ckernels`` extension imported and
``"python"`` otherwise. Setting ``SIMPLEXGEOM_PURE_PYTHON=1`` before import
forces the numpy fallback. Both backends expect C-contiguous float64 input.
The stochastic matrix products always use numpy (see
``benchmarks/bench_kernels.py``).
"""

import os

from . import _pykernels as python_backend

compiled_backend = None
if os.environ.get("SIMPLEXGEOM_PURE_PYTHON", "") not in ("1", "true", "yes"):
    try:
        from . import _ckernels as compiled_backend
    except ImportError:
        compiled_backend = None

_impl = compiled_backend if compiled_backend is not None else python_backend
BACKEND = "cython" if compiled_backend is not None else "python"

fisher_eval = _impl.fisher_eval
lm_eval = _impl.lm_eval
fisher_eval_batch = _impl.fisher_eval_batch
lm_eval_batch = _impl.lm_eval_batch
# matrix products stay on numpy: BLAS beats the plain compiled loop here
stoch_apply = python_backend.stoch_apply
stoch_apply_batch = python_backend.stoch_apply_batch
cone_terms = _impl.cone_terms

__all__ = [
    "BACKEND",
    "compiled_backend",
    "python_backend",
    "fisher_eval",
    "lm_eval",
    "fisher_eval_batch",
    "lm_eval_batch",
    "stoch_apply",
    "stoch_apply_batch",
    "cone_terms",
]
