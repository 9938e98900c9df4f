"""Numeric kernel backend selection.

The hot per-bin loops live either in the compiled extension ``_core``
(Cython) or in the vectorized pure-numpy fallback ``_reference``.  The
compiled module is preferred when importable; set ``SFFT_DT_PURE_PYTHON=1``
to force the fallback (used by the tests to exercise both paths).
"""

import os

if os.environ.get("SFFT_DT_PURE_PYTHON") == "1":
    from . import _reference as _impl
else:
    try:
        from . import _core as _impl  # type: ignore[attr-defined]
    except ImportError:
        from . import _reference as _impl

fft_radix2 = _impl.fft_radix2
hankel_solve = _impl.hankel_solve
poly_roots = _impl.poly_roots
vandermonde_solve = _impl.vandermonde_solve
prune_eval = _impl.prune_eval
hankel_singular_values = _impl.hankel_singular_values

BACKEND = "compiled" if _impl.COMPILED else "python"


def using_compiled() -> bool:
    """True when the Cython extension is the active backend."""
    return _impl.COMPILED
