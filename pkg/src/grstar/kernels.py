"""Kernel selection: the compiled extension when it was built, else pure Python.

Set ``GRSTAR_PURE_PYTHON=1`` to force the fallback (used by the benchmark and
by the equivalence tests).
"""

import os

from . import _kernels_py

BACKEND = "python"
_impl = _kernels_py

if os.environ.get("GRSTAR_PURE_PYTHON", "") not in ("1", "true", "yes"):
    try:
        from . import _kernels as _compiled  # type: ignore[attr-defined]
    except ImportError:
        pass
    else:
        _impl = _compiled
        BACKEND = "cython"

contraction_depth = _impl.contraction_depth
star_words = _impl.star_words
star_accumulate = _impl.star_accumulate
bullet_accumulate = _impl.bullet_accumulate
wedge_accumulate = _impl.wedge_accumulate
contract_words = _impl.contract_words


def compiled_module():
    """The compiled kernel module, or None if it was not built."""
    try:
        from . import _kernels as mod  # type: ignore[attr-defined]
    except ImportError:
        return None
    return mod
