"""Kernel selection: the compiled extension if importable, else pure Python.

Set ``FRILAB_PURE=1`` to force the fallback.
"""
import os

from . import _pykernels as pure

kernels = pure
COMPILED = False

if not os.environ.get("FRILAB_PURE"):
    try:
        from . import _kernels as kernels  # noqa: F811

        COMPILED = True
    except ImportError:  # pragma: no cover - depends on build
        pass

BACKEND = "cython" if COMPILED else "python"
