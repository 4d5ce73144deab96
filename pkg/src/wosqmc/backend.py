"""Kernel backend selection.

The hot inner loops (boundary distance over primitive soups, Hilbert key
computation, digital-net fills) exist twice: a Cython extension
(``wosqmc._kernels``) and a pure-numpy twin (``wosqmc._purepy``) with
bit-identical numerics. The compiled one is used when it imported cleanly;
set ``WOSQMC_PURE=1`` to force the fallback. ``scripts/bench_backends.py``
compares the two.
"""

import os

from . import _purepy

KIND_CIRCLE = _purepy.KIND_CIRCLE
KIND_ARC = _purepy.KIND_ARC
KIND_SEGMENT = _purepy.KIND_SEGMENT
NPARAMS = _purepy.NPARAMS

if os.environ.get("WOSQMC_PURE", "") not in ("", "0"):
    _impl = _purepy
    BACKEND = "pure"
else:
    try:
        from . import _kernels as _impl
        BACKEND = "compiled"
    except ImportError:
        _impl = _purepy
        BACKEND = "pure"

sobol_fill = _impl.sobol_fill
hilbert_encode = _impl.hilbert_encode
hilbert_decode = _impl.hilbert_decode
nearest_primitive = _impl.nearest_primitive


def implementations():
    """(name, module) pairs of every available backend, for benchmarks."""
    out = [("pure", _purepy)]
    try:
        from . import _kernels
        out.append(("compiled", _kernels))
    except ImportError:
        pass
    return out
