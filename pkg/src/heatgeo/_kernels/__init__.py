"""Kernel backend selection.

Prefers the compiled Cython module when it imported cleanly; otherwise uses
the pure numpy implementations.  Set HEATGEO_PURE=1 to force the fallback
(useful for benchmarking and debugging).
"""
import os

from . import _pure

if os.environ.get("HEATGEO_PURE"):
    _impl = _pure
else:
    try:
        from . import _speedups as _impl
    except ImportError:
        _impl = _pure

BACKEND = _impl.BACKEND
quat_mul = _impl.quat_mul
quat_exp = _impl.quat_exp
quat_log = _impl.quat_log
quat_dist = _impl.quat_dist
apply_word = _impl.apply_word
simulate_paths = _impl.simulate_paths

__all__ = [
    "BACKEND",
    "quat_mul",
    "quat_exp",
    "quat_log",
    "quat_dist",
    "apply_word",
    "simulate_paths",
]
