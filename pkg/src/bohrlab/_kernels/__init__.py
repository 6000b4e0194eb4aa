"""Hot-kernel backend selection.

The compiled Cython core is used when importable; otherwise the pure numpy
fallback.  Set BOHR_LAB_PURE_PYTHON=1 to force the fallback (used by the
benchmark and the backend-parity tests).
"""
import os

if os.environ.get("BOHR_LAB_PURE_PYTHON", "") == "1":
    from . import _fallback as _impl
else:
    try:
        from . import _core as _impl  # type: ignore[attr-defined]
    except ImportError:
        from . import _fallback as _impl

BACKEND = _impl.BACKEND
orbit_coords = _impl.orbit_coords
character_sums = _impl.character_sums
log_density = _impl.log_density
metropolis_chains = _impl.metropolis_chains
c1_dense_scan = _impl.c1_dense_scan


def get_backend(name=None):
    """Return the kernel namespace: 'compiled', 'python', or the default."""
    if name is None:
        return _impl
    if name == "python":
        from . import _fallback
        return _fallback
    if name == "compiled":
        from . import _core  # raises ImportError when not built
        return _core
    raise ValueError(f"unknown backend {name!r}")
