"""Kernel backend selection.

Hot inner loops (batched form evaluation, lattice stencils) exist in two
implementations: a numba @njit one and a pure-numpy one.  The environment
variable ``G2CALIB_BACKEND`` picks which one the library binds at import
time:

    G2CALIB_BACKEND=numba   use the jitted kernels (default when numba
                            imports cleanly)
    G2CALIB_BACKEND=numpy   force the vectorized numpy fallbacks

Both paths compute identical results; the benchmark script
``benchmarks/bench_kernels.py`` compares them.
"""

import os

_requested = os.environ.get("G2CALIB_BACKEND", "").strip().lower()

if _requested not in ("", "numba", "numpy"):
    raise RuntimeError(
        f"G2CALIB_BACKEND={_requested!r} not understood (use 'numba' or 'numpy')"
    )

HAVE_NUMBA = False
if _requested != "numpy":
    try:
        import numba  # noqa: F401
        HAVE_NUMBA = True
    except ImportError:
        if _requested == "numba":
            raise RuntimeError("G2CALIB_BACKEND=numba but numba is not importable")

USE_NUMBA = HAVE_NUMBA and _requested != "numpy"
BACKEND = "numba" if USE_NUMBA else "numpy"


def njit(*args, **kwargs):
    """numba.njit when the numba backend is active, identity otherwise."""
    if USE_NUMBA:
        import numba
        return numba.njit(*args, **kwargs)
    if args and callable(args[0]):
        return args[0]
    return lambda f: f


def select(numpy_impl, numba_impl):
    """Return the implementation matching the active backend."""
    return numba_impl if USE_NUMBA else numpy_impl
