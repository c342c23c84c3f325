"""Kernel backend selection.

The compiled extension is preferred; set SOMACTION_FORCE_PYTHON=1 to force
the pure-numpy fallback (the two are numerically interchangeable, see
benchmarks/bench_som.py).
"""

import os

if os.environ.get("SOMACTION_FORCE_PYTHON"):
    from . import _kernels_py as kernels
    BACKEND = "python"
else:
    try:
        from . import _kernels as kernels  # type: ignore[attr-defined]
        BACKEND = "compiled"
    except ImportError:
        from . import _kernels_py as kernels
        BACKEND = "python"

run_training = kernels.run_training
