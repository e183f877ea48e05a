"""Hot grid kernels with a numba fast path and a pure-numpy fallback.

The deposition kernel runs once per simulation tick while the nozzle is
spraying (hundreds of thousands of calls for a desk-scale mission), so it
is worth JIT-compiling. Set ``PAINTRIG_NUMBA=0`` to force the numpy path;
``benchmarks/bench_kernels.py`` compares the two.
"""

import os

import numpy as np


def _numba_wanted() -> bool:
    flag = os.environ.get("PAINTRIG_NUMBA", "1").strip().lower()
    return flag not in ("0", "false", "no", "off")


# --- pure numpy implementations -------------------------------------------

def deposit_numpy(coats, r0, r1, c0, c1):
    """Add one coat to coats[r0:r1, c0:c1]; return count of newly painted cells.

    Index bounds must already be clipped to the array.
    """
    region = coats[r0:r1, c0:c1]
    newly = region.size - np.count_nonzero(region)
    region += 1
    return newly


def grid_stats_numpy(coats):
    """Return (painted_cells, total_coats, max_coats) in one pass over the grid."""
    return (
        int(np.count_nonzero(coats)),
        int(coats.sum(dtype=np.int64)),
        int(coats.max()) if coats.size else 0,
    )


# --- numba implementations -------------------------------------------------

HAVE_NUMBA = False
if _numba_wanted():
    try:
        from numba import njit

        @njit(cache=True)
        def deposit_numba(coats, r0, r1, c0, c1):  # pragma: no cover - jitted
            newly = 0
            for r in range(r0, r1):
                for c in range(c0, c1):
                    if coats[r, c] == 0:
                        newly += 1
                    coats[r, c] += 1
            return newly

        @njit(cache=True)
        def grid_stats_numba(coats):  # pragma: no cover - jitted
            painted = 0
            total = 0
            peak = 0
            for r in range(coats.shape[0]):
                for c in range(coats.shape[1]):
                    v = coats[r, c]
                    if v > 0:
                        painted += 1
                        total += v
                        if v > peak:
                            peak = v
            return painted, total, peak

        HAVE_NUMBA = True
    except ImportError:
        HAVE_NUMBA = False

if HAVE_NUMBA:
    deposit = deposit_numba
    BACKEND = "numba"
else:
    deposit = deposit_numpy
    BACKEND = "numpy"

# grid_stats always uses numpy: the vectorized reduction is ~4x faster than
# the jitted loop on a full grid (see the benchmark), and it only runs once
# per report, so it never earns its JIT cost.
_grid_stats = grid_stats_numpy


def grid_stats(coats):
    painted, total, peak = _grid_stats(coats)
    return int(painted), int(total), int(peak)
