"""Numerical tolerances, caps, and thread configuration.

All logarithms in this package are natural; entropic values are computed in
nats and converted to bits only at display boundaries.
"""

import os

#: max absolute deviation from Hermiticity accepted at construction
HERMITIAN_TOL = 1e-10

#: eigenvalues in [-EIG_CLIP_TOL, 0) are clipped to 0 for density matrices
EIG_CLIP_TOL = 1e-10

#: spectral support threshold for pseudo-log / pseudo-inverse / pseudo-power
SUPPORT_TOL = 1e-12

#: squared overlap with a kernel above which a support violation is declared
KERNEL_OVERLAP_TOL = 1e-9

#: largest dense matrix dimension the package will materialize
MAX_TOTAL_DIM = 1024

#: cap on the number of deterministic encoders enumerated by brute force
ENCODER_ENUM_CAP = 2_000_000

#: cap on |alphabet|**n for exhaustive typical-set enumeration
TYPICAL_ENUM_CAP = 1_000_000

#: probability mass below which an encoded block is dropped
BLOCK_MASS_TOL = 1e-14

#: environment variable controlling the worker-thread count
THREADS_ENV_VAR = "CQBOUNDS_THREADS"


def thread_count() -> int:
    """Worker threads for instance sweeps; defaults to all cores."""
    raw = os.environ.get(THREADS_ENV_VAR, "")
    if raw.strip():
        try:
            n = int(raw)
        except ValueError:
            n = 1
        return max(1, n)
    return max(1, os.cpu_count() or 1)


def parallel_map(fn, items):
    """Map ``fn`` over ``items``, returning results in index order.

    Runs on a thread pool of ``thread_count()`` workers; the reduction is
    ordered, so results never depend on the degree of parallelism.
    """
    items = list(items)
    workers = thread_count()
    if workers <= 1 or len(items) <= 1:
        return [fn(it) for it in items]
    from concurrent.futures import ThreadPoolExecutor

    with ThreadPoolExecutor(max_workers=min(workers, len(items))) as pool:
        return list(pool.map(fn, items))
