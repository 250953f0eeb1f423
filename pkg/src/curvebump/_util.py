"""Small shared helpers: parallel chunk mapping and atomic file writes."""

import os
import tempfile
from concurrent.futures import ThreadPoolExecutor

import numpy as np

THREADS_ENV_VAR = "CURVEBUMP_THREADS"


def worker_count():
    """Number of worker threads, capped by the CURVEBUMP_THREADS env var."""
    n = os.cpu_count() or 1
    cap = os.environ.get(THREADS_ENV_VAR)
    if cap is not None:
        try:
            n = min(n, max(1, int(cap)))
        except ValueError:
            pass
    return n


def chunk_slices(total, chunk):
    chunk = max(1, int(chunk))
    return [slice(i, min(i + chunk, total)) for i in range(0, total, chunk)]


def map_chunks(fn, slices):
    """Apply ``fn`` to each slice, possibly in parallel.

    Results are returned in slice order regardless of completion order, so
    the output is schedule-independent.
    """
    if len(slices) <= 1 or worker_count() <= 1:
        return [fn(s) for s in slices]
    with ThreadPoolExecutor(max_workers=worker_count()) as pool:
        return list(pool.map(fn, slices))


def write_atomic(path, data):
    """Write bytes or text to ``path`` via a temp file + rename."""
    directory = os.path.dirname(os.path.abspath(path))
    mode = "wb" if isinstance(data, bytes) else "w"
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-curvebump-")
    try:
        with os.fdopen(fd, mode) as f:
            f.write(data)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def as_float_array(x, name="array"):
    arr = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(arr)):
        from .errors import DataError

        raise DataError(f"{name} contains non-finite values")
    return arr
