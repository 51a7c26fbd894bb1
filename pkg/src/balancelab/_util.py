"""Internal helpers: bounded thread pools and atomic file writes."""

from __future__ import annotations

import os
import tempfile
from concurrent.futures import ThreadPoolExecutor


def worker_count() -> int:
    """Number of worker threads, capped by the BALANCELAB_THREADS env var."""
    cap = os.environ.get("BALANCELAB_THREADS")
    if cap is not None:
        try:
            n = int(cap)
        except ValueError:
            n = 1
        return max(1, n)
    return max(1, min(os.cpu_count() or 1, 8))


def thread_map(fn, items):
    """Apply ``fn`` over ``items``, preserving order.

    Runs serially when only one worker is allowed; otherwise uses a thread
    pool.  Results are returned in input order either way, so callers are
    deterministic regardless of scheduling.
    """
    items = list(items)
    n = worker_count()
    if n <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=n) as pool:
        return list(pool.map(fn, items))


def atomic_write_text(path, text: str) -> None:
    """Write ``text`` to ``path`` via a temp file + rename in one step."""
    path = os.fspath(path)
    d = os.path.dirname(path) or "."
    fd, tmp = tempfile.mkstemp(dir=d, prefix=".tmp-", suffix="~")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def fmt_float(x) -> str:
    """Shortest round-trip decimal representation of a float."""
    return repr(float(x))
