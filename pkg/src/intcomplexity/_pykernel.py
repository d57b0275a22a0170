"""Pure-Python fallback for the table kernel (numpy for the product sieve)."""

from __future__ import annotations

import numpy as np


def fill_values(values: np.ndarray, cutoff: np.ndarray) -> int:
    limit = values.shape[0] - 1
    buf = bytearray(values.tobytes())
    view = np.frombuffer(buf, dtype=np.uint8)
    thresholds = [int(t) for t in cutoff]
    for n in range(2, limit + 1):
        best = buf[n]
        a = 1
        half = n // 2
        while a <= half:
            if a * (n - a) >= thresholds[best]:
                break
            c = buf[a] + buf[n - a]
            if c < best:
                best = c
            a += 1
        buf[n] = best
        lim = min(limit // n, n)
        if lim >= 2:
            seg = view[2 * n : n * lim + 1 : n]
            cand = view[2 : lim + 1].astype(np.uint16) + best
            np.minimum(seg, np.minimum(cand, 255).astype(np.uint8), out=seg)
    values[:] = view
    return limit
