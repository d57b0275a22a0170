# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled dynamic-programming kernel for the complexity table."""

from libc.stdint cimport uint8_t, int64_t


def fill_values(uint8_t[::1] values, const int64_t[::1] cutoff):
    """Fill ``values[2:]`` in place; ``values[1]`` must already be 1.

    Entries above the current index hold pushed product upper bounds and must
    start at 255.  ``cutoff[c]`` is the least P with P**3 >= 3**c.
    """
    cdef Py_ssize_t limit = values.shape[0] - 1
    cdef Py_ssize_t n, a, b, lim
    cdef int best, c, vn
    for n in range(2, limit + 1):
        best = values[n]
        a = 1
        while 2 * a <= n:
            if <int64_t>a * (n - a) >= cutoff[best]:
                break
            c = values[a] + values[n - a]
            if c < best:
                best = c
            a += 1
        values[n] = best
        vn = best
        lim = limit // n
        if lim > n:
            lim = n
        for b in range(2, lim + 1):
            c = vn + values[b]
            if c < values[n * b]:
                values[n * b] = c
    return limit
