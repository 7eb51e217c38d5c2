# cython: language_level=3
# cython: boundscheck=False
# cython: wraparound=False
"""Compiled similarity kernels.

Behavioral twin of ``bomdiff._jaro_py``; the two must return bit-identical
results for every input. Keep any change here mirrored in the .py file.
"""

from libc.stdlib cimport malloc, free
from libc.string cimport memset


cdef double _jaro_impl(unicode s1, unicode s2) except -1.0:
    cdef Py_ssize_t len1 = len(s1)
    cdef Py_ssize_t len2 = len(s2)
    if len1 == 0 and len2 == 0:
        return 1.0
    if len1 == 0 or len2 == 0:
        return 0.0

    cdef Py_ssize_t window = (len1 if len1 > len2 else len2) // 2 - 1
    if window < 0:
        window = 0

    cdef char *flags2 = <char *> malloc(len2)
    cdef Py_UCS4 *matched1 = <Py_UCS4 *> malloc(len1 * sizeof(Py_UCS4))
    if flags2 == NULL or matched1 == NULL:
        free(flags2)
        free(matched1)
        raise MemoryError()
    memset(flags2, 0, len2)

    cdef Py_ssize_t i, j, start, end, m, k, mismatches, t
    cdef Py_UCS4 ch
    try:
        m = 0
        for i in range(len1):
            ch = s1[i]
            start = i - window if i > window else 0
            end = i + window + 1
            if end > len2:
                end = len2
            for j in range(start, end):
                if flags2[j] == 0 and s2[j] == ch:
                    flags2[j] = 1
                    matched1[m] = ch
                    m += 1
                    break

        if m == 0:
            return 0.0

        mismatches = 0
        k = 0
        for j in range(len2):
            if flags2[j]:
                if s2[j] != matched1[k]:
                    mismatches += 1
                k += 1
        t = mismatches // 2
        return ((<double> m) / len1 + (<double> m) / len2
                + (<double> (m - t)) / m) / 3.0
    finally:
        free(flags2)
        free(matched1)


cdef double _jaro_winkler_impl(
    unicode s1,
    unicode s2,
    double prefix_scale,
    Py_ssize_t max_prefix,
    double boost_floor,
) except -1.0:
    cdef double j = _jaro_impl(s1, s2)
    if boost_floor > 0.0 and j < boost_floor:
        return j
    cdef Py_ssize_t limit = len(s1) if len(s1) < len(s2) else len(s2)
    if limit > max_prefix:
        limit = max_prefix
    cdef Py_ssize_t prefix = 0
    while prefix < limit and s1[prefix] == s2[prefix]:
        prefix += 1
    return j + prefix * prefix_scale * (1.0 - j)


def jaro(s1: unicode, s2: unicode) -> float:
    """Jaro similarity over Unicode code points, in [0, 1].

    Same contract as the pure twin: match window floor(max/2) - 1 and
    transpositions halved with floor division.
    """
    return _jaro_impl(s1, s2)


def jaro_winkler(
    s1: unicode,
    s2: unicode,
    prefix_scale: double = 0.1,
    max_prefix: Py_ssize_t = 4,
    boost_floor: double = 0.0,
) -> float:
    """Jaro similarity plus a common-prefix bonus of len * scale * (1 - jaro)."""
    return _jaro_winkler_impl(s1, s2, prefix_scale, max_prefix, boost_floor)


def score_pairs(
    left: list,
    right: list,
    threshold: double,
    prefix_scale: double = 0.1,
    max_prefix: Py_ssize_t = 4,
    boost_floor: double = 0.0,
    exclude_exact: bint = False,
) -> list:
    """All-pairs Jaro-Winkler, keeping (i, j, score) triples above threshold."""
    cdef Py_ssize_t i, j
    cdef Py_ssize_t n_left = len(left)
    cdef Py_ssize_t n_right = len(right)
    cdef double score
    cdef unicode l, r
    out = []
    for i in range(n_left):
        l = left[i]
        for j in range(n_right):
            r = right[j]
            if exclude_exact and l == r:
                continue
            score = _jaro_winkler_impl(l, r, prefix_scale, max_prefix, boost_floor)
            if score > threshold:
                out.append((i, j, score))
    return out
