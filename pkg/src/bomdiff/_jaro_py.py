"""Pure-Python similarity kernels.

Behavioral twin of the compiled module ``bomdiff._jaro_cy``; the two must
return bit-identical results for every input. Keep any change here mirrored
in the .pyx file.
"""

from __future__ import annotations


def jaro(s1: str, s2: str) -> float:
    """Jaro similarity over Unicode code points, in [0, 1].

    Characters match within a window of floor(max(len1, len2) / 2) - 1;
    the result is the mean of m/len1, m/len2 and (m - t)/m where t is the
    number of matched characters appearing in a different order, halved
    with floor division as in Winkler's strcmp95 (the mismatch count can
    be odd when the matched sequences are unequal-length permutations).
    Two empty strings score 1.0, exactly one empty string scores 0.0.
    """
    len1, len2 = len(s1), len(s2)
    if len1 == 0 and len2 == 0:
        return 1.0
    if len1 == 0 or len2 == 0:
        return 0.0
    window = (len1 if len1 > len2 else len2) // 2 - 1
    if window < 0:
        window = 0

    flags2 = [False] * len2
    matched1 = []
    for i in range(len1):
        ch = s1[i]
        start = i - window if i > window else 0
        end = i + window + 1
        if end > len2:
            end = len2
        for j in range(start, end):
            if not flags2[j] and s2[j] == ch:
                flags2[j] = True
                matched1.append(ch)
                break

    m = len(matched1)
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
    return (m / len1 + m / len2 + (m - t) / m) / 3.0


def jaro_winkler(
    s1: str,
    s2: str,
    prefix_scale: float = 0.1,
    max_prefix: int = 4,
    boost_floor: float = 0.0,
) -> float:
    """Jaro similarity plus a common-prefix bonus of len * scale * (1 - jaro).

    With ``boost_floor`` > 0 the bonus applies only when the base Jaro score
    reaches the floor (Winkler's original variant used 0.7).
    """
    j = jaro(s1, s2)
    if boost_floor > 0.0 and j < boost_floor:
        return j
    limit = len(s1) if len(s1) < len(s2) else len(s2)
    if limit > max_prefix:
        limit = max_prefix
    prefix = 0
    while prefix < limit and s1[prefix] == s2[prefix]:
        prefix += 1
    return j + prefix * prefix_scale * (1.0 - j)


def score_pairs(
    left: list[str],
    right: list[str],
    threshold: float,
    prefix_scale: float = 0.1,
    max_prefix: int = 4,
    boost_floor: float = 0.0,
    exclude_exact: bool = False,
) -> list[tuple[int, int, float]]:
    """All-pairs Jaro-Winkler, keeping (i, j, score) triples above threshold."""
    out = []
    for i in range(len(left)):
        l = left[i]
        for j in range(len(right)):
            r = right[j]
            if exclude_exact and l == r:
                continue
            score = jaro_winkler(l, r, prefix_scale, max_prefix, boost_floor)
            if score > threshold:
                out.append((i, j, score))
    return out
