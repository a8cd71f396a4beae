from __future__ import annotations

from functools import lru_cache

from mcw.geometry import PolygonParams, enumerate_dissections


@lru_cache(maxsize=None)
def all_dissections(n: int, m: int):
    """Cached list of all maximal dissections for a parameter pair."""
    return list(enumerate_dissections(PolygonParams(n, m), cap=None))


def small_range(n_plus_one_max: int, m_max: int):
    """All (n, m) with n+1 <= n_plus_one_max and m <= m_max."""
    return [
        (n, m)
        for n in range(1, n_plus_one_max)
        for m in range(1, m_max + 1)
    ]
