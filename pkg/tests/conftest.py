import functools

import pytest

from aswtower.tower import TowerSpec, build_tower


@functools.lru_cache(maxsize=None)
def cached_tower(p, items, levels=2, lift="teichmuller"):
    """Shared towers keyed by (p, ((exponent, coefficient), ...))."""
    return build_tower(TowerSpec.simple(p, dict(items), levels, lift))


@pytest.fixture(scope="session")
def tower_of():
    return cached_tower
