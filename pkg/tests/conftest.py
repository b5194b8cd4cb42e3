"""Shared fixtures: isolate the on-disk layer cache per test session."""

import os

import pytest

from hyperstab import m0n


@pytest.fixture(autouse=True, scope="session")
def _session_cache_dir(tmp_path_factory):
    """Point HYPERSTAB_CACHE at a session-scoped temp dir for every test."""
    cache = tmp_path_factory.mktemp("layer-cache")
    previous = os.environ.get("HYPERSTAB_CACHE")
    os.environ["HYPERSTAB_CACHE"] = str(cache)
    m0n.equivariant_poincare_m0n.cache_clear()
    yield cache
    if previous is None:
        os.environ.pop("HYPERSTAB_CACHE", None)
    else:
        os.environ["HYPERSTAB_CACHE"] = previous
    m0n.equivariant_poincare_m0n.cache_clear()
