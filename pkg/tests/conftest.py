from __future__ import annotations

import pytest

from freegroups.partial_injections import CountCache


@pytest.fixture(scope="session")
def cache():
    return CountCache()
