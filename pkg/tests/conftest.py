import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from pcoh.groups import cyclic, elementary_abelian, make_pn
from pcoh.resolution import Resolution

_SPECS = {
    "C3": (lambda: cyclic(3), 10),
    "C9": (lambda: cyclic(3, 2), 6),
    "C5": (lambda: cyclic(5), 8),
    "C3xC3": (lambda: elementary_abelian(3, 2), 8),
    "P3@3": (lambda: make_pn(3, 3), 12),
    "P4@3": (lambda: make_pn(3, 4), 8),
    "P3@5": (lambda: make_pn(5, 3), 12),
}


class _Corpus:
    """Lazily computed, session-shared resolutions keyed by group name."""

    def __init__(self):
        self._cache = {}

    def __getitem__(self, name):
        got = self._cache.get(name)
        if got is None:
            build, dmax = _SPECS[name]
            got = Resolution.compute(build(), dmax)
            self._cache[name] = got
        return got


@pytest.fixture(scope="session")
def corpus():
    return _Corpus()
