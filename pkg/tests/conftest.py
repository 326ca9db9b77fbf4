import time

import pytest

from cosetgeo.fpgroup import parse_presentation
from cosetgeo.lowindex import low_index_subgroups

SIGMA257 = "a,b | aBab^2aBab^3, a^4bAb"
WBAR = "a,b | a^3b^2AB^3Ab^2, (ab)^2aB^2Ab^2AB^2"
Q = "a,b | a^2bA^2ba^2BAB, a^2BA^3Ba^2b^3"

# wall-clock seconds of the session enumerations, keyed by fixture name
ENUMERATION_SECONDS: dict[str, float] = {}


def _timed_enumeration(name, presentation, max_index):
    start = time.monotonic()
    records = low_index_subgroups(presentation, max_index)
    ENUMERATION_SECONDS[name] = time.monotonic() - start
    return records


@pytest.fixture(scope="session")
def sigma257():
    return parse_presentation(SIGMA257)


@pytest.fixture(scope="session")
def wbar():
    return parse_presentation(WBAR)


@pytest.fixture(scope="session")
def q_group():
    return parse_presentation(Q)


@pytest.fixture(scope="session")
def sigma257_records_13(sigma257):
    return _timed_enumeration("sigma257_13", sigma257, 13)


@pytest.fixture(scope="session")
def wbar_records_16(wbar):
    return _timed_enumeration("wbar_16", wbar, 16)


@pytest.fixture(scope="session")
def q_records_16(q_group):
    return _timed_enumeration("q_16", q_group, 16)
