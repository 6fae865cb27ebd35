import os

import pytest


@pytest.fixture(autouse=True, scope="session")
def _hermetic_cache(tmp_path_factory):
    # keep histogram caching effective within the run but off the user's disk
    d = tmp_path_factory.mktemp("asw-cache")
    old = os.environ.get("ASW_CACHE_DIR")
    os.environ["ASW_CACHE_DIR"] = str(d)
    yield
    if old is None:
        os.environ.pop("ASW_CACHE_DIR", None)
    else:
        os.environ["ASW_CACHE_DIR"] = old


@pytest.fixture(scope="session")
def rescaled_first_block(_hermetic_cache):
    # the rescaled split at the first vertex is the priciest single object
    # the suite needs; build it once
    from asw_slopes.eigencurve import slope_factor
    from asw_slopes.expsum import TowerSpec, char_series

    C = char_series(TowerSpec(2, 1, [0, 0, 0, 1]), 7, 19, 4)
    return slope_factor(C, 3, 2)
