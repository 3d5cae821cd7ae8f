import pytest

from aqe import maass


@pytest.fixture(scope="session", autouse=True)
def _cache_dir(tmp_path_factory):
    path = tmp_path_factory.mktemp("aqe-cache")
    mp = pytest.MonkeyPatch()
    mp.setenv("AQE_CACHE_DIR", str(path))
    yield path
    mp.undo()


@pytest.fixture(scope="session")
def odd_form():
    """First odd level-1 form, t ~ 9.5337."""
    (form,) = maass.solve_form((9.0, 10.0), "odd")
    return form


@pytest.fixture(scope="session")
def even_form():
    """First even level-1 form, t ~ 13.7798."""
    (form,) = maass.solve_form((13.0, 14.5), "even")
    return form


@pytest.fixture(scope="session")
def catalog15():
    return maass.build_catalog(15.0)


@pytest.fixture(scope="session")
def odd_test_form(catalog15):
    """An odd form other than the first one (t ~ 12.17)."""
    return next(f for f in catalog15.forms if f.odd and f.t > 12)


@pytest.fixture(scope="session")
def weyl_oracle14():
    """Independent scan at doubled truncation (different collocation heights and points)."""
    return maass.build_catalog(14.0, truncation_factor=2, locate_only=True)
