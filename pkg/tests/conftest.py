import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

import fixtures as fx  # noqa: E402
from dupo import load_catalog, preset  # noqa: E402


@pytest.fixture(scope="session")
def catalog():
    return load_catalog()


@pytest.fixture(scope="session")
def desktop():
    return preset("desktop")


@pytest.fixture(scope="session")
def tablet():
    return preset("tablet")


@pytest.fixture(scope="session")
def phone():
    return preset("phone")


@pytest.fixture
def line_spec():
    return fx.line_chart()


@pytest.fixture
def pie_spec():
    return fx.pie_chart()


@pytest.fixture
def bar_spec():
    return fx.bar_chart()


@pytest.fixture(scope="session")
def corpus_specs():
    return fx.corpus()


@pytest.fixture
def studio(tmp_path, catalog):
    from dupo import Studio
    return Studio(data_dir=str(tmp_path / "sessions"), catalog=catalog)


@pytest.fixture
def session(studio, line_spec):
    return studio.create_session({"spec": line_spec.to_dict(),
                                  "device": "desktop"})
