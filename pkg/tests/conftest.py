import pytest

from divmax import bundled_models


def pytest_addoption(parser):
    parser.addoption(
        "--allow-long",
        action="store_true",
        default=False,
        help="also run tests marked long (full 2x3x3 enumeration, minutes)",
    )


def pytest_collection_modifyitems(config, items):
    if config.getoption("--allow-long"):
        return
    skip = pytest.mark.skip(reason="needs --allow-long")
    for item in items:
        if "long" in item.keywords:
            item.add_marker(skip)


@pytest.fixture(scope="session")
def golden():
    return bundled_models()
