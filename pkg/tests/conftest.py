from __future__ import annotations

import datetime as dt

import pytest

from flowgen.config import default_config
from flowgen.generate import generate


@pytest.fixture(scope="session")
def small_config():
    """40 users over half a year: enough signal for the statistical checks."""
    return default_config().replace(
        seed=7, population_size=40, start_date=dt.date(2024, 1, 1), end_date=dt.date(2024, 6, 30)
    )


@pytest.fixture(scope="session")
def small_dir(tmp_path_factory, small_config):
    out = tmp_path_factory.mktemp("small")
    generate(small_config, out)
    return out


@pytest.fixture(scope="session")
def default_run(tmp_path_factory):
    """The reference configuration, generated once per session."""
    out = tmp_path_factory.mktemp("default")
    summary = generate(default_config(), out)
    return out, summary
