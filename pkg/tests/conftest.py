from __future__ import annotations

import numpy as np
import pytest

from ipseries.core import load_bundled, to_monthly_series
from ipseries.pipeline import PipelineConfig, run_pipeline
from ipseries.prep import clean_pair


@pytest.fixture(scope="session")
def raw():
    return load_bundled()


@pytest.fixture(scope="session")
def raw_series(raw):
    return to_monthly_series(raw, "trademarks"), to_monthly_series(raw, "patents")


@pytest.fixture(scope="session")
def cleaned(raw_series):
    return clean_pair(*raw_series)


@pytest.fixture(scope="session")
def report():
    return run_pipeline(PipelineConfig())


@pytest.fixture(scope="session")
def report_dict(report):
    return report.to_dict()


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)
