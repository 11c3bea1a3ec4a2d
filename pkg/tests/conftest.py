import numpy as np
import pytest

from emtensor.scenarios import catalog
from emtensor.verify import CHECKS, RunContext, run_checks


@pytest.fixture(scope="session")
def catalog_scenarios():
    return catalog()


@pytest.fixture(scope="session")
def scenario_by_name(catalog_scenarios):
    return {s.name: s for s in catalog_scenarios}


@pytest.fixture(scope="session")
def full_reports(catalog_scenarios):
    """One full default-configuration run over the entire catalog, shared by
    the acceptance tests."""
    ctx = RunContext()
    return run_checks(catalog_scenarios, list(CHECKS), ctx)


def reports_named(reports, check, scenario=None):
    out = [r for r in reports if r.name == check
           and (scenario is None or r.scenario == scenario)]
    assert out, f"no reports for check {check!r} scenario {scenario!r}"
    return out


@pytest.fixture(scope="session")
def pick():
    return reports_named
