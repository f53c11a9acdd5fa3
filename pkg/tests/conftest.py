from pathlib import Path

import pytest

from incgr.grounding import ground
from incgr.pddl import load_problem, parse_domain

DATA = Path(__file__).parent / "data"


@pytest.fixture(scope="session")
def data_dir():
    return DATA


@pytest.fixture(scope="session")
def abstract():
    return load_problem(DATA / "abstract-domain.pddl", DATA / "abstract-problem.pddl",
                        observations_path=DATA / "abstract.obs")


@pytest.fixture(scope="session")
def abstract_task(abstract):
    return ground(abstract.domain, abstract.objects, abstract.init)


@pytest.fixture(scope="session")
def abstract_domain():
    return parse_domain((DATA / "abstract-domain.pddl").read_text())
