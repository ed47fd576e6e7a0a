"""Shared fixtures: the bundled example domains, parsed once per session."""

from importlib.resources import files

import pytest

from nesscause import Context, Scenario, parse_domain, parse_scenario

DOMAINS = files("nesscause") / "domains"


def read_bundled(name: str) -> str:
    return (DOMAINS / name).read_text(encoding="utf-8")


@pytest.fixture(scope="session")
def pollution() -> Context:
    return parse_domain(read_bundled("pollution.adl"))


@pytest.fixture(scope="session")
def duplication(pollution: Context) -> Scenario:
    return parse_scenario(read_bundled("duplication.sc"), pollution)


@pytest.fixture(scope="session")
def preemption(pollution: Context) -> Scenario:
    return parse_scenario(read_bundled("preemption.sc"), pollution)


@pytest.fixture(scope="session")
def switches() -> Context:
    return parse_domain(read_bundled("switches.adl"))


@pytest.fixture(scope="session")
def switches_scenario(switches: Context) -> Scenario:
    return parse_scenario(read_bundled("switches.sc"), switches)


@pytest.fixture(scope="session")
def guarded_write() -> Context:
    return parse_domain(read_bundled("after.adl"))


@pytest.fixture(scope="session")
def guarded_write_scenario(guarded_write: Context) -> Scenario:
    return parse_scenario(read_bundled("after.sc"), guarded_write)
