"""Shared fixtures: catalog instances and their full reports are built once."""

from __future__ import annotations

import math

import pytest

from pmcv import analysis, catalog
from pmcv.geometry import SpaceForm

_ACCEPTANCE_LINES: list[str] = []


@pytest.fixture(scope="session")
def instances():
    return {
        "4.1": catalog.example_4_1(n=4, p=2, mu=math.sqrt(2.0)),
        "4.2": catalog.example_4_2(n=4, p=3, mu=math.sqrt(2.0)),
        "4.3": catalog.example_4_3(n=4, p=2, cot=2.0),
        "4.4": catalog.example_4_4(n=4, p=3, cot=2.0),
        "umbilical": catalog.build_umbilical(SpaceForm(5, 1, 1.0), 2.0),
        "product": catalog.build_product(3, 1, 0.6),
    }


@pytest.fixture(scope="session")
def reports(instances):
    cache: dict = {}

    def get(key):
        if key not in cache:
            cache[key] = analysis.full_report(instances[key], counts=5)
        return cache[key]

    return get


@pytest.fixture
def acceptance(request):
    """Record a PASS/FAIL line for an acceptance criterion and assert it."""

    def record(criterion: str, ok: bool, detail: str = ""):
        line = f"[{'PASS' if ok else 'FAIL'}] criterion {criterion}: {detail}"
        _ACCEPTANCE_LINES.append(line)
        print(line)
        assert ok, line

    return record


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in _ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
